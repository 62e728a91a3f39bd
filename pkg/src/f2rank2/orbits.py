"""Group actions on matrix spaces: canonical keys, witnesses and a key cache.

Equivalence is the action (P, Q) . V = P V Q of GL_n x GL_p, similarity is
conjugation and affine equivalence is the equivalence action on affine
sets.  Keys are lexicographic minima of echelon bases over whole orbits.

An equivalence key is computed on the reduced space of ``V`` (see
:func:`spaces.reduced_space`): two spaces are equivalent exactly when their
reduced shapes agree and their reduced spaces are equivalent, and the reduced
space lives in a smaller ambient, so its orbit is cheaper to scan.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from functools import cache
from pathlib import Path

import numpy as np

from .gf2 import (
    Gf2Matrix,
    ShapeError,
    flat_identity,
    flat_mul,
    group_flats,
    rref,
)
from .spaces import AffineMatrixSpace, MatrixSpace, common_kernel, image_sum, reduced_space

# Orbit scans over more group pairs than this are split into chunks.
_CHUNK = 1 << 20
# Above this many pairs the full scan is replaced by orbit enumeration.
SCAN_LIMIT = 4_000_000


# ---------------------------------------------------------------------------
# keys and witnesses


@dataclass(frozen=True, order=True)
class CanonicalKey:
    """Orbit-invariant label of a space.

    ``core`` is the reduced shape (n', p') and ``payload`` the minimal echelon
    basis of the reduced space over its orbit.  For similarity and affine
    keys the core is the full shape.
    """

    action: str
    n: int
    p: int
    dim: int
    core: tuple[int, int]
    payload: tuple[int, ...]

    def to_hex(self) -> str:
        n2, p2 = self.core
        width = max(1, (n2 * p2 + 3) // 4)
        body = ".".join(f"{b:0{width}x}" for b in self.payload) or "-"
        return f"{self.action}:{self.n}x{self.p}:{n2}x{p2}:{body}"

    def __str__(self) -> str:
        return self.to_hex()


@dataclass(frozen=True)
class Witness:
    """``P`` and ``Q`` with P . first . Q = second."""

    P: Gf2Matrix
    Q: Gf2Matrix

    def apply(self, V: MatrixSpace) -> MatrixSpace:
        return MatrixSpace.from_flats(self.P.nrows, self.Q.ncols, (_pmq(self.P, b, self.Q, V.n, V.p) for b in V.basis))

    def apply_affine(self, S: AffineMatrixSpace) -> AffineMatrixSpace:
        n, p = S.shape
        T = self.apply(S.translation)
        return AffineMatrixSpace.of(_pmq(self.P, S.base, self.Q, n, p), T)


def _pmq(P: Gf2Matrix, x: int, Q: Gf2Matrix, n: int, p: int) -> int:
    return flat_mul(flat_mul(P.flat, x, n, n, p), Q.flat, n, p, p)


# ---------------------------------------------------------------------------
# vectorized kernels


@cache
def _top_table() -> np.ndarray:
    t = np.zeros(1 << 16, dtype=np.int64)
    for k in range(16):
        t[1 << k : 1 << (k + 1)] = 1 << k
    return t


def highest_bit(a: np.ndarray) -> np.ndarray:
    """``1 << floor(log2(a))`` elementwise, 0 where ``a == 0``."""
    table = _top_table()
    out = table[a & 0xFFFF]
    rest = a >> 16
    shift = 16
    while np.any(rest):
        hi = table[rest & 0xFFFF] << shift
        out = np.where(hi != 0, hi, out)
        rest = rest >> 16
        shift += 16
    return out


def rref_batch(a: np.ndarray) -> np.ndarray:
    """Row-wise echelon form of independent vectors, ascending per row.

    ``a`` has shape (N, d); each row lists d linearly independent flats.
    """
    a = np.array(a, dtype=np.int64, copy=True)
    N, d = a.shape
    idx = np.arange(N)
    for k in range(d):
        j = a[:, k:].argmax(axis=1) + k
        piv = a[idx, j]
        a[idx, j] = a[:, k]
        a[:, k] = piv
        top = highest_bit(piv)
        hit = (a & top[:, None]) != 0
        hit[:, k] = False
        a ^= np.where(hit, piv[:, None], 0)
    a.sort(axis=1)
    return a


def lexmin_index(a: np.ndarray) -> int:
    """Index of the lexicographically least row of a 2-D array."""
    cand = np.arange(a.shape[0])
    for j in range(a.shape[1]):
        col = a[cand, j]
        cand = cand[col == col.min()]
        if cand.size == 1:
            break
    return int(cand[0])


@cache
def _row_times(p: int) -> np.ndarray:
    """table[q, r] = r . Q for row vectors r and Q the q-th element of GL_p."""
    qs = np.array(group_flats(p), dtype=np.int64)
    mask = (1 << p) - 1
    r = np.arange(1 << p, dtype=np.int64)
    out = np.zeros((qs.size, 1 << p), dtype=np.int64)
    for j in range(p):
        qrow = (qs >> (j * p)) & mask
        out ^= np.where((r >> j) & 1, qrow[:, None], 0)
    return out


@cache
def _left_rows(n: int) -> np.ndarray:
    """rows[pidx, i] = i-th row of the pidx-th element of GL_n, as a mask."""
    ps = np.array(group_flats(n), dtype=np.int64)
    mask = (1 << n) - 1
    return np.stack([(ps >> (i * n)) & mask for i in range(n)], axis=1)


def _combine_rows(flat: int, n: int, p: int, qtab: np.ndarray, prow: np.ndarray, paired: bool) -> np.ndarray:
    mask = (1 << p) - 1
    rq = [qtab[:, (flat >> (k * p)) & mask] for k in range(n)]
    # comb[:, s] = sum of the right-multiplied rows indexed by the bits of s
    comb = np.zeros((qtab.shape[0], 1 << n), dtype=np.int64)
    for s in range(1, 1 << n):
        low = (s & -s).bit_length() - 1
        comb[:, s] = comb[:, s & (s - 1)] ^ rq[low]
    if paired:
        out = np.zeros(qtab.shape[0], dtype=np.int64)
        for i in range(n):
            out |= np.take_along_axis(comb, prow[:, i : i + 1], axis=1)[:, 0] << (i * p)
        return out
    out = np.zeros((qtab.shape[0], prow.shape[0]), dtype=np.int64)
    for i in range(n):
        out |= comb[:, prow[:, i]] << (i * p)
    return out


def _images(flat: int, n: int, p: int, qsel, psel) -> np.ndarray:
    """P M Q for every selected P (columns) and Q (rows): shape (|Q|, |P|)."""
    return _combine_rows(flat, n, p, _row_times(p)[qsel], _left_rows(n)[psel], paired=False)


def _images_paired(flat: int, n: int, p: int, pidx: np.ndarray, qidx: np.ndarray) -> np.ndarray:
    """P_k M Q_k for index arrays of equal length."""
    return _combine_rows(flat, n, p, _row_times(p)[qidx], _left_rows(n)[pidx], paired=True)


@cache
def _inverse_index(n: int) -> np.ndarray:
    flats = group_flats(n)
    pos = {x: k for k, x in enumerate(flats)}
    return np.array([pos[Gf2Matrix.from_flat(x, n, n).inverse().flat] for x in flats], dtype=np.int64)


def _group_matrix(n: int, idx: int) -> Gf2Matrix:
    return Gf2Matrix.from_flat(group_flats(n)[idx], n, n)


def _reduce_against(x: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Reduce each x[k] modulo the echelon rows basis[k]."""
    x = x.copy()
    for j in range(basis.shape[1]):
        b = basis[:, j]
        x ^= np.where(x & highest_bit(b), b, 0)
    return x


# ---------------------------------------------------------------------------
# orbit enumeration


def group_generators(n: int) -> tuple[int, ...]:
    """Flats generating GL_n(F2): one transvection and the cyclic shift."""
    if n == 1:
        return ()
    transvection = flat_identity(n) ^ (1 << 1)
    shift = sum(1 << (((j + 1) % n) * n + j) for j in range(n))
    return (transvection, shift)


def _apply_left(flats: np.ndarray, P: int, n: int, p: int) -> np.ndarray:
    mask = (1 << p) - 1
    rows = [(flats >> (k * p)) & mask for k in range(n)]
    out = np.zeros_like(flats)
    for i in range(n):
        acc = np.zeros_like(flats)
        for k in range(n):
            if (P >> (i * n + k)) & 1:
                acc ^= rows[k]
        out |= acc << (i * p)
    return out


def _apply_right(flats: np.ndarray, Q: int, n: int, p: int) -> np.ndarray:
    mask = (1 << p) - 1
    qrows = [(Q >> (j * p)) & mask for j in range(p)]
    out = np.zeros_like(flats)
    for i in range(n):
        r = (flats >> (i * p)) & mask
        acc = np.zeros_like(flats)
        for j in range(p):
            acc ^= np.where((r >> j) & 1, qrows[j], 0)
        out |= acc << (i * p)
    return out


@cache
def _generator_moves(n: int, p: int) -> tuple[tuple[str, np.ndarray, np.ndarray], ...]:
    """(side, table on Mat_{n,p}, table on the tracked group element) per generator."""
    if n * p > 16:
        raise ShapeError("orbit enumeration needs n*p <= 16")
    flats = np.arange(1 << (n * p), dtype=np.int64)
    moves = []
    for g in group_generators(n):
        track = _apply_left(np.arange(1 << (n * n), dtype=np.int64), g, n, n)
        moves.append(("left", _apply_left(flats, g, n, p), track))
    for g in group_generators(p):
        track = _apply_right(np.arange(1 << (p * p), dtype=np.int64), g, p, p)
        moves.append(("right", _apply_right(flats, g, n, p), track))
    return tuple(moves)


def _pack(a: np.ndarray) -> np.ndarray:
    """Rows of ``a`` as big-endian byte strings, so byte order is lex order."""
    b = np.ascontiguousarray(a.astype(">u2"))
    return b.view(np.dtype((np.void, 2 * a.shape[1]))).ravel()


def _unpack(packed: np.void, d: int) -> tuple[int, ...]:
    return tuple(int(x) for x in np.frombuffer(packed.tobytes(), dtype=">u2", count=d))


def enumerate_orbit(basis: tuple[int, ...], n: int, p: int, limit: int = 50_000_000) -> np.ndarray:
    """Sorted packed echelon bases of every space in the GL_n x GL_p orbit."""
    if not basis:
        return _pack(np.zeros((1, 0), dtype=np.int64))
    moves = _generator_moves(n, p)
    frontier = np.array([basis], dtype=np.int64)
    seen = _pack(frontier)
    while frontier.size and moves:
        imgs = np.concatenate([rref_batch(table[frontier]) for _, table, _ in moves])
        packed, first = np.unique(_pack(imgs), return_index=True)
        fresh = ~np.isin(packed, seen, assume_unique=True)
        frontier = imgs[first[fresh]]
        seen = np.union1d(seen, packed[fresh])
        if seen.size > limit:
            raise RuntimeError(f"orbit exceeds {limit} spaces")
    return seen


def _orbit_path(source: tuple[int, ...], target: tuple[int, ...], n: int, p: int) -> tuple[int, int] | None:
    """Flats (P, Q) with P source Q = target, found by breadth-first search."""
    goal = _pack(np.array([target], dtype=np.int64))[0]
    frontier = np.array([source], dtype=np.int64)
    Ps = np.array([flat_identity(n)], dtype=np.int64)
    Qs = np.array([flat_identity(p)], dtype=np.int64)
    if source == target:
        return int(Ps[0]), int(Qs[0])
    seen = _pack(frontier)
    moves = _generator_moves(n, p)
    while frontier.size:
        imgs, nP, nQ = [], [], []
        for side, table, track in moves:
            imgs.append(rref_batch(table[frontier]))
            nP.append(track[Ps] if side == "left" else Ps)
            nQ.append(track[Qs] if side == "right" else Qs)
        imgs_a = np.concatenate(imgs)
        P_a, Q_a = np.concatenate(nP), np.concatenate(nQ)
        packed = _pack(imgs_a)
        hit = np.flatnonzero(packed == goal)
        if hit.size:
            return int(P_a[hit[0]]), int(Q_a[hit[0]])
        uniq, first = np.unique(packed, return_index=True)
        fresh = ~np.isin(uniq, seen, assume_unique=True)
        keep = first[fresh]
        frontier, Ps, Qs = imgs_a[keep], P_a[keep], Q_a[keep]
        seen = np.union1d(seen, uniq[fresh])
    return None


# ---------------------------------------------------------------------------
# reduction frames


def _from_columns(columns: list[int], n: int) -> Gf2Matrix:
    rows = [0] * n
    for c, v in enumerate(columns):
        for i in range(n):
            if (v >> i) & 1:
                rows[i] |= 1 << c
    return Gf2Matrix(n, len(columns), tuple(rows))


def reduction_frame(V: MatrixSpace) -> tuple[Gf2Matrix, Gf2Matrix, MatrixSpace]:
    """(P0, Q0, V') with P0 V Q0 equal to V' padded with zeros."""
    ker = common_kernel(V)
    img = image_sum(V)
    kpiv = set(ker.pivots)
    rows = set(img.pivots)
    Q0 = _from_columns([1 << j for j in range(V.p) if j not in kpiv] + list(ker.basis), V.p)
    Pinv = _from_columns(list(img.basis) + [1 << i for i in range(V.n) if i not in rows], V.n)
    core, _, _ = reduced_space(V)
    return Pinv.inverse(), Q0, core


def _block_diag(A: Gf2Matrix | None, k: int, size: int) -> Gf2Matrix:
    rows = list(A.rows) if A is not None else []
    rows += [1 << i for i in range(k, size)]
    return Gf2Matrix(size, size, tuple(rows))


# ---------------------------------------------------------------------------
# equivalence keys with cache

CACHE_VERSION = "f2rank2-cache v1"


def _basis_hex(basis: tuple[int, ...], n: int, p: int) -> str:
    width = max(1, (n * p + 3) // 4)
    return ".".join(f"{b:0{width}x}" for b in basis) or "-"


def _parse_key(text: str) -> CanonicalKey:
    action, shape, core, body = text.split(":")
    n, p = (int(t) for t in shape.split("x"))
    n2, p2 = (int(t) for t in core.split("x"))
    payload = () if body == "-" else tuple(int(t, 16) for t in body.split("."))
    return CanonicalKey(action, n, p, len(payload), (n2, p2), payload)


class EquivalenceCanonizer:
    """Computes equivalence keys, remembering every orbit it has enumerated.

    Reduced spaces are looked up in the orbits found so far; a miss
    enumerates the new orbit once.  Queried spaces are also memoized by
    their raw echelon basis, and that memo is what the on-disk cache stores.
    """

    def __init__(self, cache_dir: str | os.PathLike | None = None):
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self._lock = threading.RLock()
        self._memo: dict[tuple[int, int, tuple[int, ...]], CanonicalKey] = {}
        self._fresh: dict[tuple[int, int], list[tuple[tuple[int, ...], CanonicalKey]]] = {}
        self._orbits: dict[tuple[int, int, int], list[tuple[np.ndarray, tuple[int, ...]]]] = {}
        self._loaded: set[tuple[int, int]] = set()
        self.orbits_enumerated = 0

    # -- persistence ---------------------------------------------------
    def _path(self, n: int, p: int) -> Path:
        assert self.cache_dir is not None
        return self.cache_dir / f"equiv-{n}x{p}.txt"

    def _load(self, n: int, p: int) -> None:
        if self.cache_dir is None or (n, p) in self._loaded:
            return
        self._loaded.add((n, p))
        path = self._path(n, p)
        if not path.exists():
            return
        with path.open() as fh:
            header = fh.readline().strip()
            if header != f"{CACHE_VERSION} {n}x{p}":
                raise ValueError(f"{path}: unexpected cache header {header!r}")
            for line in fh:
                raw, key = line.split()
                basis = () if raw == "-" else tuple(int(t, 16) for t in raw.split("."))
                self._memo[(n, p, basis)] = _parse_key(key)

    def flush(self) -> None:
        """Append keys computed since the last flush to the cache files."""
        if self.cache_dir is None:
            return
        with self._lock:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            for (n, p), records in self._fresh.items():
                if not records:
                    continue
                path = self._path(n, p)
                new = not path.exists()
                with path.open("a") as fh:
                    if new:
                        fh.write(f"{CACHE_VERSION} {n}x{p}\n")
                    for basis, key in records:
                        fh.write(f"{_basis_hex(basis, n, p)} {key.to_hex()}\n")
                records.clear()

    # -- keys -------------------------------------------------------------
    def key(self, V: MatrixSpace) -> CanonicalKey:
        with self._lock:
            self._load(V.n, V.p)
            hit = self._memo.get((V.n, V.p, V.basis))
            if hit is not None:
                return hit
            core, n2, p2 = reduced_space(V)
            payload = self.core_payload(core.basis, n2, p2)
            key = CanonicalKey("equiv", V.n, V.p, V.dim, (n2, p2), payload)
            self._memo[(V.n, V.p, V.basis)] = key
            self._fresh.setdefault((V.n, V.p), []).append((V.basis, key))
            return key

    def core_payload(self, basis: tuple[int, ...], n: int, p: int) -> tuple[int, ...]:
        """Least echelon basis in the orbit of a reduced space."""
        if not basis:
            return ()
        if n > 4 or p > 4:
            raise ShapeError(f"reduced shape {n}x{p} exceeds the supported 4x4")
        store = self._orbits.setdefault((n, p, len(basis)), [])
        probe = _pack(np.array([basis], dtype=np.int64))[0]
        for members, payload in store:
            k = np.searchsorted(members, probe)
            if k < members.size and members[k] == probe:
                return payload
        members = enumerate_orbit(basis, n, p)
        self.orbits_enumerated += 1
        payload = _unpack(members[0], len(basis))
        store.append((members, payload))
        return payload


_default_lock = threading.Lock()
_default: EquivalenceCanonizer | None = None


def default_canonizer() -> EquivalenceCanonizer:
    global _default
    with _default_lock:
        if _default is None:
            _default = EquivalenceCanonizer(os.environ.get("F2RANK2_CACHE") or None)
        return _default


def set_default_canonizer(canonizer: EquivalenceCanonizer) -> None:
    global _default
    with _default_lock:
        _default = canonizer


# ---------------------------------------------------------------------------
# public operations


def canonical_equiv(V: MatrixSpace) -> CanonicalKey:
    """Equivalence key: equal keys exactly for spaces P V Q of each other."""
    return default_canonizer().key(V)


def are_equivalent(V: MatrixSpace, W: MatrixSpace) -> Witness | None:
    if V.shape != W.shape:
        raise ShapeError(f"shapes {V.shape} and {W.shape} differ")
    if canonical_equiv(V) != canonical_equiv(W):
        return None
    n, p = V.shape
    P0v, Q0v, Cv = reduction_frame(V)
    P0w, Q0w, Cw = reduction_frame(W)
    n2, p2 = Cv.shape
    core_P = core_Q = None
    if Cv.dim:
        found = _orbit_path(Cv.basis, Cw.basis, n2, p2)
        if found is None:  # keys agree, so this cannot happen
            raise AssertionError("equal keys without a connecting path")
        core_P = Gf2Matrix.from_flat(found[0], n2, n2)
        core_Q = Gf2Matrix.from_flat(found[1], p2, p2)
    P = P0w.inverse() @ _block_diag(core_P, n2 if Cv.dim else 0, n) @ P0v
    Q = Q0v @ _block_diag(core_Q, p2 if Cv.dim else 0, p) @ Q0w.inverse()
    wit = Witness(P, Q)
    if wit.apply(V) != W:
        raise AssertionError("witness failed re-verification")
    return wit


def canonical_sim(V: MatrixSpace) -> CanonicalKey:
    return _sim_scan(V)[0]


def _sim_scan(V: MatrixSpace) -> tuple[CanonicalKey, int]:
    n = V.n
    if V.p != n:
        raise ShapeError("similarity needs square spaces")
    if n > 4:
        raise ShapeError("similarity keys supported for n <= 4")
    if not V.basis:
        return CanonicalKey("similar", n, n, 0, (n, n), ()), 0
    pidx = np.arange(len(group_flats(n)))
    qidx = _inverse_index(n)
    imgs = np.stack([_images_paired(b, n, n, pidx, qidx) for b in V.basis], axis=1)
    red = rref_batch(imgs)
    i = lexmin_index(red)
    payload = tuple(int(v) for v in red[i])
    return CanonicalKey("similar", n, n, V.dim, (n, n), payload), i


def are_similar(V: MatrixSpace, W: MatrixSpace) -> Witness | None:
    if V.shape != W.shape:
        raise ShapeError(f"shapes {V.shape} and {W.shape} differ")
    kv, iv = _sim_scan(V)
    kw, iw = _sim_scan(W)
    if kv != kw:
        return None
    n = V.n
    P = _group_matrix(n, iw).inverse() @ _group_matrix(n, iv)
    wit = Witness(P, P.inverse())
    if wit.apply(V) != W:
        raise AssertionError("witness failed re-verification")
    return wit


def _affine_scan(S: AffineMatrixSpace) -> tuple[CanonicalKey, int, int]:
    n, p = S.shape
    if n > 3 or p > 3:
        raise ShapeError("affine keys supported up to 3x3")
    nP, nQ = len(group_flats(n)), len(group_flats(p))
    bases = _images(S.base, n, p, slice(None), slice(None)).ravel()
    if S.translation.basis:
        imgs = np.stack([_images(b, n, p, slice(None), slice(None)).ravel() for b in S.translation.basis], axis=1)
        red = rref_batch(imgs)
    else:
        red = np.zeros((nP * nQ, 0), dtype=np.int64)
    base = _reduce_against(bases, red)
    table = np.concatenate([red, base[:, None]], axis=1)
    i = lexmin_index(table)
    payload = tuple(int(v) for v in table[i])
    return CanonicalKey("affine", n, p, S.dim, (n, p), payload), i % nP, i // nP


def canonical_affine(S: AffineMatrixSpace) -> CanonicalKey:
    """Key of an affine space under (P, Q) . S = P S Q; the last payload entry is the base."""
    return _affine_scan(S)[0]


def affine_equivalent(S: AffineMatrixSpace, T: AffineMatrixSpace) -> Witness | None:
    if S.shape != T.shape:
        raise ShapeError(f"shapes {S.shape} and {T.shape} differ")
    ks, ps, qs = _affine_scan(S)
    kt, pt, qt = _affine_scan(T)
    if ks != kt:
        return None
    n, p = S.shape
    P = _group_matrix(n, pt).inverse() @ _group_matrix(n, ps)
    Q = _group_matrix(p, qs) @ _group_matrix(p, qt).inverse()
    wit = Witness(P, Q)
    if wit.apply_affine(S) != T:
        raise AssertionError("witness failed re-verification")
    return wit


def embedding_witness(W: MatrixSpace, S: MatrixSpace) -> Witness | None:
    """(P, Q) with P W Q contained in S, by scanning GL_n x GL_p."""
    if W.shape != S.shape:
        raise ShapeError(f"shapes {W.shape} and {S.shape} differ")
    n, p = W.shape
    nP, nQ = len(group_flats(n)), len(group_flats(p))
    if nP * nQ > SCAN_LIMIT:
        raise ShapeError(f"embedding scan over {nP * nQ} pairs is too large")
    ok = np.ones(nP * nQ, dtype=bool)
    for b in W.basis:
        img = _images(b, n, p, slice(None), slice(None)).ravel()
        for s in S.basis:
            img = np.where(img & (1 << (s.bit_length() - 1)), img ^ s, img)
        ok &= img == 0
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        return None
    i = int(hits[0])
    wit = Witness(_group_matrix(n, i % nP), _group_matrix(p, i // nP))
    if not wit.apply(W) <= S:
        raise AssertionError("embedding witness failed re-verification")
    return wit
