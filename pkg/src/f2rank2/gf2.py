"""Bit-packed linear algebra over F2 for small matrices.

A matrix is stored row-major: bit ``j`` of ``rows[i]`` is the entry at
``(i, j)``.  Hot loops elsewhere in the package work on the *flat* integer
``sum(rows[i] << (i * ncols))``, so entry ``(i, j)`` sits at bit
``i * ncols + j``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cache
from typing import Iterator, Sequence

import numpy as np

MAX_SIDE = 8


class ShapeError(ValueError):
    """Raised when an operation receives matrices of unsupported shape."""


def _check_side(k: int, what: str) -> None:
    if not 1 <= k <= MAX_SIDE:
        raise ShapeError(f"{what} must lie in 1..{MAX_SIDE}, got {k}")


@dataclass(frozen=True, order=True)
class Gf2Matrix:
    nrows: int
    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        _check_side(self.nrows, "nrows")
        _check_side(self.ncols, "ncols")
        if len(self.rows) != self.nrows:
            raise ShapeError(f"expected {self.nrows} rows, got {len(self.rows)}")
        mask = (1 << self.ncols) - 1
        for r in self.rows:
            if r < 0 or r & ~mask:
                raise ShapeError(f"row mask {r:#x} exceeds {self.ncols} columns")

    # -- constructors -------------------------------------------------
    @classmethod
    def zeros(cls, n: int, p: int | None = None) -> Gf2Matrix:
        return cls(n, n if p is None else p, (0,) * n)

    @classmethod
    def identity(cls, n: int) -> Gf2Matrix:
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_flat(cls, flat: int, n: int, p: int) -> Gf2Matrix:
        mask = (1 << p) - 1
        return cls(n, p, tuple((flat >> (i * p)) & mask for i in range(n)))

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]]) -> Gf2Matrix:
        n = len(entries)
        if n == 0:
            raise ShapeError("empty matrix")
        p = len(entries[0])
        rows = []
        for row in entries:
            if len(row) != p:
                raise ShapeError("ragged matrix")
            rows.append(sum((int(v) & 1) << j for j, v in enumerate(row)))
        return cls(n, p, tuple(rows))

    @classmethod
    def from_text(cls, text: str) -> Gf2Matrix:
        """Parse ``"1,0,0;0,1,0;0,0,0"`` style text."""
        rows = [r.strip() for r in text.strip().split(";")]
        try:
            entries = [[int(v) for v in r.split(",")] for r in rows]
        except ValueError as exc:
            raise ValueError(f"bad matrix text {text!r}") from exc
        if any(v not in (0, 1) for r in entries for v in r):
            raise ValueError(f"entries must be 0 or 1 in {text!r}")
        return cls.from_lists(entries)

    @classmethod
    def from_hex(cls, text: str) -> Gf2Matrix:
        """Inverse of :meth:`to_hex`."""
        try:
            shape, payload = text.split(":")
            n, p = (int(s) for s in shape.split("x"))
        except ValueError as exc:
            raise ValueError(f"bad hex matrix {text!r}") from exc
        if not payload.startswith("h"):
            raise ValueError(f"bad hex matrix {text!r}")
        payload = payload[1:]
        w = _hex_width(p)
        if len(payload) != n * w:
            raise ValueError(f"hex payload of {text!r} has wrong width")
        chunks = [int(payload[k * w:(k + 1) * w], 16) for k in range(n)]
        return cls(n, p, tuple(reversed(chunks)))

    # -- views ----------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def flat(self) -> int:
        out = 0
        for i, r in enumerate(self.rows):
            out |= r << (i * self.ncols)
        return out

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.ncols)] for r in self.rows]

    def to_text(self) -> str:
        return ";".join(",".join(str(v) for v in row) for row in self.to_lists())

    def to_hex(self) -> str:
        w = _hex_width(self.ncols)
        body = "".join(f"{r:0{w}X}" for r in reversed(self.rows))
        return f"{self.nrows}x{self.ncols}:h{body}"

    def __str__(self) -> str:
        return self.to_text()

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other: Gf2Matrix) -> Gf2Matrix:
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        return Gf2Matrix(self.nrows, self.ncols, tuple(a ^ b for a, b in zip(self.rows, other.rows)))

    __sub__ = __add__

    def __matmul__(self, other: Gf2Matrix) -> Gf2Matrix:
        if self.ncols != other.nrows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for r in self.rows:
            acc = 0
            k = 0
            while r:
                if r & 1:
                    acc ^= other.rows[k]
                r >>= 1
                k += 1
            out.append(acc)
        return Gf2Matrix(self.nrows, other.ncols, tuple(out))

    def apply(self, x: Gf2Vector) -> Gf2Vector:
        if x.length != self.ncols:
            raise ShapeError(f"vector of length {x.length} vs {self.ncols} columns")
        bits = 0
        for i, r in enumerate(self.rows):
            bits |= (bin(r & x.bits).count("1") & 1) << i
        return Gf2Vector(self.nrows, bits)

    @property
    def T(self) -> Gf2Matrix:
        return Gf2Matrix(self.ncols, self.nrows, tuple(
            sum(((self.rows[i] >> j) & 1) << i for i in range(self.nrows))
            for j in range(self.ncols)
        ))

    def trace(self) -> int:
        return sum(self.entry(i, i) for i in range(min(self.nrows, self.ncols))) & 1

    def inverse(self) -> Gf2Matrix:
        if self.nrows != self.ncols:
            raise ShapeError("inverse of a non-square matrix")
        n = self.nrows
        aug = [r | (1 << (n + i)) for i, r in enumerate(self.rows)]
        for col in range(n):
            piv = next((k for k in range(col, n) if (aug[k] >> col) & 1), None)
            if piv is None:
                raise ZeroDivisionError("matrix is singular")
            aug[col], aug[piv] = aug[piv], aug[col]
            for k in range(n):
                if k != col and (aug[k] >> col) & 1:
                    aug[k] ^= aug[col]
        return Gf2Matrix(n, n, tuple(r >> n for r in aug))

    def pad(self, n: int, p: int) -> Gf2Matrix:
        """Zero-pad to ``n x p`` keeping this block top-left."""
        if n < self.nrows or p < self.ncols:
            raise ShapeError(f"cannot pad {self.shape} into {(n, p)}")
        return Gf2Matrix(n, p, self.rows + (0,) * (n - self.nrows))


@dataclass(frozen=True, order=True)
class Gf2Vector:
    length: int
    bits: int

    def __post_init__(self) -> None:
        if self.bits < 0 or self.bits >> self.length:
            raise ShapeError(f"bits {self.bits:#x} exceed length {self.length}")

    @classmethod
    def basis(cls, length: int, i: int) -> Gf2Vector:
        return cls(length, 1 << i)

    def to_list(self) -> list[int]:
        return [(self.bits >> i) & 1 for i in range(self.length)]

    def __add__(self, other: Gf2Vector) -> Gf2Vector:
        if self.length != other.length:
            raise ShapeError("vector length mismatch")
        return Gf2Vector(self.length, self.bits ^ other.bits)

    def __bool__(self) -> bool:
        return self.bits != 0


@dataclass(frozen=True)
class Gf2Poly:
    """Polynomial over F2; bit ``k`` of ``coeffs`` is the coefficient of t^k."""

    coeffs: int

    @property
    def degree(self) -> int:
        return self.coeffs.bit_length() - 1

    def __call__(self, t: int) -> int:
        if t & 1:
            return bin(self.coeffs).count("1") & 1
        return self.coeffs & 1

    def __add__(self, other: Gf2Poly) -> Gf2Poly:
        return Gf2Poly(self.coeffs ^ other.coeffs)

    def __mul__(self, other: Gf2Poly) -> Gf2Poly:
        return Gf2Poly(clmul(self.coeffs, other.coeffs))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            if (self.coeffs >> k) & 1:
                terms.append("1" if k == 0 else "t" if k == 1 else f"t^{k}")
        return "+".join(terms)


@dataclass(frozen=True)
class QuadForm:
    """The quadratic form X -> X^T P X given by an upper-triangular ``P``."""

    n: int
    rep: Gf2Matrix

    def __post_init__(self) -> None:
        if self.rep.shape != (self.n, self.n):
            raise ShapeError("representative must be n x n")
        for i, r in enumerate(self.rep.rows):
            if r & ((1 << i) - 1):
                raise ValueError("representative must be upper-triangular")

    @classmethod
    def of_matrix(cls, P: Gf2Matrix) -> QuadForm:
        """Upper-triangular representative of X^T P X (fold P + P^T above the diagonal)."""
        n = P.nrows
        rows = []
        for i in range(n):
            r = 0
            for j in range(i, n):
                v = P.entry(i, j) if i == j else P.entry(i, j) ^ P.entry(j, i)
                r |= v << j
            rows.append(r)
        return cls(n, Gf2Matrix(n, n, tuple(rows)))

    def __call__(self, x: Gf2Vector) -> int:
        return _bit_dot(x.bits, self.rep.apply(x).bits)


def _hex_width(p: int) -> int:
    return (p + 3) // 4


def _bit_dot(a: int, b: int) -> int:
    return bin(a & b).count("1") & 1


def clmul(a: int, b: int) -> int:
    """Carry-less product, i.e. multiplication in F2[t]."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


# ---------------------------------------------------------------------------
# row reduction on plain integers


def rref(vectors) -> tuple[int, ...]:
    """Reduced echelon basis of the span of ``vectors``.

    Pivots are highest set bits; every pivot bit is clear in all other basis
    vectors.  The basis is returned in ascending order, which makes it a
    canonical description of the subspace.
    """
    basis: dict[int, int] = {}
    for v in vectors:
        v = reduce_vector(v, basis)
        if v:
            top = v.bit_length() - 1
            for t, b in basis.items():
                if (b >> top) & 1:
                    basis[t] = b ^ v
            basis[top] = v
    return tuple(sorted(basis.values()))


def reduce_vector(v: int, basis) -> int:
    """Reduce ``v`` modulo an echelon basis given as ``{pivot: vector}`` or a
    sequence of fully reduced vectors."""
    if isinstance(basis, dict):
        items = basis.items()
    else:
        items = ((b.bit_length() - 1, b) for b in basis)
    for top, b in items:
        if (v >> top) & 1:
            v ^= b
    return v


def rank_of_vectors(vectors) -> int:
    return len(rref(vectors))


# ---------------------------------------------------------------------------
# flat-integer kernels


def flat_rank(x: int, n: int, p: int) -> int:
    if n * p <= 16:
        return int(rank_table(n, p)[x])
    mask = (1 << p) - 1
    return rank_of_vectors((x >> (i * p)) & mask for i in range(n))


@cache
def rank_table(n: int, p: int) -> np.ndarray:
    """Rank of every ``n x p`` matrix, indexed by flat integer."""
    if n * p > 16:
        raise ShapeError("rank table only for n*p <= 16")
    return batch_rank(np.arange(1 << (n * p), dtype=np.int64), n, p)


def batch_rank(flats: np.ndarray, n: int, p: int) -> np.ndarray:
    """Rank of each flat in an int64 array of ``n x p`` matrices."""
    flats = np.asarray(flats, dtype=np.int64)
    size = flats.size
    mask = (1 << p) - 1
    rows = [(flats >> (i * p)) & mask for i in range(n)]
    ranks = np.zeros(size, dtype=np.int8)
    for _ in range(min(n, p)):
        # one elimination step per pass: pick the row with the highest top bit
        stack = np.stack(rows)
        best = stack.argmax(axis=0)
        piv = stack[best, np.arange(size)]
        nonzero = piv != 0
        ranks += nonzero
        top = np.where(nonzero, 1 << _top_bit(piv), 0)
        new_rows = []
        for k in range(n):
            r = np.where(best == k, 0, rows[k])
            r = np.where(r & top, r ^ piv, r)
            new_rows.append(r)
        rows = new_rows
    return ranks


def _top_bit(a: np.ndarray) -> np.ndarray:
    out = np.zeros(a.shape, dtype=np.int64)
    a = a.copy()
    for shift in (16, 8, 4, 2, 1):
        big = a >= (1 << shift)
        out += np.where(big, shift, 0)
        a = np.where(big, a >> shift, a)
    return out


def flat_mul(a: int, b: int, n: int, k: int, p: int) -> int:
    """Product of flat ``n x k`` and ``k x p`` matrices."""
    kmask = (1 << k) - 1
    pmask = (1 << p) - 1
    brows = [(b >> (j * p)) & pmask for j in range(k)]
    out = 0
    for i in range(n):
        r = (a >> (i * k)) & kmask
        acc = 0
        j = 0
        while r:
            if r & 1:
                acc ^= brows[j]
            r >>= 1
            j += 1
        out |= acc << (i * p)
    return out


def flat_transpose(x: int, n: int, p: int) -> int:
    out = 0
    for i in range(n):
        for j in range(p):
            if (x >> (i * p + j)) & 1:
                out |= 1 << (j * n + i)
    return out


def flat_identity(n: int) -> int:
    return sum(1 << (i * n + i) for i in range(n))


# ---------------------------------------------------------------------------
# scalar invariants


def rank(M: Gf2Matrix) -> int:
    return rank_of_vectors(M.rows)


def rank_by_minors(M: Gf2Matrix) -> int:
    """Largest k with a non-zero k x k minor; brute-force reference."""
    for k in range(min(M.nrows, M.ncols), 0, -1):
        for rs in itertools.combinations(range(M.nrows), k):
            for cs in itertools.combinations(range(M.ncols), k):
                sub = Gf2Matrix.from_lists([[M.entry(i, j) for j in cs] for i in rs])
                if _det_by_permutations(sub):
                    return k
    return 0


def _det_by_permutations(M: Gf2Matrix) -> int:
    total = 0
    for perm in itertools.permutations(range(M.nrows)):
        prod = 1
        for i, j in enumerate(perm):
            prod &= M.entry(i, j)
            if not prod:
                break
        total ^= prod
    return total


def det(M: Gf2Matrix) -> int:
    if M.nrows != M.ncols:
        raise ShapeError(f"determinant of non-square {M.shape} matrix")
    return int(rank(M) == M.nrows)


def adjugate(M: Gf2Matrix) -> Gf2Matrix:
    """Transpose of the cofactor matrix (signs vanish over F2)."""
    n = M.nrows
    if n != M.ncols:
        raise ShapeError("adjugate of a non-square matrix")
    if n > 3:
        raise ShapeError("adjugate implemented for n <= 3")
    if n == 1:
        return Gf2Matrix(1, 1, (1,))
    rows = [0] * n
    for i in range(n):
        for j in range(n):
            minor = [[M.entry(a, b) for b in range(n) if b != j] for a in range(n) if a != i]
            if _det_by_permutations(Gf2Matrix.from_lists(minor)):
                rows[j] |= 1 << i
    return Gf2Matrix(n, n, tuple(rows))


def charpoly(M: Gf2Matrix) -> Gf2Poly:
    """det(tI - M) by cofactor expansion with polynomial entries."""
    n = M.nrows
    if n != M.ncols:
        raise ShapeError("characteristic polynomial of a non-square matrix")
    if n > 5:
        raise ShapeError("charpoly implemented for n <= 5")
    # entry (i,j) of tI - M is the polynomial m_ij + [i == j] t
    ent = [[M.entry(i, j) | ((i == j) << 1) for j in range(n)] for i in range(n)]

    @cache
    def minor(row: int, cols: int) -> int:
        # expand along `row` using the column set `cols`
        if row == n:
            return 1
        acc = 0
        for j in range(n):
            if (cols >> j) & 1 and ent[row][j]:
                acc ^= clmul(ent[row][j], minor(row + 1, cols & ~(1 << j)))
        return acc

    return Gf2Poly(minor(0, (1 << n) - 1))


# ---------------------------------------------------------------------------
# groups


@cache
def group_flats(n: int) -> tuple[int, ...]:
    """Flat integers of GL_n(F2), ascending."""
    if not 1 <= n <= 4:
        raise ShapeError("GL_n enumeration supported for n <= 4")
    if n * n <= 16:
        table = rank_table(n, n)
        return tuple(int(x) for x in np.flatnonzero(table == n))
    raise AssertionError("unreachable")


def enumerate_group(n: int) -> Iterator[Gf2Matrix]:
    """Every element of GL_n(F2) once, ascending by flat serialization."""
    for x in group_flats(n):
        yield Gf2Matrix.from_flat(x, n, n)


def group_order(n: int) -> int:
    out = 1
    for i in range(n):
        out *= (1 << n) - (1 << i)
    return out


# ---------------------------------------------------------------------------
# quadratic forms


def alternating_flats(n: int) -> list[int]:
    """All n x n alternating matrices (symmetric, zero diagonal)."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    out = []
    for mask in range(1 << len(pairs)):
        x = 0
        for k, (i, j) in enumerate(pairs):
            if (mask >> k) & 1:
                x |= (1 << (i * n + j)) | (1 << (j * n + i))
        out.append(x)
    return out


def upper_triangular_flats(n: int) -> list[int]:
    cells = [(i, j) for i in range(n) for j in range(i, n)]
    out = []
    for mask in range(1 << len(cells)):
        x = 0
        for k, (i, j) in enumerate(cells):
            if (mask >> k) & 1:
                x |= 1 << (i * n + j)
        out.append(x)
    return out


def quadform_has_nonsingular_rep(q: QuadForm) -> Gf2Matrix | None:
    """Search the coset ``rep + Mata_n`` for an invertible matrix."""
    n = q.n
    if n % 2 == 0:
        raise ValueError("only odd n is supported")
    if n not in (3, 5):
        raise ShapeError("n must be 3 or 5")
    base = q.rep.flat
    for a in alternating_flats(n):
        x = base ^ a
        if flat_rank(x, n, n) == n:
            return Gf2Matrix.from_flat(x, n, n)
    return None
