"""Space-level predicates: upper rank, reducedness, (semi-)primitivity,
spectra, irreducibility, local linear dependence and maximality."""

from __future__ import annotations

from functools import cache

import numpy as np

from .gf2 import ShapeError, flat_identity, flat_rank, rank_table, rref, reduce_vector
from .spaces import (
    MatrixSpace,
    apply_flat,
    eval_dim,
    is_reduced_space,
    transpose_space,
)


def element_ranks(V: MatrixSpace) -> np.ndarray:
    """Rank of every element of ``V``, in the order of ``V.element_array``."""
    if V.dim > 20:
        raise ValueError("refusing to enumerate more than 2^20 elements")
    elems = V.element_array
    if V.n * V.p <= 16:
        return rank_table(V.n, V.p)[elems]
    return np.array([flat_rank(int(x), V.n, V.p) for x in elems], dtype=np.int8)


def upper_rank(V: MatrixSpace) -> int:
    return int(element_ranks(V).max())


def rank_histogram(V: MatrixSpace) -> dict[int, int]:
    vals, counts = np.unique(element_ranks(V), return_counts=True)
    return {int(v): int(c) for v, c in zip(vals, counts)}


def is_reduced(V: MatrixSpace) -> bool:
    return is_reduced_space(V)


# ---------------------------------------------------------------------------
# conditions on hyperplanes and lines


@cache
def _rowspace_table(n: int, p: int) -> np.ndarray:
    """Bitmask over F2^p of the row space of every n x p flat."""
    flats = np.arange(1 << (n * p), dtype=np.int64)
    mask = (1 << p) - 1
    rows = [(flats >> (i * p)) & mask for i in range(n)]
    out = np.zeros(flats.size, dtype=np.int64)
    for s in range(1 << n):
        acc = np.zeros_like(flats)
        for i in range(n):
            if (s >> i) & 1:
                acc ^= rows[i]
        out |= np.left_shift(1, acc)
    return out


def _rowspace_mask(x: int, n: int, p: int) -> int:
    if n * p <= 16:
        return int(_rowspace_table(n, p)[x])
    mask = (1 << p) - 1
    basis = rref((x >> (i * p)) & mask for i in range(n))
    out = 0
    for s in range(1 << len(basis)):
        v = 0
        for k, b in enumerate(basis):
            if (s >> k) & 1:
                v ^= b
        out |= 1 << v
    return out


def satisfies_iii(V: MatrixSpace, r: int | None = None) -> bool:
    """Every restriction of ``V`` to a hyperplane of the source keeps rank ``r``.

    Restricting M to the hyperplane ker(phi) lowers its rank by one exactly
    when phi lies in the row space of M, so the condition asks, for each
    non-zero functional phi, for a member of rank >= r + [phi in rows(M)].
    """
    if r is None:
        r = upper_rank(V)
    if r == 0:
        return True
    ranks = element_ranks(V)
    elems = V.element_array
    full = ((1 << (1 << V.p)) - 1) & ~1  # every non-zero functional
    if np.any(ranks > r):
        return True
    covered = 0
    for x in elems[ranks == r]:
        covered |= ~_rowspace_mask(int(x), V.n, V.p)
        if covered & full == full:
            return True
    return covered & full == full


def satisfies_iv(V: MatrixSpace, r: int | None = None) -> bool:
    """Dual of :func:`satisfies_iii`: quotients by every target line keep rank ``r``."""
    return satisfies_iii(transpose_space(V), r)


def is_semi_primitive(V: MatrixSpace) -> bool:
    return V.dim > 0 and is_reduced(V) and satisfies_iii(V, upper_rank(V))


def is_primitive(V: MatrixSpace) -> bool:
    if not is_semi_primitive(V):
        return False
    return satisfies_iv(V, upper_rank(V))


# ---------------------------------------------------------------------------
# rank profiles


def is_rank_constant(V: MatrixSpace, r: int = 2) -> bool:
    ranks = element_ranks(V)
    return V.dim > 0 and bool(np.all(ranks[1:] == r))


def is_rank_constant_2(V: MatrixSpace) -> bool:
    return is_rank_constant(V, 2)


def has_trivial_spectrum(V: MatrixSpace) -> bool:
    """Whether det(M + I) = 1 for every member, i.e. 1 is never an eigenvalue."""
    if V.n != V.p:
        raise ShapeError("spectrum of a non-square space")
    n = V.n
    shifted = V.element_array ^ flat_identity(n)
    if n * n <= 16:
        return bool(np.all(rank_table(n, n)[shifted] == n))
    return all(flat_rank(int(x), n, n) == n for x in shifted)


def invariant_closure(V: MatrixSpace, x: int) -> tuple[int, ...]:
    """Smallest subspace of F2^n containing ``x`` and stable under ``V``."""
    basis: tuple[int, ...] = rref([x])
    todo = [x]
    while todo:
        y = todo.pop()
        for b in V.basis:
            z = apply_flat(b, V.n, V.p, y)
            if reduce_vector(z, basis):
                basis = rref(basis + (z,))
                todo.append(z)
    return basis


def is_irreducible_action(V: MatrixSpace) -> bool:
    """No proper non-zero subspace of F2^n is stable under every member.

    Each stable subspace contains the closure of any of its vectors, so it
    is enough to check that every non-zero vector generates everything.
    """
    if V.n != V.p:
        raise ShapeError("irreducibility needs a square space")
    n = V.n
    return all(len(invariant_closure(V, x)) == n for x in range(1, 1 << n))


# ---------------------------------------------------------------------------
# local linear dependence


def is_lld(V: MatrixSpace) -> bool:
    """Every source vector is killed by some non-zero member (needs dim >= 1)."""
    if V.dim == 0:
        return False
    return all(eval_dim(V, x) < V.dim for x in range(1 << V.p))


def hyperplanes(V: MatrixSpace) -> list[MatrixSpace]:
    """All codimension-one subspaces of ``V``."""
    out = []
    d = V.dim
    for f in range(1, 1 << d):
        gens = []
        # kernel of the coordinate functional f, spanned by its standard kernel basis
        top = f.bit_length() - 1
        for k in range(d):
            if k == top:
                continue
            v = V.basis[k]
            if (f >> k) & 1:
                v ^= V.basis[top]
            gens.append(v)
        out.append(MatrixSpace.from_flats(V.n, V.p, gens))
    return out


def subspaces(V: MatrixSpace) -> list[MatrixSpace]:
    """Every subspace of ``V`` (including 0 and V), for small dims."""
    if V.dim > 6:
        raise ValueError("subspace lattice too large")
    seen = {V.basis: V}
    todo = [V]
    while todo:
        W = todo.pop()
        for H in hyperplanes(W):
            if H.basis not in seen:
                seen[H.basis] = H
                todo.append(H)
    return sorted(seen.values(), key=lambda W: (W.dim, W.basis))


def is_minimal_lld(V: MatrixSpace) -> bool:
    """LLD, and no proper non-zero subspace is LLD.

    LLD passes to superspaces (an annihilating member stays a member), so a
    proper LLD subspace exists iff some hyperplane of ``V`` is LLD.
    """
    return is_lld(V) and not any(is_lld(H) for H in hyperplanes(V))


# ---------------------------------------------------------------------------
# maximality


def is_maximal_with_urk(V: MatrixSpace, r: int) -> bool:
    """Every matrix outside ``V`` raises the upper rank above ``r`` when added."""
    if upper_rank(V) > r:
        raise ValueError("space already exceeds the rank bound")
    n, p = V.shape
    if n * p > 16:
        raise ShapeError("maximality scan supported for n*p <= 16")
    table = rank_table(n, p)
    elems = V.element_array
    pivots = 0
    for b in V.basis:
        pivots |= 1 << (b.bit_length() - 1)
    flats = np.arange(1, 1 << (n * p), dtype=np.int64)
    reps = flats[(flats & pivots) == 0]
    # one representative per non-zero coset of V
    for chunk in np.array_split(reps, max(1, reps.size // 4096)):
        worst = table[chunk[:, None] ^ elems[None, :]].max(axis=1)
        if np.any(worst <= r):
            return False
    return True


# ---------------------------------------------------------------------------
# subspaces of J3


def _j3_flats() -> tuple[int, ...]:
    # upper-triangular 3x3 with trace zero
    gens = [1 << 1, 1 << 2, 1 << 5, (1 << 0) | (1 << 4), (1 << 4) | (1 << 8)]
    return rref(gens)


def diagonal_space(V: MatrixSpace) -> tuple[int, ...]:
    """Echelon basis of the diagonal vectors (m11, m22, m33) of the members."""
    if V.n != V.p:
        raise ShapeError("diagonal of a non-square space")
    n = V.n
    return rref(sum(((b >> (i * n + i)) & 1) << i for i in range(n)) for b in V.basis)


def j3_primitivity_criterion(V: MatrixSpace) -> bool:
    """For V inside J3: the diagonals of V fill the trace-zero plane of F2^3."""
    J3 = MatrixSpace(3, 3, _j3_flats())
    if V.shape != (3, 3) or not V <= J3:
        raise ValueError("space is not contained in J3")
    return diagonal_space(V) == rref([0b011, 0b110])
