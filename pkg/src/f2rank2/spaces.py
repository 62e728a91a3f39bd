"""Linear and affine subspaces of Mat_{n,p}(F2) in canonical echelon form."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .gf2 import (
    Gf2Matrix,
    Gf2Vector,
    ShapeError,
    adjugate,
    det,
    flat_transpose,
    rank_of_vectors,
    reduce_vector,
    rref,
)


@dataclass(frozen=True)
class VectorSpaceF2:
    length: int
    basis: tuple[int, ...]

    @classmethod
    def span(cls, length: int, vectors: Iterable[int]) -> VectorSpaceF2:
        return cls(length, rref(vectors))

    @classmethod
    def full(cls, length: int) -> VectorSpaceF2:
        return cls(length, tuple(1 << i for i in range(length)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __contains__(self, v: int | Gf2Vector) -> bool:
        bits = v.bits if isinstance(v, Gf2Vector) else v
        return reduce_vector(bits, self.basis) == 0

    def vectors(self) -> Iterator[int]:
        yield from _gray_span(self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(b.bit_length() - 1 for b in self.basis)


@dataclass(frozen=True)
class MatrixSpace:
    """Subspace of Mat_{n,p}(F2); ``basis`` holds flat integers in RREF."""

    n: int
    p: int
    basis: tuple[int, ...]

    def __post_init__(self) -> None:
        if rref(self.basis) != self.basis:
            raise ValueError("basis must be given in reduced echelon form; use span()")
        if any(b >> (self.n * self.p) for b in self.basis):
            raise ShapeError("basis vector exceeds the ambient shape")

    @classmethod
    def from_flats(cls, n: int, p: int, flats: Iterable[int]) -> MatrixSpace:
        return cls(n, p, rref(flats))

    @classmethod
    def zero(cls, n: int, p: int | None = None) -> MatrixSpace:
        return cls(n, n if p is None else p, ())

    @classmethod
    def full(cls, n: int, p: int | None = None) -> MatrixSpace:
        p = n if p is None else p
        return cls(n, p, tuple(1 << k for k in range(n * p)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.p)

    def matrices(self) -> list[Gf2Matrix]:
        return [Gf2Matrix.from_flat(b, self.n, self.p) for b in self.basis]

    def element_flats(self) -> Iterator[int]:
        yield from _gray_span(self.basis)

    @cached_property
    def element_array(self) -> np.ndarray:
        out = np.zeros(1, dtype=np.int64)
        for b in self.basis:
            out = np.concatenate([out, out ^ b])
        return out

    def __contains__(self, M: Gf2Matrix | int) -> bool:
        x = M if isinstance(M, int) else _flat_of(M, self.shape)
        return reduce_vector(x, self.basis) == 0

    def __le__(self, other: MatrixSpace) -> bool:
        return self.shape == other.shape and all(b in other for b in self.basis)

    def __add__(self, other: MatrixSpace) -> MatrixSpace:
        if self.shape != other.shape:
            raise ShapeError("sum of spaces with different shapes")
        return MatrixSpace.from_flats(self.n, self.p, self.basis + other.basis)

    def with_matrix(self, x: int) -> MatrixSpace:
        return MatrixSpace.from_flats(self.n, self.p, self.basis + (x,))

    def intersection(self, other: MatrixSpace) -> MatrixSpace:
        if self.shape != other.shape:
            raise ShapeError("intersection of spaces with different shapes")
        return MatrixSpace(self.n, self.p, rref(x for x in self.element_flats() if x in other))

    def __repr__(self) -> str:
        return f"MatrixSpace({self.n}x{self.p}, dim={self.dim}, basis={[hex(b) for b in self.basis]})"


@dataclass(frozen=True)
class AffineMatrixSpace:
    """``base + translation``; ``base`` is the least member of the coset."""

    base: int
    translation: MatrixSpace

    def __post_init__(self) -> None:
        if reduce_vector(self.base, self.translation.basis) != self.base:
            raise ValueError("base must be normalized; use AffineMatrixSpace.of()")

    @classmethod
    def of(cls, base: Gf2Matrix | int, translation: MatrixSpace) -> AffineMatrixSpace:
        x = base if isinstance(base, int) else _flat_of(base, translation.shape)
        return cls(reduce_vector(x, translation.basis), translation)

    @classmethod
    def linear(cls, V: MatrixSpace) -> AffineMatrixSpace:
        return cls(0, V)

    @property
    def is_linear(self) -> bool:
        return self.base == 0

    @property
    def shape(self) -> tuple[int, int]:
        return self.translation.shape

    @property
    def dim(self) -> int:
        return self.translation.dim

    def base_matrix(self) -> Gf2Matrix:
        return Gf2Matrix.from_flat(self.base, *self.shape)

    def element_flats(self) -> Iterator[int]:
        for x in self.translation.element_flats():
            yield self.base ^ x

    def __contains__(self, M: Gf2Matrix | int) -> bool:
        x = M if isinstance(M, int) else _flat_of(M, self.shape)
        return reduce_vector(x ^ self.base, self.translation.basis) == 0


def _flat_of(M: Gf2Matrix, shape: tuple[int, int]) -> int:
    if M.shape != shape:
        raise ShapeError(f"matrix of shape {M.shape} in a space of shape {shape}")
    return M.flat


def _gray_span(basis: Sequence[int]) -> Iterator[int]:
    x = 0
    yield x
    for k in range(1, 1 << len(basis)):
        x ^= basis[(k & -k).bit_length() - 1]
        yield x


# ---------------------------------------------------------------------------
# constructions


def span(generators: Sequence[Gf2Matrix], shape: tuple[int, int] | None = None) -> MatrixSpace:
    """Echelon-form span of ``generators``; ``shape`` is needed when the list is empty."""
    if not generators:
        if shape is None:
            raise ShapeError("span of no generators needs an explicit shape")
        return MatrixSpace.zero(*shape)
    first = generators[0].shape
    if shape is not None and shape != first:
        raise ShapeError(f"generators of shape {first}, expected {shape}")
    if any(g.shape != first for g in generators):
        raise ShapeError("generators have mixed shapes")
    return MatrixSpace.from_flats(*first, (g.flat for g in generators))


def elements(V: MatrixSpace) -> Iterator[Gf2Matrix]:
    if V.dim > 20:
        raise ValueError("refusing to enumerate more than 2^20 elements")
    for x in V.element_flats():
        yield Gf2Matrix.from_flat(x, V.n, V.p)


def _columns(x: int, n: int, p: int) -> list[int]:
    return [sum(((x >> (i * p + j)) & 1) << i for i in range(n)) for j in range(p)]


def _rows(x: int, n: int, p: int) -> list[int]:
    mask = (1 << p) - 1
    return [(x >> (i * p)) & mask for i in range(n)]


def common_kernel(V: MatrixSpace) -> VectorSpaceF2:
    """Intersection of the kernels of all members of ``V``."""
    # x is in every kernel iff it is orthogonal to every row of every basis matrix
    rows = [r for b in V.basis for r in _rows(b, V.n, V.p)]
    return VectorSpaceF2(V.p, orthogonal_complement(rows, V.p))


def image_sum(V: MatrixSpace) -> VectorSpaceF2:
    return VectorSpaceF2.span(V.n, (c for b in V.basis for c in _columns(b, V.n, V.p)))


def orthogonal_complement(vectors: Iterable[int], length: int) -> tuple[int, ...]:
    """RREF basis of {x : <x, v> = 0 for every v}."""
    basis = rref(vectors)
    pivots = {b.bit_length() - 1: b for b in basis}
    free = [j for j in range(length) if j not in pivots]
    out = []
    for f in free:
        x = 1 << f
        for t, b in pivots.items():
            if (b >> f) & 1:
                x |= 1 << t
        out.append(x)
    return rref(out)


def is_reduced_space(V: MatrixSpace) -> bool:
    return common_kernel(V).dim == 0 and image_sum(V).dim == V.n


def reduced_space(V: MatrixSpace) -> tuple[MatrixSpace, int, int]:
    """The reduced operator space of ``V`` as a matrix space of shape (n', p').

    Columns are restricted to the standard vectors off the pivots of the
    common kernel, and rows are read at the pivots of the image sum, which
    are exactly the coordinates in that echelon basis.
    """
    ker = common_kernel(V)
    img = image_sum(V)
    kpiv = set(ker.pivots)
    cols = [j for j in range(V.p) if j not in kpiv]
    rows = sorted(img.pivots)
    n2, p2 = len(rows), len(cols)
    if n2 == 0 or p2 == 0:
        return MatrixSpace(n2, p2, ()), n2, p2
    return MatrixSpace.from_flats(n2, p2, (_submatrix(b, V.p, rows, cols) for b in V.basis)), n2, p2


def _submatrix(x: int, p: int, rows: Sequence[int], cols: Sequence[int]) -> int:
    out = 0
    q = len(cols)
    for a, i in enumerate(rows):
        for c, j in enumerate(cols):
            if (x >> (i * p + j)) & 1:
                out |= 1 << (a * q + c)
    return out


def embed_flat(x: int, n: int, p: int, n2: int, p2: int, row0: int = 0, col0: int = 0) -> int:
    """Place the flat ``n x p`` block ``x`` inside ``n2 x p2`` at (row0, col0)."""
    mask = (1 << p) - 1
    out = 0
    for i in range(n):
        out |= ((x >> (i * p)) & mask) << ((i + row0) * p2 + col0)
    return out


def tilde_embed(W: MatrixSpace, n: int, p: int) -> MatrixSpace:
    if W.n > n or W.p > p:
        raise ShapeError(f"cannot embed {W.shape} into {(n, p)}")
    return MatrixSpace.from_flats(n, p, (embed_flat(b, W.n, W.p, n, p) for b in W.basis))


def vee_join(A: MatrixSpace, B: MatrixSpace) -> MatrixSpace:
    """Block upper-triangular join with a free off-diagonal block."""
    if A.n != A.p or B.n != B.p:
        raise ShapeError("vee join needs square spaces")
    a, b = A.n, B.n
    m = a + b
    gens = [embed_flat(x, a, a, m, m) for x in A.basis]
    gens += [embed_flat(x, b, b, m, m, a, a) for x in B.basis]
    gens += [1 << (i * m + a + j) for i in range(a) for j in range(b)]
    return MatrixSpace.from_flats(m, m, gens)


def evaluation_image(V: MatrixSpace, x: Gf2Vector) -> VectorSpaceF2:
    if x.length != V.p:
        raise ShapeError(f"vector of length {x.length} for {V.p} columns")
    return VectorSpaceF2.span(V.n, (apply_flat(b, V.n, V.p, x.bits) for b in V.basis))


def apply_flat(m: int, n: int, p: int, x: int) -> int:
    mask = (1 << p) - 1
    out = 0
    for i in range(n):
        if bin((m >> (i * p)) & mask & x).count("1") & 1:
            out |= 1 << i
    return out


def eval_dim(V: MatrixSpace, x: int) -> int:
    return rank_of_vectors(apply_flat(b, V.n, V.p, x) for b in V.basis)


def dual_space(V: MatrixSpace) -> MatrixSpace:
    """Space of the maps A -> Ax, written in the echelon basis of ``V``.

    For a basis vector e_j of the source, the n x m matrix has column k equal
    to A_k e_j.
    """
    if not is_reduced_space(V):
        raise ValueError("dual operator space is defined for reduced spaces")
    m = V.dim
    gens = []
    for j in range(V.p):
        x = 0
        for k, a in enumerate(V.basis):
            col = apply_flat(a, V.n, V.p, 1 << j)
            for i in range(V.n):
                if (col >> i) & 1:
                    x |= 1 << (i * m + k)
        gens.append(x)
    return MatrixSpace.from_flats(V.n, m, gens)


def transpose_space(V: MatrixSpace) -> MatrixSpace:
    return MatrixSpace.from_flats(V.p, V.n, (flat_transpose(b, V.n, V.p) for b in V.basis))


def block_identity_check(M: Gf2Matrix) -> bool:
    """Whether det(A) D = B adj(A) C for the 2+rest block split of ``M``.

    ``A`` is the top-left 2x2 block, ``C`` the top-right, ``B`` the
    bottom-left and ``D`` the bottom-right block.
    """
    n, p = M.shape
    if n < 3 or p < 3:
        raise ShapeError("block identity needs n, p >= 3")
    ent = M.to_lists()
    A = Gf2Matrix.from_lists([row[:2] for row in ent[:2]])
    C = Gf2Matrix.from_lists([row[2:] for row in ent[:2]])
    B = Gf2Matrix.from_lists([row[:2] for row in ent[2:]])
    D = Gf2Matrix.from_lists([row[2:] for row in ent[2:]])
    lhs = D if det(A) else Gf2Matrix.zeros(n - 2, p - 2)
    return lhs == B @ adjugate(A) @ C
