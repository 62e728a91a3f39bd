import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from f2rank2.genmatrix import parse_space
from f2rank2.gf2 import Gf2Matrix, Gf2Vector, ShapeError, flat_rank
from f2rank2.orbits import are_equivalent, are_similar, canonical_equiv
from f2rank2.predicates import has_trivial_spectrum, upper_rank
from f2rank2.spaces import (
    AffineMatrixSpace,
    MatrixSpace,
    block_identity_check,
    common_kernel,
    dual_space,
    elements,
    evaluation_image,
    eval_dim,
    image_sum,
    is_reduced_space,
    reduced_space,
    span,
    tilde_embed,
    transpose_space,
    vee_join,
)

J2 = Gf2Matrix.from_text("1,0,0;0,1,0;0,0,0")


def spaces(n, p, max_gens=4):
    return st.lists(st.integers(0, (1 << (n * p)) - 1), max_size=max_gens).map(lambda g: MatrixSpace.from_flats(n, p, g))


def test_basis_must_be_echelon():
    with pytest.raises(ValueError):
        MatrixSpace(2, 2, (1, 3))


def test_span_examples(cat):
    assert span([J2]).dim == 1
    U3, V3 = cat.space("U3"), cat.space("V3")
    assert span(U3.matrices()).dim == 3
    assert span(V3.matrices()).dim == 4
    assert U3 <= V3 and U3 != V3


def test_elements_examples(cat):
    assert [M.flat for M in elements(MatrixSpace.zero(3))] == [0]
    alt = list(elements(cat.space("Mata3")))
    assert len(alt) == 8 and all(M == M.T and M.trace() == 0 for M in alt)
    j3 = list(elements(cat.space("J3")))
    assert len(j3) == 32
    assert all(M.trace() == 0 and all(M.entry(i, j) == 0 for i in range(3) for j in range(i)) for M in j3)


def test_kernel_and_image(cat):
    V = span([J2])
    assert common_kernel(V).basis == (0b100,)
    assert image_sum(V).basis == (0b01, 0b10)
    for name in ("U3", "R11"):
        W = cat.space(name)
        assert common_kernel(W).dim == 0 and image_sum(W).dim == 3


def test_reduced_space_of_padded_mata(cat):
    M = cat.space("Mata3")
    core, n2, p2 = reduced_space(tilde_embed(M, 4, 5))
    assert (n2, p2) == (3, 3)
    assert are_equivalent(core, M) is not None


def test_reduced_space_preserves_upper_rank():
    rng = np.random.default_rng(3)
    for _ in range(50):
        V = MatrixSpace.from_flats(4, 4, (int(x) for x in rng.integers(0, 1 << 16, 3)))
        core, _, _ = reduced_space(V)
        assert core.dim == V.dim
        assert (upper_rank(core) if core.dim else 0) == upper_rank(V)


def test_tilde_embed(cat):
    for name in ("U3", "J3", "LLD_b"):
        V = cat.space(name)
        assert tilde_embed(V, V.n, V.p) == V
        assert tilde_embed(V, 4, 5).dim == V.dim
    assert upper_rank(tilde_embed(cat.space("Mata3"), 4, 4)) == 2
    with pytest.raises(ShapeError):
        tilde_embed(cat.space("LLD_e"), 3, 3)


def test_vee_join(cat):
    z1, z2 = MatrixSpace.zero(1), MatrixSpace.zero(2)
    assert vee_join(z1, z2).dim == 2
    C = MatrixSpace.from_flats(2, 2, [Gf2Matrix.from_text("0,1;1,1").flat])
    joined = vee_join(C, z1)
    assert joined.dim == 3 and has_trivial_spectrum(joined)
    assert joined == cat.space("F2C_vee_0")
    assert vee_join(vee_join(z1, z1), z1) == cat.space("NT3")


def test_evaluation_image(cat):
    U3, V3 = cat.space("U3"), cat.space("V3")
    assert evaluation_image(U3, Gf2Vector(3, 0)).dim == 0
    assert all(evaluation_image(U3, Gf2Vector(3, x)).dim == 2 for x in range(1, 8))
    dims = [eval_dim(V3, x) for x in range(1, 8)]
    assert dims.count(2) == 4 and dims.count(3) == 3


def test_dual_examples(cat):
    U3 = cat.space("U3")
    assert are_equivalent(dual_space(U3), U3) is not None
    for name in ("Mata3", "U3", "V3", "J3"):
        V = cat.space(name)
        assert are_equivalent(dual_space(dual_space(V)), V) is not None
    assert are_equivalent(dual_space(cat.space("T3")), cat.space("M3")) is not None
    with pytest.raises(ValueError):
        dual_space(span([J2]))


def test_transpose_examples(cat):
    M = cat.space("Mata3")
    assert transpose_space(M) == M
    J3 = cat.space("J3")
    K = Gf2Matrix.from_text("0,0,1;0,1,0;1,0,0")
    conj = MatrixSpace.from_flats(3, 3, ((K @ A @ K).flat for A in J3.matrices()))
    assert transpose_space(J3) == conj
    wit = are_similar(J3, transpose_space(J3))
    assert wit is not None and wit.P @ wit.Q == Gf2Matrix.identity(3)


def test_block_identity():
    assert block_identity_check(J2)
    assert all(block_identity_check(Gf2Matrix.from_flat(x, 3, 3)) for x in range(512) if flat_rank(x, 3, 3) <= 2)
    assert any(not block_identity_check(Gf2Matrix.from_flat(x, 3, 3)) for x in range(512) if flat_rank(x, 3, 3) == 3)


def test_affine_normalization():
    T = MatrixSpace.from_flats(2, 2, [0b0001])
    a = AffineMatrixSpace.of(0b1001, T)
    b = AffineMatrixSpace.of(0b1000, T)
    assert a == b and not a.is_linear
    assert AffineMatrixSpace.of(0b0001, T).is_linear
    assert sorted(a.element_flats()) == [0b1000, 0b1001]


@given(spaces(3, 3), spaces(3, 3))
def test_sum_and_intersection_dimensions(V, W):
    assert (V + W).dim + V.intersection(W).dim == V.dim + W.dim
    assert V <= V + W and V.intersection(W) <= W


@given(spaces(3, 4))
def test_transpose_is_an_involution(V):
    assert transpose_space(transpose_space(V)) == V


@given(spaces(3, 3))
def test_reducedness_matches_kernel_and_image(V):
    assert is_reduced_space(V) == (common_kernel(V).dim == 0 and image_sum(V).dim == 3)
    assert canonical_equiv(V).dim == V.dim
