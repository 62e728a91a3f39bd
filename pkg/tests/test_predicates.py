import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from f2rank2.genmatrix import parse_space
from f2rank2.gf2 import Gf2Matrix, flat_mul, flat_rank, group_flats
from f2rank2.predicates import (
    has_trivial_spectrum,
    hyperplanes,
    invariant_closure,
    is_irreducible_action,
    is_lld,
    is_maximal_with_urk,
    is_minimal_lld,
    is_primitive,
    is_rank_constant_2,
    is_reduced,
    is_semi_primitive,
    j3_primitivity_criterion,
    rank_histogram,
    satisfies_iii,
    satisfies_iv,
    subspaces,
    upper_rank,
)
from f2rank2.spaces import MatrixSpace, dual_space, tilde_embed


def spaces(n, p, max_gens=4):
    return st.lists(st.integers(1, (1 << (n * p)) - 1), min_size=1, max_size=max_gens).map(
        lambda g: MatrixSpace.from_flats(n, p, g)
    )


def test_upper_rank_examples(cat):
    assert upper_rank(MatrixSpace.zero(3)) == 0
    for name in ("Mata3", "U3", "V3", "R11", "R20"):
        assert upper_rank(cat.space(name)) == 2
    assert upper_rank(MatrixSpace.full(3)) == 3
    assert rank_histogram(cat.space("V3")) == {0: 1, 2: 15}


def test_reduced_examples(cat):
    assert is_reduced(cat.space("J3"))
    assert not is_reduced(MatrixSpace.from_flats(3, 3, [0b000010001]))
    assert not is_reduced(tilde_embed(cat.space("U3"), 4, 4))


def test_condition_iii_examples(cat):
    assert not satisfies_iii(cat.space("R11"), 2)
    M = cat.space("Mata3")
    assert satisfies_iii(M, 2) and satisfies_iv(M, 2)
    assert not satisfies_iii(cat.space("LLD_b"), 2)


def test_primitivity_examples(cat):
    for name in ("U3", "V3", "J3", "Mata3"):
        assert is_primitive(cat.space(name))
    W = parse_space("[x,y,0;0,y,z]")
    assert is_semi_primitive(W) and not is_primitive(W)
    assert not any(is_primitive(S) for S in subspaces(cat.space("R11")))


def test_rank_constant_examples(cat):
    assert is_rank_constant_2(cat.space("V3"))
    assert is_rank_constant_2(cat.space("T1"))
    assert not is_rank_constant_2(cat.space("J3"))


def test_trivial_spectrum_examples(cat):
    assert has_trivial_spectrum(MatrixSpace.zero(3))
    for name in ("T1", "T2", "T3"):
        assert has_trivial_spectrum(cat.space(name))
    assert not has_trivial_spectrum(cat.space("Mata3"))


def test_irreducibility_examples(cat):
    assert not is_irreducible_action(cat.space("NT3"))
    assert is_irreducible_action(cat.space("T2"))
    assert is_irreducible_action(MatrixSpace.full(3))


def test_invariant_closure_is_stable(cat):
    V = cat.space("NT3")
    closure = invariant_closure(V, 0b001)
    assert closure == (0b001,)


def test_lld_examples(cat):
    e = cat.space("LLD_e")
    assert is_reduced(e) and is_minimal_lld(e)
    assert not is_lld(MatrixSpace.zero(3))
    assert not is_lld(MatrixSpace.from_flats(3, 3, [0b100010001]))


def test_minimal_lld_hyperplane_check_matches_full_subspace_search(cat):
    for name in ("LLD_c1", "LLD_c3", "LLD_d2", "U3", "V3", "J3dim2", "R11"):
        V = cat.space(name)
        if V.dim > 4:
            continue
        proper = [W for W in subspaces(V) if 0 < W.dim < V.dim]
        assert is_minimal_lld(V) == (is_lld(V) and not any(is_lld(W) for W in proper))


def test_minimal_lld_iff_dual_semi_primitive():
    rng = np.random.default_rng(4)
    checked = 0
    while checked < 150:
        n, p = 3, int(rng.integers(2, 5))
        V = MatrixSpace.from_flats(n, p, (int(x) for x in rng.integers(1, 1 << (n * p), int(rng.integers(2, 5)))))
        if not is_reduced(V):
            continue
        checked += 1
        assert is_minimal_lld(V) == is_semi_primitive(dual_space(V))


def test_maximality_examples(cat):
    assert is_maximal_with_urk(cat.space("Mata3"), 2)
    assert not is_maximal_with_urk(cat.space("U3"), 2)
    for name in ("R11", "R20", "R02", "J3", "V3"):
        assert is_maximal_with_urk(cat.space(name), 2)
    with pytest.raises(ValueError):
        is_maximal_with_urk(MatrixSpace.full(3), 2)


def test_j3_criterion_examples(cat):
    assert j3_primitivity_criterion(cat.space("J3"))
    assert not j3_primitivity_criterion(cat.space("P1"))
    assert j3_primitivity_criterion(parse_space("[a,0,0;0,a+b,0;0,0,b]"))
    with pytest.raises(ValueError):
        j3_primitivity_criterion(cat.space("U3"))


def test_j3_criterion_on_whole_lattice(cat):
    for W in subspaces(cat.space("J3")):
        if W.dim:
            assert j3_primitivity_criterion(W) == (upper_rank(W) == 2 and is_primitive(W))


def test_subspace_lattice_size(cat):
    # Gaussian binomials for F2^5: 1 + 31 + 155 + 155 + 31 + 1
    assert len(subspaces(cat.space("J3"))) == 374
    assert len(hyperplanes(cat.space("J3"))) == 31


def _iii_by_column_deletion(V, r):
    n, p = V.shape
    keep = sum(1 << (i * p + j) for i in range(n) for j in range(p - 1))
    elems = [int(x) for x in V.element_array]
    return all(max(flat_rank(flat_mul(x, q, n, p, p) & keep, n, p) for x in elems) >= r for q in group_flats(p))


@settings(max_examples=60, deadline=None)
@given(spaces(3, 3))
def test_condition_iii_matches_column_deletion(V):
    r = upper_rank(V)
    assert satisfies_iii(V, r) == _iii_by_column_deletion(V, r)


@settings(max_examples=60, deadline=None)
@given(spaces(3, 3))
def test_semi_primitive_iff_primitive_for_reduced_rank_two(V):
    if is_reduced(V) and upper_rank(V) == 2:
        assert is_semi_primitive(V) == is_primitive(V)


@settings(max_examples=100, deadline=None)
@given(spaces(3, 3), st.integers(1, 511))
def test_lld_is_monotone(V, extra):
    if is_lld(V):
        assert is_lld(V.with_matrix(extra))
