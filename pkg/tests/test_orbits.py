import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from f2rank2.gf2 import Gf2Matrix, ShapeError, flat_mul, group_flats, rref
from f2rank2.orbits import (
    CanonicalKey,
    EquivalenceCanonizer,
    Witness,
    affine_equivalent,
    are_equivalent,
    are_similar,
    canonical_affine,
    canonical_equiv,
    canonical_sim,
    embedding_witness,
    enumerate_orbit,
    reduction_frame,
    _parse_key,
)
from f2rank2.spaces import AffineMatrixSpace, MatrixSpace, is_reduced_space, transpose_space

G3 = group_flats(3)


def spaces(n, p, max_gens=4):
    return st.lists(st.integers(0, (1 << (n * p)) - 1), max_size=max_gens).map(lambda g: MatrixSpace.from_flats(n, p, g))


def group_elem(n):
    return st.sampled_from(group_flats(n)).map(lambda x: Gf2Matrix.from_flat(x, n, n))


def test_rank_one_orbit_size():
    orbit = enumerate_orbit((1,), 3, 3)
    assert orbit.size == 49


def test_key_hex_round_trip(cat):
    k = canonical_equiv(cat.space("U3"))
    assert _parse_key(k.to_hex()) == k
    assert str(k).startswith("equiv:3x3:3x3:")


def test_key_invariance_on_u3(cat):
    U3 = cat.space("U3")
    k = canonical_equiv(U3)
    rng = np.random.default_rng(5)
    for _ in range(100):
        P, Q = (Gf2Matrix.from_flat(int(G3[i]), 3, 3) for i in rng.integers(168, size=2))
        assert canonical_equiv(Witness(P, Q).apply(U3)) == k


def test_named_equivalences(cat):
    J3 = cat.space("J3")
    assert canonical_equiv(J3) == canonical_equiv(transpose_space(J3))
    kv = canonical_equiv(cat.space("V3"))
    assert canonical_equiv(cat.space("Beasley1")) == kv == canonical_equiv(cat.space("Beasley2"))
    assert are_equivalent(cat.space("U3"), cat.space("Mata3")) is None
    wit = are_equivalent(cat.space("T2"), cat.space("T3"))
    assert wit is not None and wit.apply(cat.space("T2")) == cat.space("T3")


def test_identity_witnesses(cat):
    V = cat.space("V3")
    for fn in (are_equivalent, are_similar):
        wit = fn(V, V)
        assert wit is not None and wit.apply(V) == V
    S = cat.get("I3+T1").space
    assert affine_equivalent(S, S) is not None


def test_similarity_examples(cat):
    T2, T3, J3 = cat.space("T2"), cat.space("T3"), cat.space("J3")
    assert are_similar(T2, T3) is None
    wit = are_similar(J3, transpose_space(J3))
    assert wit is not None and wit.apply(J3) == transpose_space(J3)


def test_affine_examples(cat):
    S2, S3 = cat.get("I3+T2").space, cat.get("I3+T3").space
    wit = affine_equivalent(S2, S3)
    assert wit is not None and wit.apply_affine(S2) == S3
    assert affine_equivalent(cat.get("I3+NT3").space, cat.get("I3+F2C_vee_0").space) is None


def test_embedding(cat):
    assert embedding_witness(cat.space("U3"), cat.space("V3")) is not None
    assert embedding_witness(cat.space("U3"), cat.space("Mata3")) is None


def test_reduction_frame(cat):
    V = MatrixSpace.from_flats(4, 4, [0b0000_0000_0110_0011, 0b0000_0100_0000_0001])
    P0, Q0, core = reduction_frame(V)
    n2, p2 = core.shape
    assert Witness(P0, Q0).apply(V).basis == tuple(
        sorted(MatrixSpace.from_flats(4, 4, [_pad(b, n2, p2) for b in core.basis]).basis)
    )


def _pad(x, n2, p2):
    out = 0
    for i in range(n2):
        for j in range(p2):
            if (x >> (i * p2 + j)) & 1:
                out |= 1 << (i * 4 + j)
    return out


def test_large_shapes_rejected():
    V = MatrixSpace.from_flats(5, 5, [1 << 0 | 1 << 6 | 1 << 12 | 1 << 18 | 1 << 24])
    with pytest.raises(ShapeError):
        canonical_equiv(V)
    with pytest.raises(ShapeError):
        canonical_sim(MatrixSpace.zero(5))
    with pytest.raises(ShapeError):
        are_equivalent(MatrixSpace.zero(3), MatrixSpace.zero(3, 4))


def test_cache_file_round_trip(tmp_path, cat):
    a = EquivalenceCanonizer(tmp_path)
    keys = {nm: a.key(cat.space(nm)) for nm in ("U3", "V3", "J3", "LLD_d1")}
    a.flush()
    text = (tmp_path / "equiv-3x3.txt").read_text().splitlines()
    assert text[0] == "f2rank2-cache v1 3x3"
    b = EquivalenceCanonizer(tmp_path)
    assert {nm: b.key(cat.space(nm)) for nm in keys} == keys
    assert b.orbits_enumerated == 0


def _full_scan_payload(V):
    """Least echelon basis over every (P, Q) in GL3 x GL3, by plain iteration."""
    best = None
    for p in G3:
        for q in G3:
            img = rref(flat_mul(flat_mul(p, b, 3, 3, 3), q, 3, 3, 3) for b in V.basis)
            if best is None or img < best:
                best = img
    return best


@settings(max_examples=8, deadline=None)
@given(spaces(3, 3).filter(lambda V: V.dim > 0 and is_reduced_space(V)))
def test_orbit_key_matches_full_scan(V):
    assert canonical_equiv(V).payload == _full_scan_payload(V)


def test_orbit_key_matches_full_scan_on_catalog(cat):
    for name in ("U3", "Mata3", "T2"):
        V = cat.space(name)
        assert canonical_equiv(V).payload == _full_scan_payload(V)


@settings(max_examples=60, deadline=None)
@given(spaces(3, 3), group_elem(3), group_elem(3))
def test_key_invariant_under_action(V, P, Q):
    assert canonical_equiv(Witness(P, Q).apply(V)) == canonical_equiv(V)


@settings(max_examples=4, deadline=None)
@given(spaces(3, 4, 3), group_elem(3), group_elem(4))
def test_key_invariant_under_action_3x4(V, P, Q):
    W = Witness(P, Q).apply(V)
    assert canonical_equiv(W) == canonical_equiv(V)
    wit = are_equivalent(V, W)
    assert wit is not None and wit.apply(V) == W


@settings(max_examples=40, deadline=None)
@given(spaces(3, 3), group_elem(3))
def test_similarity_key_invariant_under_conjugation(V, P):
    W = Witness(P, P.inverse()).apply(V)
    assert canonical_sim(W) == canonical_sim(V)
    assert canonical_equiv(W) == canonical_equiv(V)


def test_witness_iff_equal_keys():
    rng = np.random.default_rng(6)
    for _ in range(500):
        V, W = (MatrixSpace.from_flats(3, 3, (int(x) for x in rng.integers(0, 512, 2))) for _ in range(2))
        wit = are_equivalent(V, W)
        assert (wit is not None) == (canonical_equiv(V) == canonical_equiv(W))
        if wit is not None:
            assert wit.apply(V) == W


@settings(max_examples=25, deadline=None)
@given(spaces(3, 3, 3), st.integers(0, 511), group_elem(3), group_elem(3))
def test_affine_key_invariance(V, base, P, Q):
    S = AffineMatrixSpace.of(base, V)
    T = Witness(P, Q).apply_affine(S)
    assert canonical_affine(S) == canonical_affine(T)
    wit = affine_equivalent(S, T)
    assert wit is not None and wit.apply_affine(S) == T
    assert canonical_equiv(S.translation) == canonical_equiv(T.translation)
