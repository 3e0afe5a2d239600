import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bdistill.bellcore import (
    AMP,
    PHASE,
    BellLabel,
    BlockDist,
    LabelMap,
    LabelString,
    ParityMask,
    WernerParams,
    apply_label_map,
    bcnot,
    bcnot_map,
    bit_position,
    brute_force_symplectic_codes,
    closure,
    entropy,
    enumerate_label_maps,
    is_separable_bell_diagonal,
    local_coset_count,
    mask_parities,
    normalized_entropy,
    per_pair_subgroup,
    swap_map,
    symplectic_form,
    symplectic_product,
    tensor,
    tensor_power,
    translation_map,
    werner_dist,
    werner_spectrum,
)

# 55-digit references from mpmath at 60 digits of working precision
WERNER_085_ENTROPY = 0.8475846798245738508543633203005464749552542030314830271
WERNER_085_PAIR_ENTROPY = 0.3095434291503251440008599887969177942867652709481870266


def random_dist(rng, m, zeros=0.0):
    p = rng.random(4**m)
    p[rng.random(4**m) < zeros] = 0.0
    if p.sum() == 0:
        p[0] = 1.0
    return BlockDist(m, p / p.sum())


def random_group_element(rng, m, with_translation=True):
    group = enumerate_label_maps(m)
    lin = group[int(rng.integers(len(group)))]
    shift = int(rng.integers(4**m)) if with_translation else 0
    return LabelMap.from_columns(list(lin.columns), m, translation=shift)


# ---------------------------------------------------------------------------
# Labels


def test_bell_label_rejects_non_bits():
    with pytest.raises(ValueError):
        BellLabel(2, 0)
    assert BellLabel(1, 0).index == 2


def test_label_string_round_trip():
    s = LabelString.from_str("1001")
    assert s.m == 2
    assert s.index == 0b1001
    assert LabelString.from_index(9, 2) == s
    assert s.pair(0) == BellLabel(1, 0)
    assert s.pair(1) == BellLabel(0, 1)
    assert str(LabelString.from_pairs([(1, 0), (0, 1)])) == "1001"


@pytest.mark.parametrize("text", ["", "101", "12"])
def test_label_string_rejects_bad_input(text):
    with pytest.raises(ValueError):
        LabelString.from_str(text)


def test_parity_mask_must_be_nonzero():
    with pytest.raises(ValueError):
        ParityMask.from_str("0000")
    assert ParityMask.from_str("1010").index == 10


def test_bit_positions_interleave_amp_and_phase():
    assert bit_position(2, 0, AMP) == 0
    assert bit_position(2, 0, PHASE) == 1
    assert bit_position(2, 1, AMP) == 2
    with pytest.raises(IndexError):
        bit_position(2, 2, AMP)


def test_mask_parities_match_bit_arithmetic():
    par = mask_parities(0b1010, 2)
    for x in range(16):
        assert par[x] == (((x >> 3) & 1) ^ ((x >> 1) & 1))


# ---------------------------------------------------------------------------
# Bilateral CNOT


def bcnot_by_hand(i, j, k, l):
    return (i, (j + l) % 2), ((k + i) % 2, l)


def test_bcnot_examples():
    s = LabelString.from_pairs([(0, 0), (0, 0)])
    assert bcnot(0, 1, s) == s
    assert bcnot(0, 1, LabelString.from_pairs([(1, 1), (1, 1)])).pairs() == [BellLabel(1, 0), BellLabel(0, 1)]
    assert bcnot(0, 1, LabelString.from_pairs([(0, 1), (1, 0)])).pairs() == [BellLabel(0, 1), BellLabel(1, 0)]


def test_bcnot_all_sixteen_inputs():
    for i, j, k, l in itertools.product((0, 1), repeat=4):
        out = bcnot(0, 1, LabelString((i, j, k, l)))
        (a, b), (c, d) = bcnot_by_hand(i, j, k, l)
        assert out.bits == (a, b, c, d)


def test_bcnot_matrix_agrees_with_label_rule():
    g = bcnot_map(2, 0, 1)
    for x in range(16):
        s = LabelString.from_index(x, 2)
        assert g.apply(s) == bcnot(0, 1, s)


def test_bcnot_twice_is_identity():
    for m, (a, b) in [(2, (0, 1)), (2, (1, 0)), (3, (2, 0))]:
        for x in range(4**m):
            s = LabelString.from_index(x, m)
            assert bcnot(a, b, bcnot(a, b, s)) == s


def test_bcnot_leaves_other_pairs_alone():
    s = LabelString.from_str("111111")
    out = bcnot(0, 2, s)
    assert out.pair(1) == BellLabel(1, 1)


def test_bcnot_errors():
    s = LabelString.from_str("0000")
    with pytest.raises(ValueError):
        bcnot(1, 1, s)
    with pytest.raises(IndexError):
        bcnot(0, 2, s)


# ---------------------------------------------------------------------------
# Distributions and entropy


def test_entropy_examples():
    assert entropy([1, 0, 0, 0]) == 0.0
    assert entropy([0.5, 0.5]) == pytest.approx(1.0, abs=1e-15)
    assert entropy(werner_spectrum(0.85)) == pytest.approx(WERNER_085_ENTROPY, abs=1e-15)


def test_entropy_rejects_invalid():
    with pytest.raises(ValueError):
        entropy([1.5, -0.5])
    with pytest.raises(ValueError):
        entropy([0.5, 0.4])


def test_normalized_entropy():
    assert normalized_entropy([2, 2]) == pytest.approx(1.0)
    assert normalized_entropy([3, 0]) == 0.0
    f = 0.85
    assert normalized_entropy([f, (1 - f) / 3]) == pytest.approx(WERNER_085_PAIR_ENTROPY, abs=1e-15)
    with pytest.raises(ValueError):
        normalized_entropy([0, 0])


def test_block_dist_validation():
    with pytest.raises(ValueError):
        BlockDist(1, [0.5, 0.5, 0.1, -0.1])
    with pytest.raises(ValueError):
        BlockDist(1, [0.5, 0.5, 0.1, 0.0])
    with pytest.raises(ValueError):
        BlockDist(2, [0.25] * 4)
    d = BlockDist(1, [0.25] * 4)
    with pytest.raises(ValueError):
        d.p[0] = 1.0


def test_block_dist_text_round_trip():
    d = random_dist(np.random.default_rng(0), 2)
    text = d.to_text()
    assert text.splitlines()[0] == "m=2"
    assert text.splitlines()[1].startswith("0000\t")
    back = BlockDist.from_text(text)
    assert np.array_equal(back.p, d.p)


def test_werner_examples():
    assert np.array_equal(werner_dist(1.0).p, [1, 0, 0, 0])
    assert np.allclose(werner_dist(0.7).p, [0.7, 0.1, 0.1, 0.1], atol=1e-15)
    with pytest.raises(ValueError):
        WernerParams(0.25)
    with pytest.raises(ValueError):
        werner_dist(1.01)


@pytest.mark.parametrize("f", np.linspace(0.26, 1.0, 75))
def test_werner_separable_iff_fidelity_at_most_half(f):
    assert is_separable_bell_diagonal(werner_dist(f)) == (f <= 0.5)
    assert WernerParams(f).entangled == (f > 0.5)


def test_tensor_examples():
    d = tensor(BlockDist.delta("01"), BlockDist.delta("10"))
    assert d.prob("0110") == 1.0
    w = tensor(werner_dist(0.7), werner_dist(0.7))
    assert w.p.size == 16
    assert w.prob("0000") == pytest.approx(0.49, abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_tensor_entropy_additive_and_associative(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_dist(rng, 1, zeros=0.3) for _ in range(3))
    assert entropy(tensor(a, b).p) == pytest.approx(entropy(a.p) + entropy(b.p), abs=1e-12)
    left = tensor(tensor(a, b), c)
    right = tensor(a, tensor(b, c))
    assert np.allclose(left.p, right.p, rtol=0, atol=1e-15)


def test_tensor_power():
    d = werner_dist(0.8)
    assert tensor_power(d, 3).m == 3
    with pytest.raises(ValueError):
        tensor_power(d, 0)


# ---------------------------------------------------------------------------
# Label maps


def test_label_map_requires_invertible_linear_part():
    with pytest.raises(ValueError):
        LabelMap.from_matrix(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        LabelMap.from_matrix(np.eye(3))


def test_label_map_text_round_trip():
    g = random_group_element(np.random.default_rng(1), 2)
    assert LabelMap.from_text(g.to_text()) == g


def test_compose_and_inverse():
    rng = np.random.default_rng(2)
    for _ in range(20):
        g = random_group_element(rng, 2)
        h = random_group_element(rng, 2)
        gh = g.compose(h)
        for x in range(16):
            assert gh.apply_index(x) == g.apply_index(h.apply_index(x))
        assert g.compose(g.inverse()).is_identity()


def test_transform_mask_tracks_parity_through_map():
    rng = np.random.default_rng(3)
    for _ in range(20):
        g = random_group_element(rng, 2)
        mask = int(rng.integers(1, 16))
        new = g.transform_mask(mask)
        before = mask_parities(mask, 2)
        after = mask_parities(new, 2)[g.permutation]
        # parities agree up to a constant flip caused by the translation
        assert len(set((before ^ after).tolist())) == 1


def test_apply_label_map_identity_and_bcnot_pushforward():
    w = tensor(werner_dist(0.7), werner_dist(0.6))
    assert apply_label_map(LabelMap.identity(2), w).allclose(w, atol=0)
    g = bcnot_map(2, 0, 1)
    out = apply_label_map(g, w)
    for x in range(16):
        s = LabelString.from_index(x, 2)
        assert out.prob(bcnot(0, 1, s)) == w.prob(s)


def test_apply_label_map_dimension_mismatch():
    with pytest.raises(ValueError):
        apply_label_map(LabelMap.identity(1), BlockDist.uniform(2))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2))
def test_label_maps_preserve_simplex_and_entropy(seed, m):
    rng = np.random.default_rng(seed)
    d = random_dist(rng, m, zeros=0.2)
    g = random_group_element(rng, m)
    out = apply_label_map(g, d)
    assert np.all(out.p >= 0)
    assert out.p.sum() == pytest.approx(1.0, abs=1e-12)
    assert entropy(out.p) == pytest.approx(entropy(d.p), abs=1e-12)


def test_symplectic_product_is_pairing():
    assert symplectic_product(0b10, 0b01, 1) == 1
    assert symplectic_product(0b10, 0b10, 1) == 0
    assert symplectic_product(0b1000, 0b0001, 2) == 0
    assert symplectic_product(0b1100, 0b0101, 2) == 1


# ---------------------------------------------------------------------------
# Group enumeration


def test_group_m1():
    group = enumerate_label_maps(1)
    assert len(group) == 6
    assert LabelMap.identity(1) in group
    assert swap_map(1, 0) in group
    assert group.is_closed()


def test_group_m2_matches_brute_force():
    group = enumerate_label_maps(2)
    brute = brute_force_symplectic_codes(2)
    assert len(group) == len(brute) == 720
    keys = {tuple(row) for row in brute.tolist()}
    assert keys == {tuple(row) for row in group.codes.tolist()}


def test_group_m2_is_closed_and_symplectic():
    group = enumerate_label_maps(2)
    j = symplectic_form(2)
    assert group.is_closed()
    for g in group:
        assert np.array_equal((g.matrix.T.astype(int) @ j @ g.matrix) % 2, j)


def test_bcnots_and_swaps_alone_generate_a_proper_subgroup():
    gens = [swap_map(2, k) for k in range(2)] + [bcnot_map(2, 0, 1), bcnot_map(2, 1, 0)]
    assert len(closure(gens, 2)) == 72


def test_local_cosets():
    assert len(per_pair_subgroup(2)) == 36
    assert local_coset_count(2) == 20


def test_group_m3_order():
    # |Sp(6, 2)| = 2^9 (2^2 - 1)(2^4 - 1)(2^6 - 1)
    assert len(enumerate_label_maps(3)) == 1451520


def test_group_size_limits():
    with pytest.raises(ValueError):
        enumerate_label_maps(4)
    with pytest.raises(ValueError):
        enumerate_label_maps(0)


def test_translations_are_label_maps_but_not_in_linear_group():
    t = translation_map(2, 0b0110)
    assert t.is_symplectic()
    assert t not in enumerate_label_maps(2)
