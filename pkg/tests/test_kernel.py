import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from noma_aoi import (NOMA_EXACT, NOMA_HIGH_SNR, OMA, FixedProb, NomaAdaptive, OmaAdaptive, SystemParams,
                      bar_transition, build_matrix, design_ii_levels, elementary_symmetric,
                      feasibility_probs, gamma_fail, high_snr_transition, oma_transition, oracle_matrix,
                      transition)
from noma_aoi.kernel import STRATEGIES


def subsets_esp(values, i):
    return math.fsum(math.prod(c) for c in itertools.combinations(values, i))


def literal_multinomial(pe, d):
    total = []
    for ks in itertools.product(range(d + 1), repeat=len(pe)):
        if sum(ks) != d:
            continue
        coef = math.factorial(d) / math.prod(math.factorial(k) for k in ks)
        total.append(coef * math.prod(p**k for p, k in zip(pe, ks)))
    return math.fsum(total)


def test_elementary_symmetric_examples():
    assert elementary_symmetric([1, 1], 1) == 2
    assert elementary_symmetric([1, 1, 1, 1], 2) == 6
    assert elementary_symmetric([0.3], 0) == 1
    assert elementary_symmetric([0.3], 2) == 0
    surv = 1 - feasibility_probs(design_ii_levels(1, 2), 1.0)
    assert elementary_symmetric(surv, 2) == pytest.approx(math.exp(-3), rel=1e-14)
    assert elementary_symmetric(surv, 2) == pytest.approx(subsets_esp(surv, 2), rel=1e-14)


@given(st.lists(st.floats(0, 1), min_size=0, max_size=7), st.integers(0, 8))
def test_elementary_symmetric_matches_subsets(values, i):
    assert elementary_symmetric(values, i) == pytest.approx(subsets_esp(values, i), rel=1e-12, abs=1e-15)


def test_gamma_fail_examples():
    assert gamma_fail([0, 0], 1) == 0
    assert gamma_fail([0.5, 0.5], 2) == 1.0
    assert literal_multinomial([0.5, 0.5], 2) == 1.0
    assert gamma_fail([0.2, 0.9, 0.4], 0) == 1


@pytest.mark.parametrize("K", [1, 2, 3, 4])
@pytest.mark.parametrize("d", range(7))
def test_gamma_fail_matches_literal_sum(K, d):
    pe = list(np.linspace(0.05, 0.95, K) ** 1.5)
    assert gamma_fail(pe, d) == pytest.approx(literal_multinomial(pe, d), rel=1e-12, abs=1e-12)


def game(ptx):
    return SystemParams(2, 2, power_budget=1e300, tx_policy=FixedProb(ptx)), design_ii_levels(1, 2)


def test_two_user_bar_examples():
    params, lv = game(1.0)
    assert bar_transition(0, 1, params, lv) == pytest.approx(0, abs=1e-15)
    assert bar_transition(0, 2, params, lv) == pytest.approx(0.5, abs=1e-15)
    params, lv = game(0.5)
    assert bar_transition(0, 1, params, lv) == pytest.approx(0.5, abs=1e-15)


def test_two_user_transition_examples():
    params, lv = game(0.5)
    assert transition(0, 1, params, lv) == pytest.approx(0.25, abs=1e-15)
    assert transition(0, 0, params, lv) == pytest.approx(3 / 8, abs=1e-15)
    assert high_snr_transition(0, 1, params) == pytest.approx(0.25, abs=1e-15)


def test_silent_population():
    params = SystemParams(4, 2, tx_policy=FixedProb(0.0))
    lv = design_ii_levels(1, 2)
    for j in range(3):
        assert transition(j, 0, params, lv) == 1
        for i in range(1, min(2, 3 - j) + 1):
            assert transition(j, i, params, lv) == 0


@pytest.mark.parametrize("j, i", [(-1, 1), (2, 0), (0, 3), (1, 2), (0, -1)])
def test_out_of_range(j, i):
    params = SystemParams(2, 2, tx_policy=FixedProb(0.5))
    with pytest.raises(ValueError):
        transition(j, i, params, design_ii_levels(1, 2))


def literal_lemma_bar(j, i, params, levels):
    """Direct transcription of the closed form, with brute-force gamma sums."""
    M, K = params.num_users, params.num_levels
    ptx, pk = params.ptx(j), params.level_choice_prob
    pe = feasibility_probs(levels, params.power_budget)
    g_i = 0.0
    for ks in itertools.product((0, 1), repeat=K):
        if sum(ks) == i:
            g_i += math.prod((1 - p) ** k for p, k in zip(pe, ks))
    total = 0.0
    for m in range(i + 1, M - j + 1):
        total += (math.comb(M - j, m) * ptx**m * (1 - ptx) ** (M - j - m)
                  * math.factorial(m) / math.factorial(m - i) * pk**m * g_i * literal_multinomial(pe, m - i))
    total += math.comb(M - j, i) * ptx**i * (1 - ptx) ** (M - j - i) * math.factorial(i) * pk**i * g_i
    return total


@pytest.mark.parametrize("M", [2, 3, 5])
@pytest.mark.parametrize("K", [1, 2, 3])
@pytest.mark.parametrize("P", [1.0, 10.0])
def test_bar_matches_literal_transcription(M, K, P):
    params = SystemParams(M, K, power_budget=P, tx_policy=FixedProb(0.6))
    lv = design_ii_levels(1, K)
    for j in range(M):
        for i in range(1, min(K, M - j) + 1):
            assert bar_transition(j, i, params, lv) == pytest.approx(literal_lemma_bar(j, i, params, lv), abs=1e-14)


def test_oma_examples():
    params = SystemParams(2, 1, target_rate=1.0, power_budget=1.0, tx_policy=FixedProb(0.5))
    stay, move = oma_transition(0, params)
    assert 1 - stay == pytest.approx(0.5 * math.exp(-1), rel=1e-15)
    assert move == pytest.approx(0.25 * math.exp(-1), rel=1e-15)
    params = SystemParams(3, 1, tx_policy=FixedProb(1.0))
    assert oma_transition(1, params) == (1.0, 0.0)


def test_oma_high_snr_limit_is_remark_form():
    params = SystemParams(6, 3, power_budget=1e300, tx_policy=FixedProb(0.3))
    for j in range(5):
        n = 6 - j
        _, move = oma_transition(j, params)
        assert move == pytest.approx((n - 1) * 0.3 * 0.7 ** (n - 1), rel=1e-15)


def test_build_matrix_two_user_row(two_user_game):
    params, lv = two_user_game
    model = build_matrix(NOMA_EXACT, params, lv)
    np.testing.assert_allclose(model.transient[0], [3 / 8, 1 / 4], atol=1e-15)
    assert model.exit_vector()[0] == pytest.approx(3 / 8, abs=1e-15)
    assert model.absorption[0] == pytest.approx(3 / 8, abs=1e-15)


def test_oma_matrix_is_bidiagonal():
    model = build_matrix(OMA, SystemParams(3, 2, tx_policy=OmaAdaptive()))
    assert np.all(np.triu(model.transient, 2) == 0)
    assert np.all(np.tril(model.transient, -1) == 0)


def test_unknown_strategy():
    with pytest.raises(ValueError):
        build_matrix("TDMA", SystemParams(3, 2))
    with pytest.raises(ValueError):
        build_matrix(NOMA_EXACT, SystemParams(3, 2))


params_strategy = st.builds(
    SystemParams,
    num_users=st.integers(1, 25),
    num_levels=st.integers(1, 5),
    slots_per_frame=st.integers(1, 10),
    slot_duration=st.floats(0.1, 10),
    target_rate=st.floats(0.1, 3),
    power_budget=st.floats(-20, 60).map(lambda db: 10 ** (db / 10)),
    tx_policy=st.one_of(st.floats(0, 1).map(FixedProb), st.just(NomaAdaptive()), st.just(OmaAdaptive())),
)


@given(params_strategy, st.sampled_from(STRATEGIES))
def test_structure_and_conservation(params, strategy):
    model = build_matrix(strategy, params, design_ii_levels(params.target_rate, params.num_levels))
    P, M, K = model.transient, params.num_users, params.num_levels
    assert np.all(P >= -1e-15) and np.all(P <= 1 + 1e-15)
    band = K if strategy != OMA else 1
    for j in range(M):
        for c in range(M):
            if c < j or c > j + band:
                assert P[j, c] == 0
    assert model.conservation_error() <= 1e-12
    np.testing.assert_allclose(model.exit_vector(), model.absorption, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(1, 3), st.floats(0, 1), st.floats(-10, 30))
def test_lemma_matches_enumeration(M, K, ptx, p_db):
    params = SystemParams(M, K, power_budget=10 ** (p_db / 10), tx_policy=FixedProb(ptx))
    lv = design_ii_levels(1.0, K)
    ref = oracle_matrix(params, lv)
    got = build_matrix(NOMA_EXACT, params, lv)
    np.testing.assert_allclose(got.transient, ref.transient, atol=1e-12, rtol=0)
    np.testing.assert_allclose(got.absorption, ref.absorption, atol=1e-12, rtol=0)


@pytest.mark.parametrize("M, K", [(3, 2), (6, 3), (9, 4)])
def test_high_snr_exact_when_all_levels_affordable(M, K):
    params = SystemParams(M, K, power_budget=1e300, tx_policy=FixedProb(0.4))
    lv = design_ii_levels(1, K)
    a = build_matrix(NOMA_EXACT, params, lv)
    b = build_matrix(NOMA_HIGH_SNR, params, lv)
    np.testing.assert_allclose(a.transient, b.transient, atol=1e-12, rtol=0)


def test_high_snr_approached_as_budget_grows():
    params = SystemParams(6, 3, tx_policy=FixedProb(0.4))
    lv = design_ii_levels(1, 3)
    limit = build_matrix(NOMA_HIGH_SNR, params, lv).transient
    gaps = [np.max(np.abs(build_matrix(NOMA_EXACT, params.replace(power_budget=10 ** (db / 10)), lv).transient - limit))
            for db in (10, 20, 30, 40, 50)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-3


@pytest.mark.parametrize("M", [2, 7, 20])
@pytest.mark.parametrize("K", [1, 2, 4])
def test_remark1_single_success_matches_oma(M, K):
    params = SystemParams(M, K, power_budget=1e300, tx_policy=FixedProb(0.35))
    for j in range(M - 1):
        assert high_snr_transition(j, 1, params) == pytest.approx(oma_transition(j, params)[1], rel=1e-15)
