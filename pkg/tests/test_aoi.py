import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from noma_aoi import (NOMA_EXACT, OMA, AbsorptionImpossible, FixedProb, SystemParams, TransitionModel,
                      average_aoi, build_matrix, design_ii_levels, frame_success_prob, interupdate_moments,
                      service_moments)
from noma_aoi.kernel import STRATEGIES


def synthetic(transient):
    transient = np.asarray(transient, dtype=float)
    return TransitionModel(transient, 1 - transient.sum(axis=1), "synthetic", SystemParams(len(transient), 1))


def delivery_pmf(model, N):
    """q_l via explicit matrix powers."""
    p = model.exit_vector()
    return np.array([np.linalg.matrix_power(model.transient, l - 1)[0] @ p for l in range(1, N + 1)])


def renewal_aoi(q, N, T):
    """Sawtooth average by direct summation over frame gaps and delivery slots.

    Y = G*N*T + S' - S with G ~ Geometric(Q) frames and S, S' iid delivery
    delays; the average age is E[S*Y + Y^2/2] / E[Y].
    """
    Q = q.sum()
    pi = q / Q
    slots = np.arange(1, len(q) + 1) * T
    num = den = 0.0
    g = 1
    while True:
        pg = Q * (1 - Q) ** (g - 1)
        if pg < 1e-20 and g > 1:
            break
        for a, s in zip(pi, slots):
            for b, s2 in zip(pi, slots):
                y = g * N * T + s2 - s
                w = pg * a * b
                num += w * (s * y + 0.5 * y * y)
                den += w * y
        g += 1
    return num / den


def test_zero_matrix_is_immediate_delivery():
    model = synthetic(np.zeros((3, 3)))
    assert frame_success_prob(model, 4) == 1
    assert service_moments(model, 4, 2.0) == (2.0, 4.0)
    assert interupdate_moments(model, 4, 2.0) == (8.0, 64.0)
    b = average_aoi(model, 8, 6.0)
    assert b.average_aoi == 30.0
    assert average_aoi(model, 5, 1.5).average_aoi == 1.5 + 5 * 1.5 / 2


def test_identity_matrix_cannot_absorb():
    model = synthetic(np.eye(3))
    assert frame_success_prob(model, 5) == 0
    with pytest.raises(AbsorptionImpossible):
        average_aoi(model, 5, 1.0)


def test_uniform_two_slot_delivery():
    # state 0 absorbs half the time, state 1 always: q_1 = q_2 = 1/2
    model = TransitionModel(np.array([[0.0, 0.5], [0.0, 0.0]]), np.array([0.5, 1.0]), "synthetic",
                            SystemParams(2, 1))
    q = delivery_pmf(model, 2)
    np.testing.assert_allclose(q, [0.5, 0.5])
    es, es2 = service_moments(model, 2, 1.0)
    assert es == pytest.approx(1.5, abs=1e-15)
    assert es2 == pytest.approx(2.5, abs=1e-15)


def test_half_success_doubles_interupdate():
    model = synthetic([[0.5]])
    ey, _ = interupdate_moments(model, 1, 3.0)
    assert ey == pytest.approx(2 * 1 * 3.0)


def test_two_user_game_moments(two_user_game):
    params, lv = two_user_game
    model = build_matrix(NOMA_EXACT, params, lv)
    # explicit squaring: s0 P^2 1 = [3/8, 1/4] . [5/8, 1/2] = 23/64
    assert frame_success_prob(model, 2) == pytest.approx(41 / 64, abs=1e-15)
    np.testing.assert_allclose(delivery_pmf(model, 2), [24 / 64, 17 / 64], atol=1e-15)
    es, es2 = service_moments(model, 2, 1.0)
    assert es == pytest.approx(58 / 41, abs=1e-14)
    assert es2 == pytest.approx(92 / 41, abs=1e-14)
    b = average_aoi(model, 2, 1.0)
    assert b.average_aoi == pytest.approx(renewal_aoi(delivery_pmf(model, 2), 2, 1.0), rel=1e-10)


@pytest.mark.parametrize("strategy", STRATEGIES)
@pytest.mark.parametrize("M, K, ptx, P", [(3, 2, 0.4, 1.0), (5, 3, 0.8, 10.0), (4, 1, 0.2, 1000.0)])
def test_closed_form_matches_renewal_sum(strategy, M, K, ptx, P):
    params = SystemParams(M, K, slots_per_frame=5, slot_duration=2.0, power_budget=P, tx_policy=FixedProb(ptx))
    model = build_matrix(strategy, params, design_ii_levels(1, K))
    got = average_aoi(model, 5, 2.0).average_aoi
    assert got == pytest.approx(renewal_aoi(delivery_pmf(model, 5), 5, 2.0), rel=1e-9)


models = st.builds(
    lambda M, K, N, ptx, db, strategy: (build_matrix(strategy, SystemParams(M, K, N, 1.0, 1.0, 10 ** (db / 10),
                                                                            FixedProb(ptx)),
                                                     design_ii_levels(1.0, K)), N),
    st.integers(1, 12), st.integers(1, 4), st.integers(1, 12), st.floats(0.05, 1.0), st.floats(-5, 40),
    st.sampled_from(STRATEGIES),
)


@settings(deadline=None)
@given(models, st.floats(0.1, 10))
def test_moment_invariants(model_n, T):
    model, N = model_n
    try:
        b = average_aoi(model, N, T)
    except AbsorptionImpossible:
        return
    assert 0 < b.frame_success_prob <= 1
    assert b.mean_interupdate >= N * T * (1 - 1e-12)
    assert T * (1 - 1e-12) <= b.mean_service <= N * T * (1 + 1e-12)
    assert b.second_service >= b.mean_service**2 * (1 - 1e-12)
    assert b.second_interupdate >= b.mean_interupdate**2 * (1 - 1e-12)
    assert b.average_aoi >= b.mean_service * (1 - 1e-12)
    assert b.average_aoi >= N * T / 2 * (1 - 1e-12)


@given(models)
def test_delivery_pmf_telescopes(model_n):
    model, N = model_n
    q = delivery_pmf(model, N)
    assert math.fsum(q) == pytest.approx(frame_success_prob(model, N), abs=1e-12)


def test_oma_cannot_absorb_when_everyone_collides():
    params = SystemParams(3, 1, tx_policy=FixedProb(1.0))
    with pytest.raises(AbsorptionImpossible):
        average_aoi(build_matrix(OMA, params), 4, 1.0)
