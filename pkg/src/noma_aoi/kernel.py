"""State-transition probabilities of the access competition.

State j (0 <= j <= M-1) means j users have delivered in the current frame and
the tagged user has not. ``bar`` probabilities count any i successes among the
M-j remaining users; the plain ones additionally require the tagged user to be
outside the successful set, which by symmetry scales them by (M-j-i)/(M-j).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .levels import LevelSet, feasibility_probs, sic_threshold
from .params import SystemParams

NOMA_EXACT = "NOMA-DesignII-exact"
NOMA_HIGH_SNR = "NOMA-HighSNR"
OMA = "OMA"
STRATEGIES = (NOMA_EXACT, NOMA_HIGH_SNR, OMA)


def elementary_symmetric(values, degree: int) -> float:
    """e_degree(values) by the usual one-pass recurrence; e_0 = 1."""
    if degree < 0:
        raise ValueError(f"degree must be non-negative, got {degree}")
    values = list(values)
    if degree > len(values):
        return 0.0
    e = [1.0] + [0.0] * degree
    for x in values:
        for d in range(degree, 0, -1):
            e[d] += x * e[d - 1]
    return e[degree]


def gamma_fail(pe, d: int) -> float:
    """Multinomial weight of d actives that all found their level infeasible.

    sum over k_1+..+k_K = d of d!/(k_1!..k_K!) prod pe_k^{k_k}, which is
    (sum pe)^d by the multinomial theorem.
    """
    if d < 0:
        raise ValueError(f"d must be non-negative, got {d}")
    return math.fsum(pe) ** d


def _check_state(params: SystemParams, j: int):
    if not 0 <= j <= params.num_users - 1:
        raise ValueError(f"state j={j} out of range for M={params.num_users}")


def _binom_pmf(n: int, m: int, p: float) -> float:
    return math.comb(n, m) * p**m * (1.0 - p) ** (n - m)


class _Lemma:
    """Per-state cache of the quantities shared by every i in a row."""

    def __init__(self, params: SystemParams, levels: LevelSet, j: int):
        if len(levels) != params.num_levels:
            raise ValueError(f"level set has {len(levels)} levels but K={params.num_levels}")
        _check_state(params, j)
        self.n = params.num_users - j
        self.ptx = params.ptx(j)
        self.pk = params.level_choice_prob
        self.pe = feasibility_probs(levels, params.power_budget)
        self.survive = 1.0 - self.pe
        self.pe_sum = math.fsum(self.pe)
        self.num_levels = params.num_levels

    def bar(self, i: int) -> float:
        n, ptx, pk = self.n, self.ptx, self.pk
        g_i = elementary_symmetric(self.survive, i)
        if g_i == 0.0:
            return 0.0
        terms = [
            _binom_pmf(n, m, ptx) * math.perm(m, i) * pk**m * g_i * gamma_fail(self.pe, m - i)
            for m in range(i + 1, n + 1)
        ]
        terms.append(_binom_pmf(n, i, ptx) * math.factorial(i) * pk**i * g_i)
        return math.fsum(terms)


def _check_i(params, j, i):
    hi = min(params.num_levels, params.num_users - j)
    if not 1 <= i <= hi:
        raise ValueError(f"success count i={i} out of range [1, {hi}] for state j={j}")


def bar_transition(j: int, i: int, params: SystemParams, levels: LevelSet) -> float:
    """Probability that exactly i of the M-j remaining users succeed (tagged may be among them)."""
    _check_state(params, j)
    _check_i(params, j, i)
    return _Lemma(params, levels, j).bar(i)


def transition(j: int, i: int, params: SystemParams, levels: LevelSet) -> float:
    """P_{j,j+i} for NOMA with a one-user-per-level ladder.

    For i >= 1 the tagged user must stay outside the i winners; i = 0 is the
    probability that nobody succeeds.
    """
    lem = _Lemma(params, levels, j)
    if i == 0:
        hi = min(params.num_levels, lem.n)
        return 1.0 - math.fsum(lem.bar(k) for k in range(1, hi + 1))
    _check_i(params, j, i)
    return (lem.n - i) / lem.n * lem.bar(i)


def _high_snr_bar(n: int, i: int, ptx: float, pk: float, num_levels: int) -> float:
    return math.perm(n, i) * ptx**i * (1.0 - ptx) ** (n - i) * pk**i * math.comb(num_levels, i)


def high_snr_transition(j: int, i: int, params: SystemParams) -> float:
    """All-levels-affordable limit of ``transition``."""
    _check_state(params, j)
    n = params.num_users - j
    ptx, pk, k = params.ptx(j), params.level_choice_prob, params.num_levels
    if i == 0:
        return 1.0 - math.fsum(_high_snr_bar(n, i_, ptx, pk, k) for i_ in range(1, min(k, n) + 1))
    _check_i(params, j, i)
    return math.perm(n - 1, i) * ptx**i * (1.0 - ptx) ** (n - i) * pk**i * math.comb(k, i)


def oma_transition(j: int, params: SystemParams) -> tuple[float, float]:
    """(P_{j,j}, P_{j,j+1}) for single-user slots at full power.

    A slot succeeds iff exactly one user transmits and P|h|^2 >= 2^R - 1.
    """
    _check_state(params, j)
    n = params.num_users - j
    ptx = params.ptx(j)
    outage_free = math.exp(-sic_threshold(params.target_rate) / params.power_budget)
    bar = n * ptx * (1.0 - ptx) ** (n - 1) * outage_free
    return 1.0 - bar, (n - 1) / n * bar


@dataclass(frozen=True)
class TransitionModel:
    """Transient matrix over s_0..s_{M-1} plus the absorption (tagged success) vector.

    ``absorption`` is computed directly as the tagged user's success
    probability, not as 1 - row sum, so conservation is a real check.
    """

    transient: np.ndarray
    absorption: np.ndarray
    strategy: str
    params: SystemParams
    levels: LevelSet | None = field(default=None, compare=False)

    @property
    def num_states(self) -> int:
        return self.transient.shape[0]

    def conservation_error(self) -> float:
        return float(np.max(np.abs(self.transient.sum(axis=1) + self.absorption - 1.0)))

    def exit_vector(self) -> np.ndarray:
        """p = 1 - P_M 1."""
        return 1.0 - self.transient.sum(axis=1)


def build_matrix(strategy: str, params: SystemParams, levels: LevelSet | None = None) -> TransitionModel:
    """Assemble the transient matrix and absorption vector for one strategy.

    ``levels`` is required for the exact NOMA kernel and ignored otherwise.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    M, K = params.num_users, params.num_levels
    P = np.zeros((M, M))
    absorb = np.zeros(M)
    for j in range(M):
        n = M - j
        if strategy == OMA:
            stay, move = oma_transition(j, params)
            bars = {1: 1.0 - stay}
            P[j, j] = stay
            if j + 1 < M:
                P[j, j + 1] = move
        else:
            if strategy == NOMA_EXACT:
                if levels is None:
                    raise ValueError("exact NOMA kernel needs a level set")
                lem = _Lemma(params, levels, j)
                bars = {i: lem.bar(i) for i in range(1, min(K, n) + 1)}
            else:
                ptx, pk = params.ptx(j), params.level_choice_prob
                bars = {i: _high_snr_bar(n, i, ptx, pk, K) for i in range(1, min(K, n) + 1)}
            P[j, j] = 1.0 - math.fsum(bars.values())
            for i, b in bars.items():
                if i <= n - 1:
                    P[j, j + i] = (n - i) / n * b
        absorb[j] = math.fsum(i / n * b for i, b in bars.items())
    return TransitionModel(P, absorb, strategy, params, levels)
