"""Brute-force slot enumeration for small instances.

Every remaining user is either silent or active on level k, and an active
user is either able to afford its level or not, giving (2K+1)^m outcomes for m
remaining users. Because the channel enters the decoding only through
affordability, weighting each outcome by the per-user probabilities gives the
exact slot distribution. User 0 of the remaining users plays the tagged user.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .kernel import TransitionModel
from .levels import LevelSet, feasibility_probs, sic_threshold
from .params import SystemParams
from .sim import decode_sic

MAX_ENUM_USERS = 12

# None = silent, (k, feasible) = active on 0-based level k
UserOutcome = Optional[Tuple[int, bool]]
SuccessRule = Callable[[Sequence[UserOutcome]], set]


class InstanceTooLarge(ValueError):
    pass


def distinct_levels_success(outcomes: Sequence[UserOutcome]) -> set[int]:
    """Feasible transmitters all succeed iff their levels are pairwise distinct, else none do."""
    tx = [(u, o[0]) for u, o in enumerate(outcomes) if o is not None and o[1]]
    if len({k for _, k in tx}) < len(tx):
        return set()
    return {u for u, _ in tx}


def physical_success(levels: LevelSet, rate: float) -> SuccessRule:
    """Success rule that runs the SIC decoder on the feasible transmitters."""
    ladder = levels.levels
    theta = sic_threshold(rate)

    def rule(outcomes):
        tx = [(u, o[0]) for u, o in enumerate(outcomes) if o is not None and o[1]]
        decoded = decode_sic([(k, ladder[k]) for _, k in tx], theta)
        return {tx[n][0] for n in decoded}

    return rule


def enumerate_slot(m_remaining: int, params: SystemParams, levels: LevelSet,
                   success_rule: SuccessRule = distinct_levels_success) -> dict[int, tuple[float, float]]:
    """Exact one-slot distribution from state j = M - m_remaining.

    Returns ``{i: (bar, plain)}`` where ``bar`` is the probability that exactly
    i users succeed and ``plain`` the probability that exactly i succeed and
    the tagged user is not among them. Entry 0 holds the no-success mass in
    both slots.
    """
    if m_remaining > MAX_ENUM_USERS:
        raise InstanceTooLarge(f"{m_remaining} users exceeds enumeration bound {MAX_ENUM_USERS}")
    if not 1 <= m_remaining <= params.num_users:
        raise ValueError(f"m_remaining={m_remaining} out of range for M={params.num_users}")
    K = len(levels)
    ptx = params.ptx(params.num_users - m_remaining)
    pk = params.level_choice_prob
    pe = feasibility_probs(levels, params.power_budget)

    choices: list[UserOutcome] = [None]
    weights = [(1.0 - ptx) + ptx * max(0.0, 1.0 - K * pk)]
    for k in range(K):
        choices += [(k, True), (k, False)]
        weights += [ptx * pk * (1.0 - pe[k]), ptx * pk * pe[k]]
    alive = [n for n, w in enumerate(weights) if w > 0.0]

    bar = defaultdict(list)
    plain = defaultdict(list)
    for combo in itertools.product(alive, repeat=m_remaining):
        w = math.prod(weights[c] for c in combo)
        winners = success_rule([choices[c] for c in combo])
        i = len(winners)
        bar[i].append(w)
        if 0 not in winners:
            plain[i].append(w)
    top = max([0, *bar])
    return {i: (math.fsum(bar[i]), math.fsum(plain[i])) for i in range(top + 1)}


def oracle_matrix(params: SystemParams, levels: LevelSet,
                  success_rule: SuccessRule = distinct_levels_success) -> TransitionModel:
    """Transition model assembled entirely from ``enumerate_slot``."""
    M = params.num_users
    P = np.zeros((M, M))
    absorb = np.zeros(M)
    for j in range(M):
        dist = enumerate_slot(M - j, params, levels, success_rule)
        for i, (b, p) in dist.items():
            if p and j + i < M:
                P[j, j + i] = p
            absorb[j] += b - p
    return TransitionModel(P, absorb, "enumeration", params, levels)


def enumerate_with_physical_rule(m_remaining: int, params: SystemParams,
                                 levels: LevelSet) -> dict[int, tuple[float, float]]:
    """``enumerate_slot`` with the SIC decoder deciding every outcome."""
    return enumerate_slot(m_remaining, params, levels, physical_success(levels, params.target_rate))
