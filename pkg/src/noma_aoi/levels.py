"""Pre-configured receive-SNR ladders.

Two constructions are provided. ``design_i_levels`` sizes every level for
the worst case where all other M-1 users pile onto the next level down, so a
collision at a later SIC stage never hurts an earlier one. ``design_ii_levels``
sizes each level for one user per lower level, which is much cheaper but lets
one collision break the whole SIC chain.

All values are linear SNRs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DESIGN_I = "DesignI"
DESIGN_II = "DesignII"
CUSTOM = "Custom"


@dataclass(frozen=True)
class LevelSet:
    levels: tuple[float, ...]
    design: str = CUSTOM
    rate: float | None = None
    num_users: int | None = None

    def __post_init__(self):
        levels = tuple(float(x) for x in self.levels)
        if not levels:
            raise ValueError("a level set needs at least one level")
        if any(not np.isfinite(x) or x <= 0 for x in levels):
            raise ValueError(f"levels must be finite and positive: {levels}")
        if any(a <= b for a, b in zip(levels, levels[1:])):
            raise ValueError(f"levels must be strictly descending: {levels}")
        object.__setattr__(self, "levels", levels)

    def __len__(self):
        return len(self.levels)

    def __iter__(self):
        return iter(self.levels)

    def as_array(self) -> np.ndarray:
        return np.array(self.levels)


def sic_threshold(rate: float) -> float:
    """Linear SINR needed to support ``rate`` bits/s/Hz: 2**R - 1."""
    if not rate > 0:
        raise ValueError(f"rate must be positive, got {rate}")
    return 2.0**rate - 1.0


def _check_k(num_levels):
    if int(num_levels) != num_levels or num_levels < 1:
        raise ValueError(f"number of levels must be a positive integer, got {num_levels}")


def design_i_levels(rate: float, num_levels: int, num_users: int) -> LevelSet:
    """Worst-case ladder: P_k = (2^R - 1)(1 + (M - 1) P_{k+1}), P_K = 2^R - 1."""
    _check_k(num_levels)
    if int(num_users) != num_users or num_users < 2:
        raise ValueError(f"Design I needs at least 2 users, got M={num_users}")
    theta = sic_threshold(rate)
    levels = [theta]
    for _ in range(num_levels - 1):
        levels.append(theta * (1.0 + (num_users - 1) * levels[-1]))
    return LevelSet(tuple(reversed(levels)), DESIGN_I, rate, num_users)


def design_ii_levels(rate: float, num_levels: int) -> LevelSet:
    """One-user-per-level ladder: P_k = (2^R - 1) 2^{R(K - k)}.

    This is the closed form of P_k = (2^R - 1)(1 + sum_{l>k} P_l), i.e. each
    level clears the threshold against one user on every lower level.
    """
    _check_k(num_levels)
    theta = sic_threshold(rate)
    levels = tuple(theta * 2.0 ** (rate * (num_levels - k)) for k in range(1, num_levels + 1))
    return LevelSet(levels, DESIGN_II, rate)


def feasibility_probs(levels: LevelSet, power_budget: float) -> np.ndarray:
    """Probability that a Rayleigh user cannot afford each level.

    With unit-mean exponential gain g, inverting the channel to reach P_k
    needs P_k/g <= P, which fails with probability 1 - exp(-P_k/P).
    """
    if not power_budget > 0:
        raise ValueError(f"power budget must be positive, got {power_budget}")
    return -np.expm1(-levels.as_array() / power_budget)
