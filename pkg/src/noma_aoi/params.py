"""Scenario parameters and transmission-attempt policies."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class FixedProb:
    """Every undelivered user attempts with the same constant probability."""

    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0 or math.isnan(self.p):
            raise ValueError(f"attempt probability must be in [0, 1], got {self.p}")

    def prob(self, j: int, num_users: int, num_levels: int) -> float:
        return self.p

    def __str__(self):
        return f"fixed:{self.p!r}"


@dataclass(frozen=True)
class NomaAdaptive:
    """min(K/M, 1), independent of how many users already delivered."""

    def prob(self, j: int, num_users: int, num_levels: int) -> float:
        return min(num_levels / num_users, 1.0)

    def __str__(self):
        return "noma"


@dataclass(frozen=True)
class OmaAdaptive:
    """1/(M - j) where j users have already delivered in the frame."""

    def prob(self, j: int, num_users: int, num_levels: int) -> float:
        if not 0 <= j < num_users:
            raise ValueError(f"OMA adaptive policy needs 0 <= j < M, got j={j}, M={num_users}")
        return 1.0 / (num_users - j)

    def __str__(self):
        return "oma"


AccessPolicy = Union[FixedProb, NomaAdaptive, OmaAdaptive]


def parse_policy(text: str) -> AccessPolicy:
    """Parse ``fixed:<p>``, ``noma`` or ``oma``."""
    text = text.strip().lower()
    if text == "noma":
        return NomaAdaptive()
    if text == "oma":
        return OmaAdaptive()
    if text.startswith("fixed:"):
        return FixedProb(float(text.split(":", 1)[1]))
    raise ValueError(f"unknown access policy {text!r}; expected fixed:<p>, noma or oma")


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class SystemParams:
    """All scalars of one grant-free scenario.

    Parameters
    ----------
    num_users : int
        M, users competing in every frame.
    num_levels : int
        K, number of pre-configured receive-SNR levels.
    slots_per_frame : int
        N, slots per frame.
    slot_duration : float
        T, slot length in seconds.
    target_rate : float
        R, target rate in bits/s/Hz.
    power_budget : float
        P, transmit budget expressed as a linear SNR.
    tx_policy : AccessPolicy
        How the attempt probability is chosen.
    level_choice_prob : float, optional
        Probability of picking each particular level; defaults to 1/K.
        If ``K * level_choice_prob < 1`` an active user picks no level with
        the remaining probability and stays silent.
    """

    num_users: int
    num_levels: int
    slots_per_frame: int = 8
    slot_duration: float = 6.0
    target_rate: float = 1.0
    power_budget: float = 1.0
    tx_policy: AccessPolicy = field(default_factory=NomaAdaptive)
    level_choice_prob: float | None = None

    def __post_init__(self):
        for name in ("num_users", "num_levels", "slots_per_frame"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v}")
        for name in ("slot_duration", "target_rate", "power_budget"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and positive, got {v}")
        if self.level_choice_prob is None:
            object.__setattr__(self, "level_choice_prob", 1.0 / self.num_levels)
        pk = self.level_choice_prob
        if not 0.0 <= pk <= 1.0 or pk * self.num_levels > 1 + 1e-12:
            raise ValueError(f"level_choice_prob={pk} incompatible with K={self.num_levels}")

    def ptx(self, j: int = 0) -> float:
        """Attempt probability in state j (j other users already delivered)."""
        return self.tx_policy.prob(j, self.num_users, self.num_levels)

    def replace(self, **changes) -> "SystemParams":
        from dataclasses import replace

        if "num_levels" in changes and "level_choice_prob" not in changes:
            changes["level_choice_prob"] = None
        return replace(self, **changes)
