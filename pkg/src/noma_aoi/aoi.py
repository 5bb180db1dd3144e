"""Closed-form average AoI of the tagged user from a transition model.

Every frame restarts the chain in s_0 (fresh updates, undelivered ones are
dropped). With q_l = s_0^T P_M^{l-1} p the probability of delivery in slot l
and Q = sum_l q_l, the inter-update time is a geometric number of frames plus
the difference of two independent in-frame delivery delays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernel import TransitionModel

ABSORPTION_FLOOR = 1e-300


class AbsorptionImpossible(ArithmeticError):
    """The tagged user can never deliver within a frame (Q ~ 0)."""


@dataclass(frozen=True)
class AoiBreakdown:
    frame_success_prob: float
    mean_service: float
    second_service: float
    mean_interupdate: float
    second_interupdate: float
    cross: float
    average_aoi: float


def _slot_absorption(model: TransitionModel, N: int) -> tuple[np.ndarray, float]:
    """Return (q_1..q_N, s_0^T P_M^N 1) by iterated row-vector products."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    p = model.exit_vector()
    row = np.zeros(model.num_states)
    row[0] = 1.0
    q = np.empty(N)
    for l in range(N):
        q[l] = row @ p
        row = row @ model.transient
    return q, float(row.sum())


def frame_success_prob(model: TransitionModel, N: int) -> float:
    """1 - s_0^T P_M^N 1, the chance the tagged user delivers within a frame."""
    _, stay = _slot_absorption(model, N)
    return 1.0 - stay


def _checked(model, N):
    q, stay = _slot_absorption(model, N)
    Q = 1.0 - stay
    if Q <= ABSORPTION_FLOOR:
        raise AbsorptionImpossible(f"tagged user cannot deliver within a frame (Q={Q:g})")
    return q, Q


def service_moments(model: TransitionModel, N: int, T: float) -> tuple[float, float]:
    """E{S} and E{S^2} of the in-frame delivery delay, given delivery."""
    q, Q = _checked(model, N)
    l = np.arange(1, N + 1)
    return T * float(l @ q) / Q, T * T * float((l * l) @ q) / Q


def interupdate_moments(model: TransitionModel, N: int, T: float, service=None) -> tuple[float, float]:
    """E{Y} and E{Y^2} of the time between consecutive deliveries."""
    _, Q = _checked(model, N)
    es, es2 = service if service is not None else service_moments(model, N, T)
    ey = T * N / Q
    ey2 = N * N * T * T * (2.0 - Q) / Q**2 + 2.0 * es2 - 2.0 * es * es
    return ey, ey2


def average_aoi(model: TransitionModel, N: int, T: float) -> AoiBreakdown:
    Q = frame_success_prob(model, N)
    es, es2 = service_moments(model, N, T)
    ey, ey2 = interupdate_moments(model, N, T, (es, es2))
    cross = es * ey - es2 + es * es
    return AoiBreakdown(
        frame_success_prob=Q,
        mean_service=es,
        second_service=es2,
        mean_interupdate=ey,
        second_interupdate=ey2,
        cross=cross,
        average_aoi=cross / ey + ey2 / (2.0 * ey),
    )
