"""Slot-level Monte Carlo simulation of NOMA and OMA grant-free access.

Channels are Rayleigh (unit-mean exponential power gain), redrawn every slot.
A NOMA user inverts its channel to hit its chosen level exactly and stays
silent if that needs more than the budget P. The receiver runs physical SIC
from the strongest level down; signals that fail to decode stay in the
interference for every later stage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .levels import LevelSet, sic_threshold
from .params import OmaAdaptive, SystemParams

SIC_EPS = 1e-9
CHUNK_FRAMES = 2048
MIN_BATCHES = 20

NOMA = "NOMA"
OMA = "OMA"


class NoDeliveryObserved(RuntimeError):
    """The run produced fewer than two tagged deliveries, so no AoI sample exists."""


def decode_sic(transmissions, threshold: float, eps: float = SIC_EPS) -> set[int]:
    """Decode one slot with successive interference cancellation.

    Parameters
    ----------
    transmissions : sequence of (level_index, receive_snr)
        Level indices are 0-based; index 0 is the strongest level and is
        decoded first.
    threshold : float
        Linear SINR needed for decoding, 2**R - 1.

    Returns
    -------
    set of int
        Positions in ``transmissions`` that were decoded.
    """
    remaining = math.fsum(snr for _, snr in transmissions)
    decoded = set()
    for k in sorted({lvl for lvl, _ in transmissions}):
        at_k = [n for n, (lvl, _) in enumerate(transmissions) if lvl == k]
        if len(at_k) != 1:
            continue
        snr = transmissions[at_k[0]][1]
        if snr * (1.0 + eps) >= threshold * (1.0 + remaining - snr):
            decoded.add(at_k[0])
            remaining -= snr
    return decoded


def distinct_levels_rule(levels_of_transmitters) -> bool:
    """All feasible transmitters succeed iff their levels are pairwise distinct."""
    levels_of_transmitters = list(levels_of_transmitters)
    return len(set(levels_of_transmitters)) == len(levels_of_transmitters)


def decode_sic_batch(level_idx: np.ndarray, ladder: np.ndarray, threshold: float,
                     eps: float = SIC_EPS) -> np.ndarray:
    """Vectorised ``decode_sic`` over rows; ``level_idx`` is -1 where silent."""
    tx = level_idx >= 0
    power = np.where(tx, ladder[np.clip(level_idx, 0, None)], 0.0)
    remaining = power.sum(axis=1)
    decoded = np.zeros(level_idx.shape, dtype=bool)
    for k, pk in enumerate(ladder):
        at_k = level_idx == k
        ok = (at_k.sum(axis=1) == 1) & (pk * (1.0 + eps) >= threshold * (1.0 + remaining - pk))
        decoded |= at_k & ok[:, None]
        remaining = np.where(ok, remaining - pk, remaining)
    return decoded


def _attempt_probs(params: SystemParams, j: np.ndarray) -> np.ndarray:
    M = params.num_users
    if isinstance(params.tx_policy, OmaAdaptive):
        left = M - j
        return np.where(left > 0, 1.0 / np.maximum(left, 1), 0.0)
    return np.full(j.shape, params.ptx(0))


def _slot(rng: np.random.Generator, pending: np.ndarray, ptx: np.ndarray,
          params: SystemParams, ladder: np.ndarray | None, strategy: str) -> np.ndarray:
    """Simulate one slot for a batch of independent rows; returns decoded users."""
    shape = pending.shape
    active = (rng.random(shape) < ptx[:, None]) & pending
    pick = rng.random(shape)
    gain = rng.exponential(size=shape)
    theta = sic_threshold(params.target_rate)
    if strategy == OMA:
        lone = active.sum(axis=1) == 1
        return active & lone[:, None] & (params.power_budget * gain >= theta)
    level = np.floor(pick / params.level_choice_prob).astype(np.int64)
    chosen = level < len(ladder)
    level = np.minimum(level, len(ladder) - 1)
    feasible = ladder[level] <= params.power_budget * gain
    idx = np.where(active & chosen & feasible, level, -1)
    return decode_sic_batch(idx, ladder, theta)


def _check_strategy(strategy, levels, params):
    if strategy not in (NOMA, OMA):
        raise ValueError(f"unknown simulation strategy {strategy!r}; expected {NOMA!r} or {OMA!r}")
    if strategy == NOMA:
        if levels is None:
            raise ValueError("NOMA simulation needs a level set")
        if len(levels) != params.num_levels:
            raise ValueError(f"level set has {len(levels)} levels but K={params.num_levels}")
        return levels.as_array()
    return None


@dataclass(frozen=True)
class SimEstimate:
    mean_aoi: float
    stderr_aoi: float
    frames_run: int
    deliveries: int
    empirical_transitions: np.ndarray
    seed: int
    batch_area: np.ndarray = field(default=None, repr=False, compare=False)
    batch_length: np.ndarray = field(default=None, repr=False, compare=False)

    def transition_frequencies(self) -> np.ndarray:
        """Row-normalised ``empirical_transitions`` (last column is absorption)."""
        counts = self.empirical_transitions
        totals = counts.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(totals > 0, counts / np.maximum(totals, 1), np.nan)


def _run_chunk(rng, F, params, ladder, strategy, counts):
    M, N = params.num_users, params.slots_per_frame
    delivered = np.zeros((F, M), dtype=bool)
    tagged_slot = np.zeros(F, dtype=np.int64)
    for slot in range(1, N + 1):
        j = delivered.sum(axis=1)
        decoded = _slot(rng, ~delivered, _attempt_probs(params, j), params, ladder, strategy)
        live = tagged_slot == 0
        if live.any():
            wins = decoded[live, 1:].sum(axis=1)
            dest = np.where(decoded[live, 0], M, j[live] + wins)
            np.add.at(counts, (j[live], dest), 1)
        tagged_slot[live & decoded[:, 0]] = slot
        delivered |= decoded
    return tagged_slot


def simulate_frames(params: SystemParams, levels: LevelSet | None, strategy: str,
                    n_frames: int, seed: int) -> SimEstimate:
    """Estimate the tagged user's average AoI over ``n_frames`` frames.

    Frames are simulated in chunks of ``CHUNK_FRAMES``, each with its own
    substream spawned from ``seed``, so results do not depend on how chunks
    are scheduled. The AoI is the exact sawtooth area over complete
    inter-delivery intervals divided by their total length; the standard
    error comes from batch means over at least ``MIN_BATCHES`` batches.
    """
    if n_frames < 1:
        raise ValueError(f"n_frames must be >= 1, got {n_frames}")
    ladder = _check_strategy(strategy, levels, params)
    M, N, T = params.num_users, params.slots_per_frame, params.slot_duration
    n_chunks = -(-n_frames // CHUNK_FRAMES)
    streams = np.random.SeedSequence(seed).spawn(n_chunks)
    counts = np.zeros((M, M + 1), dtype=np.int64)
    slots = []
    for c, ss in enumerate(streams):
        F = min(CHUNK_FRAMES, n_frames - c * CHUNK_FRAMES)
        slots.append(_run_chunk(np.random.default_rng(ss), F, params, ladder, strategy, counts))
    tagged_slot = np.concatenate(slots)

    frame = np.flatnonzero(tagged_slot)
    if frame.size < 2:
        raise NoDeliveryObserved(f"only {frame.size} tagged deliveries in {n_frames} frames")
    l = tagged_slot[frame]
    t = (frame * N + l) * T
    y = np.diff(t).astype(float)
    s_prev = l[:-1] * T
    area = s_prev * y + 0.5 * y * y
    mean = area.sum() / y.sum()

    n_batches = min(MIN_BATCHES, n_frames)
    batch = frame[1:] * n_batches // n_frames
    a_b = np.bincount(batch, weights=area, minlength=n_batches)
    y_b = np.bincount(batch, weights=y, minlength=n_batches)
    if n_batches < 2:
        stderr = math.inf
    else:
        resid = a_b - mean * y_b
        stderr = math.sqrt(resid @ resid / (n_batches * (n_batches - 1))) / y_b.mean()
    return SimEstimate(float(mean), float(stderr), n_frames, int(frame.size), counts, int(seed), a_b, y_b)


def paired_difference(a: SimEstimate, b: SimEstimate) -> tuple[float, float]:
    """AoI difference a - b and its batch-means standard error.

    Meant for runs that share a seed and frame count (common random numbers),
    where batch b of one run covers the same frames as batch b of the other.
    """
    if a.frames_run != b.frames_run or len(a.batch_area) != len(b.batch_area):
        raise ValueError("paired runs need the same frame count")
    ra = (a.batch_area - a.mean_aoi * a.batch_length) / a.batch_length.mean()
    rb = (b.batch_area - b.mean_aoi * b.batch_length) / b.batch_length.mean()
    d = ra - rb
    B = len(d)
    if B < 2:
        return a.mean_aoi - b.mean_aoi, math.inf
    return a.mean_aoi - b.mean_aoi, math.sqrt(d @ d / (B * (B - 1)))


@dataclass(frozen=True)
class TransitionEstimate:
    """Single-slot frequencies per start state; column M is tagged success."""

    probs: np.ndarray
    stderr: np.ndarray
    counts: np.ndarray
    n_slots: int
    seed: int


def estimate_transitions(params: SystemParams, levels: LevelSet | None, strategy: str,
                         n_slots: int, seed: int) -> TransitionEstimate:
    """Tally one-slot outcomes from every state j with user 0 as the tagged user."""
    if n_slots < 10_000:
        raise ValueError(f"n_slots must be >= 1e4, got {n_slots}")
    ladder = _check_strategy(strategy, levels, params)
    M = params.num_users
    counts = np.zeros((M, M + 1), dtype=np.int64)
    rngs = [np.random.default_rng(ss) for ss in np.random.SeedSequence(seed).spawn(M)]
    for j, rng in enumerate(rngs):
        pending = np.zeros((n_slots, M), dtype=bool)
        pending[:, : M - j] = True
        ptx = _attempt_probs(params, np.full(n_slots, j))
        decoded = _slot(rng, pending, ptx, params, ladder, strategy)
        dest = np.where(decoded[:, 0], M, j + decoded[:, 1:].sum(axis=1))
        counts[j] = np.bincount(dest, minlength=M + 1)
    probs = counts / n_slots
    stderr = np.sqrt(probs * (1.0 - probs) / n_slots)
    return TransitionEstimate(probs, stderr, counts, n_slots, int(seed))
