"""Parameter sweeps and the self-validation suite.

Sweep specs are flat ``key = value`` text files::

    scenario   = fig1a
    axis       = M               # M | P_dB | ptx
    values     = 5, 10, 15
    M          = 10              # fixed values for the non-swept keys
    K          = 2
    N          = 8
    T          = 6
    R          = 1
    P_dB       = 0
    ptx        = adaptive        # adaptive | noma | oma | fixed:<p>
    strategies = OMA, NOMA-DII-analytic, NOMA-DII-sim
    frames     = 100000
    seed       = 1

``ptx = adaptive`` gives NOMA strategies min(K/M, 1) and OMA strategies
1/(M - j). Sweeping ``ptx`` uses fixed attempt probabilities for every
strategy. All simulated rows of a sweep share the base seed, so curves along
the axis use common random numbers.
"""

from __future__ import annotations

import configparser
import csv
import io
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernel, sim
from .aoi import AbsorptionImpossible, average_aoi
from .levels import design_i_levels, design_ii_levels, sic_threshold
from .oracle import oracle_matrix
from .params import FixedProb, NomaAdaptive, OmaAdaptive, SystemParams, db_to_linear, parse_policy

ANALYTIC = {"OMA", "NOMA-DII-analytic", "NOMA-HighSNR"}
SIMULATED = {"OMA-sim", "NOMA-DI-sim", "NOMA-DII-sim"}
STRATEGY_NAMES = ("OMA", "OMA-sim", "NOMA-DI-sim", "NOMA-DII-analytic", "NOMA-DII-sim", "NOMA-HighSNR")
AXES = ("M", "P_dB", "ptx")
DEFAULT_FRAMES = 100_000

CSV_COLUMNS = ["scenario", "axis", "value", "strategy", "aoi", "stderr", "status",
               "seed", "M", "K", "N", "T", "R", "P_dB", "ptx", "frames"]


@dataclass(frozen=True)
class ExperimentSpec:
    scenario: str
    axis: str
    values: tuple
    strategies: tuple
    M: int = 10
    K: int = 2
    N: int = 8
    T: float = 6.0
    R: float = 1.0
    P_dB: float = 0.0
    ptx: str = "adaptive"
    frames: int = DEFAULT_FRAMES
    seed: int = 1

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if not self.values:
            raise ValueError("sweep needs at least one axis value")
        if list(self.values) != sorted(self.values):
            raise ValueError("axis values must be sorted")
        if not self.strategies:
            raise ValueError("sweep needs at least one strategy")
        bad = [s for s in self.strategies if s not in STRATEGY_NAMES]
        if bad:
            raise ValueError(f"unknown strategies {bad}; expected names from {STRATEGY_NAMES}")
        if self.ptx != "adaptive":
            parse_policy(self.ptx)


def parse_spec(text: str) -> ExperimentSpec:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    cp.optionxform = str
    cp.read_string("[spec]\n" + text)
    raw = dict(cp["spec"])
    for key in ("axis", "values", "strategies"):
        if key not in raw:
            raise ValueError(f"sweep spec is missing {key!r}")
    axis = raw.pop("axis")
    conv = {"M": int, "K": int, "N": int, "T": float, "R": float, "P_dB": float,
            "frames": int, "seed": int, "ptx": str, "scenario": str}
    kwargs = {}
    for key, value in raw.items():
        if key in ("values", "strategies"):
            continue
        if key not in conv:
            raise ValueError(f"unknown sweep spec key {key!r}")
        kwargs[key] = conv[key](value)
    axis_type = {"M": int, "P_dB": float, "ptx": float}.get(axis, str)
    values = tuple(axis_type(v) for v in raw["values"].split(",") if v.strip())
    strategies = tuple(s.strip() for s in raw["strategies"].split(",") if s.strip())
    kwargs.setdefault("scenario", "sweep")
    return ExperimentSpec(axis=axis, values=values, strategies=strategies, **kwargs)


def _point_params(spec: ExperimentSpec, value, strategy: str):
    M, P_dB, ptx = spec.M, spec.P_dB, spec.ptx
    if spec.axis == "M":
        M = int(value)
    elif spec.axis == "P_dB":
        P_dB = float(value)
    else:
        ptx = f"fixed:{float(value)!r}"
    if ptx == "adaptive":
        policy = OmaAdaptive() if strategy.startswith("OMA") else NomaAdaptive()
    else:
        policy = parse_policy(ptx)
    params = SystemParams(M, spec.K, spec.N, spec.T, spec.R, db_to_linear(P_dB), policy)
    return params, P_dB


def evaluate_point(spec: ExperimentSpec, value, strategy: str) -> dict:
    """One CSV row; degenerate points get a status instead of a number."""
    params, P_dB = _point_params(spec, value, strategy)
    row = {"scenario": spec.scenario, "axis": spec.axis, "value": value, "strategy": strategy,
           "aoi": "", "stderr": "", "status": "ok", "seed": "",
           "M": params.num_users, "K": params.num_levels, "N": params.slots_per_frame,
           "T": params.slot_duration, "R": params.target_rate, "P_dB": P_dB,
           "ptx": str(params.tx_policy), "frames": ""}
    try:
        if strategy in ANALYTIC:
            kind = {"OMA": kernel.OMA, "NOMA-DII-analytic": kernel.NOMA_EXACT,
                    "NOMA-HighSNR": kernel.NOMA_HIGH_SNR}[strategy]
            model = kernel.build_matrix(kind, params, design_ii_levels(params.target_rate, params.num_levels))
            row["aoi"] = average_aoi(model, params.slots_per_frame, params.slot_duration).average_aoi
        else:
            if strategy == "OMA-sim":
                est = sim.simulate_frames(params, None, sim.OMA, spec.frames, spec.seed)
            else:
                if strategy == "NOMA-DI-sim":
                    if params.num_users < 2:
                        raise ValueError("Design I needs M >= 2")
                    levels = design_i_levels(params.target_rate, params.num_levels, params.num_users)
                else:
                    levels = design_ii_levels(params.target_rate, params.num_levels)
                est = sim.simulate_frames(params, levels, sim.NOMA, spec.frames, spec.seed)
            row.update(aoi=est.mean_aoi, stderr=est.stderr_aoi, seed=spec.seed, frames=spec.frames)
    except AbsorptionImpossible:
        row["status"] = "absorption-impossible"
    except sim.NoDeliveryObserved:
        row["status"] = "no-delivery"
    except ValueError as exc:
        row["status"] = f"invalid: {exc}"
    return row


def _evaluate(args):
    return evaluate_point(*args)


def run_sweep(spec: ExperimentSpec, jobs: int = 1) -> list[dict]:
    """Evaluate every (axis value, strategy) pair; rows come back in axis order."""
    tasks = [(spec, v, s) for v in spec.values for s in spec.strategies]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(_evaluate, tasks))
    return [_evaluate(t) for t in tasks]


def _fmt(v):
    return repr(v) if isinstance(v, float) else str(v)


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


# ---------------------------------------------------------------- validation

TABLE1 = {
    ("I", 1, 5): [85, 21, 5, 1],
    ("I", 1, 10): [820, 91, 10, 1],
    ("I", 2, 5): [5655, 471, 39, 3],
    ("II", 1, 5): [8, 4, 2, 1],
    ("II", 1, 10): [8, 4, 2, 1],
    ("II", 2, 5): [192, 48, 12, 3],
}

ORACLE_GRID = {"M": (2, 3, 4, 5), "K": (2, 3), "ptx": (0.3, 0.8), "P_dB": (0.0, 10.0, 30.0)}


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""


@dataclass
class Report:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {"passed": self.passed,
                "checks": [dict(name=c.name, passed=c.passed, value=c.value,
                                tolerance=c.tolerance, detail=c.detail) for c in self.checks]}


def check_table1() -> Check:
    worst = 0.0
    for (design, R, M), expected in TABLE1.items():
        got = design_i_levels(R, 4, M) if design == "I" else design_ii_levels(R, 4)
        worst = max(worst, max(abs(g - e) / e for g, e in zip(got, expected)))
    return Check("table1", worst <= 1e-9, worst, 1e-9)


def check_oracle(grid=ORACLE_GRID) -> Check:
    worst, where = 0.0, ""
    for M in grid["M"]:
        for K in grid["K"]:
            levels = design_ii_levels(1.0, K)
            for ptx in grid["ptx"]:
                for P_dB in grid["P_dB"]:
                    params = SystemParams(M, K, power_budget=db_to_linear(P_dB), tx_policy=FixedProb(ptx))
                    ref = oracle_matrix(params, levels)
                    got = kernel.build_matrix(kernel.NOMA_EXACT, params, levels)
                    err = max(np.max(np.abs(ref.transient - got.transient)),
                              np.max(np.abs(ref.absorption - got.absorption)))
                    if err > worst:
                        worst, where = float(err), f"M={M} K={K} ptx={ptx} P_dB={P_dB}"
    return Check("oracle-equivalence", worst <= 1e-12, worst, 1e-12, where)


def random_params(rng: random.Random) -> SystemParams:
    M = rng.randint(1, 30)
    K = rng.randint(1, 5)
    policy = rng.choice([FixedProb(rng.random()), NomaAdaptive(), OmaAdaptive()])
    return SystemParams(M, K, rng.randint(1, 12), rng.uniform(0.1, 10), rng.uniform(0.1, 3),
                        db_to_linear(rng.uniform(-20, 60)), policy)


def check_conservation(n_sets: int = 200, seed: int = 0, perturb: float = 0.0) -> Check:
    """Row sums plus absorption against 1; ``perturb`` shifts one entry (negative control)."""
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(n_sets):
        params = random_params(rng)
        levels = design_ii_levels(params.target_rate, params.num_levels)
        for strategy in kernel.STRATEGIES:
            model = kernel.build_matrix(strategy, params, levels)
            if perturb:
                model.transient[0, 0] += perturb
            worst = max(worst, model.conservation_error())
    return Check("conservation", worst <= 1e-12, worst, 1e-12)


def check_corollary(grid=ORACLE_GRID) -> list[Check]:
    worst = 0.0
    for M in grid["M"]:
        for K in grid["K"]:
            levels = design_ii_levels(1.0, K)
            for ptx in grid["ptx"]:
                # P = 1e300 makes every level affordable: P_e ~ 1e-300
                params = SystemParams(M, K, power_budget=1e300, tx_policy=FixedProb(ptx))
                for j in range(M):
                    for i in range(0, min(K, M - 1 - j) + 1):
                        a = kernel.transition(j, i, params, levels)
                        b = kernel.high_snr_transition(j, i, params)
                        worst = max(worst, abs(a - b))
    exact = Check("corollary-exact", worst <= 1e-12, worst, 1e-12)

    gap = 0.0
    levels = design_ii_levels(1.0, 2)
    for M in grid["M"]:
        for ptx in grid["ptx"]:
            params = SystemParams(M, 2, power_budget=db_to_linear(60.0), tx_policy=FixedProb(ptx))
            for j in range(M):
                for i in range(0, min(2, M - 1 - j) + 1):
                    a = kernel.transition(j, i, params, levels)
                    b = kernel.high_snr_transition(j, i, params)
                    if b > 0:
                        gap = max(gap, abs(a - b) / b)
    return [exact, Check("corollary-60dB", gap < 1e-2, gap, 1e-2)]


def check_remark1(max_users: int = 20) -> Check:
    worst = 0.0
    for M in range(2, max_users + 1):
        for K in range(1, 6):
            for ptx in (0.05, 0.3, 0.8, 1.0):
                params = SystemParams(M, K, power_budget=1e300, tx_policy=FixedProb(ptx))
                for j in range(M - 1):
                    _, oma = kernel.oma_transition(j, params)
                    noma = kernel.high_snr_transition(j, 1, params)
                    if oma or noma:
                        worst = max(worst, abs(oma - noma) / max(abs(oma), abs(noma)))
    return Check("remark1-identity", worst <= 1e-15, worst, 1e-15)


def check_physical_rule(n_slots: int = 100_000, max_levels: int = 2, seed: int = 0) -> Check:
    """SIC decoder vs the all-or-nothing distinct-levels rule on random one-user-per-level ladders.

    The two agree for K <= 2; with three or more levels an isolated strong
    user can survive a collision further down the ladder.
    """
    rng = np.random.default_rng(seed)
    mismatches = 0
    for _ in range(n_slots):
        K = int(rng.integers(1, max_levels + 1))
        rate = float(rng.choice([0.5, 1.0, 2.0]))
        ladder = design_ii_levels(rate, K).levels
        n_tx = int(rng.integers(0, 11))
        chosen = rng.integers(0, K, size=n_tx)
        decoded = sim.decode_sic([(int(k), ladder[k]) for k in chosen], sic_threshold(rate))
        expect = set(range(n_tx)) if sim.distinct_levels_rule(chosen.tolist()) else set()
        mismatches += decoded != expect
    return Check("physical-equivalence", mismatches == 0, float(mismatches), 0.0, f"K<={max_levels}")


def check_monte_carlo(frames: int = 20_000, seed: int = 1) -> Check:
    worst = 0.0
    levels = design_ii_levels(1.0, 2)
    for M in (5, 10, 15):
        for P_dB in (0.0, 30.0):
            params = SystemParams(M, 2, 8, 6.0, 1.0, db_to_linear(P_dB), NomaAdaptive())
            ref = average_aoi(kernel.build_matrix(kernel.NOMA_EXACT, params, levels), 8, 6.0).average_aoi
            est = sim.simulate_frames(params, levels, sim.NOMA, frames, seed)
            worst = max(worst, abs(est.mean_aoi - ref) / est.stderr_aoi)
    return Check("monte-carlo-agreement", worst <= 3.0, worst, 3.0, "sigmas")


def validate(oracle_grid=ORACLE_GRID, frames: int = 20_000, seed: int = 1,
             perturb: float = 0.0, monte_carlo: bool = True) -> Report:
    report = Report()
    report.checks.append(check_table1())
    report.checks.append(check_oracle(oracle_grid))
    report.checks.append(check_conservation(perturb=perturb))
    report.checks.extend(check_corollary())
    report.checks.append(check_remark1())
    report.checks.append(check_physical_rule(n_slots=20_000))
    if monte_carlo:
        report.checks.append(check_monte_carlo(frames, seed))
    return report
