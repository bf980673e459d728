"""Randomized verification campaigns and parameter sweeps.

A campaign draws sample ``i`` from ``RandomSource(seed, i)`` so the result of
each sample depends on nothing but its index.  Samples are evaluated in
fixed-size index blocks; blocks may be farmed out to worker processes, and
the reduction (counts, max, first indices) is the same either way, so the
report is bit-identical for any worker count.
"""

from __future__ import annotations

import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .correlations import (
    concurrence,
    concurrence_x_closed,
    correlation_eigvals,
    fully_entangled_fraction,
    fully_entangled_fraction_x,
    is_steerable_3setting,
    STEERING_TOL,
    n_value,
    steering_observable,
    x_steering_observable,
)
from .statefile import state_to_dict
from .states import (
    RandomSource,
    mems_rank2,
    mems_rank3,
    pure_schmidt_state,
    random_density,
    random_three_qubit,
    random_x_batch,
    random_x_state,
    saturating_family,
    three_qubit_state,
    x_state,
)
from .teleport import (
    SQRT3,
    avg_fidelity_standard,
    fidelity_bounds_concurrence,
    fidelity_upper_bound_steering,
    optimal_strategy,
    restricted_strategy_x,
    simulate_teleportation,
    x_restricted_fidelity,
)
from .tripartite import (
    PAIRS,
    complementarity_arrays,
    ordering_arrays,
    partial_tangle_oracle,
    profile_arrays,
    reduced_pair_state,
)

THEOREMS = ("T1", "T2", "T3", "T4", "T5", "XCROSS", "ORACLE13", "ORACLE15", "MC_EQ3", "MC_EQ10")
DEFAULT_TOL = {
    "T1": 1e-12,
    "T2": 0.0,
    "T3": 1e-10,
    "T4": 1e-10,
    "T5": 1e-10,
    "XCROSS": 1e-10,
    "ORACLE13": 1e-8,
    "ORACLE15": 1e-10,
    "MC_EQ3": 1e-12,
    "MC_EQ10": 1e-12,
}
MAX_COUNTEREXAMPLES = 10
BLOCK = 4096
MC_BLOCK = 8
DEFAULT_MC_INPUTS = 10_000
# stream 0 draws states, stream 1 draws teleportation inputs
STATE_STREAM = 0
INPUT_STREAM = 1


@dataclass
class CampaignReport:
    theorem_id: str
    samples: int
    violations: int
    worst_margin: float
    counterexamples: list[dict]
    seed: int
    tolerance: float
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "samples": self.samples,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "counterexamples": self.counterexamples,
            "seed": self.seed,
            "tolerance": self.tolerance,
            **self.details,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


# -- samplers -------------------------------------------------------------------


def _rank(i: int) -> int:
    return 1 + i % 4


def _draw(theorem: str, seed: int, i: int):
    src = RandomSource(seed, i, STATE_STREAM)
    if theorem in ("T1", "MC_EQ3"):
        return random_density(_rank(i), src)
    if theorem in ("T2", "XCROSS", "MC_EQ10"):
        return random_x_state(src)
    return random_three_qubit(src)


# -- per-block evaluators ---------------------------------------------------------
# each takes (seed, idx, tol, mc_inputs) and returns (excess, violated, accepted, flagged);
# excess is lhs - rhs of the predicate written as lhs <= rhs, so positive is bad.
# accepted is None unless the campaign filters draws; flagged marks draws
# failing a reported side check that does not count as a violation.


def _violated(excess: np.ndarray, tol: float, strict: bool) -> np.ndarray:
    # strict predicates (lhs < rhs) fail on equality as well
    return excess >= tol if strict else excess > tol


def _draws(theorem: str, seed: int, idx) -> list:
    return [_draw(theorem, seed, int(i)) for i in idx]


def _eval_t1(seed, idx, tol, mc_inputs):
    rho = np.array(_draws("T1", seed, idx))
    s = np.asarray(steering_observable(rho))
    n = np.asarray(n_value(rho))
    f = 0.5 * (1 + n / 3)
    excess = np.maximum(n - SQRT3 * s, f - 0.5 * (1 + s / SQRT3))
    return excess, _violated(excess, tol, False), None, None


def _eval_t2(seed, idx, tol, mc_inputs):
    a, b, c, d, w, z = random_x_batch(seed, idx, STATE_STREAM)
    w, z = np.abs(w), np.abs(z)
    s = np.sqrt(4 * (w + z) ** 2 + 4 * (w - z) ** 2 + (a + d - b - c) ** 2)
    accepted = s > 1.0 + STEERING_TOL
    chi0, chi1 = (a + d + 2 * w) / 2, (b + c + 2 * z) / 2
    f_ent = np.maximum.reduce([chi0, chi1, (a + d - 2 * w) / 2, (b + c - 2 * z) / 2])
    # every draw: chi0 > 1/2 and chi1 > 1/2 never together
    ex_mutual = np.minimum(chi0, chi1) - 0.5
    bad = ex_mutual > tol
    # accepted draws: F > 1/2 and 2(|w|^2 + |z|^2) > (a+d)(b+c), both strict
    ex_f = 0.5 - f_ent
    ex_proof = (a + d) * (b + c) - 2 * (w**2 + z**2)
    bad |= accepted & (_violated(ex_f, tol, True) | _violated(ex_proof, tol, True))
    excess = np.where(accepted, np.maximum.reduce([ex_mutual, ex_f, ex_proof]), ex_mutual)
    # the same inequality without the factor 2 is not implied by S > 1; count how often it fails
    flagged = accepted & ((a + d) * (b + c) >= w**2 + z**2)
    return excess, bad, accepted, flagged


def _three_arrays(samples):
    alphas = np.array([t.alphas for t in samples])
    theta = np.array([t.theta for t in samples])
    return profile_arrays(alphas, theta)


def _eval_t3(seed, idx, tol, mc_inputs):
    s, _, f = _three_arrays(_draws("T3", seed, idx))
    consistent, disagreement = ordering_arrays(s, f, tol)
    return disagreement, ~consistent, None, None


def _eval_complementarity(prefix: str):
    def run(seed, idx, tol, mc_inputs):
        s, _, f = _three_arrays(_draws("T4", seed, idx))
        sums = complementarity_arrays(s, f)
        excess = np.max([v for k, v in sums.items() if k.startswith(prefix)], axis=0) - 3.0
        return excess, _violated(excess, tol, False), None, None

    return run


def _eval_xcross(seed, idx, tol, mc_inputs):
    samples = _draws("XCROSS", seed, idx)
    rho = np.array([x_state(x) for x in samples])
    a, b, c, d = (np.array([getattr(x, k) for x in samples]) for k in "abcd")
    w = np.abs(np.array([complex(x.w) for x in samples]))
    z = np.abs(np.array([complex(x.z) for x in samples]))
    u_closed = np.sort(np.stack([4 * (w + z) ** 2, 4 * (w - z) ** 2, (a + d - b - c) ** 2], axis=1), axis=1)
    c_closed = np.array([concurrence_x_closed(x) for x in samples])
    f_closed = np.array([fully_entangled_fraction_x(x)[0] for x in samples])
    s_closed = np.array([x_steering_observable(x) for x in samples])
    excess = np.maximum.reduce([
        np.abs(np.asarray(steering_observable(rho)) - s_closed),
        np.max(np.abs(correlation_eigvals(rho) - u_closed), axis=1),
        np.abs(np.asarray(concurrence(rho)) - c_closed),
        np.abs(np.asarray(fully_entangled_fraction(rho)) - f_closed),
    ])
    return excess, _violated(excess, tol, False), None, None


def _eval_oracle13(seed, idx, tol, mc_inputs):
    samples = _draws("ORACLE13", seed, idx)
    _, tau, _ = _three_arrays(samples)
    psi = np.array([three_qubit_state(t) for t in samples])
    excess = np.max([np.abs(partial_tangle_oracle(psi, p) - tau[p]) for p in PAIRS], axis=0)
    return excess, _violated(excess, tol, False), None, None


def _eval_oracle15(seed, idx, tol, mc_inputs):
    samples = _draws("ORACLE15", seed, idx)
    s, _, _ = _three_arrays(samples)
    psi = np.array([three_qubit_state(t) for t in samples])
    excess = np.max(
        [np.abs(np.asarray(steering_observable(reduced_pair_state(psi, p))) - s[p]) for p in PAIRS], axis=0
    )
    return excess, _violated(excess, tol, False), None, None


def _mc_excess(rho, strategy, reference, seed, i, mc_inputs):
    est = simulate_teleportation(rho, strategy, mc_inputs, RandomSource(seed, i, INPUT_STREAM))
    # positive once the estimate sits outside the 3-sigma window
    return abs(est.mean - reference) - 3 * est.std_error


def _eval_mc_eq3(seed, idx, tol, mc_inputs):
    excess = np.array([
        _mc_excess(rho, optimal_strategy(rho), avg_fidelity_standard(rho), seed, int(i), mc_inputs)
        for rho, i in zip(_draws("MC_EQ3", seed, idx), idx)
    ])
    return excess, _violated(excess, tol, False), None, None


def _eval_mc_eq10(seed, idx, tol, mc_inputs):
    excess = np.array([
        _mc_excess(x_state(x), restricted_strategy_x(x), x_restricted_fidelity(x), seed, int(i), mc_inputs)
        for x, i in zip(_draws("MC_EQ10", seed, idx), idx)
    ])
    return excess, _violated(excess, tol, False), None, None


_EVALUATORS: dict[str, Callable] = {
    "T1": _eval_t1,
    "T2": _eval_t2,
    "T3": _eval_t3,
    "T4": _eval_complementarity("two_steering"),
    "T5": _eval_complementarity("one_steering"),
    "XCROSS": _eval_xcross,
    "ORACLE13": _eval_oracle13,
    "ORACLE15": _eval_oracle15,
    "MC_EQ3": _eval_mc_eq3,
    "MC_EQ10": _eval_mc_eq10,
}


def _run_block(task):
    theorem, seed, tol, start, stop, mc_inputs = task
    idx = np.arange(start, stop)
    excess, bad, accepted, flagged = _EVALUATORS[theorem](seed, idx, tol, mc_inputs)
    if accepted is None:
        accepted = np.ones(len(idx), dtype=bool)
    if flagged is None:
        flagged = np.zeros(len(idx), dtype=bool)
    return np.asarray(excess, dtype=float), np.asarray(bad, dtype=bool), accepted, flagged


def resolve_workers(workers: int | None) -> int:
    """Explicit count, else the STEERPORT_THREADS hint, else 1."""
    if workers is None:
        hint = os.environ.get("STEERPORT_THREADS", "").strip()
        workers = int(hint) if hint.isdigit() and int(hint) > 0 else 1
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    return workers


def run_campaign(
    theorem_id: str,
    n: int,
    seed: int,
    tol: float | None = None,
    workers: int | None = None,
    mc_inputs: int = DEFAULT_MC_INPUTS,
) -> CampaignReport:
    """Run one verification campaign over ``n`` samples.

    For T2 ``n`` counts draws with S > 1; draws are consumed in index order
    until that many are collected, and the rejection count is reported.  The
    exclusivity check on chi0, chi1 runs over every draw, accepted or not.
    """
    if theorem_id not in THEOREMS:
        raise ValueError(f"unknown theorem_id {theorem_id!r}; expected one of {THEOREMS}")
    n = int(n)
    if n < 1:
        raise ValueError(f"run_campaign: n must be >= 1, got {n}")
    if mc_inputs < 2:
        raise ValueError("run_campaign: mc_inputs must be >= 2")
    seed = int(seed)
    tol = DEFAULT_TOL[theorem_id] if tol is None else float(tol)
    if not tol >= 0:
        raise ValueError(f"run_campaign: tol must be >= 0, got {tol}")
    workers = resolve_workers(workers)
    block = MC_BLOCK if theorem_id.startswith("MC_") else BLOCK
    filtered = theorem_id == "T2"

    def tasks(first: int, count: int):
        return [(theorem_id, seed, tol, s, s + block, mc_inputs) for s in range(first, first + count * block, block)]

    excess, bad, accepted, flagged = [], [], [], []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        pos = 0
        while True:
            if filtered:
                remaining = n - int(sum(a.sum() for a in accepted))
                if remaining <= 0:
                    break
                count = workers
            else:
                if pos >= n:
                    break
                count = -(-(n - pos) // block)
            batch = tasks(pos, count)
            if not filtered:
                last = batch[-1]
                batch[-1] = last[:4] + (min(last[4], n),) + last[5:]
            results = pool.map(_run_block, batch) if pool else map(_run_block, batch)
            for e, b, a, g in results:
                excess.append(e)
                bad.append(b)
                accepted.append(a)
                flagged.append(g)
            pos = batch[-1][4]
    finally:
        if pool:
            pool.shutdown()

    excess = np.concatenate(excess)
    bad = np.concatenate(bad)
    accepted = np.concatenate(accepted)
    flagged = np.concatenate(flagged)
    details = {}
    if filtered:
        draws = int(np.searchsorted(np.cumsum(accepted), n) + 1)
        excess, bad = excess[:draws], bad[:draws]
        details = {
            "draws": draws,
            "rejections": draws - n,
            "factorless_inequality_failures": int(flagged[:draws].sum()),
        }
    elif theorem_id.startswith("MC_"):
        details = {"mc_inputs": int(mc_inputs)}

    where = np.flatnonzero(bad)
    counterexamples = []
    for i in where[:MAX_COUNTEREXAMPLES]:
        i = int(i)
        counterexamples.append(
            {"index": i, "excess": float(excess[i]), "state": state_to_dict(_draw(theorem_id, seed, i))}
        )
    return CampaignReport(
        theorem_id=theorem_id,
        samples=n,
        violations=int(where.size),
        worst_margin=float(np.max(excess)),
        counterexamples=counterexamples,
        seed=seed,
        tolerance=tol,
        details=details,
    )


# -- sweeps --------------------------------------------------------------------


@dataclass
class SweepTable:
    parameter: str
    columns: dict[str, np.ndarray]

    def __post_init__(self):
        if self.parameter not in self.columns:
            raise ValueError(f"SweepTable: parameter column {self.parameter!r} missing")
        cols = {k: np.asarray(v) for k, v in self.columns.items()}
        lengths = {len(v) for v in cols.values()}
        if len(lengths) != 1:
            raise ValueError("SweepTable: columns differ in length")
        for k, v in cols.items():
            if not np.all(np.isfinite(v.astype(float))):
                raise ValueError(f"SweepTable: column {k!r} has non-finite entries")
        if np.any(np.diff(cols[self.parameter]) <= 0):
            raise ValueError("SweepTable: grid must be strictly increasing")
        self.columns = cols

    @property
    def grid(self) -> np.ndarray:
        return self.columns[self.parameter]

    def __len__(self) -> int:
        return len(self.grid)

    def row(self, k: int) -> dict:
        return {name: v[k].item() for name, v in self.columns.items()}

    def to_csv(self) -> str:
        """Header line plus one row per grid point; floats with 9 decimals."""
        out = io.StringIO()
        names = list(self.columns)
        out.write(",".join(names) + "\n")
        for k in range(len(self)):
            cells = []
            for name in names:
                v = self.columns[name][k]
                cells.append(str(int(v)) if self.columns[name].dtype == bool else f"{float(v):.9f}")
            out.write(",".join(cells) + "\n")
        return out.getvalue()


def _check_grid(grid, lo: float, hi: float, closed: bool, what: str) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise ValueError(f"{what}: grid must be a non-empty 1-d sequence")
    inside = (g >= lo) & (g <= hi) if closed else (g > lo) & (g < hi)
    if not np.all(inside):
        raise ValueError(f"{what}: grid values outside the allowed range")
    return g


def mems_family(rank: int) -> Callable[[float], np.ndarray]:
    if rank not in (2, 3):
        raise ValueError(f"mems rank must be 2 or 3, got {rank}")
    return mems_rank2 if rank == 2 else mems_rank3


def sweep_mems(rank: int, p_grid) -> SweepTable:
    family = mems_family(rank)
    p = _check_grid(p_grid, 0.0, 1.0, True, "sweep_mems")
    rho = np.array([family(v) for v in p])
    s = np.asarray(steering_observable(rho))
    c = np.asarray(concurrence(rho))
    bounds = [fidelity_bounds_concurrence(v) for v in c]
    return SweepTable("p", {
        "p": p,
        "S": s,
        "C": c,
        "steerable": np.asarray(is_steerable_3setting(rho)),
        "steering_bound": np.array([fidelity_upper_bound_steering(v) for v in s]),
        "concurrence_upper": np.array([b[1] for b in bounds]),
        "concurrence_lower": np.array([b[0] for b in bounds]),
        "f_standard": np.asarray(avg_fidelity_standard(rho)),
    })


def steerability_threshold(rank: int) -> float:
    """Root of S(p) = 1 along a MEMS family, located with Brent's method."""
    family = mems_family(rank)
    return float(brentq(lambda p: steering_observable(family(p)) - 1.0, 0.0, 1.0, xtol=1e-14))


SATURATED_SUMS = ("two_steering:23", "two_steering:12", "one_steering:13")


def sweep_saturating_family(q_grid) -> SweepTable:
    q = _check_grid(q_grid, 0.0, math.sqrt(0.5), False, "sweep_saturating_family")
    fams = [saturating_family(v) for v in q]
    s, _, f = profile_arrays(np.array([t.alphas for t in fams]), np.array([t.theta for t in fams]))
    cols = {"q": q}
    cols.update({f"S{p}": s[p] for p in PAIRS})
    cols.update({f"f{p}": f[p] for p in PAIRS})
    cols.update(complementarity_arrays(s, f))
    return SweepTable("q", cols)


def pure_state_counter_case(c: float = 0.5) -> tuple[float, float]:
    """(steering bound, concurrence upper bound) for a pure state of concurrence ``c``.

    For pure states the steering bound exceeds (2+C)/3 whenever 0 < C < 1,
    so neither bound dominates the other in general.
    """
    rho = pure_schmidt_state(c)
    return fidelity_upper_bound_steering(steering_observable(rho)), fidelity_bounds_concurrence(c)[1]


__all__ = [
    "THEOREMS",
    "DEFAULT_TOL",
    "CampaignReport",
    "SweepTable",
    "run_campaign",
    "sweep_mems",
    "sweep_saturating_family",
    "steerability_threshold",
    "pure_state_counter_case",
    "SATURATED_SUMS",
]
