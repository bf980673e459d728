"""Three-qubit pure states: partial tangles, reduced-state steering, and the
relations tying them to the teleportation fidelity of each qubit pair.

Pairs are labelled by strings ``"12"``, ``"13"``, ``"23"`` with qubit 1 the
leftmost tensor factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlations import concurrence, steering_observable, tangle_one_to_rest
from .qmat import ket_to_density, partial_trace
from .states import ThreeQubitPure

PAIRS = ("12", "13", "23")
RADICAND_TOL = 1e-10


class NumericalInconsistencyError(ArithmeticError):
    """A quantity that must be non-negative came out clearly negative."""


def check_pair(pair: str) -> str:
    pair = str(pair)
    if pair not in PAIRS:
        raise ValueError(f"pair label must be one of {PAIRS}, got {pair!r}")
    return pair


def _third(pair: str) -> str:
    return ({"1", "2", "3"} - set(pair)).pop()


def _label(i: str, j: str) -> str:
    return "".join(sorted(i + j))


def _root(radicand, what: str):
    r = np.asarray(radicand, dtype=float)
    if np.any(r < -RADICAND_TOL):
        raise NumericalInconsistencyError(f"{what}: radicand {float(np.min(r)):.3g} is negative")
    out = np.sqrt(np.clip(r, 0.0, None))
    return float(out) if out.ndim == 0 else out


def partial_tangles_closed(t: ThreeQubitPure) -> dict[str, float]:
    a0, a1, a2, a3, a4 = t.alphas
    cross = a1 * a2 * a3 * a4 * math.cos(t.theta)
    return {
        "12": 2 * a0 * math.sqrt(a3**2 + a4**2),
        "13": 2 * a0 * math.sqrt(a2**2 + a4**2),
        "23": 2 * _root(a0**2 * a4**2 + a1**2 * a4**2 + a2**2 * a3**2 - 2 * cross, "tau_23"),
    }


def reduced_pair_state(psi, pair: str) -> np.ndarray:
    pair = check_pair(pair)
    keep = [int(pair[0]) - 1, int(pair[1]) - 1]
    return partial_trace(ket_to_density(psi), keep, [2, 2, 2])


def partial_tangle_oracle(psi, pair: str):
    """tau_ij = sqrt(C_{i(jk)}^2 - C_ik^2) from reduced states alone.

    Accepts a single state vector or a stack ``(..., 8)``.
    """
    pair = check_pair(pair)
    psi = np.asarray(psi, dtype=complex)
    i, k = pair[0], _third(pair)
    one_rest = np.asarray(tangle_one_to_rest(psi, int(i)))
    c_ik = np.asarray(concurrence(reduced_pair_state(psi, _label(i, k))))
    return _root(one_rest**2 - c_ik**2, f"tau_{pair}")


def reduced_steering_closed(t: ThreeQubitPure) -> dict[str, float]:
    a0, a1, a2, a3, a4 = t.alphas
    cross = a1 * a2 * a3 * a4 * math.cos(t.theta)
    s12 = 1 + 8 * a0**2 * a3**2 - 4 * a0**2 * a2**2 - 4 * a1**2 * a4**2 - 4 * a2**2 * a3**2 + 8 * cross
    s13 = 1 + 8 * a0**2 * a2**2 - 4 * a0**2 * a3**2 - 4 * a1**2 * a4**2 - 4 * a2**2 * a3**2 + 8 * cross
    s23 = 1 - 4 * a0**2 * a2**2 - 4 * a0**2 * a3**2 + 8 * a1**2 * a4**2 + 8 * a2**2 * a3**2 - 16 * cross
    return {"12": _root(s12, "S_12"), "13": _root(s13, "S_13"), "23": _root(s23, "S_23")}


def reduced_steering_general(psi) -> dict[str, float]:
    return {p: steering_observable(reduced_pair_state(psi, p)) for p in PAIRS}


def fidelity_from_tangle(tau: float) -> float:
    tau = float(tau)
    if not -RADICAND_TOL <= tau <= 1.0 + RADICAND_TOL:
        raise ValueError(f"partial tangle {tau} outside [0, 1]")
    return (tau + 2) / 3


@dataclass(frozen=True)
class TripartiteProfile:
    S: dict[str, float]
    tau: dict[str, float]
    f: dict[str, float]


def tripartite_profile(t: ThreeQubitPure) -> TripartiteProfile:
    tau = partial_tangles_closed(t)
    return TripartiteProfile(
        S=reduced_steering_closed(t),
        tau=tau,
        f={p: fidelity_from_tangle(v) for p, v in tau.items()},
    )


@dataclass(frozen=True)
class OrderingVerdict:
    f_order: tuple[str, ...]
    s_order: tuple[str, ...]
    consistent: bool


def _sign(x: float, tol: float) -> int:
    return 0 if abs(x) <= tol else (1 if x > 0 else -1)


def check_ordering(t: ThreeQubitPure, tol: float = 1e-10) -> OrderingVerdict:
    """Compare the ordering of pair fidelities with that of pair steering values.

    Differences within ``tol`` count as ties, and a tie on one side must be a
    tie on the other.
    """
    prof = tripartite_profile(t)
    f_order = tuple(sorted(PAIRS, key=lambda p: -prof.f[p]))
    s_order = tuple(sorted(PAIRS, key=lambda p: -prof.S[p]))
    consistent = all(
        _sign(prof.f[p] - prof.f[q], tol) == _sign(prof.S[p] - prof.S[q], tol)
        for n, p in enumerate(PAIRS)
        for q in PAIRS[n + 1 :]
    )
    return OrderingVerdict(f_order, s_order, consistent)


def ordering_disagreement(t: ThreeQubitPure) -> float:
    """max over label pairs of -(dS * df); positive only if some ordering flips."""
    prof = tripartite_profile(t)
    return max(
        -(prof.S[p] - prof.S[q]) * (prof.f[p] - prof.f[q])
        for n, p in enumerate(PAIRS)
        for q in PAIRS[n + 1 :]
    )


def complementarity_two_steering(t: ThreeQubitPure, jk: str) -> float:
    """S^2(rho_ij) + S^2(rho_ik) + [3 f(rho_jk) - 2]^2; never exceeds 3."""
    jk = check_pair(jk)
    i = _third(jk)
    prof = tripartite_profile(t)
    return (
        prof.S[_label(i, jk[0])] ** 2
        + prof.S[_label(i, jk[1])] ** 2
        + (3 * prof.f[jk] - 2) ** 2
    )


def complementarity_one_steering(t: ThreeQubitPure, ij: str) -> float:
    """S^2(rho_ij) + [3 f(rho_ik) - 2]^2 + [3 f(rho_jk) - 2]^2; never exceeds 3."""
    ij = check_pair(ij)
    k = _third(ij)
    prof = tripartite_profile(t)
    return (
        prof.S[ij] ** 2
        + (3 * prof.f[_label(ij[0], k)] - 2) ** 2
        + (3 * prof.f[_label(ij[1], k)] - 2) ** 2
    )


def complementarity_sums(t: ThreeQubitPure) -> dict[str, float]:
    """All six sums, keyed ``two_steering:<jk>`` and ``one_steering:<ij>``."""
    out = {f"two_steering:{p}": complementarity_two_steering(t, p) for p in PAIRS}
    out.update({f"one_steering:{p}": complementarity_one_steering(t, p) for p in PAIRS})
    return out


def two_steering_expansion(t: ThreeQubitPure) -> float:
    """Closed expansion of S^2_12 + S^2_13 + tau^2_23 in the canonical amplitudes.

    Every subtracted term is non-negative, which is why the sum is at most 3.
    """
    a0, a1, a2, a3, a4 = t.alphas
    return (
        3
        - (2 * a0**2 - 1) ** 2
        - 4 * a0**2 * a1**2
        - 4 * (a1 * a4 - a2 * a3) ** 2
        - 8 * a1 * a2 * a3 * a4 * (1 - math.cos(t.theta))
    )


def one_steering_expansion(t: ThreeQubitPure) -> float:
    """Closed expansion of S^2_12 + tau^2_13 + tau^2_23."""
    a0, a1, a2, _, _ = t.alphas
    return 3 - 8 * (a0**2 - 0.5) ** 2 - 8 * a0**2 * a1**2 - 8 * a0**2 * a2**2


# -- array forms for campaigns ----------------------------------------------------


def profile_arrays(alphas, theta) -> tuple[dict, dict, dict]:
    """Vectorised (S, tau, f) over stacks ``alphas (n, 5)``, ``theta (n,)``.

    Same formulas as :func:`tripartite_profile`, returned as dicts of arrays.
    """
    al = np.asarray(alphas, dtype=float)
    a0, a1, a2, a3, a4 = (al[..., k] for k in range(5))
    cross = a1 * a2 * a3 * a4 * np.cos(np.asarray(theta, dtype=float))
    tau = {
        "12": 2 * a0 * np.sqrt(a3**2 + a4**2),
        "13": 2 * a0 * np.sqrt(a2**2 + a4**2),
        "23": 2 * _root(a0**2 * a4**2 + a1**2 * a4**2 + a2**2 * a3**2 - 2 * cross, "tau_23"),
    }
    s = {
        "12": _root(1 + 8 * a0**2 * a3**2 - 4 * a0**2 * a2**2 - 4 * a1**2 * a4**2
                    - 4 * a2**2 * a3**2 + 8 * cross, "S_12"),
        "13": _root(1 + 8 * a0**2 * a2**2 - 4 * a0**2 * a3**2 - 4 * a1**2 * a4**2
                    - 4 * a2**2 * a3**2 + 8 * cross, "S_13"),
        "23": _root(1 - 4 * a0**2 * a2**2 - 4 * a0**2 * a3**2 + 8 * a1**2 * a4**2
                    + 8 * a2**2 * a3**2 - 16 * cross, "S_23"),
    }
    f = {p: (v + 2) / 3 for p, v in tau.items()}
    return s, tau, f


def ordering_arrays(s: dict, f: dict, tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """(consistent, disagreement) per sample, with the tie rule of :func:`check_ordering`."""
    consistent = None
    worst = None
    for n, p in enumerate(PAIRS):
        for q in PAIRS[n + 1 :]:
            df, ds = f[p] - f[q], s[p] - s[q]
            sf = np.where(np.abs(df) <= tol, 0, np.sign(df))
            ss = np.where(np.abs(ds) <= tol, 0, np.sign(ds))
            ok = sf == ss
            dis = -(ds * df)
            consistent = ok if consistent is None else consistent & ok
            worst = dis if worst is None else np.maximum(worst, dis)
    return consistent, worst


def complementarity_arrays(s: dict, f: dict) -> dict[str, np.ndarray]:
    """The six sums of :func:`complementarity_sums` as arrays."""
    t = {p: 3 * v - 2 for p, v in f.items()}
    out = {}
    for jk in PAIRS:
        i = _third(jk)
        out[f"two_steering:{jk}"] = s[_label(i, jk[0])] ** 2 + s[_label(i, jk[1])] ** 2 + t[jk] ** 2
    for ij in PAIRS:
        k = _third(ij)
        out[f"one_steering:{ij}"] = s[ij] ** 2 + t[_label(ij[0], k)] ** 2 + t[_label(ij[1], k)] ** 2
    return out
