"""Teleportation fidelities, bounds, and a Monte Carlo simulator of the protocol.

Protocol conventions.  Qubit 0 carries the unknown input, qubits 1 (Alice) and
2 (Bob) hold the shared resource.  Alice optionally applies a fixed unitary
to her resource qubit (equivalently, measures in a rotated Bell basis) and
projects qubits 0, 1 onto ``BELL_BASIS[k] = (I ⊗ sigma_k)|psi->``.  Bob then
applies ``strategy.unitaries[k]``.  With the singlet as resource the
textbook corrections are the Paulis themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from .correlations import (
    correlation_matrix,
    fully_entangled_fraction_x,
    n_value,
)
from .qmat import I2, PAULI_BASIS, PAULIS, dagger, kron
from .states import PSI_MINUS, RandomSource, XStateParams, haar_vectors, x_state

CLASSICAL_LIMIT = 2 / 3
USEFUL_TOL = 1e-12
UNITARY_TOL = 1e-12
SQRT3 = math.sqrt(3.0)

BELL_BASIS = np.array([kron(I2, s) @ PSI_MINUS for s in PAULI_BASIS])
# amplitude tables: _BELL_AMPS[k, x, a] = <x a|B_k>
_BELL_AMPS = BELL_BASIS.reshape(4, 2, 2)

# six Pauli eigenstates: a 2-design, so averages of Tr(Lambda(phi) phi) over them are exact
_DESIGN = np.array(
    [np.linalg.eigh(p)[1][:, i] for p in PAULIS for i in range(2)], dtype=complex
)


def _check_unitary(u: np.ndarray, what: str) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError(f"{what}: expected a 2x2 matrix, got {u.shape}")
    err = float(np.max(np.abs(u @ dagger(u) - I2)))
    if err > UNITARY_TOL:
        raise ValueError(f"{what}: not unitary (max |U U^dag - I| = {err:.3g})")
    return u


@dataclass(frozen=True)
class CorrectionStrategy:
    """Bob's correction for each Bell outcome, plus Alice's fixed pre-rotation."""

    unitaries: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]
    alice_rotation: np.ndarray = field(default_factory=lambda: I2.copy())
    name: str = "custom"

    def __post_init__(self):
        if len(self.unitaries) != 4:
            raise ValueError("CorrectionStrategy needs exactly four unitaries")
        us = tuple(_check_unitary(u, f"correction[{k}]") for k, u in enumerate(self.unitaries))
        object.__setattr__(self, "unitaries", us)
        object.__setattr__(self, "alice_rotation", _check_unitary(self.alice_rotation, "alice_rotation"))

    def pauli_labels(self) -> list[str | None]:
        """Name each correction if it is a Pauli up to global phase, else None."""
        names = "IXYZ"
        out = []
        for u in self.unitaries:
            label = None
            for name, p in zip(names, PAULI_BASIS):
                if abs(abs(np.trace(dagger(p) @ u)) - 2.0) < 1e-9:
                    label = name
                    break
            out.append(label)
        return out


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    samples: int

    def __post_init__(self):
        if self.samples < 1 or self.std_error < 0:
            raise ValueError("McEstimate needs samples >= 1 and std_error >= 0")

    def agrees_with(self, reference: float, sigmas: float = 3.0, floor: float = 1e-12) -> bool:
        # floor covers round-off when every input gives the same fidelity (std_error == 0)
        return abs(self.mean - reference) <= sigmas * self.std_error + floor


# -- closed forms -------------------------------------------------------------


def avg_fidelity_standard(rho):
    """(1 + N/3)/2, the optimal standard-scheme fidelity when det R <= 0."""
    return 0.5 * (1.0 + n_value(rho) / 3.0)


def is_useful_standard(rho) -> bool:
    return bool(avg_fidelity_standard(rho) > CLASSICAL_LIMIT + USEFUL_TOL)


def unitary_optimal_fidelity(rho) -> float:
    """Best average fidelity any choice of local unitaries can reach.

    Equals (1 + (s1 + s2 - sign(det R) s3)/3)/2 for singular values
    s1 >= s2 >= s3 of R; this coincides with ``avg_fidelity_standard`` when
    det R <= 0 and falls short of it by s3/3 otherwise.
    """
    r = correlation_matrix(rho)
    s = np.linalg.svd(r, compute_uv=False)
    sign = -1.0 if np.linalg.det(r) > 0 else 1.0
    return 0.5 * (1.0 + (s[0] + s[1] + sign * s[2]) / 3.0)


def fidelity_upper_bound_steering(s: float) -> float:
    s = float(s)
    if not -USEFUL_TOL <= s <= SQRT3 + USEFUL_TOL:
        raise ValueError(f"steering observable {s} outside [0, sqrt(3)]")
    return 0.5 * (1.0 + s / SQRT3)


def fidelity_bounds_concurrence(c: float) -> tuple[float, float]:
    """Tight (lower, upper) fidelity bounds at fixed concurrence."""
    c = float(c)
    if not -USEFUL_TOL <= c <= 1.0 + USEFUL_TOL:
        raise ValueError(f"concurrence {c} outside [0, 1]")
    lower = (2 * max(c, (1 + c) / 4) + 1) / 3
    upper = (2 + c) / 3
    return lower, upper


def x_restricted_fidelity(x: XStateParams) -> float:
    f_ent = fully_entangled_fraction_x(x)[0]
    return (2 * f_ent + 1) / 3


def x_restricted_useful(x: XStateParams) -> bool:
    return fully_entangled_fraction_x(x)[0] > 0.5


# -- protocol simulation ----------------------------------------------------------


def _bob_unnormalized(rho: np.ndarray, alice_rotation: np.ndarray, kets: np.ndarray) -> np.ndarray:
    """Bob's unnormalized post-measurement states, shape (n, 4, 2, 2).

    Entry k is Tr_01[(|B_k><B_k| ⊗ I)(|phi><phi| ⊗ rho)]; its trace is p_k.
    """
    ua = kron(alice_rotation, I2)
    r = (ua @ rho @ dagger(ua)).reshape(2, 2, 2, 2)  # [a, b, a', b']
    # alpha[n, k, a] = sum_x conj(B_k[x, a]) phi[n, x]
    alpha = np.einsum("kxa,nx->nka", np.conj(_BELL_AMPS), kets)
    return np.einsum("nka,abcd,nkc->nkbd", alpha, r, np.conj(alpha))


def _per_input_fidelity(rho, strategy: CorrectionStrategy, kets: np.ndarray) -> np.ndarray:
    sub = _bob_unnormalized(rho, strategy.alice_rotation, kets)
    us = np.array(strategy.unitaries)
    corrected = us[None] @ sub @ dagger(us)[None]
    # sum_k p_k Tr(rho_k phi) = sum_k <phi| U_k rho~_k U_k^dag |phi>; p_k = 0 terms vanish
    return np.einsum("nx,nkxy,ny->n", np.conj(kets), corrected, kets).real


def simulate_teleportation(
    rho, strategy: CorrectionStrategy, n: int, rng: RandomSource, chunk: int = 50_000
) -> McEstimate:
    """Monte Carlo estimate of the input-averaged teleportation fidelity.

    Inputs are Haar-random pure states; the Bell outcome is not sampled but
    summed over with its exact probability.
    """
    if n < 1:
        raise ValueError("simulate_teleportation: n must be >= 1")
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("simulate_teleportation: resource must be a 4x4 density matrix")
    kets = haar_vectors(rng.generator(), n, 2)
    vals = np.concatenate(
        [_per_input_fidelity(rho, strategy, kets[i : i + chunk]) for i in range(0, n, chunk)]
    )
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return McEstimate(mean, se, n)


def exact_average_fidelity(rho, strategy: CorrectionStrategy) -> float:
    """Input-averaged fidelity evaluated exactly on a spherical 2-design."""
    return float(_per_input_fidelity(np.asarray(rho, dtype=complex), strategy, _DESIGN).mean())


# -- strategies ---------------------------------------------------------------


def standard_strategy() -> CorrectionStrategy:
    """Textbook corrections: outcome k is undone by sigma_k."""
    return CorrectionStrategy(tuple(p.copy() for p in PAULI_BASIS), name="standard")


def rotation_to_unitary(o: np.ndarray) -> np.ndarray:
    """SU(2) element U with U sigma_j U^dag = sum_i o[i, j] sigma_i."""
    x, y, z, w = Rotation.from_matrix(np.asarray(o, dtype=float)).as_quat()
    return w * I2 - 1j * (x * PAULIS[0] + y * PAULIS[1] + z * PAULIS[2])


def _best_rotation(m: np.ndarray) -> np.ndarray:
    """Proper rotation O maximising Tr(O m)."""
    u, _, vt = np.linalg.svd(m)
    d = np.diag([1.0, 1.0, np.sign(np.linalg.det(vt.T @ u.T)) or 1.0])
    return vt.T @ d @ u.T


def optimal_strategy(rho) -> CorrectionStrategy:
    """Corrections sigma_k W, with W fixed by the SVD of the correlation matrix.

    A single outcome maps the input Bloch vector through -R^T, so W is the
    rotation best aligning -R^T with the identity.  The average fidelity
    reached is ``unitary_optimal_fidelity(rho)``.
    """
    r = correlation_matrix(np.asarray(rho, dtype=complex))
    w = rotation_to_unitary(_best_rotation(-r.T))
    return CorrectionStrategy(tuple(p @ w for p in PAULI_BASIS), name="optimal")


def restricted_strategy_x(x: XStateParams) -> CorrectionStrategy:
    """Pauli-only corrections for an X state.

    Alice rotates her qubit by diag(1, e^{i a}) so that the anti-diagonal
    coherence carrying the fully entangled fraction becomes real and
    non-negative; each outcome's Pauli is then chosen independently by exact
    evaluation over the 2-design.
    """
    _, chi0, chi1, _, _ = fully_entangled_fraction_x(x)
    coherence = complex(x.w) if chi0 >= chi1 else complex(x.z)
    phase = coherence / abs(coherence) if abs(coherence) > 0 else 1.0
    alice = np.diag([1.0, phase]).astype(complex)
    rho = x_state(x)
    sub = _bob_unnormalized(rho, alice, _DESIGN)  # (6, 4, 2, 2)
    chosen = []
    for k in range(4):
        scores = [
            np.einsum("nx,nxy,ny->", np.conj(_DESIGN), p @ sub[:, k] @ dagger(p), _DESIGN).real
            for p in PAULI_BASIS
        ]
        chosen.append(PAULI_BASIS[int(np.argmax(scores))].copy())
    return CorrectionStrategy(tuple(chosen), alice_rotation=alice, name="restricted-pauli")
