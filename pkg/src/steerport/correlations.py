"""Two-qubit correlation quantities.

General routines take a 4x4 density matrix or a stack ``(..., 4, 4)``; the
``*_x`` functions are closed forms for X-shaped states and serve as
cross-checks of the general path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qmat import I2, PAULIS, SY, dagger, kron, partial_trace, sym3_eigvals
from .states import PHI_MINUS, PHI_PLUS, PSI_MINUS, PSI_PLUS, XStateParams

STEERING_TOL = 1e-12
# eigenvalues of rho below this are numerical noise of a rank-deficient state
RANK_FLOOR = 1e-14

_SIGMA_AB = np.array([[kron(si, sj) for sj in PAULIS] for si in PAULIS])  # (3, 3, 4, 4)
_SIGMA_A = np.array([kron(si, I2) for si in PAULIS])
_SIGMA_B = np.array([kron(I2, sj) for sj in PAULIS])
_YY = kron(SY, SY)
# Hill-Wootters magic basis: maximally entangled states are real combinations of these
_MAGIC = np.stack([PHI_PLUS, 1j * PHI_MINUS, 1j * PSI_PLUS, PSI_MINUS], axis=1)


def _scalar(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def _two_qubit(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (4, 4):
        raise ValueError(f"expected a two-qubit (4x4) density matrix, got shape {rho.shape}")
    return rho


@dataclass(frozen=True)
class PauliDecomposition:
    """Local Bloch vectors and correlation matrix of a two-qubit state."""

    a: np.ndarray
    b: np.ndarray
    R: np.ndarray

    def reconstruct(self) -> np.ndarray:
        out = kron(I2, I2).copy()
        for i, s in enumerate(PAULIS):
            out += self.a[i] * kron(s, I2) + self.b[i] * kron(I2, s)
            for j, t in enumerate(PAULIS):
                out += self.R[i, j] * kron(s, t)
        return out / 4


def correlation_matrix(rho) -> np.ndarray:
    """r_ij = Tr(rho sigma_i ⊗ sigma_j); batched."""
    rho = _two_qubit(rho)
    return np.einsum("ijab,...ba->...ij", _SIGMA_AB, rho).real


def pauli_decompose(rho) -> PauliDecomposition:
    rho = _two_qubit(rho)
    if rho.ndim != 2:
        raise ValueError("pauli_decompose takes a single 4x4 matrix")
    a = np.einsum("iab,ba->i", _SIGMA_A, rho).real
    b = np.einsum("iab,ba->i", _SIGMA_B, rho).real
    return PauliDecomposition(a, b, correlation_matrix(rho))


def steering_observable(rho):
    """Maximal three-setting violation, sqrt(Tr R^T R)."""
    r = correlation_matrix(rho)
    return _scalar(np.sqrt(np.einsum("...ij,...ij->...", r, r)))


def is_steerable_3setting(rho):
    """Sufficient test only: S > 1 certifies steering, S <= 1 is inconclusive."""
    s = np.asarray(steering_observable(rho))
    out = s > 1.0 + STEERING_TOL
    return bool(out) if out.ndim == 0 else out


def correlation_eigvals(rho) -> np.ndarray:
    """Ascending eigenvalues u_i of R^T R."""
    r = correlation_matrix(rho)
    return sym3_eigvals(np.swapaxes(r, -1, -2) @ r)


def n_value(rho):
    """Sum of sqrt(u_i); the standard-scheme fidelity is (1 + N/3) / 2."""
    u = correlation_eigvals(rho)
    return _scalar(np.sqrt(np.clip(u, 0.0, None)).sum(axis=-1))


def x_singular_values(x: XStateParams) -> tuple[float, float, float]:
    """(u1, u2, u3) = (4(|w|+|z|)^2, 4(|w|-|z|)^2, (a+d-b-c)^2)."""
    w, z = abs(x.w), abs(x.z)
    return (4 * (w + z) ** 2, 4 * (w - z) ** 2, (x.a + x.d - x.b - x.c) ** 2)


def x_steering_observable(x: XStateParams) -> float:
    return math.sqrt(sum(x_singular_values(x)))


def concurrence(rho):
    """Wootters concurrence.

    With rho = W W^dag, the spin-flip values lambda_i are the singular values of
    W^T (sy⊗sy) W.  Taking them from an SVD avoids square-rooting the
    eigenvalues of sqrt(rho) rho~ sqrt(rho), which costs half the digits on
    rank-deficient states.
    """
    rho = _two_qubit(rho)
    w, v = np.linalg.eigh(rho)
    w = np.where(w > RANK_FLOOR, w, 0.0)
    fac = v * np.sqrt(w)[..., None, :]
    t = np.swapaxes(fac, -1, -2) @ _YY @ fac
    lam = np.linalg.svd(t, compute_uv=False)  # descending
    c = lam[..., 0] - lam[..., 1] - lam[..., 2] - lam[..., 3]
    return _scalar(np.clip(c, 0.0, 1.0))


def concurrence_hermitian(rho):
    """Reference route via eigenvalues of sqrt(rho) rho~ sqrt(rho); accurate to ~1e-8."""
    rho = _two_qubit(rho)
    w, v = np.linalg.eigh(rho)
    root = (v * np.sqrt(np.clip(w, 0.0, None))[..., None, :]) @ dagger(v)
    flipped = _YY @ np.conj(rho) @ _YY
    m = root @ flipped @ root
    ev = np.linalg.eigvalsh(0.5 * (m + dagger(m)))
    lam = np.sqrt(np.clip(ev, 0.0, None))[..., ::-1]
    c = lam[..., 0] - lam[..., 1] - lam[..., 2] - lam[..., 3]
    return _scalar(np.clip(c, 0.0, 1.0))


def concurrence_x_closed(x: XStateParams) -> float:
    return 2 * max(0.0, abs(x.w) - math.sqrt(x.b * x.c), abs(x.z) - math.sqrt(x.a * x.d))


def fully_entangled_fraction_x(x: XStateParams) -> tuple[float, float, float, float, float]:
    """(F, chi0, chi1, chi2, chi3) for an X state; F = max chi."""
    w, z = abs(x.w), abs(x.z)
    chi0 = (x.a + x.d + 2 * w) / 2
    chi3 = (x.a + x.d - 2 * w) / 2
    chi1 = (x.b + x.c + 2 * z) / 2
    chi2 = (x.b + x.c - 2 * z) / 2
    return (max(chi0, chi1, chi2, chi3), chi0, chi1, chi2, chi3)


def fully_entangled_fraction(rho):
    """max <Psi|rho|Psi> over maximally entangled |Psi>.

    In the magic basis those states have real coefficients up to a global
    phase, so F is the top eigenvalue of Re(rho) expressed in that basis.
    """
    rho = _two_qubit(rho)
    m = dagger(_MAGIC) @ rho @ _MAGIC
    return _scalar(np.linalg.eigvalsh(m.real)[..., -1])


def tangle_one_to_rest(psi, i: int):
    """2 sqrt(det rho_i) for qubit i (1, 2 or 3) of a three-qubit pure state."""
    if i not in (1, 2, 3):
        raise ValueError(f"qubit index must be 1, 2 or 3, got {i}")
    psi = np.asarray(psi, dtype=complex)
    if psi.shape[-1] != 8:
        raise ValueError("tangle_one_to_rest expects a three-qubit state vector")
    rho = psi[..., :, None] * np.conj(psi[..., None, :])
    red = partial_trace(rho, [i - 1], [2, 2, 2])
    det = (red[..., 0, 0] * red[..., 1, 1] - red[..., 0, 1] * red[..., 1, 0]).real
    return _scalar(np.clip(2 * np.sqrt(np.clip(det, 0.0, None)), 0.0, 1.0))
