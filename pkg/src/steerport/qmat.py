"""Small dense complex linear algebra for 2-, 4- and 8-dimensional qubit spaces.

Matrices are plain ``numpy`` arrays.  Most routines accept a stack of matrices
with shape ``(..., d, d)`` so that campaigns can evaluate many states at once.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_FLOOR = -1e-10
CLAMP_TOL = 1e-12

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)
# identity first, then x, y, z
PAULI_BASIS = (I2, SX, SY, SZ)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, ``(A⊗B)[i*rB + k, j*cB + l] = A[i, j] * B[k, l]``."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def kron_all(*mats: np.ndarray) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = kron(out, m)
    return out


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def hermiticity_error(a: np.ndarray) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a - dagger(a)))) if a.size else 0.0


def partial_trace(rho: np.ndarray, keep: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Reduce ``rho`` onto the subsystems listed in ``keep``.

    ``dims`` gives the subsystem dimensions in tensor order (subsystem 0 is the
    most significant factor).  Leading batch axes are preserved.
    """
    rho = np.asarray(rho)
    dims = [int(d) for d in dims]
    keep = sorted({int(k) for k in keep})
    n = len(dims)
    total = int(np.prod(dims))
    if rho.shape[-2:] != (total, total):
        raise ValueError(f"partial_trace: matrix shape {rho.shape[-2:]} does not match dims {dims}")
    if not keep or len(keep) >= n or keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"partial_trace: keep={keep} must be a nonempty proper subset of range({n})")
    batch = rho.shape[:-2]
    t = rho.reshape(batch + tuple(dims) + tuple(dims))
    nb = len(batch)
    # contract traced subsystems pairwise, highest index first so axis numbers stay valid
    traced = [k for k in range(n) if k not in keep]
    remaining = n
    for k in reversed(traced):
        t = np.trace(t, axis1=nb + k, axis2=nb + remaining + k)
        remaining -= 1
    d = int(np.prod([dims[k] for k in keep]))
    return t.reshape(batch + (d, d))


def herm_eigvals(h: np.ndarray) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix (or stack)."""
    h = np.asarray(h, dtype=complex)
    if h.shape[-1] != h.shape[-2]:
        raise ValueError("herm_eigvals: matrix must be square")
    err = hermiticity_error(h)
    if err > HERMITIAN_TOL:
        raise ValueError(f"herm_eigvals: input not Hermitian (max |H - H^dag| = {err:.3g})")
    return np.linalg.eigvalsh(h)


def jacobi_eigvalsh(h: np.ndarray, tol: float = 1e-14, max_sweeps: int = 100) -> np.ndarray:
    """Cyclic Jacobi eigenvalues of a single Hermitian (or real symmetric) matrix.

    Kept as an independent reference solver; ``herm_eigvals`` uses LAPACK.
    """
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    mask = ~np.eye(n, dtype=bool)
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    for _ in range(max_sweeps):
        if np.sqrt(np.sum(np.abs(a[mask]) ** 2)) < tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                phase = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                g = np.eye(n, dtype=complex)
                g[p, p] = c
                g[q, q] = c
                g[p, q] = s * phase
                g[q, p] = -s * np.conj(phase)
                a = dagger(g) @ a @ g
    else:
        raise ArithmeticError("jacobi_eigvalsh: no convergence")
    return np.sort(np.diag(a).real)


def _jacobi_sym3(m: np.ndarray) -> np.ndarray:
    return jacobi_eigvalsh(np.asarray(m, dtype=float))


def sym3_eigvals(m: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a real symmetric 3x3 matrix (or stack).

    Uses the trigonometric solution of the characteristic cubic.  Matrices
    whose roots are close to coincident fall back to Jacobi rotations, where
    ``arccos`` would lose precision.  Values in ``[-1e-12, 0)`` are clamped to 0.
    """
    m = np.asarray(m, dtype=float)
    if m.shape[-2:] != (3, 3):
        raise ValueError("sym3_eigvals: expected 3x3 input")
    asym = float(np.max(np.abs(m - np.swapaxes(m, -1, -2)))) if m.size else 0.0
    if asym > HERMITIAN_TOL:
        raise ValueError(f"sym3_eigvals: input not symmetric (max asymmetry {asym:.3g})")
    single = m.ndim == 2
    a = m.reshape(-1, 3, 3)
    a = 0.5 * (a + np.swapaxes(a, -1, -2))

    q = np.trace(a, axis1=-2, axis2=-1) / 3.0
    dev = a - q[:, None, None] * np.eye(3)
    p2 = np.einsum("bij,bij->b", dev, dev)
    p = np.sqrt(p2 / 6.0)
    scale = np.maximum(np.max(np.abs(a), axis=(-2, -1)), 1e-300)
    safe_p = np.where(p > 0, p, 1.0)
    r = np.linalg.det(dev / safe_p[:, None, None]) / 2.0
    r = np.clip(r, -1.0, 1.0)
    phi = np.arccos(r) / 3.0
    e_hi = q + 2 * p * np.cos(phi)
    e_lo = q + 2 * p * np.cos(phi + 2 * np.pi / 3)
    e_mid = 3 * q - e_hi - e_lo
    out = np.stack([e_lo, e_mid, e_hi], axis=-1)

    # near-repeated roots: 1 - |r| small, or the spread itself negligible
    degenerate = (1.0 - np.abs(r) < 1e-6) | (p <= 1e-12 * scale)
    for idx in np.flatnonzero(degenerate):
        out[idx] = _jacobi_sym3(a[idx])
    out = np.sort(out, axis=-1)
    out = np.where((out < 0) & (out >= -CLAMP_TOL), 0.0, out)
    return out[0] if single else out.reshape(m.shape[:-2] + (3,))


def psd_sqrt(rho: np.ndarray) -> np.ndarray:
    """Hermitian PSD square root; eigenvalues above the PSD floor are clipped to 0."""
    rho = np.asarray(rho, dtype=complex)
    w, v = np.linalg.eigh(rho)
    if np.any(w < PSD_FLOOR):
        raise ValueError(f"psd_sqrt: matrix has eigenvalue {w.min():.3g} below PSD floor")
    s = np.sqrt(np.clip(w, 0.0, None))
    return (v * s[..., None, :]) @ dagger(v)


def validate_density(rho: np.ndarray, dims: Sequence[int] = (2, 4, 8)) -> np.ndarray:
    """Return ``rho`` as a complex array, raising ``ValueError`` naming the broken invariant."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if rho.shape[0] not in dims:
        raise ValueError(f"density matrix dimension {rho.shape[0]} not in {tuple(dims)}")
    if not np.all(np.isfinite(rho)):
        raise ValueError("density matrix has non-finite entries")
    err = hermiticity_error(rho)
    if err > HERMITIAN_TOL:
        raise ValueError(f"density matrix not Hermitian: max |M - M^dag| = {err:.3g}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"density matrix trace {tr.real:.15g} differs from 1")
    lo = float(np.linalg.eigvalsh(rho)[0])
    if lo < PSD_FLOOR:
        raise ValueError(f"density matrix not positive semi-definite: smallest eigenvalue {lo:.3g}")
    return rho


def ket_to_density(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return psi[..., :, None] * np.conj(psi[..., None, :])
