"""State families and seeded samplers.

Every random draw goes through :class:`RandomSource`, a (seed, counter) pair
mapped onto a Philox counter-based stream, so sample ``i`` of a campaign is the
same no matter how the index range is split between workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qmat import ket_to_density

PARAM_TOL = 1e-12

_S = 1 / math.sqrt(2)
KET_00 = np.array([1, 0, 0, 0], dtype=complex)
KET_11 = np.array([0, 0, 0, 1], dtype=complex)
PSI_MINUS = np.array([0, _S, -_S, 0], dtype=complex)
PSI_PLUS = np.array([0, _S, _S, 0], dtype=complex)
PHI_PLUS = np.array([_S, 0, 0, _S], dtype=complex)
PHI_MINUS = np.array([_S, 0, 0, -_S], dtype=complex)


@dataclass(frozen=True)
class RandomSource:
    """Deterministic per-sample random stream.

    ``stream`` separates independent uses of the same seed (state sampling vs.
    teleportation inputs, say); ``counter`` is the sample index.
    """

    seed: int
    counter: int = 0
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "counter", "stream"):
            v = getattr(self, name)
            if not 0 <= int(v) < 2**64:
                raise ValueError(f"RandomSource.{name} must be a 64-bit unsigned integer, got {v}")

    def at(self, counter: int) -> RandomSource:
        return RandomSource(self.seed, counter, self.stream)

    def substream(self, stream: int) -> RandomSource:
        return RandomSource(self.seed, self.counter, stream)

    def generator(self) -> np.random.Generator:
        key = int(self.seed) | (int(self.stream) << 64)
        return np.random.Generator(np.random.Philox(key=key, counter=[0, 0, 0, int(self.counter)]))


@dataclass(frozen=True)
class XStateParams:
    """Diagonal (a, b, c, d) and anti-diagonal (w, z) entries of an X-shaped state."""

    a: float
    b: float
    c: float
    d: float
    w: complex = 0j
    z: complex = 0j

    def __post_init__(self):
        diag = (self.a, self.b, self.c, self.d)
        if not all(math.isfinite(v) for v in diag) or not all(
            math.isfinite(v.real) and math.isfinite(v.imag) for v in (complex(self.w), complex(self.z))
        ):
            raise ValueError("x_state: parameters must be finite")
        if min(diag) < -PARAM_TOL:
            raise ValueError(f"x_state: diagonal entries must be non-negative, got {diag}")
        if abs(sum(diag) - 1.0) > PARAM_TOL:
            raise ValueError(f"x_state: a+b+c+d = {sum(diag):.15g}, must equal 1")
        if abs(self.w) ** 2 > self.a * self.d + PARAM_TOL:
            raise ValueError("x_state: |w|^2 <= a*d violated")
        if abs(self.z) ** 2 > self.b * self.c + PARAM_TOL:
            raise ValueError("x_state: |z|^2 <= b*c violated")

    def to_dict(self) -> dict:
        return {
            "type": "x_state",
            "a": self.a, "b": self.b, "c": self.c, "d": self.d,
            "w": {"re": complex(self.w).real, "im": complex(self.w).imag},
            "z": {"re": complex(self.z).real, "im": complex(self.z).imag},
        }


@dataclass(frozen=True)
class MemsParams:
    """Weights on |psi-><psi-|, |00><00|, |psi+><psi+|, |11><11| (in that order)."""

    lambdas: tuple[float, float, float, float]

    def __post_init__(self):
        lam = tuple(float(v) for v in self.lambdas)
        object.__setattr__(self, "lambdas", lam)
        if len(lam) != 4:
            raise ValueError("mems: exactly four lambdas required")
        if not all(math.isfinite(v) for v in lam):
            raise ValueError("mems: lambdas must be finite")
        if min(lam) < -PARAM_TOL:
            raise ValueError(f"mems: lambdas must be non-negative, got {lam}")
        if abs(sum(lam) - 1.0) > PARAM_TOL:
            raise ValueError(f"mems: lambdas sum to {sum(lam):.15g}, must equal 1")

    def to_dict(self) -> dict:
        return {"type": "mems", "lambdas": list(self.lambdas)}


@dataclass(frozen=True)
class ThreeQubitPure:
    """Canonical amplitudes of a three-qubit pure state.

    alpha0|000> + alpha1 e^{i theta}|100> + alpha2|101> + alpha3|110> + alpha4|111>
    """

    alphas: tuple[float, float, float, float, float]
    theta: float = 0.0

    def __post_init__(self):
        al = tuple(float(v) for v in self.alphas)
        object.__setattr__(self, "alphas", al)
        object.__setattr__(self, "theta", float(self.theta))
        if len(al) != 5:
            raise ValueError("three_qubit_pure: exactly five alphas required")
        if not all(math.isfinite(v) for v in al) or not math.isfinite(self.theta):
            raise ValueError("three_qubit_pure: parameters must be finite")
        if min(al) < 0:
            raise ValueError(f"three_qubit_pure: alphas must be non-negative, got {al}")
        norm = sum(v * v for v in al)
        if abs(norm - 1.0) > PARAM_TOL:
            raise ValueError(f"three_qubit_pure: sum of alpha^2 = {norm:.15g}, must equal 1")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"three_qubit_pure: theta = {self.theta} outside [0, pi]")

    def to_dict(self) -> dict:
        return {"type": "three_qubit_pure", "alphas": list(self.alphas), "theta": self.theta}


# -- deterministic families -------------------------------------------------


def mems_state(p: MemsParams) -> np.ndarray:
    l1, l2, l3, l4 = p.lambdas
    return (
        l1 * ket_to_density(PSI_MINUS)
        + l2 * ket_to_density(KET_00)
        + l3 * ket_to_density(PSI_PLUS)
        + l4 * ket_to_density(KET_11)
    )


def _check_unit(p: float, name: str) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name}: p = {p} outside [0, 1]")
    return p


def mems_rank3_params(p: float) -> MemsParams:
    p = _check_unit(p, "mems_rank3")
    return MemsParams(((1 + 2 * p) / 3, (1 - p) / 3, (1 - p) / 3, 0.0))


def mems_rank2_params(p: float) -> MemsParams:
    p = _check_unit(p, "mems_rank2")
    return MemsParams(((1 + p) / 2, (1 - p) / 2, 0.0, 0.0))


def mems_rank3(p: float) -> np.ndarray:
    return mems_state(mems_rank3_params(p))


def mems_rank2(p: float) -> np.ndarray:
    return mems_state(mems_rank2_params(p))


def x_state(x: XStateParams) -> np.ndarray:
    w, z = complex(x.w), complex(x.z)
    return np.array(
        [
            [x.a, 0, 0, w],
            [0, x.b, z, 0],
            [0, z.conjugate(), x.c, 0],
            [w.conjugate(), 0, 0, x.d],
        ],
        dtype=complex,
    )


_X_MASK = np.array(
    [[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 1, 0], [1, 0, 0, 1]], dtype=bool
)


def is_x_form(rho: np.ndarray, tol: float = PARAM_TOL) -> bool:
    rho = np.asarray(rho)
    return rho.shape == (4, 4) and float(np.max(np.abs(rho[~_X_MASK]), initial=0.0)) <= tol


def x_params_from_matrix(rho: np.ndarray, tol: float = PARAM_TOL) -> XStateParams:
    """Read (a, b, c, d, w, z) back out of an X-shaped 4x4 density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if not is_x_form(rho, tol):
        raise ValueError("matrix is not X-shaped: entries off the diagonal and anti-diagonal are nonzero")
    a, b, c, d = (float(rho[i, i].real) for i in range(4))
    return XStateParams(a, b, c, d, complex(rho[0, 3]), complex(rho[1, 2]))


def three_qubit_state(t: ThreeQubitPure) -> np.ndarray:
    a0, a1, a2, a3, a4 = t.alphas
    psi = np.zeros(8, dtype=complex)
    psi[0b000] = a0
    psi[0b100] = a1 * np.exp(1j * t.theta)
    psi[0b101] = a2
    psi[0b110] = a3
    psi[0b111] = a4
    return psi


def saturating_family(q: float) -> ThreeQubitPure:
    """sqrt(1/2)|000> + sqrt(1/2 - q^2)|101> + q|111>, for 0 < q < sqrt(1/2)."""
    q = float(q)
    if not 0.0 < q < math.sqrt(0.5):
        raise ValueError(f"saturating_family: q = {q} outside (0, sqrt(0.5))")
    return ThreeQubitPure((math.sqrt(0.5), 0.0, math.sqrt(0.5 - q * q), 0.0, q), 0.0)


def pure_schmidt_state(concurrence: float) -> np.ndarray:
    """alpha|00> + beta|11> with 2*alpha*beta equal to the requested concurrence."""
    c = float(concurrence)
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"pure_schmidt_state: concurrence {c} outside [0, 1]")
    alpha = math.sqrt((1 + math.sqrt(1 - c * c)) / 2)
    beta = math.sqrt(1 - alpha * alpha)
    return ket_to_density(alpha * KET_00 + beta * KET_11)


# -- samplers ---------------------------------------------------------------


def haar_vectors(gen: np.random.Generator, n: int, dim: int) -> np.ndarray:
    """``n`` Haar-random unit vectors of length ``dim`` (normalized complex Gaussians)."""
    v = gen.standard_normal((n, dim)) + 1j * gen.standard_normal((n, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def random_pure(nqubits: int, rng: RandomSource) -> np.ndarray:
    if nqubits not in (1, 2, 3):
        raise ValueError(f"random_pure: nqubits must be 1, 2 or 3, got {nqubits}")
    return haar_vectors(rng.generator(), 1, 2**nqubits)[0]


def random_density(rank: int, rng: RandomSource) -> np.ndarray:
    """Two-qubit state G G^dag / Tr(G G^dag) with G a 4 x rank complex Ginibre matrix."""
    if rank not in (1, 2, 3, 4):
        raise ValueError(f"random_density: rank must be in 1..4, got {rank}")
    gen = rng.generator()
    g = gen.standard_normal((4, rank)) + 1j * gen.standard_normal((4, rank))
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def x_from_uniforms(u: np.ndarray) -> tuple[np.ndarray, ...]:
    """Map uniforms ``(..., 8)`` to X-state entries (a, b, c, d, w, z).

    The diagonal is Dirichlet(1, 1, 1, 1) via normalized exponentials; |w|
    and |z| are uniform fractions of their positivity bounds sqrt(ad) and
    sqrt(bc), with uniform phases.
    """
    u = np.asarray(u, dtype=float)
    e = -np.log1p(-u[..., :4])
    diag = e / e.sum(axis=-1, keepdims=True)
    a, b, c, d = (diag[..., k] for k in range(4))
    w = u[..., 4] * np.sqrt(a * d) * np.exp(2j * np.pi * u[..., 6])
    z = u[..., 5] * np.sqrt(b * c) * np.exp(2j * np.pi * u[..., 7])
    return a, b, c, d, w, z


def random_x_state(rng: RandomSource) -> XStateParams:
    a, b, c, d, w, z = x_from_uniforms(rng.generator().random(8))
    return XStateParams(float(a), float(b), float(c), float(d), complex(w), complex(z))


def random_x_batch(seed: int, indices, stream: int = 0) -> tuple[np.ndarray, ...]:
    """Array form of ``random_x_state(RandomSource(seed, i, stream))`` over ``indices``."""
    u = np.array([RandomSource(seed, int(i), stream).generator().random(8) for i in indices])
    return x_from_uniforms(u.reshape(-1, 8))


def random_three_qubit(rng: RandomSource) -> ThreeQubitPure:
    gen = rng.generator()
    g = np.abs(gen.standard_normal(5))
    g = g / np.linalg.norm(g)
    theta = float(gen.uniform(0.0, math.pi))
    return ThreeQubitPure(tuple(float(v) for v in g), theta)
