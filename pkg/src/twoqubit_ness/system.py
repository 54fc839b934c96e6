"""Coupled-qubit Hamiltonian, its eigenstructure and the bare/eigen basis change.

Bare basis ordering is ``(|ee>, |gg>, |eg>, |ge>)``; eigen basis ordering is
``(|1>, |2>, |3>, |4>)`` with ``|1> = |ee>``, ``|2> = |gg>`` and ``|3>, |4>`` the
symmetric/antisymmetric mixtures of the single-excitation states.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BasisMismatchError, RotatingWaveError

__all__ = [
    "Basis",
    "QubitPairParams",
    "EigenSystem",
    "DensityMatrix",
    "diagonalize",
    "to_bare",
    "to_eigen",
    "HERMITIAN_TOL",
    "TRACE_TOL",
    "POSITIVITY_TOL",
]

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10


class Basis(str, enum.Enum):
    EIGEN = "eigen"
    BARE = "bare"


@dataclass(frozen=True)
class QubitPairParams:
    """Qubit frequencies ``omega1``, ``omega2`` and the coupling ``lam``.

    Units are arbitrary energy units with hbar = k_B = 1.
    """

    omega1: float
    omega2: float
    lam: float

    def __post_init__(self):
        for name in ("omega1", "omega2", "lam"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        _check_rotating_wave(self.omega1, self.omega2, self.lam)

    @classmethod
    def from_detuning(cls, omega_mean: float, detuning: float, lam: float) -> "QubitPairParams":
        """Build from the mean frequency and ``detuning = omega1 - omega2``."""
        return cls(omega_mean + detuning / 2, omega_mean - detuning / 2, lam)

    @property
    def rwa_bound(self) -> float:
        return 2.0 * math.sqrt(self.omega1 * self.omega2)


def _check_rotating_wave(omega1: float, omega2: float, lam: float) -> None:
    bound = 2.0 * math.sqrt(omega1 * omega2)
    if lam >= bound:
        raise RotatingWaveError(
            f"coupling lam={lam!r} violates the rotating-wave bound lam < 2*sqrt(omega1*omega2) = {bound!r}"
        )


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class EigenSystem:
    params: QubitPairParams
    delta: float
    big_delta: float
    omega_rabi: float
    theta: float
    energies: tuple[float, float, float, float]
    u_matrix: np.ndarray = field(repr=False)

    @property
    def sin_half_sq(self) -> float:
        return math.sin(self.theta / 2) ** 2

    @property
    def cos_half_sq(self) -> float:
        return math.cos(self.theta / 2) ** 2

    @property
    def is_symmetric(self) -> bool:
        return self.big_delta == 0.0

    @property
    def hamiltonian(self) -> np.ndarray:
        """System Hamiltonian in the eigen basis (diagonal)."""
        return np.diag(np.asarray(self.energies, dtype=float))


def mixing_angle(big_delta: float, lam: float) -> float:
    """Mixing angle in ``[0, pi]`` with ``tan(theta) = lam / big_delta``."""
    if big_delta == 0.0:
        return math.pi / 2
    if big_delta > 0:
        return math.atan(lam / big_delta)
    return math.pi + math.atan(lam / big_delta)


def diagonalize(params: QubitPairParams) -> EigenSystem:
    _check_rotating_wave(params.omega1, params.omega2, params.lam)
    delta = params.omega1 + params.omega2
    big_delta = params.omega1 - params.omega2
    omega_rabi = math.hypot(big_delta, params.lam)
    theta = mixing_angle(big_delta, params.lam)
    energies = (delta, 0.0, (delta + omega_rabi) / 2, (delta - omega_rabi) / 2)

    c, s = math.cos(theta / 2), math.sin(theta / 2)
    # U[a, i] = <a|i>, a bare, i eigen
    u = np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, c, -s],
            [0.0, 0.0, s, c],
        ]
    )
    return EigenSystem(params, delta, big_delta, omega_rabi, theta, energies, _readonly(u))


@dataclass(frozen=True)
class DensityMatrix:
    """A 4x4 Hermitian, unit-trace matrix tagged with the basis it is written in.

    Positivity is not enforced: Redfield steady states may carry small negative
    eigenvalues, which callers inspect through :attr:`min_eigenvalue`.
    """

    entries: np.ndarray = field(repr=False)
    basis: Basis

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=complex)
        if a.shape != (4, 4):
            raise ValueError(f"density matrix must be 4x4, got shape {a.shape}")
        herm_err = np.abs(a - a.conj().T).max()
        if herm_err > HERMITIAN_TOL:
            raise ValueError(f"density matrix not Hermitian (max |rho - rho^H| = {herm_err:.3e})")
        tr = np.trace(a)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {tr!r} differs from 1")
        object.__setattr__(self, "entries", _readonly(a))
        object.__setattr__(self, "basis", Basis(self.basis))

    def __getitem__(self, idx):
        return self.entries[idx]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    def is_positive(self, tol: float = POSITIVITY_TOL) -> bool:
        return self.min_eigenvalue >= -tol

    @property
    def populations(self) -> np.ndarray:
        return self.entries.diagonal().real.copy()

    @classmethod
    def from_vector(cls, vec) -> "DensityMatrix":
        """Eigen-basis state from ``(rho11, rho22, rho33, rho44, rho34, rho43)``."""
        vec = np.asarray(vec, dtype=complex)
        rho = np.diag(vec[:4])
        rho[2, 3] = vec[4]
        rho[3, 2] = vec[5]
        return cls(rho, Basis.EIGEN)

    def to_vector(self) -> np.ndarray:
        """The six elements coupled by the master equation (eigen basis only)."""
        _require(self, Basis.EIGEN)
        r = self.entries
        return np.array([r[0, 0], r[1, 1], r[2, 2], r[3, 3], r[2, 3], r[3, 2]], dtype=complex)


def _require(rho: DensityMatrix, basis: Basis) -> None:
    if rho.basis is not basis:
        raise BasisMismatchError(f"expected a {basis.value}-basis state, got {rho.basis.value}")


def to_bare(rho: DensityMatrix, eig: EigenSystem) -> DensityMatrix:
    _require(rho, Basis.EIGEN)
    u = eig.u_matrix
    out = u @ rho.entries @ u.conj().T
    return DensityMatrix(0.5 * (out + out.conj().T), Basis.BARE)


def to_eigen(rho: DensityMatrix, eig: EigenSystem) -> DensityMatrix:
    _require(rho, Basis.BARE)
    u = eig.u_matrix
    out = u.conj().T @ rho.entries @ u
    return DensityMatrix(0.5 * (out + out.conj().T), Basis.EIGEN)
