"""Entanglement, coherence and energy-current functionals of two-qubit states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BasisMismatchError, NotSteadyStateError, NotXStateError
from .redfield import Liouvillian, SteadyStateReport
from .system import Basis, DensityMatrix, EigenSystem, to_bare

__all__ = [
    "ObservableSet",
    "x_state_concurrence",
    "concurrence",
    "wootters_concurrence",
    "coherences",
    "energy_current",
    "evaluate",
]

X_STATE_TOL = 1e-10
STEADY_RESIDUAL_RTOL = 1e-10

# bare ordering (ee, gg, eg, ge): X pattern allows the diagonal plus ee-gg and eg-ge
_X_MASK = np.ones((4, 4), dtype=bool)
_X_MASK[np.diag_indices(4)] = False
_X_MASK[0, 1] = _X_MASK[1, 0] = False
_X_MASK[2, 3] = _X_MASK[3, 2] = False


def _real_sqrt(x: float) -> float:
    # real part of the principal square root; zero for negative arguments
    return math.sqrt(x) if x > 0 else 0.0


def x_state_concurrence(a: float, d: float, w: complex, b: float = 0.0, c: float = 0.0, z: complex = 0.0) -> float:
    """Concurrence ``2 max(0, |w| - sqrt(a d), |z| - sqrt(b c))`` of an X state.

    ``a, d`` are the ``|ee>, |gg>`` populations, ``w`` the ``<eg|rho|ge>`` coherence.
    ``z`` (the ``ee``-``gg`` coherence) is zero for every state this model produces.
    A negative product under a square root contributes its real part, zero.
    """
    value = 2.0 * max(0.0, abs(w) - _real_sqrt(a * d), abs(z) - _real_sqrt(b * c))
    return min(value, 1.0) if value < 1.0 + 1e-12 else value


def concurrence(rho: DensityMatrix) -> float:
    if rho.basis is not Basis.BARE:
        raise BasisMismatchError("concurrence is evaluated on a bare-basis state")
    stray = np.abs(rho.entries[_X_MASK]).max()
    if stray > X_STATE_TOL:
        raise NotXStateError(f"state is not of X form (max off-pattern entry {stray:.3e})")
    r = rho.entries
    return x_state_concurrence(r[0, 0].real, r[1, 1].real, r[2, 3], r[2, 2].real, r[3, 3].real, r[0, 1])


# permutation from bare ordering (ee, gg, eg, ge) to computational (ee, eg, ge, gg)
_TO_COMPUTATIONAL = np.array([0, 2, 3, 1])
_SIGMA_YY = np.fliplr(np.diag([-1.0, 1.0, 1.0, -1.0]))


def wootters_concurrence(rho: DensityMatrix) -> float:
    """General two-qubit concurrence from the spin-flipped state; works for any input."""
    if rho.basis is not Basis.BARE:
        raise BasisMismatchError("concurrence is evaluated on a bare-basis state")
    r = rho.entries[np.ix_(_TO_COMPUTATIONAL, _TO_COMPUTATIONAL)]
    flipped = _SIGMA_YY @ r.conj() @ _SIGMA_YY
    ev = np.linalg.eigvals(r @ flipped)
    lam = np.sort(np.sqrt(np.abs(ev.real)))[::-1]
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))


def coherences(rho_eigen: DensityMatrix, eig: EigenSystem) -> tuple[complex, complex]:
    """Eigen-basis ``rho34`` and bare-basis ``w = <eg|rho|ge>``."""
    if rho_eigen.basis is not Basis.EIGEN:
        raise BasisMismatchError("coherences expects an eigen-basis state")
    r = rho_eigen.entries
    rho34, rho43 = complex(r[2, 3]), complex(r[3, 2])
    w = (
        0.5 * math.sin(eig.theta) * (r[2, 2].real - r[3, 3].real)
        + eig.cos_half_sq * rho34
        - eig.sin_half_sq * rho43
    )
    return rho34, complex(w)


def energy_current(L: Liouvillian, eig: EigenSystem, rho_ss: DensityMatrix) -> tuple[float, float]:
    """Steady-state energy currents ``(I1, I2)`` from each reservoir into the system.

    The Hamiltonian is diagonal in the eigen basis, so ``Tr(D_i[rho] H)`` only needs
    the population rows of each reservoir's dissipator.
    """
    vec = rho_ss.to_vector()
    residual = float(np.linalg.norm(L.matrix @ vec))
    if residual > STEADY_RESIDUAL_RTOL * max(L.norm, 1.0):
        raise NotSteadyStateError(f"state is not stationary (residual {residual:.3e})", residual)
    energies = np.asarray(eig.energies)
    i1, i2 = ((energies @ (d @ vec)[:4]).real for d in L.per_bath)
    return float(i1), float(i2)


@dataclass(frozen=True)
class ObservableSet:
    concurrence: float
    w: complex
    rho34: complex
    populations: tuple[float, float, float, float]
    currents: tuple[float, float]


def evaluate(L: Liouvillian, rho: DensityMatrix | SteadyStateReport) -> ObservableSet:
    """Every observable for an eigen-basis steady state of ``L``.

    ``populations`` are the bare-basis ``(a, b, c, d)``: ``|ee>, |eg>, |ge>, |gg>``.
    """
    if isinstance(rho, SteadyStateReport):
        rho = rho.rho
    eig = L.eig
    rho34, w = coherences(rho, eig)
    bare = to_bare(rho, eig)
    b = bare.entries.diagonal().real
    pops = (float(b[0]), float(b[2]), float(b[3]), float(b[1]))
    c = concurrence(bare)
    return ObservableSet(c, w, rho34, pops, energy_current(L, eig, rho))
