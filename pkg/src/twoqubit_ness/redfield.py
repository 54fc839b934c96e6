"""Non-secular Bloch-Redfield generator over the six coupled density-matrix elements.

The state vector is ``(rho11, rho22, rho33, rho44, rho34, rho43)`` in the eigen
basis. All other coherences decouple from it and relax to zero, so they are not
carried.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

from .errors import BasisMismatchError, DegenerateGeneratorError, MarkovianValidityWarning
from .reservoirs import BathSpec, rates, spectral_density, transition_frequencies
from .system import POSITIVITY_TOL, Basis, DensityMatrix, EigenSystem

__all__ = [
    "BathRates",
    "Liouvillian",
    "SteadyStateReport",
    "PositivityScan",
    "build_generator",
    "steady_state",
    "null_space_steady_state",
    "propagate",
    "positivity_scan",
    "MARKOV_RATIO",
]

POP = slice(0, 4)
COH = slice(4, 6)

# J(omega_pm) above this fraction of min(omega1, omega2, lam) triggers a warning
MARKOV_RATIO = 0.1


@dataclass(frozen=True)
class BathRates:
    """The four rates one reservoir contributes, at omega_plus and omega_minus."""

    gamma_plus: float
    big_gamma_plus: float
    gamma_minus: float
    big_gamma_minus: float

    @classmethod
    def evaluate(cls, bath: BathSpec, eig: EigenSystem) -> "BathRates":
        w_plus, w_minus = transition_frequencies(eig)
        rp, rm = rates(bath, w_plus), rates(bath, w_minus)
        return cls(rp.gamma, rp.big_gamma, rm.gamma, rm.big_gamma)


_ZERO_RATES = BathRates(0.0, 0.0, 0.0, 0.0)


def _dissipator_block(theta: float, r1: BathRates, r2: BathRates) -> np.ndarray:
    """Dissipative part of the 6x6 generator, element by element.

    Rows and columns follow the state-vector ordering; ``M[i, k]`` is the rate
    at which element ``k`` feeds element ``i``.
    """
    s2 = np.sin(theta / 2) ** 2
    c2 = np.cos(theta / 2) ** 2
    sn = 0.5 * np.sin(theta)
    g1p, G1p, g1m, G1m = r1.gamma_plus, r1.big_gamma_plus, r1.gamma_minus, r1.big_gamma_minus
    g2p, G2p, g2m, G2m = r2.gamma_plus, r2.big_gamma_plus, r2.gamma_minus, r2.big_gamma_minus

    m = np.zeros((6, 6), dtype=complex)
    # d rho11 / dt
    m[0, 0] = -2 * (s2 * (G1m + G2p) + c2 * (G1p + G2m))
    m[0, 2] = 2 * (s2 * g1m + c2 * g2m)
    m[0, 3] = 2 * (c2 * g1p + s2 * g2p)
    m[0, 4] = m[0, 5] = sn * (g1p + g1m - g2p - g2m)
    # d rho22 / dt
    m[1, 1] = -2 * (s2 * (g1m + g2p) + c2 * (g1p + g2m))
    m[1, 2] = 2 * (c2 * G1p + s2 * G2p)
    m[1, 3] = 2 * (c2 * G2m + s2 * G1m)
    m[1, 4] = m[1, 5] = -sn * (G1p + G1m - G2p - G2m)
    # d rho33 / dt
    m[2, 0] = 2 * (s2 * G1m + c2 * G2m)
    m[2, 1] = 2 * (c2 * g1p + s2 * g2p)
    m[2, 2] = -2 * (s2 * (g1m + G2p) + c2 * (g2m + G1p))
    m[2, 4] = m[2, 5] = -sn * (g1p - G1m - g2p + G2m)
    # d rho44 / dt
    m[3, 0] = 2 * (c2 * G1p + s2 * G2p)
    m[3, 1] = 2 * (s2 * g1m + c2 * g2m)
    m[3, 3] = -2 * (c2 * (g1p + G2m) + s2 * (g2p + G1m))
    m[3, 4] = m[3, 5] = -sn * (g1m - G1p - g2m + G2p)
    # d rho34 / dt and d rho43 / dt share their population couplings
    for row in (4, 5):
        m[row, 0] = sn * (G1p + G1m - G2p - G2m)
        m[row, 1] = -sn * (g1p + g1m - g2p - g2m)
        m[row, 2] = -sn * (g1m - G1p - g2m + G2p)
        m[row, 3] = -sn * (g1p - G1m - g2p + G2m)
    decay = -s2 * (g1m + G1m + g2p + G2p) - c2 * (g1p + G1p + g2m + G2m)
    m[4, 4] = decay
    m[5, 5] = decay
    return m


@dataclass(frozen=True)
class Liouvillian:
    """Generator ``d|rho>/dt = matrix |rho>`` with its per-reservoir split."""

    matrix: np.ndarray = field(repr=False)
    coherent: np.ndarray = field(repr=False)
    per_bath: tuple[np.ndarray, np.ndarray] = field(repr=False)
    bath_rates: tuple[BathRates, BathRates]
    eig: EigenSystem
    baths: tuple[BathSpec, BathSpec]
    secular: bool = False

    @property
    def theta(self) -> float:
        return self.eig.theta

    @property
    def omega_rabi(self) -> float:
        return self.eig.omega_rabi

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))

    def residual(self, rho: DensityMatrix) -> float:
        return float(np.linalg.norm(self.matrix @ rho.to_vector()))


def _markov_check(eig: EigenSystem, baths) -> bool:
    p = eig.params
    scale = MARKOV_RATIO * min(p.omega1, p.omega2, p.lam)
    worst = max(spectral_density(b, w) for b in baths for w in transition_frequencies(eig))
    return worst <= scale


def build_generator(eig: EigenSystem, bath1: BathSpec, bath2: BathSpec, *, secular: bool = False) -> Liouvillian:
    """Assemble the generator for qubit 1 in ``bath1`` and qubit 2 in ``bath2``.

    With ``secular=True`` the cross-frequency dissipator is dropped, which is
    exactly the population/coherence coupling blocks of the generator.
    """
    r1 = BathRates.evaluate(bath1, eig)
    r2 = BathRates.evaluate(bath2, eig)
    if not _markov_check(eig, (bath1, bath2)):
        warnings.warn(
            f"spectral density exceeds {MARKOV_RATIO} * min(omega1, omega2, lam); "
            "Markovian treatment may be unreliable",
            MarkovianValidityWarning,
            stacklevel=2,
        )

    d1 = _dissipator_block(eig.theta, r1, _ZERO_RATES)
    d2 = _dissipator_block(eig.theta, _ZERO_RATES, r2)
    if secular:
        for d in (d1, d2):
            d[POP, COH] = 0.0
            d[COH, POP] = 0.0
    coherent = np.zeros((6, 6), dtype=complex)
    coherent[4, 4] = -1j * eig.omega_rabi
    coherent[5, 5] = 1j * eig.omega_rabi
    for a in (d1, d2, coherent):
        a.setflags(write=False)
    matrix = coherent + d1 + d2
    matrix.setflags(write=False)
    return Liouvillian(matrix, coherent, (d1, d2), (r1, r2), eig, (bath1, bath2), secular)


@dataclass(frozen=True)
class SteadyStateReport:
    rho: DensityMatrix
    residual: float
    min_eigenvalue: float
    positivity_ok: bool

    @property
    def populations(self) -> np.ndarray:
        return self.rho.populations

    @property
    def rho34(self) -> complex:
        return complex(self.rho[2, 3])


def _report(L: Liouvillian, vec: np.ndarray, positivity_tol: float) -> SteadyStateReport:
    vec = vec.copy()
    vec[:4] = vec[:4].real
    # enforce rho43 = conj(rho34); the two solve rows agree to rounding
    c = 0.5 * (vec[4] + np.conj(vec[5]))
    vec[4], vec[5] = c, np.conj(c)
    rho = DensityMatrix.from_vector(vec)
    residual = float(np.linalg.norm(L.matrix @ vec))
    lo = rho.min_eigenvalue
    return SteadyStateReport(rho, residual, lo, lo >= -positivity_tol)


def _cofactor_row(a: np.ndarray, row: int = 0) -> np.ndarray:
    """Signed minors along one row of a square matrix."""
    n = a.shape[0]
    rest = np.delete(a, row, axis=0)
    return np.array([(-1) ** (i + row) * np.linalg.det(np.delete(rest, i, axis=1)) for i in range(n)])


def steady_state(L: Liouvillian, *, positivity_tol: float = POSITIVITY_TOL) -> SteadyStateReport:
    """Steady state by eliminating the coherences and solving the reduced population problem.

    The population block ``A = Mpp - Mpc Mcc^-1 Mcp`` has zero column sums, so its
    null vector is proportional to the cofactors along any row. The row dropped is
    the balance equation of the most populated level; dropping the equation of a
    sparsely populated level would leave that population fixed by cancellation
    between the others.
    """
    m = L.matrix
    m_pp, m_pc, m_cp, m_cc = m[POP, POP], m[POP, COH], m[COH, POP], m[COH, COH]
    det_cc = np.linalg.det(m_cc)
    if abs(det_cc) <= 1e-300 or np.linalg.cond(m_cc) > 1e14:
        raise DegenerateGeneratorError("coherence block of the generator is not invertible")
    x = np.linalg.solve(m_cc, m_cp)
    a = m_pp - m_pc @ x

    sv = np.linalg.svd(a, compute_uv=False)
    if sv[0] == 0 or sv[2] <= 1e-13 * sv[0]:
        raise DegenerateGeneratorError(
            f"reduced population matrix has rank < 3 (singular values {sv}); steady state is not unique"
        )
    p = _cofactor_row(a)
    p = _cofactor_row(a, int(np.argmax(np.abs(p))))
    p = p / p.sum()
    c = -x @ p
    return _report(L, np.concatenate([p, c]), positivity_tol)


def null_space_steady_state(L: Liouvillian, *, positivity_tol: float = POSITIVITY_TOL) -> SteadyStateReport:
    """Cross-check solver: right singular vector of the full 6x6 generator."""
    _, s, vh = np.linalg.svd(L.matrix)
    if s[-2] <= 1e-13 * s[0]:
        raise DegenerateGeneratorError("generator null space is more than one-dimensional")
    v = vh[-1].conj()
    v = v / v[:4].sum()
    return _report(L, v, positivity_tol)


def _check_block_form(rho: DensityMatrix) -> None:
    mask = np.ones((4, 4), dtype=bool)
    mask[np.diag_indices(4)] = False
    mask[2, 3] = mask[3, 2] = False
    stray = np.abs(rho.entries[mask]).max()
    if stray > 1e-12:
        raise ValueError(
            f"state has coherences outside the rho34 pair (max {stray:.3e}); "
            "those decouple and are not propagated"
        )


def propagate(L: Liouvillian, rho0: DensityMatrix, t: float) -> DensityMatrix:
    """``exp(M t)`` applied to an eigen-basis state of block form."""
    if t < 0:
        raise ValueError(f"propagation time must be non-negative, got {t!r}")
    if rho0.basis is not Basis.EIGEN:
        raise BasisMismatchError("propagate expects an eigen-basis state")
    _check_block_form(rho0)
    if t == 0:
        return rho0
    v = expm(L.matrix * t) @ rho0.to_vector()
    v[:4] = v[:4].real
    return DensityMatrix.from_vector(v)


class PositivityScan(NamedTuple):
    worst_eigenvalue: float
    time: float
    violated: bool


def positivity_scan(
    L: Liouvillian, rho0: DensityMatrix, t_grid, *, positivity_tol: float = POSITIVITY_TOL
) -> PositivityScan:
    """Smallest eigenvalue of ``rho(t)`` over ``t_grid``."""
    worst, t_worst = np.inf, np.nan
    for t in t_grid:
        lo = propagate(L, rho0, float(t)).min_eigenvalue
        if lo < worst:
            worst, t_worst = lo, float(t)
    return PositivityScan(float(worst), t_worst, bool(worst < -positivity_tol))
