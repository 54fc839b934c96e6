"""Closed-form steady states for flat, balanced reservoirs.

One implementation covers every case: the asymmetric-qubit solution written in
terms of mapped occupations. The symmetric and equilibrium solutions are thin
wrappers that check their reduction against the textbook entanglement witnesses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedClosedFormError
from .observables import coherences, x_state_concurrence
from .reservoirs import BathSpec, Flat, Statistics, occupation, rates, transition_frequencies
from .system import DensityMatrix, EigenSystem

__all__ = [
    "OccupationSummary",
    "Intermediates",
    "AnalyticSteadyState",
    "EffectiveParameters",
    "occupation_summary",
    "closed_form",
    "general_steady_state",
    "equilibrium_boson",
    "equilibrium_fermion",
    "boson_witness",
    "fermion_witness",
    "effective_parameters",
    "thresholds",
    "LN_SILVER",
]

# ln(1 + sqrt 2): sinh(x) > 1 exactly when x > LN_SILVER
LN_SILVER = math.log(1.0 + math.sqrt(2.0))


def _trig(theta: float) -> tuple[float, float]:
    # exact at resonance, where the detuning map must reduce to the identity
    if theta == math.pi / 2:
        return 0.0, 1.0
    return math.cos(theta), math.sin(theta)


@dataclass(frozen=True)
class OccupationSummary:
    """Reservoir occupations at the two transition frequencies.

    ``v*`` are the matching vacancies ``1 - N``; fermion reservoirs near full
    filling need them evaluated directly rather than by subtraction.
    """

    n1_plus: float
    n1_minus: float
    n2_plus: float
    n2_minus: float
    theta: float
    omega_prime: float
    v1_plus: float | None = None
    v1_minus: float | None = None
    v2_plus: float | None = None
    v2_minus: float | None = None

    def __post_init__(self):
        for k in ("1_plus", "1_minus", "2_plus", "2_minus"):
            if getattr(self, "v" + k) is None:
                object.__setattr__(self, "v" + k, 1.0 - getattr(self, "n" + k))

    @property
    def n_bar_plus(self) -> float:
        return 0.5 * (self.n1_plus + self.n2_plus)

    @property
    def n_bar_minus(self) -> float:
        return 0.5 * (self.n1_minus + self.n2_minus)

    @property
    def n_tilde_plus(self) -> float:
        return 0.5 * (self.n1_plus - self.n2_plus)

    @property
    def n_tilde_minus(self) -> float:
        return 0.5 * (self.n1_minus - self.n2_minus)

    # detuned-qubit versions; identical to the plain ones at theta = pi/2
    @property
    def script_bar_plus(self) -> float:
        return self.n_bar_plus + self.n_tilde_plus * _trig(self.theta)[0]

    @property
    def script_bar_minus(self) -> float:
        return self.n_bar_minus - self.n_tilde_minus * _trig(self.theta)[0]

    @property
    def script_tilde_plus(self) -> float:
        return self.n_tilde_plus * _trig(self.theta)[1]

    @property
    def script_tilde_minus(self) -> float:
        return self.n_tilde_minus * _trig(self.theta)[1]

    @property
    def script_vacancy_plus(self) -> float:
        """``1 - script_bar_plus`` from the vacancies."""
        return 0.5 * (self.v1_plus + self.v2_plus) + 0.5 * (self.v1_plus - self.v2_plus) * _trig(self.theta)[0]

    @property
    def script_vacancy_minus(self) -> float:
        return 0.5 * (self.v1_minus + self.v2_minus) - 0.5 * (self.v1_minus - self.v2_minus) * _trig(self.theta)[0]


@dataclass(frozen=True)
class Intermediates:
    r1: float = 0.0
    r2: float = 0.0
    s1: float = 0.0
    s2: float = 0.0
    R: float = 0.0
    R_tilde: float = 0.0
    norm: float = 1.0


@dataclass(frozen=True)
class AnalyticSteadyState:
    rho: DensityMatrix
    w: complex
    concurrence: float
    intermediates: Intermediates
    occupations: OccupationSummary
    statistics: Statistics
    # set when rho11 or rho22 < 0; concurrence then uses Re sqrt(a d)
    positivity_warning: bool = False

    @property
    def rho34(self) -> complex:
        return complex(self.rho[2, 3])

    @property
    def populations(self) -> np.ndarray:
        return self.rho.populations


def _flat_rate(bath: BathSpec) -> float:
    if not isinstance(bath.spectral, Flat):
        raise UnsupportedClosedFormError(
            "closed forms need flat spectral densities; use the numerical engine for Ohmic baths"
        )
    return bath.spectral.J


def occupation_summary(eig: EigenSystem, bath1: BathSpec, bath2: BathSpec) -> OccupationSummary:
    if bath1.statistics is not bath2.statistics:
        raise UnsupportedClosedFormError("closed forms need both reservoirs to share their statistics")
    j1, j2 = _flat_rate(bath1), _flat_rate(bath2)
    if j1 != j2:
        raise UnsupportedClosedFormError(f"closed forms need equal coupling rates, got J1={j1!r}, J2={j2!r}")
    w_plus, w_minus = transition_frequencies(eig)
    vac = {}
    if bath1.statistics is Statistics.FERMION:
        vac = {
            "v1_plus": rates(bath1, w_plus).big_gamma / j1,
            "v1_minus": rates(bath1, w_minus).big_gamma / j1,
            "v2_plus": rates(bath2, w_plus).big_gamma / j2,
            "v2_minus": rates(bath2, w_minus).big_gamma / j2,
        }
    return OccupationSummary(
        occupation(bath1, w_plus),
        occupation(bath1, w_minus),
        occupation(bath2, w_plus),
        occupation(bath2, w_minus),
        eig.theta,
        eig.omega_rabi / j1,
        **vac,
    )


def _boson(bp: float, bm: float, tp: float, tm: float, op: float):
    s = 1.0 + bp + bm
    R = 1.0 / (4.0 * s * s + op * op)
    r1 = tp + tm * (1 + 2 * bp + 2 * bm)
    r2 = tm + tp * (1 + 2 * bp + 2 * bm)
    s1 = tp - tm * (3 + 2 * bp + 2 * bm)
    s2 = tm - tp * (3 + 2 * bp + 2 * bm)
    norm = (1 + 2 * bp) * (1 + 2 * bm) - 16 * tp * tm * s * s * R
    pops = np.array(
        [
            bp * bm - r1 * r2 * R,
            (1 + bp) * (1 + bm) - s1 * s2 * R,
            bp * (1 + bm) + s1 * r2 * R,
            bm * (1 + bp) + s2 * r1 * R,
        ]
    )
    rho34 = -(tp * (1 + 2 * bm) + tm * (1 + 2 * bp)) / (2 * s + 1j * op)
    return pops / norm, rho34 / norm, Intermediates(r1, r2, s1, s2, R, 0.0, norm)


def _fermion(bp: float, bm: float, tp: float, tm: float, op: float, vp: float, vm: float):
    # vp, vm are 1 - bp, 1 - bm evaluated without cancellation
    rt = (tp + tm) ** 2 / (4.0 + op * op)
    pops = np.array(
        [
            bp * bm - rt,
            vp * vm - rt,
            bp * vm + rt,
            bm * vp + rt,
        ]
    )
    rho34 = -(tp + tm) / (2.0 + 1j * op)
    return pops, rho34, Intermediates(R_tilde=rt)


def closed_form(statistics: Statistics, occ: OccupationSummary, eig: EigenSystem) -> AnalyticSteadyState:
    """Evaluate the closed-form steady state from reservoir occupations.

    Taking ``occ`` as input (rather than baths) lets callers substitute limiting
    occupations, e.g. a saturated reservoir with ``N = 1``.
    """
    statistics = Statistics(statistics)
    args = (occ.script_bar_plus, occ.script_bar_minus, occ.script_tilde_plus, occ.script_tilde_minus, occ.omega_prime)
    if statistics is Statistics.BOSON:
        pops, rho34, inter = _boson(*args)
    else:
        pops, rho34, inter = _fermion(*args, occ.script_vacancy_plus, occ.script_vacancy_minus)
    rho = DensityMatrix.from_vector([*pops, rho34, np.conj(rho34)])
    _, w = coherences(rho, eig)
    warn = bool(pops[0] < 0 or pops[1] < 0)
    c = x_state_concurrence(pops[0], pops[1], w)
    return AnalyticSteadyState(rho, w, c, inter, occ, statistics, warn)


def general_steady_state(eig: EigenSystem, bath1: BathSpec, bath2: BathSpec) -> AnalyticSteadyState:
    occ = occupation_summary(eig, bath1, bath2)
    return closed_form(bath1.statistics, occ, eig)


def _witness(a: float, b: float) -> float:
    """``(sinh a - 1) / (cosh b + cosh a)`` for ``a >= 0``, stable for large arguments."""
    m = max(abs(a), abs(b))
    if m <= 350.0:
        return (math.sinh(a) - 1.0) / (math.cosh(b) + math.cosh(a))
    # divide through by e^m / 2
    num = math.exp(a - m) - math.exp(-a - m) - 2.0 * math.exp(-m)
    den = math.exp(b - m) + math.exp(-b - m) + math.exp(a - m) + math.exp(-a - m)
    return num / den


def boson_witness(omega: float, lam: float, temperature: float) -> float:
    """Equilibrium boson entanglement witness; concurrence is ``max(0, value)``."""
    return _witness(lam / (2 * temperature), omega / temperature)


def fermion_witness(omega: float, lam: float, temperature: float, mu: float) -> float:
    """Equilibrium fermion entanglement witness; concurrence is ``max(0, value)``."""
    return _witness(lam / (2 * temperature), (omega - mu) / temperature)


def _equilibrium_w(omega: float, lam: float, temperature: float, mu: float) -> float:
    a, b = lam / (2 * temperature), (omega - mu) / temperature
    m = max(a, abs(b))
    if m <= 350.0:
        return -math.sinh(a) / (2 * (math.cosh(b) + math.cosh(a)))
    num = math.exp(a - m) - math.exp(-a - m)
    den = math.exp(b - m) + math.exp(-b - m) + math.exp(a - m) + math.exp(-a - m)
    return -num / (2 * den)


def _require_symmetric(eig: EigenSystem) -> None:
    if not eig.is_symmetric:
        raise UnsupportedClosedFormError("equilibrium closed forms are for symmetric qubits (omega1 == omega2)")


def _check_reduction(state: AnalyticSteadyState, w_closed: float, witness: float) -> None:
    if abs(state.w - w_closed) > 1e-9 or abs(state.concurrence - max(0.0, witness)) > 1e-9:
        raise ArithmeticError(
            f"general solution does not reduce to the equilibrium form: w {state.w} vs {w_closed}, "
            f"C {state.concurrence} vs {max(0.0, witness)}"
        )


def equilibrium_boson(eig: EigenSystem, temperature: float, J: float = 1.0) -> AnalyticSteadyState:
    _require_symmetric(eig)
    bath = BathSpec.boson(temperature, J)
    state = general_steady_state(eig, bath, bath)
    omega, lam = eig.params.omega1, eig.params.lam
    _check_reduction(state, _equilibrium_w(omega, lam, temperature, 0.0), boson_witness(omega, lam, temperature))
    return state


def equilibrium_fermion(eig: EigenSystem, temperature: float, mu: float, J: float = 1.0) -> AnalyticSteadyState:
    _require_symmetric(eig)
    bath = BathSpec.fermion(temperature, mu, J)
    state = general_steady_state(eig, bath, bath)
    omega, lam = eig.params.omega1, eig.params.lam
    _check_reduction(state, _equilibrium_w(omega, lam, temperature, mu), fermion_witness(omega, lam, temperature, mu))
    return state


@dataclass(frozen=True)
class EffectiveParameters:
    kind: str  # "temperature" or "chemical_potential"
    value: float
    near_equilibrium: bool


# relative temperature spread, and chemical-potential spread in units of T,
# below which the averaged bath is a fair stand-in
NEAR_EQ_FRACTION = 0.1


def effective_parameters(bath1: BathSpec, bath2: BathSpec, omega: float | None = None) -> EffectiveParameters:
    """Averaged temperature (bosons) or chemical potential (fermions).

    ``near_equilibrium`` is False where the average is not a good effective bath:
    a large spread, or for fermions unequal temperatures. Passing the transition
    frequency ``omega`` also accepts boson baths that are both hot (``T > omega``).
    """
    if bath1.statistics is not bath2.statistics:
        raise ValueError("effective parameters need reservoirs of the same statistics")
    t1, t2 = bath1.temperature, bath2.temperature
    if bath1.statistics is Statistics.BOSON:
        t_bar = 0.5 * (t1 + t2)
        ok = abs(t2 - t1) <= NEAR_EQ_FRACTION * t_bar
        if omega is not None and min(t1, t2) > omega:
            ok = True
        return EffectiveParameters("temperature", t_bar, ok)
    mu1, mu2 = bath1.chemical_potential, bath2.chemical_potential
    ok = t1 == t2 and abs(mu2 - mu1) <= NEAR_EQ_FRACTION * t1
    return EffectiveParameters("chemical_potential", 0.5 * (mu1 + mu2), ok)


def thresholds(eig: EigenSystem, statistics: Statistics, temperature: float | None = None) -> dict[str, float]:
    """Entanglement thresholds of the symmetric equilibrium solutions.

    Bosons: ``{"t_max": ...}``, the temperature above which concurrence vanishes.
    Fermions: ``{"lambda_min": ...}``, the coupling at or below which it vanishes
    for every chemical potential (needs ``temperature``).
    """
    _require_symmetric(eig)
    statistics = Statistics(statistics)
    if statistics is Statistics.BOSON:
        return {"t_max": eig.params.lam / (2 * LN_SILVER)}
    if temperature is None or not temperature > 0:
        raise ValueError("fermion threshold needs a positive temperature")
    return {"lambda_min": 2 * LN_SILVER * temperature}
