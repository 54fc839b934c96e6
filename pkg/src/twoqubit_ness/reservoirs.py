"""Reservoir statistics, spectral densities and transition rates."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

from .errors import OccupationError
from .system import EigenSystem

__all__ = [
    "Statistics",
    "Flat",
    "Ohmic",
    "BathSpec",
    "RatePair",
    "occupation",
    "spectral_density",
    "rates",
    "transition_frequencies",
]

# exp() overflows just above 709
_EXP_CUTOFF = 700.0


class Statistics(str, enum.Enum):
    BOSON = "boson"
    FERMION = "fermion"


@dataclass(frozen=True)
class Flat:
    """Frequency-independent coupling rate."""

    J: float

    def __post_init__(self):
        if not self.J > 0:
            raise ValueError(f"flat spectral density needs J > 0, got {self.J!r}")

    def __call__(self, omega: float) -> float:
        return self.J

    def describe(self) -> str:
        return f"flat(J={self.J!r})"


@dataclass(frozen=True)
class Ohmic:
    """``alpha * omega * exp(-omega / omega_c)``."""

    alpha: float
    omega_c: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"Ohmic spectral density needs alpha > 0, got {self.alpha!r}")
        if not self.omega_c > 0:
            raise ValueError(f"Ohmic spectral density needs omega_c > 0, got {self.omega_c!r}")

    def __call__(self, omega: float) -> float:
        return self.alpha * omega * math.exp(-omega / self.omega_c)

    def describe(self) -> str:
        return f"ohmic(alpha={self.alpha!r},omega_c={self.omega_c!r})"


Spectral = Union[Flat, Ohmic]


@dataclass(frozen=True)
class BathSpec:
    statistics: Statistics
    temperature: float
    chemical_potential: float = 0.0
    spectral: Spectral = Flat(1.0)

    def __post_init__(self):
        object.__setattr__(self, "statistics", Statistics(self.statistics))
        if not (math.isfinite(self.temperature) and self.temperature > 0):
            raise ValueError(f"temperature must be positive and finite, got {self.temperature!r}")
        if not math.isfinite(self.chemical_potential):
            raise ValueError("chemical potential must be finite")
        if self.statistics is Statistics.BOSON and self.chemical_potential > 0:
            raise ValueError(
                f"boson reservoirs need a non-positive chemical potential, got {self.chemical_potential!r}"
            )
        if not isinstance(self.spectral, (Flat, Ohmic)):
            raise TypeError(f"unsupported spectral density {self.spectral!r}")

    @classmethod
    def boson(cls, temperature: float, J: float = 1.0, chemical_potential: float = 0.0) -> "BathSpec":
        return cls(Statistics.BOSON, temperature, chemical_potential, Flat(J))

    @classmethod
    def fermion(cls, temperature: float, chemical_potential: float, J: float = 1.0) -> "BathSpec":
        return cls(Statistics.FERMION, temperature, chemical_potential, Flat(J))


@dataclass(frozen=True)
class RatePair:
    """Absorption rate ``gamma`` and emission rate ``big_gamma`` at one frequency."""

    gamma: float
    big_gamma: float


def occupation(bath: BathSpec, omega: float) -> float:
    """Bose-Einstein or Fermi-Dirac occupation of the bath at ``omega``."""
    if not omega > 0:
        raise ValueError(f"frequency must be positive, got {omega!r}")
    x = (omega - bath.chemical_potential) / bath.temperature
    if bath.statistics is Statistics.BOSON:
        if x <= 0:
            raise OccupationError(
                f"boson occupation diverges for omega={omega!r} <= mu={bath.chemical_potential!r}"
            )
        if x > _EXP_CUTOFF:
            return 0.0
        return 1.0 / math.expm1(x)
    if x > _EXP_CUTOFF:
        return 0.0
    if x < -_EXP_CUTOFF:
        return 1.0
    return 1.0 / (math.exp(x) + 1.0)


def spectral_density(bath: BathSpec, omega: float) -> float:
    if not omega > 0:
        raise ValueError(f"frequency must be positive, got {omega!r}")
    return bath.spectral(omega)


def _vacancy(bath: BathSpec, omega: float) -> float:
    # 1 - N for fermions, evaluated without cancellation near full filling
    x = (omega - bath.chemical_potential) / bath.temperature
    if x < -_EXP_CUTOFF:
        return 0.0
    if x > _EXP_CUTOFF:
        return 1.0
    return 1.0 / (math.exp(-x) + 1.0)


def rates(bath: BathSpec, omega: float) -> RatePair:
    n = occupation(bath, omega)
    j = spectral_density(bath, omega)
    if bath.statistics is Statistics.BOSON:
        return RatePair(j * n, j * (n + 1.0))
    return RatePair(j * n, j * _vacancy(bath, omega))


def transition_frequencies(eig: EigenSystem) -> tuple[float, float]:
    """``(omega_plus, omega_minus) = ((delta + Omega)/2, (delta - Omega)/2)``."""
    return (eig.delta + eig.omega_rabi) / 2, (eig.delta - eig.omega_rabi) / 2
