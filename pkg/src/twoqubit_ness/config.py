"""JSON run configurations and their expansion into grid points.

A configuration fixes some parameters and sweeps others over axes. Each grid
point is a flat mapping of parameter names to values; :func:`resolve` turns it
into qubit parameters and two reservoirs. Shorthand keys are accepted:

* ``omega`` sets both qubit frequencies; ``omega_mean`` with ``detuning`` sets
  ``omega1 = omega_mean + detuning/2`` and ``omega2 = omega_mean - detuning/2``.
* ``T`` / ``mu`` set both reservoirs. ``delta_T`` / ``delta_mu`` give
  ``T2 = T1 + delta_T``, or with ``T_mean`` / ``mu_mean`` split symmetrically.
* ``J`` / ``alpha`` / ``omega_c`` set both reservoirs' spectral densities.
"""

from __future__ import annotations

import enum
import importlib.resources
import itertools
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .reservoirs import BathSpec, Flat, Ohmic, Statistics
from .system import QubitPairParams

__all__ = [
    "SCHEMA_VERSION",
    "ConfigError",
    "Mode",
    "OutputFormat",
    "Axis",
    "RandomSpec",
    "SweepConfig",
    "load_config",
    "bundled_config",
    "bundled_names",
    "parse_config",
    "resolve",
    "point_violation",
    "PARAMETER_KEYS",
]

SCHEMA_VERSION = 1

PARAMETER_KEYS = frozenset(
    {
        "omega", "omega1", "omega2", "omega_mean", "detuning", "lam",
        "T", "T1", "T2", "T_mean", "delta_T",
        "mu", "mu1", "mu2", "mu_mean", "delta_mu",
        "J", "J1", "J2", "alpha", "alpha1", "alpha2",
        "omega_c", "omega_c1", "omega_c2",
    }
)  # fmt: skip


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


class Mode(str, enum.Enum):
    ANALYTIC = "analytic"
    NUMERIC = "numeric"
    BOTH = "both"


class OutputFormat(str, enum.Enum):
    CSV = "csv"
    MATRIX = "matrix"


@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple[float, ...]

    def __post_init__(self):
        if self.name not in PARAMETER_KEYS:
            raise ConfigError(f"unknown axis parameter {self.name!r}")
        if not self.values:
            raise ConfigError(f"axis {self.name!r} is empty")
        if not all(math.isfinite(v) for v in self.values):
            raise ConfigError(f"axis {self.name!r} has non-finite values")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ConfigError(f"axis {self.name!r} must be strictly increasing")

    @classmethod
    def from_json(cls, raw: Mapping[str, Any]) -> "Axis":
        if "name" not in raw:
            raise ConfigError("axis entry needs a 'name'")
        if "values" in raw:
            values = [float(v) for v in raw["values"]]
        elif "linspace" in raw:
            try:
                start, stop, num = raw["linspace"]
            except (TypeError, ValueError) as exc:
                raise ConfigError("'linspace' takes [start, stop, num]") from exc
            if int(num) != num or num < 1:
                raise ConfigError("'linspace' count must be a positive integer")
            values = np.linspace(float(start), float(stop), int(num)).tolist()
        else:
            raise ConfigError(f"axis {raw['name']!r} needs 'values' or 'linspace'")
        return cls(str(raw["name"]), tuple(values))


@dataclass(frozen=True)
class RandomSpec:
    """Randomized flat, equal-J draws for analytic-vs-numeric comparisons."""

    count: int = 1000
    statistics: tuple[Statistics, ...] = (Statistics.BOSON, Statistics.FERMION)
    asymmetric_fraction: float = 0.5

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError("random comparison needs count >= 1")
        if not 0.0 <= self.asymmetric_fraction <= 1.0:
            raise ConfigError("asymmetric_fraction must lie in [0, 1]")


@dataclass(frozen=True)
class SweepConfig:
    statistics: Statistics
    fixed: Mapping[str, float]
    axes: tuple[Axis, ...] = ()
    spectral: str = "flat"
    mode: Mode = Mode.NUMERIC
    secular: bool = False
    phase_diagram: bool = False
    output: Path | None = None
    output_format: OutputFormat = OutputFormat.CSV
    workers: int | None = None
    random: RandomSpec | None = None
    name: str = "sweep"
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        overlap = set(self.fixed) & {a.name for a in self.axes}
        if overlap:
            raise ConfigError(f"parameters both fixed and swept: {sorted(overlap)}")
        if len({a.name for a in self.axes}) != len(self.axes):
            raise ConfigError("duplicate axis names")
        if self.spectral not in ("flat", "ohmic"):
            raise ConfigError(f"spectral must be 'flat' or 'ohmic', got {self.spectral!r}")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not self.axes and self.random is None:
            raise ConfigError("configuration has neither axes nor a random section")
        if self.phase_diagram:
            if len(self.axes) != 2:
                raise ConfigError("phase diagrams need exactly two axes")
            if not {"omega_mean", "lam"} <= set(self.fixed):
                raise ConfigError("phase diagrams need fixed 'omega_mean' and 'lam'")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a.values) for a in self.axes)

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    def points(self) -> list[dict[str, float]]:
        """Grid points in row-major order (last axis fastest)."""
        names = [a.name for a in self.axes]
        return [
            {**self.fixed, **dict(zip(names, combo))}
            for combo in itertools.product(*(a.values for a in self.axes))
        ]

    def with_overrides(self, **changes) -> "SweepConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _number(key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"parameter {key!r} must be a number, got {value!r}")
    return float(value)


def parse_config(raw: Mapping[str, Any], base_dir: Path | None = None) -> SweepConfig:
    if not isinstance(raw, Mapping):
        raise ConfigError("configuration must be a JSON object")
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
    try:
        statistics = Statistics(raw.get("statistics", "boson"))
        mode = Mode(raw.get("mode", "numeric"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    fixed_raw = raw.get("fixed", {})
    if not isinstance(fixed_raw, Mapping):
        raise ConfigError("'fixed' must be an object")
    unknown = set(fixed_raw) - PARAMETER_KEYS
    if unknown:
        raise ConfigError(f"unknown fixed parameters: {sorted(unknown)}")
    fixed = {k: _number(k, v) for k, v in fixed_raw.items()}
    axes = tuple(Axis.from_json(a) for a in raw.get("axes", []))

    output, fmt = None, OutputFormat.CSV
    out_raw = raw.get("output")
    if out_raw is not None:
        if isinstance(out_raw, str):
            out_raw = {"path": out_raw}
        if "path" in out_raw:
            output = Path(out_raw["path"])
            if base_dir is not None and not output.is_absolute():
                output = base_dir / output
        try:
            fmt = OutputFormat(out_raw.get("format", "csv"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    random = None
    if "random" in raw:
        r = raw["random"]
        try:
            stats = tuple(Statistics(s) for s in r.get("statistics", ["boson", "fermion"]))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        random = RandomSpec(int(r.get("count", 1000)), stats, float(r.get("asymmetric_fraction", 0.5)))

    workers = raw.get("workers")
    return SweepConfig(
        statistics=statistics,
        fixed=fixed,
        axes=axes,
        spectral=raw.get("spectral", "flat"),
        mode=mode,
        secular=bool(raw.get("secular", False)),
        phase_diagram=bool(raw.get("phase_diagram", False)),
        output=output,
        output_format=fmt,
        workers=None if workers is None else int(workers),
        random=random,
        name=str(raw.get("name", "sweep")),
        metadata=dict(raw.get("metadata", {})),
    )


def load_config(path: str | Path) -> SweepConfig:
    """Read a configuration file. Relative output paths resolve against the current directory."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(raw)


def bundled_names() -> list[str]:
    root = importlib.resources.files(__package__) / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def bundled_config(name: str) -> SweepConfig:
    """One of the reference configurations shipped with the package."""
    res = importlib.resources.files(__package__) / "configs" / f"{name}.json"
    if not res.is_file():
        raise ConfigError(f"no bundled configuration {name!r}; available: {bundled_names()}")
    return parse_config(json.loads(res.read_text()))


def _pair(p: Mapping[str, float], key: str, default: float | None = None) -> tuple[float, float]:
    """Resolve ``key1``/``key2`` from explicit values, shared value, mean/difference forms."""
    diff_key, mean_key = f"delta_{key}", f"{key}_mean"
    shared = p.get(key, default)
    if diff_key in p:
        d = p[diff_key]
        if mean_key in p:
            return p[mean_key] - d / 2, p[mean_key] + d / 2
        first = p.get(f"{key}1", shared)
        if first is None:
            raise ConfigError(f"'{diff_key}' needs '{key}1', '{key}' or '{mean_key}'")
        return first, first + d
    a, b = p.get(f"{key}1", shared), p.get(f"{key}2", shared)
    if a is None or b is None:
        raise ConfigError(f"cannot resolve {key}1/{key}2 from {sorted(p)}")
    return a, b


def resolve(point: Mapping[str, float], statistics: Statistics, spectral: str = "flat"):
    """``(QubitPairParams, bath1, bath2)`` for one grid point.

    Physical-range errors (``ValueError`` subclasses) propagate; callers record
    them per point.
    """
    p = dict(point)
    if "omega1" in p or "omega2" in p:
        w1, w2 = p.get("omega1", p.get("omega")), p.get("omega2", p.get("omega"))
        if w1 is None or w2 is None:
            raise ConfigError("give both omega1 and omega2, or 'omega'")
    elif "omega" in p:
        w1 = w2 = p["omega"]
    elif "omega_mean" in p:
        d = p.get("detuning", 0.0)
        w1, w2 = p["omega_mean"] + d / 2, p["omega_mean"] - d / 2
    else:
        raise ConfigError("qubit frequencies need 'omega', 'omega1'/'omega2' or 'omega_mean'")
    if "lam" not in p:
        raise ConfigError("missing coupling 'lam'")
    params = QubitPairParams(w1, w2, p["lam"])

    t1, t2 = _pair(p, "T")
    mu1, mu2 = _pair(p, "mu", 0.0)
    if spectral == "flat":
        j1, j2 = _pair(p, "J", 1.0)
        s1, s2 = Flat(j1), Flat(j2)
    else:
        a1, a2 = _pair(p, "alpha")
        c1, c2 = _pair(p, "omega_c")
        s1, s2 = Ohmic(a1, c1), Ohmic(a2, c2)
    return params, BathSpec(statistics, t1, mu1, s1), BathSpec(statistics, t2, mu2, s2)


def point_violation(point: Mapping[str, float]) -> str | None:
    """Phase-diagram range limits: ``|detuning| < sqrt(4 w^2 - lam^2)``, ``|delta_T| <= 2 T_mean``."""
    w, lam = point["omega_mean"], point["lam"]
    d = point.get("detuning", 0.0)
    limit = math.sqrt(max(4 * w * w - lam * lam, 0.0))
    if not abs(d) < limit:
        return f"|detuning|={abs(d)!r} outside the rotating-wave range {limit!r}"
    if "delta_T" in point and "T_mean" in point and abs(point["delta_T"]) > 2 * point["T_mean"]:
        return f"|delta_T|={abs(point['delta_T'])!r} exceeds 2*T_mean"
    return None
