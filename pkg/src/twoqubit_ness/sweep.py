"""Grid evaluation, analytic-vs-numeric comparison and phase-diagram summaries."""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np
from scipy import ndimage

from .analytic import general_steady_state
from .config import ConfigError, Mode, RandomSpec, SweepConfig, point_violation, resolve
from .errors import MarkovianValidityWarning, UnsupportedClosedFormError
from .observables import evaluate
from .redfield import build_generator, steady_state
from .reservoirs import Statistics
from .system import POSITIVITY_TOL, diagonalize

__all__ = [
    "RESULT_COLUMNS",
    "COLUMN_DOCS",
    "COMPARISON_TOL",
    "SweepResult",
    "ComparisonReport",
    "PhaseSummary",
    "evaluate_point",
    "run_sweep",
    "run_comparison",
    "random_points",
    "phase_summary",
    "default_workers",
]

# analytic-vs-numeric agreement required by the comparison report
COMPARISON_TOL = 1e-8

RESULT_COLUMNS = (
    "status",
    "rho11", "rho22", "rho33", "rho44",
    "re_rho34", "im_rho34", "abs_rho34",
    "re_w", "im_w", "abs_w",
    "concurrence", "I1", "I2",
    "residual", "min_eigenvalue", "positivity_ok", "markov_ok",
    "analytic_diff",
)  # fmt: skip

COLUMN_DOCS = {
    "index": "row-major grid index",
    "statistics": "reservoir statistics",
    "omega1": "qubit 1 frequency",
    "omega2": "qubit 2 frequency",
    "lam": "inter-qubit coupling",
    "T1": "reservoir 1 temperature",
    "T2": "reservoir 2 temperature",
    "mu1": "reservoir 1 chemical potential",
    "mu2": "reservoir 2 chemical potential",
    "J1": "reservoir 1 flat rate",
    "J2": "reservoir 2 flat rate",
    "alpha1": "reservoir 1 Ohmic strength",
    "alpha2": "reservoir 2 Ohmic strength",
    "omega_c1": "reservoir 1 cutoff",
    "omega_c2": "reservoir 2 cutoff",
    "status": "ok or invalid:<reason>",
    "rho11": "eigen-basis population |1>=|ee>",
    "rho22": "eigen-basis population |2>=|gg>",
    "rho33": "eigen-basis population |3>",
    "rho44": "eigen-basis population |4>",
    "re_rho34": "Re rho34",
    "im_rho34": "Im rho34",
    "abs_rho34": "|rho34|",
    "re_w": "Re w (bare eg-ge coherence)",
    "im_w": "Im w",
    "abs_w": "|w|",
    "concurrence": "X-state concurrence",
    "I1": "energy current from reservoir 1",
    "I2": "energy current from reservoir 2",
    "residual": "||M rho||",
    "min_eigenvalue": "smallest eigenvalue of rho",
    "positivity_ok": "min_eigenvalue >= -1e-10",
    "markov_ok": "spectral density small against system frequencies",
    "analytic_diff": "max |analytic - numeric| (mode=both)",
}

_BAD = float("nan")


def default_workers() -> int:
    return os.cpu_count() or 1


def parameter_columns(spectral: str, axis_names: Sequence[str] = ()) -> tuple[str, ...]:
    base = ["statistics", "omega1", "omega2", "lam", "T1", "T2", "mu1", "mu2"]
    base += ["J1", "J2"] if spectral == "flat" else ["alpha1", "alpha2", "omega_c1", "omega_c2"]
    axes = [a for a in axis_names if a not in base]
    return ("index", *axes, *base)


def _invalid_row(reason: str) -> dict[str, Any]:
    row = {c: _BAD for c in RESULT_COLUMNS}
    row.update(status=f"invalid:{reason}", positivity_ok=False, markov_ok=False)
    return row


def evaluate_point(
    index: int,
    point: Mapping[str, float],
    statistics: Statistics,
    spectral: str = "flat",
    mode: Mode = Mode.NUMERIC,
    secular: bool = False,
    phase_diagram: bool = False,
) -> dict[str, Any]:
    """One result row. Out-of-range points give an ``invalid:`` row instead of raising."""
    row: dict[str, Any] = {"index": index, **point, "statistics": Statistics(statistics).value}
    try:
        if phase_diagram:
            reason = point_violation(point)
            if reason:
                raise ValueError(reason)
        params, b1, b2 = resolve(point, statistics, spectral)
    except ConfigError:
        raise
    except ValueError as exc:
        row.update(_invalid_row(str(exc)))
        return row
    row.update(omega1=params.omega1, omega2=params.omega2, lam=params.lam)
    row.update(T1=b1.temperature, T2=b2.temperature, mu1=b1.chemical_potential, mu2=b2.chemical_potential)
    if spectral == "flat":
        row.update(J1=b1.spectral.J, J2=b2.spectral.J)
    else:
        row.update(alpha1=b1.spectral.alpha, alpha2=b2.spectral.alpha)
        row.update(omega_c1=b1.spectral.omega_c, omega_c2=b2.spectral.omega_c)

    try:
        eig = diagonalize(params)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", MarkovianValidityWarning)
            L = build_generator(eig, b1, b2, secular=secular)
        markov_ok = not any(issubclass(w.category, MarkovianValidityWarning) for w in caught)
        diff = _BAD
        if mode is Mode.ANALYTIC:
            rho = general_steady_state(eig, b1, b2).rho
        else:
            rho = steady_state(L).rho
            if mode is Mode.BOTH:
                ana = general_steady_state(eig, b1, b2).rho
                diff = float(np.abs(rho.to_vector() - ana.to_vector()).max())
        obs = evaluate(L, rho)
    except UnsupportedClosedFormError:
        raise
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        row.update(_invalid_row(str(exc)))
        return row

    v = rho.to_vector()
    lo = rho.min_eigenvalue
    row.update(
        status="ok",
        rho11=v[0].real, rho22=v[1].real, rho33=v[2].real, rho44=v[3].real,
        re_rho34=obs.rho34.real, im_rho34=obs.rho34.imag, abs_rho34=abs(obs.rho34),
        re_w=obs.w.real, im_w=obs.w.imag, abs_w=abs(obs.w),
        concurrence=obs.concurrence, I1=obs.currents[0], I2=obs.currents[1],
        residual=L.residual(rho), min_eigenvalue=lo,
        positivity_ok=bool(lo >= -POSITIVITY_TOL), markov_ok=markov_ok,
        analytic_diff=diff,
    )  # fmt: skip
    return row


def _run_task(task):
    return evaluate_point(*task)


@dataclass
class SweepResult:
    config: SweepConfig
    columns: tuple[str, ...]
    rows: list[dict[str, Any]]

    def column(self, name: str) -> np.ndarray:
        return np.array([r.get(name, _BAD) for r in self.rows])

    def grid(self, name: str) -> np.ndarray:
        """Column reshaped to the axis grid."""
        return self.column(name).reshape(self.config.shape)

    @property
    def ok(self) -> np.ndarray:
        return np.array([r["status"] == "ok" for r in self.rows])

    @property
    def invalid_count(self) -> int:
        return int((~self.ok).sum())


def _check_analytic_support(config: SweepConfig, mode: Mode, secular: bool) -> None:
    if mode is Mode.NUMERIC:
        return
    if config.spectral != "flat":
        raise ConfigError("closed forms need flat spectral densities; rerun with --mode numeric")
    if secular:
        raise ConfigError("closed forms describe the non-secular steady state; drop --secular or use --mode numeric")
    fixed, j = config.fixed, config.fixed.get("J", 1.0)
    if {"J1", "J2"} & {a.name for a in config.axes} or fixed.get("J1", j) != fixed.get("J2", j):
        raise ConfigError("closed forms need J1 == J2; rerun with --mode numeric")


def _map(tasks: list[tuple], workers: int) -> list[dict[str, Any]]:
    if workers <= 1 or len(tasks) < 2:
        return [_run_task(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(_run_task, tasks, chunksize=chunk))
    return sorted(rows, key=lambda r: r["index"])


def run_sweep(
    config: SweepConfig,
    *,
    workers: int | None = None,
    mode: Mode | None = None,
    secular: bool | None = None,
) -> SweepResult:
    """Evaluate every grid point of ``config``; rows come back in row-major order."""
    mode = Mode(mode or config.mode)
    secular = config.secular if secular is None else secular
    _check_analytic_support(config, mode, secular)
    workers = workers or config.workers or default_workers()
    tasks = [
        (i, p, config.statistics, config.spectral, mode, secular, config.phase_diagram)
        for i, p in enumerate(config.points())
    ]
    rows = _map(tasks, workers)
    cols = parameter_columns(config.spectral, [a.name for a in config.axes]) + RESULT_COLUMNS
    return SweepResult(config, cols, rows)


def random_points(spec: RandomSpec, seed: int) -> list[tuple[Statistics, dict[str, float]]]:
    """Flat, equal-J draws within the rotating-wave range.

    Detuning stays below 0.6 of the mean frequency, so ``omega1*omega2 > 0.91 w^2``
    and ``lam < 1.5 w`` is always inside the rotating-wave bound.
    """
    rng = np.random.default_rng(seed)
    out = []
    for k in range(spec.count):
        stats = spec.statistics[k % len(spec.statistics)]
        w = rng.uniform(4.0, 15.0)
        det = rng.uniform(-0.6, 0.6) * w if rng.random() < spec.asymmetric_fraction else 0.0
        p = {
            "omega_mean": w,
            "detuning": det,
            "lam": rng.uniform(0.2, 1.5 * w),
            "J": rng.uniform(0.05, 2.0),
            "T1": rng.uniform(0.3, 8.0),
            "T2": rng.uniform(0.3, 8.0),
        }
        if stats is Statistics.BOSON:
            p["mu1"], p["mu2"] = (rng.uniform(-3.0, 0.0), rng.uniform(-3.0, 0.0)) if rng.random() < 0.5 else (0.0, 0.0)
        else:
            p["mu1"], p["mu2"] = rng.uniform(-5.0, 25.0), rng.uniform(-5.0, 25.0)
        if k % 10 == 0:
            # equal-bath draws: the closed form must give rho34 = 0
            p["T2"], p["mu2"] = p["T1"], p["mu1"]
        out.append((stats, p))
    return out


@dataclass
class ComparisonReport:
    count: int
    max_diff: float
    mean_diff: float
    equal_bath_max_rho34: float
    invalid: int
    worst_index: int
    rows: list[dict[str, Any]] = field(repr=False, default_factory=list)
    tolerance: float = COMPARISON_TOL

    @property
    def passed(self) -> bool:
        return self.count > 0 and self.max_diff <= self.tolerance

    def as_dict(self) -> dict[str, Any]:
        return {
            "count": self.count,
            "max_diff": self.max_diff,
            "mean_diff": self.mean_diff,
            "equal_bath_max_rho34": self.equal_bath_max_rho34,
            "invalid": self.invalid,
            "worst_index": self.worst_index,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def run_comparison(config: SweepConfig, *, seed: int = 0, workers: int | None = None) -> ComparisonReport:
    """Closed form against the numerical engine over the grid or a random draw."""
    if config.spectral != "flat":
        raise ConfigError("comparison needs flat spectral densities (closed forms do not cover Ohmic baths)")
    if config.random is not None:
        tasks = [(i, p, s, "flat", Mode.BOTH, False, False) for i, (s, p) in enumerate(random_points(config.random, seed))]
    else:
        _check_analytic_support(config, Mode.BOTH, config.secular)
        tasks = [(i, p, config.statistics, "flat", Mode.BOTH, False, False) for i, p in enumerate(config.points())]
    rows = _map(tasks, workers or config.workers or default_workers())
    ok = [r for r in rows if r["status"] == "ok"]
    diffs = np.array([r["analytic_diff"] for r in ok])
    eq = [abs(complex(r["re_rho34"], r["im_rho34"])) for r in ok if r["T1"] == r["T2"] and r["mu1"] == r["mu2"]]
    worst = int(ok[int(np.argmax(diffs))]["index"]) if ok else -1
    return ComparisonReport(
        count=len(ok),
        max_diff=float(diffs.max()) if ok else math.inf,
        mean_diff=float(diffs.mean()) if ok else math.inf,
        equal_bath_max_rho34=float(max(eq)) if eq else 0.0,
        invalid=len(rows) - len(ok),
        worst_index=worst,
        rows=rows,
    )


@dataclass
class PhaseSummary:
    x_name: str
    y_name: str
    peak: float
    peak_at: tuple[float, float]
    peak_quadrant: int
    peak_quadrants: list[int]
    symmetry_error: float | None
    violation_count: int
    min_rho11: float
    regions: list[dict[str, Any]]
    regions_origin_symmetric: bool

    def as_dict(self) -> dict[str, Any]:
        return dict(self.__dict__)


def _quadrant(x: float, y: float) -> int:
    if x > 0 and y > 0:
        return 1
    if x < 0 < y:
        return 2
    if x < 0 and y < 0:
        return 3
    if x > 0 > y:
        return 4
    return 0


def phase_summary(result: SweepResult, quantity: str = "concurrence") -> PhaseSummary:
    """Peak location, origin-reflection symmetry and positivity-violation regions.

    The first axis is x (e.g. detuning), the second y (``delta_T`` or ``delta_mu``).
    Symmetry is only measured when both axes are symmetric about zero.
    """
    cfg = result.config
    if len(cfg.axes) != 2:
        raise ConfigError("phase summary needs a two-axis sweep")
    xa, ya = cfg.axes
    xs, ys = np.array(xa.values), np.array(ya.values)
    z = result.grid(quantity)
    masked = np.where(np.isnan(z), -np.inf, z)
    top = masked.max()
    # origin symmetry makes the maximum a tie between opposite quadrants
    ties = np.argwhere(masked >= top - 1e-10)
    quads = sorted({_quadrant(xs[a], ys[b]) for a, b in ties})
    i, j = min(ties, key=lambda t: (_quadrant(xs[t[0]], ys[t[1]]) != 1, -masked[t[0], t[1]]))

    sym = None
    if np.allclose(xs, -xs[::-1], atol=1e-12) and np.allclose(ys, -ys[::-1], atol=1e-12):
        both = ~np.isnan(z) & ~np.isnan(z[::-1, ::-1])
        sym = float(np.abs(z - z[::-1, ::-1])[both].max()) if both.any() else 0.0

    lo = result.grid("min_eigenvalue")
    bad = np.nan_to_num(lo, nan=0.0) < -POSITIVITY_TOL
    labels, n = ndimage.label(bad)
    r11 = result.grid("rho11")
    regions = []
    for k, sl in enumerate(ndimage.find_objects(labels), start=1):
        region = labels == k
        regions.append(
            {
                "points": int(region.sum()),
                xa.name: [float(xs[sl[0]].min()), float(xs[sl[0]].max())],
                ya.name: [float(ys[sl[1]].min()), float(ys[sl[1]].max())],
                "min_rho11": float(np.nanmin(r11[region])),
            }
        )
    return PhaseSummary(
        x_name=xa.name,
        y_name=ya.name,
        peak=float(z[i, j]),
        peak_at=(float(xs[i]), float(ys[j])),
        peak_quadrant=_quadrant(xs[i], ys[j]),
        peak_quadrants=quads,
        symmetry_error=sym,
        violation_count=int(bad.sum()),
        min_rho11=float(np.nanmin(r11)),
        regions=regions,
        regions_origin_symmetric=bool(np.array_equal(bad, bad[::-1, ::-1])),
    )
