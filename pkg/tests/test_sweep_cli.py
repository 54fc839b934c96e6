import csv
import io
import json

import numpy as np
import pytest

from twoqubit_ness import cli
from twoqubit_ness.config import (
    Mode,
    Axis,
    ConfigError,
    RandomSpec,
    SweepConfig,
    bundled_config,
    bundled_names,
    parse_config,
    resolve,
)
from twoqubit_ness.errors import UnsupportedClosedFormError
from twoqubit_ness.output import format_value, render_csv, write_matrix
from twoqubit_ness.reservoirs import Statistics
from twoqubit_ness.sweep import RESULT_COLUMNS, evaluate_point, phase_summary, run_comparison, run_sweep


def small(**extra):
    raw = {
        "schema_version": 1,
        "statistics": "boson",
        "mode": "both",
        "fixed": {"omega": 10, "T1": 2},
        "axes": [{"name": "lam", "values": [4, 6]}, {"name": "delta_T", "linspace": [0, 3, 4]}],
    }
    raw.update(extra)
    return raw


@pytest.mark.parametrize(
    "raw, message",
    [
        ({"schema_version": 2}, "schema_version"),
        (small(fixed={"omega": 10, "bogus": 1}), "unknown fixed"),
        (small(axes=[{"name": "T", "values": [2, 1]}]), "increasing"),
        (small(axes=[{"name": "T", "values": []}]), "empty"),
        (small(axes=[{"name": "T", "linspace": [0, 1]}]), "linspace"),
        (small(fixed={"omega": 10, "lam": 6}), "both fixed and swept"),
        (small(statistics="anyon"), "anyon"),
        (small(axes=[]), "neither"),
        (small(phase_diagram=True), "omega_mean"),
        (small(fixed={"omega": "ten"}), "number"),
    ],
)
def test_config_errors(raw, message):
    with pytest.raises(ConfigError, match=message):
        parse_config(raw)


def test_bundled_configs_parse():
    names = bundled_names()
    assert {"boson_equilibrium", "fermion_phase_diagram", "random_comparison"} <= set(names)
    for n in names:
        assert bundled_config(n).name == n


def test_resolve_forms():
    p, b1, b2 = resolve({"omega_mean": 10, "detuning": 2, "lam": 6, "T_mean": 3, "delta_T": 2}, Statistics.BOSON)
    assert (p.omega1, p.omega2) == (11, 9)
    assert (b1.temperature, b2.temperature) == (2, 4)
    p, b1, b2 = resolve({"omega": 10, "lam": 6, "T": 1.5, "mu1": 4, "delta_mu": 5}, Statistics.FERMION)
    assert (b1.chemical_potential, b2.chemical_potential) == (4, 9)
    assert b1.temperature == b2.temperature == 1.5
    _, b1, b2 = resolve({"omega": 10, "lam": 6, "T": 2, "J1": 0.5, "J2": 2}, Statistics.BOSON)
    assert (b1.spectral.J, b2.spectral.J) == (0.5, 2)
    with pytest.raises(ConfigError):
        resolve({"omega": 10, "T": 2}, Statistics.BOSON)
    with pytest.raises(ConfigError):
        resolve({"omega": 10, "lam": 6}, Statistics.BOSON)


def test_points_row_major():
    cfg = parse_config(small())
    pts = cfg.points()
    assert cfg.shape == (2, 4) and len(pts) == 8
    assert [p["lam"] for p in pts] == [4] * 4 + [6] * 4
    assert [p["delta_T"] for p in pts[:4]] == [0, 1, 2, 3]


def test_sweep_is_deterministic_across_workers():
    cfg = parse_config(small())
    a = run_sweep(cfg, workers=1)
    b = run_sweep(cfg, workers=2)
    assert render_csv(a) == render_csv(b)
    assert [r["index"] for r in a.rows] == list(range(8))
    assert np.all(a.column("analytic_diff") < 1e-10)
    assert a.grid("concurrence").shape == (2, 4)


def test_csv_layout():
    res = run_sweep(parse_config(small()), workers=1)
    text = render_csv(res)
    doc, body = text.split("\n", 1)
    assert doc.startswith("# ") and "concurrence:" in doc
    rows = list(csv.DictReader(io.StringIO(body)))
    assert list(rows[0])[-len(RESULT_COLUMNS):] == list(RESULT_COLUMNS)
    assert len(rows) == 8
    # 17 significant digits round-trip exactly
    for r, row in zip(rows, res.rows):
        assert float(r["concurrence"]) == row["concurrence"]
        assert float(r["I2"]) == row["I2"]
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(True) == "true" and format_value(float("nan")) == "nan"


def test_matrix_layout(tmp_path):
    res = run_sweep(parse_config(small()), workers=1)
    out = tmp_path / "m.dat"
    write_matrix(res, out)
    lines = [line for line in out.read_text().splitlines() if not line.startswith("#")]
    head = [float(x) for x in lines[0].split()]
    assert head == [4, 0, 1, 2, 3]
    z = np.array([[float(x) for x in line.split()] for line in lines[1:]])
    assert list(z[:, 0]) == [4, 6]
    assert np.array_equal(z[:, 1:], res.grid("concurrence"))


def test_phase_mode_marks_out_of_range_points():
    raw = {
        "schema_version": 1,
        "statistics": "boson",
        "phase_diagram": True,
        "fixed": {"omega_mean": 10, "lam": 6, "T_mean": 3},
        "axes": [{"name": "detuning", "values": [-20, 0, 5]}, {"name": "delta_T", "values": [-7, 0, 2]}],
    }
    res = run_sweep(parse_config(raw), workers=1)
    status = [r["status"] for r in res.rows]
    # detuning=-20 is outside the range everywhere; delta_T=-7 exceeds 2*T_mean
    assert sum(s.startswith("invalid") for s in status) == 5
    assert res.invalid_count == 5
    assert np.isnan(res.grid("concurrence")[0, 1])
    assert [status[i] for i in (4, 5, 7, 8)] == ["ok"] * 4
    s = phase_summary(res)
    assert s.peak == pytest.approx(max(res.rows[i]["concurrence"] for i in (4, 5, 7, 8)))


def test_evaluate_point_invalid_temperature():
    row = evaluate_point(0, {"omega": 10, "lam": 6, "T": -1}, Statistics.BOSON)
    assert row["status"].startswith("invalid") and row["positivity_ok"] is False


def test_analytic_mode_rejects_unsupported():
    # rejected up front, before any point is evaluated
    with pytest.raises(ConfigError, match="J1 == J2"):
        run_sweep(parse_config(small(fixed={"omega": 10, "T1": 2, "J1": 1, "J2": 2})), workers=1)
    with pytest.raises(ConfigError, match="secular"):
        run_sweep(parse_config(small()), workers=1, secular=True)
    with pytest.raises(UnsupportedClosedFormError):
        evaluate_point(0, {"omega": 10, "lam": 6, "T": 2, "J1": 1, "J2": 2}, Statistics.BOSON, mode=Mode.BOTH)


def test_comparison_report():
    cfg = SweepConfig(statistics="boson", fixed={}, random=RandomSpec(count=30))
    rep = run_comparison(cfg, seed=3, workers=1)
    again = run_comparison(cfg, seed=3, workers=1)
    assert rep.count == 30 and rep.passed and rep.max_diff < 1e-10
    assert rep.max_diff == again.max_diff
    assert rep.equal_bath_max_rho34 < 1e-12


def write_cfg(tmp_path, raw, name="c.json"):
    p = tmp_path / name
    p.write_text(json.dumps(raw))
    return str(p)


def test_cli_sweep_csv_and_plot(tmp_path, capsys):
    out = tmp_path / "o.csv"
    rc = cli.main(["sweep", write_cfg(tmp_path, small()), "--output", str(out), "--workers", "1", "--plot"])
    assert rc == 0
    assert out.read_text().startswith("# ")
    png = out.with_suffix(".png")
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_cli_stdout(tmp_path, capsys):
    assert cli.main(["sweep", write_cfg(tmp_path, small()), "--output", "-", "--workers", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("# ") and len(lines) == 10


def test_cli_phase_diagram_matrix(tmp_path, capsys):
    raw = {
        "schema_version": 1,
        "statistics": "fermion",
        "fixed": {"omega_mean": 10, "lam": 6, "T": 1.5, "mu_mean": 4},
        "axes": [{"name": "detuning", "linspace": [-4, 4, 5]}, {"name": "delta_mu", "linspace": [-10, 10, 5]}],
    }
    out = tmp_path / "pd.dat"
    rc = cli.main(["phase-diagram", write_cfg(tmp_path, raw), "--format", "matrix", "--output", str(out), "--plot"])
    assert rc == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["x_name"] == "detuning" and summary["peak"] > 0
    assert out.with_suffix(".png").exists()


def test_cli_exit_codes(tmp_path, capsys):
    bad = write_cfg(tmp_path, {"schema_version": 1, "fixed": {"omega": 10}}, "bad.json")
    assert cli.main(["sweep", bad]) == 1
    assert cli.main(["sweep", "no_such_config_anywhere"]) == 1
    assert cli.main(["sweep", write_cfg(tmp_path, small()), "--workers", "0"]) == 1
    blocked = tmp_path / "file"
    blocked.write_text("")
    rc = cli.main(["sweep", write_cfg(tmp_path, small()), "--workers", "1", "--output", str(blocked / "x.csv")])
    assert rc == 3
    (tmp_path / "broken.json").write_text("{")
    assert cli.main(["sweep", str(tmp_path / "broken.json")]) == 1


def test_cli_compare(tmp_path, capsys):
    raw = {"schema_version": 1, "random": {"count": 40}}
    out = tmp_path / "cmp.csv"
    assert cli.main(["compare", write_cfg(tmp_path, raw), "--seed", "7", "--workers", "1", "--output", str(out)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["count"] == 40 and report["max_diff"] < 1e-10
    assert len(out.read_text().splitlines()) == 42


def test_cli_compare_failure(monkeypatch, tmp_path, capsys):
    from twoqubit_ness import sweep

    real = sweep.general_steady_state

    def skewed(*a, **k):
        s = real(*a, **k)
        s.rho.entries[0, 0] += 1e-6
        return s

    monkeypatch.setattr(sweep, "general_steady_state", skewed)
    raw = {"schema_version": 1, "random": {"count": 5}}
    assert cli.main(["compare", write_cfg(tmp_path, raw), "--workers", "1"]) == 2


def test_cli_configs_and_selfcheck(tmp_path, capsys):
    assert cli.main(["configs"]) == 0
    assert "boson_equilibrium" in capsys.readouterr().out
    out = tmp_path / "sc.json"
    assert cli.main(["selfcheck", "--only", "boson_t_max_bracket", "equilibrium_populations_gibbs",
                     "--output", str(out)]) == 0  # fmt: skip
    summary = json.loads(out.read_text())
    assert summary["passed"] and len(summary["checks"]) == 2


def test_axis_direct_construction():
    with pytest.raises(ConfigError):
        Axis("nonsense", (1.0,))
    assert Axis("T", (1.0, 2.0)).values == (1.0, 2.0)
