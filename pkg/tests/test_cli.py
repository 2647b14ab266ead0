import json
import math

import pytest

from besselrg.cli import (
    EXIT_CONFIG,
    EXIT_NUMERIC,
    EXIT_OK,
    RunConfig,
    main,
)


def run(args):
    return main(args)


def test_flow_csv(tmp_path):
    out = tmp_path / "flow.csv"
    code = run(["flow", "--alpha", "0.25", "--value-0", "-1", "--lambda-0", "1",
                "--n-points", "5", "--out", str(out)])
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "lambda,closed_form,ode_numeric,abs_diff"
    assert len(lines) == 6
    for line in lines[1:]:
        cells = line.split(",")
        assert float(cells[1]) == pytest.approx(-1.0, abs=1e-9)
        assert float(cells[3]) <= 1e-8


def test_flow_crosses_poles_with_periodic_columns(tmp_path):
    # alpha = -1 over three cycles: the ODE column restarts through the
    # blow-ups and both columns repeat with period e^pi
    out = tmp_path / "flow.csv"
    ladder = ",".join(f"{1.3 * math.exp(math.pi * n):.8f}" for n in range(4))
    code = run(["flow", "--alpha=-1", "--value-0", "0.4", "--lambda-0", "1",
                "--lambda-ladder", ladder, "--out", str(out)])
    assert code == EXIT_OK
    lines = out.read_text().splitlines()[1:]
    closed = [float(l.split(",")[1]) for l in lines]
    ode = [float(l.split(",")[2]) for l in lines]
    for col in (closed, ode):
        for v in col[1:]:
            assert v == pytest.approx(col[0], abs=1e-7)


def test_flow_blowup_partial_output(tmp_path):
    out = tmp_path / "flow.csv"
    # a ladder point sitting on a blow-up stops the ladder with exit 2
    from besselrg import BesselParameter, next_blowup
    from besselrg.rgflow import FlowKind
    pole = next_blowup(FlowKind.DIRICHLET, BesselParameter(-1.0), (1.0, 0.0))
    code = run(["flow", "--alpha=-1", "--value-0", "0.0", "--lambda-0", "1",
                "--lambda-ladder", f"1.5,3,{pole:.12f},28", "--out", str(out)])
    assert code == EXIT_NUMERIC
    lines = out.read_text().splitlines()
    assert len(lines) == 3  # header plus the two pre-blow-up rows


def test_fixed_points_json(tmp_path):
    out = tmp_path / "fp.json"
    code = run(["fixed-points", "--alpha", "0.25", "--out", str(out)])
    assert code == EXIT_OK
    data = json.loads(out.read_text())
    assert data["phase"] == "liquid"
    assert [fp["value"] for fp in data["fixed_points"]] == [-1.0, 0.0]
    assert [fp["stability"] for fp in data["fixed_points"]] == ["attractive", "repulsive"]


def test_fixed_points_solid_cycle(tmp_path):
    out = tmp_path / "fp.json"
    assert run(["fixed-points", "--alpha=-1", "--out", str(out)]) == EXIT_OK
    data = json.loads(out.read_text())
    assert data["fixed_points"] == []
    assert data["cycle_period"] == pytest.approx(math.pi)


def test_spectrum_exact_modes(tmp_path):
    out = tmp_path / "spec.csv"
    code = run(["spectrum", "--alpha", "0.25", "--kappa", "-1", "--mode", "exact",
                "--format", "csv", "--out", str(out)])
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "source,energy,rel_err"
    assert len(lines) == 2
    assert float(lines[1].split(",")[1]) == pytest.approx(-1.0)


def test_spectrum_empty_for_positive_kappa(tmp_path):
    out = tmp_path / "spec.csv"
    code = run(["spectrum", "--alpha", "0.09", "--kappa", "2", "--mode", "exact",
                "--format", "csv", "--out", str(out)])
    assert code == EXIT_OK
    assert len(out.read_text().splitlines()) == 1


def test_spectrum_critical_json(tmp_path):
    out = tmp_path / "spec.json"
    code = run(["spectrum", "--alpha", "0", "--nu", "0.5772156649015329",
                "--mode", "exact", "--format", "json", "--out", str(out)])
    assert code == EXIT_OK
    data = json.loads(out.read_text())
    assert data["rows"][0]["energy"] == pytest.approx(-4.0)


def test_transform_exp_reference(tmp_path):
    out = tmp_path / "tr.csv"
    code = run(["transform", "--function", "exp", "--transform-kind", "sine",
                "--p-nodes", "0.5,1,2", "--out", str(out)])
    assert code == EXIT_OK
    for line in out.read_text().splitlines()[1:]:
        assert float(line.split(",")[3]) < 1e-7


def test_phase_diagram(tmp_path):
    out = tmp_path / "pd.json"
    code = run(["phase-diagram", "--alphas=-1,0,0.5,2", "--out", str(out)])
    assert code == EXIT_OK
    data = json.loads(out.read_text())
    phases = [e["phase"] for e in data["entries"]]
    assert phases == ["solid", "critical", "liquid", "gas"]
    counts = [e["bound_state_count"] for e in data["entries"]]
    assert counts == ["infinite", "zero-or-one", "zero-or-one", "zero"]
    gas = data["entries"][3]
    assert gas["realizations"] == "unique"
    solid = data["entries"][0]
    assert solid["cycle_period"] == pytest.approx(math.pi)


def test_phase_diagram_quarter(tmp_path):
    out = tmp_path / "pd.json"
    assert run(["phase-diagram", "--alphas", "0.25", "--out", str(out)]) == EXIT_OK
    entry = json.loads(out.read_text())["entries"][0]
    assert entry["phase"] == "liquid"
    assert [fp["value"] for fp in entry["fixed_points"]] == [-1.0, 0.0]


def test_config_errors():
    assert run(["flow", "--alpha", "0.25"]) == EXIT_CONFIG          # missing value-0
    assert run(["spectrum", "--alpha", "0.09"]) == EXIT_CONFIG      # missing kappa
    assert run(["spectrum", "--alpha", "1.5", "--kappa", "-1"]) == EXIT_CONFIG
    assert run(["converge", "--alpha", "0.09", "--kappa", "-1"]) == EXIT_CONFIG
    assert run(["spectrum", "--alpha=-1", "--kappa", "2"]) == EXIT_CONFIG  # |kappa| != 1
    assert run(["flow", "--alpha", "0.25", "--value-0", "0",
                "--lambda-ladder", "5,3,1"]) == EXIT_CONFIG          # not ascending


def test_config_file_and_override(tmp_path):
    cfg = RunConfig(command="fixed-points", alpha=0.25)
    path = tmp_path / "cfg.json"
    path.write_text(cfg.to_json())
    out = tmp_path / "out.json"
    code = run(["fixed-points", "--config", str(path), "--alpha", "0.0",
                "--out", str(out)])
    assert code == EXIT_OK
    data = json.loads(out.read_text())
    assert data["alpha"] == 0.0  # CLI flag overrides the file value


def test_config_round_trip():
    cfg = RunConfig(command="spectrum", alpha=0.09, kappa="-1.0",
                    lambda_ladder=[10.0, 20.0], window=[-100.0, -1e-6])
    assert RunConfig.from_json(cfg.to_json()) == cfg


def test_config_rejects_unknown_fields(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"command": "flow", "bogus": 1}))
    assert run(["flow", "--config", str(path)]) == EXIT_CONFIG


def test_kappa_inf_token(tmp_path):
    out = tmp_path / "spec.csv"
    code = run(["spectrum", "--alpha", "0.09", "--kappa", "inf", "--mode", "exact",
                "--format", "csv", "--out", str(out)])
    assert code == EXIT_OK
    assert len(out.read_text().splitlines()) == 1  # empty spectrum
