import json
import os

import numpy as np
import pytest

import main
from src.pipeline import run_experiment
from src.pipeline.report import (
    REPORT_COLUMNS,
    BoundCurve,
    read_csv,
    read_json,
    strip_timestamp,
    summary_lines,
    write_report,
)

DISK = """\
    [experiment]
    tasks = spectrum,bounds

    [domain]
    kind = ball
    dimension = 2

    [kernel]
    type = riesz
    alpha = 0.6

    [mesh]
    cells = 150

    [lambda]
    points = 10

    [bounds]
    lower = true
    tau_points = 200
    """


def test_report_round_trip(tmp_path):
    lam = np.array([0.1, 0.2, 0.4])
    curve = BoundCurve(
        lam=lam,
        columns={"riesz_empirical": np.array([1.0 / 3.0, 0.1, 0.0]),
                 "upper_bound": np.array([2.0, 1.0, np.pi])},
        metadata={"config_name": "unit"},
        dominance={"upper_ok": True})
    csv_path, json_path = write_report(curve, str(tmp_path))

    frame = read_csv(csv_path)
    assert list(frame.columns) == ["lambda", *REPORT_COLUMNS]
    document = read_json(json_path)
    for name in ("lambda", "riesz_empirical", "upper_bound"):
        assert np.array_equal(frame[name].to_numpy(), document["data"][name])
    assert np.isnan(document["data"]["lower_leading"]).all()
    assert frame["upper_bound"].iloc[2] == np.pi
    assert document["metadata"]["dominance"] == {"upper_ok": True}
    assert curve.dominance_ok


def test_disk_experiment_writes_reports(load_experiment):
    cfg = load_experiment("disk", DISK)
    summary = run_experiment(cfg)
    assert summary["dominance_ok"] is True
    assert summary["spectrum"]["negative_count"] == 0

    for name in ("report.csv", "report.json", "spectrum.csv", "spectrum.json"):
        assert os.path.exists(os.path.join(cfg.output_dir, name))

    report = read_json(os.path.join(cfg.output_dir, "report.json"))
    metadata = report["metadata"]
    assert metadata["config_hash"] == cfg.config_hash()
    assert metadata["lower_bound"]["gamma"] < 0
    assert metadata["dominance"]["upper_ok"] is True
    assert metadata["dominance"]["counting_ok"] is True
    tau = metadata["tau_check"]
    assert abs(tau["tau_grid_min"] - tau["tau_optimal"]) <= tau["grid_step"]

    data = report["data"]
    assert data["lambda"].size == 10
    assert np.all(data["riesz_empirical"] <= data["upper_bound"])
    assert np.all(data["lower_second"] < 0)

    spectrum = read_csv(os.path.join(cfg.output_dir, "spectrum.csv"))
    assert list(spectrum.columns) == ["k", "lambda_k", "null"]
    assert spectrum["k"].iloc[0] == 1


def test_spectrum_task_writes_refinement_table(load_experiment):
    cfg = load_experiment("square_refined", """\
        [experiment]
        tasks = spectrum
        [domain]
        kind = box
        dimension = 2
        sides = [1.0, 1.0]
        [kernel]
        type = riesz
        alpha = 0.6
        [mesh]
        cells = 256
        refinement_levels = 3
        """)
    summary = run_experiment(cfg)
    assert np.isfinite(summary["spectrum"]["refinement_order"])
    table = read_csv(os.path.join(cfg.output_dir, "refinement.csv"))
    assert list(table["cells"]) == [16, 64, 256]
    assert np.all(np.diff(table["lambda_max"]) > 0)
    document = read_json(os.path.join(cfg.output_dir, "refinement.json"))
    assert document["metadata"]["order"] == pytest.approx(summary["spectrum"]["refinement_order"])


def test_reports_are_reproducible(load_experiment, tmp_path):
    cfg = load_experiment("disk", DISK)
    first = cfg.with_overrides(output_dir=str(tmp_path / "first"))
    second = cfg.with_overrides(output_dir=str(tmp_path / "second"))
    run_experiment(first)
    run_experiment(second)
    for name in ("report.json", "spectrum.json"):
        assert strip_timestamp(os.path.join(first.output_dir, name)) == \
            strip_timestamp(os.path.join(second.output_dir, name))
    with open(os.path.join(first.output_dir, "report.csv"), encoding="utf-8") as a, \
            open(os.path.join(second.output_dir, "report.csv"), encoding="utf-8") as b:
        assert a.read() == b.read()


def test_box_domain_skips_lower_bound(load_experiment):
    cfg = load_experiment("square", """\
        [experiment]
        tasks = bounds
        [domain]
        kind = box
        dimension = 2
        sides = [1.0, 1.0]
        [kernel]
        type = riesz
        alpha = 0.6
        [mesh]
        cells = 64
        [lambda]
        points = 4
        [bounds]
        lower = true
        """)
    run_experiment(cfg)
    report = read_json(os.path.join(cfg.output_dir, "report.json"))
    assert "skipped" in report["metadata"]["lower_bound"]
    assert np.isnan(report["data"]["lower_leading"]).all()


def test_helmholtz_experiment_uses_general_bounds(load_experiment):
    cfg = load_experiment("helmholtz", """\
        [experiment]
        tasks = bounds
        [domain]
        kind = box
        dimension = 2
        sides = [1.0, 1.0]
        [kernel]
        type = helmholtz
        kappa = 1.0
        [mesh]
        cells = 64
        [lambda]
        points = 4
        """)
    summary = run_experiment(cfg)
    assert summary["dominance_ok"] is True
    report = read_json(os.path.join(cfg.output_dir, "report.json"))
    assert report["metadata"]["kernel"]["type"] == "helmholtz"
    assert np.all(report["data"]["counting_empirical"] <= report["data"]["counting_bound"])


def test_lemma_task(load_experiment):
    cfg = load_experiment("lemma", """\
        [experiment]
        tasks = lemma
        [lemma]
        profiles = [[1, -1], [0, 1]]
        mus = [1e-2, 1e-3]
        """)
    summary = run_experiment(cfg)
    assert summary["lemma"] == 4
    table = read_csv(os.path.join(cfg.output_dir, "lemma.csv"))
    mixed = table[(table["c1"] == 1) & (table["c2"] == -1)]
    assert mixed["r_minus"].notna().all()
    assert np.allclose(mixed["numeric"], mixed["exact"], rtol=1e-10)
    assert table[table["c1"] == 0]["leading"].isna().all()


def test_dirichlet_task(load_experiment):
    cfg = load_experiment("cube", """\
        [experiment]
        tasks = dirichlet
        [dirichlet]
        sides = [1.0, 1.0, 1.0]
        nu_min = 29.608813203268074
        nu_max = 500
        points = 50
        """)
    summary = run_experiment(cfg)
    assert summary["dominance_ok"] is True
    assert summary["dirichlet"]["pl_ok"] is True
    document = read_json(os.path.join(cfg.output_dir, "dirichlet.json"))
    assert 0.7 <= document["metadata"]["weyl_ratio_at_nu_max"] <= 1.0
    assert document["data"]["nu"].size == 50


def test_eta_task(load_experiment):
    cfg = load_experiment("eta", """\
        [experiment]
        tasks = eta
        [domain]
        kind = ball
        dimension = 2
        [eta]
        directions = 2
        radii_points = 3
        """)
    run_experiment(cfg)
    table = read_csv(os.path.join(cfg.output_dir, "eta.csv"))
    assert len(table) == 2 * 4
    assert np.allclose(table["a_coefficient"], -2.0, rtol=1e-2)
    assert (np.abs(table["eta_mc"] - table["eta"]) <= 4.0 * table["eta_mc_stderr"] + 1e-12).all()


def test_summary_lines():
    lines = summary_lines([{"config_name": "a", "output_dir": "/x", "dominance_ok": False}])
    assert lines == ["[a] VIOLATION -> /x"]


def test_main_exit_codes(write_experiment, tmp_path, monkeypatch):
    out = str(tmp_path / "out")
    lemma = write_experiment("lemma_cli", "[experiment]\ntasks = lemma\n[lemma]\nmus = [1e-2]\n")
    assert main.main(["run", "--config", lemma, "--out", out]) == 0
    assert os.path.exists(os.path.join(out, "lemma_cli", "lemma.json"))

    broken = write_experiment("broken_cli", "[experiment]\ntasks = spectrum\n[domain]\nkind = torus\n")
    assert main.main(["run", "--config", broken, "--out", out]) == 2

    too_big = write_experiment("too_big", """\
        [experiment]
        tasks = spectrum
        [domain]
        kind = ball
        dimension = 2
        [kernel]
        type = riesz
        alpha = 0.6
        [mesh]
        cells = 400
        max_cells = 100
        """)
    assert main.main(["spectrum", "--config", too_big, "--out", out]) == 3

    monkeypatch.setattr(main, "run_experiment",
                        lambda cfg, tasks: {"config_name": cfg.config_name, "dominance_ok": False})
    assert main.main(["run", "--config", lemma, "--out", out]) == 0
    assert main.main(["run", "--config", lemma, "--out", out, "--assert-bounds"]) == 4


def test_main_overrides_output_directory(write_experiment, tmp_path):
    cfg = write_experiment("cube_cli", "[experiment]\ntasks = dirichlet\n[dirichlet]\nnu_max = 100\npoints = 5\n")
    out = tmp_path / "cli"
    assert main.main(["dirichlet", "--config", cfg, "--out", str(out), "--seed", "9"]) == 0
    with open(out / "cube_cli" / "dirichlet.json", encoding="utf-8") as f:
        assert json.load(f)["metadata"]["seed"] == 9
