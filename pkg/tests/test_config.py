import os

import pytest

from src.config import (
    ConfigError,
    ExperimentConfig,
    find_config_files,
    load_config,
    load_configs,
    load_project_config,
)
from src.config.loader import parse_list, parse_table, resolve_project_root

DISK = """\
    [experiment]
    description = disk
    tasks = spectrum,bounds

    [domain]
    kind = ball
    dimension = 2
    radius = 1.0

    [kernel]
    type = riesz
    alpha = 0.6

    [mesh]
    cells = 120

    [bounds]
    lower = true
    """


def test_parse_list_accepts_json_and_commas():
    assert parse_list("[1, 2.5]") == [1, 2.5]
    assert parse_list("spectrum, bounds") == ["spectrum", "bounds"]
    assert parse_list("3") == [3]


def test_parse_table():
    assert parse_table("0.5") == 0.5
    assert parse_table("[1, 2]") == (1.0, 2.0)
    assert parse_table("1.5, 0.5") == (1.5, 0.5)
    assert parse_table("") is None
    with pytest.raises(ConfigError):
        parse_table("a, b")


def test_project_config_defaults(project_config):
    assert project_config.seed == 12345
    assert project_config.workers == 2
    assert project_config.tolerance.mc_samples == 20000
    assert project_config.tolerance.sphere_order(3) == 10


def test_project_config_requires_defaults_section(tmp_path):
    path = tmp_path / "config.ini"
    path.write_text("[other]\nseed = 1\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_project_config(str(path))
    with pytest.raises(ConfigError):
        load_project_config(str(tmp_path / "missing.ini"))


def test_repository_project_config_loads():
    project = load_project_config(os.path.join(resolve_project_root(), "config.ini"))
    assert project.max_cells == 5000
    assert project.tolerance.null_ratio == 1e-10


def test_load_disk_experiment(load_experiment, project_config):
    cfg = load_experiment("disk", DISK)
    assert cfg.config_name == "disk"
    assert cfg.tasks == ("spectrum", "bounds")
    assert cfg.domain.params == {"radius": 1.0}
    assert cfg.kernel.alpha == 0.6
    assert cfg.mesh.cells == 120
    assert cfg.mesh.self_cell_rule == "polar"
    assert cfg.bounds.lower is True
    assert cfg.lambda_grid.points == project_config.lambda_points
    assert cfg.output_dir == os.path.abspath(os.path.join(project_config.output_root, "disk"))


def test_custom_kernel_tables_are_parsed(load_experiment):
    cfg = load_experiment("ellipse", """\
        [experiment]
        tasks = bounds
        [domain]
        kind = ellipse
        dimension = 2
        semi_axes = [2.0, 1.0]
        [kernel]
        type = custom
        alpha = 0.6
        symbol_f = [1.5, 1.0, 0.5, 1.0]
        amplitude = 0.1
        [output]
        dir = anisotropic
        """)
    assert cfg.kernel.symbol_f == (1.5, 1.0, 0.5, 1.0)
    assert cfg.kernel.amplitude == 0.1
    assert cfg.domain.params == {"semi_axes": [2.0, 1.0]}
    assert cfg.output_dir.endswith("anisotropic")


@pytest.mark.parametrize("body", [
    "[experiment]\ntasks = spectrum\n[domain]\nkind = torus\ndimension = 2\n[kernel]\ntype = riesz\nalpha = 1\n",
    "[experiment]\ntasks = spectrum\n[domain]\nkind = ball\ndimension = 2\n[kernel]\ntype = riesz\nalpha = 2.5\n",
    "[experiment]\ntasks = spectrum\n[domain]\nkind = ball\ndimension = 2\n[kernel]\ntype = helmholtz\n",
    "[experiment]\ntasks = spectrum\n[domain]\nkind = ball\ndimension = 2\n",
    "[experiment]\ntasks = spectrum,fourier\n",
    "[experiment]\ntasks = lemma\n[lambda]\nvalues = [0.1, -0.2]\n",
    "[experiment]\ntasks = lemma\n[lemma]\nprofiles = [1, 2, 3]\n",
    "[experiment]\ntasks = dirichlet\n[dirichlet]\nnu_max = many\n",
    "[experiment]\ntasks = spectrum\n[domain]\nkind = ball\ndimension = 2\n[kernel]\n"
    "type = riesz\nalpha = 0.5\n[mesh]\nself_cell_rule = nearest\n",
    "[experiment]\ntasks = spectrum\n[domain]\nkind = ball\ndimension = 2\n[kernel]\n"
    "type = riesz\nalpha = 0.5\n[mesh]\nrefinement_levels = 2\n",
    "[experiment]\ntasks = lemma\n[lambda]\ntrusted_fraction = 1.5\n",
])
def test_invalid_experiments_raise_config_error(write_experiment, project_config, body):
    with pytest.raises(ConfigError):
        load_config(write_experiment("broken", body), project_config)


def test_trusted_fraction_and_refinement_levels(load_experiment):
    cfg = load_experiment("disk", DISK)
    assert cfg.lambda_grid.trusted_fraction == 0.01
    assert cfg.mesh.refinement_levels == 0
    tuned = load_experiment("tuned", DISK.replace("cells = 120", "cells = 120\n    refinement_levels = 3")
                            + "\n    [lambda]\n    trusted_fraction = 0\n")
    assert tuned.lambda_grid.trusted_fraction == 0.0
    assert tuned.mesh.refinement_levels == 3


def test_task_sections_get_defaults(load_experiment):
    cfg = load_experiment("tasks", "[experiment]\ntasks = lemma,dirichlet\n")
    assert cfg.lemma.d == 3
    assert cfg.lemma.profiles[1] == (1.0, -1.0)
    assert cfg.dirichlet.sides == (1.0, 1.0, 1.0)
    assert cfg.mesh is None


def test_config_hash_ignores_location(load_experiment, write_experiment, project_config):
    a = load_experiment("first", DISK)
    b = load_experiment("first", DISK)
    assert a.config_hash() == b.config_hash()
    assert a.with_overrides(output_dir="/elsewhere").config_hash() == a.config_hash()
    assert a.with_overrides(seed=7).config_hash() != a.config_hash()


def test_with_overrides(load_experiment):
    cfg = load_experiment("disk", DISK)
    changed = cfg.with_overrides(seed=3, mesh_cells=64, lambda_points=5, output_dir="/tmp/x")
    assert isinstance(changed, ExperimentConfig)
    assert (changed.seed, changed.mesh.cells, changed.lambda_grid.points) == (3, 64, 5)
    assert changed.output_dir == "/tmp/x"
    assert cfg.mesh.cells == 120


def test_find_and_load_configs(write_experiment, project_config_file, tmp_path):
    write_experiment("a", DISK)
    write_experiment("b", "[experiment]\ntasks = lemma\n")
    write_experiment("off", "[experiment]\nenabled = false\ntasks = lemma\n")
    config_dir = str(tmp_path / "experiment_configs")

    assert [os.path.basename(f) for f in find_config_files(None, config_dir)] == ["a.ini", "b.ini", "off.ini"]
    assert [os.path.basename(f) for f in find_config_files("b.ini, missing.ini", config_dir)] == ["b.ini"]
    assert [os.path.basename(f) for f in find_config_files("a", config_dir)] == ["a.ini"]

    configs = load_configs(None, config_dir, project_config_file)
    assert [c.config_name for c in configs] == ["a", "b"]
    with pytest.raises(ConfigError):
        load_configs("nothing*.ini", config_dir, project_config_file)


def test_shipped_experiment_configs_load():
    root = resolve_project_root()
    configs = load_configs(None, os.path.join(root, "experiment_configs"), os.path.join(root, "config.ini"))
    names = {c.config_name for c in configs}
    assert "demo" not in names
    assert {"disk_riesz", "cube_dirichlet", "lemma"} <= names
