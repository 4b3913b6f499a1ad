import textwrap

import numpy as np
import pytest

from src.config.loader import load_config, load_project_config
from src.geometry import Ball, Box
from src.kernels import riesz_kernel
from src.spectral import assemble, build_mesh, eigenvalues


@pytest.fixture
def project_config_file(tmp_path):
    path = tmp_path / "config.ini"
    path.write_text(textwrap.dedent(f"""\
        [defaults]
        output_root = {tmp_path / 'results'}
        seed = 12345
        workers = 2
        lambda_points = 12
        max_cells = 2000
        mc_samples = 20000
        fd_tolerance = 1e-3
        null_ratio = 1e-10
        quad_epsrel = 1e-10
        s1_points = 32
        s2_order = 10
        """), encoding="utf-8")
    return str(path)


@pytest.fixture
def project_config(project_config_file):
    return load_project_config(project_config_file)


@pytest.fixture
def write_experiment(tmp_path):
    """在临时 experiment_configs 目录下写一个实验配置文件"""
    config_dir = tmp_path / "experiment_configs"
    config_dir.mkdir(exist_ok=True)

    def _write(name: str, body: str) -> str:
        path = config_dir / f"{name}.ini"
        path.write_text(textwrap.dedent(body), encoding="utf-8")
        return str(path)

    return _write


@pytest.fixture
def load_experiment(write_experiment, project_config):
    def _load(name: str, body: str):
        return load_config(write_experiment(name, body), project_config)

    return _load


@pytest.fixture(scope="session")
def square_mesh():
    return build_mesh(Box([1.0, 1.0]), 64)


@pytest.fixture(scope="session")
def disk_spectrum():
    """单位圆盘、α=0.6、约 300 个单元的离散谱"""
    kernel = riesz_kernel(2, 0.6)
    mesh = build_mesh(Ball(2), 300)
    matrix = assemble(mesh, kernel, workers=2)
    return kernel, mesh, matrix, eigenvalues(matrix, mesh.metadata(), kernel.descriptor())


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
