import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union

from ..geometry.sphere import DEFAULT_S1_POINTS, DEFAULT_S2_ORDER

TableSpec = Union[None, float, Tuple[float, ...]]


@dataclass(frozen=True)
class DomainSpec:
    kind: str
    dimension: int
    params: Dict[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class KernelSpec:
    type: str
    alpha: Optional[float] = None
    kappa: Optional[float] = None
    amplitude: TableSpec = None
    symbol_f: TableSpec = None
    g: TableSpec = None


@dataclass(frozen=True)
class MeshSpec:
    cells: int
    self_cell_rule: str = "polar"
    max_cells: int = 5000
    # 0 表示不做加密研究
    refinement_levels: int = 0


@dataclass(frozen=True)
class LambdaGridSpec:
    points: int = 30
    low_ratio: float = 1.0 / 200.0
    high_ratio: float = 0.5
    values: Tuple[float, ...] = ()
    # 0 表示不按离散谱截断网格下端
    trusted_fraction: float = 0.01


@dataclass(frozen=True)
class BoundsSpec:
    upper: bool = True
    lower: bool = False
    counting: bool = True
    tau_points: int = 400


@dataclass(frozen=True)
class LemmaSpec:
    profiles: Tuple[Tuple[float, float], ...] = ((1.0, 0.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0))
    alpha: float = 1.0
    d: int = 3
    mus: Tuple[float, ...] = (1e-2, 1e-3, 1e-4)


@dataclass(frozen=True)
class DirichletSpec:
    sides: Tuple[float, ...] = (1.0, 1.0, 1.0)
    nu_min: Optional[float] = None
    nu_max: float = 500.0
    points: int = 50


@dataclass(frozen=True)
class EtaSpec:
    directions: int = 16
    radii_points: int = 8
    monte_carlo: bool = True


@dataclass(frozen=True)
class ToleranceSpec:
    mc_samples: int = 1_000_000
    fd_tolerance: float = 1e-3
    null_ratio: float = 1e-10
    quad_epsrel: float = 1e-10
    s1_points: int = DEFAULT_S1_POINTS
    s2_order: int = DEFAULT_S2_ORDER

    def sphere_order(self, d: int) -> Optional[int]:
        return {2: self.s1_points, 3: self.s2_order}.get(d)


@dataclass(frozen=True)
class ProjectConfig:
    output_root: str
    seed: int
    workers: int
    lambda_points: int
    max_cells: int
    tolerance: ToleranceSpec


@dataclass(frozen=True)
class ExperimentConfig:
    config_path: str
    config_name: str
    enabled: bool
    description: str
    tasks: Tuple[str, ...]
    domain: Optional[DomainSpec]
    kernel: Optional[KernelSpec]
    mesh: Optional[MeshSpec]
    lambda_grid: LambdaGridSpec
    bounds: BoundsSpec
    lemma: Optional[LemmaSpec]
    dirichlet: Optional[DirichletSpec]
    eta: EtaSpec
    tolerance: ToleranceSpec
    seed: int
    workers: int
    output_dir: str

    def to_dict(self) -> Dict[str, object]:
        return dataclasses.asdict(self)

    def config_hash(self) -> str:
        """解析后配置的规范 JSON 的 sha256（不含文件位置与输出目录）"""
        payload = self.to_dict()
        payload.pop("config_path")
        payload.pop("output_dir")
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def with_overrides(self, seed: Optional[int] = None, mesh_cells: Optional[int] = None,
                       lambda_points: Optional[int] = None, output_dir: Optional[str] = None) -> "ExperimentConfig":
        """命令行参数覆盖配置值"""
        changes: Dict[str, object] = {}
        if seed is not None:
            changes["seed"] = seed
        if mesh_cells is not None and self.mesh is not None:
            changes["mesh"] = dataclasses.replace(self.mesh, cells=mesh_cells)
        if lambda_points is not None:
            changes["lambda_grid"] = dataclasses.replace(self.lambda_grid, points=lambda_points)
        if output_dir is not None:
            changes["output_dir"] = output_dir
        return dataclasses.replace(self, **changes)
