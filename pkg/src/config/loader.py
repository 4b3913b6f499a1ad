import configparser
import glob
import json
import logging
import os
import os.path
from typing import List, Optional, Tuple

from .schemas import (
    BoundsSpec,
    DirichletSpec,
    DomainSpec,
    EtaSpec,
    ExperimentConfig,
    KernelSpec,
    LambdaGridSpec,
    LemmaSpec,
    MeshSpec,
    ProjectConfig,
    ToleranceSpec,
)

logger = logging.getLogger("RieszBounds.Config")

DOMAIN_KINDS = ("ball", "ellipse", "ellipsoid", "box")
KERNEL_TYPES = ("riesz", "helmholtz", "custom")
TASKS = ("spectrum", "bounds", "lemma", "eta", "dirichlet")
SELF_CELL_RULES = ("polar", "ball")


class ConfigError(Exception):
    """配置加载异常"""
    pass


def resolve_project_root() -> str:
    """解析项目根目录路径"""
    current_file = os.path.abspath(__file__)
    return os.path.dirname(os.path.dirname(os.path.dirname(current_file)))


def parse_list(val: str) -> list:
    """JSON 或逗号分隔的列表"""
    try:
        parsed = json.loads(val)
        return parsed if isinstance(parsed, list) else [parsed]
    except Exception:
        return [v.strip() for v in val.split(',') if v.strip()]


def parse_floats(val: str) -> Tuple[float, ...]:
    try:
        return tuple(float(v) for v in parse_list(val))
    except (TypeError, ValueError):
        raise ConfigError(f"无法解析为数值列表: {val}")


def parse_table(val: Optional[str]):
    """球面函数：单个数值（常数）或 S¹ 等距节点上的表值"""
    if val is None or not val.strip():
        return None
    try:
        parsed = json.loads(val)
    except Exception:
        return parse_floats(val)
    if isinstance(parsed, (int, float)):
        return float(parsed)
    if isinstance(parsed, list):
        return tuple(float(v) for v in parsed)
    raise ConfigError(f"无法解析球面函数: {val}")


def _tolerance(section: configparser.SectionProxy, base: ToleranceSpec) -> ToleranceSpec:
    return ToleranceSpec(
        mc_samples=section.getint('mc_samples', base.mc_samples),
        fd_tolerance=section.getfloat('fd_tolerance', base.fd_tolerance),
        null_ratio=section.getfloat('null_ratio', base.null_ratio),
        quad_epsrel=section.getfloat('quad_epsrel', base.quad_epsrel),
        s1_points=section.getint('s1_points', base.s1_points),
        s2_order=section.getint('s2_order', base.s2_order),
    )


def load_project_config(path: Optional[str] = None) -> ProjectConfig:
    """加载项目配置文件（严格要求）"""
    config = configparser.ConfigParser()
    project_config_path = path or os.path.join(resolve_project_root(), "config.ini")

    if not os.path.exists(project_config_path):
        raise ConfigError(f"项目配置文件不存在: {project_config_path}")

    try:
        config.read(project_config_path, encoding='utf-8')
    except Exception as e:
        raise ConfigError(f"读取项目配置文件失败: {str(e)}")

    if not config.has_section('defaults'):
        raise ConfigError("项目配置文件缺少[defaults]节")
    defaults = config['defaults']

    required_keys = ['output_root', 'seed']
    for key in required_keys:
        if not defaults.get(key):
            raise ConfigError(f"项目配置[defaults]节缺少必须项: {key}")

    try:
        return ProjectConfig(
            output_root=defaults.get('output_root'),
            seed=defaults.getint('seed'),
            workers=defaults.getint('workers', 4),
            lambda_points=defaults.getint('lambda_points', 30),
            max_cells=defaults.getint('max_cells', 5000),
            tolerance=_tolerance(defaults, ToleranceSpec()),
        )
    except ValueError as e:
        raise ConfigError(f"项目配置[defaults]节数值无效: {str(e)}")


def _domain(config: configparser.ConfigParser) -> Optional[DomainSpec]:
    if not config.has_section('domain'):
        return None
    section = config['domain']
    kind = section.get('kind', '').lower()
    if kind not in DOMAIN_KINDS:
        raise ConfigError(f"不支持的区域类型: {kind or '(空)'}，可选 {', '.join(DOMAIN_KINDS)}")
    dimension = section.getint('dimension')
    if not dimension or dimension < 1:
        raise ConfigError("[domain] 需要正整数 dimension")

    params = {}
    if kind == 'ball':
        params['radius'] = section.getfloat('radius', 1.0)
    elif kind in ('ellipse', 'ellipsoid'):
        params['semi_axes'] = list(parse_floats(section.get('semi_axes', '')))
    else:
        params['sides'] = list(parse_floats(section.get('sides', '')))
    return DomainSpec(kind=kind, dimension=dimension, params=params)


def _kernel(config: configparser.ConfigParser) -> Optional[KernelSpec]:
    if not config.has_section('kernel'):
        return None
    section = config['kernel']
    kernel_type = section.get('type', '').lower()
    if kernel_type not in KERNEL_TYPES:
        raise ConfigError(f"不支持的核类型: {kernel_type or '(空)'}，可选 {', '.join(KERNEL_TYPES)}")

    alpha = section.getfloat('alpha', None)
    kappa = section.getfloat('kappa', None)
    if kernel_type in ('riesz', 'custom') and alpha is None:
        raise ConfigError(f"{kernel_type} 核需要 alpha")
    if kernel_type == 'helmholtz' and kappa is None:
        raise ConfigError("helmholtz 核需要 kappa")

    spec = KernelSpec(type=kernel_type, alpha=alpha, kappa=kappa,
                      amplitude=parse_table(section.get('amplitude')),
                      symbol_f=parse_table(section.get('symbol_f')),
                      g=parse_table(section.get('g')))
    if kernel_type == 'custom' and (spec.amplitude is None or spec.symbol_f is None):
        raise ConfigError("custom 核需要 amplitude 与 symbol_f")
    return spec


def _lemma(config: configparser.ConfigParser) -> Optional[LemmaSpec]:
    if not config.has_section('lemma'):
        return None
    section = config['lemma']
    base = LemmaSpec()
    profiles = base.profiles
    if section.get('profiles'):
        raw = parse_list(section.get('profiles'))
        try:
            profiles = tuple((float(c1), float(c2)) for c1, c2 in raw)
        except (TypeError, ValueError):
            raise ConfigError("[lemma] profiles 需要 [[C1, C2], ...] 形式")
    return LemmaSpec(
        profiles=profiles,
        alpha=section.getfloat('alpha', base.alpha),
        d=section.getint('d', base.d),
        mus=parse_floats(section.get('mus')) if section.get('mus') else base.mus,
    )


def _dirichlet(config: configparser.ConfigParser) -> Optional[DirichletSpec]:
    if not config.has_section('dirichlet'):
        return None
    section = config['dirichlet']
    base = DirichletSpec()
    return DirichletSpec(
        sides=parse_floats(section.get('sides')) if section.get('sides') else base.sides,
        nu_min=section.getfloat('nu_min', None),
        nu_max=section.getfloat('nu_max', base.nu_max),
        points=section.getint('points', base.points),
    )


def _section(config: configparser.ConfigParser, name: str) -> configparser.SectionProxy:
    if not config.has_section(name):
        config.add_section(name)
    return config[name]


def load_config(config_path: str, project_config: ProjectConfig) -> ExperimentConfig:
    """加载单个实验配置文件；失败时抛出 ConfigError"""
    config = configparser.ConfigParser(inline_comment_prefixes=(';',))
    config_name = os.path.splitext(os.path.basename(config_path))[0]

    try:
        read = config.read(config_path, encoding='utf-8')
    except Exception as e:
        raise ConfigError(f"读取配置文件 {config_path} 失败: {str(e)}")
    if not read:
        raise ConfigError(f"配置文件不存在: {config_path}")

    try:
        experiment = _section(config, 'experiment')
        tasks = tuple(t.lower() for t in parse_list(experiment.get('tasks', 'spectrum,bounds')))
        unknown = [t for t in tasks if t not in TASKS]
        if unknown:
            raise ConfigError(f"未知任务: {', '.join(unknown)}，可选 {', '.join(TASKS)}")

        domain = _domain(config)
        kernel = _kernel(config)
        if any(t in tasks for t in ('spectrum', 'bounds')) and (domain is None or kernel is None):
            raise ConfigError("spectrum/bounds 任务需要 [domain] 与 [kernel] 节")
        if 'eta' in tasks and domain is None:
            raise ConfigError("eta 任务需要 [domain] 节")
        if domain is not None and kernel is not None and kernel.type != 'helmholtz' \
                and not (0.0 < kernel.alpha < domain.dimension):
            raise ConfigError(f"α 必须在 (0, d) 内: α={kernel.alpha}, d={domain.dimension}")

        mesh = None
        if 'spectrum' in tasks or 'bounds' in tasks:
            mesh_section = _section(config, 'mesh')
            mesh = MeshSpec(
                cells=mesh_section.getint('cells', 400),
                self_cell_rule=mesh_section.get('self_cell_rule', 'polar'),
                max_cells=mesh_section.getint('max_cells', project_config.max_cells),
                refinement_levels=mesh_section.getint('refinement_levels', 0),
            )
            if mesh.self_cell_rule not in SELF_CELL_RULES:
                raise ConfigError(f"未知的自单元规则: {mesh.self_cell_rule}")
            if mesh.refinement_levels != 0 and mesh.refinement_levels < 3:
                raise ConfigError("[mesh] refinement_levels 必须为 0 或不小于 3")

        grid_section = _section(config, 'lambda')
        lambda_grid = LambdaGridSpec(
            points=grid_section.getint('points', project_config.lambda_points),
            low_ratio=grid_section.getfloat('low_ratio', 1.0 / 200.0),
            high_ratio=grid_section.getfloat('high_ratio', 0.5),
            values=parse_floats(grid_section.get('values')) if grid_section.get('values') else (),
            trusted_fraction=grid_section.getfloat('trusted_fraction', 0.01),
        )
        if any(v <= 0 for v in lambda_grid.values):
            raise ConfigError("[lambda] values 必须全部为正")
        if lambda_grid.points < 2:
            raise ConfigError("[lambda] points 至少为 2")
        if not 0.0 <= lambda_grid.trusted_fraction < 1.0:
            raise ConfigError("[lambda] trusted_fraction 必须位于 [0, 1)")

        bounds_section = _section(config, 'bounds')
        bounds = BoundsSpec(
            upper=bounds_section.getboolean('upper', True),
            lower=bounds_section.getboolean('lower', False),
            counting=bounds_section.getboolean('counting', True),
            tau_points=bounds_section.getint('tau_points', 400),
        )

        lemma = _lemma(config)
        if 'lemma' in tasks and lemma is None:
            lemma = LemmaSpec()
        dirichlet = _dirichlet(config)
        if 'dirichlet' in tasks and dirichlet is None:
            dirichlet = DirichletSpec()

        eta_section = _section(config, 'eta')
        eta = EtaSpec(
            directions=eta_section.getint('directions', 16),
            radii_points=eta_section.getint('radii_points', 8),
            monte_carlo=eta_section.getboolean('monte_carlo', True),
        )

        tolerance = _tolerance(_section(config, 'tolerance'), project_config.tolerance)

        output_section = _section(config, 'output')
        output_root = project_config.output_root
        if not os.path.isabs(output_root):
            output_root = os.path.join(resolve_project_root(), output_root.lstrip('./\\'))
        output_dir = os.path.abspath(os.path.join(output_root, output_section.get('dir', config_name)))
        logger.info(f"[{config_name}] 结果保存路径: {output_dir}")

        return ExperimentConfig(
            config_path=os.path.abspath(config_path),
            config_name=config_name,
            enabled=experiment.getboolean('enabled', True),
            description=experiment.get('description', ''),
            tasks=tasks,
            domain=domain,
            kernel=kernel,
            mesh=mesh,
            lambda_grid=lambda_grid,
            bounds=bounds,
            lemma=lemma,
            dirichlet=dirichlet,
            eta=eta,
            tolerance=tolerance,
            seed=experiment.getint('seed', project_config.seed),
            workers=experiment.getint('workers', project_config.workers),
            output_dir=output_dir,
        )
    except ConfigError as e:
        logger.error(f"实验配置错误 [{config_name}]: {str(e)}")
        raise
    except (ValueError, configparser.Error) as e:
        logger.error(f"解析配置文件 {config_path} 失败: {str(e)}")
        raise ConfigError(f"[{config_name}] {str(e)}")


def _with_suffix(name: str) -> str:
    """配置名可以省略 .ini 后缀（disk_riesz 等价于 disk_riesz.ini）"""
    return name if name.endswith('.ini') or any(c in name for c in '*?[') else f"{name}.ini"


def find_config_files(config_pattern: Optional[str] = None, config_dir: Optional[str] = None) -> List[str]:
    """查找实验配置文件：已存在的路径、逗号分隔的文件名或 glob 模式"""
    if config_pattern and os.path.isfile(config_pattern):
        return [config_pattern]

    config_dir = config_dir or os.path.join(resolve_project_root(), "experiment_configs")
    if not os.path.exists(config_dir):
        logger.warning(f"实验配置文件目录不存在: {config_dir}")
        return []

    if config_pattern and ',' in config_pattern:
        config_files = [os.path.join(config_dir, _with_suffix(f.strip()))
                        for f in config_pattern.split(',')]
    else:
        pattern = _with_suffix(config_pattern) if config_pattern else "*.ini"
        config_files = sorted(glob.glob(os.path.join(config_dir, pattern)))

    missing = [f for f in config_files if not os.path.exists(f)]
    for f in missing:
        logger.warning(f"配置文件不存在: {f}")
    return [f for f in config_files if os.path.exists(f)]


def load_configs(config_pattern: Optional[str] = None, config_dir: Optional[str] = None,
                 project_config_path: Optional[str] = None) -> List[ExperimentConfig]:
    """加载所有启用的实验配置（整合项目配置）；任一文件有误即抛 ConfigError"""
    project_config = load_project_config(project_config_path)
    logger.info("成功加载项目配置")

    config_files = find_config_files(config_pattern, config_dir)
    if not config_files:
        raise ConfigError(f"未找到实验配置文件: {config_pattern or '*.ini'}")

    configs = []
    for config_file in config_files:
        cfg = load_config(config_file, project_config)
        if not cfg.enabled:
            logger.info(f"跳过未启用的实验配置: {cfg.config_name}")
            continue
        configs.append(cfg)
        logger.info(f"成功加载实验配置: {cfg.config_name}")

    return configs
