from .loader import ConfigError, find_config_files, load_config, load_configs, load_project_config
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
