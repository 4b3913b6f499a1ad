from .helmholtz import HelmholtzSymbol, helmholtz_symbol
from .lower import LowerBoundSymbol, gamma_ratio, lower_symbol, radial_gamma
from .pair import (
    ConstantProfile,
    KernelError,
    KernelPair,
    TrigProfile,
    custom_kernel,
    parseval_check,
    riesz_constant,
    riesz_kernel,
    symbol_eval,
    unit_directions,
)
