from .counting import (
    counting_bound,
    counting_bound_general,
    optimal_tau,
    riesz_counting_bound,
    tau_scan,
)
from .grids import trusted_floor, trusted_lambda_grid
from .lemma import (
    LemmaProfile,
    RegimeError,
    RootSet,
    asymptotic_roots,
    lemma_asymptotic,
    lemma_integral_exact,
    lemma_integral_numeric,
    lemma_roots,
    lemma_row,
)
from .lower import lower_bound_two_term, second_term_coefficient, second_term_ratio
from .upper import (
    BoundsError,
    TabulatedSymbol,
    excess_constant,
    radial_excess_constant,
    symbol_excess_integral,
    upper_bound_general,
    upper_bound_homogeneous,
)
