from .core import (
    build_curve,
    build_domain,
    build_kernel,
    compute_spectrum,
    run_bounds,
    run_dirichlet,
    run_eta,
    run_experiment,
    run_lemma,
    run_spectrum,
)
from .report import BoundCurve, read_csv, read_json, write_report, write_spectrum, write_table
