from .assembly import assemble, offset_entry, offset_table, self_cell_ball, self_cell_polar, tent_rule
from .mesh import Mesh, SpectralError, build_mesh
from .refinement import RefinementStudy, leading_eigenvalue, refinement_study
from .spectrum import (
    DiscreteSpectrum,
    convergence_order,
    counting,
    eigenvalues,
    richardson,
    riesz_mean,
)
