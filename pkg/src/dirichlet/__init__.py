from .box import DirichletError, DirichletSpectrum, box_spectrum, counting_function, riesz_mean
from .constants import berezin_bound, pl_bound, polya_bound, semiclassical_bound
