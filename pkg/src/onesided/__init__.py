"""One-sided polynomial approximation in weighted L_p spaces."""
from .core import FunctionModel, Polynomial, QuadConfig, WeightedSpace, weighted_norm
from .moduli import ModulusConfig, averaged_modulus, local_modulus
from .operators import approximate, auto_pair_AB
from .oracle import best_onesided, best_twosided
from .step import build_step_sandwich, kernel_pair

__version__ = "0.1.0"
