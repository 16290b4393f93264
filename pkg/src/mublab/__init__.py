"""mublab: mutually unbiased bases and their uncertainty-relation bounds in d=4, 5."""

__version__ = "0.1.0"

from .catalog import Basis, MubSet, build_mub_set
from .functionals import entropy_sum, min_variance, shannon_entropy, variance_sum
from .linalg import apply_unitary, born_probabilities, inner_product

__all__ = [
    "__version__",
    "Basis",
    "MubSet",
    "build_mub_set",
    "shannon_entropy",
    "entropy_sum",
    "min_variance",
    "variance_sum",
    "inner_product",
    "born_probabilities",
    "apply_unitary",
]
