"""Fast 2-D convolution with addition-only symbolic Fourier transforms."""
from .rational import ConfigurationError, RationalMatrix, rational_matmul
from .spec import AlgorithmSpec, CatalogIntegrityError
from .sft import SymbolicDftPlan, build_sft
from .catalog import catalog_algorithm, all_algorithms
from .winograd import generate_winograd
from .validate import validate_algorithm, repair_matrix
from .correction import derive_correction_spec

__all__ = [
    "AlgorithmSpec", "CatalogIntegrityError", "ConfigurationError", "RationalMatrix",
    "SymbolicDftPlan", "all_algorithms", "build_sft", "catalog_algorithm",
    "derive_correction_spec", "generate_winograd", "rational_matmul", "repair_matrix",
    "validate_algorithm",
]
