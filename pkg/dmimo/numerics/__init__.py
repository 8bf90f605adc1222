from .linalg import (
    ComplexMatrix,
    EvdResult,
    SvdResult,
    as_complex_matrix,
    hermitian_evd,
    hermitian_part,
    hermitian_solve,
    svd,
)

__all__ = [
    "ComplexMatrix",
    "EvdResult",
    "SvdResult",
    "as_complex_matrix",
    "hermitian_evd",
    "hermitian_part",
    "hermitian_solve",
    "svd",
]
