"""Dense numerical kernels for OvenCtl."""

from .eigen import eigenvalues, hessenberg
from .linalg import (
    InvalidMatrix,
    NoConvergence,
    NumericalError,
    Polynomial,
    SingularMatrix,
    Spectrum,
    UnpairedComplexRoot,
    expm,
    poly_from_roots,
    rank,
    solve,
)

__all__ = [
    "eigenvalues",
    "hessenberg",
    "expm",
    "poly_from_roots",
    "rank",
    "solve",
    "Polynomial",
    "Spectrum",
    "NumericalError",
    "InvalidMatrix",
    "NoConvergence",
    "SingularMatrix",
    "UnpairedComplexRoot",
]
