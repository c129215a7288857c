"""Dense real linear algebra used by every model, design and simulation step.

Matrices are carried as 2-D ``numpy`` float arrays. The algorithms (elimination,
rank, Pade matrix exponential, polynomial construction) are implemented here so
their tolerances and failure modes are explicit and testable.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, Sequence[Sequence[float]], Sequence[float]]

SINGULAR_PIVOT_RTOL = 1e-12
RANK_RTOL = 1e-10
CONJUGATE_PAIR_TOL = 1e-9
PADE_ORDER = 6
PADE_NORM_LIMIT = 0.5


class NumericalError(Exception):
    """Base exception for numerical failures."""
    pass


class InvalidMatrix(NumericalError):
    """Raised when an input is not a finite real 2-D matrix of the expected shape."""
    pass


class SingularMatrix(NumericalError):
    """Raised when elimination meets a pivot that is numerically zero."""
    pass


class NoConvergence(NumericalError):
    """Raised when the QR iteration fails to deflate an eigenvalue."""
    pass


class UnpairedComplexRoot(NumericalError):
    """Raised when a non-real root has no conjugate partner."""
    pass


def as_matrix(data: ArrayLike, name: str = "matrix") -> np.ndarray:
    """
    Validate and copy ``data`` into an immutable 2-D float matrix.

    Args:
        data: Nested sequence or array. A 1-D input becomes a column.
        name: Used in error messages.

    Returns:
        Read-only ``float64`` array with ``ndim == 2``.
    """
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as e:
        raise InvalidMatrix(f"{name} is not a real matrix: {e}") from e

    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise InvalidMatrix(f"{name} must be 2-D, got {arr.ndim}-D")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix(f"{name} contains NaN or Inf")

    arr.setflags(write=False)
    return arr


def _require_square(a: np.ndarray, name: str = "matrix"):
    if a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise InvalidMatrix(f"{name} must be square and non-empty, got shape {a.shape}")


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of a real square matrix."""
    eigenvalues: tuple[complex, ...]

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def sorted(self) -> list[complex]:
        """Eigenvalues ordered by real part, then imaginary part."""
        return sorted(self.eigenvalues, key=lambda z: (z.real, z.imag))

    @property
    def is_real(self) -> bool:
        return all(z.imag == 0.0 for z in self.eigenvalues)

    @property
    def max_real_part(self) -> float:
        return max(z.real for z in self.eigenvalues)

    def is_hurwitz(self) -> bool:
        """True when every eigenvalue lies strictly in the open left half-plane."""
        return self.max_real_part < 0.0


@dataclass(frozen=True)
class Polynomial:
    """Monic real polynomial, coefficients highest degree first."""
    coefficients: tuple[float, ...]

    def __post_init__(self):
        if not self.coefficients or self.coefficients[0] != 1.0:
            raise ValueError("Polynomial must be monic (leading coefficient exactly 1)")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, s: complex) -> complex:
        value: complex = 0.0
        for c in self.coefficients:
            value = value * s + c
        return value

    def evaluate_matrix(self, a: ArrayLike) -> np.ndarray:
        """Evaluate p(A) by Horner's scheme."""
        a = as_matrix(a)
        _require_square(a)
        n = a.shape[0]
        result = np.zeros((n, n))
        for c in self.coefficients:
            result = result @ a + c * np.eye(n)
        return result


def _max_row_norm(a: np.ndarray) -> float:
    return float(np.max(np.sum(np.abs(a), axis=1))) if a.size else 0.0


def solve(a: ArrayLike, b: ArrayLike) -> np.ndarray:
    """
    Solve ``a @ x = b`` by Gaussian elimination with partial pivoting.

    Args:
        a: Square n x n matrix.
        b: n x m right-hand side (a 1-D vector is treated as one column).

    Returns:
        Solution with the same shape as ``b``.

    Raises:
        SingularMatrix: when a pivot falls below 1e-12 of the largest row norm.
    """
    vector_rhs = np.ndim(b) == 1
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    _require_square(a, "a")
    n = a.shape[0]
    if b.shape[0] != n:
        raise InvalidMatrix(f"right-hand side has {b.shape[0]} rows, expected {n}")

    lu = a.copy()
    x = b.copy()
    threshold = SINGULAR_PIVOT_RTOL * _max_row_norm(a)

    for k in range(n):
        pivot_row = k + int(np.argmax(np.abs(lu[k:, k])))
        pivot = lu[pivot_row, k]
        if abs(pivot) <= threshold or pivot == 0.0:
            raise SingularMatrix(f"pivot {abs(pivot):.3e} at column {k} is below {threshold:.3e}")
        if pivot_row != k:
            lu[[k, pivot_row]] = lu[[pivot_row, k]]
            x[[k, pivot_row]] = x[[pivot_row, k]]
        factors = lu[k + 1:, k] / pivot
        lu[k + 1:, k:] -= np.outer(factors, lu[k, k:])
        x[k + 1:] -= np.outer(factors, x[k])

    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - lu[k, k + 1:] @ x[k + 1:]) / lu[k, k]

    return x.ravel() if vector_rhs else x


def inverse(a: ArrayLike) -> np.ndarray:
    """Matrix inverse through :func:`solve`."""
    a = as_matrix(a, "a")
    _require_square(a, "a")
    return solve(a, np.eye(a.shape[0]))


def rank(a: ArrayLike, tol: Optional[float] = None) -> int:
    """
    Numerical rank by elimination with complete pivoting.

    Args:
        a: Any real matrix.
        tol: Pivots with magnitude <= tol count as zero. Defaults to
            ``1e-10 * max(rows, cols) * max|a_ij|``.
    """
    work = np.array(as_matrix(a, "a"))
    rows, cols = work.shape
    if tol is None:
        tol = RANK_RTOL * max(rows, cols) * (float(np.max(np.abs(work))) if work.size else 0.0)
    if tol < 0:
        raise ValueError("tol must be non-negative")

    r = 0
    for k in range(min(rows, cols)):
        sub = np.abs(work[k:, k:])
        i, j = np.unravel_index(int(np.argmax(sub)), sub.shape)
        if sub[i, j] <= tol:
            break
        i += k
        j += k
        work[[k, i]] = work[[i, k]]
        work[:, [k, j]] = work[:, [j, k]]
        factors = work[k + 1:, k] / work[k, k]
        work[k + 1:, k:] -= np.outer(factors, work[k, k:])
        r += 1
    return r


def expm(a: ArrayLike) -> np.ndarray:
    """
    Matrix exponential by scaling and squaring with the diagonal Pade approximant.

    The matrix is scaled by 2**-s so its infinity norm is at most 0.5, the
    (6, 6) Pade approximant is evaluated, and the result squared s times.
    """
    a = as_matrix(a, "a")
    _require_square(a, "a")
    n = a.shape[0]

    norm = _max_row_norm(a)
    s = 0
    if norm > PADE_NORM_LIMIT:
        s = int(np.ceil(np.log2(norm / PADE_NORM_LIMIT)))
    scaled = a / (2.0 ** s)

    q = PADE_ORDER
    c = 0.5
    x = scaled.copy()
    numer = np.eye(n) + c * scaled
    denom = np.eye(n) - c * scaled
    sign = 1.0
    for k in range(2, q + 1):
        c = c * (q - k + 1) / (k * (2 * q - k + 1))
        x = scaled @ x
        numer = numer + c * x
        denom = denom + sign * c * x
        sign = -sign

    result = solve(denom, numer)
    for _ in range(s):
        result = result @ result
    logger.debug("expm: n=%d norm=%.3e squarings=%d", n, norm, s)
    return result


def _pair_conjugates(roots: Iterable[complex]) -> tuple[list[float], list[complex]]:
    """Split roots into real ones and one representative per conjugate pair."""
    real_roots: list[float] = []
    pending: list[complex] = []
    pairs: list[complex] = []

    for z in (complex(r) for r in roots):
        scale = max(1.0, abs(z))
        if abs(z.imag) <= CONJUGATE_PAIR_TOL * scale:
            real_roots.append(z.real)
            continue
        match = next(
            (i for i, w in enumerate(pending) if abs(w - z.conjugate()) <= CONJUGATE_PAIR_TOL * scale),
            None,
        )
        if match is None:
            pending.append(z)
        else:
            partner = pending.pop(match)
            pairs.append(complex(0.5 * (z.real + partner.real), abs(z.imag)))

    if pending:
        raise UnpairedComplexRoot(f"roots without conjugate partner: {pending}")
    return real_roots, pairs


def poly_from_roots(roots: Iterable[complex]) -> Polynomial:
    """
    Build the monic real polynomial with the given roots.

    Conjugate pairs are multiplied as real quadratics ``s^2 - 2 Re(z) s + |z|^2``
    so the coefficients never carry an imaginary residue.
    """
    real_roots, pairs = _pair_conjugates(roots)
    coeffs = np.array([1.0])
    for r in real_roots:
        coeffs = np.convolve(coeffs, [1.0, -r])
    for z in pairs:
        coeffs = np.convolve(coeffs, [1.0, -2.0 * z.real, z.real ** 2 + z.imag ** 2])
    return Polynomial(tuple(float(c) for c in coeffs))


def companion(poly: Polynomial) -> np.ndarray:
    """Companion matrix whose characteristic polynomial is ``poly``."""
    n = poly.degree
    if n < 1:
        raise InvalidMatrix("companion matrix needs a polynomial of degree >= 1")
    mat = np.zeros((n, n))
    mat[0, :] = -np.asarray(poly.coefficients[1:])
    if n > 1:
        mat[1:, :-1] = np.eye(n - 1)
    return mat


def controllability_matrix(a: ArrayLike, b: ArrayLike) -> np.ndarray:
    """``[B, AB, ..., A^(n-1) B]``."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    _require_square(a, "a")
    if b.shape[0] != a.shape[0]:
        raise InvalidMatrix(f"b has {b.shape[0]} rows, expected {a.shape[0]}")
    blocks = [b]
    for _ in range(a.shape[0] - 1):
        blocks.append(a @ blocks[-1])
    return np.hstack(blocks)


def observability_matrix(a: ArrayLike, c: ArrayLike) -> np.ndarray:
    """``[C; CA; ...; C A^(n-1)]``."""
    a = as_matrix(a, "a")
    c = np.atleast_2d(np.asarray(c, dtype=float))
    return controllability_matrix(a.T, c.T).T
