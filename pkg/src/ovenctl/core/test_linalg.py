import numpy as np
import pytest

from ovenctl.core.eigen import eigenvalues
from ovenctl.core.linalg import (
    InvalidMatrix,
    Polynomial,
    SingularMatrix,
    UnpairedComplexRoot,
    as_matrix,
    companion,
    controllability_matrix,
    expm,
    inverse,
    poly_from_roots,
    rank,
    solve,
)


def test_as_matrix_rejects_non_finite():
    with pytest.raises(InvalidMatrix):
        as_matrix([[1.0, float("nan")]])
    with pytest.raises(InvalidMatrix):
        as_matrix([[1.0, float("inf")]])


def test_as_matrix_turns_vectors_into_columns_and_freezes():
    m = as_matrix([1.0, 2.0, 3.0])
    assert m.shape == (3, 1)
    with pytest.raises(ValueError):
        m[0, 0] = 5.0


def test_solve_identity_returns_rhs():
    b = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
    np.testing.assert_array_equal(solve(np.eye(3), b), b)


def test_solve_diagonal():
    x = solve([[2.0, 0.0], [0.0, 4.0]], [[2.0], [8.0]])
    np.testing.assert_allclose(x, [[1.0], [2.0]])


def test_solve_rank_deficient_raises():
    with pytest.raises(SingularMatrix):
        solve([[1.0, 1.0], [1.0, 1.0]], [[1.0], [2.0]])


def test_solve_needs_pivoting():
    a = np.array([[0.0, 1.0], [1.0, 0.0]])
    x = solve(a, [3.0, 7.0])
    np.testing.assert_allclose(x, [7.0, 3.0])


def test_solve_residual_on_random_systems():
    rng = np.random.default_rng(1234)
    for _ in range(100):
        n = int(rng.integers(1, 7))
        a = rng.uniform(-2, 2, size=(n, n)) + n * np.eye(n)
        b = rng.uniform(-2, 2, size=(n, 2))
        x = solve(a, b)
        residual = np.max(np.abs(a @ x - b))
        assert residual <= 1e-10 * max(1.0, np.max(np.abs(b)))


def test_solve_shape_mismatch():
    with pytest.raises(InvalidMatrix):
        solve(np.eye(3), np.ones((2, 1)))


def test_inverse_round_trip(steak_plant):
    inv = inverse(steak_plant.a)
    np.testing.assert_allclose(inv @ steak_plant.a, np.eye(3), atol=1e-10)


@pytest.mark.parametrize(
    "matrix, expected",
    [
        (np.zeros((3, 3)), 0),
        (np.eye(3), 3),
        (np.array([[1.0, 2.0], [2.0, 4.0]]), 1),
        (np.array([[1.0, 2.0, 3.0]]), 1),
    ],
)
def test_rank(matrix, expected):
    assert rank(matrix) == expected


def test_rank_of_steak_controllability_matrix(steak_plant):
    ctrb = controllability_matrix(steak_plant.a, steak_plant.b)
    np.testing.assert_allclose(ctrb[:, 1], steak_plant.a[:, 0])
    assert rank(ctrb) == 3


def test_rank_explicit_tolerance():
    m = np.diag([1.0, 1e-6])
    assert rank(m) == 2
    assert rank(m, tol=1e-3) == 1


def test_expm_zero_is_identity():
    np.testing.assert_array_equal(expm(np.zeros((4, 4))), np.eye(4))


def test_expm_nilpotent():
    np.testing.assert_allclose(expm([[0.0, 1.0], [0.0, 0.0]]), [[1.0, 1.0], [0.0, 1.0]], atol=1e-15)


def test_expm_diagonal():
    np.testing.assert_allclose(expm(np.diag([-3.0, 2.5])), np.diag(np.exp([-3.0, 2.5])), rtol=1e-13)


def test_expm_symmetric_matches_eigendecomposition():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(1, 6))
        m = rng.uniform(-2, 2, size=(n, n))
        sym = 0.5 * (m + m.T)
        w, v = np.linalg.eigh(sym)
        expected = v @ np.diag(np.exp(w)) @ v.T
        np.testing.assert_allclose(expm(sym), expected, rtol=1e-10, atol=1e-12)


def test_expm_inverse_identity_for_plants(all_plants):
    for plant in all_plants.values():
        product = expm(plant.a) @ expm(-plant.a)
        np.testing.assert_allclose(product, np.eye(3), atol=1e-9)


def test_expm_handles_defective_matrix():
    jordan = np.array([[-1.0, 1.0], [0.0, -1.0]])
    t = np.exp(-1.0)
    np.testing.assert_allclose(expm(jordan), [[t, t], [0.0, t]], rtol=1e-12)


def test_poly_from_double_root():
    assert poly_from_roots([-1, -1]).coefficients == (1.0, 2.0, 1.0)


def test_poly_from_conjugate_pair():
    assert poly_from_roots([-1 + 1j, -1 - 1j]).coefficients == (1.0, 2.0, 2.0)


def test_poly_from_unpaired_root_raises():
    with pytest.raises(UnpairedComplexRoot):
        poly_from_roots([-1 + 1j, -2.0])


def test_poly_from_roots_is_monic_and_evaluates_to_zero():
    poly = poly_from_roots([-39.0, -0.1, -1.0])
    assert poly.coefficients[0] == 1.0
    assert poly.degree == 3
    for root in (-39.0, -0.1, -1.0):
        assert abs(poly(root)) < 1e-9


def test_poly_rerooting_through_companion_matrix():
    rng = np.random.default_rng(42)
    for _ in range(100):
        n_real = int(rng.integers(0, 4))
        n_pairs = int(rng.integers(0, 2))
        if n_real + n_pairs == 0:
            n_real = 1
        roots = list(-rng.uniform(0.1, 5.0, size=n_real))
        for _ in range(n_pairs):
            z = complex(-rng.uniform(0.1, 5.0), rng.uniform(0.1, 3.0))
            roots += [z, z.conjugate()]
        # clustered roots are ill-conditioned for any eigen-solver
        gaps = [abs(p - q) for i, p in enumerate(roots) for q in roots[i + 1:]]
        if gaps and min(gaps) < 0.05:
            continue
        recovered = eigenvalues(companion(poly_from_roots(roots))).eigenvalues
        assert _multiset_distance(recovered, roots) < 1e-8 * max(1.0, max(abs(r) for r in roots))


def test_table_design_poles_reroot():
    roots = [-39.0, -0.1, -1.0]
    recovered = eigenvalues(companion(poly_from_roots(roots))).eigenvalues
    assert _multiset_distance(recovered, roots) < 1e-8


def test_polynomial_must_be_monic():
    with pytest.raises(ValueError):
        Polynomial((2.0, 1.0))


def test_polynomial_evaluate_matrix_matches_direct_powers():
    a = np.array([[0.0, 1.0], [-2.0, -3.0]])
    poly = Polynomial((1.0, 3.0, 2.0))
    np.testing.assert_allclose(poly.evaluate_matrix(a), np.zeros((2, 2)), atol=1e-12)


def _multiset_distance(found, expected) -> float:
    """Largest distance in a greedy nearest-neighbour matching of two root lists."""
    remaining = [complex(z) for z in expected]
    worst = 0.0
    for z in found:
        idx = min(range(len(remaining)), key=lambda i: abs(remaining[i] - z))
        worst = max(worst, abs(remaining.pop(idx) - z))
    return worst
