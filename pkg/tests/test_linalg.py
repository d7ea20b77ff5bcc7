import numpy as np
import pytest

from zbuscert import SingularMatrixError, inf_norm_matrix, inf_norm_vector, invert, lu_solve


def well_conditioned(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return a + 4.0 * n * np.eye(n)


def test_identity_solve():
    b = np.array([[1 + 2j, 3.0], [0, -1j], [2, 2]])
    x = lu_solve(np.eye(3), b)
    assert np.array_equal(x, b)


def test_diagonal_inverse():
    x = lu_solve(np.diag([2.0, 4.0]), np.eye(2))
    assert np.allclose(x, np.diag([0.5, 0.25]), atol=0, rtol=0)


def test_construct_then_solve_recovers_solution(rng):
    a = well_conditioned(rng, 8)
    x0 = rng.standard_normal((8, 2)) + 1j * rng.standard_normal((8, 2))
    x = lu_solve(a, a @ x0)
    assert np.abs(x - x0).max() <= 1e-9


def test_solve_residual_bound(rng):
    for _ in range(20):
        a = well_conditioned(rng, 6)
        b = rng.standard_normal((6, 3)) + 1j * rng.standard_normal((6, 3))
        x = lu_solve(a, b)
        assert np.abs(a @ x - b).max() <= 1e-9 * (1 + inf_norm_matrix(b))


def test_singular_raises():
    with pytest.raises(SingularMatrixError):
        lu_solve(np.zeros((3, 3)), np.eye(3))
    rank_one = np.outer([1.0, 2.0, 3.0], [1.0, 1.0, 1.0])
    with pytest.raises(SingularMatrixError):
        lu_solve(rank_one, np.eye(3))


def test_shape_validation():
    with pytest.raises(ValueError):
        lu_solve(np.ones((2, 3)), np.ones(2))
    with pytest.raises(ValueError):
        lu_solve(np.eye(2), np.ones(3))


def test_inf_norm_matrix_examples():
    assert inf_norm_matrix(np.array([[1.0, -2.0], [3.0, 4.0]])) == 7.0
    assert inf_norm_matrix(np.zeros((4, 4))) == 0.0
    assert inf_norm_matrix(np.array([[3 + 4j]])) == 5.0
    assert inf_norm_matrix(np.zeros((0, 0))) == 0.0
    assert inf_norm_matrix(np.zeros((3, 0))) == 0.0


def test_inf_norm_vector_examples():
    assert inf_norm_vector(np.array([1.0, -2.0, 1 + 1j])) == 2.0
    assert inf_norm_vector(np.array([])) == 0.0
    assert inf_norm_vector(np.array([3 + 4j, 1.0])) == 5.0


def test_submultiplicativity(rng):
    for _ in range(50):
        n = int(rng.integers(1, 7))
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        assert inf_norm_vector(a @ x) <= inf_norm_matrix(a) * inf_norm_vector(x) * (1 + 1e-12)


def test_inverse_residual(rng):
    for _ in range(10):
        a = well_conditioned(rng, 7)
        m = invert(a)
        assert inf_norm_matrix(a @ m - np.eye(7)) <= 1e-8
