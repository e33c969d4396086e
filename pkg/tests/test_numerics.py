import numpy as np
import pytest

from signed_dpp import numerics
from signed_dpp.errors import DimensionError, SingularMatrixError


def test_det_identity():
    assert numerics.det(np.eye(3)) == pytest.approx(1.0, abs=1e-14)


def test_det_2x2_expansion():
    assert numerics.det([[1.0, 2.0], [3.0, 4.0]]) == pytest.approx(-2.0, abs=1e-14)


def test_det_rank_one_is_zero():
    assert numerics.det([[1.0, 2.0], [2.0, 4.0]]) == pytest.approx(0.0, abs=1e-14)


def test_det_empty_matrix_is_one():
    assert numerics.det(np.zeros((0, 0))) == 1.0


def test_det_rejects_nonsquare():
    with pytest.raises(DimensionError):
        numerics.det(np.zeros((2, 3)))


def test_det_rejects_nonfinite():
    with pytest.raises(DimensionError):
        numerics.det([[1.0, np.nan], [0.0, 1.0]])


def test_solve_identity_returns_rhs():
    b = np.array([3.0, -1.0, 2.5])
    assert np.allclose(numerics.solve_linear(np.eye(3), b), b, atol=0)


def test_solve_diagonal():
    x = numerics.solve_linear(np.diag([2.0, 4.0]), np.array([2.0, 4.0]))
    assert np.allclose(x, [1.0, 1.0], atol=1e-14)


def test_solve_residual_random_5x5():
    gen = np.random.default_rng(5)
    a = gen.uniform(-1, 1, (5, 5)) + 5 * np.eye(5)
    b = gen.uniform(-1, 1, 5)
    x = numerics.solve_linear(a, b)
    assert np.linalg.norm(a @ x - b) <= 1e-10 * np.linalg.norm(b)


def test_solve_singular_raises():
    with pytest.raises(SingularMatrixError):
        numerics.solve_linear([[1.0, 1.0], [1.0, 1.0]], [1.0, 0.0])


def test_interpolate_constant():
    coeffs = numerics.interpolate([(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)])
    assert np.allclose(coeffs, [1.0, 0.0, 0.0], atol=1e-12)


def test_interpolate_square():
    coeffs = numerics.interpolate([(0.0, 0.0), (1.0, 1.0), (2.0, 4.0)])
    assert np.allclose(coeffs, [0.0, 0.0, 1.0], atol=1e-12)


def test_interpolate_degree6_round_trip():
    coeffs = np.array([0.31, -1.2, 0.45, 0.9, -0.17, 0.08, 0.61])
    xs = np.arange(-3.0, 4.0)
    points = [(x, numerics.polyval(coeffs, x)) for x in xs]
    assert np.allclose(numerics.interpolate(points), coeffs, atol=1e-9)


def test_interpolate_duplicate_abscissae():
    with pytest.raises(ValueError):
        numerics.interpolate([(1.0, 0.0), (1.0, 1.0)])


def test_det_product_property():
    gen = np.random.default_rng(17)
    for _ in range(20):
        a = gen.uniform(-1, 1, (6, 6))
        b = gen.uniform(-1, 1, (6, 6))
        lhs = numerics.det(a @ b)
        rhs = numerics.det(a) * numerics.det(b)
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))


def test_det_transpose_property():
    gen = np.random.default_rng(23)
    for _ in range(20):
        a = gen.uniform(-1, 1, (6, 6))
        d = numerics.det(a)
        assert abs(numerics.det(a.T) - d) <= 1e-10 * max(1.0, abs(d))


def test_interpolate_evaluate_identity_degree_12():
    gen = np.random.default_rng(31)
    for _ in range(10):
        coeffs = gen.uniform(-1, 1, 13)
        xs = np.arange(-6.0, 7.0)
        points = [(x, numerics.polyval(coeffs, x)) for x in xs]
        assert np.allclose(numerics.interpolate(points), coeffs, atol=1e-8)


def test_batched_det_matches_scalar():
    gen = np.random.default_rng(41)
    stack = gen.uniform(-1, 1, (40, 5, 5))
    dets = numerics.batched_det(stack)
    for t in range(40):
        assert dets[t] == pytest.approx(numerics.det(stack[t]), rel=1e-12, abs=1e-12)


def test_poly_trim():
    assert np.array_equal(numerics.poly_trim([1.0, 2.0, 0.0]), [1.0, 2.0])
    assert np.array_equal(numerics.poly_trim([0.0, 0.0]), [0.0])


def test_inverse_round_trip():
    gen = np.random.default_rng(9)
    a = gen.uniform(-1, 1, (4, 4)) + 4 * np.eye(4)
    assert np.allclose(a @ numerics.inverse(a), np.eye(4), atol=1e-12)
