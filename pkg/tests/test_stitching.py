import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from segsyl import SingularSystemError, ValidationError, solve_dense, stitch
from segsyl.stitching import (
    DenseSystem,
    LinearCoeffs,
    QuadraticCoeffs,
    build_linear_system,
    build_quadratic_system,
    sigma_squared,
)


def test_linear_system_single_syllable():
    s = build_linear_system([[0.0, 1.0]])
    np.testing.assert_array_equal(s.matrix, [[1, 1], [1, 2]])
    np.testing.assert_array_equal(s.rhs, [1, 1])


def test_linear_system_two_syllables():
    s = build_linear_system([[0.0, 1.0], [2.0, 3.0]])
    np.testing.assert_array_equal(
        np.column_stack([s.matrix, s.rhs]),
        [[1, 1, 0, 0, 1], [1, 2, 0, 0, 1], [1, 1, -2, -1, 0], [0, 0, 5, 2, 5]],
    )


def test_linear_system_constant_syllable_is_singular():
    c = 1.5
    s = build_linear_system([[0.0, 1.0], [c, c]])
    np.testing.assert_array_equal(s.matrix[3], [0, 0, 2 * c, 2])
    assert s.rhs[3] == 2 * c
    with pytest.raises(SingularSystemError):
        solve_dense(s)


def test_quadratic_system_single_syllable():
    s = build_quadratic_system([[0.0, 1.0, 2.0]])
    np.testing.assert_array_equal(np.column_stack([s.matrix, s.rhs]), [[17, 9, 5, 9], [9, 5, 3, 5], [5, 3, 3, 3]])


def test_quadratic_identity_satisfies_continuous_pair():
    s = build_quadratic_system([[0.0, 1.0, 3.0], [3.0, 2.0, 5.0]])
    x = np.array([0, 1, 0, 0, 1, 0], dtype=float)
    np.testing.assert_allclose(s.matrix @ x, s.rhs, atol=1e-12)


def test_quadratic_constant_syllable_is_singular():
    s = build_quadratic_system([[0.0, 1.0, 2.0], [2.0, 2.0, 2.0]])
    with pytest.raises(SingularSystemError):
        solve_dense(s)


@pytest.mark.parametrize("R", [1, 2, 3, 5])
def test_system_shapes(R):
    ys = [np.arange(k, k + 4, dtype=float) ** 1.3 for k in range(R)]
    assert build_linear_system(ys).matrix.shape == (2 * R, 2 * R)
    assert build_quadratic_system(ys).matrix.shape == (3 * R, 3 * R)


def test_solve_dense_examples():
    np.testing.assert_allclose(solve_dense(DenseSystem([[1, 1], [1, 2]], [1, 1])), [1, 0], atol=1e-15)
    r = np.array([3.0, -2.0, 7.5])
    np.testing.assert_array_equal(solve_dense(DenseSystem(np.eye(3), r)), r)
    with pytest.raises(SingularSystemError) as err:
        solve_dense(DenseSystem(np.zeros((2, 2)), [1, 1]))
    assert err.value.column == 0


def test_solve_dense_reports_pivot_column():
    a = [[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]]
    with pytest.raises(SingularSystemError) as err:
        solve_dense(DenseSystem(a, [1, 2, 3]))
    assert err.value.column == 1


def test_dense_system_must_be_square():
    with pytest.raises(ValidationError):
        DenseSystem(np.zeros((2, 3)), np.zeros(2))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 30), st.integers(0, 2**32 - 1))
def test_solver_matches_numpy(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + n * np.eye(n) * rng.choice([-1, 1], size=n)
    b = rng.normal(size=n)
    x = solve_dense(DenseSystem(a, b))
    assert np.max(np.abs(a @ x - b)) <= 1e-9 * (1 + np.max(np.abs(b)))
    np.testing.assert_allclose(x, np.linalg.solve(a, b), rtol=1e-8, atol=1e-10)


def test_stitch_linear_hand_case():
    res = stitch([[0.0, 1.0], [2.0, 3.0]], "linear")
    np.testing.assert_allclose(res.coeffs.as_array()[:, 0, :].ravel(), [1, 0, 3, -5], atol=1e-9)
    np.testing.assert_allclose(res.stitched.frames.ravel(), [0, 1, 1, 4], atol=1e-9)
    assert res.sigma2[0] == pytest.approx(2.0, abs=1e-9)
    assert res.junction_residuals.max() <= 1e-9
    assert res.ok and res.syllable_offsets == (0, 2, 4)


def test_stitch_linear_already_continuous():
    res = stitch([[0.0, 1.0], [1.0, 2.0]], "linear")
    np.testing.assert_allclose(res.coeffs.as_array()[:, 0, :].ravel(), [1, 0, 1, 0], atol=1e-12)
    np.testing.assert_allclose(res.stitched.frames.ravel(), [0, 1, 1, 2], atol=1e-12)
    assert res.sigma2[0] <= 1e-24


def test_stitch_quadratic_already_continuous():
    ys = [[0.0, 0.5, 2.0], [2.0, 1.0, 3.0, 4.0]]
    res = stitch(ys, "quadratic")
    np.testing.assert_allclose(res.coeffs.as_array()[:, 0, :], [[0, 1, 0], [0, 1, 0]], atol=1e-9)
    assert res.sigma2[0] <= 1e-16 * 16


def test_stitch_single_syllable_is_identity():
    res = stitch([[0.0, 2.0, 1.0, 5.0]], "quadratic")
    np.testing.assert_allclose(res.coeffs.as_array()[0, 0], [0, 1, 0], atol=1e-12)
    assert res.junction_residuals.shape == (0, 1)


def test_stitch_fallback_on_constant_channel():
    y1 = np.array([[0.0, 4.0], [1.0, 4.0]])
    y2 = np.array([[2.0, 4.0], [3.0, 4.0]])
    res = stitch([y1, y2], "linear")
    assert res.fallback_channels == (1,)
    np.testing.assert_array_equal(res.coeffs.as_array()[:, 1, :], [[1, 0], [1, 0]])
    np.testing.assert_allclose(res.coeffs.as_array()[:, 0, :].ravel(), [1, 0, 3, -5], atol=1e-9)
    assert not res.ok


def test_stitch_errors():
    with pytest.raises(ValidationError):
        stitch([], "linear")
    with pytest.raises(ValidationError, match="channel mismatch"):
        stitch([np.zeros((2, 1)), np.zeros((2, 2))], "linear")
    with pytest.raises(ValidationError):
        stitch([[1.0, 2.0]], "cubic")


def test_sigma_squared_examples():
    ys = [np.array([[0.0], [1.0], [2.0]])]
    ident = LinearCoeffs(np.ones((1, 1)), np.zeros((1, 1)))
    assert sigma_squared(ident, ys)[0] == 0.0
    shift = LinearCoeffs(np.ones((1, 1)), np.ones((1, 1)))
    assert sigma_squared(shift, ys)[0] == 3.0
    hand = LinearCoeffs(np.array([[1.0], [3.0]]), np.array([[0.0], [-5.0]]))
    assert sigma_squared(hand, [[0.0, 1.0], [2.0, 3.0]])[0] == 2.0
    quad_ident = QuadraticCoeffs(np.zeros((1, 1)), np.ones((1, 1)), np.zeros((1, 1)))
    assert sigma_squared(quad_ident, ys)[0] == 0.0
    with pytest.raises(ValidationError):
        sigma_squared(hand, ys)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["linear", "quadratic"]))
def test_channel_permutation(seed, model):
    rng = np.random.default_rng(seed)
    ys = [rng.normal(size=(int(rng.integers(4, 8)), 3)) for _ in range(int(rng.integers(1, 4)))]
    perm = rng.permutation(3)
    a = stitch(ys, model)
    b = stitch([y[:, perm] for y in ys], model)
    np.testing.assert_array_equal(a.coeffs.as_array()[:, perm], b.coeffs.as_array())
    np.testing.assert_array_equal(a.sigma2[perm], b.sigma2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["linear", "quadratic"]))
def test_constraints_hold(seed, model):
    rng = np.random.default_rng(seed)
    ys = [rng.uniform(-2, 2, size=(int(rng.integers(3, 12)), 1)) for _ in range(int(rng.integers(1, 6)))]
    res = stitch(ys, model)
    if not res.ok:
        return
    scale = 1 + max(np.abs(y).max() for y in ys)
    assert res.junction_residuals.max(initial=0) <= 1e-8 * scale
    if model == "quadratic":
        assert res.slope_residuals.max(initial=0) <= 1e-8 * scale
