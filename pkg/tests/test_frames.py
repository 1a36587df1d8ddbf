import numpy as np
import pytest

from calabi import catalog
from calabi.errors import InputError, UnsupportedDimension, VanishingPick
from calabi.expr import convex_function
from calabi.frames import orthonormal_cubic, theta_bruteforce, theta_max
from calabi.jets import jet4


def test_log_paraboloid_base_point():
    f = catalog.get("thm13a", 2).function
    ej = theta_max(f, [1.0, 0.0])
    assert ej.theta == pytest.approx(2.0, abs=1e-12)
    np.testing.assert_allclose(ej.maximizer, [2.0, 0.0], atol=1e-10)
    np.testing.assert_allclose(ej.spectrum, [2.0, 1.0], atol=1e-12)


def test_three_dimensional_spectrum():
    ej = theta_max(catalog.get("thm13a", 3).function, [1.0, 0.0, 0.0])
    np.testing.assert_allclose(ej.spectrum, [2.0, 1.0, 1.0], atol=1e-12)
    assert ej.mu == pytest.approx(1.0)


def test_quadratic_has_no_cubic_form():
    with pytest.raises(VanishingPick):
        theta_max(catalog.get("quadratic", 2).function, [0.0, 0.0])


def test_too_few_restarts():
    with pytest.raises(InputError):
        theta_max(catalog.get("thm13a", 2).function, [1.0, 0.0], restarts=4)


def test_grid_search_on_log_paraboloid():
    f2 = catalog.get("thm13a", 2).function
    assert theta_bruteforce(f2, [1.0, 0.0], resolution=10_000) == pytest.approx(2.0, abs=1e-6)
    f3 = catalog.get("thm13a", 3).function
    assert theta_bruteforce(f3, [1.0, 0.0, 0.0], resolution=720) == pytest.approx(2.0, abs=1e-4)


def test_grid_search_limits():
    with pytest.raises(UnsupportedDimension):
        theta_bruteforce(catalog.get("thm13a", 4).function, [1.0, 0.0, 0.0, 0.0])
    with pytest.raises(InputError):
        theta_bruteforce(catalog.get("thm13a", 2).function, [1.0, 0.0], resolution=100)


@pytest.mark.parametrize("name", catalog.NON_QUADRATIC)
@pytest.mark.parametrize("n", [2, 3])
def test_maximizer_matches_grid_search(name, n):
    e = catalog.get(name, n)
    for p in e.sample(3, np.random.default_rng(21)):
        assert theta_max(e.function, p).theta == pytest.approx(theta_bruteforce(e.function, p), abs=1e-4)


def test_generic_function_matches_grid_search():
    f = convex_function("exp(x1 + 0.3*x2) + x1^2 + 2*x2^2 + exp(0.5*x3 - x1) + x3^2", 3)
    for p in ([0.2, -0.3, 0.4], [-0.5, 0.5, 0.1]):
        assert theta_max(f, p).theta == pytest.approx(theta_bruteforce(f, p), abs=1e-6)


@pytest.mark.parametrize("name", catalog.CLASSIFICATION)
@pytest.mark.parametrize("n", [2, 3])
def test_classification_frame(name, n):
    e = catalog.get(name, n)
    for p in e.sample(5, np.random.default_rng(22)):
        ej = theta_max(e.function, p)
        jet = jet4(e.function.body, p)
        G = jet.d2
        A = -0.5 * jet.d3.dense()
        u = ej.maximizer
        assert u @ G @ u == pytest.approx(1.0, abs=1e-10)
        assert np.einsum("ijk,i,j,k->", A, u, u, u) == pytest.approx(ej.theta, abs=1e-10)
        assert ej.theta == pytest.approx(2.0, abs=1e-6)
        np.testing.assert_allclose(ej.spectrum, [2.0] + [1.0] * (n - 1), atol=1e-6)
        # lambda_1 >= 2 lambda_i, with equality on these graphs
        assert np.all(ej.lambda1 >= 2 * ej.maximizer_spectrum - 1e-6)
        assert ej.lambda1 == pytest.approx(2 * ej.spectrum[1], abs=1e-6)
        # |T| = (n+1)/n mu
        _, _, T, m = orthonormal_cubic(e.function, p)
        assert np.sqrt(T @ m.G @ T) == pytest.approx((n + 1) / n * ej.mu, abs=1e-8)


def test_fixed_seed_is_reproducible():
    f = catalog.get("sphere_case", 3).function
    a = theta_max(f, [0.5, 1.0, -0.2], seed=3)
    b = theta_max(f, [0.5, 1.0, -0.2], seed=3)
    assert a.theta == b.theta
    assert np.array_equal(a.maximizer, b.maximizer)
