import math

import numpy as np
import pytest

from calabi import catalog
from calabi.errors import InputError, LeftDomain
from calabi.expr import convex_function
from calabi.geodesics import geodesic, length_to_boundary, romberg


def _f(name, n=2):
    return catalog.get(name, n).function


def test_axis_geodesic_closed_form():
    path = geodesic(_f("thm13a"), [1.0, 0.0], [2.0, 0.0], 1.0, 1e-3)
    np.testing.assert_allclose(path.end, [math.exp(2.0), 0.0], atol=1e-6)
    np.testing.assert_allclose(path.position[:, 0], np.exp(2 * path.s), rtol=1e-9)
    assert path.speed[0] == pytest.approx(1.0)
    assert path.speed_drift <= 1e-8
    assert path.arc_length == pytest.approx(1.0, abs=1e-8)
    assert not path.left_domain


def test_flat_geodesics_are_lines():
    v = np.array([0.3, -1.2, 0.5])
    path = geodesic(_f("quadratic", 3), [1.0, 2.0, 3.0], v, 0.5, 1e-2)
    np.testing.assert_allclose(path.end, np.array([1.0, 2.0, 3.0]) + 0.5 * v, atol=1e-13)


def test_rk4_order_on_closed_form():
    f = _f("thm13a")
    errors = [abs(geodesic(f, [1.0, 0.0], [2.0, 0.0], 1.0, h).end[0] - math.exp(2.0))
              for h in (0.01, 0.005)]
    assert 12 <= errors[0] / errors[1] <= 20


@pytest.mark.parametrize("name", catalog.NON_QUADRATIC)
def test_speed_conserved_off_axis(name):
    e = catalog.get(name, 2)
    rng = np.random.default_rng(41)
    p = e.sample(1, rng)[0]
    v = rng.standard_normal(2)
    v /= np.linalg.norm(v)
    path = geodesic(e.function, p, 0.1 * v, 1.0, 1e-3)
    assert path.speed_drift <= 1e-8 * max(1.0, path.speed[0])
    for x in path.position:
        assert e.function.domain.contains(x)


def test_leaving_the_domain():
    # a straight line leaves the half-plane x1 > 0; the metric is flat in x2 only
    f = convex_function("-ln(x1) + x2^2", 2, ["x1"])
    path = geodesic(f, [1.0, 0.0], [0.0, 50.0], 0.5, 1e-2)
    assert not path.left_domain
    g = convex_function("x1^2 + x2^2", 2, ["1 - x1"])
    path = geodesic(g, [0.0, 0.0], [5.0, 0.0], 1.0, 1e-2)
    assert path.left_domain
    assert g.domain.contains(path.end)
    with pytest.raises(LeftDomain) as info:
        geodesic(g, [0.0, 0.0], [5.0, 0.0], 1.0, 1e-2, raise_on_exit=True)
    assert info.value.path is not None and info.value.path.left_domain


def test_geodesic_input_checks():
    f = _f("thm13a")
    with pytest.raises(InputError):
        geodesic(f, [1.0, 0.0], [0.0, 0.0], 1.0)
    with pytest.raises(InputError):
        geodesic(f, [1.0, 0.0], [1.0, 0.0], 1.0, step=0.1)


# -- length to the boundary -------------------------------------------------------------

def test_length_to_boundary_closed_form():
    f = _f("thm13a")
    assert length_to_boundary(f, [1.0, 0.0], [-1.0, 0.0], 1e-6).length == pytest.approx(
        0.5 * math.log(1e6), abs=1e-4)
    assert length_to_boundary(f, [1.0, 0.0], [-1.0, 0.0], 1e-8).length == pytest.approx(
        9.21034, abs=1e-4)


def test_length_on_flat_space_is_capped():
    r = length_to_boundary(_f("quadratic"), [0.0, 0.0], [3.0, 4.0], cap=7.0)
    assert r.not_truncated
    assert r.length == pytest.approx(7.0, rel=1e-12)


@pytest.mark.parametrize("name", ["thm13a", "thm13b"])
@pytest.mark.parametrize("eps", [1e-3, 1e-5, 1e-7])
def test_logarithmic_divergence(name, eps):
    f = _f(name)
    gap = (length_to_boundary(f, [1.0, 0.0], [-1.0, 0.0], eps / 10).length
           - length_to_boundary(f, [1.0, 0.0], [-1.0, 0.0], eps).length)
    assert gap == pytest.approx(0.5 * math.log(10), abs=1e-3)


def test_oblique_ray_toward_parabola():
    f = _f("thm13a", 3)
    lengths = [length_to_boundary(f, [2.0, 0.3, 0.1], [-1.0, 0.2, 0.0], eps).length
               for eps in (1e-4, 1e-5, 1e-6)]
    assert np.diff(lengths) == pytest.approx([0.5 * math.log(10)] * 2, abs=1e-3)


def test_romberg_on_smooth_integrand():
    value, _ = romberg(math.exp, 0.0, 1.0)
    assert value == pytest.approx(math.e - 1, rel=1e-10)


def test_length_input_checks():
    with pytest.raises(InputError):
        length_to_boundary(_f("thm13a"), [1.0, 0.0], [0.0, 0.0])
    with pytest.raises(InputError):
        length_to_boundary(_f("thm13a"), [1.0, 0.0], [-1.0, 0.0], eps=0.0)
