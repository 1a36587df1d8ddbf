import numpy as np
import pytest

from calabi import catalog
from calabi.core import connection_and_pick, curvature, invariants, metric_data, sectional_curvature
from calabi.errors import DegeneratePlane, NotConvexAtPoint
from calabi.expr import convex_function
from calabi.jets import jet4

GENERIC = convex_function("exp(x1 + 0.3*x2) + x1^2 + 2*x2^2 + exp(0.5*x3 - x1) + x3^2", 3)


def _at(name, n, point):
    return invariants(jet4(catalog.get(name, n).function.body, point))


def test_log_paraboloid_metric():
    m, _, _ = _at("thm13a", 2, [1.0, 0.0])
    assert m.detD == pytest.approx(1 / 16)
    np.testing.assert_allclose(m.Ginv, np.diag([4.0, 4.0]))
    np.testing.assert_allclose(m.cofactor, m.detD * m.Ginv)
    np.testing.assert_allclose(m.G @ m.Ginv, np.eye(2), atol=1e-12)


def test_log_paraboloid_metric_in_three_dimensions():
    m, _, _ = _at("thm13a", 3, [2.0, 1.0, 1.0])
    assert m.detD == pytest.approx(1 / 64)


def test_quadratic_is_flat():
    m, c, cd = _at("quadratic", 3, [0.2, -0.5, 1.0])
    np.testing.assert_array_equal(m.G, np.eye(3))
    assert m.detD == 1.0
    assert not np.any(c.A) and not np.any(c.Tcheb)
    assert c.pickJ == 0.0
    assert not np.any(cd.Riem)
    assert sectional_curvature(cd, m, [1, 0, 0], [0, 1, 1]) == 0.0


def test_tchebychev_and_pick_values():
    _, c, _ = _at("thm13a", 2, [1.0, 0.0])
    np.testing.assert_allclose(c.Tcheb, [3.0, 0.0], atol=1e-14)
    assert c.Tnorm2 == pytest.approx(9 / 4)
    assert c.pickJ == pytest.approx(7 / 2)


def test_scalar_curvature_and_ricci():
    m, _, cd = _at("thm13a", 2, [1.0, 0.0])
    assert cd.scalar_JT == pytest.approx(-2.0)
    assert cd.scalar_contracted == pytest.approx(-2.0)
    np.testing.assert_allclose(cd.Ricci, np.diag([-0.25, -0.25]), atol=1e-14)
    assert sectional_curvature(cd, m, [1, 0], [0, 1]) == pytest.approx(-1.0)


def test_sphere_case_random_plane():
    e = catalog.get("sphere_case", 3)
    rng = np.random.default_rng(5)
    for p in e.sample(5, rng):
        m, _, cd = invariants(jet4(e.function.body, p))
        u, v = rng.standard_normal((2, 3))
        assert sectional_curvature(cd, m, u, v) == pytest.approx(-1.0, abs=1e-6)


@pytest.mark.parametrize("name", catalog.CLASSIFICATION)
@pytest.mark.parametrize("n", [2, 3])
def test_coordinate_planes_have_curvature_minus_one(name, n):
    e = catalog.get(name, n)
    for p in e.sample(5, np.random.default_rng(6)):
        m, _, cd = invariants(jet4(e.function.body, p))
        eye = np.eye(n)
        for i in range(n):
            for j in range(i + 1, n):
                assert sectional_curvature(cd, m, eye[i], eye[j]) == pytest.approx(-1.0, abs=1e-6)


@pytest.mark.parametrize("name", ["thm13a", "thm13b"])
@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_tchebychev_norm_and_pick_are_constant(name, n):
    e = catalog.get(name, n)
    for p in e.sample(10, np.random.default_rng(n)):
        _, c, _ = invariants(jet4(e.function.body, p))
        assert c.Tnorm2 == pytest.approx((n + 1) ** 2 / n**2, rel=1e-9)
        assert c.pickJ == pytest.approx((3 * n + 1) / (n * (n - 1)), rel=1e-9)


def _check_symmetries(Riem):
    scale = max(1.0, float(np.max(np.abs(Riem))))
    assert np.max(np.abs(Riem + Riem.transpose(1, 0, 2, 3))) <= 1e-10 * scale
    assert np.max(np.abs(Riem + Riem.transpose(0, 1, 3, 2))) <= 1e-10 * scale
    assert np.max(np.abs(Riem - Riem.transpose(2, 3, 0, 1))) <= 1e-10 * scale
    bianchi = Riem + Riem.transpose(0, 2, 3, 1) + Riem.transpose(0, 3, 1, 2)
    assert np.max(np.abs(bianchi)) <= 1e-10 * scale


@pytest.mark.parametrize("name", catalog.names())
def test_curvature_symmetries_on_catalog(name):
    e = catalog.get(name, 3)
    for p in e.sample(20, np.random.default_rng(7)):
        _, _, cd = invariants(jet4(e.function.body, p))
        _check_symmetries(cd.Riem)


def test_generic_function_identities():
    rng = np.random.default_rng(8)
    for p in rng.uniform(-1, 1, (20, 3)):
        jet = jet4(GENERIC.body, p)
        m = metric_data(jet)
        c = connection_and_pick(jet, m)
        cd = curvature(jet, m, c)
        _check_symmetries(cd.Riem)
        assert abs(cd.scalar_contracted - cd.scalar_JT) <= 1e-9 * (1 + abs(cd.scalar_JT))
        np.testing.assert_allclose(c.Gamma, c.Gamma.transpose(0, 2, 1))
        assert c.Tnorm2 >= 0 and c.pickJ >= 0


def test_christoffels_are_levi_civita():
    # Gamma^k_ij = 1/2 G^kl (d_i G_jl + d_j G_il - d_l G_ij) with G_ij = f_ij
    p = [0.2, -0.3, 0.4]
    jet = jet4(GENERIC.body, p)
    m = metric_data(jet)
    f3 = jet.d3.dense()
    lower = 0.5 * (f3.transpose(0, 1, 2) + f3.transpose(1, 0, 2) - f3.transpose(2, 0, 1))
    np.testing.assert_allclose(connection_and_pick(jet, m).Gamma,
                               np.einsum("kl,ijl->kij", m.Ginv, lower), atol=1e-14)


def test_non_convex_point():
    f = convex_function("x1^2 - x2^2", 2)
    with pytest.raises(NotConvexAtPoint):
        metric_data(jet4(f.body, [0.0, 0.0]))


def test_degenerate_plane():
    m, _, cd = _at("thm13a", 2, [1.0, 0.0])
    with pytest.raises(DegeneratePlane):
        sectional_curvature(cd, m, [1.0, 2.0], [2.0, 4.0])


def test_pick_is_undefined_in_one_dimension():
    _, c, _ = invariants(jet4(catalog.get("quadratic", 1).function.body, [0.5]))
    assert np.isnan(c.pickJ)
