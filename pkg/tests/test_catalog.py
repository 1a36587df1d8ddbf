import numpy as np
import pytest

from calabi import catalog
from calabi.core import invariants
from calabi.errors import UnknownEntry, UnsupportedDimension
from calabi.expr import evaluate, parse
from calabi.frames import theta_max
from calabi.jets import jet4
from calabi.pde import pde_report


def test_log_paraboloid_entry():
    e = catalog.get("thm13a", 2)
    assert e.function.body == parse("-0.25*ln(x1 - (x2^2)/2)", 2)
    exp = e.expected
    assert exp["solving_exponent"].value == pytest.approx(-2 / 3)
    assert exp["Lsharp_at_minus1"].value == -12.0
    assert exp["theta"].value == 2.0
    assert exp["Tnorm2"].value == 9 / 4
    assert exp["pickJ"].value == 7 / 2


def test_quadratic_entry():
    e = catalog.get("quadratic", 3)
    _, c, _ = invariants(jet4(e.function.body, [0.1, 0.2, 0.3]))
    assert c.Tnorm2 == 0.0 and c.pickJ == 0.0
    assert catalog.get("quadratic", 1).n == 1


def test_hyperbolic_entry_has_no_exponent():
    e = catalog.get("hyperbolic_case", 2)
    assert e.expected["solving_exponent"].value is None
    assert e.expected["solving_exponent"].basis == "stated"


@pytest.mark.parametrize("name, point, inside", [
    ("thm13a", [1.0, 1.0], True), ("thm13a", [0.4, 1.0], False),
    ("thm13b", [0.1, 5.0], True), ("thm13b", [-0.1, 0.0], False),
    ("sphere_case", [0.0, 0.1], True), ("sphere_case", [0.0, 0.0], False),
    ("hyperbolic_case", [2.0, 1.0], True), ("hyperbolic_case", [1.2, 0.7], False),
    ("dual59", [-1.0, 1.0], True), ("dual59", [-0.4, 1.0], False),
])
def test_domains(name, point, inside):
    assert catalog.get(name, 2).function.domain.contains(point) is inside


def test_unknown_name_and_dimension():
    with pytest.raises(UnknownEntry):
        catalog.get("cubic", 2)
    with pytest.raises(UnsupportedDimension):
        catalog.get("thm13a", 1)
    with pytest.raises(UnsupportedDimension):
        catalog.get("quadratic", 0)


@pytest.mark.parametrize("name", catalog.names())
@pytest.mark.parametrize("n", [2, 3, 5])
def test_sampler_stays_inside(name, n):
    e = catalog.get(name, n)
    for p in e.sample(50, np.random.default_rng(n)):
        assert e.function.domain.margin(p) >= 1e-3
        assert e.function.is_convex_at(p)


@pytest.mark.parametrize("name", catalog.names())
def test_expected_values_carry_a_basis(name):
    for rec in catalog.get(name, 3).expected.values():
        assert rec.basis in ("stated", "derived")
        assert rec.note


@pytest.mark.parametrize("name", catalog.NON_QUADRATIC)
@pytest.mark.parametrize("n", [2, 3])
def test_expected_values_are_reproduced(name, n):
    e = catalog.get(name, n)
    p = e.sample(1, np.random.default_rng(50))[0]
    _, c, _ = invariants(jet4(e.function.body, p))
    exp = e.expected
    assert c.Tnorm2 == pytest.approx(exp["Tnorm2"].value, rel=1e-9)
    assert c.pickJ == pytest.approx(exp["pickJ"].value, rel=1e-9)
    assert theta_max(e.function, p).theta == pytest.approx(exp["theta"].value, abs=1e-6)
    a = exp.get("solving_exponent")
    if a is not None and a.value is not None:
        r = pde_report(e.function, p, a.value)
        assert abs(r.normalized_residual) <= 1e-8
    L = exp.get("Lsharp_at_minus1")
    if L is not None:
        assert pde_report(e.function, p, -1.0).implied_Lsharp == pytest.approx(L.value, rel=1e-8)


def test_equivalence_record():
    e = catalog.get("dual59", 2)
    assert e.equivalent_to == "thm13a"
    x = np.array([-2.0, 0.5])
    image = e.equivalence(np.append(x, evaluate(e.function.body, x)))
    assert image[-1] == pytest.approx(catalog.get("thm13a", 2).function(image[:2]))


def test_entries_listing():
    assert [e.name for e in catalog.entries(2)] == list(catalog.names())
    assert "quadratic" not in [e.name for e in catalog.entries(2, include_quadratic=False)]
