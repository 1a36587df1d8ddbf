import io
import json
import math

import jsonschema
import numpy as np
import pytest
from hypothesis import given, strategies as st

from calabi import catalog
from calabi.errors import DomainViolation
from calabi.expr import convex_function
from calabi.geodesics import geodesic
from calabi.report import (analyze, dumps, geodesic_rows, load_schema, to_json, trajectory_rows,
                           write_csv)
from calabi.warped import integrate_eta


def _report(**kw):
    return analyze(catalog.get("thm13a", 2), [1.0, 0.0], **kw)


def test_pick_invariant_in_json():
    text = to_json(_report())
    assert '"pickJ": 3.5' in text
    assert json.loads(text)["result"]["invariants"]["pickJ"] == 3.5


def test_empty_pde_section_is_present():
    assert json.loads(to_json(_report()))["result"]["pde"] == []


def test_pde_section_per_exponent():
    pde = json.loads(to_json(_report(exponents=[-2 / 3, -1.0])))["result"]["pde"]
    assert [round(e["a"], 6) for e in pde] == [round(-2 / 3, 6), -1.0]
    assert abs(pde[0]["residual_12"]) <= 1e-9
    assert pde[1]["implied_Lsharp"] == pytest.approx(-12.0, rel=1e-9)


def test_same_seed_gives_identical_bytes():
    assert to_json(_report(seed=5)) == to_json(_report(seed=5))


def test_seed_is_stamped():
    assert json.loads(to_json(_report(seed=9)))["result"]["provenance"]["seed"] == 9


def test_expected_values_labelled():
    expected = json.loads(to_json(_report()))["result"]["expected"]
    assert {e["basis"] for e in expected} <= {"stated", "derived"}
    assert all(e["note"] for e in expected)


def test_quadratic_has_no_frames_section():
    r = analyze(catalog.get("quadratic", 2), [0.0, 0.0])
    assert r.frames is None
    assert r.invariants["pickJ"] == 0.0


def test_expression_report():
    f = convex_function("exp(x1) + x2^2", 2)
    d = json.loads(to_json(analyze(f, [0.1, 0.2])))["result"]
    assert d["function"]["source"] == f.source
    assert d["metric"]["detD"] == pytest.approx(2 * math.exp(0.1))


def test_outside_point_rejected():
    with pytest.raises(DomainViolation):
        analyze(catalog.get("thm13a", 2), [-1.0, 0.0])


@pytest.mark.parametrize("name", catalog.names())
def test_analysis_validates_against_schema(name):
    e = catalog.get(name, 3)
    p = e.sample(1, np.random.default_rng(3))[0]
    doc = json.loads(to_json(analyze(e, p, exponents=[-0.5])))
    jsonschema.validate(doc, load_schema())


# -- serialization ----------------------------------------------------------------------

floats = st.floats(allow_nan=False, allow_infinity=False)
values = st.recursive(st.none() | st.booleans() | st.integers() | floats | st.text(),
                      lambda inner: st.lists(inner, max_size=4)
                      | st.dictionaries(st.text(max_size=5), inner, max_size=4),
                      max_leaves=20)


@given(values)
def test_round_trip_is_lossless(v):
    text = dumps(v)
    assert json.loads(text) == v
    assert dumps(json.loads(text)) == text


@given(floats)
def test_floats_survive_exactly(x):
    assert json.loads(dumps(x)) == x


def test_non_finite_becomes_null():
    assert json.loads(dumps({"a": math.nan, "b": [math.inf, 1.0]})) == {"a": None, "b": [None, 1.0]}


def test_integral_float_keeps_float_type():
    assert dumps(2.0).strip() == "2.0"
    assert dumps(np.float64(0.1)).strip() == "0.10000000000000001"
    assert dumps(np.arange(3)).replace(" ", "").replace("\n", "") == "[0,1,2]"


def test_key_order_is_kept():
    assert list(json.loads(dumps({"z": 1, "a": 2}))) == ["z", "a"]


# -- CSV --------------------------------------------------------------------------------

def test_csv_layout():
    text = write_csv(["name", "value"], [["plain", 1.5], ['has,comma "q"', 2]])
    assert text == 'name,value\nplain,1.5\n"has,comma ""q""",2\n'
    assert "\r" not in text


def test_csv_stream():
    buf = io.StringIO()
    write_csv(["a"], [[1]], buf)
    assert buf.getvalue() == "a\n1\n"


def test_trajectory_table():
    header, rows = trajectory_rows(integrate_eta(0.0, 0.01, 1e-3))
    assert header == ["t", "eta", "rho", "cbar"]
    assert len(rows) == 11


def test_geodesic_table():
    path = geodesic(catalog.get("thm13a", 3).function, [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], 0.01, 1e-3)
    header, rows = geodesic_rows(path)
    assert header == ["s", "x1", "x2", "x3", "speed"]
    assert len(rows[0]) == 5
