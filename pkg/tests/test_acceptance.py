"""The thirteen acceptance criteria, one test each, at their stated tolerances.

Each test prints a single pass/fail line (visible without ``-s``) and then
asserts the verdict.  The checks themselves live in :mod:`calabi.verify`, so
``calabi verify`` and this file exercise the same code.
"""

import time

import pytest

from calabi.verify import CHECKS, run_check

SEED = 42
_elapsed = {}


@pytest.mark.parametrize("cid", sorted(CHECKS))
def test_criterion(cid, capsys):
    start = time.perf_counter()
    result = run_check(cid, SEED)
    _elapsed[cid] = time.perf_counter() - start
    with capsys.disabled():
        print("\n" + result.line())
    assert result.id == cid
    assert result.passed, result.line()


def test_suite_runs_within_a_minute(capsys):
    total = sum(_elapsed.values())
    with capsys.disabled():
        print(f"\nacceptance suite: {len(_elapsed)} criteria in {total:.1f} s")
    assert len(_elapsed) == len(CHECKS)
    assert total < 60.0
