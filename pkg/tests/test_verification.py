"""The bundled verification suites pass on reference parameters."""

from __future__ import annotations

import json
import math

import pytest

from kawasaki_dpp.kernel import Window
from kawasaki_dpp.verification import SUITE_NAMES, Report, run_suite

WINDOW = Window.from_indices(-4, 4)


def _assert_clean(report: Report):
    failed = [c.name for c in report.checks if not c.passed]
    assert report.failures == 0, f"failing checks: {failed}"
    for check in report.checks:
        assert math.isfinite(check.value)


@pytest.mark.parametrize("suite", ["kernel", "rn", "exact"])
def test_fast_suites_real_branch(real_pair, suite):
    _assert_clean(run_suite(suite, real_pair, WINDOW, seed=7))


def test_kernel_suite_conjugate_branch(conj_pair):
    _assert_clean(run_suite("kernel", conj_pair, WINDOW, seed=7))


def test_dynamics_suite(real_pair):
    _assert_clean(run_suite("dynamics", real_pair, WINDOW, seed=7))


def test_all_suites_pass(real_pair):
    # the full bundle, sampler check at acceptance scale included
    report = run_suite("all", real_pair, WINDOW, seed=7)
    _assert_clean(report)
    assert report.suite == "all"
    names = [c.name for c in report.checks]
    assert len(names) == len(set(names))
    payload = json.loads(report.to_json())
    assert payload["failures"] == 0
    assert {"name", "passed", "value", "tolerance"} == set(payload["checks"][0])


def test_unknown_suite_rejected(real_pair):
    with pytest.raises(ValueError):
        run_suite("everything", real_pair, WINDOW, seed=0)


def test_suite_names_stable():
    assert SUITE_NAMES == ("kernel", "dpp", "rn", "dynamics", "exact")
