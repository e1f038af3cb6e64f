"""Acceptance gate: one test per verification check, each printing its own
pass/fail line with the runtime and the check's summary.

The checks themselves live in ftlaguerre.verification so that
`ftlaguerre verify --suite full` runs the identical code path.
"""

import pytest

from ftlaguerre.verification import available_checks, run_check

CHECKS = available_checks("full")


def test_registry_is_complete():
    assert len(CHECKS) == 11
    assert set(available_checks("quick")) < set(CHECKS)


@pytest.mark.parametrize("name", CHECKS)
def test_acceptance(name):
    result = run_check(name)
    print(result.line)
    assert result.passed, result.detail
    assert result.seconds < result.budget, (
        f"{name} took {result.seconds:.1f}s, budget {result.budget:.0f}s"
    )
