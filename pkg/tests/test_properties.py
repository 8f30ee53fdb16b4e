"""Every named invariant check passes with the default seed."""

import pytest

from lpflats.properties import PROPERTY_CHECKS, run_property_suite


@pytest.mark.parametrize("name", sorted(PROPERTY_CHECKS))
def test_property(name):
    result = PROPERTY_CHECKS[name](0)
    assert result.name == name
    assert result.passed, result.detail


def test_suite_runner_selects_names():
    picked = run_property_suite(0, names=["energy-homogeneity"])
    assert len(picked) == 1 and picked[0].passed


def test_suite_runner_rejects_unknown():
    with pytest.raises(ValueError):
        run_property_suite(0, names=["not-a-check"])
