import pytest

from corrbath import validation


@pytest.mark.parametrize("m0", [0.0, 0.6, 1.0])
def test_builtin_suite_passes(m0):
    results = validation.run_suite(m0=m0, r1=1.3)
    failed = [r.name for r in results if not r.passed]
    assert not failed
    assert len(results) >= 13


def test_check_direction():
    assert validation._check("x", 1e-12, 1e-10).passed
    assert not validation._check("x", 1e-9, 1e-10).passed
    assert validation._check("x", 2.0, 1.0, above=True).passed
