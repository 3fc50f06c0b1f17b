import numpy as np
import pytest

from specshape.geometry import FourierBoundary
from specshape.validation import (CheckLine, fd_derivative_audit, hessian_identity_check, run_validation,
                                  write_report)

from conftest import J01


@pytest.mark.parametrize("R", [1.0, 2.0, 0.7])
def test_hessian_identity_constant(R):
    h = hessian_identity_check(R, "const")
    lam = J01 ** 2 / R ** 2
    assert h.err < 1e-8
    assert h.rhs == pytest.approx(lam ** 2, rel=1e-10)
    assert h.hessian_norm2 == pytest.approx(lam ** 2 - 2 * J01 ** 2 / R ** 4, rel=1e-10)


def test_unit_disk_values():
    h = hessian_identity_check(1.0, "const")
    assert h.lhs == pytest.approx(33.4452, abs=1e-4)
    assert h.hessian_norm2 == pytest.approx(21.8788, abs=1e-4)


def test_hessian_identity_bump():
    h = hessian_identity_check(1.0, "bump")
    assert h.boundary_term == 0.0
    assert h.err < 1e-8
    with pytest.raises(ValueError):
        hessian_identity_check(1.0, "other")
    with pytest.raises(ValueError):
        hessian_identity_check(0.0)


def test_audit_zero_direction():
    a = fd_derivative_audit(FourierBoundary.circle(), 1, np.zeros(3), levels=((20, 40),))
    assert a.passed and a.rel_err == 0.0 and a.formula[0] == 0.0


def test_audit_dilation_single_level():
    a = fd_derivative_audit(FourierBoundary.circle(), 1, np.array([1.0, 0.0, 0.0]), levels=((40, 80),))
    assert a.formula[0] == pytest.approx(-2 * J01 ** 2, rel=1e-2)
    # without extrapolation only the discretization-level agreement is expected
    assert a.rel_err < 5e-3


def test_audit_disk_cluster_quick():
    a = fd_derivative_audit(FourierBoundary.circle(), 2, lambda t: np.cos(2 * t) + 0.3 * np.sin(3 * t),
                            levels=((20, 40), (40, 80)))
    assert a.cluster == (2, 3)
    assert a.formula[0] < 0 < a.formula[1]
    assert a.passed


def test_report_format(tmp_path):
    lines = [CheckLine("a", True, 1.0, 1.0, 0.0), CheckLine("b", False, np.float64(2.0), 1.0, 1.0)]
    write_report(lines, tmp_path / "validate.txt")
    text = (tmp_path / "validate.txt").read_text().splitlines()
    assert text == ["a PASS 1.0 1.0 0.0", "b FAIL 2.0 1.0 1.0"]


def test_quick_suite_passes():
    lines = run_validation(quick=True)
    assert all(line.passed for line in lines), [l.format() for l in lines if not l.passed]
