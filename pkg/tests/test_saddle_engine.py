import math
from fractions import Fraction

import mpmath
import pytest

from mixedpowers import saddle_engine as se
from mixedpowers.errors import BadEpsilon, CoalescenceError, NoCriticalPoint, NoValidEpsilon, RegimeError
from mixedpowers.exact_series import BigCoefficient, RationalPoly
from mixedpowers.function_system import exact_coefficient

from regression_set import regression_instances
from test_critical_locus import planar_dir, tri_dir


def test_exact_on_regression_set():
    for label, system, n in regression_instances():
        est = se.integral_small(system, n)
        assert est.rel_error(exact_coefficient(system, n)) < 1e-8, (label, n)


def test_small_examples(tri):
    assert float(se.integral_small(tri, (3, 4, 2)).value) == pytest.approx(44, rel=1e-12)
    est = se.integral_small(tri, (0, 5, 3))
    assert est.rel_error(1) < 1e-15
    exact = exact_coefficient(tri, (2, 980, 10))
    assert se.integral_small(tri, (2, 980, 10)).rel_error(exact) < 1e-10


def test_large_exponent_with_chosen_epsilon(tri):
    n = (300, 800, 100)
    est = se.integral_large(tri, n)
    assert est.regime == se.LARGE
    assert est.rel_error(exact_coefficient(tri, n)) < 1e-6
    assert est.diagnostics["tail_bound"] < 1e-8
    assert est.diagnostics["epsilon"] == pytest.approx(math.pi / 2)
    full = se.integral_large(tri, n, epsilon=math.pi)
    assert abs(full.log_abs - se.integral_small(tri, n).log_abs) < 1e-12


def test_contour_split(tri):
    n = (120, 300, 40)
    ctx = se.prepare(tri, n)
    eps = se.choose_epsilon(tri, ctx.d, ctx.cp)
    inner, _, _ = se.circle_integral(ctx, -eps, eps)
    left, _, _ = se.circle_integral(ctx, -math.pi, -eps, tol=1e-9)
    right, _, _ = se.circle_integral(ctx, eps, math.pi, tol=1e-9)
    whole, _, _ = se.circle_integral(ctx)
    assert abs((inner + left + right) / whole - 1) < 1e-6


def test_planar_amplitude_instance(planar, one_minus_two_z):
    est = se.integral_small(planar.with_amplitude(one_minus_two_z), (1, 9, 1))
    assert float(est.value) == pytest.approx(6, rel=1e-12)


def test_gaussian_binomial(tri):
    est = se.gaussian_leading(tri, (50, 100, 0))
    exact = BigCoefficient(math.comb(100, 50))
    assert est.rel_error(exact) == pytest.approx(0.0025, abs=0.0005)
    assert float(est.value) == pytest.approx(1.01145e29, rel=2e-5)


def test_gaussian_refuses_coalescence(planar):
    with pytest.raises(CoalescenceError):
        se.gaussian_leading(planar, (200, 900, 99))
    with pytest.raises(CoalescenceError):
        se.gaussian_leading(planar, (2, 9, 1))
    with pytest.raises(CoalescenceError):
        se.AsymptoticEstimate(1, mpmath.mpf(0), se.LARGE, "gaussian", {"c2": 0.0})


def test_gaussian_doubling(tri):
    errs = []
    for s in (8, 16, 32):
        n = (s * 1, s * 2, 0)
        errs.append(se.gaussian_leading(tri, n).rel_error(exact_coefficient(tri, n)))
    assert errs[0] > errs[1] > errs[2]


def test_first_order_factor(tri):
    n = (60, 80, 40)
    exact = exact_coefficient(tri, n)
    lead = se.gaussian_leading(tri, n).rel_error(exact)
    corr = se.gaussian_leading(tri, n, corrected=True).rel_error(exact)
    assert corr < lead / 10


def test_choose_epsilon(tri, planar):
    assert se.choose_epsilon(tri, tri_dir(3, 4, 2)) in (math.pi / 2, math.pi / 4)
    assert se.choose_epsilon(planar, planar_dir("2/9", 1, "1/9")) <= math.pi / 2
    with pytest.raises(NoValidEpsilon):
        se.choose_epsilon(tri, tri_dir(0, 1, 1))


def test_small_limit(tri):
    est = se.small_exponent_limit(tri, (2, 980, 10))
    assert float(est.value) == pytest.approx(500000, rel=1e-12)
    assert est.rel_error(499490) == pytest.approx(0.00102, abs=0.00002)
    assert float(se.small_exponent_limit(tri, (0, 5, 1)).value) == pytest.approx(1)
    with pytest.raises(RegimeError):
        se.small_exponent_limit(tri, (300, 800, 100))


def test_auto_dispatch(tri, planar):
    assert se.estimate(tri, (3, 4, 2)).method == "quadrature"
    est = se.estimate(tri, (300, 800, 100))
    assert est.method == "gaussian" and est.regime == se.LARGE
    est = se.estimate(planar, (200, 900, 99))
    assert est.method == "quadrature" and est.regime == se.LARGE
    assert est.rel_error(exact_coefficient(planar, (200, 900, 99))) < 1e-6


def test_no_critical_point(tri):
    with pytest.raises(NoCriticalPoint):
        se.estimate(tri, (1, 0, 0))
    with pytest.raises(NoCriticalPoint):
        se.estimate(tri, (30, 10, 5))


def test_bad_epsilon(tri):
    with pytest.raises(BadEpsilon):
        se.integral_large(tri, (300, 800, 100), epsilon=0.0)


def test_estimate_json(tri):
    js = se.estimate(tri, (300, 800, 100)).to_json()
    assert js["sign"] == 1 and js["regime"] == "large-exponent" and js["method"] == "gaussian"
    assert isinstance(js["log_abs"], str)
    assert "tail_bound" in js["diagnostics"]
