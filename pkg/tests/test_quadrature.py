import math

import numpy as np
import pytest

from mixedpowers.errors import ConvergenceError
from mixedpowers.quadrature import integrate


def test_gaussian_integral():
    res = integrate(lambda x: np.exp(-x * x), [-10, 0, 10])
    assert res.value.real == pytest.approx(math.sqrt(math.pi), rel=1e-13)


def test_poisson_kernel_identity():
    # (1/2pi) int e^{-t(1 + i theta - e^{i theta})} d theta = t^t e^{-t} / t!
    for t in (0, 1, 2, 5):
        res = integrate(lambda th: np.exp(-t * (1 + 1j * th - np.exp(1j * th))), [-math.pi, 0, math.pi])
        expect = t ** t * math.exp(-t) / math.factorial(t)
        assert res.value.real / (2 * math.pi) == pytest.approx(expect, rel=1e-12)
        assert abs(res.value.imag) < 1e-12
    assert expect == pytest.approx(5 ** 5 * math.exp(-5) / 120)
    res = integrate(lambda th: np.exp(-2 * (1 + 1j * th - np.exp(1j * th))), [-math.pi, math.pi])
    assert res.value.real / (2 * math.pi) == pytest.approx(2 / math.e ** 2, rel=1e-12)


def test_oscillatory_and_deterministic():
    f = lambda x: np.cos(40 * x) + 1j * np.sin(x)
    a = integrate(f, [0, 1])
    b = integrate(f, [0, 1])
    assert a.value == b.value
    assert a.value.real == pytest.approx(math.sin(40) / 40, abs=1e-13)
    assert a.value.imag == pytest.approx(1 - math.cos(1), abs=1e-13)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_panel_cap():
    with pytest.raises(ConvergenceError):
        integrate(lambda x: np.abs(x) ** -0.9 + 0j, [-1, 1], max_panels=64)
    with pytest.raises(ConvergenceError):
        integrate(lambda x: 1 / x + 0j, [-1, 1])
