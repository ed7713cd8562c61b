"""Coefficients ``c(n, k, t)`` of ``1 / ((1 - y(1+z)) (1 - x y^2 (1+2z)))``.

``c(n, k, t)`` counts the t-subsets of a k-set, carrying n disjoint marked
pairs, that contain none of the pairs. Extracting x and y leaves

    c(n, k, t) = [z^t] (1+z)^{k-2n} (1+2z)^n,

a mixed-power coefficient with exponent vector ``(t, k-2n, n)``. Norms use
the weights ``(1, 1, 2)``, so ``||(t, k-2n, n)|| = k + t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from ..critical_locus import TRIVARIATE_NORM
from ..errors import DomainError, InternalInconsistency
from ..exact_series import BigCoefficient, RationalPoly, binomial, coeff_of_product
from ..function_system import FunctionSystem
from ..precision import working_precision
from .. import saddle_engine as se

__all__ = [
    "TrivariateQuery",
    "trivariate_system",
    "inclusion_exclusion",
    "trivariate_oracle",
    "trivariate_exact",
    "trivariate_estimate",
    "trivariate_z",
    "gaussian_formula",
    "bounded_t_formula",
    "growing_t_formula",
    "METHODS",
]

F1 = RationalPoly((1, 1))
F2 = RationalPoly((1, 2))


def trivariate_system() -> FunctionSystem:
    return FunctionSystem((F1, F2), norm=TRIVARIATE_NORM)


@dataclass(frozen=True)
class TrivariateQuery:
    n: int
    k: int
    t: int

    def __post_init__(self):
        for name in ("n", "k", "t"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise DomainError(f"{name} must be a nonnegative integer")
        if 2 * self.n > self.k:
            raise DomainError("queries need 2n <= k (the coefficient vanishes otherwise)")

    @property
    def exponents(self):
        return (self.t, self.k - 2 * self.n, self.n)

    @property
    def size(self):
        return self.k + self.t


def inclusion_exclusion(n: int, k: int, t: int) -> BigCoefficient:
    """``sum_i (-1)^i C(n, i) C(k - 2i, t - 2i)``; zero when ``2n > k``."""
    if 2 * n > k:
        return BigCoefficient(0)
    total = 0
    for i in range(n + 1):
        term = math.comb(n, i) * int(binomial(k - 2 * i, t - 2 * i))
        total += -term if i % 2 else term
    return BigCoefficient(total)


def trivariate_oracle(n: int, k: int, t: int) -> BigCoefficient:
    """``[z^t] (1+z)^{k-2n} (1+2z)^n`` by truncated polynomial powering."""
    if 2 * n > k:
        return BigCoefficient(0)
    return coeff_of_product(t, [(F1, k - 2 * n), (F2, n)])


def trivariate_exact(q: TrivariateQuery) -> BigCoefficient:
    """Exact ``c(n, k, t)``, computed two ways which must agree."""
    a = inclusion_exclusion(q.n, q.k, q.t)
    b = trivariate_oracle(q.n, q.k, q.t)
    if a != b:
        raise InternalInconsistency(f"c{(q.n, q.k, q.t)}: inclusion-exclusion {a.value} != oracle {b.value}")
    return a


def trivariate_z(q: TrivariateQuery) -> float:
    """Closed-form critical point for the query's direction."""
    n, k, t = q.n, q.k, q.t
    if k - n <= t:
        raise DomainError("the query's direction lies outside the solvable region (needs t < k - n)")
    if t == 0:
        return 0.0
    return 2 * t / (k - 3 * t + math.sqrt((k - 3 * t) ** 2 + 8 * t * (k - n - t)))


def _log_core(q, z):
    """``ln(Z^{-t} (1+Z)^{k-2n} (1+2Z)^n)``."""
    zm = mpmath.mpf(z)
    return -q.t * mpmath.log(zm) + (q.k - 2 * q.n) * mpmath.log1p(zm) + q.n * mpmath.log1p(2 * zm)


def gaussian_formula(q: TrivariateQuery) -> se.AsymptoticEstimate:
    """Closed-form Gaussian leading term for ``c(n, k, t)``."""
    z = trivariate_z(q)
    if z == 0:
        raise DomainError("the Gaussian term needs t > 0")
    with working_precision():
        zm = mpmath.mpf(z)
        bracket = (q.k - 2 * q.n) / (1 + zm) ** 2 + 2 * q.n / (1 + 2 * zm) ** 2
        log_abs = (_log_core(q, z) - mpmath.log(zm) / 2 - mpmath.log(2 * mpmath.pi) / 2
                   - mpmath.log(bracket) / 2)
    regime = se.SMALL if q.size * z <= se.REGIME_THRESHOLD else se.LARGE
    return se.AsymptoticEstimate(1, +log_abs, regime, "gaussian",
                                 {"nz_product": q.size * z, "c2": float(zm * bracket / 2 / q.size),
                                  "formula": "closed-form", "tail_bound": None, "epsilon": None})


def bounded_t_formula(q: TrivariateQuery) -> se.AsymptoticEstimate:
    """``k^t / t!`` for bounded t."""
    with working_precision():
        log_abs = q.t * mpmath.log(q.k) - mpmath.loggamma(q.t + 1) if q.t else mpmath.mpf(0)
    z = trivariate_z(q)
    return se.AsymptoticEstimate(1, +log_abs, se.SMALL, "small-limit",
                                 {"nz_product": q.size * z, "formula": "bounded-t",
                                  "epsilon": None, "tail_bound": None})


def growing_t_formula(q: TrivariateQuery) -> se.AsymptoticEstimate:
    """``Z^{-t} (1+Z)^{k-2n} (1+2Z)^n / sqrt(2 pi t)`` for growing ``t = o(k)``."""
    if q.t == 0:
        raise DomainError("the growing-t formula needs t > 0")
    z = trivariate_z(q)
    with working_precision():
        log_abs = _log_core(q, z) - mpmath.log(2 * mpmath.pi * q.t) / 2
    return se.AsymptoticEstimate(1, +log_abs, se.SMALL, "small-limit",
                                 {"nz_product": q.size * z, "formula": "growing-t",
                                  "epsilon": None, "tail_bound": None})


METHODS = ("auto", "gaussian", "quadrature", "small-limit", "gaussian-formula", "large-t")


def trivariate_estimate(q: TrivariateQuery, method: str = "auto") -> se.AsymptoticEstimate:
    """Estimate ``c(n, k, t)``.

    ``gaussian``/``quadrature``/``small-limit``/``auto`` go through the generic
    engine; ``gaussian-formula`` and ``large-t`` evaluate the closed forms.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    trivariate_z(q)  # domain check
    if method == "gaussian-formula":
        return gaussian_formula(q)
    if method == "large-t":
        return growing_t_formula(q)
    return se.estimate(trivariate_system(), q.exponents, method)
