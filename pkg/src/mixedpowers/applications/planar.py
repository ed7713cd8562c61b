"""Core-size coefficients of non-separable planar maps.

With ``phi = (1+z)^3`` and ``psi = z(1-z)``,

    [z^{n-1}] phi^n psi^{k-1} psi'
        = [z^{n_0}] (1+z)^{n_1} (1-z)^{n_2} - 2 [z^{n_0-1}] (1+z)^{n_1} (1-z)^{n_2},

where ``(n_0, n_1, n_2) = (n-k, 3n, k-1)``. Directions use the max norm, and
the two saddles of ``(1+z, 1-z)`` merge at z = 1/2 when k is close to n/3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from ..critical_locus import PLANAR_NORM, planar_discriminant
from ..errors import CoalescenceError, DomainError, InternalInconsistency
from ..exact_series import BigCoefficient, RationalPoly, coeff_of_product
from ..function_system import FunctionSystem, direction_of, reduce_vanishing
from ..phase_term import taylor_F
from ..precision import working_precision
from .. import saddle_engine as se
from .airy import map_airy_density

__all__ = [
    "PlanarCoreQuery",
    "planar_system",
    "planar_terms",
    "planar_core_exact",
    "planar_core_direct",
    "planar_core_estimate",
    "coalescence_diagnostic",
    "in_planar_domain",
    "read_sequence",
    "p_nk",
    "airy_local_limit",
    "METHODS",
]

ONE_PLUS = RationalPoly((1, 1))
ONE_MINUS = RationalPoly((1, -1))
PHI = RationalPoly((1, 3, 3, 1))
PSI = RationalPoly((0, 1, -1))
PSI_PRIME = RationalPoly((1, -2))


def planar_system() -> FunctionSystem:
    return FunctionSystem((ONE_PLUS, ONE_MINUS), norm=PLANAR_NORM)


@dataclass(frozen=True)
class PlanarCoreQuery:
    n: int
    k: int

    def __post_init__(self):
        if int(self.n) != self.n or int(self.k) != self.k:
            raise DomainError("n and k must be integers")
        if not 1 <= self.k <= self.n:
            raise DomainError("queries need 1 <= k <= n")

    @property
    def exponents(self):
        return (self.n - self.k, 3 * self.n, self.k - 1)

    @property
    def direction(self):
        return direction_of(self.exponents, PLANAR_NORM)

    @property
    def window_coord(self) -> float:
        return (self.k - self.n / 3) / self.n ** (2.0 / 3.0)


def planar_terms(q: PlanarCoreQuery):
    """The two exact coefficients of the decomposition."""
    n0, n1, n2 = q.exponents
    a = coeff_of_product(n0, [(ONE_PLUS, n1), (ONE_MINUS, n2)])
    b = coeff_of_product(n0 - 1, [(ONE_PLUS, n1), (ONE_MINUS, n2)])
    return a, b


def planar_core_direct(q: PlanarCoreQuery) -> BigCoefficient:
    """``[z^{n-1}] phi^n psi^{k-1} psi'`` after stripping the powers of z from psi."""
    raw = FunctionSystem((PHI, PSI, PSI_PRIME), check=False)
    red = reduce_vanishing(raw, (q.n - 1, q.n, q.k - 1, 1))
    if red.is_zero:
        return BigCoefficient(0)
    return coeff_of_product(red.n.n0, list(zip(red.system.factors, red.n.tail)))


def planar_core_exact(q: PlanarCoreQuery) -> BigCoefficient:
    """Exact coefficient; the decomposition and the direct expansion must agree."""
    a, b = planar_terms(q)
    via_terms = BigCoefficient(a.value - 2 * b.value)
    direct = planar_core_direct(q)
    if via_terms != direct:
        raise InternalInconsistency(f"planar {(q.n, q.k)}: {via_terms.value} != {direct.value}")
    return via_terms


def in_planar_domain(q: PlanarCoreQuery) -> bool:
    d0, d1, d2 = q.direction.d
    if (d0, d2) in ((0.0, 1.0), (1.0, 0.0)):
        return False
    return planar_discriminant(d0, d1, d2) >= -1e-12


def _require_domain(q):
    if not in_planar_domain(q):
        raise DomainError(f"direction of {(q.n, q.k)} lies outside the region where the critical point exists")


def coalescence_diagnostic(q: PlanarCoreQuery) -> dict:
    """``c2 = F''(0)/2`` at the query's direction, plus the window coordinate."""
    _require_domain(q)
    system = planar_system()
    exp4 = taylor_F(system, q.direction, 4)
    correction, airy = se.coalescence_measures(exp4, 3 * q.n)
    return {
        "c2": float(mpmath.re(exp4.c2)),
        "c3": complex(exp4.c3).imag,
        "c4": complex(exp4.c4).real,
        "z": exp4.z_critical.z,
        "window_coord": q.window_coord,
        "airy_parameter": airy,
        "predicted_correction": correction,
    }


def _combine(sign_a, log_a, sign_b, log_b):
    """``value_a - 2 value_b`` in (sign, log) form."""
    with working_precision():
        va = sign_a * mpmath.exp(log_a) if sign_a else mpmath.mpf(0)
        vb = sign_b * mpmath.exp(log_b) if sign_b else mpmath.mpf(0)
        total = va - 2 * vb
        if total == 0:
            return 0, mpmath.mpf("-inf")
        return (1 if total > 0 else -1), mpmath.log(abs(total))


METHODS = ("quadrature", "gaussian", "gaussian-corrected")


def planar_core_estimate(q: PlanarCoreQuery, method: str = "quadrature") -> se.AsymptoticEstimate:
    """Estimate the core coefficient from the two decomposition terms.

    ``quadrature`` integrates both terms on the common circle through the
    critical point of the first term; ``gaussian`` combines the two Gaussian
    leading terms and is refused near coalescence; ``gaussian-corrected``
    adds the first-order Laplace factor to each term before combining, which
    matters because the difference cancels several digits.
    """
    _require_domain(q)
    system = planar_system()
    n0, n1, n2 = q.exponents
    diag = coalescence_diagnostic(q)
    if method in ("gaussian", "gaussian-corrected"):
        corrected = method == "gaussian-corrected"
        ta = se.gaussian_leading(system, (n0, n1, n2), corrected=corrected)
        if n0 >= 1:
            tb = se.gaussian_leading(system, (n0 - 1, n1, n2), corrected=corrected)
            sign, log_abs = _combine(ta.sign, ta.log_abs, tb.sign, tb.log_abs)
        else:
            sign, log_abs = ta.sign, ta.log_abs
        diag.update(nz_product=ta.diagnostics["nz_product"], epsilon=None, tail_bound=None)
        if not diag["c2"] > 0:
            raise CoalescenceError("c2 vanishes at this direction")
        return se.AsymptoticEstimate(sign, log_abs, ta.regime, method, diag)
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    ctx = se.prepare(system, (n0, n1, n2))
    if ctx.z == 0:
        value = planar_core_exact(q)
        diag.update(nz_product=0.0, epsilon=None, tail_bound=None)
        if value.sign == 0:
            return se.AsymptoticEstimate(0, mpmath.mpf("-inf"), se.SMALL, "quadrature", diag)
        return se.AsymptoticEstimate(value.sign, value.log_abs, se.SMALL, "quadrature", diag)
    ia, _, ra = se.circle_integral(ctx)
    if n0 >= 1:
        ctx_b = se.SaddleContext(system, se.ExponentVector((n0 - 1, n1, n2)), ctx.d, ctx.cp, ctx.size,
                                 ctx.z, ctx.log_prefactor, ctx.prefactor_sign)
        ib, _, rb = se.circle_integral(ctx_b)
    else:
        ib, rb = 0j, None
    # the second term's prefactor is Z times the first one's
    combined = ia - 2 * ctx.z * ib
    diag.update(term_integrals=[repr(ia.real), repr(ib.real)], epsilon=math.pi, tail_bound=None,
                quad_error=ra.error + (rb.error if rb else 0.0))
    regime = se.SMALL if ctx.nz_product <= se.REGIME_THRESHOLD else se.LARGE
    return se._finish(ctx, combined, 1.0, regime, "quadrature", diag)


# ---------------------------------------------------------------------------
# probabilities from user-supplied enumeration sequences


def read_sequence(path) -> dict:
    """Read ``offset: <int>`` followed by one integer per line into ``{index: value}``."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or not lines[0].lower().startswith("offset:"):
        raise ValueError(f"{path}: first line must be 'offset: <int>'")
    offset = int(lines[0].split(":", 1)[1])
    return {offset + i: int(v) for i, v in enumerate(lines[1:])}


def p_nk(q: PlanarCoreQuery, M: dict, C: dict) -> Fraction:
    """``k C_k / (n M_n)`` times the core coefficient, exactly."""
    if q.n not in M or q.k not in C:
        raise DomainError(f"sequence files do not cover M_{q.n} and C_{q.k}")
    coeff = planar_core_exact(q).value
    return Fraction(q.k * C[q.k], q.n * M[q.n]) * coeff


def airy_local_limit(n: int, k: int) -> float:
    """Map-Airy prediction for ``p_{n,k}`` inside the window ``k - n/3 = O(n^{2/3})``."""
    s = 3 ** (4.0 / 3.0) / 4.0
    x = (k - n / 3) / n ** (2.0 / 3.0)
    return 16.0 / 81.0 * s * map_airy_density(s * x) / n ** (2.0 / 3.0)
