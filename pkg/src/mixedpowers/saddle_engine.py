"""Coefficient estimates from the circle integral through the critical point.

For ``d = n/||n||`` with critical point Z,

    [z^{n_0}] prod f_j^{n_j} = Z^{-n_0} prod f_j(Z)^{n_j} / (2 pi)
                               * int e^{-||n|| F(theta; d)} A(theta) d theta,

over the full circle (an identity) or over ``[-eps, eps]`` (up to an
exponentially small tail). ``A`` is the optional amplitude ``f_0(Z e^{i theta})``.
Every estimate is carried as ``(sign, ln|value|)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath
import numpy as np

from .critical_locus import CriticalPoint, solve_critical
from .errors import (
    BadEpsilon,
    CoalescenceError,
    DomainError,
    NoCriticalPoint,
    NoSolution,
    NoValidEpsilon,
    RegimeError,
)
from .exact_series import BigCoefficient, RationalPoly
from .function_system import (
    Direction,
    ExponentVector,
    FunctionSystem,
    direction_of,
    factor_eval,
    factor_mp_value,
)
from .kernels import circle_integrand
from .phase_term import eval_F, taylor_F
from .precision import mp_str, to_mpf, working_precision
from .quadrature import DEFAULT_TOL, MAX_PANELS, integrate

__all__ = [
    "AsymptoticEstimate",
    "SaddleContext",
    "prepare",
    "circle_integral",
    "integral_small",
    "integral_large",
    "gaussian_leading",
    "first_order_factor",
    "coalescence_measures",
    "choose_epsilon",
    "small_exponent_limit",
    "estimate",
    "REGIME_THRESHOLD",
    "COALESCENCE_C2",
    "CORRECTION_LIMIT",
]

REGIME_THRESHOLD = 32.0
COALESCENCE_C2 = 1e-6
# largest predicted first-order relative correction for which the Gaussian
# term is still offered
CORRECTION_LIMIT = 0.1
TAIL_TOL = 1e-6
EPSILON_CANDIDATES = tuple(math.pi / 2 ** k for k in range(1, 9))

SMALL = "small-exponent"
LARGE = "large-exponent"


@dataclass
class AsymptoticEstimate:
    sign: int
    log_abs: object
    regime: str
    method: str
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method == "gaussian":
            c2 = self.diagnostics.get("c2")
            if c2 is not None and not c2 > 0:
                raise CoalescenceError("gaussian estimates require c2 > 0")
        if self.regime == LARGE and "tail_bound" not in self.diagnostics:
            self.diagnostics["tail_bound"] = None

    @property
    def value(self):
        """The estimate as an mpmath number (may be huge)."""
        if self.sign == 0:
            return mpmath.mpf(0)
        return self.sign * mpmath.exp(self.log_abs)

    def __float__(self):
        return float(self.value)

    def rel_error(self, exact) -> float:
        """``|estimate/exact - 1|`` computed through the logs."""
        exact = exact if isinstance(exact, BigCoefficient) else BigCoefficient(exact)
        if exact.sign == 0:
            return 0.0 if self.sign == 0 else math.inf
        if self.sign == 0:
            return 1.0
        with working_precision():
            ratio = mpmath.exp(self.log_abs - exact.log_abs)
            if self.sign != exact.sign:
                ratio = -ratio
            return float(abs(ratio - 1))

    def to_json(self):
        diag = {}
        for k, v in self.diagnostics.items():
            if isinstance(v, (mpmath.mpf, mpmath.mpc)):
                diag[k] = mp_str(v) if isinstance(v, mpmath.mpf) else [mp_str(v.real), mp_str(v.imag)]
            elif isinstance(v, float):
                diag[k] = repr(v)
            else:
                diag[k] = v
        return {
            "sign": self.sign,
            "log_abs": mp_str(self.log_abs) if self.sign else None,
            "regime": self.regime,
            "method": self.method,
            "diagnostics": diag,
        }


# ---------------------------------------------------------------------------
# shared set-up


@dataclass
class SaddleContext:
    system: FunctionSystem
    n: ExponentVector
    d: Direction
    cp: CriticalPoint
    size: object          # ||n|| (exact)
    z: float              # contour radius actually used
    log_prefactor: object
    prefactor_sign: int

    @property
    def nz_product(self) -> float:
        return float(self.size) * self.z


def _as_vector(n):
    return n if isinstance(n, ExponentVector) else ExponentVector(tuple(n))


def prepare(system: FunctionSystem, n, cp: Optional[CriticalPoint] = None) -> SaddleContext:
    """Direction, critical point and ``ln|Z^{-n_0} prod f_j(Z)^{n_j} / 2 pi|``."""
    n = _as_vector(n)
    if len(n) != system.m + 1:
        raise ValueError("exponent vector length must be m+1")
    d = direction_of(n, system.norm)
    if cp is None:
        try:
            cp = solve_critical(system, d)
        except NoSolution as exc:
            raise NoCriticalPoint(str(exc)) from exc
    if cp.z != 0 and not cp.strictly_minimal:
        raise NoCriticalPoint(f"critical point z={cp.z:g} is not strictly minimal")
    if cp.z >= system.radius:
        raise DomainError("critical point outside the disk of analyticity")
    z = float(cp.z)
    with working_precision():
        log_pref = -mpmath.log(2 * mpmath.pi)
        sign = 1
        if z > 0:
            zm = mpmath.mpf(z)
            log_pref -= n.n0 * mpmath.log(zm)
            for f, e in zip(system.factors, n.tail):
                if e == 0:
                    continue
                v = factor_mp_value(f, zm)
                if v == 0:
                    raise DomainError("a factor vanishes at the critical point")
                if v < 0 and e % 2:
                    sign = -sign
                log_pref += e * mpmath.log(abs(v))
    return SaddleContext(system, n, d, cp, n.size(system.norm), z, log_pref, sign)


def _integrand(ctx: SaddleContext):
    system = ctx.system
    z = complex(ctx.z)
    n0 = float(ctx.n.n0)
    exps = np.array(ctx.n.tail, dtype=float)
    if system.is_polynomial:
        coeffs, lengths, amp = system.packed
        return lambda th: circle_integrand(np.ascontiguousarray(th, dtype=float), z, n0, coeffs,
                                           lengths, exps, amp)

    fz = [factor_eval(f, z) for f in system.factors]

    def generic(th):
        w = z * np.exp(1j * th)
        logsum = -1j * n0 * th
        for f, e, v in zip(system.factors, exps, fz):
            if e:
                logsum = logsum + e * np.log(factor_eval(f, w) / v)
        return np.exp(logsum) * system.amplitude_at(w)

    return generic


def _breakpoints(a, b, levels=12):
    """Panel seeds refined geometrically towards theta = 0."""
    pts = {a, b}
    if a < 0 < b:
        pts.add(0.0)
        for k in range(levels):
            pts.add(a / 2 ** k)
            pts.add(b / 2 ** k)
    return sorted(pts)


def circle_integral(ctx: SaddleContext, a=-math.pi, b=math.pi, tol=DEFAULT_TOL, max_panels=MAX_PANELS):
    """``(integral, scale, quad_result)`` of the normalized integrand over ``[a, b]``.

    The integrand is divided by ``scale = |A(0)|`` (1 without amplitude), so
    the true integral is ``integral * scale``.
    """
    f = _integrand(ctx)
    a0 = abs(complex(ctx.system.amplitude_at(complex(ctx.z)))) if ctx.system.amplitude is not None else 1.0
    scale = a0 if a0 > 1e-300 else 1.0
    g = (lambda th: f(th) / scale) if scale != 1.0 else f
    res = integrate(g, _breakpoints(a, b), abs_tol=tol, rel_tol=tol, max_panels=max_panels)
    return res.value, scale, res


def _finish(ctx, integral, scale, regime, method, diag):
    re = integral.real
    diag.setdefault("nz_product", ctx.nz_product)
    diag.setdefault("z", repr(ctx.z))
    diag["imag_ratio"] = abs(integral.imag) / abs(re) if re else math.inf
    if re == 0:
        return AsymptoticEstimate(0, mpmath.mpf("-inf"), regime, method, diag)
    with working_precision():
        log_abs = ctx.log_prefactor + mpmath.log(abs(re)) + mpmath.log(scale)
    sign = ctx.prefactor_sign * (1 if re > 0 else -1)
    return AsymptoticEstimate(sign, +log_abs, regime, method, diag)


def _zero_point_value(system, n):
    """Exact coefficient when Z = 0 (only n_0 = 0 can survive)."""
    if n.n0 != 0:
        return Fraction(0)
    val = Fraction(1)
    for f, e in zip(system.factors, n.tail):
        c0 = f[0] if isinstance(f, RationalPoly) else Fraction(complex(factor_eval(f, 0.0)).real)
        val *= Fraction(c0) ** e
    if system.amplitude is not None:
        amp = system.amplitude
        val *= amp[0] if isinstance(amp, RationalPoly) else Fraction(complex(factor_eval(amp, 0.0)).real)
    return val


def _exact_estimate(value, regime, method, diag):
    bc = BigCoefficient(value)
    if bc.sign == 0:
        return AsymptoticEstimate(0, mpmath.mpf("-inf"), regime, method, diag)
    return AsymptoticEstimate(bc.sign, bc.log_abs, regime, method, diag)


def _c2(ctx):
    if ctx.z == 0:
        return 0.0
    return float(mpmath.re(taylor_F(ctx.system, ctx.d, 2, ctx.cp).c2))


# ---------------------------------------------------------------------------
# the two integral representations


def integral_small(system: FunctionSystem, n, cp=None) -> AsymptoticEstimate:
    """Full-circle representation; exact up to quadrature error."""
    ctx = prepare(system, n, cp)
    if ctx.z == 0:
        diag = {"nz_product": 0.0, "c2": 0.0, "epsilon": None, "tail_bound": None}
        return _exact_estimate(_zero_point_value(system, ctx.n), SMALL, "quadrature", diag)
    integral, scale, res = circle_integral(ctx)
    diag = {"c2": _c2(ctx), "epsilon": math.pi, "tail_bound": None,
            "quad_error": res.error, "panels": res.panels}
    return _finish(ctx, integral, scale, SMALL, "quadrature", diag)


def _check_epsilon(ctx, eps):
    if not 0 < eps <= math.pi:
        raise BadEpsilon("epsilon must lie in (0, pi]")
    reF = np.real(eval_F(ctx.system, ctx.d, ctx.cp, np.array([-eps, eps])))
    if not np.all(reF > 0):
        raise BadEpsilon(f"Re F is not positive at +-{eps:g}")


def integral_large(system: FunctionSystem, n, epsilon=None, cp=None) -> AsymptoticEstimate:
    """Truncated-arc representation on ``[-eps, eps]`` with an empirical tail ratio."""
    ctx = prepare(system, n, cp)
    if ctx.z == 0:
        raise DomainError("the truncated representation needs Z > 0")
    eps = choose_epsilon(system, ctx.d, ctx.cp) if epsilon is None else float(epsilon)
    _check_epsilon(ctx, eps)
    integral, scale, res = circle_integral(ctx, -eps, eps)
    if eps < math.pi:
        left, _, _ = circle_integral(ctx, -math.pi, -eps, tol=TAIL_TOL)
        right, _, _ = circle_integral(ctx, eps, math.pi, tol=TAIL_TOL)
        tail = left + right
        tail_bound = abs(tail) / abs(integral) if integral else math.inf
    else:
        tail, tail_bound = 0j, 0.0
    diag = {"c2": _c2(ctx), "epsilon": eps, "tail_bound": tail_bound,
            "tail_integral": [repr(tail.real * scale), repr(tail.imag * scale)],
            "quad_error": res.error, "panels": res.panels}
    return _finish(ctx, integral, scale, LARGE, "quadrature", diag)


def choose_epsilon(system: FunctionSystem, d: Direction, cp=None) -> float:
    """Largest ``pi/2^k`` (k = 1..8) on which Re F increases away from 0."""
    if cp is None:
        cp = solve_critical(system, d)
    if cp.z == 0:
        raise NoValidEpsilon("F vanishes identically when Z = 0")
    for eps in EPSILON_CANDIDATES:
        grid = np.linspace(0.0, eps, 64)
        ok = True
        for side in (grid, -grid):
            re = np.real(eval_F(system, d, cp, side))
            if not (np.all(np.diff(re) >= -1e-15 * max(1.0, abs(re).max())) and re[-1] > 0):
                ok = False
                break
        if ok:
            return eps
    raise NoValidEpsilon("Re F is not monotone on any candidate arc")


# ---------------------------------------------------------------------------
# closed-form leading terms


def coalescence_measures(expansion, size):
    """Predicted first-order correction and the Airy parameter ``||n|| c2^3 / |c3|^2``."""
    c2 = float(mpmath.re(expansion.c2))
    c3 = complex(expansion.c3)
    c4 = complex(expansion.c4)
    if c2 <= 0:
        return math.inf, 0.0
    correction = abs(15 * c3 * c3 / (16 * c2 ** 3) - 3 * c4 / (4 * c2 ** 2)) / float(size)
    airy = float(size) * c2 ** 3 / abs(c3) ** 2 if c3 != 0 else math.inf
    return correction, airy


def first_order_factor(expansion, size) -> float:
    """``1 + (15 c3^2 / (16 c2^3) - 3 c4 / (4 c2^2)) / ||n||``, the next Laplace term without amplitude."""
    c2 = float(mpmath.re(expansion.c2))
    c3 = complex(expansion.c3)
    c4 = complex(expansion.c4)
    return (1 + (15 * c3 * c3 / (16 * c2 ** 3) - 3 * c4 / (4 * c2 ** 2)) / float(size)).real


def gaussian_leading(system: FunctionSystem, n, cp=None, corrected=False) -> AsymptoticEstimate:
    """Prefactor times ``A(0) sqrt(pi / (||n|| c2))``, refused near coalescence.

    ``corrected=True`` multiplies in :func:`first_order_factor` (systems
    without amplitude only).
    """
    ctx = prepare(system, n, cp)
    if ctx.z == 0:
        raise CoalescenceError("Z = 0: the phase term vanishes identically")
    exp4 = taylor_F(system, ctx.d, 4, ctx.cp)
    c2 = float(mpmath.re(exp4.c2))
    correction, airy = coalescence_measures(exp4, ctx.size)
    diag = {"nz_product": ctx.nz_product, "c2": c2, "c3": complex(exp4.c3).imag,
            "c4": complex(exp4.c4).real, "correction": correction, "airy_parameter": airy,
            "epsilon": None, "tail_bound": None}
    if c2 <= COALESCENCE_C2:
        raise CoalescenceError(f"c2 = {c2:.3g} is below {COALESCENCE_C2:g}; use quadrature")
    if correction > CORRECTION_LIMIT:
        raise CoalescenceError(
            f"saddles nearly coalesce (predicted correction {correction:.3g}, "
            f"Airy parameter {airy:.3g}); use quadrature")
    with working_precision():
        amp = mpmath.mpf(1)
        if system.amplitude is not None:
            amp = factor_mp_value(system.amplitude, mpmath.mpf(ctx.z))
        if amp == 0:
            raise CoalescenceError("amplitude vanishes at the critical point")
        log_abs = (ctx.log_prefactor + mpmath.log(abs(amp))
                   + 0.5 * (mpmath.log(mpmath.pi) - mpmath.log(to_mpf(ctx.size)) - mpmath.log(mpmath.mpf(c2))))
        if corrected:
            if system.amplitude is not None:
                raise ValueError("the first-order factor is only implemented without amplitude")
            factor = first_order_factor(exp4, ctx.size)
            diag["first_order_factor"] = factor
            log_abs += mpmath.log(factor)
    sign = ctx.prefactor_sign * (1 if amp > 0 else -1)
    regime = SMALL if ctx.nz_product <= REGIME_THRESHOLD else LARGE
    if regime == LARGE:
        diag["tail_bound"] = None
    return AsymptoticEstimate(sign, +log_abs, regime, "gaussian", diag)


def small_exponent_limit(system: FunctionSystem, n, cp=None) -> AsymptoticEstimate:
    """Poisson-type limit for ``||n|| Z`` bounded.

    With ``L = sum_j n_j f_j'(0)/f_j(0)`` the estimate is
    ``prod f_j(0)^{n_j} * sum_i a_i L^{n_0-i} / (n_0-i)!`` where ``a_i`` are the
    amplitude coefficients (``a_0 = 1`` without amplitude).
    """
    n = _as_vector(n)
    ctx = prepare(system, n, cp)
    if ctx.nz_product > REGIME_THRESHOLD:
        raise RegimeError(f"||n|| Z = {ctx.nz_product:.4g} exceeds {REGIME_THRESHOLD:g}")
    with working_precision():
        lam = mpmath.mpf(0)
        log_base = mpmath.mpf(0)
        base_sign = 1
        for f, e in zip(system.factors, n.tail):
            if e == 0:
                continue
            f0 = factor_eval(f, 0.0)
            f1 = factor_eval(f, 0.0, 1)
            if isinstance(f, RationalPoly):
                f0m, f1m = to_mpf(f[0]), to_mpf(f[1])
            else:
                f0m, f1m = mpmath.mpf(complex(f0).real), mpmath.mpf(complex(f1).real)
            lam += e * f1m / f0m
            log_base += e * mpmath.log(abs(f0m))
            if f0m < 0 and e % 2:
                base_sign = -base_sign
        if system.amplitude is None:
            amp = [mpmath.mpf(1)]
        elif isinstance(system.amplitude, RationalPoly):
            amp = [to_mpf(c) for c in system.amplitude.coeffs]
        else:
            amp = [to_mpf(c) for c in system.amplitude.taylor(n.n0)]
        total = mpmath.mpf(0)
        for i, a in enumerate(amp):
            p = n.n0 - i
            if p < 0 or a == 0:
                continue
            total += a * lam ** p / mpmath.factorial(p)
        diag = {"nz_product": ctx.nz_product, "lambda": lam, "c2": _c2(ctx) if ctx.z else 0.0,
                "epsilon": None, "tail_bound": None}
        if total == 0:
            return AsymptoticEstimate(0, mpmath.mpf("-inf"), SMALL, "small-limit", diag)
        sign = base_sign * (1 if total > 0 else -1)
        return AsymptoticEstimate(sign, +(log_base + mpmath.log(abs(total))), SMALL, "small-limit", diag)


# ---------------------------------------------------------------------------
# dispatch

METHODS = ("auto", "gaussian", "quadrature", "small-limit")


def estimate(system: FunctionSystem, n, method="auto", epsilon=None) -> AsymptoticEstimate:
    """Estimate ``[z^{n_0}] prod f_j^{n_j}`` (times ``f_0`` when present).

    ``auto`` uses the full-circle quadrature while ``||n|| Z <= 32``, the
    Gaussian term beyond that, and truncated-arc quadrature when the saddles
    are close to coalescing.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if method == "gaussian":
        return gaussian_leading(system, n)
    if method == "small-limit":
        return small_exponent_limit(system, n)
    ctx = prepare(system, n)
    if method == "quadrature":
        if epsilon is not None or (ctx.z > 0 and ctx.nz_product > REGIME_THRESHOLD):
            return integral_large(system, n, epsilon, ctx.cp)
        return integral_small(system, n, ctx.cp)
    if ctx.z == 0 or ctx.nz_product <= REGIME_THRESHOLD:
        return integral_small(system, n, ctx.cp)
    try:
        return gaussian_leading(system, n, ctx.cp)
    except CoalescenceError:
        return integral_large(system, n, epsilon, ctx.cp)
