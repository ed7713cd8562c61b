"""Critical points of a direction and their strict-minimality certificate.

A point z is critical for the direction d when

    d_0 = sum_j d_j z f_j'(z) / f_j(z),

and strictly minimal when ``prod |f_j(x)|^{d_j}`` over the circle ``|x| = |z|``
peaks only at ``x = z``. Only real nonnegative critical points are searched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Optional

import mpmath
import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DomainError, NoSolution, NonConvergence
from .exact_series import RationalPoly
from .function_system import (
    Direction,
    FunctionSystem,
    NormSpec,
    factor_eval,
    factor_mp_value,
    factor_period,
)
from .kernels import circle_log_modulus
from .precision import mp_str, working_precision

__all__ = [
    "CriticalPoint",
    "solve_critical",
    "critical_residual",
    "polish_critical",
    "verify_strict_minimality",
    "z_formula_trivariate",
    "z_formula_planar",
    "direction_of_z",
    "TRIVARIATE_NORM",
    "PLANAR_NORM",
]

TRIVARIATE_NORM = NormSpec.l1((1, 1, 2))
PLANAR_NORM = NormSpec.linf()

RESIDUAL_TOL = 1e-10
DEFAULT_SAMPLES = 720


@dataclass(frozen=True)
class CriticalPoint:
    z: float
    residual: float
    minimality_margin: float
    strictly_minimal: bool
    z_mp: object = field(default=None, repr=False, compare=False)
    trace: tuple = field(default=(), repr=False, compare=False)

    def to_json(self):
        return {
            "z": repr(self.z),
            "z_mp": mp_str(self.z_mp) if self.z_mp is not None else repr(self.z),
            "residual": repr(self.residual),
            "minimality_margin": repr(self.minimality_margin),
            "strictly_minimal": self.strictly_minimal,
        }


# ---------------------------------------------------------------------------
# the critical equation


def _active(system, d):
    return [(f, dj) for f, dj in zip(system.factors, d.tail) if dj != 0]


def _phi(system, d, z):
    """Right-hand side minus d_0 (float)."""
    total = -d.d0
    for f, dj in _active(system, d):
        total += dj * z * factor_eval(f, z, 1) / factor_eval(f, z)
    return total


def critical_residual(system, d: Direction, z) -> float:
    return float(abs(_phi(system, d, z)))


def _mp_phi(system, d):
    dv = d.mp_values()
    active = [(f, dj) for f, dj in zip(system.factors, dv[1:]) if dj != 0]

    def phi(z):
        total = -dv[0]
        for f, dj in active:
            if isinstance(f, RationalPoly):
                total += dj * z * f.derivative().eval_mp(z) / f.eval_mp(z)
            else:
                total += dj * z * mpmath.diff(f.mp_value, z) / f.mp_value(z)
        return total

    return phi


def polish_critical(system, d: Direction, z0, bits=None, maxiter=60):
    """Refine a real critical point in mpmath.

    Uses Newton on ``phi/phi'`` which stays quadratically convergent at the
    double root produced by two coalescing saddles.
    """
    with working_precision(bits) as ctx:
        z = mpmath.mpf(z0)
        if z == 0:
            return z
        phi = _mp_phi(system, d)
        tol = mpmath.mpf(2) ** (-ctx.prec + 10)
        for _ in range(maxiter):
            p, p1, p2 = mpmath.diffs(phi, z, 2)
            if p == 0:
                break
            denom = p1 * p1 - p * p2
            if denom == 0:
                break
            step = p * p1 / denom
            z -= step
            if abs(step) <= tol * max(1, abs(z)):
                break
        return +z


# ---------------------------------------------------------------------------
# root search


def _positive_real_roots(f):
    if isinstance(f, RationalPoly):
        coeffs = [float(c) for c in f.coeffs]
        if len(coeffs) < 2:
            return []
        rts = np.roots(coeffs[::-1])
        return sorted(r.real for r in rts if abs(r.imag) <= 1e-12 * max(1.0, abs(r)) and r.real > 0)
    return []


def _search_limit(system, d):
    """Upper end of the real interval on which all active factors stay positive."""
    limit = system.radius
    for f, _ in _active(system, d):
        if isinstance(f, RationalPoly):
            roots = _positive_real_roots(f)
            if roots:
                limit = min(limit, roots[0])
        elif not f.nonnegative:
            grid = np.linspace(0.0, min(limit, 64.0), 4097)[1:]
            vals = np.real(factor_eval(f, grid))
            neg = np.nonzero(vals <= 0)[0]
            if neg.size:
                limit = min(limit, grid[neg[0]])
    return limit


def _limit_at_infinity(system, d):
    """``lim_{z->inf}`` of the critical right-hand side for polynomial systems."""
    return sum(dj * f.degree for f, dj in _active(system, d))


def _bracket_nonnegative(system, d, trace):
    r = system.radius
    if math.isfinite(r):
        hi = 0.999 * r
        if _phi(system, d, hi) < 0:
            raise NoSolution(f"no critical point below 0.999 r = {hi:g}")
        return 0.0, hi
    if all(isinstance(f, RationalPoly) for f, _ in _active(system, d)):
        if _limit_at_infinity(system, d) <= d.d0 * (1 + 1e-14):
            raise NoSolution("direction outside the solvable region: d_0 is not below sum d_j deg f_j")
    hi = 1.0
    for _ in range(400):
        val = _phi(system, d, hi)
        trace.append(("expand", hi, val))
        if val > 0:
            return 0.0, hi
        hi *= 2.0
    raise NoSolution("critical equation has no root (upper bound diverged)")


def _bracket_mixed(system, d, trace):
    """First sign change of phi on [0, limit), or a tangency."""
    limit = _search_limit(system, d)
    top = limit if math.isfinite(limit) else 1e6
    # dense near zero and near the limit, where roots pile up
    u = np.linspace(0.0, 1.0, 4001)[1:-1]
    grid = top * (0.5 - 0.5 * np.cos(np.pi * u))
    vals = np.asarray(_phi(system, d, grid), dtype=float)
    pos = np.nonzero(vals > 0)[0]
    if pos.size:
        i = pos[0]
        lo = grid[i - 1] if i else 0.0
        trace.append(("bracket", lo, grid[i]))
        return ("bracket", lo, float(grid[i]))
    # no sign change: a double root shows up as a zero maximum
    i = int(np.argmax(vals))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, len(grid) - 1)]
    res = minimize_scalar(lambda z: -_phi(system, d, z), bounds=(a, b), method="bounded",
                          options={"xatol": 1e-14})
    zt = float(res.x)
    if abs(_phi(system, d, zt)) <= RESIDUAL_TOL:
        trace.append(("tangent", zt))
        return ("tangent", zt, zt)
    raise NoSolution("critical equation has no real root where all factors are positive")


def solve_critical(system: FunctionSystem, d: Direction, bracket=None, samples=DEFAULT_SAMPLES,
                   certify=True) -> CriticalPoint:
    """Real nonnegative solution of the critical equation for ``d``."""
    if len(d) != system.m + 1:
        raise ValueError("direction length must be m+1")
    if d.d0 == 0:
        return CriticalPoint(0.0, 0.0, math.inf, True, mpmath.mpf(0))
    if not _active(system, d):
        raise NoSolution("d_1 = ... = d_m = 0 leaves no critical point")
    trace = []
    if bracket is not None:
        lo, hi = map(float, bracket)
        if _phi(system, d, lo) * _phi(system, d, hi) > 0:
            raise NoSolution(f"no sign change of the critical equation on [{lo}, {hi}]")
        kind = "bracket"
    elif system.nonnegative:
        lo, hi = _bracket_nonnegative(system, d, trace)
        kind = "bracket"
    else:
        kind, lo, hi = _bracket_mixed(system, d, trace)
    if kind == "bracket":
        try:
            z = brentq(lambda x: _phi(system, d, x), lo, hi, xtol=1e-16, rtol=1e-15, maxiter=500)
        except RuntimeError as exc:
            raise NonConvergence(str(exc), trace) from exc
    else:
        z = lo
    z_mp = polish_critical(system, d, z)
    zf = float(z_mp)
    if not (lo - 1e-8 <= zf <= hi + 1e-8) or not math.isfinite(zf):
        # polishing wandered off; keep the bracketed float root
        z_mp, zf = mpmath.mpf(z), z
    residual = critical_residual(system, d, zf)
    if residual > RESIDUAL_TOL:
        raise NonConvergence(f"residual {residual:g} above tolerance", trace)
    if certify:
        margin, strict = verify_strict_minimality(system, d, zf, samples)
    else:
        margin, strict = math.nan, False
    return CriticalPoint(zf, residual, margin, strict, z_mp, tuple(trace))


# ---------------------------------------------------------------------------
# strict minimality


def _log_modulus(system, d, z, theta):
    weights = np.array(d.tail, dtype=float)
    if system.is_polynomial:
        coeffs, lengths, _ = system.packed
        return circle_log_modulus(np.ascontiguousarray(theta, dtype=float), complex(z), coeffs,
                                  lengths, weights)
    w = z * np.exp(1j * np.asarray(theta, dtype=float))
    total = np.zeros(np.shape(theta))
    for f, dj in zip(system.factors, weights):
        if dj:
            with np.errstate(divide="ignore"):
                total = total + dj * np.log(np.abs(factor_eval(f, w)))
    return total


def _common_period(system, d):
    periods = [factor_period(f) for f, dj in zip(system.factors, d.tail) if dj]
    return reduce(math.gcd, periods, 0)


def verify_strict_minimality(system, d: Direction, z, samples: int = DEFAULT_SAMPLES):
    """``(margin, strictly_minimal)`` for the circle through ``z``.

    The margin is the value at ``theta=0`` minus the best competitor. The
    competitor is searched outside the descending basin around ``theta=0``,
    then refined by a bounded local maximisation.
    """
    z = float(z)
    if z == 0:
        return math.inf, True
    if not all(math.isfinite(x) for x in d.d):
        return math.nan, False
    period = _common_period(system, d)
    if period > 1:
        # theta = 2 pi / period gives exactly the same modulus
        return 0.0, False
    n = int(samples)
    theta = -math.pi + 2 * math.pi * np.arange(1, n + 1) / n
    theta = np.union1d(theta, [0.0])
    try:
        vals = _log_modulus(system, d, z, theta)
    except Exception:  # pragma: no cover - defensive
        return math.nan, False
    i0 = int(np.searchsorted(theta, 0.0))
    top = vals[i0]
    if not np.isfinite(top):
        return math.nan, False
    eps = 1e-14 * max(1.0, abs(top))
    right = i0
    while right + 1 < len(theta) and vals[right + 1] <= vals[right] + eps:
        right += 1
    left = i0
    while left - 1 >= 0 and vals[left - 1] <= vals[left] + eps:
        left -= 1
    outside = np.r_[0:left, right + 1:len(theta)]
    if outside.size:
        k = outside[np.argmax(vals[outside])]
    else:
        # Re-part decreasing all the way: the competitor is at the far end
        k = left if vals[left] >= vals[right] else right
    step = 2 * math.pi / n
    a, b = theta[k] - step, theta[k] + step
    if a < 0 < b:
        a, b = (0.0 + 1e-12, b) if theta[k] > 0 else (a, -1e-12)
    res = minimize_scalar(lambda t: -float(_log_modulus(system, d, z, np.array([t]))[0]),
                          bounds=(a, b), method="bounded", options={"xatol": 1e-12})
    best = max(vals[k], -res.fun)
    scale = math.exp(top)
    margin = scale - math.exp(best)
    return margin, bool(margin > 1e-12 * scale)


# ---------------------------------------------------------------------------
# closed forms


def _make_point(system, d, z, certify=True, z_mp=None):
    residual = critical_residual(system, d, z)
    if certify:
        margin, strict = verify_strict_minimality(system, d, z)
    else:
        margin, strict = math.nan, False
    return CriticalPoint(float(z), residual, margin, strict, z_mp if z_mp is not None else mpmath.mpf(z))


def _check_norm(d, norm, label):
    if d.norm != norm:
        raise DomainError(f"{label} directions must use the norm {norm.to_json()}")


def trivariate_system():
    return FunctionSystem((RationalPoly((1, 1)), RationalPoly((1, 2))), norm=TRIVARIATE_NORM)


def planar_system():
    return FunctionSystem((RationalPoly((1, 1)), RationalPoly((1, -1))), norm=PLANAR_NORM)


def z_formula_trivariate(d: Direction, certify=True) -> CriticalPoint:
    """Closed-form critical point of ``(1+z, 1+2z)`` under the ``(1,1,2)`` weighted norm."""
    _check_norm(d, TRIVARIATE_NORM, "trivariate")
    d0, d1, d2 = d.d
    if d1 + d2 <= d0:
        raise DomainError("direction outside the region d_1 + d_2 > d_0")
    if d0 == 0:
        z = 0.0
    else:
        a = d1 + 2 * d2 - 3 * d0
        z = 2 * d0 / (a + math.sqrt(a * a + 8 * d0 * (d1 + d2 - d0)))
    return _make_point(trivariate_system(), d, z, certify)


def planar_discriminant(d0, d1, d2):
    return (d1 - d2) ** 2 - 4 * d0 * (d1 + d2 - d0)


def z_formula_planar(d: Direction, certify=True) -> CriticalPoint:
    """Closed-form critical point of ``(1+z, 1-z)`` under the max norm."""
    _check_norm(d, PLANAR_NORM, "planar")
    d0, d1, d2 = d.d
    if abs(d1 - 1.0) > 1e-12:
        raise DomainError("planar directions need d_1 = 1")
    if (d0, d2) in ((0.0, 1.0), (1.0, 0.0)):
        raise DomainError("the directions (0,1,1) and (1,1,0) are excluded")
    disc = planar_discriminant(d0, d1, d2)
    if disc < -1e-12:
        raise DomainError("direction outside the region (d_1-d_2)^2 >= 4 d_0 (d_1+d_2-d_0)")
    z = 0.0 if d0 == 0 else 2 * d0 / ((d1 - d2) + math.sqrt(max(disc, 0.0)))
    return _make_point(planar_system(), d, z, certify)


# ---------------------------------------------------------------------------
# the inverse map z -> d(z)


def _exact_eval(poly: RationalPoly, z: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(poly.coeffs):
        acc = acc * z + c
    return acc


def direction_of_z(system: FunctionSystem, z, tail, norm: Optional[NormSpec] = None) -> Direction:
    """Direction for which ``z`` is critical, given the factor part ``tail``.

    Exact when ``z`` and ``tail`` are rational and every factor is a polynomial.
    """
    norm = norm or system.norm
    tail = tuple(tail)
    if len(tail) != system.m:
        raise ValueError("tail must have m entries")
    if not any(tail):
        raise DomainError("tail must be nonzero")
    exact = (isinstance(z, (int, Fraction)) and all(isinstance(t, (int, Fraction)) for t in tail)
             and all(isinstance(f, RationalPoly) for f in system.factors))
    if exact:
        z = Fraction(z)
        d0 = sum((Fraction(t) * z * _exact_eval(f.derivative(), z) / _exact_eval(f, z)
                  for f, t in zip(system.factors, tail) if t), Fraction(0))
        return Direction.normalized((d0,) + tuple(Fraction(t) for t in tail), norm)
    z = float(z)
    d0 = sum(float(t) * z * factor_eval(f, z, 1) / factor_eval(f, z)
             for f, t in zip(system.factors, tail) if t)
    return Direction.normalized((float(d0),) + tuple(float(t) for t in tail), norm)
