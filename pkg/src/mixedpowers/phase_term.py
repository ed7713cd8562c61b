"""The phase term of a direction, its rescaled form and Taylor expansion.

For a direction d with critical point Z,

    F(theta; d) = i theta d_0 - sum_j d_j ln(f_j(Z e^{i theta}) / f_j(Z)),

with the logarithm continued from 0 at theta = 0. ``H`` is the same
expression with Z replaced by any z, and ``G = F / Z`` extends continuously
to Z = 0 through

    G(theta; d) = sum_j d_j (f_j'(0) / f_j(0)) (1 + i theta - e^{i theta}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import mpmath
import numpy as np

from .critical_locus import CriticalPoint, polish_critical, solve_critical
from .function_system import (
    Direction,
    FunctionSystem,
    factor_eval,
    factor_taylor_at,
    log_ratio_on_circle,
)
from .precision import mp_str, working_precision

__all__ = [
    "PhaseExpansion",
    "PhasePropertyReport",
    "eval_F",
    "eval_H",
    "eval_G",
    "eval_G_limit",
    "taylor_F",
    "check_phase_properties",
    "check_theorem2",
    "g_continuity_sweep",
    "G_THRESHOLD",
]

G_THRESHOLD = 1e-8


def _critical(system, d, cp):
    if cp is None:
        return solve_critical(system, d)
    if isinstance(cp, CriticalPoint):
        return cp
    z = float(cp)
    return CriticalPoint(z, math.nan, math.nan, False, mpmath.mpf(z))


def eval_H(system: FunctionSystem, d: Direction, theta, z):
    """``i theta d_0 - sum_j d_j ln(f_j(z e^{i theta}) / f_j(z))`` on the continuous branch."""
    theta = np.asarray(theta, dtype=float)
    out = 1j * theta * d.d0
    for f, dj in zip(system.factors, d.tail):
        if dj:
            out = out - dj * log_ratio_on_circle(f, z, theta)
    return out


def eval_F(system: FunctionSystem, d: Direction, cp=None, theta=0.0):
    """Phase term at the critical point ``cp`` (solved for when omitted)."""
    cp = _critical(system, d, cp)
    return eval_H(system, d, theta, cp.z)


def eval_G_limit(system: FunctionSystem, d: Direction, theta):
    """Limit of ``F/Z`` as ``Z -> 0``, from ``f_j'(0)/f_j(0)``."""
    theta = np.asarray(theta, dtype=float)
    scale = sum(dj * factor_eval(f, 0.0, 1) / factor_eval(f, 0.0)
                for f, dj in zip(system.factors, d.tail) if dj)
    return scale * (1 + 1j * theta - np.exp(1j * theta))


def eval_G(system: FunctionSystem, d: Direction, theta, cp=None, threshold=G_THRESHOLD):
    """``F/Z``, switching to the limit formula when ``Z <= threshold``."""
    cp = _critical(system, d, cp)
    if cp.z > threshold:
        return eval_F(system, d, cp, theta) / cp.z
    return eval_G_limit(system, d, theta)


# ---------------------------------------------------------------------------
# Taylor expansion at theta = 0


def _series_mul(a, b, order):
    out = [mpmath.mpc(0)] * (order + 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j in range(order + 1 - i):
            out[i + j] += ai * b[j]
    return out


def _series_compose(outer, inner, order):
    """``sum_k outer[k] inner^k`` where ``inner`` has no constant term."""
    out = [mpmath.mpc(0)] * (order + 1)
    power = [mpmath.mpc(1)] + [mpmath.mpc(0)] * order
    for k, ck in enumerate(outer):
        if k > order:
            break
        if k:
            power = _series_mul(power, inner, order)
        if ck != 0:
            out = [o + ck * p for o, p in zip(out, power)]
    return out


@dataclass(frozen=True)
class PhaseExpansion:
    """Taylor coefficients ``F = sum_k c_k theta^k`` at theta = 0 (``c_0 = c_1 = 0``)."""

    direction: Direction
    z_critical: CriticalPoint
    coeffs: tuple
    order: int
    c1_residual: float = field(default=0.0)

    def __getitem__(self, k):
        return self.coeffs[k] if k < len(self.coeffs) else mpmath.mpc(0)

    @property
    def c2(self):
        return self.coeffs[2]

    @property
    def c3(self):
        return self.coeffs[3] if self.order >= 3 else mpmath.mpc(0)

    @property
    def c4(self):
        return self.coeffs[4] if self.order >= 4 else mpmath.mpc(0)

    def to_json(self):
        return {
            "direction": self.direction.to_json(),
            "z": self.z_critical.to_json(),
            "order": self.order,
            "coeffs": [[mp_str(mpmath.re(c)), mp_str(mpmath.im(c))] for c in self.coeffs],
        }


def taylor_F(system: FunctionSystem, d: Direction, order: int = 4, cp=None, bits=None) -> PhaseExpansion:
    """Coefficients of F up to ``theta^order`` by series composition in mpmath."""
    if order < 2:
        raise ValueError("order must be at least 2")
    cp = _critical(system, d, cp)
    with working_precision(bits):
        zero = [mpmath.mpc(0)] * (order + 1)
        if cp.z == 0:
            return PhaseExpansion(d, cp, tuple(zero), order)
        z = cp.z_mp if cp.z_mp is not None else mpmath.mpf(cp.z)
        z = polish_critical(system, d, z, bits)
        dv = d.mp_values()
        # w(theta) = Z (e^{i theta} - 1)
        w = [mpmath.mpc(0)] + [z * mpmath.mpc(0, 1) ** m / mpmath.factorial(m) for m in range(1, order + 1)]
        log_outer = [mpmath.mpc(0)] + [mpmath.mpf((-1) ** (k + 1)) / k for k in range(1, order + 1)]
        F = list(zero)
        F[1] += mpmath.mpc(0, 1) * dv[0]
        for f, dj in zip(system.factors, dv[1:]):
            if dj == 0:
                continue
            a = factor_taylor_at(f, z, order)
            u_outer = [mpmath.mpc(0)] + [a[k] / a[0] for k in range(1, order + 1)]
            u = _series_compose(u_outer, w, order)
            lg = _series_compose(log_outer, u, order)
            F = [Fk - dj * lk for Fk, lk in zip(F, lg)]
        c1_res = float(abs(F[1]))
        F[0] = mpmath.mpc(0)
        F[1] = mpmath.mpc(0)
        cp = CriticalPoint(cp.z, cp.residual, cp.minimality_margin, cp.strictly_minimal, z, cp.trace)
        return PhaseExpansion(d, cp, tuple(+c for c in F), order, c1_res)


# ---------------------------------------------------------------------------
# property checks


@dataclass
class PhasePropertyReport:
    a_pass: bool
    b_pass: bool
    c_pass: bool
    b_vacuous: bool
    a_values: tuple
    b_witness: Optional[float] = None
    c_witness: Optional[float] = None
    c_max: float = 0.0

    @property
    def all_pass(self):
        return self.a_pass and self.b_pass and self.c_pass

    def to_json(self):
        return {
            "a": {"pass": self.a_pass, "F0": repr(self.a_values[0]), "F1": repr(self.a_values[1])},
            "b": {"pass": self.b_pass, "vacuous": self.b_vacuous, "witness": self.b_witness},
            "c": {"pass": self.c_pass, "max_abs": self.c_max, "witness": self.c_witness},
        }


def check_phase_properties(system: FunctionSystem, d: Direction, theta_grid: Sequence[float], cp=None,
                   tol_a=1e-12, tol_c=1e-10) -> PhasePropertyReport:
    """Check vanishing at 0, positivity of Re F away from 0, and ``F = Z G`` on a grid."""
    cp = _critical(system, d, cp)
    theta = np.asarray(theta_grid, dtype=float)
    F = eval_F(system, d, cp, theta)
    F0 = abs(complex(eval_F(system, d, cp, np.array([0.0]))[0]))
    # F'(0) = i (d_0 - sum d_j Z f_j'/f_j): the critical residual
    F1 = abs(d.d0 - sum(dj * cp.z * factor_eval(f, cp.z, 1) / factor_eval(f, cp.z)
                        for f, dj in zip(system.factors, d.tail) if dj)) if cp.z else 0.0
    a_pass = F0 < tol_a and F1 < tol_a

    vacuous = d.d0 == 0
    b_pass, b_witness = True, None
    if not vacuous:
        away = np.abs(theta) > 1e-9
        bad = np.nonzero(away & ~(F.real > 0))[0]
        if bad.size:
            b_pass, b_witness = False, float(theta[bad[0]])

    G = eval_G(system, d, theta, cp)
    gap = np.abs(F - cp.z * G)
    c_max = float(gap.max(initial=0.0))
    c_pass = c_max < tol_c
    c_witness = None if c_pass else float(theta[int(np.argmax(gap))])
    return PhasePropertyReport(a_pass, b_pass, c_pass, vacuous, (F0, F1), b_witness, c_witness, c_max)


# name used by the command-line and external interface listings
check_theorem2 = check_phase_properties


def g_continuity_sweep(system: FunctionSystem, directions: Sequence[Direction], theta_grid):
    """``sup_theta |F/Z - G_limit|`` for each direction (all with Z > 0)."""
    theta = np.asarray(theta_grid, dtype=float)
    out = []
    for d in directions:
        cp = solve_critical(system, d, certify=False)
        ratio = eval_F(system, d, cp, theta) / cp.z
        out.append(float(np.max(np.abs(ratio - eval_G_limit(system, d, theta)))))
    return out
