"""Factor tuples, norms, directions and exponent vectors.

A :class:`FunctionSystem` holds the factors ``f_1..f_m`` un-powered; the
powers live in an :class:`ExponentVector`. Factors are usually
:class:`~mixedpowers.exact_series.RationalPoly`; :class:`AnalyticFactor`
covers entire or disk-analytic functions given by callables.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Callable, Optional, Sequence

import mpmath
import numpy as np

from .errors import ConstraintViolation, DomainError, PoleError, PoleOnContour
from .exact_series import BigCoefficient, RationalPoly, coeff_of_product

__all__ = [
    "NormSpec",
    "Direction",
    "ExponentVector",
    "AnalyticFactor",
    "FunctionSystem",
    "Reduction",
    "exponential_factor",
    "validate",
    "eval_f",
    "log_derivative",
    "reduce_vanishing",
    "exact_coefficient",
    "direction_of",
    "factor_eval",
    "factor_taylor_at",
    "log_ratio_on_circle",
]

H1_TOL = 1e-12
POLE_TOL = 1e-14
DIRECTION_TOL = 1e-12


# ---------------------------------------------------------------------------
# norms, directions, exponent vectors


@dataclass(frozen=True)
class NormSpec:
    """Weighted L1 norm (``kind="wl1"``) or the max norm (``kind="linf"``).

    ``weights=None`` with ``wl1`` means unit weights of whatever length.
    """

    kind: str = "wl1"
    weights: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in ("wl1", "linf"):
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.weights is not None:
            if self.kind == "linf":
                raise ValueError("the max norm takes no weights")
            w = tuple(Fraction(x) if not isinstance(x, float) else x for x in self.weights)
            if any(x <= 0 for x in w):
                raise ValueError("norm weights must be strictly positive")
            object.__setattr__(self, "weights", w)

    @classmethod
    def l1(cls, weights=None):
        return cls("wl1", None if weights is None else tuple(weights))

    @classmethod
    def linf(cls):
        return cls("linf")

    def _weights_for(self, size):
        if self.weights is None:
            return (1,) * size
        if len(self.weights) != size:
            raise ValueError(f"norm has {len(self.weights)} weights but the vector has {size} entries")
        return self.weights

    def norm(self, v):
        """Norm of ``v``; exact (Fraction) for integer or rational input."""
        if self.kind == "linf":
            return max(abs(x) for x in v)
        return sum(w * abs(x) for w, x in zip(self._weights_for(len(v)), v))

    def to_json(self):
        if self.kind == "linf":
            return {"kind": "linf"}
        out = {"kind": "wl1"}
        if self.weights is not None:
            out["weights"] = [str(w) for w in self.weights]
        return out

    @classmethod
    def from_json(cls, data):
        if data is None:
            return cls()
        kind = data.get("kind", "wl1")
        if kind == "linf":
            return cls.linf()
        weights = data.get("weights")
        if weights is not None:
            weights = tuple(Fraction(str(w)) for w in weights)
        return cls("wl1", weights)


@dataclass(frozen=True)
class ExponentVector:
    """``(n0, n1, ..., nm)``: target degree followed by the factor exponents."""

    n: tuple

    def __post_init__(self):
        vals = tuple(int(x) for x in self.n)
        if any(x != y for x, y in zip(vals, self.n)):
            raise ValueError("exponents must be integers")
        if any(x < 0 for x in vals):
            raise ValueError("exponents must be nonnegative")
        if not any(vals):
            raise ValueError("exponent vector must be nonzero")
        object.__setattr__(self, "n", vals)

    @property
    def n0(self):
        return self.n[0]

    @property
    def tail(self):
        return self.n[1:]

    def __len__(self):
        return len(self.n)

    def __iter__(self):
        return iter(self.n)

    def __getitem__(self, i):
        return self.n[i]

    def size(self, norm: NormSpec):
        return norm.norm(self.n)

    @classmethod
    def parse(cls, text):
        """Parse ``"3,4,2"`` (commas or whitespace)."""
        parts = text.replace(",", " ").split()
        return cls(tuple(int(p) for p in parts))


@dataclass(frozen=True)
class Direction:
    """A point of the unit sphere's nonnegative part under ``norm``.

    ``d`` holds floats. When the direction was built from exact rationals
    they are kept in ``exact`` so high-precision routines can use them.
    """

    d: tuple
    norm: NormSpec = field(default_factory=NormSpec)
    exact: Optional[tuple] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        exact = self.exact
        if exact is None and all(isinstance(x, (int, Fraction)) for x in self.d):
            exact = tuple(Fraction(x) for x in self.d)
        if exact is not None:
            exact = tuple(Fraction(x) for x in exact)
            if any(x < 0 for x in exact):
                raise DomainError("direction coordinates must be nonnegative")
            size = self.norm.norm(exact)
            if abs(float(size) - 1.0) > DIRECTION_TOL:
                raise DomainError(f"direction has norm {float(size)!r}, expected 1")
        vals = tuple(float(x) for x in (exact if exact is not None else self.d))
        if any(x < 0 for x in vals):
            raise DomainError("direction coordinates must be nonnegative")
        size = float(self.norm.norm(vals))
        if abs(size - 1.0) > DIRECTION_TOL:
            raise DomainError(f"direction has norm {size!r}, expected 1")
        object.__setattr__(self, "d", vals)
        object.__setattr__(self, "exact", exact)

    @classmethod
    def normalized(cls, v, norm: NormSpec = None):
        """Scale a nonnegative nonzero vector onto the unit sphere."""
        norm = norm or NormSpec()
        if all(isinstance(x, (int, Fraction)) for x in v):
            exact = [Fraction(x) for x in v]
            size = norm.norm(exact)
            if size == 0:
                raise DomainError("cannot normalize the zero vector")
            return cls(tuple(x / size for x in exact), norm)
        vals = [float(x) for x in v]
        size = float(norm.norm(vals))
        if size == 0:
            raise DomainError("cannot normalize the zero vector")
        return cls(tuple(x / size for x in vals), norm)

    @property
    def d0(self):
        return self.d[0]

    @property
    def tail(self):
        return self.d[1:]

    def __len__(self):
        return len(self.d)

    def __getitem__(self, i):
        return self.d[i]

    def mp_values(self):
        """Coordinates as mpmath numbers, exact rationals when available."""
        if self.exact is not None:
            return [mpmath.mpf(x.numerator) / x.denominator for x in self.exact]
        return [mpmath.mpf(x) for x in self.d]

    def to_json(self):
        out = {"d": [repr(x) for x in self.d], "norm": self.norm.to_json()}
        if self.exact is not None:
            out["exact"] = [str(x) for x in self.exact]
        return out


def direction_of(n: ExponentVector, norm: NormSpec = None) -> Direction:
    """``n / ||n||`` as a :class:`Direction` (computed exactly, then rounded)."""
    if not isinstance(n, ExponentVector):
        n = ExponentVector(tuple(n))
    return Direction.normalized(n.n, norm)


# ---------------------------------------------------------------------------
# factors


@dataclass(frozen=True, eq=False)
class AnalyticFactor:
    """An analytic factor described by callables instead of coefficients.

    ``derivs(z, order)`` evaluates f, f', f'' on numpy input; ``mp_value``
    evaluates f in mpmath (used for Taylor expansion at high precision);
    ``taylor(N)`` returns the first ``N+1`` Maclaurin coefficients as exact
    rationals, which lets the oracle treat f as a truncated series.
    """

    name: str
    derivs: Callable
    mp_value: Callable
    taylor: Callable
    radius: float = math.inf
    nonnegative: bool = False
    period: int = 1

    def __call__(self, z):
        return self.derivs(z, 0)

    def truncated(self, degree) -> RationalPoly:
        return RationalPoly(tuple(self.taylor(degree)))

    def __repr__(self):
        return f"AnalyticFactor({self.name})"


def exponential_factor(shift=0) -> AnalyticFactor:
    """``e^z - shift`` as a descriptor (``shift=1`` gives ``e^z - 1``, which fails H1)."""
    shift = Fraction(shift)

    def derivs(z, order):
        v = np.exp(z)
        return v - float(shift) if order == 0 else v

    def taylor(n):
        out = [Fraction(1, math.factorial(k)) for k in range(n + 1)]
        out[0] -= shift
        return out

    return AnalyticFactor(
        name="exp" if shift == 0 else f"exp-{shift}",
        derivs=derivs,
        mp_value=lambda z: mpmath.exp(z) - mpmath.mpf(shift.numerator) / shift.denominator,
        taylor=taylor,
        nonnegative=shift <= 0,
    )


@lru_cache(maxsize=1024)
def _poly_derivative(f: RationalPoly, order: int) -> RationalPoly:
    return f.derivative(order)


def factor_eval(f, z, order=0):
    """``f^{(order)}(z)`` for a polynomial or analytic factor."""
    if isinstance(f, RationalPoly):
        return _poly_derivative(f, order)(z) if order else f(z)
    return f.derivs(z, order)


def factor_value_at_zero(f) -> float:
    if isinstance(f, RationalPoly):
        return float(f[0])
    return complex(f.derivs(0.0, 0)).real


def factor_is_constant(f) -> bool:
    if isinstance(f, RationalPoly):
        return f.degree == 0
    coeffs = f.taylor(8)
    return all(c == 0 for c in coeffs[1:])


def factor_nonnegative(f) -> bool:
    return f.nonnegative


def factor_period(f) -> int:
    if isinstance(f, RationalPoly):
        return f.support_gcd()
    return f.period


def factor_taylor_at(f, z, order):
    """Taylor coefficients ``f^{(k)}(z)/k!`` for ``k = 0..order`` in mpmath."""
    if isinstance(f, RationalPoly):
        out = []
        poly = f
        fact = 1
        for k in range(order + 1):
            if k:
                poly = poly.derivative()
                fact *= k
            out.append(poly.eval_mp(z) / fact)
        return out
    return mpmath.taylor(f.mp_value, z, order)


def factor_mp_value(f, z):
    if isinstance(f, RationalPoly):
        return f.eval_mp(z)
    return f.mp_value(z)


def factor_truncated(f, degree) -> RationalPoly:
    if isinstance(f, RationalPoly):
        return f
    return f.truncated(degree)


def factor_radius(f) -> float:
    return math.inf if isinstance(f, RationalPoly) else f.radius


def _factor_roots(f: RationalPoly) -> np.ndarray:
    coeffs = [float(c) for c in f.coeffs]
    return np.roots(coeffs[::-1]) if len(coeffs) > 1 else np.zeros(0, dtype=complex)


def log_ratio_on_circle(f, z, theta):
    """Continuous branch of ``ln(f(z e^{i theta}) / f(z))`` vanishing at ``theta=0``.

    Polynomials are handled root by root, where every piece has a principal
    branch that is already continuous on the circle. Analytic descriptors are
    unwrapped along a fine grid starting at 0.
    """
    theta = np.asarray(theta, dtype=float)
    z = complex(z)
    if z == 0:
        return np.zeros(theta.shape, dtype=complex)
    if isinstance(f, RationalPoly):
        roots = _factor_roots(f)
        w = z * np.exp(1j * theta)
        total = np.zeros(theta.shape, dtype=complex)
        az = abs(z)
        for r in roots:
            if abs(r) > az:
                a = 1 - w / r
                b = 1 - z / r
            else:
                a = 1 - r / w
                b = 1 - r / z
                total = total + 1j * theta
            if np.any(np.abs(a) < POLE_TOL) or abs(b) < POLE_TOL:
                raise PoleOnContour(f"factor vanishes on the circle |z|={az:g}")
            total = total + np.log(a) - np.log(b)
        return total
    return _unwrapped_log_ratio(f, z, theta)


def _unwrapped_log_ratio(f, z, theta):
    flat = theta.ravel()
    step = 1e-2
    lo, hi = min(0.0, flat.min(initial=0.0)), max(0.0, flat.max(initial=0.0))
    grid = np.union1d(np.union1d(np.arange(0.0, hi + step, step), -np.arange(0.0, -lo + step, step)), flat)
    grid = np.union1d(grid, [0.0])
    vals = f.derivs(z * np.exp(1j * grid), 0) / f.derivs(z, 0)
    if np.any(np.abs(vals) < POLE_TOL):
        raise PoleOnContour("factor vanishes on the circle")
    i0 = int(np.searchsorted(grid, 0.0))
    ang = np.angle(vals)
    right = np.unwrap(ang[i0:])
    left = np.unwrap(ang[: i0 + 1][::-1])[::-1]
    phase = np.concatenate([left[:-1], right])
    phase -= phase[i0]
    logs = np.log(np.abs(vals)) + 1j * phase
    return np.interp(flat, grid, logs.real).reshape(theta.shape) + 1j * np.interp(
        flat, grid, logs.imag
    ).reshape(theta.shape)


def _parse_factor(data):
    if isinstance(data, (RationalPoly, AnalyticFactor)):
        return data
    return RationalPoly.from_json(data)


# ---------------------------------------------------------------------------
# the system


@dataclass(frozen=True, eq=False)
class FunctionSystem:
    """Factors ``f_1..f_m``, optional amplitude ``f_0`` and the norm in use."""

    factors: tuple
    amplitude: Optional[object] = None
    norm: NormSpec = field(default_factory=NormSpec)
    check: bool = True

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(_parse_factor(f) for f in self.factors))
        if self.amplitude is not None:
            object.__setattr__(self, "amplitude", _parse_factor(self.amplitude))
        if not self.factors:
            raise ConstraintViolation("a system needs at least one factor", None, "m")
        if self.norm.weights is not None and len(self.norm.weights) != len(self.factors) + 1:
            raise ValueError("norm weights must have m+1 entries")
        if self.check:
            validate(self)

    @property
    def m(self) -> int:
        return len(self.factors)

    @cached_property
    def radius(self) -> float:
        radii = [factor_radius(f) for f in self.factors]
        if self.amplitude is not None:
            radii.append(factor_radius(self.amplitude))
        return min(radii)

    @cached_property
    def is_polynomial(self) -> bool:
        return all(isinstance(f, RationalPoly) for f in self.factors) and (
            self.amplitude is None or isinstance(self.amplitude, RationalPoly))

    @cached_property
    def nonnegative(self) -> bool:
        return all(factor_nonnegative(f) for f in self.factors)

    @cached_property
    def packed(self):
        from .kernels import pack_polys

        coeffs, lengths = pack_polys(self.factors)
        amp = (self.amplitude.as_array(complex) if self.amplitude is not None
               else np.ones(1, dtype=complex))
        return coeffs, lengths, amp

    def with_norm(self, norm: NormSpec) -> "FunctionSystem":
        return FunctionSystem(self.factors, self.amplitude, norm, self.check)

    def with_amplitude(self, amplitude) -> "FunctionSystem":
        return FunctionSystem(self.factors, amplitude, self.norm, self.check)

    def eval_f(self, j, z, order=0):
        return eval_f(self, j, z, order)

    def log_derivative(self, j, z):
        return log_derivative(self, j, z)

    def amplitude_at(self, w):
        if self.amplitude is None:
            return np.ones_like(np.asarray(w, dtype=complex)) if np.ndim(w) else 1.0
        return factor_eval(self.amplitude, w)

    def to_json(self):
        def enc(f):
            if isinstance(f, RationalPoly):
                return f.to_json()
            raise ValueError(f"{f!r} has no JSON form")

        out = {"factors": [enc(f) for f in self.factors], "norm": self.norm.to_json()}
        if self.amplitude is not None:
            out["amplitude"] = enc(self.amplitude)
        return out

    @classmethod
    def from_json(cls, data, check=True):
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        return cls(
            tuple(RationalPoly.from_json(f) for f in data["factors"]),
            RationalPoly.from_json(data["amplitude"]) if data.get("amplitude") is not None else None,
            NormSpec.from_json(data.get("norm")),
            check,
        )

    @classmethod
    def load(cls, path, check=True):
        with open(path) as fh:
            return cls.from_json(json.load(fh), check)

    def digest(self) -> str:
        import hashlib

        payload = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]


def validate(system: FunctionSystem) -> FunctionSystem:
    """Check that every factor is nonzero at the origin and non-constant."""
    for j, f in enumerate(system.factors, start=1):
        if abs(factor_value_at_zero(f)) <= H1_TOL:
            raise ConstraintViolation(f"factor {j} vanishes at z=0", j, "H1")
        if factor_is_constant(f):
            raise ConstraintViolation(f"factor {j} is constant", j, "H2")
    return system


def _factor_index(system, j):
    if not 1 <= j <= system.m:
        raise IndexError(f"factor index {j} outside 1..{system.m}")
    return system.factors[j - 1]


def eval_f(system: FunctionSystem, j: int, z, order: int = 0):
    """``f_j^{(order)}(z)`` with 1-based ``j``."""
    if order not in (0, 1, 2):
        raise ValueError("derivative order must be 0, 1 or 2")
    f = _factor_index(system, j)
    if np.any(np.abs(z) >= system.radius):
        raise DomainError(f"|z| must be below the radius {system.radius}")
    return factor_eval(f, z, order)


def log_derivative(system: FunctionSystem, j: int, z):
    """``z f_j'(z) / f_j(z)``."""
    f = _factor_index(system, j)
    if np.any(np.abs(z) >= system.radius):
        raise DomainError(f"|z| must be below the radius {system.radius}")
    val = factor_eval(f, z)
    if np.any(np.abs(val) < POLE_TOL):
        raise PoleError(f"factor {j} vanishes at z={z}")
    return z * factor_eval(f, z, 1) / val


@dataclass(frozen=True)
class Reduction:
    """Result of stripping powers of z from the factors."""

    system: FunctionSystem
    n: Optional[ExponentVector]
    orders: tuple
    is_zero: bool
    shifted_n0: int


def reduce_vanishing(system: FunctionSystem, n) -> Reduction:
    """Write ``f_j = z^{k_j} g_j`` and move the powers of z into the target degree.

    When the shifted degree is negative the coefficient is exactly zero and
    ``is_zero`` is set.
    """
    n = n if isinstance(n, ExponentVector) else ExponentVector(tuple(n))
    if len(n) != system.m + 1:
        raise ValueError("exponent vector length must be m+1")
    new_factors = []
    orders = []
    for f in system.factors:
        if not isinstance(f, RationalPoly):
            # descriptors must already be valid at the origin
            orders.append(0)
            new_factors.append(f)
            continue
        k = f.valuation()
        orders.append(k)
        new_factors.append(f.shift_down(k))
    shifted = n.n0 - sum(k * e for k, e in zip(orders, n.tail))
    reduced = FunctionSystem(tuple(new_factors), system.amplitude, system.norm, check=False)
    if shifted < 0:
        return Reduction(reduced, None, tuple(orders), True, shifted)
    new_n = (shifted,) + n.tail
    vec = ExponentVector(new_n) if any(new_n) else None
    return Reduction(reduced, vec, tuple(orders), False, shifted)


def exact_coefficient(system: FunctionSystem, n, reduce=False) -> BigCoefficient:
    """Exact ``[z^{n_0}] f_0 prod f_j^{n_j}`` (``f_0`` the amplitude, if any).

    Factors vanishing at the origin are rejected unless ``reduce`` is set, in
    which case their powers of z are moved into the target degree first.
    """
    n = n if isinstance(n, ExponentVector) else ExponentVector(tuple(n))
    if len(n) != system.m + 1:
        raise ValueError("exponent vector length must be m+1")
    if reduce:
        red = reduce_vanishing(system, n)
        if red.is_zero:
            return BigCoefficient(0)
        system, n0 = red.system, red.shifted_n0
    else:
        validate(system)
        n0 = n.n0
    pairs = [(factor_truncated(f, n0), e) for f, e in zip(system.factors, n.tail) if e]
    if system.amplitude is not None:
        pairs.append((factor_truncated(system.amplitude, n0), 1))
    return coeff_of_product(n0, pairs)
