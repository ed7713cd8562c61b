"""Exact polynomial arithmetic over the rationals and the brute-force coefficient oracle.

Polynomials are dense, lowest degree first. Products of large integer
polynomials go through Kronecker substitution (pack each polynomial into one
big integer, multiply, unpack); small products use the schoolbook loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Optional, Sequence

import mpmath
import numpy as np

try:
    import gmpy2
except ImportError:  # pragma: no cover
    gmpy2 = None

from .precision import to_mpf, working_precision, mp_str

__all__ = [
    "RationalPoly",
    "BigCoefficient",
    "poly_mul",
    "poly_pow",
    "coeff_of_product",
    "binomial",
]

# below this many coefficient products the schoolbook loop beats packing
_KRONECKER_THRESHOLD = 2048


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, np.integer)):
        return Fraction(int(c))
    if isinstance(c, str):
        return Fraction(c.strip())
    if isinstance(c, float):
        return Fraction(c)
    raise TypeError(f"cannot interpret {c!r} as an exact rational")


@dataclass(frozen=True)
class RationalPoly:
    """Univariate polynomial with exact rational coefficients.

    ``coeffs[i]`` is the coefficient of ``z**i``. Trailing zeros are stripped,
    so the zero polynomial is the empty tuple.
    """

    coeffs: tuple = ()

    def __post_init__(self):
        cs = [_as_fraction(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_json(cls, data: Sequence) -> "RationalPoly":
        return cls(tuple(_as_fraction(c) for c in data))

    def to_json(self) -> list:
        return [str(c) for c in self.coeffs]

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> "RationalPoly":
        return cls((0,) * degree + (coeff,))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial reports 0 (check ``is_zero`` to tell apart)."""
        return max(len(self.coeffs) - 1, 0)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def __repr__(self):
        if self.is_zero:
            return "RationalPoly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            terms.append(f"{c}{'*' + mono if mono else ''}")
        return "RationalPoly(" + " + ".join(terms) + ")"

    def __neg__(self):
        return RationalPoly(tuple(-c for c in self.coeffs))

    def __add__(self, other):
        other = _coerce(other)
        n = max(len(self), len(other))
        return RationalPoly(tuple(self[i] + other[i] for i in range(n)))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        return poly_mul(self, _coerce(other))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return poly_pow(self, e, None)

    def derivative(self, order: int = 1) -> "RationalPoly":
        cs = list(self.coeffs)
        for _ in range(order):
            cs = [i * c for i, c in enumerate(cs)][1:]
        return RationalPoly(tuple(cs))

    def valuation(self) -> int:
        """Order of vanishing at z=0 (0 for the zero polynomial)."""
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return i
        return 0

    def shift_down(self, k: int) -> "RationalPoly":
        """Divide by ``z**k``; the low ``k`` coefficients must vanish."""
        if any(c != 0 for c in self.coeffs[:k]):
            raise ValueError(f"polynomial is not divisible by z^{k}")
        return RationalPoly(self.coeffs[k:])

    def truncate(self, degree: int) -> "RationalPoly":
        return RationalPoly(self.coeffs[: degree + 1])

    def support_gcd(self) -> int:
        """gcd of the positive exponents carrying nonzero coefficients (the period)."""
        return reduce(math.gcd, (i for i, c in enumerate(self.coeffs) if i and c), 0)

    @property
    def nonnegative(self) -> bool:
        return all(c >= 0 for c in self.coeffs)

    def as_array(self, dtype=complex) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs] or [0.0], dtype=dtype)

    def __call__(self, z):
        """Horner evaluation at a float, complex or numpy array argument."""
        acc = 0.0 * z
        for c in reversed(self.coeffs):
            acc = acc * z + float(c)
        return acc

    def eval_mp(self, z):
        acc = mpmath.mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * z + to_mpf(c)
        return acc

    def integerized(self):
        """``(ints, D)`` with ``self == ints / D`` and ``D > 0`` minimal."""
        den = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for c in self.coeffs), 1)
        return [int(c * den) for c in self.coeffs], den


def _coerce(p) -> RationalPoly:
    if isinstance(p, RationalPoly):
        return p
    return RationalPoly((p,))


# --------------------------------------------------------------------------
# integer kernels


def _schoolbook(a: Sequence[int], b: Sequence[int], trunc: Optional[int] = None) -> list:
    if not a or not b:
        return []
    n = len(a) + len(b) - 1
    if trunc is not None:
        n = min(n, trunc + 1)
    out = [0] * n
    for i, ai in enumerate(a):
        if ai == 0 or i >= n:
            continue
        for j in range(min(len(b), n - i)):
            out[i + j] += ai * b[j]
    return out


def _pack(vals: Sequence[int], nbytes: int) -> int:
    pos = b"".join((v if v > 0 else 0).to_bytes(nbytes, "little") for v in vals)
    neg = b"".join((-v if v < 0 else 0).to_bytes(nbytes, "little") for v in vals)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _kronecker(a: Sequence[int], b: Sequence[int], trunc: Optional[int] = None) -> list:
    if trunc is not None:
        a, b = a[: trunc + 1], b[: trunc + 1]
    bound = max(map(abs, a)) * max(map(abs, b)) * min(len(a), len(b))
    if bound == 0:
        return []
    nbytes = (bound.bit_length() + 2 + 7) // 8
    pa, pb = _pack(a, nbytes), _pack(b, nbytes)
    prod = int(gmpy2.mpz(pa) * gmpy2.mpz(pb)) if gmpy2 is not None else pa * pb
    ndig = len(a) + len(b) - 1
    # shift every signed digit into [0, 2^B) so the bytes can be read off directly
    offset = int.from_bytes((b"\x00" * (nbytes - 1) + b"\x80") * ndig, "little")
    raw = (prod + offset).to_bytes(nbytes * ndig, "little")
    half = 1 << (8 * nbytes - 1)
    n = ndig if trunc is None else min(ndig, trunc + 1)
    return [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") - half for i in range(n)]


def _imul(a, b, trunc=None) -> list:
    if len(a) * len(b) <= _KRONECKER_THRESHOLD:
        out = _schoolbook(a, b, trunc)
    else:
        out = _kronecker(a, b, trunc)
    while out and out[-1] == 0:
        out.pop()
    return out


def _ipow(a: list, e: int, trunc: Optional[int]) -> list:
    result = [1]
    base = a if trunc is None else a[: trunc + 1]
    while e:
        if e & 1:
            result = _imul(result, base, trunc)
        e >>= 1
        if e:
            base = _imul(base, base, trunc)
    return result


def _from_ints(ints: Sequence[int], den: int) -> RationalPoly:
    if den == 1:
        return RationalPoly(tuple(Fraction(c) for c in ints))
    return RationalPoly(tuple(Fraction(c, den) for c in ints))


# --------------------------------------------------------------------------
# public operations


def poly_mul(a: RationalPoly, b: RationalPoly, truncate_at: Optional[int] = None) -> RationalPoly:
    """Exact product ``a*b``, optionally dropping every degree above ``truncate_at``."""
    if truncate_at is not None and truncate_at < 0:
        return RationalPoly()
    ia, da = a.integerized()
    ib, db = b.integerized()
    return _from_ints(_imul(ia, ib, truncate_at), da * db)


def poly_pow(f: RationalPoly, e: int, truncate_at: Optional[int]) -> RationalPoly:
    """``f**e mod z**(truncate_at+1)`` by binary exponentiation on integerized coefficients."""
    if e < 0:
        raise ValueError("exponent must be nonnegative")
    if truncate_at is not None and truncate_at < 0:
        return RationalPoly()
    ints, den = f.integerized()
    return _from_ints(_ipow(ints, e, truncate_at), den ** e)


@dataclass(frozen=True)
class BigCoefficient:
    """An exact rational coefficient with its sign and natural log magnitude."""

    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", _as_fraction(self.value))

    @property
    def sign(self) -> int:
        return (self.value > 0) - (self.value < 0)

    @property
    def log_abs(self):
        """``ln|value|`` as an mpmath float at the working precision."""
        if self.value == 0:
            raise ValueError("log_abs is undefined for a zero coefficient")
        with working_precision():
            v = abs(self.value)
            return +(mpmath.log(mpmath.mpf(v.numerator)) - mpmath.log(mpmath.mpf(v.denominator)))

    def __eq__(self, other):
        if isinstance(other, BigCoefficient):
            return self.value == other.value
        try:
            return self.value == _as_fraction(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __int__(self):
        if self.value.denominator != 1:
            raise ValueError("coefficient is not an integer")
        return self.value.numerator

    def __float__(self):
        return float(self.value)

    def to_json(self) -> dict:
        out = {"value": str(self.value), "sign": self.sign}
        out["log_abs"] = mp_str(self.log_abs) if self.value else None
        return out


def coeff_of_product(n0: int, factors: Iterable) -> BigCoefficient:
    """Exact ``[z^n0] prod f_j**e_j`` for ``factors`` given as ``(poly, e)`` pairs."""
    factors = list(factors)
    if n0 < 0:
        return BigCoefficient(0)
    den = 1
    acc = [1]
    powered = []
    for poly, e in factors:
        if e < 0:
            raise ValueError("exponents must be nonnegative")
        ints, d = _coerce(poly).integerized()
        den *= d ** e
        powered.append(_ipow(ints, e, n0))
    if not powered:
        return BigCoefficient(1 if n0 == 0 else 0)
    # multiply all but the last, then read a single convolution entry
    for p in powered[:-1]:
        acc = _imul(acc, p, n0)
    last = powered[-1]
    total = 0
    for i in range(max(0, n0 - len(last) + 1), min(n0, len(acc) - 1) + 1):
        total += acc[i] * last[n0 - i]
    return BigCoefficient(Fraction(total, den))


def binomial(k: int, t: int) -> BigCoefficient:
    """Binomial coefficient with the convention ``C(k, t) = 0`` unless ``0 <= t <= k``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if t < 0 or t > k:
        return BigCoefficient(0)
    return BigCoefficient(math.comb(k, t))
