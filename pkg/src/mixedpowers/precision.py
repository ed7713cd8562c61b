"""Working precision (mantissa bits) for the mpmath-backed parts of the library."""

import os
from contextlib import contextmanager
from fractions import Fraction

import mpmath

DEFAULT_PRECISION = 128
_precision = None


def get_precision():
    if _precision is not None:
        return _precision
    env = os.environ.get("MIXEDPOWERS_PRECISION")
    if env:
        bits = int(env)
        if bits < 53:
            raise ValueError("MIXEDPOWERS_PRECISION must be at least 53 bits")
        return bits
    return DEFAULT_PRECISION


def set_precision(bits):
    global _precision
    if bits is not None and int(bits) < 53:
        raise ValueError("precision must be at least 53 bits")
    _precision = None if bits is None else int(bits)


@contextmanager
def working_precision(bits=None):
    """Run a block with ``mpmath.mp.prec`` set to ``bits`` (default: the global P)."""
    with mpmath.workprec(get_precision() if bits is None else int(bits)):
        yield mpmath.mp


def to_mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def mp_str(x, bits=None):
    """Decimal string carrying roughly ``bits`` binary digits."""
    bits = get_precision() if bits is None else bits
    if mpmath.isinf(x):
        return "-inf" if x < 0 else "inf"
    return mpmath.nstr(x, max(17, int(bits * 0.30103)), min_fixed=-1, max_fixed=-1)
