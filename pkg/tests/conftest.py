import pytest

from mixedpowers.critical_locus import planar_system, trivariate_system
from mixedpowers.exact_series import RationalPoly


@pytest.fixture
def tri():
    return trivariate_system()


@pytest.fixture
def planar():
    return planar_system()


@pytest.fixture
def one_minus_two_z():
    return RationalPoly((1, -2))


def poly_coeffs_brute(pairs, n0):
    """Coefficient list of prod f^e up to degree n0 using plain integer lists."""
    acc = [1]
    for f, e in pairs:
        ints = [int(c) for c in f.coeffs]
        for _ in range(e):
            out = [0] * min(len(acc) + len(ints) - 1, n0 + 1)
            for i, a in enumerate(acc):
                for j, b in enumerate(ints):
                    if i + j <= n0:
                        out[i + j] += a * b
            acc = out
    return acc + [0] * (n0 + 1 - len(acc))
