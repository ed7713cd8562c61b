import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from mixedpowers.critical_locus import PLANAR_NORM, TRIVARIATE_NORM, planar_system, solve_critical, trivariate_system
from mixedpowers.function_system import Direction
from mixedpowers.phase_term import (
    check_phase_properties,
    eval_F,
    eval_G,
    eval_G_limit,
    eval_H,
    g_continuity_sweep,
    taylor_F,
)

from test_critical_locus import planar_dir, random_planar_directions, random_tri_directions, tri_dir

COALESCING = planar_dir("2/9", 1, "1/9")


def trivariate_c2(d, z):
    d0, d1, d2 = d.d
    return z / 2 * (d1 / (1 + z) ** 2 + 2 * d2 / (1 + 2 * z) ** 2)


def planar_half_second_derivative(d, z):
    """Factored form of F''(0)/2 for (1+z, 1-z); F'' itself is Z/(1+Z)^2 - d_2 Z/(1-Z)^2."""
    d2 = d.tail[1]
    s = math.sqrt(d2)
    return ((1 - d2) * z / (2 * (1 - z * z) ** 2)
            * (z - (1 - s) / (1 + s)) * (z - (1 + s) / (1 - s)))


def test_c2_spot_value():
    exp = taylor_F(trivariate_system(), tri_dir("7/25", "6/25", "6/25"))
    assert abs(exp.c2 - mpmath.mpf(17) / 300) < 1e-10
    assert exp.coeffs[0] == 0 and exp.coeffs[1] == 0


def test_coalescing_expansion():
    exp = taylor_F(planar_system(), COALESCING)
    assert abs(exp.c2) < 1e-10
    # sign of the cubic coefficient under F = i theta d_0 - sum d_j log(...)
    assert abs(exp.c3 - mpmath.mpc(0, -8) / 81) < 1e-9
    assert abs(exp.c4 - mpmath.mpf(10) / 81) < 1e-9


def test_c2_closed_forms_on_random_directions():
    rng = random.Random(5)
    tri, pl = trivariate_system(), planar_system()
    for d in random_tri_directions(rng, 10):
        exp = taylor_F(tri, d)
        assert float(mpmath.re(exp.c2)) == pytest.approx(trivariate_c2(d, exp.z_critical.z), abs=1e-10)
    for d in random_planar_directions(rng, 10):
        exp = taylor_F(pl, d)
        z = exp.z_critical.z
        c2 = float(mpmath.re(exp.c2))
        assert c2 == pytest.approx(planar_half_second_derivative(d, z), rel=1e-9, abs=1e-12)
        assert 2 * c2 == pytest.approx(z / (1 + z) ** 2 - d.tail[1] * z / (1 - z) ** 2, rel=1e-9, abs=1e-12)


def test_c2_matches_finite_differences():
    rng = random.Random(9)
    tri, pl = trivariate_system(), planar_system()
    dirs = [(tri, d) for d in random_tri_directions(rng, 6)] + [(pl, d) for d in random_planar_directions(rng, 6)]
    for system, d in dirs:
        cp = solve_critical(system, d)
        exp = taylor_F(system, d, cp=cp)

        def second(h):
            v = eval_F(system, d, cp, np.array([-h, 0.0, h]))
            return (v[0] - 2 * v[1] + v[2]).real / (h * h)

        h = 1e-3
        rich = (4 * second(h / 2) - second(h)) / 3
        assert rich == pytest.approx(2 * float(mpmath.re(exp.c2)), rel=1e-6)


def test_eval_F_properties(tri):
    d = tri_dir(3, 4, 2)
    cp = solve_critical(tri, d)
    theta = np.linspace(0.01, math.pi, 50)
    F = eval_F(tri, d, cp, theta)
    assert np.all(F.real > 0)
    assert np.allclose(eval_F(tri, d, cp, -theta), np.conj(F), atol=1e-12)
    assert abs(eval_F(tri, d, cp, np.array([0.0]))[0]) == 0
    assert np.allclose(eval_H(tri, d, theta, cp.z), F)
    assert np.allclose(eval_H(tri, d, np.array([0.0]), 0.37), 0)


def test_G_limit_values(tri):
    d = tri_dir(0, "1/3", "1/3")
    assert complex(eval_G_limit(tri, d, math.pi)) == pytest.approx(2 + 1j * math.pi)
    assert complex(eval_G(tri, d, 0.0)) == 0
    # away from the zero set G is F / Z
    d = tri_dir(3, 4, 2)
    cp = solve_critical(tri, d)
    th = np.linspace(-3, 3, 7)
    assert np.allclose(eval_G(tri, d, th, cp) * cp.z, eval_F(tri, d, cp, th))


def test_G_continuity_sweep(tri):
    dirs = [Direction.normalized((d0, 1 - d0, Fraction(0)), TRIVARIATE_NORM) for d0 in (1e-2, 1e-3, 1e-4)]
    gaps = g_continuity_sweep(tri, dirs, np.linspace(-math.pi, math.pi, 101))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-3


def test_zero_direction_expansion(tri):
    exp = taylor_F(tri, tri_dir(0, 1, 1))
    assert all(c == 0 for c in exp.coeffs)


def test_property_report_cases(tri, planar):
    grid = np.linspace(-math.pi, math.pi, 101)
    assert check_phase_properties(tri, tri_dir(3, 4, 2), grid).all_pass
    rep = check_phase_properties(planar, COALESCING, np.linspace(-1, 1, 101))
    assert rep.all_pass
    rep = check_phase_properties(tri, tri_dir(0, 1, 1), grid)
    assert rep.b_vacuous and rep.a_pass and rep.c_pass


def test_expansion_json(planar):
    js = taylor_F(planar, COALESCING).to_json()
    assert js["order"] == 4 and len(js["coeffs"]) == 5
    assert all(len(c) == 2 and all(isinstance(x, str) for x in c) for c in js["coeffs"])


def test_cubic_coefficient_sign_by_finite_differences(planar):
    cp = solve_critical(planar, COALESCING)
    h = 1e-2
    v = eval_F(planar, COALESCING, cp, np.array([-2 * h, -h, h, 2 * h]))
    third = (v[3] - 2 * v[2] + 2 * v[1] - v[0]) / (2 * h ** 3)
    assert third / 6 == pytest.approx(-8j / 81, abs=2e-4)
