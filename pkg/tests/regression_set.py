"""Fixed regression instances: (label, system, exponent vector), all with ||n|| <= 200."""

from mixedpowers.critical_locus import planar_system, trivariate_system
from mixedpowers.exact_series import RationalPoly


def _planar_vectors():
    out = []
    for n, k in [(3, 2), (4, 2), (6, 3), (10, 5), (12, 9), (20, 10), (30, 10), (40, 25),
                 (50, 40), (60, 30), (66, 22), (25, 20), (15, 12), (8, 8), (45, 15)]:
        out.append((n - k, 3 * n, k - 1))
    return out


def regression_instances():
    tri = trivariate_system()
    planar = planar_system()
    tri_amp = tri.with_amplitude(RationalPoly((2, 1, 1)))
    planar_amp = planar.with_amplitude(RationalPoly((1, -2)))
    rows = []
    for n in [(3, 4, 2), (2, 10, 3), (5, 20, 4), (1, 1, 1), (10, 30, 5), (20, 40, 20), (7, 3, 9),
              (40, 60, 30), (2, 980 // 10, 10), (30, 100, 20), (60, 50, 40), (15, 150, 1), (45, 20, 60)]:
        rows.append(("trivariate", tri, n))
    for n in [(3, 4, 2), (12, 30, 10), (25, 60, 20), (8, 8, 8), (50, 90, 30)]:
        rows.append(("trivariate+amp", tri_amp, n))
    vecs = _planar_vectors()
    for n in vecs[:7]:
        rows.append(("planar", planar, n))
    for n in vecs:
        rows.append(("planar+amp", planar_amp, n))
    return rows
