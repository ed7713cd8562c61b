"""Hot numeric kernels, each in a numba and a pure-numpy flavour.

The public names at the bottom of the module dispatch on ``_accel.USE_NUMBA``.
Both flavours are importable directly (``*_numba`` / ``*_numpy``) so tests and
the benchmark can compare them.

Polynomial systems are passed as a padded ``(m, D)`` complex array of
coefficients (lowest degree first) plus the true length of every row.
"""

import numpy as np

from ._accel import USE_NUMBA, njit

# ---------------------------------------------------------------------------
# circle integrand  exp(-i n0 th) * prod_j (f_j(z e^{i th}) / f_j(z))^{n_j} * A(z e^{i th})


def circle_integrand_numpy(theta, z, n0, coeffs, lengths, exps, amp):
    w = z * np.exp(1j * theta)
    logsum = -1j * n0 * theta
    for j in range(coeffs.shape[0]):
        fw = np.zeros_like(w)
        fz = 0j
        for k in range(lengths[j] - 1, -1, -1):
            fw = fw * w + coeffs[j, k]
            fz = fz * z + coeffs[j, k]
        logsum = logsum + exps[j] * np.log(fw / fz)
    a = np.zeros_like(w)
    for k in range(amp.shape[0] - 1, -1, -1):
        a = a * w + amp[k]
    return np.exp(logsum) * a


@njit(cache=True)
def circle_integrand_numba(theta, z, n0, coeffs, lengths, exps, amp):
    m = coeffs.shape[0]
    out = np.empty(theta.shape[0], dtype=np.complex128)
    fz = np.empty(m, dtype=np.complex128)
    for j in range(m):
        acc = 0j
        for k in range(lengths[j] - 1, -1, -1):
            acc = acc * z + coeffs[j, k]
        fz[j] = acc
    for i in range(theta.shape[0]):
        w = z * np.exp(1j * theta[i])
        logsum = -1j * n0 * theta[i]
        for j in range(m):
            acc = 0j
            for k in range(lengths[j] - 1, -1, -1):
                acc = acc * w + coeffs[j, k]
            logsum += exps[j] * np.log(acc / fz[j])
        a = 0j
        for k in range(amp.shape[0] - 1, -1, -1):
            a = a * w + amp[k]
        out[i] = np.exp(logsum) * a
    return out


# ---------------------------------------------------------------------------
# sum_j w_j ln|f_j(z e^{i th})|


def circle_log_modulus_numpy(theta, z, coeffs, lengths, weights):
    w = z * np.exp(1j * theta)
    total = np.zeros(theta.shape[0])
    for j in range(coeffs.shape[0]):
        if weights[j] == 0.0:
            continue
        fw = np.zeros_like(w)
        for k in range(lengths[j] - 1, -1, -1):
            fw = fw * w + coeffs[j, k]
        with np.errstate(divide="ignore"):
            total = total + weights[j] * np.log(np.abs(fw))
    return total


@njit(cache=True)
def circle_log_modulus_numba(theta, z, coeffs, lengths, weights):
    out = np.zeros(theta.shape[0])
    for i in range(theta.shape[0]):
        w = z * np.exp(1j * theta[i])
        s = 0.0
        for j in range(coeffs.shape[0]):
            if weights[j] == 0.0:
                continue
            acc = 0j
            for k in range(lengths[j] - 1, -1, -1):
                acc = acc * w + coeffs[j, k]
            s += weights[j] * np.log(np.abs(acc))
        out[i] = s
    return out


# ---------------------------------------------------------------------------
# dispatch

if USE_NUMBA:
    circle_integrand = circle_integrand_numba
    circle_log_modulus = circle_log_modulus_numba
else:
    circle_integrand = circle_integrand_numpy
    circle_log_modulus = circle_log_modulus_numpy


def pack_polys(polys):
    """Padded complex coefficient matrix and row lengths for a list of polynomials."""
    arrays = [p.as_array(complex) for p in polys]
    width = max((len(a) for a in arrays), default=1)
    coeffs = np.zeros((len(arrays), width), dtype=np.complex128)
    lengths = np.zeros(len(arrays), dtype=np.int64)
    for j, a in enumerate(arrays):
        coeffs[j, : len(a)] = a
        lengths[j] = len(a)
    return coeffs, lengths
