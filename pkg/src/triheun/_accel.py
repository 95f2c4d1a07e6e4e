"""Hot numeric kernels.

Every kernel here is plain Python over numpy arrays. When numba is importable
and ``TRIHEUN_NO_NUMBA`` is unset (or ``0``), they are compiled with ``@njit``;
otherwise the interpreted versions run unchanged. The compiled objects keep
the original function reachable as ``.py_func``, which is what the benchmark
and the kernel-equivalence tests use.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("TRIHEUN_NO_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("numba disabled by TRIHEUN_NO_NUMBA")
    from numba import njit as _njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False
    _njit = None


def kernel(fn):
    if HAS_NUMBA:
        return _njit(cache=False, nogil=True)(fn)
    fn.py_func = fn
    return fn


BACKEND = "numba" if HAS_NUMBA else "numpy"


@kernel
def t1_coefficients(alpha, beta, gamma, n_max):
    """e_0..e_{n_max} of the even-start Taylor solution (y(0)=1, y'(0)=0)."""
    e = np.zeros(n_max + 1)
    e[0] = 1.0
    if n_max >= 2:
        e[2] = -alpha / 2.0
    for n in range(3, n_max + 1):
        e[n] = ((n - 1) * gamma * e[n - 1] - alpha * e[n - 2] - (beta + 6.0 - 3.0 * n) * e[n - 3]) / (n * (n - 1.0))
    return e


@kernel
def t2_coefficients(alpha, beta, gamma, n_max):
    """s_0..s_{n_max}; the series is sum s_n rho^(n+1)."""
    s = np.zeros(n_max + 1)
    s[0] = 1.0
    if n_max >= 1:
        s[1] = gamma / 2.0
    if n_max >= 2:
        s[2] = (gamma * gamma - alpha) / 6.0
    for n in range(3, n_max + 1):
        s[n] = (n * gamma * s[n - 1] - alpha * s[n - 2] - (beta + 3.0 - 3.0 * n) * s[n - 3]) / (n * (n + 1.0))
    return s


@kernel
def w_recurrence(alpha, beta, gamma, w0, w1, w2, n_max):
    """Iterate w_{n+3} = -pi1 w_{n+2} - pi2 w_{n+1} - pi3 w_n from (w0, w1, w2)."""
    w = np.zeros(n_max + 1)
    w[0] = w0
    if n_max >= 1:
        w[1] = w1
    if n_max >= 2:
        w[2] = w2
    for n in range(0, n_max - 2):
        pi1 = -gamma / (n + 3.0)
        pi2 = alpha / ((n + 2.0) * (n + 3.0))
        pi3 = (beta - 3.0 * (n + 1.0)) / ((n + 2.0) * (n + 3.0))
        w[n + 3] = -pi1 * w[n + 2] - pi2 * w[n + 1] - pi3 * w[n]
    return w


@kernel
def series_eval(coeffs, shift, x, eps):
    """Sum c_n x^(n+shift) with its first two derivatives.

    Neumaier-compensated accumulation. Stops at the first index where three
    consecutive terms of all three streams are below eps*(1+|partial|).
    Returns (value, d1, d2, terms_used, converged).
    """
    s0 = 0.0
    s1 = 0.0
    s2 = 0.0
    k0 = 0.0
    k1 = 0.0
    k2 = 0.0
    small = 0
    n_terms = coeffs.shape[0]
    # running powers x^m, x^(m-1), x^(m-2); no division, so tiny x cannot underflow into 0/0
    p0 = 1.0
    for _ in range(shift):
        p0 *= x
    p1 = 0.0
    p2 = 0.0
    if shift >= 1:
        p1 = 1.0
        for _ in range(shift - 1):
            p1 *= x
    if shift >= 2:
        p2 = 1.0
        for _ in range(shift - 2):
            p2 *= x
    for n in range(n_terms):
        m = n + shift
        c = coeffs[n]
        t0 = c * p0
        t1 = m * c * p1
        t2 = m * (m - 1.0) * c * p2
        if not (abs(t0) < 1e300 and abs(t1) < 1e300 and abs(t2) < 1e300):
            # diverging far outside the useful radius; report non-convergence
            return s0 + k0, s1 + k1, s2 + k2, n, False
        # Neumaier steps
        u = s0 + t0
        if abs(s0) >= abs(t0):
            k0 += (s0 - u) + t0
        else:
            k0 += (t0 - u) + s0
        s0 = u
        u = s1 + t1
        if abs(s1) >= abs(t1):
            k1 += (s1 - u) + t1
        else:
            k1 += (t1 - u) + s1
        s1 = u
        u = s2 + t2
        if abs(s2) >= abs(t2):
            k2 += (s2 - u) + t2
        else:
            k2 += (t2 - u) + s2
        s2 = u
        if (
            abs(t0) <= eps * (1.0 + abs(s0 + k0))
            and abs(t1) <= eps * (1.0 + abs(s1 + k1))
            and abs(t2) <= eps * (1.0 + abs(s2 + k2))
        ):
            small += 1
            if small >= 3:
                return s0 + k0, s1 + k1, s2 + k2, n + 1, True
        else:
            small = 0
        p2 = p1
        p1 = p0
        p0 *= x
    return s0 + k0, s1 + k1, s2 + k2, n_terms, False


@kernel
def numerov_nodes(kk, h):
    """Left-to-right Numerov sweep of y'' = -kk y with y(x_0)=0.

    Returns the number of sign changes strictly inside the grid and the
    (renormalized) final value. kk = E - P on the grid.
    """
    n = kk.shape[0]
    f = 1.0 + h * h * kk / 12.0
    y_prev = 0.0
    y = 1e-30
    nodes = 0
    for i in range(1, n - 1):
        y_next = ((12.0 - 10.0 * f[i]) * y - f[i - 1] * y_prev) / f[i + 1]
        if i + 1 < n - 1 and y_next * y < 0.0:
            nodes += 1
        y_prev = y
        y = y_next
        a = abs(y)
        if a > 1e150:
            y /= a
            y_prev /= a
    return nodes, y


@kernel
def numerov_match(kk, h, m):
    """Normalized discrete Casoratian mismatch at index m.

    The left solution starts at index 0, the right one at index n-1; both are
    Numerov sweeps toward m. Zero exactly at eigenvalues of the discrete
    problem.
    """
    n = kk.shape[0]
    f = 1.0 + h * h * kk / 12.0
    # left sweep up to m+1
    yl_prev = 0.0
    yl = 1e-30
    for i in range(1, m + 1):
        y_next = ((12.0 - 10.0 * f[i]) * yl - f[i - 1] * yl_prev) / f[i + 1]
        yl_prev = yl
        yl = y_next
        a = abs(yl)
        if a > 1e150:
            yl /= a
            yl_prev /= a
    # yl_prev ~ index m, yl ~ index m+1
    ul_m = f[m] * yl_prev
    ul_m1 = f[m + 1] * yl
    # right sweep down to m
    yr_prev = 0.0
    yr = 1e-30
    for i in range(n - 2, m, -1):
        y_next = ((12.0 - 10.0 * f[i]) * yr - f[i + 1] * yr_prev) / f[i - 1]
        yr_prev = yr
        yr = y_next
        a = abs(yr)
        if a > 1e150:
            yr /= a
            yr_prev /= a
    # yr_prev ~ index m+1, yr ~ index m
    ur_m = f[m] * yr
    ur_m1 = f[m + 1] * yr_prev
    num = ul_m * ur_m1 - ul_m1 * ur_m
    den = np.sqrt((ul_m * ul_m + ul_m1 * ul_m1) * (ur_m * ur_m + ur_m1 * ur_m1))
    return num / den
