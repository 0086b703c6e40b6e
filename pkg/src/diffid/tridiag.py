"""Tridiagonal direct solve (Thomas algorithm), O(n) per system.

Storage convention:
    lower = [b_1, ..., b_{n-1}]   (sub-diagonal)
    diag  = [a_0, ..., a_{n-1}]
    upper = [c_0, ..., c_{n-2}]   (super-diagonal)

The sweeps run on plain Python floats; converting to lists first is much
faster than indexing numpy scalars in the sequential recurrences.
"""

from __future__ import annotations

import numpy as np


def thomas_solve(lower: np.ndarray, diag: np.ndarray, upper: np.ndarray,
                 rhs: np.ndarray) -> np.ndarray:
    """Solve the tridiagonal system A x = rhs by LU sweep without pivoting.

    Valid for the diagonally dominant matrices produced by the implicit
    diffusion steps; no pivoting means a zero pivot surfaces as inf/nan in
    the result rather than an exception.
    """
    a = np.asarray(diag, dtype=float).tolist()
    b = np.asarray(lower, dtype=float).tolist()
    c = np.asarray(upper, dtype=float).tolist()
    d = np.asarray(rhs, dtype=float).tolist()
    n = len(a)

    try:
        cp = [0.0] * n
        dp = [0.0] * n
        cp[0] = c[0] / a[0]
        dp[0] = d[0] / a[0]
        for i in range(1, n - 1):
            m = a[i] - b[i - 1] * cp[i - 1]
            cp[i] = c[i] / m
            dp[i] = (d[i] - b[i - 1] * dp[i - 1]) / m
        m = a[n - 1] - b[n - 2] * cp[n - 2]
        dp[n - 1] = (d[n - 1] - b[n - 2] * dp[n - 2]) / m

        x = [0.0] * n
        x[n - 1] = dp[n - 1]
        for i in range(n - 2, -1, -1):
            x[i] = dp[i] - cp[i] * x[i + 1]
    except ZeroDivisionError:
        return np.full(n, np.inf)
    return np.array(x)
