"""Two-sided Numerov propagation kernel on a uniform grid.

This is the hot loop of the bound-state solver.  It is compiled with
numba when available; setting the environment variable
``PENNINGRYD_DISABLE_NUMBA=1`` (or any non-empty value other than ``0``)
selects the pure-Python fallback, which is useful for debugging and for
benchmarking the compiled speedup.

The kernel integrates w'' = g(x) w outward from the inner boundary and
inward from the outer boundary, stitches both branches at the matching
index ``m`` with w(m) = 1, and reports

* the stitched wavefunction,
* the number of interior sign changes of the outward branch (node count),
* the Numerov matching residual, which vanishes at an eigenvalue.
"""

from __future__ import annotations

import os

import numpy as np

NUMBA_ENABLED = os.environ.get("PENNINGRYD_DISABLE_NUMBA", "0") in ("", "0")


def _two_sided_py(g, h, w0, w1, m):
    n = g.shape[0]
    w = np.zeros(n)
    c = 1.0 - (h * h / 12.0) * g

    # outward branch, indices 0..m
    w[0] = w0
    w[1] = w1
    nodes = 0
    for i in range(1, m):
        y_next = 2.0 * c[i] * w[i] - c[i - 1] * w[i - 1] + h * h * g[i] * w[i]
        w[i + 1] = y_next / c[i + 1]
        if w[i] != 0.0 and w[i + 1] * w[i] < 0.0:
            nodes += 1
    wm_out = w[m]
    if wm_out == 0.0:
        return w, nodes, np.inf
    ym_minus = c[m - 1] * w[m - 1] / wm_out

    # inward branch, indices n-1..m, started as a decaying tail
    w[n - 1] = 0.0
    w[n - 2] = 1e-30
    for i in range(n - 2, m, -1):
        y_prev = 2.0 * c[i] * w[i] - c[i + 1] * w[i + 1] + h * h * g[i] * w[i]
        w[i - 1] = y_prev / c[i - 1]
    wm_in = w[m]
    if wm_in == 0.0:
        return w, nodes, np.inf
    ym_plus = c[m + 1] * w[m + 1] / wm_in

    # rescale both branches to w(m) = 1 and evaluate the three-point
    # Numerov identity at m; it is zero iff the branches join smoothly
    for i in range(m):
        w[i] /= wm_out
    w[m] = 1.0
    for i in range(m + 1, n):
        w[i] /= wm_in
    fval = ym_minus + ym_plus - 2.0 * c[m] - h * h * g[m]
    return w, nodes, fval


if NUMBA_ENABLED:
    try:
        import numba

        two_sided = numba.njit(cache=True)(_two_sided_py)
    except ImportError:  # pragma: no cover
        NUMBA_ENABLED = False
        two_sided = _two_sided_py
else:
    two_sided = _two_sided_py
