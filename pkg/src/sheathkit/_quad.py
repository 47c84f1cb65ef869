"""Fixed-order Gauss-Legendre helpers used by the kernel integrals.

All integrands in this package are smooth after the analytic substitutions,
so fixed-order panels give near machine-precision results and vectorize
cleanly over batches of evaluation points.
"""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def gl_rule(n: int):
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def gl_panel(f, a, b, n=64):
    """Integrate f over [a, b] with one n-point panel.

    a and b may be scalars or broadcastable arrays; f must accept an array of
    shape (..., n) and is evaluated once.
    """
    x, w = gl_rule(n)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    pts = mid[..., None] + half[..., None] * x
    vals = f(pts)
    return half * (vals * w).sum(axis=-1)


def cumulative_gl(f, nodes, n=8):
    """Cumulative integral of f along a sorted 1-D node array.

    Returns an array c with c[0] = 0 and c[k] = integral from nodes[0] to
    nodes[k], one n-point panel per subinterval.
    """
    nodes = np.asarray(nodes, dtype=float)
    a = nodes[:-1]
    b = nodes[1:]
    pieces = gl_panel(f, a, b, n=n)
    out = np.empty(nodes.shape, dtype=float)
    out[0] = 0.0
    np.cumsum(pieces, out=out[1:])
    return out
