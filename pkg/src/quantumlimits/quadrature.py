"""Globally adaptive Gauss-Kronrod (7/15) quadrature of vector integrands.

All components share one partition, so quantities averaged together are
averaged on identical nodes.  The panel with the largest error relative to
its component tolerance is bisected until every component meets

    err_j <= rtol * integral |f_j|

The partition logic is mirrored by the compiled kernel in ``_kernels.pyx``;
keep the two in step.
"""
from dataclasses import dataclass

import numpy as np

from .errors import QuadratureError

MAX_EVALS = 2 ** 20
RTOL = 1e-8

# QUADPACK qk15 abscissae/weights; Gauss points are the odd entries.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
KRONROD = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
GAUSS = np.zeros(15)
GAUSS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:3], [_WG[3]], _WG[2::-1]])

TINY = 1e-300


@dataclass(frozen=True)
class Rule:
    """Final partition: plain ``dx`` weights on the Kronrod nodes."""

    nodes: np.ndarray
    weights: np.ndarray
    integrals: np.ndarray
    errors: np.ndarray
    n_evals: int

    def integrate(self, values):
        return np.asarray(values) @ self.weights


def _panel_nodes(a, b):
    c, h = 0.5 * (a + b), 0.5 * (b - a)
    return c + h * NODES, h


def adaptive_rule(f, breakpoints, rtol=RTOL, max_evals=MAX_EVALS):
    """Integrate ``f`` over ``[breakpoints[0], breakpoints[-1]]``.

    ``f`` maps a 1-d array of abscissae to an array of shape ``(k, n)``.
    Returns a :class:`Rule` whose nodes/weights reproduce the integrals and
    can be reused for other functions on the same partition.
    """
    edges = np.asarray(breakpoints, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("breakpoints must be strictly increasing, at least two")
    n = edges.size - 1
    lo, hi = edges[:-1], edges[1:]
    K, E, A = _evaluate_panels(f, lo, hi)
    evals = 15 * n
    while True:
        tol = np.maximum(rtol * A.sum(axis=0), TINY)
        err = E.sum(axis=0)
        if np.all(err <= tol):
            break
        if evals + 30 > max_evals:
            achieved = float(np.max(err / np.maximum(A.sum(axis=0), TINY)))
            raise QuadratureError(
                f"quadrature did not converge in {evals} evaluations: "
                f"achieved relative error {achieved:.2e}, requested {rtol:.1e}",
                achieved=achieved)
        i = int(np.argmax(np.max(E / tol, axis=1)))
        a, b = lo[i], hi[i]
        m = 0.5 * (a + b)
        if not (a < m < b):
            achieved = float(np.max(err / np.maximum(A.sum(axis=0), TINY)))
            raise QuadratureError(
                f"panel [{a:.17g}, {b:.17g}] cannot be subdivided further; "
                f"achieved relative error {achieved:.2e}", achieved=achieved)
        k2, e2, a2 = _evaluate_panels(f, np.array([a, m]), np.array([m, b]))
        evals += 30
        lo = np.concatenate([lo[:i], [a, m], lo[i + 1:]])
        hi = np.concatenate([hi[:i], [m, b], hi[i + 1:]])
        K = np.concatenate([K[:i], k2, K[i + 1:]])
        E = np.concatenate([E[:i], e2, E[i + 1:]])
        A = np.concatenate([A[:i], a2, A[i + 1:]])
    nodes = np.concatenate([_panel_nodes(a, b)[0] for a, b in zip(lo, hi)])
    weights = np.concatenate([0.5 * (b - a) * KRONROD for a, b in zip(lo, hi)])
    return Rule(nodes, weights, K.sum(axis=0), E.sum(axis=0), evals)


def _evaluate_panels(f, lo, hi):
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    x = (c[:, None] + h[:, None] * NODES[None, :]).ravel()
    y = np.asarray(f(x), dtype=float)
    if y.ndim == 1:
        y = y[None, :]
    if not np.all(np.isfinite(y)):
        bad = x[np.argmax(~np.all(np.isfinite(y), axis=0))]
        raise QuadratureError(f"integrand is not finite at x={bad:.6g}")
    y = y.reshape(y.shape[0], lo.size, 15)
    k = np.einsum("jpn,n->pj", y, KRONROD) * h[:, None]
    g = np.einsum("jpn,n->pj", y, GAUSS) * h[:, None]
    a = np.einsum("jpn,n->pj", np.abs(y), KRONROD) * h[:, None]
    return k, np.abs(k - g), a


def integrate(f, a, b, rtol=RTOL, max_evals=MAX_EVALS, points=()):
    """Scalar convenience wrapper around :func:`adaptive_rule`."""
    edges = sorted({float(a), float(b), *(p for p in points if a < p < b)})
    rule = adaptive_rule(lambda x: np.atleast_2d(f(x)), edges, rtol, max_evals)
    return float(rule.integrals[0])
