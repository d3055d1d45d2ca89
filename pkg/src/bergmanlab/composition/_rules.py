"""Fixed tensor cubatures on sectors, refined toward the outer radius and an anchor angle."""
import math

import numpy as np

from ..numerics.quadrature import gauss_legendre, toward_zero_rule

TWO_PI = 2 * math.pi


def _toward(length, levels, order):
    """Nodes in (0, length] geometric toward 0, with weights."""
    v, wv, _ = toward_zero_rule(levels, order)
    return length * v, length * wv


def sector_rule(r0, r1, t0, t1, anchor=None, levels=40, order=12, angular_levels=40):
    """Points and ``dA`` weights for ``r0 <= |z| < r1``, ``t0 <= arg z < t1``.

    Radial panels are geometric toward ``r1``.  Angular panels are geometric
    toward ``anchor`` on both sides (a single Gauss panel set when None).
    """
    d, wd = _toward(r1 - r0, levels, order)
    rho = r1 - d
    if anchor is None:
        x, wx = gauss_legendre(order)
        edges = np.linspace(t0, t1, 17)
        h = np.diff(edges)[:, None]
        t = (edges[:-1, None] + h * x[None, :]).ravel()
        wt = (h * wx[None, :]).ravel()
    else:
        right, wr = _toward(t1 - anchor, angular_levels, order)
        left, wl = _toward(anchor - t0, angular_levels, order)
        t = np.concatenate([anchor + right, anchor - left])
        wt = np.concatenate([wr, wl])
    z = rho[:, None] * np.exp(1j * t)[None, :]
    w = (wd * rho)[:, None] * wt[None, :] / math.pi
    return z.ravel(), w.ravel()


def anchored_disc_rule(anchors, **kw):
    """Whole-disc rule whose angular panels cluster at each anchor angle.

    The circle is split at the midpoints between consecutive anchors.
    """
    a = np.sort(np.mod(np.atleast_1d(np.asarray(anchors, float)), TWO_PI))
    if a.size > 1:
        keep = np.concatenate([[True], np.diff(a) > 1e-9])
        a = a[keep]
        if TWO_PI - (a[-1] - a[0]) <= 1e-9:
            a = a[:-1]
    if a.size == 1:
        return sector_rule(0.0, 1.0, a[0] - math.pi, a[0] + math.pi, anchor=a[0], **kw)
    nxt = np.append(a[1:], a[0] + TWO_PI)
    prv = np.insert(a[:-1], 0, a[-1] - TWO_PI)
    parts = [sector_rule(0.0, 1.0, 0.5 * (p + c), 0.5 * (c + n), anchor=c, **kw)
             for p, c, n in zip(prv, a, nxt)]
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def euclidean_disc_rule(center, radius, n_radial=24, n_theta=64):
    """Gauss (radial) times trapezoid (angular) rule on a Euclidean disc."""
    x, wx = gauss_legendre(n_radial // 2)
    edges = np.array([0.0, 0.5, 1.0]) * radius
    h = np.diff(edges)[:, None]
    rho = (edges[:-1, None] + h * x[None, :]).ravel()
    wr = (h * wx[None, :]).ravel()
    t = TWO_PI * np.arange(n_theta) / n_theta
    z = center + rho[:, None] * np.exp(1j * t)[None, :]
    w = (wr * rho)[:, None] * np.full(n_theta, TWO_PI / n_theta)[None, :] / math.pi
    return z.ravel(), w.ravel()


def cut_radial_rule(eps, order=10):
    """Radii in ``[0, 1 - eps]`` on panels ``d in [2^-(k+1), 2^-k]`` clipped at ``eps``."""
    x, wx = gauss_legendre(order)
    hi = [1.0]
    while hi[-1] / 2 > eps:
        hi.append(hi[-1] / 2)
    hi = np.array(hi)
    lo = np.maximum(hi / 2, eps)
    h = (hi - lo)[:, None]
    d = (lo[:, None] + h * x[None, :]).ravel()
    wd = (h * wx[None, :]).ravel()
    return 1.0 - d, wd
