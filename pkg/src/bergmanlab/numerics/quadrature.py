"""Adaptive and composite Gauss-Legendre rules on intervals and polar patches.

All area integrals use the normalized measure dA = dx dy / pi, so the unit
disc has area one.
"""
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from ..errors import NonConvergence


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 4000
    boundary_offset: float = 1e-4

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise ValueError("tolerances must be positive")
        if not 0 < self.boundary_offset < 0.5:
            raise ValueError("boundary_offset must lie in (0, 0.5)")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")

    def tolerance(self, value):
        return max(self.abs_tol, self.rel_tol * abs(value))


DEFAULT_SPEC = QuadratureSpec()
BOUNDARY_OFFSETS = (1e-3, 3e-4, 1e-4)


@lru_cache(maxsize=None)
def gauss_legendre(order):
    """Nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def _apply(f, x):
    y = np.asarray(f(x), dtype=float)
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape)
    return y


def _panel_sums(f, a, b, order):
    """15-point rule on each panel [a_i, b_i] (vectorized over panels)."""
    x, w = gauss_legendre(order)
    h = (b - a)[:, None]
    nodes = a[:, None] + h * x[None, :]
    vals = _apply(f, nodes.ravel()).reshape(nodes.shape)
    return (vals * w[None, :]).sum(axis=1) * h[:, 0]


def adaptive_gl(f, a, b, abs_tol=1e-12, rel_tol=1e-10, max_subdivisions=4000,
                breakpoints=None, order=15):
    """Adaptive composite Gauss-Legendre quadrature of a vectorized ``f``.

    Each panel is compared with the sum over its two halves; panels whose
    discrepancy exceeds their share of the tolerance are bisected.

    Returns
    -------
    value, error : float
        Estimate and the summed panel discrepancies.
    """
    if b == a:
        return 0.0, 0.0
    if b < a:
        value, err = adaptive_gl(f, b, a, abs_tol, rel_tol, max_subdivisions,
                                 breakpoints, order)
        return -value, err
    edges = np.array([a, b] if breakpoints is None else
                     sorted({a, b, *[p for p in breakpoints if a < p < b]}), float)
    lo, hi = edges[:-1], edges[1:]
    splits = 0
    while True:
        mid = 0.5 * (lo + hi)
        whole = _panel_sums(f, lo, hi, order)
        halves = _panel_sums(f, np.concatenate([lo, mid]), np.concatenate([mid, hi]), order)
        n = lo.size
        refined = halves[:n] + halves[n:]
        err = np.abs(whole - refined)
        value = refined.sum()
        total_err = err.sum()
        tol = max(abs_tol, rel_tol * abs(value))
        if total_err <= tol or not np.isfinite(value):
            if not np.isfinite(value):
                raise NonConvergence("integrand not finite", "adaptive_gl", value, total_err)
            return float(value), float(total_err)
        bad = err > tol / max(n, 1) * 0.5
        if not bad.any():
            bad = err >= err.max()
        splits += int(bad.sum())
        if splits > max_subdivisions:
            raise NonConvergence(
                f"subdivision budget exhausted (error {total_err:.3e} > {tol:.3e})",
                "adaptive_gl", float(value), float(total_err))
        lo = np.concatenate([lo[~bad], lo[bad], mid[bad]])
        hi = np.concatenate([hi[~bad], mid[bad], hi[bad]])


def _geometric_breaks(a, upper, count=40):
    """Breakpoints in [a, upper] accumulating geometrically toward ``upper``."""
    d0 = upper - a
    pts = upper - d0 * 0.5 ** np.arange(1, count)
    return [p for p in pts if a < p < upper]


def integrate_radial(f, a, b=1.0, spec=DEFAULT_SPEC, tail=None, return_error=False):
    """Integrate ``f`` over [a, b) with ``b <= 1``.

    When ``b == 1`` the integral is truncated at ``1 - spec.boundary_offset``;
    ``tail`` (a number, or a callable of the cut point) supplies the analytic
    remainder and is added to the result.
    """
    if not a < b or b > 1:
        if a == b:
            return (0.0, 0.0) if return_error else 0.0
        raise ValueError(f"need a < b <= 1, got a={a}, b={b}")
    upper = b
    extra = 0.0
    if b >= 1.0:
        upper = 1.0 - spec.boundary_offset
        if upper <= a:
            raise ValueError("interval lies inside the boundary offset")
        if tail is not None:
            extra = float(tail(upper)) if callable(tail) else float(tail)
    value, err = adaptive_gl(f, a, upper, spec.abs_tol, spec.rel_tol,
                             spec.max_subdivisions,
                             breakpoints=_geometric_breaks(a, upper, 12))
    value += extra
    return (value, err) if return_error else value


def richardson_to_boundary(F, offsets=BOUNDARY_OFFSETS):
    """Extrapolate ``F(offset)`` to offset 0 by polynomial (Neville) extrapolation."""
    xs = list(offsets)
    ys = [float(F(x)) for x in xs]
    n = len(xs)
    p = list(ys)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (xs[i + k] * p[i] - xs[i] * p[i + 1]) / (xs[i + k] - xs[i])
    return p[0]


# --- fixed composite rules used where many integrals share nodes --------------

@lru_cache(maxsize=None)
def toward_zero_rule(levels=48, order=20):
    """Nodes/weights on (0, 1] with panels [2^-(k+1), 2^-k], k < levels.

    Returns (nodes, weights, panel_index).  Integrals of g over (0, 1]
    become sums; the part below 2^-levels is left to the caller.
    """
    x, w = gauss_legendre(order)
    lo = 0.5 ** np.arange(1, levels + 1)
    hi = 2.0 * lo
    h = (hi - lo)[:, None]
    nodes = (lo[:, None] + h * x[None, :]).ravel()
    weights = (h * w[None, :]).ravel()
    panel = np.repeat(np.arange(levels), order)
    return nodes, weights, panel


def integrate_toward_zero(g, scale, levels=48, order=20, extrapolate=True):
    """``int_0^{scale_i} g(d) dd`` for each entry of ``scale``.

    ``g`` receives a 2-D array of distances (len(scale), nodes).  The piece
    below ``scale * 2**-levels`` is estimated from the geometric decay of the
    last two panel contributions.
    """
    scale = np.atleast_1d(np.asarray(scale, float))
    v, wv, panel = toward_zero_rule(levels, order)
    d = scale[:, None] * v[None, :]
    vals = np.asarray(g(d), float) * wv[None, :]
    per_panel = np.zeros((scale.size, levels))
    np.add.at(per_panel, (slice(None), panel), vals)
    total = per_panel.sum(axis=1)
    if extrapolate:
        last, prev = per_panel[:, -1], per_panel[:, -2]
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(prev != 0, last / prev, 0.0)
        ok = (q > 0) & (q < 1)
        total = total + np.where(ok, last * q / np.where(ok, 1 - q, 1), 0.0)
    return total * scale


@lru_cache(maxsize=None)
def unit_interval_rule(levels=44, order=20):
    """Nodes on (0, 1) geometric toward both ends; returns (s, d=1-s, weights, d_cut).

    The remaining piece (1 - d_cut, 1) is left to the caller; the piece
    (0, 2^-levels) is dropped (integrands carry a factor s).
    """
    z, wz, _ = toward_zero_rule(levels, order)
    # near zero: s in [2^-(k+1), 2^-k], k >= 1  (so s <= 1/2)
    mask = z <= 0.5
    s_lo, w_lo = z[mask], wz[mask]
    d_hi, w_hi = z[mask], wz[mask]
    s = np.concatenate([s_lo, 1.0 - d_hi])
    d = np.concatenate([1.0 - s_lo, d_hi])
    w = np.concatenate([w_lo, w_hi])
    return s, d, w, 0.5 ** levels


# --- area integrals -------------------------------------------------------------

class PolarPatch:
    """z = center + rho * exp(i t), rho in [rho0, rho1], t in [t0, t1]."""

    def __init__(self, center=0j, rho0=0.0, rho1=1.0, t0=0.0, t1=2 * math.pi):
        self.center = complex(center)
        self.rho0, self.rho1 = float(rho0), float(rho1)
        self.t0, self.t1 = float(t0), float(t1)

    def polar_patch(self):
        return self


UNIT_DISC = PolarPatch()


def _cell_sums(f, patch, r0, r1, t0, t1, order):
    x, w = gauss_legendre(order)
    hr = (r1 - r0)[:, None, None]
    ht = (t1 - t0)[:, None, None]
    rho = r0[:, None, None] + hr * x[None, :, None]
    t = t0[:, None, None] + ht * x[None, None, :]
    z = patch.center + rho * np.exp(1j * t)
    vals = _apply(f, z.ravel()).reshape(z.shape)
    ww = w[:, None] * w[None, :]
    return (vals * rho * ww[None]).sum(axis=(1, 2)) * (hr * ht)[:, 0, 0] / math.pi


def integrate_disc(f, region=None, spec=DEFAULT_SPEC, r_breaks=None, t_breaks=None,
                   order=8, return_error=False):
    """Adaptive tensor polar cubature of a real, vectorized ``f(z)`` over a region.

    ``region`` is any object with ``polar_patch()`` (the unit disc when None).
    Cells are compared with the sum over their four children and split
    until the summed discrepancy meets the tolerance of ``spec``.
    """
    patch = (region or UNIT_DISC).polar_patch()
    rb = [patch.rho0, patch.rho1]
    if r_breaks is not None:
        rb += [b for b in r_breaks if patch.rho0 < b < patch.rho1]
    elif patch.center == 0 and patch.rho1 > 0.9:
        rb += _geometric_breaks(patch.rho0, patch.rho1, 10)
    rb = np.array(sorted(set(rb)))
    tb = [patch.t0, patch.t1]
    if t_breaks is not None:
        tb += [b for b in t_breaks if patch.t0 < b < patch.t1]
    else:
        tb += list(np.linspace(patch.t0, patch.t1, 9)[1:-1])
    tb = np.array(sorted(set(tb)))
    R0, T0 = np.meshgrid(rb[:-1], tb[:-1], indexing="ij")
    R1, T1 = np.meshgrid(rb[1:], tb[1:], indexing="ij")
    r0, r1, t0, t1 = R0.ravel(), R1.ravel(), T0.ravel(), T1.ravel()
    splits = 0
    while True:
        rm, tm = 0.5 * (r0 + r1), 0.5 * (t0 + t1)
        whole = _cell_sums(f, patch, r0, r1, t0, t1, order)
        cr0 = np.concatenate([r0, r0, rm, rm])
        cr1 = np.concatenate([rm, rm, r1, r1])
        ct0 = np.concatenate([t0, tm, t0, tm])
        ct1 = np.concatenate([tm, t1, tm, t1])
        kids = _cell_sums(f, patch, cr0, cr1, ct0, ct1, order).reshape(4, -1).sum(axis=0)
        err = np.abs(whole - kids)
        value = kids.sum()
        total_err = err.sum()
        tol = spec.tolerance(value)
        if not np.isfinite(value):
            raise NonConvergence("integrand not finite", "integrate_disc", value, total_err)
        if total_err <= tol:
            return (float(value), float(total_err)) if return_error else float(value)
        n = r0.size
        bad = err > 0.5 * tol / n
        if not bad.any():
            bad = err >= err.max()
        splits += int(bad.sum())
        if splits > spec.max_subdivisions:
            raise NonConvergence(
                f"cell budget exhausted (error {total_err:.3e} > {tol:.3e})",
                "integrate_disc", float(value), float(total_err))
        keep = ~bad
        r0 = np.concatenate([r0[keep], r0[bad], r0[bad], rm[bad], rm[bad]])
        r1n = np.concatenate([r1[keep], rm[bad], rm[bad], r1[bad], r1[bad]])
        t0n = np.concatenate([t0[keep], t0[bad], tm[bad], t0[bad], tm[bad]])
        t1 = np.concatenate([t1[keep], tm[bad], t1[bad], tm[bad], t1[bad]])
        r1, t0 = r1n, t0n


def polar_tensor_rule(r0, r1, n_theta, levels=30, order=20, t0=0.0, t1=2 * math.pi):
    """Fixed tensor rule on an annular sector: geometric GL panels toward ``r1``
    in radius, trapezoid (periodic) or GL (sector) in angle.

    Returns points ``z`` and weights for dA (normalized).
    """
    v, wv, _ = toward_zero_rule(levels, order)
    d = (r1 - r0) * v
    rho = r1 - d
    wr = (r1 - r0) * wv
    full = abs((t1 - t0) - 2 * math.pi) < 1e-14
    if full:
        t = t0 + (t1 - t0) * np.arange(n_theta) / n_theta
        wt = np.full(n_theta, (t1 - t0) / n_theta)
    else:
        x, w = gauss_legendre(n_theta)
        t = t0 + (t1 - t0) * x
        wt = (t1 - t0) * w
    z = rho[:, None] * np.exp(1j * t)[None, :]
    weights = (wr * rho)[:, None] * wt[None, :] / math.pi
    return z.ravel(), weights.ravel()
