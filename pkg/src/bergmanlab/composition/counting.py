"""Generalized Nevanlinna counting functions ``N_{phi, v*}``."""
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy.interpolate import CubicSpline

from ..errors import DomainError, UnsupportedForm
from ..geometry import rho
from ..numerics.quadrature import gauss_legendre, toward_zero_rule
from ..numerics.winding import count_preimages

MIN_MODULUS = 1e-6
BISECTION_RESOLUTION = 1e-10
SCAN_RADII = 1 - np.geomspace(1.0, 1e-9, 65)[1:]   # jump scan for winding counts


class CountingFunction:
    """``N_{phi, v*}(z) = sum_{phi(zeta) = z} v*(zeta)`` for a self-map and radial weight.

    Evaluations are pure; the per-point cache only stores results.
    """

    def __init__(self, phi, weight):
        self.map = phi
        self.weight = weight
        self._cache = {}

    def __call__(self, z):
        """Pointwise value; direct sum when preimages are explicit, else the integral form."""
        z = complex(z)
        if z not in self._cache:
            if self.map.has_preimages and self.map.form != "lens":
                self._cache[z] = counting_direct(self, z)
            else:
                self._cache[z] = counting_integral(self, z)
        return self._cache[z]

    def values(self, z, exact=False):
        """Vectorized values at an array of points (0 where no preimage).

        Uses an interpolated star functional unless ``exact``; non-explicit
        maps fall back to pointwise :func:`counting_integral`.
        """
        z = np.asarray(z, complex)
        flat = z.ravel()
        if not self.map.has_preimages:
            out = np.array([counting_integral(self, complex(p)) for p in flat])
            return out.reshape(z.shape)
        pre = self.map.preimage_array(flat)
        mod = np.abs(pre)
        ok = np.isfinite(mod) & (mod > 0)
        star = np.zeros_like(mod)
        if ok.any():
            f = self.weight.star if exact else star_table(self.weight)
            star[ok] = f(mod[ok])
        return star.sum(axis=1).reshape(z.shape)


def _check_point(cf, z, op):
    if not abs(z) < 1:
        raise DomainError("z must lie in the unit disc", op)
    if abs(z) < MIN_MODULUS:
        raise DomainError("|z| must be at least 1e-6", op)
    if abs(z - cf.map.phi0) < 1e-14:
        raise DomainError("z equals phi(0)", op)


def counting_direct(cf, z):
    """Sum of ``v*(|zeta|)`` over the preimages ``zeta`` of ``z`` in the disc.

    Raises
    ------
    UnsupportedForm
        For lens maps and composition chains (use :func:`counting_integral`).
    """
    z = complex(z)
    _check_point(cf, z, "counting_direct")
    if not cf.map.has_preimages or cf.map.form == "lens":
        raise UnsupportedForm(f"direct preimage sum unavailable for {cf.map.form!r}",
                              "counting_direct")
    mod = np.abs(cf.map.preimages(z))
    mod = mod[np.isfinite(mod)]
    if np.any(mod == 0):
        raise DomainError("z equals phi(0)", "counting_direct")
    return float(np.sum(cf.weight.star(mod))) if mod.size else 0.0


def jump_radii(phi, z):
    """Radii where ``n(r, z)`` jumps, with multiplicity, in increasing order.

    Explicit maps give the preimage moduli; otherwise ``n(r, z)`` is scanned
    on a radial grid and each jump is located by bisection to 1e-10.
    """
    if phi.has_preimages:
        mod = np.abs(phi.preimages(z))
        return np.sort(mod[np.isfinite(mod)])
    counts = [count_preimages(phi, z, r, method="winding") for r in SCAN_RADII]
    radii = []
    prev_r, prev_n = 0.0, 0
    for r, n in zip(SCAN_RADII, counts):
        if n > prev_n:
            lo, hi, n_lo = prev_r, r, prev_n
            # split the interval until each jump is isolated
            stack = [(lo, hi, n_lo, n)]
            while stack:
                lo, hi, n_lo, n_hi = stack.pop()
                if hi - lo <= BISECTION_RESOLUTION:
                    radii += [0.5 * (lo + hi)] * (n_hi - n_lo)
                    continue
                mid = 0.5 * (lo + hi)
                n_mid = count_preimages(phi, z, mid, method="winding") if mid > 0 else 0
                if n_mid > n_lo:
                    stack.append((lo, mid, n_lo, n_mid))
                if n_hi > n_mid:
                    stack.append((mid, hi, n_mid, n_hi))
        prev_r, prev_n = r, n
    return np.sort(np.array(radii))


def counting_integral(cf, z):
    """``int_{r0}^1 n(r, z) v~(r) dr / r`` with ``v~(r) = int_r^1 v(s) s ds``.

    ``n(., z)`` is a step function, so the value is the sum over jump radii
    ``r_j`` of ``int_{r_j}^1 v~(r) dr / r``; returns 0 without preimages.
    """
    z = complex(z)
    _check_point(cf, z, "counting_integral")
    radii = jump_radii(cf.map, z)
    if radii.size == 0:
        return 0.0
    if radii[0] <= 0:
        raise DomainError("z equals phi(0)", "counting_integral")
    return float(np.sum(tilde_over_r_integral(cf.weight, radii)))


def tilde_over_r_integral(w, rho0):
    """``int_rho^1 w~(r) dr / r`` for each entry of ``rho0``."""
    rho0 = np.atleast_1d(np.asarray(rho0, float))
    out = np.zeros(rho0.size)
    # [rho, 1/2] in t = log(r / rho): smooth, dr / r = dt
    low = rho0 < 0.5
    if low.any():
        x, wx = gauss_legendre(24)
        span = np.log(0.5 / rho0[low])
        edges = np.linspace(0.0, 1.0, 5)
        for a, b in zip(edges[:-1], edges[1:]):
            t = span[:, None] * (a + (b - a) * x[None, :])
            vals = w.tilde(rho0[low, None] * np.exp(t))
            out[low] += (vals * wx[None, :]).sum(axis=1) * (b - a) * span
    # [max(rho, 1/2), 1] in d = 1 - r, panels geometric toward the boundary
    start = np.maximum(rho0, 0.5)
    v, wv, _ = toward_zero_rule(48, 20)
    scale = 1.0 - start
    d = scale[:, None] * v[None, :]
    vals = w._tilde_d(d) / (1.0 - d)
    out += (vals * wv[None, :]).sum(axis=1) * scale
    return out


# --- interpolated star functional ---------------------------------------------------

TABLE_POINTS = 1400
TABLE_RANGE = (-60 * math.log(2), 30.0)   # logit(d) = log(d / (1 - d))


@lru_cache(maxsize=32)
def star_table(w):
    """Spline of ``log w*`` in ``logit(1 - r)``; exact evaluation outside the table."""
    x = np.linspace(*TABLE_RANGE, TABLE_POINTS)
    d = 1.0 / (1.0 + np.exp(-x))
    with np.errstate(divide="ignore"):
        logs = np.log(w._star_d(d))
    keep = np.isfinite(logs)
    spline = CubicSpline(x[keep], logs[keep])
    lo, hi = x[keep][0], x[keep][-1]

    def star(r):
        r = np.asarray(r, float)
        d = 1.0 - r
        with np.errstate(divide="ignore"):
            xr = np.log(d) - np.log(r)
        inside = (xr >= lo) & (xr <= hi)
        out = np.empty_like(r)
        out[inside] = np.exp(spline(xr[inside]))
        if (~inside).any():
            out[~inside] = w.star(r[~inside])
        return out

    return star


# --- Littlewood-type bound -----------------------------------------------------------

@dataclass
class LittlewoodReport:
    """``N(z) - w*(phi_z(phi(0)))`` over the evaluated points."""

    points: np.ndarray
    counting: np.ndarray
    bound: np.ndarray
    max_violation: float
    violations: int
    origin_bound: np.ndarray = None   # w*(z), the bound when phi(0) = 0

    @property
    def holds(self):
        return self.violations == 0


def littlewood_grid(n_radii=32, n_theta=64, r_min=0.02, r_max=0.98):
    r = np.linspace(r_min, r_max, n_radii)
    t = 2 * math.pi * (np.arange(n_theta) + 0.5) / n_theta
    return (r[:, None] * np.exp(1j * t)[None, :]).ravel()


def littlewood_check(cf, grid=None, slack=1e-9):
    """Check ``N_{phi, w*}(z) <= w*(rho(z, phi(0)))`` pointwise.

    Points within 1e-8 of ``phi(0)`` are skipped.  Counting values use the
    exact star functional.
    """
    pts = littlewood_grid() if grid is None else np.asarray(grid, complex).ravel()
    pts = pts[np.abs(pts - cf.map.phi0) > 1e-8]
    pts = pts[np.abs(pts) >= MIN_MODULUS]
    if cf.map.has_preimages:
        n = cf.values(pts, exact=True)
    else:
        n = np.array([counting_integral(cf, complex(p)) for p in pts])
    bound = cf.weight.star(np.asarray(rho(pts, cf.map.phi0), float))
    excess = n - bound
    tol = slack * np.maximum(1.0, np.abs(bound))
    origin = cf.weight.star(np.abs(pts)) if abs(cf.map.phi0) == 0 else None
    return LittlewoodReport(pts, n, bound, float(excess.max()),
                            int(np.count_nonzero(excess > tol)), origin)
