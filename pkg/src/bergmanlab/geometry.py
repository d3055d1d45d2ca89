"""Disc geometry: pseudohyperbolic metric, dyadic rectangles, Carleson boxes,
separated lattices and the non-tangential maximal function."""
from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy.ndimage import maximum_filter1d

from .errors import ConstructionFailed, DomainError, EmptyRegion
from .numerics.quadrature import PolarPatch

TWO_PI = 2 * math.pi


def rho(z, w):
    """Pseudohyperbolic distance ``|z - w| / |1 - conj(w) z|``."""
    z = np.asarray(z, complex)
    w = np.asarray(w, complex)
    out = np.abs(z - w) / np.abs(1 - np.conj(w) * z)
    return float(out) if out.ndim == 0 else out


def mobius(a, z):
    """Involutive automorphism ``(a - z) / (1 - conj(a) z)``."""
    a = complex(a)
    z = np.asarray(z, complex)
    out = (a - z) / (1 - a.conjugate() * z)
    return complex(out) if out.ndim == 0 else out


def _check_point(a, op):
    a = complex(a)
    if not abs(a) < 1:
        raise DomainError("point must lie in the open unit disc", op)
    return a


# --- regions -------------------------------------------------------------------

@dataclass(frozen=True)
class EuclideanDisc:
    center: complex
    radius: float

    def contains(self, z):
        return np.abs(np.asarray(z) - self.center) < self.radius

    def polar_patch(self):
        return PolarPatch(self.center, 0.0, self.radius)


class PseudoHyperbolicDisc(EuclideanDisc):
    """``Delta(a, r) = {z : rho(a, z) < r}``, stored as its Euclidean disc."""

    def __init__(self, a, r):
        a = _check_point(a, "PseudoHyperbolicDisc")
        if not 0 < r < 1:
            raise DomainError("radius must lie in (0, 1)", "PseudoHyperbolicDisc")
        t = 1 - r * r * abs(a) ** 2
        super().__init__((1 - r * r) * a / t, r * (1 - abs(a) ** 2) / t)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "r", float(r))

    def contains(self, z):
        return np.asarray(rho(self.a, z)) < self.r

    def __repr__(self):
        return f"PseudoHyperbolicDisc(a={self.a}, r={self.r})"


@dataclass(frozen=True)
class AnnularSector:
    """``{z : r0 <= |z| < r1, t0 <= arg z < t1}`` with angles in radians."""

    r0: float
    r1: float
    t0: float
    t1: float

    def contains(self, z):
        z = np.asarray(z, complex)
        m = np.abs(z)
        t = np.mod(np.angle(z) - self.t0, TWO_PI)
        return (m >= self.r0) & (m < self.r1) & (t < self.t1 - self.t0)

    def polar_patch(self):
        return PolarPatch(0j, self.r0, self.r1, self.t0, self.t1)

    def weighted_measure(self, w):
        """``int w dA`` over the sector for a radial weight ``w``."""
        tail = w.tilde(self.r0) - (w.tilde(self.r1) if self.r1 < 1 else 0.0)
        return (self.t1 - self.t0) / (2 * math.pi) * 2 * tail


class CarlesonBox(AnnularSector):
    """``S(a)``: radii ``|a| <= |z| < 1`` and angles within ``(1-|a|)/2`` of ``arg a``.

    Its weighted area is ``(1 - |a|) / pi * int_{|a|}^1 w(s) s ds``.
    """

    def __init__(self, a):
        a = complex(a)
        if not 0 < abs(a) < 1:
            raise DomainError("Carleson box needs 0 < |a| < 1", "carleson_box")
        half = 0.5 * (1 - abs(a))
        theta = math.atan2(a.imag, a.real)
        super().__init__(abs(a), 1.0, theta - half, theta + half)
        object.__setattr__(self, "a", a)


def carleson_box(a):
    return CarlesonBox(a)


@dataclass(frozen=True)
class DyadicRectangle(AnnularSector):
    """``R(I_{n,k})``: radii ``[1 - 2^-n, 1 - 2^-(n+1))`` over the k-th arc of length ``2 pi 2^-n``."""

    level: int = 0
    index: int = 0

    @property
    def center(self):
        if self.level == 0:
            return 0.5 + 0j
        mid = 0.5 * (self.t0 + self.t1)
        return (1 - 2.0 ** -self.level) * complex(math.cos(mid), math.sin(mid))


def _rectangle(n, k):
    arc = TWO_PI * 2.0 ** -n
    return DyadicRectangle(1 - 2.0 ** -n, 1 - 2.0 ** -(n + 1), k * arc, (k + 1) * arc, n, k)


class DyadicDecomposition:
    """Dyadic polar rectangles of levels ``0..max_level``.

    Level ``n`` holds ``2**n`` rectangles, so there are ``2**(max_level+1) - 1``
    in total; their union is ``|z| < 1 - 2**-(max_level+1)``.
    """

    def __init__(self, max_level):
        if not 0 <= int(max_level) <= 24:
            raise DomainError("max_level must lie in [0, 24]", "dyadic_decomposition")
        self.max_level = int(max_level)

    def __len__(self):
        return 2 ** (self.max_level + 1) - 1

    def __iter__(self):
        for n in range(self.max_level + 1):
            for k in range(2 ** n):
                yield _rectangle(n, k)

    @property
    def rectangles(self):
        return list(self)

    def level(self, n):
        return [_rectangle(n, k) for k in range(2 ** n)]

    def centers(self, n):
        """Array of the centers of level ``n``."""
        if n == 0:
            return np.array([0.5 + 0j])
        k = np.arange(2 ** n)
        return (1 - 2.0 ** -n) * np.exp(1j * TWO_PI * (k + 0.5) / 2 ** n)

    def locate(self, z):
        """The rectangle containing ``z``."""
        z = complex(z)
        m = abs(z)
        if m >= 1 - 2.0 ** -(self.max_level + 1):
            raise DomainError("point lies beyond the deepest level", "locate")
        n = 0 if m < 0.5 else int(math.floor(-math.log2(1 - m)))
        # guard rounding at level boundaries
        while n < self.max_level and m >= 1 - 2.0 ** -(n + 1):
            n += 1
        while n > 0 and m < 1 - 2.0 ** -n:
            n -= 1
        t = math.atan2(z.imag, z.real) % TWO_PI
        k = min(int(t / (TWO_PI * 2.0 ** -n)), 2 ** n - 1)
        return _rectangle(n, k)


def dyadic_decomposition(n_max):
    return DyadicDecomposition(n_max)


# --- lattices -----------------------------------------------------------------------

@dataclass(frozen=True)
class Lattice:
    delta: float
    points: np.ndarray
    coverage_radius: float

    def __len__(self):
        return self.points.size


def _angle_for_separation(r, delta):
    """Angle ``t`` with ``rho(r, r e^{it}) = delta`` (pi when unattainable)."""
    # rho^2 = 2 r^2 (1 - cos t) / (1 - 2 r^2 cos t + r^4); solve for cos t
    r2 = r * r
    c = (2 * r2 - delta ** 2 * (1 + r2 * r2)) / (2 * r2 * (1 - delta ** 2))
    if c <= -1:
        return math.pi
    return math.acos(min(c, 1.0))


def delta_lattice(delta, coverage_radius=1 - 2.0 ** -6, check_points=2000, seed=0):
    """Greedy separated net on concentric circles.

    Circles are spaced at pseudohyperbolic distance ``delta``; on each circle
    the points are evenly spaced with neighbours at most ``delta`` apart.
    Separation (pairwise ``rho >= delta/5``) is verified exhaustively and the
    net property (every point of ``|z| <= coverage_radius`` within ``5 delta``)
    on the dyadic centers and on seeded random points.
    """
    if not 0.05 < delta < 0.9:
        raise DomainError("delta must lie in (0.05, 0.9)", "delta_lattice")
    if not 0 < coverage_radius < 1:
        raise DomainError("coverage radius must lie in (0, 1)", "delta_lattice")
    pts = [np.zeros(1, complex)]
    r, j = 0.0, 0
    while r < coverage_radius:
        r = (r + delta) / (1 + delta * r)
        j += 1
        m = max(1, math.ceil(TWO_PI / _angle_for_separation(r, delta)))
        offset = (j % 2) * math.pi / m
        pts.append(r * np.exp(1j * (offset + TWO_PI * np.arange(m) / m)))
    points = np.concatenate(pts)
    lat = Lattice(float(delta), points, float(coverage_radius))
    _verify_lattice(lat, check_points, seed)
    return lat


def _verify_lattice(lat, check_points, seed):
    p = lat.points
    sep = math.inf
    for lo in range(0, p.size, 512):
        block = p[lo:lo + 512, None]
        dist = np.abs(block - p[None, :]) / np.abs(1 - np.conj(p[None, :]) * block)
        idx = np.arange(lo, lo + block.shape[0])
        dist[np.arange(block.shape[0]), idx] = np.inf
        sep = min(sep, float(dist.min()))
    if sep < lat.delta / 5:
        raise ConstructionFailed(f"separation {sep:.3g} below delta/5", "delta_lattice")
    rng = np.random.default_rng(seed)
    radius = lat.coverage_radius * np.sqrt(rng.random(check_points))
    probes = [radius * np.exp(1j * TWO_PI * rng.random(check_points))]
    n = 0
    while 1 - 2.0 ** -n <= lat.coverage_radius:
        probes.append(DyadicDecomposition(max(n, 0)).centers(n))
        n += 1
    probes = np.concatenate(probes)
    worst = 0.0
    for lo in range(0, probes.size, 512):
        z = probes[lo:lo + 512, None]
        dist = np.abs(z - p[None, :]) / np.abs(1 - np.conj(p[None, :]) * z)
        worst = max(worst, float(dist.min(axis=1).max()))
    if worst >= 5 * lat.delta:
        raise ConstructionFailed(f"net property fails (gap {worst:.3g})", "delta_lattice")


# --- non-tangential maximal function ----------------------------------------------

MIN_VERTEX_RADIUS = 0.05


def nontangential_max(values, radii, n_theta=None):
    """Non-tangential maximal function of a function sampled on a polar grid.

    Parameters
    ----------
    values : array_like, shape (len(radii), n_theta)
        Samples at ``radii[i] * exp(2 pi i j / n_theta)``.
    radii : array_like
        Increasing radii.

    Returns
    -------
    ndarray
        ``N(g)(zeta) = sup |g|`` over grid points of the cone
        ``{z : |arg zeta - arg z| < (1 - |z|/|zeta|)/2}`` together with the
        vertex; ``nan`` for vertices with ``|zeta| < 0.05``.  A vertex whose
        cone holds no other grid point triggers an :class:`EmptyRegion`
        warning.
    """
    g = np.abs(np.asarray(values, float))
    radii = np.asarray(radii, float)
    if g.ndim != 2 or g.shape[0] != radii.size:
        raise DomainError("values must have shape (len(radii), n_theta)", "nontangential_max")
    if np.any(np.diff(radii) <= 0):
        raise DomainError("radii must increase", "nontangential_max")
    nt = g.shape[1]
    step = TWO_PI / nt
    out = np.full_like(g, np.nan)
    empty = 0
    for i, r in enumerate(radii):
        if r < MIN_VERTEX_RADIUS:
            continue
        best = g[i].copy()
        seen = False
        for jj in range(i):
            half = 0.5 * (1 - radii[jj] / r)
            k = math.ceil(half / step) - 1  # indices with |m step| < half
            if k < 0:
                continue
            seen = True
            size = min(2 * k + 1, nt)
            best = np.maximum(best, maximum_filter1d(g[jj], size=size, mode="wrap"))
        if not seen:
            empty += 1
        out[i] = best
    if empty:
        warnings.warn(f"{empty} cone(s) contain no grid point besides the vertex",
                      EmptyRegion, stacklevel=2)
    return out
