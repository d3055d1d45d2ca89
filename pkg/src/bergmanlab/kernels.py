"""Reproducing kernels of weighted Bergman and Dirichlet-type spaces.

Kernels are power series ``K_a(z) = sum_m c_m conj(a)^m z^m`` whose
coefficients come from the moments of a weight:

* Bergman space of ``w``: ``c_m = 1 / (2 w_m)``;
* Dirichlet space of ``W`` (norm ``|f(0)|^2 W(D) + int |f'|^2 W dA``):
  ``c_0 = 1 / W(D)`` and ``c_m = 1 / (2 m^2 W_{m-1})``.

Moments of a positive measure are log-convex, so ``W_m / W_{m+1}`` is
nonincreasing; the ratio at the truncation index therefore bounds every later
term ratio and gives a certified geometric tail bound.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.special import poch

from ._trend import EXTENSION_FACTOR, bounded, log_bounded
from .errors import DomainError, HypothesisFailed, NonConvergence, NotIntegrable, SlowConvergence
from .geometry import mobius
from .numerics.quadrature import gauss_legendre
from .numerics.series import SeriesTail, power_series_on_circle
from .weights import RadialWeight, classify_weight, default_grid

MAX_TERMS = 100_000
MAX_ORDER = 6
BAND = 50.0
MEAN_NODES = 4096
MAX_MEAN_NODES = 2 ** 22


class KernelCoefficients:
    """Lazily extended kernel coefficients ``c_m`` of one space."""

    def __init__(self, space, weight):
        if space not in ("bergman", "dirichlet"):
            raise DomainError(f"unknown space {space!r}", "KernelCoefficients")
        self.space = space
        self.weight = weight
        self._c = np.empty(0)
        self._ratio = np.empty(0)

    def _build(self, n):
        mom = self.weight.moments(n + 1)
        if self.space == "bergman":
            c = 1.0 / (2.0 * mom[:n])
            # c_{m+1}/c_m = w_m / w_{m+1}, nonincreasing in m
            ratio = mom[:n] / mom[1:n + 1]
        else:
            m = np.arange(n, dtype=float)
            c = np.empty(n)
            c[0] = 1.0 / (2.0 * mom[0])
            c[1:] = 1.0 / (2.0 * m[1:] ** 2 * mom[:n - 1])
            # bound for c_{k+1}/c_k over k >= m: W_{m-1}/W_m (drops the (k/(k+1))^2 factor)
            ratio = np.empty(n)
            ratio[0] = c[1] / c[0] if n > 1 else 0.0
            ratio[0] = max(ratio[0], mom[0] / mom[1])
            ratio[1:] = mom[:n - 1] / mom[1:n]
        return c, ratio

    def get(self, n):
        """``(c[:n], ratio_bound[:n])``."""
        if n > self._c.size:
            c, ratio = self._build(max(n, 2 * self._c.size))
            self._ratio, self._c = ratio, c  # publish after building
        return self._c[:n], self._ratio[:n]


class KernelSeries:
    """N-th derivative of a reproducing kernel anchored at ``a``.

    Use :meth:`bergman`, :meth:`dirichlet` or :meth:`dirichlet_alpha`.
    The derivative is ``sum_j b_j z^j`` with
    ``b_j = c_{j+N} conj(a)^{j+N} (j+N)!/j!``.
    """

    def __init__(self, coefficients, a, N=0, tol=1e-12, label=""):
        a = complex(a)
        if not abs(a) < 1:
            raise DomainError("anchor must lie in the disc", "KernelSeries")
        if not 0 <= int(N) <= MAX_ORDER:
            raise DomainError(f"derivative order must lie in [0, {MAX_ORDER}]", "KernelSeries")
        self.coefficients = coefficients
        self.a = a
        self.N = int(N)
        self.tol = float(tol)
        self.label = label

    @classmethod
    def bergman(cls, w, a, N=0, tol=1e-12):
        return cls(KernelCoefficients("bergman", w), a, N, tol, "bergman")

    @classmethod
    def dirichlet(cls, w, a, N=0, alpha=0.0, tol=1e-12):
        """Kernel of the Dirichlet space with weight ``(1-r)^-alpha w``."""
        W = w.shifted(-alpha) if alpha else w
        return cls(KernelCoefficients("dirichlet", W), a, N, tol, "dirichlet")

    @classmethod
    def dirichlet_alpha(cls, w, alpha, a, N=0, tol=1e-12):
        """Kernel of the space with norm ``int |f'|^2 (1-r)^-alpha w_star dA``."""
        return cls(KernelCoefficients("dirichlet", star_space_weight(w, alpha)), a, N, tol,
                   "dirichlet_alpha")

    def _terms(self, n):
        c, ratio = self.coefficients.get(n + self.N + 1)
        m = np.arange(self.N, n + self.N)
        falling = poch(m - self.N + 1.0, self.N)  # m!/(m-N)!
        return c[self.N:n + self.N], ratio[self.N:n + self.N], falling, m

    def truncation(self, radius):
        """Number of terms certifying the tail below ``tol`` for ``|z| <= radius``."""
        x = abs(self.a) * radius
        if x == 0:
            return SeriesTail(1, 0.0, True)
        n = 64
        while True:
            c, ratio, falling, m = self._terms(n)
            logt = (np.log(c) + np.log(falling) + m * math.log(abs(self.a))
                    + (m - self.N) * math.log(radius))
            t = np.exp(logt)
            # later term ratios are bounded by the current one
            q = ratio * x * (m + 1.0) / np.maximum(m + 1.0 - self.N, 1.0)
            scale = max(1.0, float(t.sum()))
            with np.errstate(divide="ignore", invalid="ignore"):
                bound = np.where(q < 1, t * q / (1 - q), np.inf)
            ok = np.flatnonzero(bound <= self.tol * scale)
            if ok.size:
                j = int(ok[0])
                return SeriesTail(j + 1, float(bound[j]), True)
            if n >= MAX_TERMS:
                raise SlowConvergence(
                    f"tail bound {bound[-1]:.3e} after {n} terms (|a| r = {x:.6f})",
                    "KernelSeries", float(t.sum()), float(bound[-1]))
            n = min(2 * n, MAX_TERMS)

    def taylor(self, radius=1.0):
        """Coefficients ``b_j`` of the derivative, truncated for ``|z| <= radius``."""
        n = self.truncation(radius).terms_used
        c, _, falling, m = self._terms(n)
        abar = self.a.conjugate()
        with np.errstate(under="ignore"):
            powers = abar ** m if abar != 0 else (m == 0).astype(complex)
        return c * falling * powers

    def __call__(self, z):
        z = np.asarray(z, complex)
        radius = float(np.max(np.abs(z))) if z.size else 0.0
        if radius >= 1:
            raise DomainError("evaluation point must lie in the disc", "KernelSeries")
        b = self.taylor(radius)
        out = np.polynomial.polynomial.polyval(z, b)
        return complex(out) if out.ndim == 0 else out

    def parseval_mean(self, r):
        """``M_2^2(r)`` by Parseval: ``sum |b_j|^2 r^{2j}``."""
        b = self.taylor(r)
        return float(np.sum(np.abs(b) ** 2 * r ** (2 * np.arange(b.size))))


def star_space_weight(w, alpha):
    """The weight ``(1 - r)^-alpha w_star(r)`` of the space carrying ``K^{alpha, w}``."""
    alpha = float(alpha)
    if not alpha < 1:
        raise DomainError("alpha must be below 1", "star_space_weight")
    W = w.star_weight()
    return W.shifted(-alpha) if alpha else W


def bergman_kernel(w, a, z, tol=1e-12):
    """``B^w_a(z) = sum (conj(a) z)^n / (2 w_n)``."""
    _check_pair(a, z, "bergman_kernel")
    return KernelSeries.bergman(w, a, 0, tol)(z)


def dirichlet_kernel_deriv(w, alpha, a, z, N=0, tol=1e-12, star=False):
    """N-th z-derivative of a Dirichlet-type reproducing kernel.

    With ``star=False`` the space weight is ``(1-r)^-alpha w`` (``alpha = 0``
    gives the kernel of the space normed by ``|f(0)|^2 w(D) + int |f'|^2 w``);
    with ``star=True`` it is ``(1-r)^-alpha w_star``, the kernel ``K^{alpha, w}``.
    """
    _check_pair(a, z, "dirichlet_kernel_deriv")
    if not alpha < 1:
        raise DomainError("alpha must be below 1", "dirichlet_kernel_deriv")
    if star:
        k = KernelSeries.dirichlet_alpha(w, alpha, a, N, tol)
    else:
        k = KernelSeries.dirichlet(w, a, N, alpha, tol)
    return k(z)


def _check_pair(a, z, op):
    a, z = complex(a), np.asarray(z, complex)
    if abs(a) >= 1 or np.any(np.abs(z) >= 1):
        raise DomainError("points must lie in the open disc", op)
    if np.any(np.abs(a * z) >= 1 - 1e-6):
        raise SlowConvergence("|a z| too close to 1", op)


# --- means and norms -----------------------------------------------------------------

def integral_mean(k, p, r, n_theta=MEAN_NODES, rtol=1e-8):
    """``M_p^p(r, f) = (1/2pi) int |f(r e^{it})|^p dt``; ``p = inf`` gives ``M_inf``.

    Trapezoidal rule on ``n_theta`` nodes, doubled until two successive
    values agree to ``rtol``.
    """
    if not 0 <= r < 1:
        raise DomainError("radius must lie in [0, 1)", "integral_mean")
    if not p > 0:
        raise DomainError("p must be positive", "integral_mean")
    b = k.taylor(r) if r > 0 else k.taylor(0.0)[:1]
    if r == 0:
        v = abs(b[0]) if b.size else 0.0
        return v if math.isinf(p) else v ** p
    n = n_theta
    prev = None
    while n <= MAX_MEAN_NODES:
        vals = np.abs(power_series_on_circle(b, r, n))
        cur = float(vals.max()) if math.isinf(p) else float(np.mean(vals ** p))
        if prev is not None and abs(cur - prev) <= rtol * abs(cur):
            return cur
        prev = cur
        n *= 2
    raise NonConvergence("angular rule did not stabilize", "integral_mean", prev, None)


def _mean_fn(k, p):
    if p == 2:
        return k.parseval_mean
    return lambda r: integral_mean(k, p, r)


def _radial_integral(mean, density_d, scale, order=10, width=0.5, hat_near_boundary=None):
    """``int_0^1 2 r V(r) F(r) dr`` where ``V(1-d) = density_d(d)``.

    Panels are uniform in ``log(1/d)`` down to ``d = 1e-4 * scale``; below
    that ``F`` is frozen at ``r = 1`` and multiplied by the weight mass
    ``hat_near_boundary(d_min)``.
    """
    d_min = max(1e-4 * scale, 1e-12)
    span = -math.log(d_min)
    n = max(4, int(math.ceil(span / width)))
    x, wx = gauss_legendre(order)
    edges = np.linspace(0.0, span, n + 1)
    y = (edges[:-1, None] + np.diff(edges)[:, None] * x[None, :]).ravel()
    wy = (np.diff(edges)[:, None] * wx[None, :]).ravel()
    d = np.exp(-y)
    vals = np.array([mean(1.0 - di) for di in d])
    total = float(np.sum(wy * d * 2 * (1 - d) * density_d(d) * vals))
    if hat_near_boundary is not None:
        total += 2.0 * mean(1.0 - 1e-15) * hat_near_boundary(d_min)
    return total


def kernel_Lp_norm(k, v, p):
    """``||f||_{A^p_v}^p = int_D |f|^p v dA`` for the kernel derivative ``f``.

    For ``p = 2`` the exact Parseval sum ``sum |b_j|^2 2 v_j`` is used; other
    exponents integrate the means radially, freezing them at the boundary
    below ``1 - 1e-4 (1 - |a|)``.
    """
    if not p > 0:
        raise DomainError("p must be positive", "kernel_Lp_norm")
    if p == 2:
        b = k.taylor(1.0 - 1e-15)
        vm = v.moments(b.size)
        return float(np.sum(np.abs(b) ** 2 * 2 * vm))
    return _radial_integral(_mean_fn(k, p), v._density, 1 - abs(k.a),
                            hat_near_boundary=lambda d: float(v._hat_d(np.array([d]))[0]))


# --- verification of the kernel asymptotics -------------------------------------------

def _log_panel_integral(g, d_lo, order=20, width=0.5):
    """``int_{d_lo}^1 g(u) du`` with panels uniform in ``log(1/u)``."""
    span = -math.log(d_lo)
    if span <= 0:
        return 0.0
    n = max(2, int(math.ceil(span / width)))
    x, wx = gauss_legendre(order)
    edges = np.linspace(0.0, span, n + 1)
    y = (edges[:-1, None] + np.diff(edges)[:, None] * x[None, :]).ravel()
    wy = (np.diff(edges)[:, None] * wx[None, :]).ravel()
    u = np.exp(-y)
    return float(np.sum(wy * u * g(u)))


@dataclass
class RatioReport:
    """Ratios of a quantity to its predicted size over a radial grid."""

    radii: np.ndarray
    ratio: np.ndarray
    band: float = BAND

    @property
    def range(self):
        return float(np.min(self.ratio)), float(np.max(self.ratio))

    @property
    def in_band(self):
        return bool(np.all(self.ratio >= 1 / self.band) and np.all(self.ratio <= self.band))

    @property
    def stable(self):
        """Log-range over radii <= 0.99 does not grow (beyond the extension factor) up to 0.999."""
        base = self.radii <= 0.99 + 1e-12
        if base.sum() < 2 or base.all():
            return True
        lr = np.log(self.ratio)
        grow = (lr.max() - lr.min()) - (lr[base].max() - lr[base].min())
        return bool(grow <= math.log(EXTENSION_FACTOR))

    @property
    def holds(self):
        return self.in_band and self.stable


@dataclass
class Theorem21Report:
    means: RatioReport
    norms: RatioReport
    local: RatioReport | None
    hypothesis_holds: bool


def default_anchor_grid():
    return np.array([0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.97, 0.98, 0.99, 0.995, 0.998, 0.999])


def verify_theorem21(w, v, p, N, a_grid=None):
    """Compare kernel means and norms with their integral predictions.

    For each ``|a|`` in the grid (with ``r = |a|`` for the means)::

        M_p^p(r, K_a^(N))        vs  int_0^{|a| r} dt / (hat_w(t)^p (1-t)^{p(N-1)})
        ||K_a^(N)||_{A^p_v}^p     vs  int_0^{|a|} hat_v(t) / (hat_w(t)^p (1-t)^{p(N-1)}) dt

    When the integral of the second line is dominated by its local value
    ``hat_v(a) / (hat_w(a)^p (1-|a|)^{p(N-1)-1})`` on the grid, the norms are
    also compared with that local value.
    """
    a_grid = default_anchor_grid() if a_grid is None else np.asarray(a_grid, float)
    if np.any(a_grid < 0.5) or np.any(a_grid >= 1):
        raise DomainError("anchor radii must lie in [0.5, 1)", "verify_theorem21")
    e = p * (N - 1)

    def rhs_means(x):
        return _log_panel_integral(lambda u: np.exp(-p * w._log_hat_d(u)) * u ** -e, 1 - x)

    def rhs_norms(x):
        return _log_panel_integral(lambda u: v._hat_d(u) * np.exp(-p * w._log_hat_d(u)) * u ** -e,
                                   1 - x)

    def local(x):
        d = 1 - x
        return float(v._hat_d(np.array([d]))[0] * np.exp(-p * w._log_hat_d(np.array([d]))[0])
                     * d ** (1 - e))

    mean_ratio, norm_ratio, local_ratio, hyp = [], [], [], []
    for x in a_grid:
        k = KernelSeries.dirichlet(w, x, N)
        lhs_m = integral_mean(k, p, x) if p != 2 else k.parseval_mean(x)
        mean_ratio.append(lhs_m / rhs_means(x * x))
        lhs_n = kernel_Lp_norm(k, v, p)
        rn = rhs_norms(x)
        norm_ratio.append(lhs_n / rn)
        loc = local(x)
        local_ratio.append(lhs_n / loc)
        hyp.append(rn / loc)
    hyp = np.array(hyp)
    base = a_grid <= 0.99 + 1e-12
    hypothesis = bool(bounded(hyp[base], hyp)) if base.any() else True
    return Theorem21Report(RatioReport(a_grid, np.array(mean_ratio)),
                           RatioReport(a_grid, np.array(norm_ratio)),
                           RatioReport(a_grid, np.array(local_ratio)) if hypothesis else None,
                           hypothesis)


def composite_weight(w, alpha, p, N):
    """``(1 - r)^{Np-2} (w_star_{-alpha}(r))^{p/2}`` built on a tabulated star weight."""
    W = star_space_weight(w, alpha).tabulated()
    dens = W._density
    e = N * p - 2

    def density(d):
        return d ** e * dens(d) ** (p / 2)

    return RadialWeight(density, "kernel-composite",
                        {"alpha": alpha, "p": p, "N": N}, None, moment_order=2)


def corollary112_check(w, alpha, p, N, a_grid=None):
    """Ratio of ``int |K^{alpha,w}_a^(N)|^p U dA`` to ``(w_star_{-alpha}(a))^{-p/2}``.

    ``U = (1-|z|)^{Np-2} (w_star_{-alpha})^{p/2}`` must be a regular weight;
    otherwise :class:`HypothesisFailed` is raised.
    """
    a_grid = (np.array([0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.97, 0.99])
              if a_grid is None else np.asarray(a_grid, float))
    if np.any(a_grid < 0.5) or np.any(a_grid >= 1):
        raise DomainError("anchor radii must lie in [0.5, 1)", "corollary112_check")
    try:
        U = composite_weight(w, alpha, p, N)
    except NotIntegrable as exc:
        raise HypothesisFailed(f"composite weight is not integrable ({exc})",
                               "corollary112_check") from exc
    report = classify_weight(U, default_grid()[4:])
    if not report.is_regular:
        raise HypothesisFailed("composite weight is not regular on the grid", "corollary112_check")
    W = star_space_weight(w, alpha)
    ratios = []
    for x in a_grid:
        k = KernelSeries.dirichlet_alpha(w, alpha, x, N)
        lhs = _radial_integral(_mean_fn(k, p), U._density, 1 - x,
                               hat_near_boundary=lambda d: float(U._hat_d(np.array([d]))[0]))
        rhs = float(W(np.array([x]))[0]) ** (-p / 2)
        ratios.append(lhs / rhs)
    return RatioReport(a_grid, np.array(ratios))


@dataclass
class LocalConstancyReport:
    anchors: np.ndarray
    radii: np.ndarray
    low: np.ndarray    # shape (anchors, radii): min of |F(z)|/|F(a)| over samples
    high: np.ndarray
    largest_radius: np.ndarray  # per anchor, largest r0 with ratios in [1/2, 2]


def local_constancy_check(w, alpha, N, a_grid=None, r0_grid=None, n_angles=48):
    """Sample ``|d^N/da^N K^{alpha,w}(a, z)| / |same at z = a|`` over ``z in Delta(a, r0)``."""
    a_grid = np.array([0.5, 0.7, 0.9]) if a_grid is None else np.asarray(a_grid, float)
    r0_grid = (np.array([0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9])
               if r0_grid is None else np.sort(np.asarray(r0_grid, float)))
    if np.any(np.abs(a_grid) < 0.5) or np.any(np.abs(a_grid) >= 1):
        raise DomainError("anchors must satisfy 1/2 <= |a| < 1", "local_constancy_check")
    coeffs = KernelCoefficients("dirichlet", star_space_weight(w, alpha))
    theta = 2 * np.pi * np.arange(n_angles) / n_angles
    low = np.empty((a_grid.size, r0_grid.size))
    high = np.empty_like(low)
    for i, a in enumerate(a_grid):
        a = complex(a)
        for j, r0 in enumerate(r0_grid):
            s = r0 * np.array([0.25, 0.5, 0.75, 0.999])
            z = mobius(a, (s[:, None] * np.exp(1j * theta)[None, :]).ravel())
            z = np.concatenate([[a], z])
            # d^N/da^N K(a, z) = (K_z)^(N)(a): series in a anchored at z
            vals = np.array([abs(KernelSeries(coeffs, zz, N)(a)) for zz in z])
            ratio = vals[1:] / vals[0]
            low[i, j], high[i, j] = ratio.min(), ratio.max()
    ok = (low >= 0.5) & (high <= 2.0)
    largest = np.array([r0_grid[row].max() if row.any() else 0.0 for row in
                        np.logical_and.accumulate(ok, axis=1)])
    return LocalConstancyReport(a_grid, r0_grid, low, high, largest)
