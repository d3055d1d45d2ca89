"""Toeplitz operators with measure symbols: Schatten criteria and truncated matrices.

A positive measure ``mu`` acts through the quadratic form
``<T_mu f, g> = int f conj(g) dmu``.  Matrices are taken in one of two
orthonormal monomial bases:

* ``alpha=None``: the Bergman space ``A^2_w`` with ``e_n = z^n / sqrt(2 w_n)``;
* numeric ``alpha``: the Dirichlet-type space of ``W = (1 - r)^-alpha w_star``
  with ``e_0 = W(D)^-1/2`` and ``e_n = z^n / (n sqrt(2 W_{n-1}))``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
import math
from typing import Callable

import numpy as np

from ._trend import series_verdict
from .composition._rules import cut_radial_rule, euclidean_disc_rule
from .errors import ConfigError, DomainError, NonConvergence
from .geometry import AnnularSector, EuclideanDisc, PseudoHyperbolicDisc, rho
from .kernels import star_space_weight
from .numerics.linalg import hermitian_eigenvalues
from .numerics.quadrature import QuadratureSpec, gauss_legendre, integrate_disc, unit_interval_rule
from .weights import RadialWeight

TWO_PI = 2 * math.pi
MAX_DIM = 256
MEASURE_SPEC = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-9)
CONVERGING_SLOPE = 0.1     # log-log slope of partial sums against rectangle count
DIVERGING_SLOPE = 0.3
STABLE_STEP = 0.05         # Schatten norms: relative change over the last dim step
GROWING_STEP = 0.25
CRITERION_OFFSETS = (1e-2, 1e-3, 1e-4, 1e-5)
ANGLE_NODES = 256
MAX_ANGLE_NODES = 8192
ENTRY_TOL = 1e-10
EIGEN_FLOOR = 1e-13


# --- measures -------------------------------------------------------------------------

class MeasureSpec:
    """A finite positive Borel measure on the disc.

    Build with :meth:`atoms`, :meth:`radial_profile` or :meth:`density`.
    Densities are taken against the normalized area ``dA = r dr dt / pi``.

    Attributes
    ----------
    form : {"atoms", "radial_profile", "density"}
    points, masses : ndarray
        Atom locations and masses (atoms only).
    profile : RadialWeight
        ``h`` in ``dmu = h(|z|) dA`` (radial profiles only).
    func : callable
        Vectorized ``f(z) >= 0`` in ``dmu = f dA`` (densities only).
    """

    def __init__(self, form, points=None, masses=None, profile=None, func=None, label=None):
        self.form = form
        self.points = points
        self.masses = masses
        self.profile = profile
        self.func = func
        self.label = label or form

    @classmethod
    def atoms(cls, points, masses=None, label=None):
        """``sum m_k delta_{z_k}``; masses default to 1."""
        z = np.atleast_1d(np.asarray(points, complex)).ravel()
        m = np.ones(z.size) if masses is None else np.atleast_1d(np.asarray(masses, float)).ravel()
        if m.size != z.size:
            raise DomainError("one mass per atom required", "MeasureSpec.atoms")
        if np.any(np.abs(z) >= 1):
            raise DomainError("atoms must lie inside the disc", "MeasureSpec.atoms")
        if np.any(m <= 0) or not np.all(np.isfinite(m)):
            raise DomainError("atom masses must be positive", "MeasureSpec.atoms")
        return cls("atoms", points=z, masses=m, label=label)

    @classmethod
    def zero(cls):
        return cls("atoms", points=np.empty(0, complex), masses=np.empty(0), label="zero")

    @classmethod
    def radial_profile(cls, h, label=None):
        """``h(|z|) dA`` for a :class:`RadialWeight` or a callable of ``r``."""
        if not isinstance(h, RadialWeight):
            h = RadialWeight.custom(h, name=label or "profile")
        return cls("radial_profile", profile=h, label=label or f"{h.family} dA")

    @classmethod
    def density(cls, func: Callable, label=None):
        """``f(z) dA`` for a vectorized nonnegative ``f``."""
        probe = np.linspace(0, 0.99, 12)[:, None] * np.exp(1j * np.linspace(0, TWO_PI, 12))
        vals = np.asarray(func(probe), float)
        if np.any(vals < 0) or not np.all(np.isfinite(vals)):
            raise DomainError("density must be finite and nonnegative", "MeasureSpec.density")
        return cls("density", func=func, label=label or "density")

    @classmethod
    def from_config(cls, cfg):
        """Parse a measure config.

        Forms: ``{"form": "atoms", "atoms": [[re, im, mass], ...]}``;
        ``{"form": "radial_profile", "weight": {...}, "scale": c}`` or with
        ``"power": k, "interior": j`` for ``r^j (1-r)^k``;
        ``{"form": "density", "power": k, "interior": j, "tilt": t}`` for
        ``|z|^j (1-|z|^2)^k (1 + t Re z)``.
        """
        try:
            form = cfg["form"]
            if form == "atoms":
                rows = np.asarray(cfg["atoms"], float).reshape(-1, 3)
                if rows.size == 0:
                    return cls.zero()
                return cls.atoms(rows[:, 0] + 1j * rows[:, 1], rows[:, 2], cfg.get("label"))
            if form == "radial_profile":
                scale = float(cfg.get("scale", 1.0))
                if "weight" in cfg:
                    h = RadialWeight.from_config(cfg["weight"])
                else:
                    k, j = float(cfg["power"]), float(cfg.get("interior", 0.0))
                    h = RadialWeight.custom(lambda r: r ** j * (1 - r) ** k,
                                            name=f"r^{j:g}(1-r)^{k:g}")
                return cls.radial_profile(h.scaled(scale) if scale != 1 else h, cfg.get("label"))
            if form == "density":
                k, j = float(cfg["power"]), float(cfg.get("interior", 0.0))
                tilt = float(cfg.get("tilt", 0.0))
                if abs(tilt) > 1:
                    raise ConfigError("tilt must lie in [-1, 1]", "MeasureSpec")
                return cls.density(lambda z: np.abs(z) ** j * (1 - np.abs(z) ** 2) ** k
                                   * (1 + tilt * np.real(z)), cfg.get("label"))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad measure config {cfg!r}: {exc}", "MeasureSpec") from exc
        raise ConfigError(f"measure form {cfg.get('form')!r} is not configurable", "MeasureSpec")

    def __repr__(self):
        return f"MeasureSpec({self.label})"

    @cached_property
    def total_mass(self):
        return measure_of(self, None)

    def scaled(self, c):
        c = float(c)
        if self.form == "atoms":
            return MeasureSpec.atoms(self.points, c * self.masses, self.label)
        if self.form == "radial_profile":
            return MeasureSpec.radial_profile(self.profile.scaled(c), self.label)
        f = self.func
        return MeasureSpec.density(lambda z: c * f(z), self.label)

    def _area_density(self, z):
        """``dmu / dA`` at ``z`` (not defined for atoms)."""
        if self.form == "radial_profile":
            return self.profile(np.abs(z))
        return np.asarray(self.func(z), float)


def measure_of(mu: MeasureSpec, region=None) -> float:
    """``mu(region)`` for a dyadic rectangle, sector, Carleson box, disc, or the whole disc.

    Atoms use exact membership tests; radial profiles use closed tail
    integrals on sectors; other cases use adaptive cubature.

    Raises
    ------
    NonConvergence
        When the cubature for a density does not meet its tolerance.
    """
    if mu.form == "atoms":
        if mu.points.size == 0:
            return 0.0
        if region is None:
            return float(mu.masses.sum())
        return float(mu.masses[np.asarray(region.contains(mu.points), bool)].sum())
    if mu.form == "radial_profile" and region is None:
        return mu.profile.total_mass()
    if mu.form == "radial_profile" and isinstance(region, AnnularSector):
        return float(region.weighted_measure(mu.profile))
    if region is not None and not isinstance(region, (AnnularSector, EuclideanDisc)):
        raise DomainError(f"unsupported region {region!r}", "measure_of")
    return integrate_disc(mu._area_density, region, spec=MEASURE_SPEC)


# --- dyadic and integral criteria -----------------------------------------------------

def _check_criterion(alpha, p, op):
    a = 0.0 if alpha is None else float(alpha)
    if not p > 0:
        raise DomainError("p must be positive", op)
    if not a < 1:
        raise DomainError("alpha must be below 1", op)
    if not p * a < 1:
        raise DomainError("p * alpha must be below 1", op)
    return a


def _space_weight(w, alpha, z):
    """``w_star_{-alpha}(z) = (1 - |z|)^-alpha w_star(|z|)``."""
    r = np.abs(np.asarray(z, complex))
    return w.star(r) * (1 - r) ** (-alpha)


def _level_masses(mu, n):
    """Masses of the ``2^n`` dyadic rectangles of level ``n``."""
    count = 2 ** n
    r0, r1 = (0.0, 0.5) if n == 0 else (1 - 2.0 ** -n, 1 - 2.0 ** -(n + 1))
    if mu.form == "atoms":
        out = np.zeros(count)
        if mu.points.size:
            m = np.abs(mu.points)
            inside = (m >= r0) & (m < r1)
            t = np.mod(np.angle(mu.points[inside]), TWO_PI)
            k = np.minimum((t / (TWO_PI / count)).astype(int), count - 1)
            np.add.at(out, k, mu.masses[inside])
        return out
    if mu.form == "radial_profile":
        h = mu.profile
        return np.full(count, 2 * (h.tilde(r0) - h.tilde(r1)) / count)
    # densities: 10 x 10 Gauss cells per rectangle
    x, wx = gauss_legendre(10)
    rr = r0 + (r1 - r0) * x
    arc = TWO_PI / count
    t = arc * (np.arange(count)[:, None] + x[None, :])
    z = rr[None, :, None] * np.exp(1j * t)[:, None, :]
    vals = mu._area_density(z)
    cell = (rr * wx)[None, :, None] * wx[None, None, :] * (r1 - r0) * arc / math.pi
    return (vals * cell).sum(axis=(1, 2))


def _level_centers(n):
    if n == 0:
        return np.array([0.5 + 0j])
    k = np.arange(2 ** n)
    return (1 - 2.0 ** -n) * np.exp(1j * TWO_PI * (k + 0.5) / 2 ** n)


def _slope_verdict(partial):
    partial = np.asarray(partial, float)
    inc = np.diff(np.concatenate([[0.0], partial]))
    if partial[-1] == 0 or np.all(inc[-2:] == 0):
        return "converging", 0.0
    tail = partial[-4:]
    if np.any(tail <= 0):
        return "inconclusive", math.nan
    levels = np.arange(partial.size)[-4:]
    x = np.log(2.0 ** (levels + 1) - 1)
    slope = float(np.polyfit(x, np.log(tail), 1)[0])
    if slope < CONVERGING_SLOPE:
        return "converging", slope
    if slope > DIVERGING_SLOPE:
        return "diverging", slope
    return "inconclusive", slope


@dataclass
class DyadicCriterionReport:
    """Partial sums of ``sum_j (mu(R_j) / w_star_{-alpha}(z_j))^p`` by level."""

    p: float
    alpha: float
    level_sums: np.ndarray
    slope: float
    verdict: str

    @property
    def partial(self):
        return np.cumsum(self.level_sums)

    @property
    def total(self):
        return float(self.partial[-1])

    @property
    def finite(self):
        return self.verdict == "converging"


def criterion_dyadic(mu, w, alpha=None, p=1.0, n_max=10):
    """Dyadic-rectangle form of the Schatten criterion for ``T_mu``.

    Level 0 is the disc ``|z| < 1/2`` with center ``1/2``.  The verdict
    comes from the log-log slope of the partial sums against the number of
    rectangles over the last four levels.

    Raises
    ------
    DomainError
        For ``p <= 0``, ``alpha >= 1`` or ``p * alpha >= 1``.
    """
    a = _check_criterion(alpha, p, "criterion_dyadic")
    sums = np.empty(int(n_max) + 1)
    for n in range(int(n_max) + 1):
        m = _level_masses(mu, n)
        sums[n] = float(np.sum((m / _space_weight(w, a, _level_centers(n))) ** p))
    verdict, slope = _slope_verdict(np.cumsum(sums))
    return DyadicCriterionReport(float(p), a, sums, slope, verdict)


def _disc_masses(mu, z, r, n_radial=24, n_theta=64):
    """``mu(Delta(z, r))`` for each entry of ``z``."""
    z = np.asarray(z, complex).ravel()
    if mu.form == "atoms":
        if mu.points.size == 0:
            return np.zeros(z.size)
        inside = np.asarray(rho(z[:, None], mu.points[None, :])) < r
        return inside.astype(float) @ mu.masses
    t = 1 - r * r * np.abs(z) ** 2
    center = (1 - r * r) * z / t
    radius = r * (1 - np.abs(z) ** 2) / t
    u, wu = euclidean_disc_rule(0j, 1.0, n_radial, n_theta)
    nodes = center[:, None] + radius[:, None] * u[None, :]
    return (mu._area_density(nodes) * wu[None, :]).sum(axis=1) * radius ** 2


def _integrand(mu, w, alpha, p, r, z):
    z = np.asarray(z, complex)
    out = np.zeros(z.shape)
    ok = np.abs(z) > 1e-12
    mass = _disc_masses(mu, z[ok], r)
    out[ok] = (mass / _space_weight(w, alpha, z[ok])) ** p / (1 - np.abs(z[ok])) ** 2
    return out


def _integral_to(mu, w, alpha, p, r, eps):
    if mu.form == "atoms":
        total = 0.0
        for a in mu.points:
            disc = PseudoHyperbolicDisc(a, r) if abs(a) > 0 else EuclideanDisc(0j, r)
            z, wz = euclidean_disc_rule(disc.center, disc.radius, 48, 128)
            keep = np.abs(z) <= 1 - eps
            z, wz = z[keep], wz[keep]
            share = np.asarray(rho(z[:, None], mu.points[None, :])) < r
            total += float(np.sum(_integrand(mu, w, alpha, p, r, z) * wz / share.sum(axis=1)))
        return total
    s, ws = cut_radial_rule(eps)
    if mu.form == "radial_profile":
        return float(np.sum(_integrand(mu, w, alpha, p, r, s) * 2 * s * ws))
    n_theta = 64
    t = TWO_PI * np.arange(n_theta) / n_theta
    z = s[:, None] * np.exp(1j * t)[None, :]
    vals = _integrand(mu, w, alpha, p, r, z.ravel()).reshape(z.shape)
    return float(np.sum(vals.mean(axis=1) * 2 * s * ws))


@dataclass
class IntegralCriterionReport:
    """``int_{|z| <= 1 - eps} (mu(Delta(z, r)) / w_star_{-alpha}(z))^p dA / (1-|z|)^2``."""

    p: float
    alpha: float
    r: float
    offsets: tuple
    partial: np.ndarray
    verdict: str

    @property
    def value(self):
        return float(self.partial[-1])

    @property
    def growth(self):
        return float(self.partial[-1] / self.partial[0]) if self.partial[0] > 0 else math.inf

    @property
    def finite(self):
        return self.verdict == "converging"


def criterion_integral(mu, w, alpha=None, p=1.0, r=0.3, offsets=CRITERION_OFFSETS):
    """Disc-average form of the Schatten criterion, truncated at each offset.

    The verdict applies the shared series test to the increments between
    consecutive offsets (one decade apart by default).

    Raises
    ------
    DomainError
        For ``r`` outside ``(0, 1)`` or refused ``(p, alpha)``.
    """
    a = _check_criterion(alpha, p, "criterion_integral")
    if not 0 < r < 1:
        raise DomainError("r must lie in (0, 1)", "criterion_integral")
    offsets = tuple(sorted(offsets, reverse=True))
    partial = np.array([_integral_to(mu, w, a, p, r, e) for e in offsets])
    if not np.all(np.isfinite(partial)):
        raise NonConvergence("criterion integral is not finite", "criterion_integral",
                             float(partial[-1]), math.nan)
    verdict = series_verdict(np.diff(partial))
    return IntegralCriterionReport(float(p), a, float(r), offsets, partial, verdict)


# --- truncated matrices ---------------------------------------------------------------

@dataclass
class TruncatedOperator:
    """Compression of ``T_mu`` to the first ``dim`` basis vectors."""

    matrix: np.ndarray
    basis: dict
    quadrature: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @cached_property
    def eigenvalues(self):
        """Descending eigenvalues; raises ``NotHermitian`` beyond 1e-10 asymmetry."""
        return hermitian_eigenvalues(self.matrix, psd=True)

    def schatten_norm(self, p):
        return schatten_norm(self, p)

    def truncated(self, k):
        """The leading ``k x k`` compression."""
        return TruncatedOperator(self.matrix[:k, :k].copy(), dict(self.basis), self.quadrature)

    def to_csv(self, path):
        """Row-major CSV with ``"re,im"`` cells."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            for row in self.matrix:
                writer.writerow([f"{float(v.real)!r},{float(v.imag)!r}" for v in row])


def read_matrix_csv(path):
    """Inverse of :meth:`TruncatedOperator.to_csv`."""
    with open(path, newline="") as fh:
        rows = [[complex(*map(float, cell.split(","))) for cell in row] for row in csv.reader(fh)]
    return np.array(rows, complex)


def basis_coefficients(w, alpha, dim):
    """``c_n`` with ``e_n = c_n z^n``."""
    if alpha is None:
        return 1.0 / np.sqrt(2.0 * w.moments(dim))
    W = star_space_weight(w, alpha)
    c = np.empty(dim)
    c[0] = 1.0 / math.sqrt(W.total_mass())
    if dim > 1:
        n = np.arange(1, dim)
        c[1:] = 1.0 / (n * np.sqrt(2.0 * W.moments(dim - 1)))
    return c


def _density_entries(mu, c, n_theta):
    s, d, wq, _ = unit_interval_rule()
    dim = c.size
    t = TWO_PI * np.arange(n_theta) / n_theta
    f = mu._area_density(s[:, None] * np.exp(1j * t)[None, :])
    F = np.fft.fft(f, axis=1) / n_theta          # F[:, k] ~ k-th Fourier coefficient
    P = s[:, None] ** np.arange(dim)[None, :]
    rad = 2 * s * wq
    out = np.empty((dim, dim), complex)
    n = np.arange(dim)
    for m in range(dim):
        Fm = F[:, (n - m) % n_theta]
        out[:, m] = ((rad * P[:, m])[:, None] * P * Fm).sum(axis=0)
    return c[:, None] * c[None, :] * out


def toeplitz_matrix(mu, w, alpha=None, dim=32, n_theta=None):
    """``M[n, m] = int e_m conj(e_n) dmu`` in the basis selected by ``alpha``.

    Radial profiles give an exactly diagonal matrix from moments, atoms a sum
    of rank-one terms, and densities a radial-Gauss times FFT cubature whose
    angular sample count doubles until the entries settle.

    Raises
    ------
    NonConvergence
        When density entries still change by more than 1e-10 (relative to
        the largest entry) at 8192 angular samples.
    """
    if not 1 <= int(dim) <= MAX_DIM:
        raise DomainError(f"dim must lie in [1, {MAX_DIM}]", "toeplitz_matrix")
    dim = int(dim)
    c = basis_coefficients(w, alpha, dim)
    basis = {"space": "A2" if alpha is None else "H_alpha", "weight": w, "alpha": alpha}
    if mu.form == "atoms":
        E = c[None, :] * mu.points[:, None] ** np.arange(dim)[None, :]
        M = E.conj().T @ (mu.masses[:, None] * E)
        return TruncatedOperator(M, basis, {"method": "atoms"})
    if mu.form == "radial_profile":
        M = np.diag(c ** 2 * 2 * mu.profile.moments(dim)).astype(complex)
        return TruncatedOperator(M, basis, {"method": "moments"})
    n = n_theta or max(ANGLE_NODES, 4 * dim)
    M = _density_entries(mu, c, n)
    while True:
        finer = _density_entries(mu, c, 2 * n)
        change = float(np.max(np.abs(finer - M))) / max(float(np.max(np.abs(finer))), 1e-300)
        M, n = finer, 2 * n
        if change <= ENTRY_TOL:
            break
        if n >= MAX_ANGLE_NODES:
            raise NonConvergence(f"entries still change by {change:.2e}", "toeplitz_matrix",
                                 None, change)
    return TruncatedOperator(0.5 * (M + M.conj().T), basis, {"method": "fft", "n_theta": n})


def schatten_norm(T: TruncatedOperator, p) -> float:
    """``(sum lambda_i^p)^(1/p)`` over eigenvalues clipped at 0.

    Eigenvalues below 1e-13 times the largest are treated as zero.
    """
    if not p > 0:
        raise DomainError("p must be positive", "schatten_norm")
    lam = T.eigenvalues
    # rounding noise of a PSD spectrum counts as zero
    lam = np.where(lam > EIGEN_FLOOR * max(lam[0], 0.0), lam, 0.0) if lam.size else lam
    if p == math.inf:
        return float(lam.max(initial=0.0))
    return float(np.sum(lam ** p) ** (1.0 / p))


@dataclass
class ConvergenceStudy:
    """Schatten norms of nested truncations next to the dyadic criterion."""

    p: float
    dims: np.ndarray
    norms: np.ndarray
    trend: str
    criterion: DyadicCriterionReport

    @property
    def consistent(self):
        """True/False when both verdicts are decisive, else None."""
        c = self.criterion.verdict
        if self.trend == "inconclusive" or c == "inconclusive":
            return None
        return (c == "converging") == (self.trend == "stabilizing")

    def table(self):
        return [{"dim": int(d), "norm": float(v)} for d, v in zip(self.dims, self.norms)]


def schatten_convergence_study(mu, w, alpha=None, p=1.0, dims=(8, 16, 32, 64, 128), n_max=10):
    """Schatten ``p``-norms over increasing truncations, paired with :func:`criterion_dyadic`.

    The truncation norms are lower bounds for the operator norm.  The trend is
    "stabilizing" when the last step changes the norm by under 5% and
    "growing" above 25%.
    """
    dims = np.asarray(sorted(set(int(d) for d in dims)))
    if dims[-1] > MAX_DIM:
        raise DomainError(f"dims must not exceed {MAX_DIM}", "schatten_convergence_study")
    full = toeplitz_matrix(mu, w, alpha, int(dims[-1]))
    norms = np.array([schatten_norm(full.truncated(int(d)), p) for d in dims])
    if norms[-1] == 0:
        trend = "stabilizing"
    else:
        step = (norms[-1] - norms[-2]) / norms[-1] if dims.size > 1 else 0.0
        trend = ("stabilizing" if step < STABLE_STEP
                 else "growing" if step > GROWING_STEP else "inconclusive")
    crit = criterion_dyadic(mu, w, alpha, p, n_max) if (alpha or 0) * p < 1 else None
    return ConvergenceStudy(float(p), dims, norms, trend, crit)
