"""Radial weights and their tail functionals.

A radial weight is stored as a function of the distance ``d = 1 - r`` to the
boundary; every functional is evaluated in that variable so quantities near
the unit circle keep their relative precision.

Functionals (for ``0 <= r < 1``)::

    hat(r)    = int_r^1 w(s) ds
    tilde(r)  = int_r^1 w(s) s ds
    star(r)   = int_r^1 w(s) s log(s/r) ds        (r > 0)
    moment(x) = int_0^1 s^(2x+1) w(s) ds          (x > -1)
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy import special
from scipy.interpolate import CubicSpline, PchipInterpolator

from ._trend import EXTENSION_FACTOR, bounded, bounded_below, log_bounded
from .errors import DomainError, NotIntegrable
from .numerics.quadrature import gauss_legendre, toward_zero_rule, unit_interval_rule

_CHUNK = 128
DEFAULT_MOMENT_ORDER = 64


def default_grid():
    """Classification radii ``1 - 2**(-k/4)``, ``k = 0..40``."""
    return 1.0 - 2.0 ** (-np.arange(41) / 4.0)


def extended_grid(points=256, depth=20):
    """Refined grid, geometric toward 1, reaching ``1 - 2**-depth``."""
    return 1.0 - 2.0 ** (-np.linspace(0.0, depth, points))


# --- integration helpers on [0, d] -------------------------------------------

def _integrate_0_to_d(g, d, levels=48, order=20):
    """``int_0^{d_i} g(u) du`` for each ``d_i``, where ``g`` maps a 2-D array.

    The lower half [0, d/2] uses panels geometric toward 0 plus a geometric
    tail estimate; the upper half uses panels geometric toward ``d``.
    Returns (values, decay) where ``decay`` is the ratio of the last two
    panel contributions toward 0 (>= 1 signals a non-integrable singularity).
    """
    d = np.atleast_1d(np.asarray(d, float))
    v, wv, panel = toward_zero_rule(levels, order)
    out = np.empty(d.size)
    decay = np.empty(d.size)
    for lo in range(0, d.size, _CHUNK):
        dc = d[lo:lo + _CHUNK, None]
        h = 0.5 * dc
        # lower half, variable u = h * v
        vals = np.asarray(g(h * v[None, :]), float) * wv[None, :]
        per_panel = np.zeros((dc.shape[0], levels))
        np.add.at(per_panel, (slice(None), panel), vals)
        last, prev = per_panel[:, -1], per_panel[:, -2]
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(prev != 0, last / prev, 0.0)
        ok = (q > 0) & (q < 1)
        low = per_panel.sum(axis=1) + np.where(ok, last * q / np.where(ok, 1 - q, 1), 0.0)
        # upper half, variable u = d - h * v
        upper = (np.asarray(g(dc - h * v[None, :]), float) * wv[None, :]).sum(axis=1)
        out[lo:lo + _CHUNK] = (low + upper) * h[:, 0]
        decay[lo:lo + _CHUNK] = np.where(prev != 0, np.abs(q), 0.0)
    return out, decay


def _log_e2(x):
    """log of the exponential integral E_2 for x > 0."""
    x = np.asarray(x, float)
    out = np.empty_like(x)
    small = x < 500
    with np.errstate(divide="ignore"):
        out[small] = np.log(special.expn(2, x[small]))
    xs = x[~small]
    # asymptotic series E_2(x) ~ e^-x / x * sum (-1)^k (k+1)! / x^k
    series = np.zeros_like(xs)
    term = np.ones_like(xs)
    for k in range(9):
        series += term
        term = -term * (k + 2) / xs
    out[~small] = -xs - np.log(xs) + np.log(series)
    return out


# --- the weight type ------------------------------------------------------------

class RadialWeight:
    """A nonnegative integrable radial weight on the unit disc.

    Use the family constructors (:meth:`standard`, :meth:`log_power`,
    :meth:`log_minus`, :meth:`exponential`, :meth:`custom`,
    :meth:`from_table`) rather than the initializer.

    Parameters
    ----------
    density : callable
        ``density(d)`` is the weight at radius ``1 - d``; must accept arrays.
    family : str
    params : dict
    closed : dict, optional
        Analytic evaluators in the distance variable, keyed by ``"hat"``,
        ``"log_hat"``, ``"tilde"``, ``"star"`` and ``"moment"`` (the latter
        takes the order ``x``).
    moment_order : int
        Integer moments ``0..moment_order-1`` are computed at construction.
    """

    def __init__(self, density, family="custom", params=None, closed=None,
                 moment_order=DEFAULT_MOMENT_ORDER, check=True):
        self._density = density
        self.family = family
        self.params = dict(params or {})
        self._closed = dict(closed or {})
        if check:
            self._check()
        self._moment_cache = self._moment_values(np.arange(moment_order, dtype=float))

    # -- construction ---------------------------------------------------------

    def _check(self):
        probe = np.concatenate([np.linspace(0.0, 0.99, 100), 1 - 2.0 ** -np.arange(7, 45)])
        vals = self._density(1.0 - probe)
        if np.any(np.asarray(vals) < 0) or np.any(np.isnan(vals)):
            raise NotIntegrable("weight takes negative or undefined values", self.family)
        if "hat" in self._closed:
            total = float(self._closed["hat"](np.array([1.0]))[0])
            decay = 0.0
        else:
            total, decay = _integrate_0_to_d(self._density, np.array([1.0]))
            total, decay = float(total[0]), float(decay[0])
        if not np.isfinite(total) or decay >= 0.999 or total <= 0:
            raise NotIntegrable("int_0^1 w(s) ds is not finite and positive", self.family)

    @classmethod
    def standard(cls, alpha=0.0, **kw):
        """``(1 - r^2)^alpha``, ``alpha > -1``."""
        a = float(alpha)
        if not a > -1:
            raise DomainError("standard weight needs alpha > -1", "RadialWeight.standard")
        half_beta = 0.5 * special.beta(0.5, a + 1)

        def density(d):
            return (d * (2 - d)) ** a

        def hat(d):
            return half_beta * special.betainc(a + 1, 0.5, d * (2 - d))

        def tilde(d):
            return (d * (2 - d)) ** (a + 1) / (2 * (a + 1))

        def moment(x):
            return 0.5 * np.exp(special.betaln(np.asarray(x, float) + 1, a + 1))

        closed = {"hat": hat, "tilde": tilde, "moment": moment}
        if a == 0:
            closed["hat"] = lambda d: np.asarray(d, float) * 1.0
            closed["star"] = _star_unweighted
        return cls(density, "standard", {"alpha": a}, closed, **kw)

    @classmethod
    def log_power(cls, alpha=2.0, **kw):
        """``(1 - r)^-1 log(e / (1 - r))^-alpha``, ``alpha > 1``."""
        a = float(alpha)
        if not a > 1:
            raise DomainError("log_power weight needs alpha > 1", "RadialWeight.log_power")

        def density(d):
            with np.errstate(divide="ignore", invalid="ignore"):
                L = 1.0 - np.log(d)
                return 1.0 / (d * L ** a)

        def hat(d):
            return (1.0 - np.log(d)) ** (1 - a) / (a - 1)

        return cls(density, "log_power", {"alpha": a}, {"hat": hat}, **kw)

    @classmethod
    def log_minus(cls, **kw):
        """``log(e / (1 - r)) - 1``."""
        def density(d):
            return -np.log(d)

        def hat(d):
            d = np.asarray(d, float)
            return d * (1.0 - np.log(d))

        return cls(density, "log_minus", {}, {"hat": hat}, **kw)

    @classmethod
    def exponential(cls, c=1.0, **kw):
        """``exp(-c / (1 - r))``, ``c > 0``."""
        c = float(c)
        if not c > 0:
            raise DomainError("exponential weight needs c > 0", "RadialWeight.exponential")

        def density(d):
            with np.errstate(divide="ignore"):
                return np.exp(-c / d)

        def log_hat(d):
            d = np.asarray(d, float)
            return np.log(d) + _log_e2(c / d)

        def hat(d):
            return np.exp(log_hat(d))

        return cls(density, "exponential", {"c": c}, {"hat": hat, "log_hat": log_hat}, **kw)

    @classmethod
    def custom(cls, func, name="custom", **kw):
        """Weight from a vectorized callable of the radius ``r``."""
        def density(d):
            return np.asarray(func(1.0 - np.asarray(d, float)), float)

        return cls(density, name, {}, None, **kw)

    @classmethod
    def from_table(cls, r, values, **kw):
        """Weight sampled at radii ``r`` (monotone cubic interpolation).

        Beyond the last sample the weight continues as the power of ``1 - r``
        fitted to the last two samples.
        """
        r = np.asarray(r, float)
        values = np.asarray(values, float)
        order = np.argsort(r)
        r, values = r[order], values[order]
        if r.size < 3 or r[0] > 0 or r[-1] >= 1 or np.any(values < 0):
            raise DomainError("table must start at 0, stay below 1 and be nonnegative",
                              "RadialWeight.from_table")
        interp = PchipInterpolator(r, values, extrapolate=False)
        d_last, d_prev = 1 - r[-1], 1 - r[-2]
        if values[-1] > 0 and values[-2] > 0:
            power = math.log(values[-1] / values[-2]) / math.log(d_last / d_prev)
        else:
            power = 0.0

        def density(d):
            d = np.asarray(d, float)
            inside = d >= d_last
            out = np.empty_like(d)
            out[inside] = interp(1.0 - d[inside])
            out[~inside] = values[-1] * (d[~inside] / d_last) ** power
            return out

        return cls(density, "table", {"r_max": float(r[-1]), "tail_power": power}, None, **kw)

    @classmethod
    def from_config(cls, cfg):
        """Build from a mapping such as ``{"family": "standard", "alpha": 1.0}``."""
        cfg = dict(cfg)
        family = cfg.pop("family", None)
        if family == "standard":
            return cls.standard(cfg.get("alpha", 0.0))
        if family == "log_power":
            return cls.log_power(cfg.get("alpha", 2.0))
        if family == "log_minus":
            return cls.log_minus()
        if family == "exponential":
            return cls.exponential(cfg.get("c", 1.0))
        if family == "table":
            return cls.from_table(cfg["r"], cfg["values"])
        raise DomainError(f"unknown weight family {family!r}", "RadialWeight.from_config")

    def scaled(self, c):
        """The weight ``c * w`` (``c > 0``)."""
        c = float(c)
        if not c > 0:
            raise DomainError("scale must be positive", "RadialWeight.scaled")
        closed = {}
        for key, fn in self._closed.items():
            if key == "log_hat":
                closed[key] = (lambda f: lambda d: f(d) + math.log(c))(fn)
            else:
                closed[key] = (lambda f: lambda d: c * f(d))(fn)
        base = self._density
        return RadialWeight(lambda d: c * base(d), self.family,
                            {**self.params, "scale": c * self.params.get("scale", 1.0)},
                            closed, moment_order=self._moment_cache.size, check=False)

    def shifted(self, beta):
        """The weight ``(1 - r)^beta * w(r)``.

        Raises
        ------
        NotIntegrable
            If the shifted weight is not integrable on [0, 1).
        """
        beta = float(beta)
        if beta == 0:
            return self
        base = self._density

        def density(d):
            return d ** beta * base(d)

        return RadialWeight(density, f"{self.family}-shifted",
                            {**self.params, "shift": beta}, None,
                            moment_order=self._moment_cache.size)

    def star_weight(self):
        """The radial weight ``r -> star(r)``."""
        star_d = self._star_d
        return RadialWeight(star_d, f"{self.family}-star", dict(self.params), None,
                            moment_order=self._moment_cache.size, check=False)

    def tabulated(self, points=600):
        """Spline surrogate of this weight, for repeated evaluation of costly densities.

        ``log w`` is interpolated (cubic) in the variable ``log(d / (1 - d))``
        on ``d in [1e-30, 1 - 1e-9]``; beyond the table the first/last power
        law in ``d`` is continued.
        """
        t = np.linspace(math.log(1e-30), math.log(1e9), points)
        d = 1.0 / (1.0 + np.exp(-t))
        with np.errstate(divide="ignore"):
            logw = np.log(self._density(d))
        if not np.all(np.isfinite(logw)):
            raise DomainError("tabulation needs a positive finite density", "tabulated")
        spline = CubicSpline(t, logw)
        slope = (logw[1] - logw[0]) / (math.log(d[1]) - math.log(d[0]))
        d0, lw0, t_hi = d[0], logw[0], t[-1]

        def density(u):
            u = np.asarray(u, float)
            with np.errstate(divide="ignore"):
                tu = np.log(u) - np.log1p(-u)
            low = tu < t[0]
            out = np.exp(spline(np.clip(tu, t[0], t_hi)))
            if np.any(low):
                out = np.where(low, np.exp(lw0 + slope * (np.log(np.where(low, u, d0)) - math.log(d0))),
                               out)
            return out

        return RadialWeight(density, f"{self.family}-table", dict(self.params), None,
                            moment_order=self._moment_cache.size, check=False)

    def __repr__(self):
        args = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"RadialWeight.{self.family}({args})"

    # -- functionals in the distance variable ---------------------------------

    def _hat_d(self, d):
        d = np.asarray(d, float)
        if "hat" in self._closed:
            return np.asarray(self._closed["hat"](d), float)
        flat = d.ravel()
        return _integrate_0_to_d(self._density, flat)[0].reshape(d.shape)

    def _log_hat_d(self, d):
        if "log_hat" in self._closed:
            return np.asarray(self._closed["log_hat"](np.asarray(d, float)), float)
        with np.errstate(divide="ignore"):
            return np.log(self._hat_d(d))

    def _tilde_d(self, d):
        d = np.asarray(d, float)
        if "tilde" in self._closed:
            return np.asarray(self._closed["tilde"](d), float)
        flat = d.ravel()
        if "hat" in self._closed:
            # int_r^1 w s ds = r hat(r) + int_r^1 hat
            rest = _integrate_0_to_d(self._closed["hat"], flat)[0]
            out = (1 - flat) * self._closed["hat"](flat) + rest
        else:
            dens = self._density
            out = _integrate_0_to_d(lambda u: dens(u) * (1 - u), flat)[0]
        return out.reshape(d.shape)

    def _star_d(self, d):
        d = np.asarray(d, float)
        if "star" in self._closed:
            return np.asarray(self._closed["star"](d), float)
        flat = d.ravel()
        out = np.empty(flat.size)
        for lo in range(0, flat.size, _CHUNK):
            dc = flat[lo:lo + _CHUNK]
            with np.errstate(divide="ignore"):   # star(0) = inf
                shift = np.log1p(-dc)[:, None]
            idx = slice(lo, lo + _CHUNK)
            if "hat" in self._closed:
                hat = self._closed["hat"]
                pieces = _integrate_0_to_d(
                    _rowwise(lambda u, s: hat(u) * (1 + np.log1p(-u) - s), shift), dc)[0]
            else:
                dens = self._density
                pieces = _integrate_0_to_d(
                    _rowwise(lambda u, s: dens(u) * (1 - u) * (np.log1p(-u) - s), shift), dc)[0]
            out[idx] = pieces
        return out.reshape(d.shape)

    # -- public functionals ---------------------------------------------------

    def __call__(self, r):
        return self._density(1.0 - np.asarray(r, float))

    def hat(self, r):
        r = _radius(r, "omega_hat")
        return _scalar(self._hat_d(1.0 - r))

    def log_hat(self, r):
        r = _radius(r, "omega_hat")
        return _scalar(self._log_hat_d(1.0 - r))

    def tilde(self, r):
        r = _radius(r, "omega_tilde")
        return _scalar(self._tilde_d(1.0 - r))

    def star(self, r):
        r = _radius(r, "omega_star")
        if np.any(r <= 0):
            raise DomainError("omega_star is undefined at r = 0", "omega_star")
        return _scalar(self._star_d(1.0 - r))

    def _moment_values(self, xs):
        xs = np.asarray(xs, float)
        if "moment" in self._closed:
            return np.asarray(self._closed["moment"](xs), float)
        s, d, w, d_cut = unit_interval_rule()
        dens = self._density(d)
        eps = s.min()
        dens0 = float(self._density(np.array([1.0 - 0.5 * eps]))[0])
        tail = float(self._hat_d(np.array([d_cut]))[0])
        out = np.empty(xs.size)
        logs = np.log(s)
        wd = w * dens
        for lo in range(0, xs.size, 256):
            p = 2 * xs[lo:lo + 256] + 1
            out[lo:lo + 256] = (np.exp(p[:, None] * logs[None, :]) @ wd
                                + tail + dens0 * eps ** (p + 1) / (p + 1))
        return out

    def moment(self, x):
        """``int_0^1 s^(2x+1) w(s) ds`` (cached for integer x)."""
        x = float(x)
        if not x > -1:
            raise DomainError("moment order must exceed -1", "moment")
        if x.is_integer() and x < self._moment_cache.size:
            return float(self._moment_cache[int(x)])
        return float(self._moment_values([x])[0])

    def moments(self, n):
        """Array ``[w_0, ..., w_{n-1}]`` of integer moments."""
        cache = self._moment_cache
        if n > cache.size:
            extra = self._moment_values(np.arange(cache.size, n, dtype=float))
            cache = np.concatenate([cache, extra])
            self._moment_cache = cache  # single reference swap
        return cache[:n].copy()

    def total_mass(self):
        """``w(D) = int_D w dA = 2 w_0``."""
        return 2.0 * self.moment(0)


def _rowwise(fn, shift):
    """Bind a per-row parameter to a 2-D integrand."""
    return lambda u: fn(u, shift)


def _star_unweighted(d):
    """Star functional of the constant weight, stable near the boundary."""
    d = np.asarray(d, float)
    out = np.empty_like(d)
    big = d > 0.1
    db = d[big]
    with np.errstate(divide="ignore"):
        out[big] = -0.5 * np.log1p(-db) - 0.25 * db * (2 - db)
    ds = d[~big]
    series = np.zeros_like(ds)
    power = ds ** 3
    for k in range(3, 40):
        series += power / k
        power = power * ds
    out[~big] = 0.5 * ds ** 2 + 0.5 * series
    return out


def _radius(r, op):
    r = np.asarray(r, float)
    if np.any(~np.isfinite(r)) or np.any(r < 0) or np.any(r >= 1):
        raise DomainError("radius must lie in [0, 1)", op)
    return r


def _scalar(x):
    x = np.asarray(x, float)
    return float(x) if x.ndim == 0 else x


# --- module-level operations -------------------------------------------------------

def omega_hat(w, r):
    """Tail integral ``int_r^1 w(s) ds``."""
    return w.hat(r)


def omega_star(w, r):
    """Star functional ``int_r^1 w(s) s log(s/r) ds`` for ``0 < r < 1``."""
    return w.star(r)


def moment(w, x):
    """Moment ``int_0^1 s^(2x+1) w(s) ds``."""
    return w.moment(x)


def shifted_weight(w, beta):
    """The weight ``(1 - r)^beta w(r)``."""
    return w.shifted(beta)


@dataclass
class WeightClassReport:
    """Grid verdicts for the doubling, regular and reverse-doubling classes."""

    in_D_hat: bool
    doubling_constant: float
    beta_exponent: float
    is_regular: bool
    reverse_doubling_C: float | None
    reverse_alpha: float | None
    grid: np.ndarray = field(repr=False)
    diagnostics: dict = field(default_factory=dict, repr=False)


def _log_doubling(w, r):
    d = 1.0 - np.asarray(r, float)
    return w._log_hat_d(d) - w._log_hat_d(0.5 * d)


def _fit_exponent(log_ratio_of, candidates, bound=100.0):
    """Least candidate whose maximal log-ratio stays below ``log(bound)``."""
    for c in candidates:
        m = log_ratio_of(c)
        if np.isfinite(m) and m <= math.log(bound):
            return float(c), float(math.exp(m))
    return math.inf, math.inf


HALF_INTEGERS = np.arange(1, 41) / 2.0


def growth_exponent(w, grid=None, bound=100.0):
    """Least half-integer beta with ``hat(r) <= C ((1-r)/(1-t))^beta hat(t)``, C <= bound.

    The inequality is checked over all pairs ``r <= t`` of the grid.
    Returns (beta, C).
    """
    grid = default_grid() if grid is None else np.sort(np.asarray(grid, float))
    d = 1.0 - grid
    lh = w._log_hat_d(d)
    ld = np.log(d)
    upper = np.triu(np.ones((d.size, d.size), bool))  # r_i <= t_j for i <= j

    def worst(beta):
        m = lh[:, None] - lh[None, :] + beta * (ld[None, :] - ld[:, None])
        return np.max(np.where(upper, m, -np.inf))

    return _fit_exponent(worst, HALF_INTEGERS, bound)


def classify_weight(w, grid=None):
    """Doubling, regularity and reverse-doubling verdicts on a radial grid.

    Each bounded-ratio verdict compares the grid with a refinement that
    reaches ``1 - 2**-20``; a ratio whose extreme moves by more than the
    extension factor is declared unbounded.
    """
    grid = default_grid() if grid is None else np.sort(np.asarray(grid, float))
    if np.any(grid < 0) or np.any(grid >= 1):
        raise DomainError("grid radii must lie in [0, 1)", "classify_weight")
    ext = np.union1d(grid, extended_grid())
    ext = ext[ext >= grid.min()]

    logD_base, logD_ext = _log_doubling(w, grid), _log_doubling(w, ext)
    overflow = bool(np.max(logD_ext) > 700)  # doubling ratio overflows: certainly unbounded
    if overflow:
        logD_ext = np.minimum(logD_ext, 700.0)
        logD_base = np.minimum(logD_base, 700.0)
    in_D_hat = not overflow and log_bounded(logD_base, logD_ext)
    doubling_constant = float(np.exp(np.max(logD_base))) if in_D_hat else math.inf

    beta, _ = growth_exponent(w, grid)

    def regularity(r):
        d = 1.0 - r
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return np.exp(np.log(w._density(d)) + np.log(d) - w._log_hat_d(d))

    reg_base, reg_ext = regularity(grid), regularity(ext)
    is_regular = bool(in_D_hat and bounded(reg_base, reg_ext) and bounded_below(reg_base, reg_ext))

    excess_base = np.expm1(logD_base)
    excess_ext = np.expm1(logD_ext)
    reverse = bool(np.all(np.isfinite(excess_ext)) and bounded_below(excess_base, excess_ext))
    if reverse:
        rev_C = float(np.exp(np.min(logD_ext)))
        rev_alpha = float(math.log2(rev_C))
    else:
        rev_C = rev_alpha = None
    diagnostics = {
        "doubling_extended": float(np.exp(min(np.max(logD_ext), 700.0))),
        "regularity_range": (float(np.min(reg_ext)), float(np.max(reg_ext))),
        "doubling_minimum": float(np.exp(np.min(logD_ext))),
    }
    return WeightClassReport(in_D_hat, doubling_constant, beta, is_regular, rev_C, rev_alpha,
                             grid, diagnostics)


@dataclass
class LemmaAReport:
    """Fitted exponents and ratio ranges for the equivalent doubling conditions."""

    beta: float
    beta_constant: float
    gamma: float
    gamma_constant: float
    moment_ratio: tuple
    star_ratio: tuple

    def within(self, C):
        """True when every reported ratio lies in ``[1/C, C]``."""
        lo = min(self.moment_ratio[0], self.star_ratio[0])
        hi = max(self.moment_ratio[1], self.star_ratio[1], self.beta_constant,
                 self.gamma_constant)
        return bool(lo >= 1.0 / C and hi <= C)


def _head_integrals(w, d_t, gammas, panels=None, order=20):
    """``int_{d_t}^1 (d_t/u)^gamma w(1-u) du`` for each t (rows) and gamma (cols)."""
    x, wx = gauss_legendre(order)
    out = np.empty((d_t.size, len(gammas)))
    for i, dt in enumerate(d_t):
        span = -math.log(dt)
        if span == 0:
            out[i] = 0.0
            continue
        n = max(4, int(math.ceil(span / 0.5)))
        edges = np.linspace(0.0, span, n + 1)
        y = (edges[:-1, None] + np.diff(edges)[:, None] * x[None, :]).ravel()
        wy = (np.diff(edges)[:, None] * wx[None, :]).ravel()
        u = dt * np.exp(y)
        base = w._density(u) * u * wy
        out[i] = [np.dot(base, np.exp(-g * y)) for g in gammas]
    return out


def lemmaA_battery(w, grid=None, bound=100.0):
    """Numerical check of the equivalent characterizations of doubling weights.

    Reports the fitted growth exponent beta and constant, the fitted
    head-integral exponent gamma, the range of
    ``int_0^1 s^x w ds / hat(1 - 1/x)`` over ``x in [1, 1000]`` and the range
    of ``star(r) / (hat(r) (1 - r))`` over grid radii ``r >= 1/2``.
    """
    grid = default_grid() if grid is None else np.sort(np.asarray(grid, float))
    beta, beta_C = growth_exponent(w, grid, bound)

    d_t = 1.0 - grid
    heads = _head_integrals(w, d_t, HALF_INTEGERS)
    log_hat = w._log_hat_d(d_t)
    with np.errstate(divide="ignore"):
        log_ratio = np.log(heads) - log_hat[:, None]
    gamma, gamma_C = _fit_exponent(lambda g: np.max(log_ratio[:, int(round(2 * g)) - 1]),
                                   HALF_INTEGERS, bound)

    xs = np.logspace(0, 3, 40)
    with np.errstate(divide="ignore"):
        mom = w._moment_values((xs - 1) / 2)
        ratio_iv = mom / w._hat_d(1.0 / xs)
    r_half = grid[grid >= 0.5]
    d_half = 1.0 - r_half
    ratio_star = w._star_d(d_half) / (w._hat_d(d_half) * d_half)
    return LemmaAReport(beta, beta_C, gamma, gamma_C,
                        (float(np.min(ratio_iv)), float(np.max(ratio_iv))),
                        (float(np.min(ratio_star)), float(np.max(ratio_star))))


@dataclass
class StarIterationReport:
    """Ratios comparing iterated star weights with shifted ones."""

    alpha: float
    radii: np.ndarray
    star_ratio: np.ndarray
    orders: np.ndarray
    moment_ratio: np.ndarray

    @property
    def star_range(self):
        return float(self.star_ratio.min()), float(self.star_ratio.max())

    @property
    def moment_range(self):
        return float(self.moment_ratio.min()), float(self.moment_ratio.max())


def star_iteration_check(w, alpha, grid=None, n_max=200):
    """Compare ``W = (1-r)^(alpha-2) star(r)`` with ``star_alpha = (1-r)^alpha star(r)``.

    Returns the ratios ``W.star(r) / star_alpha(r)`` on grid radii ``r >= 1/2``
    and ``(n+1)^(2-alpha) m_n / W_n`` for ``n <= n_max``, where ``m_n`` are the
    moments of the star weight and ``W_n`` those of ``W``.
    """
    alpha = float(alpha)
    if not alpha > 0:
        raise DomainError("alpha must be positive", "star_iteration_check")
    grid = default_grid()[4:] if grid is None else np.asarray(grid, float)
    if np.any(grid < 0.5) or np.any(grid >= 1):
        raise DomainError("grid radii must lie in [1/2, 1)", "star_iteration_check")
    star_w = w.star_weight()
    W = star_w.shifted(alpha - 2)
    d = 1.0 - grid
    star_ratio = W._star_d(d) / (d ** alpha * w._star_d(d))
    n = np.arange(n_max + 1)
    moment_ratio = (n + 1.0) ** (2 - alpha) * star_w.moments(n_max + 1) / W.moments(n_max + 1)
    return StarIterationReport(alpha, grid, star_ratio, n, moment_ratio)


@dataclass
class TailConditionReport:
    """Constant in ``hat(phi_t(r)) <= M hat(t) / hat(r)`` over grid pairs r <= t."""

    constant: float
    constant_extended: float
    holds: bool


def moebius_tail_condition(w, grid=None):
    """Check ``hat(phi_t(r)) hat(r) / hat(t) <= M`` for ``0 <= r <= t < 1``.

    ``phi_t(r) = (t - r) / (1 - t r)``.  The condition holds when the
    maximum over the grid does not grow under refinement toward the boundary.
    """
    grid = default_grid() if grid is None else np.sort(np.asarray(grid, float))

    def worst(g):
        d = 1.0 - g
        dr, dt = d[:, None], d[None, :]
        # 1 - phi_t(r) = (1 - t)(1 + r) / (1 - t r)
        d_phi = dt * (2 - dr) / (dt + dr - dt * dr)
        lh = w._log_hat_d(d)
        m = w._log_hat_d(np.minimum(d_phi, 1.0)) + lh[:, None] - lh[None, :]
        mask = np.triu(np.ones_like(m, bool))
        with np.errstate(over="ignore"):
            return float(np.exp(np.max(np.where(mask, m, -np.inf))))

    base = worst(grid)
    ext = worst(np.union1d(grid, extended_grid(128)))
    return TailConditionReport(base, ext,
                               bool(np.isfinite(ext) and ext <= EXTENSION_FACTOR * base))
