"""Grid surrogates for the boundedness, compactness, essential-norm and
Schatten-class criteria of composition operators.

Every limsup or limit over ``|z| -> 1`` is replaced by values on the rings
``|z| = 1 - 2^-k``; verdicts are numerical evidence, not proofs.
"""
from dataclasses import dataclass, field
import math
import warnings

import numpy as np

from .._trend import EXTENSION_FACTOR, ring_verdict, series_verdict
from ..errors import DomainError, EmptyRegion
from ..geometry import CarlesonBox, PseudoHyperbolicDisc, nontangential_max
from ..numerics.quadrature import gauss_legendre, toward_zero_rule, unit_interval_rule
from ..weights import classify_weight, growth_exponent, moebius_tail_condition
from ._rules import (_toward, anchored_disc_rule, cut_radial_rule, euclidean_disc_rule,
                     sector_rule)
from .counting import CountingFunction, star_table

DEFAULT_RINGS = tuple(range(8, 13))
DEEP_RINGS = tuple(range(8, 41, 4))
RING_ANGLES = 256
DISC_RADIUS = 0.25
ETA_OFFSET = 3.0
CONTACT_GAP = 0.05
FINITE_QUOTIENT = 1e3
PARTIAL_OFFSETS = (1e-2, 1e-3, 1e-4)
DIVERGENCE_GROWTH = 10.0
POWER_MARGIN = 0.25
EVIDENCE = "numerical evidence"


def ring_radii(rings):
    return 1.0 - 2.0 ** -np.asarray(rings, float)


def _ring_points(r, n_theta):
    t = 2 * math.pi * np.arange(n_theta) / n_theta
    return t, r * np.exp(1j * t)


def _box_measure(w, a):
    return CarlesonBox(a).weighted_measure(w)


def _contact_anchor(phi):
    """Boundary angle where ``|phi|`` peaks, when the contact with the circle is localized."""
    t = 2 * math.pi * np.arange(4096) / 4096
    m = np.abs(phi(0.999999 * np.exp(1j * t)))
    if m.max() < 1 - CONTACT_GAP or np.mean(m > 1 - CONTACT_GAP) > 0.5:
        return None
    return float(t[np.argmax(m)])


# --- boundedness and compactness (q >= p) --------------------------------------------

@dataclass
class ClassificationReport:
    """Ring profiles of the boundedness/compactness quantities.

    ``pointwise`` is ``max_theta N(z) / w*(z)^(q/p)`` per ring, ``box`` and
    ``disc`` the Carleson-box and pseudohyperbolic-disc averages at the
    maximizing angle.
    """

    rings: np.ndarray
    radii: np.ndarray
    pointwise: np.ndarray
    box: np.ndarray
    disc: np.ndarray
    angles: np.ndarray
    trend: str
    label: str = EVIDENCE

    @property
    def bounded(self):
        return self.trend != "growing"

    @property
    def compact(self):
        return self.trend == "vanishing"

    @property
    def verdict(self):
        if self.compact:
            return "compact"
        return "bounded, not compact" if self.bounded else "unbounded"

    @property
    def limit(self):
        return float(self.pointwise[-1])


def _check_exponents(p, q):
    if not (p > 0 and q > 0):
        raise DomainError("p and q must be positive", "classification_quantities")


def _area_average(cf, w, a, e, kind):
    z, wt = (sector_rule(*_box_bounds(a), anchor=math.atan2(a.imag, a.real), levels=30,
                         order=8, angular_levels=20)
             if kind == "box" else euclidean_disc_rule(*_disc_bounds(a)))
    total = float(np.dot(cf.values(z), wt))
    return total / (_box_measure(w, a) ** e * (1 - abs(a)) ** 2)


def _box_bounds(a):
    box = CarlesonBox(a)
    return box.r0, 1.0, box.t0, box.t1


def _disc_bounds(a):
    disc = PseudoHyperbolicDisc(a, DISC_RADIUS)
    return disc.center, disc.radius


def classification_quantities(phi, w, v=None, p=2.0, q=None, rings=DEFAULT_RINGS,
                              n_theta=RING_ANGLES):
    """Profiles of ``N_{phi,v*} / w*^(q/p)`` and its box/disc averages on rings.

    Parameters
    ----------
    phi : SelfMap
    w : RadialWeight
        Domain weight (assumed doubling).
    v : RadialWeight, optional
        Target weight; defaults to ``w``.
    p, q : float
        Exponents with ``q >= p`` (use :func:`below_index_quantity` for p > q).
    rings : sequence of int
        Ring depths ``k`` for ``|z| = 1 - 2^-k``.
    """
    v = w if v is None else v
    q = p if q is None else q
    _check_exponents(p, q)
    if q < p:
        raise DomainError("q >= p required; use below_index_quantity", "classification_quantities")
    e = q / p
    cf = CountingFunction(phi, v)
    rings = np.asarray(rings, int)
    radii = ring_radii(rings)
    point, box, disc, angles = [], [], [], []
    for r in radii:
        t, z = _ring_points(r, n_theta)
        vals = cf.values(z) / w.star(r) ** e
        i = int(np.argmax(vals))
        a = complex(z[i])
        point.append(float(vals[i]))
        angles.append(float(t[i]))
        box.append(_area_average(cf, w, a, e, "box"))
        disc.append(_area_average(cf, w, a, e, "disc"))
    point = np.array(point)
    return ClassificationReport(rings, radii, point, np.array(box), np.array(disc),
                                np.array(angles), ring_verdict(point))


# --- boundedness (p > q) ----------------------------------------------------------------

@dataclass
class BelowIndexReport:
    """``int N(N_{phi,v*}/w*)^(p/(p-q)) w dA`` with partial integrals toward the boundary."""

    value: float
    partial: dict
    finite: bool
    label: str = EVIDENCE


def below_index_quantity(phi, w, v=None, p=2.0, q=1.0, levels=24, order=6, n_theta=256):
    """Integral of the non-tangential maximal function of ``N_{phi,v*}/w*``.

    The ratio is sampled on a polar grid (radii geometric toward 1, uniform
    angles); vertices below radius 0.05 keep the raw ratio.
    """
    v = w if v is None else v
    _check_exponents(p, q)
    if not p > q:
        raise DomainError("p > q required", "below_index_quantity")
    s = p / (p - q)
    dv, wv, _ = toward_zero_rule(levels, order)
    order_idx = np.argsort(-dv)
    d, wd = dv[order_idx], wv[order_idx]
    radii = 1.0 - d
    t = 2 * math.pi * np.arange(n_theta) / n_theta
    z = radii[:, None] * np.exp(1j * t)[None, :]
    cf = CountingFunction(phi, v)
    ratio = cf.values(z) / star_table(w)(radii)[:, None]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptyRegion)
        nmax = nontangential_max(ratio, radii)
    nmax = np.where(np.isnan(nmax), np.abs(ratio), nmax)
    radial = (nmax ** s).mean(axis=1) * 2 * radii * w(radii) * wd
    partial = {eps: float(radial[d >= eps].sum()) for eps in PARTIAL_OFFSETS}
    value = float(radial.sum())
    finite = bool(np.isfinite(value)
                  and value <= EXTENSION_FACTOR * partial[PARTIAL_OFFSETS[0]])
    return BelowIndexReport(value, partial, finite)


# --- essential-norm quantities -------------------------------------------------------------

def default_eta(w):
    """``beta + 3`` with ``beta`` the fitted growth exponent of ``hat(w)``."""
    beta, _ = growth_exponent(w)
    return float(beta) + ETA_OFFSET


@dataclass
class EssentialNormReport:
    """Ring profiles of the five comparable quantities A-E; ``values`` holds the outermost ring."""

    rings: np.ndarray
    profiles: dict
    eta: float
    verdicts: dict = field(default_factory=dict)
    label: str = EVIDENCE

    @property
    def values(self):
        return {k: float(v[-1]) for k, v in self.profiles.items()}

    def vanishing(self, key):
        return self.verdicts[key] == "vanishing"


def _d_anchors(phi, a):
    anchors = []
    if phi.has_preimages:
        pre = phi.preimages(a)
        anchors += [float(np.angle(z)) for z in pre[np.isfinite(pre)] if abs(z) > 0]
    t = 2 * math.pi * np.arange(4096) / 4096
    gap = np.abs(1 - np.conj(a) * phi(0.999999 * np.exp(1j * t)))
    anchors.append(float(t[np.argmin(gap)]))
    return anchors


def essential_norm_quantities(phi, w, v=None, p=2.0, q=None, eta=None, rings=DEFAULT_RINGS,
                              n_theta=RING_ANGLES, extra_angles=(0.0,)):
    """Surrogates of the quantities A-E for ``C_phi: A^p_w -> A^q_v``.

    A (pseudohyperbolic-disc average), B (Carleson-box average) and C
    (pointwise ratio) come from :func:`classification_quantities`; D and E
    are the test-function integrals normalized by ``w(S(a))``.  A, B, D, E
    are evaluated at the ring angle maximizing C and at ``extra_angles``;
    each ring keeps the maximum.
    """
    v = w if v is None else v
    q = p if q is None else q
    eta = default_eta(w) if eta is None else float(eta)
    if not eta > 1:
        raise DomainError("eta must exceed 1", "essential_norm_quantities")
    cls = classification_quantities(phi, w, v, p, q, rings, n_theta)
    e = q / p
    cf = CountingFunction(phi, v)
    prof = {k: [] for k in "ABCDE"}
    for r, t_max, c_val in zip(cls.radii, cls.angles, cls.pointwise):
        best = dict.fromkeys("ABDE", 0.0)
        for t in {t_max, *map(float, extra_angles)}:
            a = r * complex(math.cos(t), math.sin(t))
            norm = _box_measure(w, a)
            best["A"] = max(best["A"], _area_average(cf, w, a, e, "disc"))
            best["B"] = max(best["B"], _area_average(cf, w, a, e, "box"))
            z, wt = anchored_disc_rule(_d_anchors(phi, a))
            kern = ((1 - abs(a)) / np.abs(1 - np.conj(a) * phi(z))) ** eta / norm
            best["D"] = max(best["D"], float(np.dot(kern ** e * v(np.abs(z)), wt)))
            z, wt = anchored_disc_rule([t])
            kern = (1 - abs(a)) ** eta / np.abs(1 - np.conj(a) * z) ** (eta + 2 / e) / norm
            best["E"] = max(best["E"], float(np.dot(kern ** e * cf.values(z), wt)))
        for k in "ABDE":
            prof[k].append(best[k])
        prof["C"].append(c_val)
    prof = {k: np.array(val) for k, val in prof.items()}
    return EssentialNormReport(cls.rings, prof, eta, {k: ring_verdict(val) for k, val in prof.items()})


# --- operator-norm estimate -----------------------------------------------------------------

@dataclass
class OperatorNormReport:
    """Lower-bound quantity ``1/(hat(phi(0)) (1-|phi(0)|))`` and the tail condition."""

    quantity: float
    p: float
    tail_constant: float
    tail_constant_extended: float
    tail_condition_holds: bool

    @property
    def two_sided(self):
        """True when the quantity is also an upper bound up to constants."""
        return self.tail_condition_holds


def operator_norm_estimate(phi, w, p=2.0, grid=None):
    """Quantity comparable to ``||C_phi||^p`` from below, with the grid check of
    ``hat(phi_t(r)) <= M hat(t) / hat(r)`` that makes it two-sided."""
    a = abs(phi.phi0)
    quantity = 1.0 / (w.hat(a) * (1 - a))
    tail = moebius_tail_condition(w, grid)
    return OperatorNormReport(float(quantity), float(p), tail.constant,
                              tail.constant_extended, tail.holds)


# --- angular derivatives (Julia-Caratheodory) ---------------------------------------------

@dataclass
class AngularDerivativeReport:
    """Julia-Caratheodory quotients ``(1-|phi(r zeta)|)/(1-r)`` along rays."""

    angles: np.ndarray
    depths: np.ndarray
    quotients: np.ndarray     # (len(depths), len(angles))
    finite: np.ndarray        # per angle: quotient stays bounded
    theorem_applies: bool
    label: str = EVIDENCE

    @property
    def liminf(self):
        return self.quotients[-4:].min(axis=0)

    @property
    def finite_angles(self):
        return self.angles[self.finite]

    def quotient_at(self, theta):
        i = int(np.argmin(np.abs(np.angle(np.exp(1j * (self.angles - theta))))))
        return float(self.quotients[-1, i])

    @property
    def compact(self):
        """Compactness by the angular-derivative characterization; None if it does not apply."""
        if not self.theorem_applies:
            return None
        return not bool(self.finite.any())

    @property
    def verdict(self):
        c = self.compact
        return "inconclusive" if c is None else ("compact" if c else "not compact")


def angular_derivative_scan(phi, w=None, n_angles=256, depths=tuple(range(4, 21))):
    """Scan the quotient along ``n_angles`` rays at radii ``1 - 2^-k``.

    An angle has a finite angular derivative when the deepest quotient is
    below 1e3 and grew by at most 25% since the middle depth.  The
    characterization applies when the weight is reverse doubling or the map
    is bounded valent.
    """
    angles = 2 * math.pi * np.arange(n_angles) / n_angles
    depths = np.asarray(depths, int)
    d = 2.0 ** -depths.astype(float)
    z = (1 - d)[:, None] * np.exp(1j * angles)[None, :]
    quot = (1 - np.abs(phi(z))) / d[:, None]
    mid = quot[len(depths) // 2]
    last = quot[-1]
    finite = (last <= FINITE_QUOTIENT) & (last <= EXTENSION_FACTOR * np.maximum(mid, 1e-300))
    applies = bool(phi.bounded_valent)
    if w is not None and not applies:
        applies = classify_weight(w).reverse_doubling_C is not None
    return AngularDerivativeReport(angles, depths, quot, finite, applies)


@dataclass
class CompactnessReport:
    """Combined verdict from the counting-function profile and the angular scan."""

    classification: ClassificationReport
    angular: AngularDerivativeReport

    @property
    def verdict(self):
        """Angular characterization when it applies, else the ring profile."""
        base = self.classification.verdict
        if base == "unbounded" or self.angular.compact is None:
            return base
        return "compact" if self.angular.compact else "bounded, not compact"

    @property
    def consistent(self):
        a = self.angular.compact
        return a is None or a == self.classification.compact


def compactness_classifier(phi, w, p=2.0, rings=DEFAULT_RINGS):
    """Classify ``C_phi`` on ``A^p_w`` as compact, bounded or unbounded."""
    return CompactnessReport(classification_quantities(phi, w, w, p, p, rings),
                             angular_derivative_scan(phi, w))


# --- boundary ratio of counting function to weight tail ------------------------------------

@dataclass
class Condition113Report:
    """``max_theta hat(z) / hat(phi(z))`` on deep rings."""

    rings: np.ndarray
    profile: np.ndarray
    trend: str
    label: str = EVIDENCE

    @property
    def limit(self):
        return float(self.profile[-1])

    @property
    def holds(self):
        return self.trend == "vanishing"


def condition_113(phi, w, rings=DEEP_RINGS, n_theta=512):
    """Ring maxima of ``hat(|z|) / hat(|phi(z)|)``; the condition holds when they vanish."""
    rings = np.asarray(rings, int)
    profile = []
    t = 2 * math.pi * np.arange(n_theta) / n_theta
    for k in rings:
        d = 2.0 ** -float(k)
        fz = phi((1 - d) * np.exp(1j * t))
        d_phi = np.maximum(1 - np.abs(fz), 1e-300)
        log_ratio = w._log_hat_d(np.array([d]))[0] - w._log_hat_d(d_phi)
        profile.append(float(np.exp(np.max(log_ratio))))
    profile = np.array(profile)
    return Condition113Report(rings, profile, ring_verdict(profile))


# --- Schatten classes -------------------------------------------------------------------------

@dataclass
class SchattenReport:
    """Integral criterion with partial integrals and its dyadic discretization."""

    p: float
    partial: dict             # offset eps -> integral over |z| < 1 - eps
    integral_finite: bool
    dyadic_levels: np.ndarray  # per-level sums
    dyadic_verdict: str
    label: str = EVIDENCE

    @property
    def integral(self):
        return self.partial[min(self.partial)]

    @property
    def growth(self):
        lo, hi = max(self.partial), min(self.partial)
        base = self.partial[lo]
        return math.inf if base == 0 and self.partial[hi] > 0 else (
            1.0 if base == 0 else self.partial[hi] / base)

    @property
    def dyadic(self):
        return float(self.dyadic_levels.sum())

    @property
    def dyadic_finite(self):
        return self.dyadic_verdict == "converging"

    @property
    def cofinite(self):
        return self.integral_finite == self.dyadic_finite

    @property
    def ratio(self):
        if not (self.integral_finite and self.dyadic_finite) or self.dyadic == 0:
            return None
        return self.integral / self.dyadic


def _criterion_partials(cf, w, p, offsets, anchor):
    star = star_table(w)
    out = {}
    for eps in offsets:
        radii, wr = cut_radial_rule(eps)
        if anchor is None:
            n_t = 256
            t = 2 * math.pi * np.arange(n_t) / n_t
            wt = np.full(n_t, 2 * math.pi / n_t)
        else:
            r_t, wr_t = _toward(math.pi, 30, 8)
            t = np.concatenate([anchor + r_t, anchor - r_t])
            wt = np.concatenate([wr_t, wr_t])
        z = radii[:, None] * np.exp(1j * t)[None, :]
        u = cf.values(z) / star(radii)[:, None]
        dens = (wr * radii / (1 - radii) ** 2)[:, None] * wt[None, :] / math.pi
        out[eps] = float(np.sum(u ** (p / 2) * dens))
    return out


def _dyadic_levels(cf, w, p, n_max):
    """Per-level sums of ``(int_R N dA / (w*(z_R) (1-|z_R|)^2))^(p/2)``."""
    xr, wr = gauss_legendre(8)
    xt, wt = gauss_legendre(16)
    star = star_table(w)
    levels = []
    for n in range(n_max + 1):
        r0, r1 = 1 - 2.0 ** -n, 1 - 2.0 ** -(n + 1)
        if n == 0:
            # disc of radius 1/2: radial panels toward the origin resolve log(1/|z|)
            rr, wrr = [], []
            for lo, hi in ((0, 1 / 64), (1 / 64, 1 / 16), (1 / 16, 1 / 4), (1 / 4, 1 / 2)):
                rr.append(lo + (hi - lo) * xr)
                wrr.append((hi - lo) * wr)
            rho, wrho = np.concatenate(rr), np.concatenate(wrr)
            t = 2 * math.pi * np.arange(128) / 128
            z = rho[:, None] * np.exp(1j * t)[None, :]
            wts = (wrho * rho)[:, None] * np.full(128, 2 * math.pi / 128)[None, :] / math.pi
            total = float(np.sum(cf.values(z) * wts))
            center = 0.5
            levels.append((total / (star(np.array([center]))[0] * 0.5 ** 2)) ** (p / 2))
            continue
        k = np.arange(2 ** n)
        arc = 2 * math.pi * 2.0 ** -n
        rho = r0 + (r1 - r0) * xr
        t = (k[:, None] + xt[None, :]) * arc
        z = rho[None, :, None] * np.exp(1j * t)[:, None, :]
        wts = ((r1 - r0) * wr * rho)[None, :, None] * (arc * wt)[None, None, :] / math.pi
        integrals = np.sum(cf.values(z) * wts, axis=(1, 2))
        d = 2.0 ** -n
        levels.append(float(np.sum((integrals / (star(np.array([1 - d]))[0] * d * d))
                                   ** (p / 2))))
    return np.array(levels)


def schatten_criterion(phi, w, p, n_max=10, offsets=PARTIAL_OFFSETS):
    """Integral criterion ``int (N_{phi,w*}/w*)^(p/2) dA/(1-|z|)^2`` and its dyadic sum.

    The integral is reported through partial integrals over ``|z| < 1 - eps``;
    it is flagged divergent when they grow by at least 10x from the largest
    to the smallest offset and finite when they grow by at most 25%.  The
    dyadic verdict comes from the per-level sums.
    """
    if not p > 0:
        raise DomainError("p must be positive", "schatten_criterion")
    cf = CountingFunction(phi, w)
    partial = _criterion_partials(cf, w, p, offsets, _contact_anchor(phi))
    lo, hi = partial[max(partial)], partial[min(partial)]
    finite = bool(np.isfinite(hi) and hi <= EXTENSION_FACTOR * lo) if lo > 0 else bool(hi == 0)
    levels = _dyadic_levels(cf, w, p, n_max)
    return SchattenReport(float(p), partial, finite, levels, series_verdict(levels))


@dataclass
class HilbertSchmidtReport:
    """Integral criterion and ``sum_n ||C_phi e_n||^2`` computed directly."""

    criterion: SchattenReport
    operator_partial: np.ndarray   # cumulative sums over n < dim
    operator_verdict: str

    @property
    def operator_sum(self):
        return float(self.operator_partial[-1])

    @property
    def cofinite(self):
        return self.criterion.integral_finite == (self.operator_verdict == "converging")


def column_norms_squared(phi, w, dim, n_theta=512):
    """``||phi^n||^2 / ||z^n||^2`` in ``A^2_w`` for ``n < dim``."""
    s, d, wq, _ = unit_interval_rule()
    anchor = _contact_anchor(phi)
    if anchor is None:
        t = 2 * math.pi * np.arange(n_theta) / n_theta
        wt = np.full(n_theta, 1.0 / n_theta)
    else:
        # |phi|^(2n) concentrates at the contact point
        r_t, wr_t = _toward(math.pi, 40, 8)
        t = np.concatenate([anchor + r_t, anchor - r_t])
        wt = np.concatenate([wr_t, wr_t]) / (2 * math.pi)
    mod2 = np.abs(phi(s[:, None] * np.exp(1j * t)[None, :])) ** 2
    radial = 2 * s * w._density(d) * wq
    out = np.empty(dim)
    power = np.ones_like(mod2)
    for n in range(dim):
        out[n] = float(radial @ (power @ wt)) / (2 * w.moment(n))
        power *= mod2
    return out


def _power_verdict(increments):
    """Convergence of a positive series with geometric or power-law terms."""
    inc = np.asarray(increments, float)
    geometric = series_verdict(inc, window=8)
    if geometric == "converging":
        return geometric
    n = np.arange(1, inc.size + 1)
    tail = slice(inc.size // 2, None)
    if np.any(inc[tail] <= 0):
        return "inconclusive"
    slope = np.polyfit(np.log(n[tail]), np.log(inc[tail]), 1)[0]
    if slope < -1 - POWER_MARGIN:
        return "converging"
    if slope > -1 + POWER_MARGIN:
        return "diverging"
    return "inconclusive"


def hilbert_schmidt_check(phi, w, dim=64, n_max=10):
    """Compare the Hilbert-Schmidt integral criterion with ``sum ||C_phi e_n||^2``."""
    crit = schatten_criterion(phi, w, 2.0, n_max)
    col = column_norms_squared(phi, w, dim)
    return HilbertSchmidtReport(crit, np.cumsum(col), _power_verdict(col))
