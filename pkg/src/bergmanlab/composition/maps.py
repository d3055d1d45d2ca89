"""Analytic self-maps of the unit disc in a few closed forms."""
import math

import numpy as np

from ..errors import ConfigError, DomainError, UnsupportedForm
from ..numerics.roots import aberth_roots

BOUNDARY_RADIUS = 1 - 1e-6
BOUNDARY_SAMPLES = 4096
BOUNDARY_SLACK = 1e-9
EXPLICIT_FORMS = ("polynomial", "affine", "moebius", "blaschke", "lens")


def _as_complex(z):
    return np.asarray(z, complex)


def _out(x):
    x = np.asarray(x)
    return complex(x) if x.ndim == 0 else x


class SelfMap:
    """An analytic map of the disc into itself.

    Build instances with :meth:`polynomial`, :meth:`moebius`, :meth:`affine`,
    :meth:`lens`, :meth:`blaschke` or :meth:`chain`.  Construction samples
    ``|phi|`` on ``|z| = 1 - 1e-6`` and rejects maps leaving the disc.

    Attributes
    ----------
    form : str
    params : dict
    phi0 : complex
        ``phi(0)``.
    degree : int or None
        Polynomial degree, or the number of Blaschke factors.
    boundary_margin : float
        ``max |phi|`` over the boundary sample.
    """

    def __init__(self, form, params, func, deriv, degree=None, parts=None):
        self.form = form
        self.params = params
        self._func = func
        self._deriv = deriv
        self.degree = degree
        self._parts = parts or []
        self.phi0 = complex(func(np.zeros(1, complex))[0])
        t = 2 * math.pi * np.arange(BOUNDARY_SAMPLES) / BOUNDARY_SAMPLES
        edge = np.abs(func(BOUNDARY_RADIUS * np.exp(1j * t)))
        self.boundary_margin = float(edge.max())
        if not self.boundary_margin <= 1 + BOUNDARY_SLACK:
            raise DomainError(f"map leaves the disc (max |phi| = {self.boundary_margin:.6g})",
                              f"SelfMap.{form}")

    # -- constructors ---------------------------------------------------------

    @classmethod
    def polynomial(cls, coeffs):
        """``sum c_k z^k`` from ascending coefficients."""
        c = np.trim_zeros(np.asarray(coeffs, complex), "b")
        if c.size == 0:
            c = np.zeros(1, complex)
        dc = c[1:] * np.arange(1, c.size)
        return cls("polynomial", {"coeffs": c},
                   lambda z: np.polynomial.polynomial.polyval(_as_complex(z), c),
                   lambda z: np.polynomial.polynomial.polyval(_as_complex(z), dc) if dc.size
                   else np.zeros_like(_as_complex(z)),
                   degree=c.size - 1)

    @classmethod
    def identity(cls):
        return cls.polynomial([0, 1])

    @classmethod
    def affine(cls, s, c=0.0):
        """``s z + c``."""
        s, c = complex(s), complex(c)
        return cls("affine", {"s": s, "c": c},
                   lambda z: s * _as_complex(z) + c,
                   lambda z: np.full_like(_as_complex(z), s),
                   degree=1 if s != 0 else 0)

    @classmethod
    def moebius(cls, a):
        """The involution ``(a - z) / (1 - conj(a) z)``."""
        a = complex(a)
        if not abs(a) < 1:
            raise DomainError("moebius parameter must lie in the disc", "SelfMap.moebius")
        ac = a.conjugate()
        return cls("moebius", {"a": a},
                   lambda z: (a - _as_complex(z)) / (1 - ac * _as_complex(z)),
                   lambda z: -(1 - abs(a) ** 2) / (1 - ac * _as_complex(z)) ** 2,
                   degree=1)

    @classmethod
    def lens(cls, gamma):
        """``1 - (1 - z)^gamma`` on the principal branch, ``0 < gamma < 1``."""
        gamma = float(gamma)
        if not 0 < gamma < 1:
            raise DomainError("lens exponent must lie in (0, 1)", "SelfMap.lens")
        return cls("lens", {"gamma": gamma},
                   lambda z: 1 - (1 - _as_complex(z)) ** gamma,
                   lambda z: gamma * (1 - _as_complex(z)) ** (gamma - 1))

    @classmethod
    def blaschke(cls, zeros, rotation=1.0):
        """``rotation * prod (z - a_k) / (1 - conj(a_k) z)`` with ``|rotation| <= 1``."""
        a = np.atleast_1d(np.asarray(zeros, complex))
        lam = complex(rotation)
        if a.size == 0 or np.any(np.abs(a) >= 1) or abs(lam) > 1:
            raise DomainError("Blaschke zeros must lie in the disc", "SelfMap.blaschke")

        def factors(z):
            z = _as_complex(z)[..., None]
            return (z - a) / (1 - np.conj(a) * z)

        def func(z):
            return lam * np.prod(factors(z), axis=-1)

        def deriv(z):
            z = _as_complex(z)
            f = factors(z)
            df = (1 - np.abs(a) ** 2) / (1 - np.conj(a) * z[..., None]) ** 2
            total = np.zeros_like(z)
            for k in range(a.size):
                others = np.prod(np.delete(f, k, axis=-1), axis=-1) if a.size > 1 else 1.0
                total = total + df[..., k] * others
            return lam * total

        return cls("blaschke", {"zeros": a, "rotation": lam}, func, deriv, degree=a.size)

    @classmethod
    def chain(cls, maps):
        """``maps[-1] o ... o maps[0]`` (the first map is applied first)."""
        maps = list(maps)
        if not maps:
            raise DomainError("empty composition chain", "SelfMap.chain")

        def func(z):
            out = _as_complex(z)
            for m in maps:
                out = m._func(out)
            return out

        def deriv(z):
            out = _as_complex(z)
            total = np.ones_like(out)
            for m in maps:
                total = total * m._deriv(out)
                out = m._func(out)
            return total

        return cls("chain", {"maps": maps}, func, deriv, parts=maps)

    @classmethod
    def from_config(cls, cfg):
        """Build from ``{"form": ..., ...}``; complex numbers may be ``[re, im]``."""
        def cplx(x):
            if isinstance(x, (list, tuple)):
                if len(x) != 2:
                    raise ConfigError(f"complex value must be [re, im], got {x!r}", "SelfMap")
                return complex(x[0], x[1])
            return complex(x)

        try:
            form = cfg["form"]
            if form == "identity":
                return cls.identity()
            if form == "polynomial":
                return cls.polynomial([cplx(c) for c in cfg["coeffs"]])
            if form == "affine":
                return cls.affine(cplx(cfg["s"]), cplx(cfg.get("c", 0.0)))
            if form == "moebius":
                return cls.moebius(cplx(cfg["a"]))
            if form == "lens":
                return cls.lens(cfg["gamma"])
            if form == "blaschke":
                return cls.blaschke([cplx(a) for a in cfg["zeros"]],
                                    cplx(cfg.get("rotation", 1.0)))
            if form == "chain":
                return cls.chain([cls.from_config(c) for c in cfg["maps"]])
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"bad self-map config {cfg!r}: {exc}", "SelfMap") from exc
        raise ConfigError(f"unknown self-map form {cfg.get('form')!r}", "SelfMap")

    # -- evaluation -----------------------------------------------------------

    def __call__(self, z):
        return _out(self._func(_as_complex(z)))

    def derivative(self, z):
        return _out(self._deriv(_as_complex(z)))

    def __repr__(self):
        return f"SelfMap.{self.form}({self.params})"

    @property
    def is_constant(self):
        return self.degree == 0

    @property
    def has_preimages(self):
        """True when preimages can be listed in closed or algebraic form."""
        return self.form in EXPLICIT_FORMS and not self.is_constant

    @property
    def bounded_valent(self):
        """True when every point has a bounded number of preimages."""
        if self.form == "chain":
            return all(m.bounded_valent for m in self._parts)
        return True

    # -- preimages --------------------------------------------------------------

    def preimages(self, z):
        """Solutions of ``phi(zeta) = z`` in the open disc, with multiplicity."""
        return self.preimage_array(np.atleast_1d(z))[0]

    def preimage_array(self, z):
        """Preimages of each entry of ``z``; shape (len(z), m), ``nan`` marks none.

        Raises
        ------
        UnsupportedForm
            For composition chains and constant maps.
        """
        if not self.has_preimages:
            raise UnsupportedForm(f"no preimage enumeration for form {self.form!r}",
                                  "preimages")
        z = np.atleast_1d(_as_complex(z)).ravel()
        p = self.params
        if self.form == "affine":
            pre = ((z - p["c"]) / p["s"])[:, None]
        elif self.form == "moebius":
            a = p["a"]
            pre = ((a - z) / (1 - a.conjugate() * z))[:, None]
        elif self.form == "lens":
            g = p["gamma"]
            w = 1 - z
            # arg(1 - zeta) = arg(w) / gamma must stay in (-pi/2, pi/2)
            ok = np.abs(np.angle(w)) < g * math.pi / 2
            pre = np.where(ok, 1 - w ** (1 / g), np.nan)[:, None]
        elif self.form == "polynomial":
            pre = _polynomial_preimages(p["coeffs"], z)
        else:
            pre = _blaschke_preimages(p["zeros"], p["rotation"], z)
        pre = np.where(np.abs(pre) < 1, pre, np.nan + 0j)
        return pre


def _polynomial_preimages(c, z):
    deg = c.size - 1
    if deg == 1:
        return ((z - c[0]) / c[1])[:, None]
    if deg == 2:
        a, b, c0 = c[2], c[1], c[0] - z
        disc = np.sqrt(b * b - 4 * a * c0)
        # cancellation-free pair
        sign = np.where((np.conj(b) * disc).real >= 0, 1.0, -1.0)
        q = -0.5 * (b + sign * disc)
        with np.errstate(divide="ignore", invalid="ignore"):
            r1 = q / a
            r2 = np.where(q != 0, c0 / q, 0)
        return np.stack([r1, r2], axis=1)
    rows = np.repeat(c[None, :], z.size, axis=0)
    rows[:, 0] -= z
    return aberth_roots(rows)


def _blaschke_preimages(a, lam, z):
    # lam prod (zeta - a_k) - z prod (1 - conj(a_k) zeta) = 0
    num = np.array([1.0 + 0j])
    den = np.array([1.0 + 0j])
    for ak in a:
        num = np.polynomial.polynomial.polymul(num, [-ak, 1])
        den = np.polynomial.polynomial.polymul(den, [1, -np.conj(ak)])
    rows = lam * num[None, :] - z[:, None] * den[None, :]
    return aberth_roots(rows)
