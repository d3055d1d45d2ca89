"""Argument-principle counting of zeros inside circles."""
import math

import numpy as np

from ..errors import BoundaryRoot, UnsupportedForm, WindingAmbiguous

CONTOUR_POINTS = 4096
RESIDUE_THRESHOLD = 0.25
BOUNDARY_NUDGE = 1e-12


def winding_number(g, r, n=CONTOUR_POINTS, max_refinements=60):
    """Winding number of ``g`` around 0 along |zeta| = r (counter-clockwise).

    The contour starts with ``n`` equispaced samples; any arc on which the
    argument jumps by more than pi/4 is bisected until resolved.

    Returns
    -------
    float
        The (unrounded) winding number.
    """
    t = np.linspace(0.0, 2 * math.pi, n + 1)
    vals = np.asarray(g(r * np.exp(1j * t)), complex)
    vals[-1] = vals[0]
    for _ in range(max_refinements):
        if np.any(vals == 0):
            raise BoundaryRoot(f"zero on the contour |z|={r}", "winding_number")
        dphi = np.angle(vals[1:] / vals[:-1])
        bad = np.abs(dphi) > math.pi / 4
        if not bad.any():
            return float(dphi.sum() / (2 * math.pi))
        idx = np.flatnonzero(bad)
        if np.min(t[idx + 1] - t[idx]) < 1e-15:
            raise BoundaryRoot(f"zero within resolution of |z|={r}", "winding_number")
        tm = 0.5 * (t[idx] + t[idx + 1])
        vm = np.asarray(g(r * np.exp(1j * tm)), complex)
        t = np.insert(t, idx + 1, tm)
        vals = np.insert(vals, idx + 1, vm)
    raise WindingAmbiguous("argument tracking did not resolve", "winding_number")


def _winding_count(phi, z, r):
    w = winding_number(lambda s: phi(s) - z, r)
    k = round(w)
    if abs(w - k) >= RESIDUE_THRESHOLD:
        raise WindingAmbiguous(f"winding {w:.4f} not near an integer", "count_preimages")
    return int(k)


def count_preimages(phi, z, r, method="auto"):
    """Number n(r, z) of solutions of phi(zeta) = z with |zeta| <= r, with multiplicity.

    ``method`` is ``"roots"`` (explicit preimages, needs ``phi.preimages``),
    ``"winding"`` (argument principle on |zeta| = r) or ``"auto"``.
    """
    if abs(z) >= 1:
        raise ValueError("z must lie in the unit disc")
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    if method == "auto":
        method = "roots" if getattr(phi, "has_preimages", False) else "winding"
    if method == "roots":
        pre = np.abs(np.asarray(phi.preimages(z)))
        for radius in (r, r + BOUNDARY_NUDGE):
            if not np.any(np.abs(pre - radius) < 1e-13):
                return int(np.count_nonzero(pre <= radius))
        raise BoundaryRoot(f"preimage on |zeta|={r}", "count_preimages")
    if method != "winding":
        raise UnsupportedForm(f"unknown method {method!r}", "count_preimages")
    try:
        return _winding_count(phi, z, r)
    except BoundaryRoot:
        return _winding_count(phi, z, r + BOUNDARY_NUDGE)
