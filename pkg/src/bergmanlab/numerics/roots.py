"""Simultaneous polynomial root finding (Aberth-Ehrlich)."""
import numpy as np


def _trim(coeffs):
    c = np.asarray(coeffs, dtype=complex)
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        raise ValueError("zero polynomial")
    return c[: nz[-1] + 1]


def _horner(c_desc, z):
    """Evaluate p and p' for descending coefficient rows ``c_desc`` (B, d+1) at z (B, d)."""
    p = np.broadcast_to(c_desc[:, :1], z.shape).astype(complex)
    dp = np.zeros_like(p)
    for k in range(1, c_desc.shape[1]):
        dp = dp * z + p
        p = p * z + c_desc[:, k:k + 1]
    return p, dp


def aberth_roots(coeffs, tol=1e-14, max_iter=400):
    """All roots of polynomials given by ascending coefficients.

    Parameters
    ----------
    coeffs : array_like, shape (d+1,) or (B, d+1)
        ``c[0] + c[1] z + ... + c[d] z^d``; in the batched form all rows share
        the degree ``d`` (leading coefficients must be non-zero).

    Returns
    -------
    roots : ndarray, shape (d,) or (B, d)
        Roots with multiplicity.  Rows that fail to converge are recomputed
        from companion-matrix eigenvalues and Newton-polished.
    """
    c = np.asarray(coeffs, dtype=complex)
    single = c.ndim == 1
    if single:
        c = _trim(c)[None, :]
    deg = c.shape[1] - 1
    if deg < 1:
        out = np.empty((c.shape[0], 0), complex)
        return out[0] if single else out
    if np.any(c[:, -1] == 0):
        raise ValueError("leading coefficient must be non-zero in batched mode")
    c = c / c[:, -1:]
    if deg == 1:
        out = -c[:, :1]
        return out[0] if single else out
    c_desc = c[:, ::-1]
    # Fujiwara-type bound for the initial circle
    radius = 2 * np.max(np.abs(c[:, :-1]) ** (1.0 / np.arange(deg, 0, -1)), axis=1)
    radius = np.maximum(radius, 1e-3)
    angles = 2 * np.pi * np.arange(deg) / deg + 0.4
    z = radius[:, None] * np.exp(1j * angles)[None, :] - c[:, -2:-1] / deg
    active = np.ones(c.shape[0], bool)
    eye = np.eye(deg, dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            break
        za = z[active]
        p, dp = _horner(c_desc[active], za)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dp != 0, p / dp, 0)
            diff = za[:, :, None] - za[:, None, :]
            diff[:, eye] = 1.0
            inv = 1.0 / diff
            inv[:, eye] = 0.0
            corr = ratio / (1 - ratio * inv.sum(axis=2))
        corr = np.where(np.isfinite(corr), corr, 0)
        z[active] = za - corr
        done = np.all(np.abs(corr) <= tol * (1 + np.abs(za)), axis=1)
        idx = np.flatnonzero(active)
        active[idx[done]] = False
    for i in np.flatnonzero(active):
        z[i] = _companion_roots(c[i])
    return z[0] if single else z


def _companion_roots(c_asc):
    r = np.roots(c_asc[::-1])
    c_desc = c_asc[::-1][None, :]
    for _ in range(3):
        p, dp = _horner(c_desc, r[None, :])
        step = np.where(dp[0] != 0, p[0] / dp[0], 0)
        r = r - step
    return r
