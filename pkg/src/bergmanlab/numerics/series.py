"""Power-series evaluation with certified truncation."""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SeriesTail:
    terms_used: int
    tail_bound: float
    converged: bool

    def __post_init__(self):
        if self.tail_bound < 0:
            raise ValueError("tail bound must be non-negative")


def geometric_tail_bound(last_term, q):
    """Bound on sum_{k>=1} last_term * q**k; infinite when q >= 1."""
    if q >= 1:
        return float("inf")
    return float(abs(last_term) * q / (1 - q))


def truncate(abs_terms, ratio_bounds, tol):
    """Smallest N such that the tail after term N-1 is certified below ``tol``.

    ``ratio_bounds[n]`` must bound |t_{k+1}/t_k| for every k >= n.
    """
    abs_terms = np.asarray(abs_terms, float)
    q = np.asarray(ratio_bounds, float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        bounds = np.where(q < 1, abs_terms * q / (1 - q), np.inf)
    ok = np.flatnonzero(bounds <= tol)
    if ok.size == 0:
        return SeriesTail(abs_terms.size, float(bounds[-1]) if bounds.size else float("inf"),
                          False)
    n = int(ok[0])
    return SeriesTail(n + 1, float(bounds[n]), True)


def power_series_on_circle(coeffs, r, n_theta):
    """Values of sum_j coeffs[j] (r e^{i theta})^j at theta_k = 2 pi k / n_theta.

    Coefficients beyond ``n_theta`` are folded, so the result is the exact
    value of the truncated polynomial at the nodes.
    """
    c = np.asarray(coeffs, complex) * r ** np.arange(len(coeffs))
    folded = np.zeros(n_theta, complex)
    np.add.at(folded, np.arange(c.size) % n_theta, c)
    return np.fft.ifft(folded) * n_theta
