"""Truncated matrices of composition operators on ``A^2_w``."""
from dataclasses import dataclass, field
import math

import numpy as np

from ..errors import DomainError, NonConvergence
from ..numerics.linalg import hermitian_eigenvalues
from ..numerics.quadrature import unit_interval_rule

MAX_DIM = 128
ANGLE_NODES = 1024
MAX_ANGLE_NODES = 8192
ENTRY_TOL = 1e-8


@dataclass
class CompositionMatrix:
    """``M[n, m] = <C_phi e_m, e_n>`` for the orthonormal monomials ``e_n = z^n / sqrt(2 w_n)``.

    Column ``m`` holds the coefficients of ``C_phi e_m``.
    """

    matrix: np.ndarray
    singular_values: np.ndarray
    map: object = field(repr=False)
    weight: object = field(repr=False)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def norm(self):
        """Largest singular value, a lower bound for ``||C_phi||``."""
        return float(self.singular_values[0])

    def schatten_norm(self, p):
        """``(sum s_k^p)^(1/p)`` over the truncated spectrum."""
        s = self.singular_values
        return float(np.sum(s ** p) ** (1.0 / p)) if p != math.inf else float(s.max())


def _coefficients(phi, w, dim, n_theta):
    s, d, wq, _ = unit_interval_rule()
    t = 2 * math.pi * np.arange(n_theta) / n_theta
    vals = phi(s[:, None] * np.exp(1j * t)[None, :])
    radial = s * w._density(d) * wq            # 2 s w(s) ds / 2
    powers = s[:, None] ** np.arange(dim)[None, :]
    out = np.empty((dim, dim), complex)
    col = np.ones_like(vals)
    for m in range(dim):
        # Fourier coefficients k < dim of phi(s e^{it})^m for each radius
        coeff = np.fft.fft(col, axis=1)[:, :dim] / n_theta
        out[:, m] = (radial[:, None] * powers * coeff).sum(axis=0)
        col = col * vals
    return out


def composition_matrix(phi, w, dim=32, n_theta=None):
    """Truncated composition operator with singular values from the Gram matrix.

    Entries are ``int phi^m conj(z^n) w dA / (2 sqrt(w_m w_n))``, computed
    per radius by FFT in the angle; the angular sample count doubles until
    the entries change by less than 1e-8.

    Raises
    ------
    NonConvergence
        When the entries do not settle by 8192 angular samples.
    """
    if not 1 <= int(dim) <= MAX_DIM:
        raise DomainError(f"dim must lie in [1, {MAX_DIM}]", "composition_matrix")
    dim = int(dim)
    n = n_theta or max(ANGLE_NODES, 4 * dim)
    raw = _coefficients(phi, w, dim, n)
    while True:
        finer = _coefficients(phi, w, dim, 2 * n)
        change = float(np.max(np.abs(finer - raw)))
        raw, n = finer, 2 * n
        if change <= ENTRY_TOL:
            break
        if n >= MAX_ANGLE_NODES:
            raise NonConvergence(f"entries still change by {change:.2e}", "composition_matrix",
                                 None, change)
    mom = w.moments(dim)
    M = raw / np.sqrt(mom[:, None] * mom[None, :])
    gram = M.conj().T @ M
    lam = np.clip(hermitian_eigenvalues(gram, psd=True), 0.0, None)
    return CompositionMatrix(M, np.sqrt(lam), phi, w)
