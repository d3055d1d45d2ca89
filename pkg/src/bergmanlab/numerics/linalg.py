"""Dense Hermitian spectra."""
import warnings

import numpy as np

from ..errors import NotHermitian, NumericalDiagnostic

HERMITIAN_TOL = 1e-10


def hermitian_eigenvalues(M, psd=False, tol=HERMITIAN_TOL):
    """Eigenvalues of a Hermitian matrix in descending order.

    The matrix is symmetrized before solving; asymmetry beyond ``tol``
    (relative to the largest entry, absolute for tiny matrices) raises
    ``NotHermitian``.  With ``psd=True`` eigenvalues below ``-tol`` emit a
    ``NumericalDiagnostic`` warning.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("square matrix required")
    if M.size == 0:
        return np.empty(0)
    scale = max(1.0, float(np.max(np.abs(M))))
    asym = float(np.max(np.abs(M - M.conj().T)))
    if asym > tol * scale:
        raise NotHermitian(f"max asymmetry {asym:.3e}", "hermitian_eigenvalues")
    H = 0.5 * (M + M.conj().T)
    lam = np.linalg.eigvalsh(H)[::-1]
    if psd and lam[-1] < -tol * scale:
        warnings.warn(f"negative eigenvalue {lam[-1]:.3e} for a PSD operator",
                      NumericalDiagnostic, stacklevel=2)
    return lam
