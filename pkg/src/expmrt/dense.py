"""Small dense kernels applied to projected (Hessenberg-sized) matrices.

Everything here targets matrices of dimension at most a few hundred, so the
O(k^3) algorithms are used without apology.
"""

import math

import numpy as np
import scipy.linalg


def _as_square(M, name="M"):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be a square 2-d array, got shape {M.shape}")
    return M


def expm(M):
    """Matrix exponential of a small dense square matrix.

    Pade scaling-and-squaring (via scipy); accurate to near unit roundoff for
    norms up to ~1e3 thanks to the internal norm-based scaling.
    Rejects non-square or non-finite input.
    """
    M = _as_square(M)
    if not np.all(np.isfinite(M)):
        raise ValueError("expm requires finite entries")
    return scipy.linalg.expm(M)


def phi1(z):
    """phi_1(z) = (e^z - 1) / z with the removable singularity at 0 filled in.

    Evaluated as expm1(z)/z to avoid cancellation; for |z| below 1e-8 a
    truncated Taylor series is used (the quadratic term is already below
    roundoff there).
    """
    z = float(z)
    if abs(z) < 1e-8:
        return 1.0 + z / 2.0 + z * z / 6.0
    return math.expm1(z) / z


def log_norm_2(M):
    """Smallest eigenvalue of the symmetric part (M + M^T)/2.

    For a system y' = -M y this is the decay constant: ||exp(-tM)|| is
    bounded by exp(-t * log_norm_2(M)) whenever the value is nonnegative.
    """
    M = _as_square(M)
    sym = 0.5 * (M + M.T)
    return float(np.linalg.eigvalsh(sym)[0])


def norm_2(M):
    """Spectral norm (largest singular value)."""
    M = _as_square(M)
    return float(np.linalg.norm(M, 2))
