"""Pure-numpy implementations of the hot kernels.

Used whenever the compiled extension is unavailable (or disabled via
EXPMRT_PURE_PYTHON=1).  Semantics match the compiled versions; floating-point
results may differ in the last bits because numpy's dot products accumulate
in a different order than the C loops.
"""

import numpy as np


def mgs_sweep(V, w, k, h):
    """Orthogonalize ``w`` in place against the first ``k`` columns of ``V``.

    One modified Gram-Schmidt pass, no reorthogonalization.  Coefficients go
    into ``h[:k]``; returns the 2-norm of the orthogonalized ``w``.
    """
    for i in range(k):
        c = np.dot(V[:, i], w)
        h[i] = c
        w -= c * V[:, i]
    return float(np.linalg.norm(w))


def residual_march(E, u, scale, tol, n_t):
    """March ``u := E @ u`` until the residual proxy exceeds tolerance.

    After step ``i`` the vector ``u`` represents the projected solution at
    time ``(i/n_t) * t``; the residual magnitude there is ``|scale * u[-1]|``.
    Returns the 1-based index of the first step where it exceeds ``tol``,
    leaving ``u`` at the previous (still admissible) grid point, or
    ``n_t + 1`` with ``u`` fully advanced if no step exceeds.
    """
    for i in range(1, n_t + 1):
        u_next = E @ u
        if abs(scale * u_next[-1]) > tol:
            return i
        u[:] = u_next
    return n_t + 1
