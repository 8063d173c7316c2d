"""Test operators: a convection-diffusion discretization and seeded randoms.

The convection-diffusion operator lives on the unit square with
homogeneous Dirichlet boundaries: a five-point stencil for
-div(D grad u) with a discontinuous diagonal diffusion tensor, plus a
convection term Pe * (v . grad u) assembled in the split (skew-adjoint)
form 1/2 (v1 u_x + v2 u_y) + 1/2 ((v1 u)_x + (v2 u)_y) with central
differences, which makes its matrix contribution exactly skew-symmetric.
Entries are scaled by h^2, i.e. the matrix represents h^2 * L; this keeps
the symmetric-part norm mesh-independent (a few thousand for the standard
coefficients) while the skew part stays O(Pe * h).

The random generator produces well-posed operators (symmetric part
positive semidefinite) for property tests, deterministically per seed.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse

from .dense import norm_2
from .operators import DenseOperator, SparseOperator


@dataclass(frozen=True)
class ConvDiffSpec:
    """Mesh and physics of the convection-diffusion problem.

    N counts mesh points per side INCLUDING the boundary, so the spacing
    is h = 1/(N-1) and the operator acts on the (N-2)^2 interior values.
    """

    N: int
    pe: float

    def __post_init__(self):
        if self.N < 4:
            raise ValueError(f"N must be >= 4, got {self.N}")
        if self.pe < 0.0:
            raise ValueError(f"Peclet number must be >= 0, got {self.pe}")


def _diffusion_coefficient(gx, gy):
    """D1 nodal values: 1000 inside [0.25, 0.75]^2, 1 elsewhere."""
    inside = (gx >= 0.25) & (gx <= 0.75) & (gy >= 0.25) & (gy <= 0.75)
    return np.where(inside, 1.0e3, 1.0)


def build_conv_diff(spec):
    """Assemble the convection-diffusion operator and start vector.

    Returns
    -------
    (SparseOperator, ndarray)
        CSR operator of dimension (N-2)^2 with x-fastest interior
        ordering, and the unit-normalized samples of sin(pi x) sin(pi y)
        at the interior nodes.

    Notes
    -----
    Diffusion uses face coefficients by arithmetic mean of the two nodal
    values; D2 = D1 / 2.  The velocity field is v1 = x + y, v2 = x - y
    (divergence-free), so interior convection rows sum to zero.  The
    convection stencil couples only to neighbors, never the diagonal, and
    boundary couplings drop symmetrically, so the skew-symmetry of the
    convection part is exact, not approximate.
    """
    N, pe = spec.N, float(spec.pe)
    m = N - 2
    n = m * m
    h = 1.0 / (N - 1)

    g = np.arange(N) * h
    GX, GY = np.meshgrid(g, g, indexing="xy")
    D1 = _diffusion_coefficient(GX, GY)
    D2 = 0.5 * D1
    V1 = GX + GY
    V2 = GX - GY

    # Face values and convection weights at the interior nodes; [j, i]
    # layout with x along axis 1 so that C-order flattening is x-fastest.
    ctr = (slice(1, -1), slice(1, -1))
    d1e = 0.5 * (D1[ctr] + D1[1:-1, 2:])
    d1w = 0.5 * (D1[ctr] + D1[1:-1, :-2])
    d2n = 0.5 * (D2[ctr] + D2[2:, 1:-1])
    d2s = 0.5 * (D2[ctr] + D2[:-2, 1:-1])
    ce = pe * h * (V1[ctr] + V1[1:-1, 2:]) / 4.0
    cw = pe * h * (V1[ctr] + V1[1:-1, :-2]) / 4.0
    cn = pe * h * (V2[ctr] + V2[2:, 1:-1]) / 4.0
    cs = pe * h * (V2[ctr] + V2[:-2, 1:-1]) / 4.0

    P = np.arange(n).reshape(m, m)
    diag = d1e + d1w + d2n + d2s

    rows = [P.ravel()]
    cols = [P.ravel()]
    data = [diag.ravel()]
    # east neighbor (i+1), present for i < m-1
    rows.append(P[:, :-1].ravel())
    cols.append(P[:, 1:].ravel())
    data.append((-d1e + ce)[:, :-1].ravel())
    # west neighbor (i-1)
    rows.append(P[:, 1:].ravel())
    cols.append(P[:, :-1].ravel())
    data.append((-d1w - cw)[:, 1:].ravel())
    # north neighbor (j+1)
    rows.append(P[:-1, :].ravel())
    cols.append(P[1:, :].ravel())
    data.append((-d2n + cn)[:-1, :].ravel())
    # south neighbor (j-1)
    rows.append(P[1:, :].ravel())
    cols.append(P[:-1, :].ravel())
    data.append((-d2s - cs)[1:, :].ravel())

    A = scipy.sparse.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    ).tocsr()

    xi = g[1:-1]
    XI, YI = np.meshgrid(xi, xi, indexing="xy")
    v = (np.sin(np.pi * XI) * np.sin(np.pi * YI)).ravel()
    v /= np.linalg.norm(v)
    return SparseOperator(A), v


def build_random_wellposed(n, seed):
    """Random dense operator with positive-semidefinite symmetric part.

    A = S^T S / norm(S^T S) + (K - K^T)/2 / norm(...), both parts scaled
    to unit 2-norm, so the field of values sits in the right half plane
    by construction.  The start vector is a random unit vector.  Fully
    deterministic per seed.

    Returns
    -------
    (DenseOperator, ndarray)
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((n, n))
    sym = S.T @ S
    sym /= norm_2(sym)
    K = rng.standard_normal((n, n))
    skew = 0.5 * (K - K.T)
    skew /= norm_2(skew)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    return DenseOperator(sym + skew), v
