"""Incremental Arnoldi decomposition with modified Gram-Schmidt.

Builds, one step at a time, orthonormal basis vectors ``v_1..v_{k+1}`` and an
upper-Hessenberg ``H`` of shape (k+1, k) satisfying ``A V_k = V_{k+1} H``.
Single-pass MGS, no reorthogonalization.
"""

import numpy as np

from . import _kernels as kernels
from .errors import ZeroStartVector

# A step whose orthogonalized remainder is this small (relative to the
# pre-orthogonalization norm of A v_k) means v_1..v_k span an invariant
# subspace; the subdiagonal entry is then set to exactly zero.
BREAKDOWN_RTOL = 1e-12

_INITIAL_CAPACITY = 32


class ArnoldiDecomposition:
    """Krylov basis and Hessenberg projection, grown one step at a time.

    Parameters are supplied through :meth:`start`; instances are not meant
    to be constructed directly.

    Attributes
    ----------
    op : LinearOperator
        The operator the subspace is built for.
    k : int
        Number of completed steps.
    beta : float
        2-norm of the starting vector.
    breakdown : bool
        True once a step produced a numerically invariant subspace.  The
        last subdiagonal entry of ``h_bar`` is exactly zero in that case
        and no further steps are possible.
    """

    def __init__(self, op, v1, beta, capacity):
        n = op.n
        capacity = min(max(int(capacity), 1), n)
        self.op = op
        self.k = 0
        self.beta = beta
        self.breakdown = False
        # F order keeps each basis vector and each H column contiguous,
        # which is what the compiled MGS kernel expects.
        self._V = np.zeros((n, capacity + 1), order="F")
        self._H = np.zeros((capacity + 1, capacity), order="F")
        self._V[:, 0] = v1

    @classmethod
    def start(cls, op, v, max_steps=None):
        """Begin a decomposition from starting vector ``v``.

        Parameters
        ----------
        op : LinearOperator
            Square operator of dimension n.
        v : array_like
            Starting vector of length n; must be nonzero.
        max_steps : int, optional
            Capacity hint.  Storage grows on demand either way; passing the
            intended step budget avoids reallocation.

        Returns
        -------
        ArnoldiDecomposition
            Fresh decomposition with ``k = 0`` and ``beta = norm(v)``.

        Raises
        ------
        ZeroStartVector
            If ``norm(v) == 0``; the caller should short-circuit to the
            zero solution.
        """
        v = np.ascontiguousarray(v, dtype=np.float64)
        if v.ndim != 1 or v.shape[0] != op.n:
            raise ValueError(
                f"start vector has shape {v.shape}, operator dimension is {op.n}"
            )
        beta = float(np.linalg.norm(v))
        if beta == 0.0:
            raise ZeroStartVector("Arnoldi start vector is zero")
        capacity = max_steps if max_steps is not None else min(_INITIAL_CAPACITY, op.n)
        return cls(op, v / beta, beta, capacity)

    @property
    def basis(self):
        """View of the first k orthonormal basis vectors, shape (n, k)."""
        return self._V[:, : self.k]

    @property
    def basis_next(self):
        """The (k+1)-th basis vector, or None after breakdown."""
        if self.breakdown:
            return None
        return self._V[:, self.k]

    @property
    def h_bar(self):
        """Hessenberg matrix with its extra row, shape (k+1, k)."""
        return self._H[: self.k + 1, : self.k]

    @property
    def h_square(self):
        """Leading k-by-k block of the Hessenberg matrix."""
        return self._H[: self.k, : self.k]

    @property
    def h_last(self):
        """Subdiagonal entry h_{k+1,k}; exactly 0.0 after breakdown."""
        if self.k == 0:
            raise RuntimeError("no steps taken yet")
        return float(self._H[self.k, self.k - 1])

    def _grow(self):
        n = self.op.n
        old = self._V.shape[1] - 1
        capacity = min(2 * old, n)
        V = np.zeros((n, capacity + 1), order="F")
        H = np.zeros((capacity + 1, capacity), order="F")
        V[:, : old + 1] = self._V
        H[: old + 1, :old] = self._H
        self._V = V
        self._H = H

    def step(self):
        """Extend the basis by one vector.

        Applies the operator to the newest basis vector, orthogonalizes the
        result against all previous vectors (one MGS pass), and appends the
        new column of H.  If the orthogonalized remainder is negligible
        the subspace is invariant: ``breakdown`` is set, the subdiagonal
        entry becomes exactly zero, and the residual of the projected
        problem vanishes identically.

        Returns
        -------
        ArnoldiDecomposition
            self, for chaining.

        Raises
        ------
        RuntimeError
            On stepping past breakdown or past the full space (k = n).
        """
        if self.breakdown:
            raise RuntimeError("cannot step past breakdown")
        j = self.k
        if j >= self.op.n:
            raise RuntimeError("Krylov basis already spans the full space")
        if j >= self._H.shape[1]:
            self._grow()

        w = np.ascontiguousarray(self.op.apply(self._V[:, j]), dtype=np.float64)
        if w.shape != (self.op.n,):
            raise ValueError("operator.apply returned wrong shape")
        w_norm_initial = float(np.linalg.norm(w))

        hcol = self._H[:, j]
        hnorm = kernels.mgs_sweep(self._V, w, j + 1, hcol)

        self.k = j + 1
        if hnorm <= BREAKDOWN_RTOL * w_norm_initial:
            hcol[j + 1] = 0.0
            self.breakdown = True
        else:
            hcol[j + 1] = hnorm
            self._V[:, j + 1] = w / hnorm
        return self

    def orthogonality_defect(self):
        """max |v_i^T v_j - delta_ij| over all currently stored vectors."""
        m = self.k if self.breakdown else self.k + 1
        V = self._V[:, :m]
        G = V.T @ V - np.eye(m)
        return float(np.max(np.abs(G))) if m else 0.0
