"""Linear operators the Krylov machinery iterates with.

An operator only has to expose its dimension and a deterministic
matrix-vector product; the two concrete flavors wrap a scipy CSR matrix and
a plain ndarray.
"""

import numpy as np
import scipy.sparse


class LinearOperator:
    """Abstract real n-by-n operator: ``apply(x) -> A @ x``."""

    n: int

    def apply(self, x):
        raise NotImplementedError

    @property
    def nnz(self):
        """Stored-entry count, used by the deterministic cost model."""
        return self.n * self.n


class SparseOperator(LinearOperator):
    """CSR-backed operator for generated or file-loaded matrices."""

    def __init__(self, matrix):
        matrix = scipy.sparse.csr_matrix(matrix)
        if matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"operator must be square, got shape {matrix.shape}")
        self.matrix = matrix
        self.n = matrix.shape[0]

    def apply(self, x):
        return self.matrix @ x

    @property
    def nnz(self):
        return self.matrix.nnz

    def dense(self):
        return self.matrix.toarray()


class DenseOperator(LinearOperator):
    """ndarray-backed operator; handy for small tests and oracles."""

    def __init__(self, matrix):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"operator must be square, got shape {matrix.shape}")
        self.matrix = matrix
        self.n = matrix.shape[0]

    def apply(self, x):
        return self.matrix @ x

    def dense(self):
        return self.matrix
