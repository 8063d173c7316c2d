"""Krylov approximant of exp(-tA)v and its computable residual.

Given a k-step Arnoldi decomposition, the approximant is
``y_k(s) = V_k expm(-s H_k) (beta e_1)``.  Its residual against the ODE
``y' = -A y`` is a scalar multiple of the next basis vector, so the residual
norm comes from a single entry of a small matrix exponential; no n-vector is
ever formed.  An a-priori bound on that norm is available from the projected
matrix alone.
"""

from dataclasses import dataclass

import numpy as np

from .dense import expm, log_norm_2, norm_2, phi1


def _check_time(s):
    s = float(s)
    if s < 0.0:
        raise ValueError(f"time must be nonnegative, got {s}")
    return s


def _projected_coeffs(d, s):
    """expm(-s H_k) applied to beta * e_1, as a length-k vector."""
    e1 = np.zeros(d.k)
    e1[0] = d.beta
    return expm(-s * d.h_square) @ e1


def evaluate(d, s):
    """Approximant y_k(s) = V_k expm(-s H_k) (beta e_1).

    Parameters
    ----------
    d : ArnoldiDecomposition
        Decomposition with at least one completed step.
    s : float
        Evaluation time, >= 0.

    Returns
    -------
    ndarray
        Length-n approximation to exp(-sA) v.
    """
    s = _check_time(s)
    if d.k < 1:
        raise RuntimeError("decomposition has no steps")
    return d.basis @ _projected_coeffs(d, s)


def residual_scalar(d, s):
    """Signed residual coefficient beta_k(s).

    The residual of the approximant is ``r_k(s) = beta_k(s) v_{k+1}`` with
    ``beta_k(s) = -h_{k+1,k} e_k^T expm(-s H_k) (beta e_1)``, so
    ``norm(r_k(s)) = abs(beta_k(s))``.  After breakdown this is exactly 0.
    """
    s = _check_time(s)
    if d.k < 1:
        raise RuntimeError("decomposition has no steps")
    if d.breakdown:
        return 0.0
    return -d.h_last * _projected_coeffs(d, s)[-1]


def residual_norm(d, s):
    """norm(r_k(s)) = abs(beta_k(s))."""
    return abs(residual_scalar(d, s))


def residual_bound(d, s):
    """A-priori bound: s * h_{k+1,k} * norm(H_k) * beta * phi1(-s * omega).

    ``omega`` is the smallest eigenvalue of the symmetric part of H_k.  For
    k >= 2 the bound dominates norm(r_k(s)) whenever the field of values of
    A lies in the right half plane; it is loose but needs no extra
    exponentials.  At k = 1 the derivation's boundary term e_k^T e_1 does
    not vanish and the formula is not a bound (the solver domain is
    k_max >= 2, so this degenerate case never drives a restart).
    """
    s = _check_time(s)
    if d.k < 1:
        raise RuntimeError("decomposition has no steps")
    if d.breakdown:
        return 0.0
    H = d.h_square
    omega = log_norm_2(H)
    return s * d.h_last * norm_2(H) * d.beta * phi1(-s * omega)


@dataclass(frozen=True)
class ResidualSample:
    """Residual norm at one time point."""

    s: float
    rnorm: float


@dataclass(frozen=True)
class MonitorGrid:
    """Equispaced residual check points (q/count)*t for q = 1..count."""

    t: float
    count: int = 6

    def __post_init__(self):
        if self.t <= 0.0:
            raise ValueError(f"monitor grid needs t > 0, got {self.t}")
        if self.count < 1:
            raise ValueError(f"monitor grid needs count >= 1, got {self.count}")

    @property
    def samples(self):
        return [(q / self.count) * self.t for q in range(1, self.count + 1)]


def monitor(d, grid, tol):
    """Residual check over a grid of time points.

    Parameters
    ----------
    d : ArnoldiDecomposition
    grid : MonitorGrid
    tol : float
        Absolute residual tolerance, > 0 (inf is allowed and trivially
        converges).

    Returns
    -------
    (bool, ResidualSample)
        Whether max_q norm(r_k(s_q)) <= tol, and the worst sample.
    """
    if not tol > 0.0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if d.breakdown:
        return True, ResidualSample(s=grid.samples[-1], rnorm=0.0)
    worst = ResidualSample(s=grid.samples[0], rnorm=-1.0)
    for s in grid.samples:
        rnorm = abs(residual_scalar(d, s))
        if rnorm > worst.rnorm:
            worst = ResidualSample(s=s, rnorm=rnorm)
    return worst.rnorm <= tol, worst
