"""Exception types shared across the solver stack."""


class ExpmrtError(Exception):
    """Base class for solver-domain failures."""


class ZeroStartVector(ExpmrtError):
    """The Krylov start vector has zero norm; the solution is identically zero."""


class StagnationError(ExpmrtError):
    """The restart-step finder could not locate a grid step with residual below
    tolerance before hitting the subdivision cap.  In exact arithmetic such a
    step always exists for k >= 2; hitting this means floating point (or the
    degenerate k = 1 case) prevents any guaranteed progress."""

    def __init__(self, message, n_t=None):
        super().__init__(message)
        self.n_t = n_t


class NoConvergenceError(ExpmrtError):
    """Restart-cycle cap exhausted without meeting the residual tolerance."""

    def __init__(self, message, restarts=None):
        super().__init__(message)
        self.restarts = restarts


class NoConvergenceAtStep(ExpmrtError):
    """A fixed-substep cycle reached the maximum Krylov dimension without
    converging (the fixed-step baseline has no rescue mechanism)."""

    def __init__(self, k_max, substep):
        super().__init__(
            f"substep {substep}: residual tolerance not met at k_max={k_max}"
        )
        self.k_max = k_max
        self.substep = substep


class SaiSingularProjection(ExpmrtError):
    """The shift-and-invert Hessenberg block is numerically singular, so the
    back-transformed projection is undefined."""


class MatrixMarketError(ExpmrtError):
    """Matrix Market parse failure; carries the 1-based offending line."""

    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line
