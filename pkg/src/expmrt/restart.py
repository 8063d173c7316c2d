"""Residual-time restarted evaluation of y = exp(-tA) v.

The driver runs Arnoldi cycles of bounded length.  When a cycle's residual
meets tolerance over the whole remaining interval, the approximant is the
answer.  Otherwise a step finder locates the largest grid time delta such
that the residual stays within tolerance on [0, delta]; the approximant at
delta becomes the next cycle's start vector and the interval shrinks by
delta.  Since the residual always vanishes at 0, delta is positive and the
iteration makes guaranteed progress for any restart length.

Also here: the adaptive variant that re-tunes the restart length from
per-cycle cost probes, and a fixed-substep baseline with no rescue
mechanism, kept for benchmark contrast.
"""

import itertools
import logging
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kernels
from .approximant import MonitorGrid, evaluate, monitor, residual_scalar
from .arnoldi import ArnoldiDecomposition
from .dense import expm
from .errors import (
    NoConvergenceAtStep,
    NoConvergenceError,
    StagnationError,
    ZeroStartVector,
)

logger = logging.getLogger(__name__)

# Step-finder grid: initial subdivision count and the cap past which we
# declare stagnation (possible only in floating point, or for k = 1 where
# the residual need not vanish at time zero).
N_T_START = 100
N_T_CAP = 2**20


@dataclass(frozen=True)
class SolverConfig:
    """Everything a solve needs besides the operator and start vector.

    Parameters
    ----------
    t : float
        Final time, > 0.
    tol : float
        Absolute residual tolerance, > 0.
    k_max : int
        Maximum Krylov steps per cycle, 2 <= k_max <= n.
    method : str
        One of ``rt``, ``art``, ``sai-rt``, ``fixed-step``; used by the
        command-line dispatcher, ignored by the solver functions.
    monitor_points : int
        Residual check points per cycle (equispaced over the remaining
        interval).
    monitor_stride : int
        Check the residual only every this-many Arnoldi steps (always at
        the last step of a cycle).  1 checks every step.
    gamma : float or None
        Shift for the shift-and-invert variant; None means t/10.
    cost_model : str
        ``wall`` (elapsed seconds) or ``deterministic`` (operation counts;
        reproducible run to run).
    delta_grid : int
        Grid resolution of the shift-and-invert step search.
    substeps : int
        Substep count for the fixed-step baseline.
    max_restarts : int
        Cap on the number of restarts before giving up.
    art_growth : int
        Restart-length increment when the current length looks optimal.
    art_threshold : float
        Minimum fractional cost gain required to switch lengths.
    nnz_factor : float
        Weight of one operator application in deterministic cost, as a
        multiple of the dimension n.
    """

    t: float
    tol: float
    k_max: int
    method: str = "rt"
    monitor_points: int = 6
    monitor_stride: int = 1
    gamma: float | None = None
    cost_model: str = "wall"
    delta_grid: int = 200
    substeps: int = 1
    max_restarts: int = 10_000
    art_growth: int = 5
    art_threshold: float = 0.05
    nnz_factor: float = 1.0

    def validate(self, n):
        if not self.t > 0.0:
            raise ValueError(f"t must be positive, got {self.t}")
        if not self.tol > 0.0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if not 2 <= self.k_max <= n:
            raise ValueError(f"k_max must satisfy 2 <= k_max <= n={n}, got {self.k_max}")
        if self.monitor_points < 1:
            raise ValueError("monitor_points must be >= 1")
        if self.monitor_stride < 1:
            raise ValueError("monitor_stride must be >= 1")
        if self.gamma is not None and not self.gamma > 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.cost_model not in ("wall", "deterministic"):
            raise ValueError(f"unknown cost model {self.cost_model!r}")
        if self.delta_grid < 2:
            raise ValueError("delta_grid must be >= 2")
        if self.substeps < 1:
            raise ValueError("substeps must be >= 1")
        if self.max_restarts < 0:
            raise ValueError("max_restarts must be >= 0")
        if self.art_growth < 1:
            raise ValueError("art_growth must be >= 1")
        if not 0.0 <= self.art_threshold < 1.0:
            raise ValueError("art_threshold must lie in [0, 1)")


@dataclass(frozen=True)
class CostModel:
    """How per-cycle cost is measured.

    ``wall`` reports elapsed seconds.  ``deterministic`` reports abstract
    units: n * nnz_factor per operator application and k^3 per dense k-by-k
    exponential, identical across runs.
    """

    mode: str = "wall"
    nnz_factor: float = 1.0

    def __post_init__(self):
        if self.mode not in ("wall", "deterministic"):
            raise ValueError(f"unknown cost model {self.mode!r}")

    @property
    def deterministic(self):
        return self.mode == "deterministic"


class CostMeter:
    """Accumulates cycle costs under a CostModel.

    Work inside an ``excluded()`` block (the step finder) is never billed:
    deterministic charges are suppressed and the elapsed wall time is
    subtracted.
    """

    def __init__(self, model):
        self.model = model
        self.total = 0.0
        self._units = 0.0
        self._t0 = time.perf_counter()
        self._excluded_time = 0.0
        self._suppress = False

    def begin_cycle(self):
        self._units = 0.0
        self._excluded_time = 0.0
        self._t0 = time.perf_counter()

    def matvec(self, n):
        if not self._suppress:
            self._units += n * self.model.nnz_factor

    def dense_exp(self, k, count=1):
        if not self._suppress:
            self._units += count * float(k) ** 3

    @contextmanager
    def excluded(self):
        t0 = time.perf_counter()
        prev = self._suppress
        self._suppress = True
        try:
            yield
        finally:
            self._suppress = prev
            self._excluded_time += time.perf_counter() - t0

    def snapshot(self):
        """Cost accrued so far in the current cycle."""
        if self.model.deterministic:
            return self._units
        return time.perf_counter() - self._t0 - self._excluded_time

    def end_cycle(self):
        cost = self.snapshot()
        self.total += cost
        return cost


@dataclass(frozen=True)
class DeltaResult:
    """Outcome of the restart-step search.

    ``u`` is the projected coefficient vector at ``delta``: the approximant
    there is ``V_k (beta * u)``.  ``n_t_used`` is the subdivision count the
    search settled on.  The shift-and-invert search additionally reports
    the smallest residual norm seen on its grid (``floor``) and whether
    that floor exceeds the requested tolerance (``floor_exceeds_tol``),
    which caps the accuracy reachable through this restart.
    """

    delta: float
    u: np.ndarray
    n_t_used: int
    floor: float | None = None
    floor_exceeds_tol: bool = False


@dataclass
class CycleRecord:
    """One restart cycle: what it did and what it cost."""

    cycle_index: int
    restart_length: int
    steps_in_cycle: int
    delta: float
    t_remaining: float
    residual_max_monitor: float
    cost_in_cycle: float
    warning: bool = False


@dataclass
class AdaptationRecord:
    """One restart-length decision with the estimates that drove it."""

    cycle_index: int
    estimates: dict
    current_length: int
    chosen_length: int


@dataclass
class SolveReport:
    """Cycle-by-cycle account of a solve.

    ``accuracy_floor`` is the worst reachable-accuracy value recorded by a
    shift-and-invert restart whose residual could not be pushed below the
    tolerance anywhere on the remaining interval; None when that never
    happened.
    """

    method: str
    converged: bool
    total_steps: int
    restarts: int
    final_residual: float
    cost_total: float
    cost_mode: str
    elapsed: float
    accuracy_floor: float | None = None
    cycles: list = field(default_factory=list)
    adaptations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)


def find_delta(d, t, tol, k=None):
    """Largest grid time delta with the residual within tol on [0, delta].

    Doubles a subdivision count n_t (from 100) until the residual at the
    first grid point t/n_t is within tol, then marches the projected
    solution across the grid and stops one point before the first
    exceedance.  The returned coefficient vector is recomputed at delta by
    a direct dense exponential, discarding any drift the repeated
    multiplications accumulated.

    Parameters
    ----------
    d : ArnoldiDecomposition
        At least one completed step.
    t : float
        Remaining interval length, > 0.
    tol : float
        Absolute residual tolerance, > 0.
    k : int, optional
        Use only the leading k-by-k projection block (k <= d.k).  Defaults
        to the full decomposition.  Used by the adaptive driver to probe
        shorter restart lengths mid-cycle.

    Returns
    -------
    DeltaResult
        delta in (0, t]; if the residual never exceeds tol on the grid
        (the finder was not actually needed), delta = t.

    Raises
    ------
    StagnationError
        If the residual at t/n_t still exceeds tol once n_t has grown
        past 2**20.  The residual vanishes at 0 for every k >= 2, so this
        arises only from floating point, or for k = 1 where it need not
        vanish.
    """
    if k is None:
        k = d.k
    if not 1 <= k <= d.k:
        raise ValueError(f"k must lie in [1, {d.k}], got {k}")
    if not t > 0.0:
        raise ValueError(f"t must be positive, got {t}")
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol}")

    hbar = d.h_bar
    H = np.ascontiguousarray(hbar[:k, :k])
    scale = abs(float(hbar[k, k - 1])) * d.beta

    e1 = np.zeros(k)
    e1[0] = 1.0
    if scale == 0.0:
        # Invariant subspace: the residual is identically zero.
        return DeltaResult(delta=t, u=expm(-t * H) @ e1, n_t_used=N_T_START)

    n_t = N_T_START
    while True:
        E = expm(-(t / n_t) * H)
        if scale * abs(E[k - 1, 0]) <= tol:
            break
        if n_t > N_T_CAP:
            # A subdivision count beyond the cap was tried and the residual
            # one grid point in still exceeds tol: no progress is possible.
            raise StagnationError(
                f"residual exceeds tol={tol:g} one grid point into the "
                f"interval even at {n_t} subdivisions",
                n_t=n_t,
            )
        n_t *= 2

    u = e1.copy()
    i = kernels.residual_march(np.ascontiguousarray(E), u, scale, tol, n_t)
    delta = ((i - 1) / n_t) * t if i <= n_t else t
    return DeltaResult(delta=delta, u=expm(-delta * H) @ e1, n_t_used=n_t)


def _zero_report(method, model, wall0):
    return SolveReport(
        method=method,
        converged=True,
        total_steps=0,
        restarts=0,
        final_residual=0.0,
        cost_total=0.0,
        cost_mode=model.mode,
        elapsed=time.perf_counter() - wall0,
        warnings=["start vector is zero; the solution is identically zero"],
    )


def _finish(report, meter, wall0):
    report.cost_total = meter.total
    report.elapsed = time.perf_counter() - wall0
    return report


def _log_defect(cycle_index, dec):
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(
            "cycle %d: basis orthogonality defect %.3e",
            cycle_index,
            dec.orthogonality_defect(),
        )


def rt_solve(op, v, cfg, cm=None):
    """Evaluate exp(-cfg.t * A) v by residual-time restarting.

    Parameters
    ----------
    op : LinearOperator
    v : array_like
        Start vector of length op.n.  A zero vector short-circuits to the
        zero solution.
    cfg : SolverConfig
    cm : CostModel, optional
        Defaults to one built from ``cfg.cost_model`` / ``cfg.nnz_factor``.

    Returns
    -------
    (ndarray, SolveReport)
        The approximation and the per-cycle log.  On success every cycle
        ended with the residual within cfg.tol on its monitor grid.

    Raises
    ------
    StagnationError
        Propagated from the step finder; carries the partial report as a
        ``report`` attribute.
    NoConvergenceError
        Restart cap exhausted; also carries ``report``.
    """
    cfg.validate(op.n)
    model = cm if cm is not None else CostModel(cfg.cost_model, cfg.nnz_factor)
    wall0 = time.perf_counter()
    try:
        dec = ArnoldiDecomposition.start(op, v, max_steps=cfg.k_max)
    except ZeroStartVector:
        return np.zeros(op.n), _zero_report("rt", model, wall0)

    meter = CostMeter(model)
    report = SolveReport(
        method="rt",
        converged=False,
        total_steps=0,
        restarts=0,
        final_residual=math.inf,
        cost_total=0.0,
        cost_mode=model.mode,
        elapsed=0.0,
    )
    t_rem = cfg.t
    y = None

    for cycle_index in itertools.count():
        meter.begin_cycle()
        grid = MonitorGrid(t_rem, cfg.monitor_points)
        converged = False
        worst_rnorm = math.inf
        steps = 0
        while steps < cfg.k_max:
            dec.step()
            steps += 1
            meter.matvec(op.n)
            if dec.breakdown:
                converged = True
                worst_rnorm = 0.0
                break
            if steps % cfg.monitor_stride == 0 or steps == cfg.k_max:
                ok, worst = monitor(dec, grid, cfg.tol)
                meter.dense_exp(dec.k, count=grid.count)
                worst_rnorm = worst.rnorm
                if ok:
                    converged = True
                    break
        report.total_steps += steps
        _log_defect(cycle_index, dec)

        if converged:
            y = evaluate(dec, t_rem)
            meter.dense_exp(dec.k)
            cost = meter.end_cycle()
            report.cycles.append(
                CycleRecord(
                    cycle_index=cycle_index,
                    restart_length=cfg.k_max,
                    steps_in_cycle=steps,
                    delta=t_rem,
                    t_remaining=0.0,
                    residual_max_monitor=worst_rnorm,
                    cost_in_cycle=cost,
                )
            )
            report.converged = True
            report.final_residual = worst_rnorm
            break

        try:
            with meter.excluded():
                res = find_delta(dec, t_rem, cfg.tol)
        except StagnationError as err:
            meter.end_cycle()
            err.report = _finish(report, meter, wall0)
            raise

        v_next = dec.basis @ (dec.beta * res.u)
        t_next = t_rem - res.delta
        cost = meter.end_cycle()
        report.cycles.append(
            CycleRecord(
                cycle_index=cycle_index,
                restart_length=cfg.k_max,
                steps_in_cycle=steps,
                delta=res.delta,
                t_remaining=max(t_next, 0.0),
                residual_max_monitor=worst_rnorm,
                cost_in_cycle=cost,
            )
        )
        report.restarts += 1

        if t_next <= 0.0:
            # The step finder certified the residual through the entire
            # remaining interval on its own, finer grid even though the
            # coarse monitor disagreed; accept its end state but flag it.
            y = v_next
            report.converged = True
            report.final_residual = worst_rnorm
            report.cycles[-1].warning = True
            report.warnings.append(
                "step finder covered the whole remaining interval although "
                "the monitor grid still exceeded tolerance"
            )
            break

        if report.restarts > cfg.max_restarts:
            err = NoConvergenceError(
                f"no convergence within {cfg.max_restarts} restarts "
                f"(t remaining {t_next:.3e} of {cfg.t:.3e})",
                restarts=report.restarts,
            )
            err.report = _finish(report, meter, wall0)
            raise err

        try:
            dec = ArnoldiDecomposition.start(op, v_next, max_steps=cfg.k_max)
        except ZeroStartVector:
            y = v_next
            report.converged = True
            report.final_residual = 0.0
            report.warnings.append(
                "restart vector underflowed to zero; returning the zero solution"
            )
            break
        t_rem = t_next

    _finish(report, meter, wall0)
    return y, report


def art_checkpoints(k_max):
    """Probe lengths for adaptive restarting.

    Nearest integers to k_max/3, 2*k_max/3 and 5*k_max/6 (half rounds up),
    clamped to at least 2, plus k_max itself; sorted and deduplicated.
    """
    pts = {max(2, int(math.floor(f * k_max + 0.5))) for f in (1 / 3, 2 / 3, 5 / 6)}
    pts.add(int(k_max))
    return sorted(pts)


def art_choose_next_length(estimates, current, k_max, growth=5, threshold=0.05):
    """Next restart length given projected remaining-cost estimates.

    ``estimates`` maps candidate lengths to projected costs and must
    contain ``current``; non-finite entries (failed probes) are ignored.
    Switches to the cheapest candidate only when it undercuts the current
    length's estimate by more than ``threshold`` (fractional); ties keep
    the current length.  When the current length is the strict minimizer
    and below k_max, it grows by ``growth``, capped at k_max.
    """
    cur_est = estimates[current]
    switch = {
        k: e
        for k, e in estimates.items()
        if k != current and math.isfinite(e) and e < (1.0 - threshold) * cur_est
    }
    if switch:
        return min(switch, key=lambda k: (switch[k], -k))
    others = [e for k, e in estimates.items() if k != current and math.isfinite(e)]
    if current < k_max and (not others or cur_est < min(others)):
        return min(current + growth, k_max)
    return current


def art_solve(op, v, cfg, cm=None):
    """Residual-time restarting with adaptive restart length.

    Runs the same cycles as :func:`rt_solve`, but probes a fixed set of
    checkpoint lengths during each cycle: at checkpoint k it records the
    cost spent on the first k steps and the restart step delta_k the
    truncated projection would allow.  At each restart the projected
    remaining cost (t_remaining / delta_k) * cost_k picks the next cycle's
    length; see :func:`art_choose_next_length` for the switching rule.
    Probe work is excluded from the billed cost.  The convergence criterion
    is untouched: adaptation changes cost, never accuracy.

    Parameters, returns and errors as :func:`rt_solve`; the report
    additionally carries one AdaptationRecord per restart.
    """
    cfg.validate(op.n)
    model = cm if cm is not None else CostModel(cfg.cost_model, cfg.nnz_factor)
    wall0 = time.perf_counter()
    try:
        dec = ArnoldiDecomposition.start(op, v, max_steps=cfg.k_max)
    except ZeroStartVector:
        return np.zeros(op.n), _zero_report("art", model, wall0)

    meter = CostMeter(model)
    report = SolveReport(
        method="art",
        converged=False,
        total_steps=0,
        restarts=0,
        final_residual=math.inf,
        cost_total=0.0,
        cost_mode=model.mode,
        elapsed=0.0,
    )
    checkpoints = set(art_checkpoints(cfg.k_max))
    k_cur = cfg.k_max
    t_rem = cfg.t
    y = None

    for cycle_index in itertools.count():
        meter.begin_cycle()
        grid = MonitorGrid(t_rem, cfg.monitor_points)
        converged = False
        worst_rnorm = math.inf
        steps = 0
        probes = {}
        while steps < k_cur:
            dec.step()
            steps += 1
            meter.matvec(op.n)
            if dec.breakdown:
                converged = True
                worst_rnorm = 0.0
                break
            if steps % cfg.monitor_stride == 0 or steps == k_cur:
                ok, worst = monitor(dec, grid, cfg.tol)
                meter.dense_exp(dec.k, count=grid.count)
                worst_rnorm = worst.rnorm
                if ok:
                    converged = True
                    break
            if steps in checkpoints:
                cost_k = meter.snapshot()
                try:
                    with meter.excluded():
                        dres = find_delta(dec, t_rem, cfg.tol, k=steps)
                except StagnationError:
                    probes[steps] = (None, cost_k)
                else:
                    probes[steps] = (dres, cost_k)
        report.total_steps += steps
        _log_defect(cycle_index, dec)

        if converged:
            y = evaluate(dec, t_rem)
            meter.dense_exp(dec.k)
            cost = meter.end_cycle()
            report.cycles.append(
                CycleRecord(
                    cycle_index=cycle_index,
                    restart_length=k_cur,
                    steps_in_cycle=steps,
                    delta=t_rem,
                    t_remaining=0.0,
                    residual_max_monitor=worst_rnorm,
                    cost_in_cycle=cost,
                )
            )
            report.converged = True
            report.final_residual = worst_rnorm
            break

        cost_full = meter.snapshot()
        probed = probes.get(k_cur)
        if probed is not None and probed[0] is not None:
            res = probed[0]
        else:
            try:
                with meter.excluded():
                    res = find_delta(dec, t_rem, cfg.tol)
            except StagnationError as err:
                meter.end_cycle()
                err.report = _finish(report, meter, wall0)
                raise

        v_next = dec.basis @ (dec.beta * res.u)
        t_next = t_rem - res.delta
        cost = meter.end_cycle()
        report.cycles.append(
            CycleRecord(
                cycle_index=cycle_index,
                restart_length=k_cur,
                steps_in_cycle=steps,
                delta=res.delta,
                t_remaining=max(t_next, 0.0),
                residual_max_monitor=worst_rnorm,
                cost_in_cycle=cost,
            )
        )
        report.restarts += 1

        if t_next <= 0.0:
            y = v_next
            report.converged = True
            report.final_residual = worst_rnorm
            report.cycles[-1].warning = True
            report.warnings.append(
                "step finder covered the whole remaining interval although "
                "the monitor grid still exceeded tolerance"
            )
            break

        if report.restarts > cfg.max_restarts:
            err = NoConvergenceError(
                f"no convergence within {cfg.max_restarts} restarts "
                f"(t remaining {t_next:.3e} of {cfg.t:.3e})",
                restarts=report.restarts,
            )
            err.report = _finish(report, meter, wall0)
            raise err

        estimates = {}
        for pk, (dres, cost_k) in probes.items():
            if pk == k_cur:
                continue
            if dres is None or dres.delta <= 0.0:
                estimates[pk] = math.inf
            else:
                estimates[pk] = (t_next / dres.delta) * cost_k
        estimates[k_cur] = (t_next / res.delta) * cost_full
        k_next = art_choose_next_length(
            estimates, k_cur, cfg.k_max, cfg.art_growth, cfg.art_threshold
        )
        report.adaptations.append(
            AdaptationRecord(
                cycle_index=cycle_index,
                estimates=estimates,
                current_length=k_cur,
                chosen_length=k_next,
            )
        )
        if k_next != k_cur:
            logger.debug(
                "cycle %d: restart length %d -> %d", cycle_index, k_cur, k_next
            )
        k_cur = k_next

        try:
            dec = ArnoldiDecomposition.start(op, v_next, max_steps=k_cur)
        except ZeroStartVector:
            y = v_next
            report.converged = True
            report.final_residual = 0.0
            report.warnings.append(
                "restart vector underflowed to zero; returning the zero solution"
            )
            break
        t_rem = t_next

    _finish(report, meter, wall0)
    return y, report


def fixed_step_solve(op, v, cfg, substeps=None):
    """Equal-substep baseline propagator with no rescue mechanism.

    Splits [0, t] into equal substeps of length tau and runs one
    non-restarted Krylov cycle per substep, checking the residual at tau
    only.  A substep that fails to meet tolerance within k_max steps
    raises; there is no step-size adjustment.  Deliberately naive, kept
    for benchmark contrast with the restarted drivers.

    Parameters
    ----------
    op, v, cfg : as :func:`rt_solve`
    substeps : int, optional
        Overrides ``cfg.substeps``.

    Raises
    ------
    NoConvergenceAtStep
        Carries the failing substep index and the partial ``report``.
    """
    cfg.validate(op.n)
    substeps = cfg.substeps if substeps is None else int(substeps)
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    model = CostModel(cfg.cost_model, cfg.nnz_factor)
    wall0 = time.perf_counter()
    meter = CostMeter(model)
    report = SolveReport(
        method="fixed-step",
        converged=False,
        total_steps=0,
        restarts=0,
        final_residual=math.inf,
        cost_total=0.0,
        cost_mode=model.mode,
        elapsed=0.0,
    )
    tau = cfg.t / substeps
    v_cur = np.asarray(v, dtype=float)
    rnorm = math.inf

    for j in range(substeps):
        meter.begin_cycle()
        try:
            dec = ArnoldiDecomposition.start(op, v_cur, max_steps=cfg.k_max)
        except ZeroStartVector:
            report.converged = True
            report.final_residual = 0.0
            report.warnings.append(
                "vector reached zero; remaining substeps are the zero solution"
            )
            _finish(report, meter, wall0)
            return np.zeros(op.n), report
        converged = False
        steps = 0
        while steps < cfg.k_max:
            dec.step()
            steps += 1
            meter.matvec(op.n)
            if dec.breakdown:
                converged = True
                rnorm = 0.0
                break
            rnorm = abs(residual_scalar(dec, tau))
            meter.dense_exp(dec.k)
            if rnorm <= cfg.tol:
                converged = True
                break
        report.total_steps += steps
        if not converged:
            meter.end_cycle()
            err = NoConvergenceAtStep(cfg.k_max, j)
            err.report = _finish(report, meter, wall0)
            raise err
        v_cur = evaluate(dec, tau)
        meter.dense_exp(dec.k)
        cost = meter.end_cycle()
        report.cycles.append(
            CycleRecord(
                cycle_index=j,
                restart_length=cfg.k_max,
                steps_in_cycle=steps,
                delta=tau,
                t_remaining=cfg.t * (substeps - 1 - j) / substeps,
                residual_max_monitor=rnorm,
                cost_in_cycle=cost,
            )
        )

    report.converged = True
    report.final_residual = rnorm
    report.restarts = substeps - 1
    _finish(report, meter, wall0)
    return v_cur, report
