"""Command-line front end.

Loads or generates an operator and start vector, dispatches one of the
solve methods, writes the solution vector (Matrix Market array format) and
a per-cycle history CSV, and prints a one-line summary.

Exit codes: 0 success, 1 I/O or configuration error, 2 no convergence
within the restart or step budget, 3 stagnation of the restart-step
finder, 4 solve finished but a shift-and-invert restart could not reach
the requested tolerance (accuracy floor).
"""

import argparse
import csv
import sys
from dataclasses import dataclass

from . import mmio
from .errors import (
    ExpmrtError,
    NoConvergenceAtStep,
    NoConvergenceError,
    StagnationError,
)
from .operators import SparseOperator
from .problems import ConvDiffSpec, build_conv_diff, build_random_wellposed
from .restart import SolverConfig, art_solve, fixed_step_solve, rt_solve
from .sai import sai_rt_solve

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NO_CONVERGENCE = 2
EXIT_STAGNATION = 3
EXIT_ACCURACY_FLOOR = 4

_SOLVERS = {
    "rt": rt_solve,
    "art": art_solve,
    "sai-rt": sai_rt_solve,
    "fixed-step": fixed_step_solve,
}

_HISTORY_COLUMNS = [
    "cycle_index",
    "restart_length",
    "delta",
    "t_remaining",
    "residual_max_monitor",
    "steps_cumulative",
    "cost_units",
    "warning_flag",
]


class _ArgumentParser(argparse.ArgumentParser):
    """Exit 1 on bad flags; 2 is reserved for non-convergence."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    """One CLI invocation, resolved from flags."""

    matrix: str | None = None
    vector: str | None = None
    problem: str | None = None
    N: int | None = None
    pe: float | None = None
    n: int | None = None
    seed: int = 0
    t: float = 1.0
    tol: float = 1e-6
    kmax: int = 40
    method: str = "rt"
    gamma: str | float = "auto"
    substeps: int = 1
    monitor_points: int = 6
    delta_grid: int = 200
    cost_model: str = "wall"
    out: str | None = None
    history: str | None = None

    def gamma_value(self):
        if isinstance(self.gamma, str):
            if self.gamma.lower() == "auto":
                return None
            try:
                return float(self.gamma)
            except ValueError:
                raise ValueError(
                    f"--gamma must be a number or 'auto', got {self.gamma!r}"
                ) from None
        return float(self.gamma)

    def validate(self):
        from_files = self.matrix is not None or self.vector is not None
        if self.problem is not None and from_files:
            raise ValueError("give either --matrix/--vector or --problem, not both")
        if self.problem is None:
            if self.matrix is None or self.vector is None:
                raise ValueError("need both --matrix and --vector, or --problem")
        elif self.problem == "cd2d":
            if self.N is None or self.pe is None:
                raise ValueError("--problem cd2d needs --N and --pe")
        elif self.problem == "random":
            if self.n is None:
                raise ValueError("--problem random needs --n")
        else:
            raise ValueError(f"unknown problem {self.problem!r}")
        if self.method not in _SOLVERS:
            raise ValueError(f"unknown method {self.method!r}")
        self.gamma_value()


def build_parser():
    p = _ArgumentParser(
        prog="expmrt",
        description="Evaluate exp(-tA)v by restarted Krylov subspace methods.",
    )
    src = p.add_argument_group("input (matrix/vector files or a generated problem)")
    src.add_argument("--matrix", metavar="PATH", help="operator, Matrix Market coordinate file")
    src.add_argument("--vector", metavar="PATH", help="start vector, Matrix Market array file")
    src.add_argument("--problem", choices=("cd2d", "random"), help="generate the problem instead")
    src.add_argument("--N", type=int, help="cd2d: mesh points per side incl. boundary")
    src.add_argument("--pe", type=float, help="cd2d: Peclet number")
    src.add_argument("--n", type=int, help="random: dimension")
    src.add_argument("--seed", type=int, default=0, help="random: generator seed (default 0)")
    p.add_argument("--t", type=float, required=True, help="final time, > 0")
    p.add_argument("--tol", type=float, default=1e-6, help="absolute residual tolerance (default 1e-6)")
    p.add_argument("--kmax", type=int, required=True, help="max Krylov steps per cycle")
    p.add_argument(
        "--method",
        choices=("rt", "art", "sai-rt", "fixed-step"),
        required=True,
        help="solve method",
    )
    p.add_argument("--gamma", default="auto", help="shift for sai-rt, or 'auto' = t/10")
    p.add_argument("--substeps", type=int, default=1, help="fixed-step: substep count (default 1)")
    p.add_argument("--monitor-points", type=int, default=6, help="residual check points per cycle (default 6)")
    p.add_argument("--delta-grid", type=int, default=200, help="sai-rt: step search grid size (default 200)")
    p.add_argument(
        "--cost-model",
        choices=("wall", "deterministic"),
        default="wall",
        help="cycle cost accounting (default wall)",
    )
    p.add_argument("--out", metavar="PATH", help="write the solution vector here")
    p.add_argument("--history", metavar="PATH", help="write the per-cycle CSV here")
    return p


def load_matrix_market(path):
    """Read a coordinate Matrix Market file as a sparse operator."""
    m = mmio.read_matrix(path)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"{path}: operator must be square, got shape {m.shape}")
    return SparseOperator(m)


def _make_problem(cfg):
    if cfg.problem == "cd2d":
        return build_conv_diff(ConvDiffSpec(N=cfg.N, pe=cfg.pe))
    if cfg.problem == "random":
        return build_random_wellposed(cfg.n, cfg.seed)
    op = load_matrix_market(cfg.matrix)
    v = mmio.read_vector(cfg.vector)
    if v.shape[0] != op.n:
        raise ValueError(
            f"vector length {v.shape[0]} does not match operator dimension {op.n}"
        )
    return op, v


def write_history(path, report):
    """Per-cycle CSV (RFC 4180, CRLF); floats as shortest round-trip reprs."""
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(_HISTORY_COLUMNS)
        steps = 0
        for rec in report.cycles:
            steps += rec.steps_in_cycle
            writer.writerow(
                [
                    rec.cycle_index,
                    rec.restart_length,
                    repr(rec.delta),
                    repr(rec.t_remaining),
                    repr(rec.residual_max_monitor),
                    steps,
                    repr(rec.cost_in_cycle),
                    int(rec.warning),
                ]
            )


def _summary(report):
    return (
        f"method={report.method} steps={report.total_steps} "
        f"restarts={report.restarts} final_residual={report.final_residual:.6e} "
        f"elapsed={report.elapsed:.3f}s"
    )


def run(cfg):
    """Execute one configured solve; returns the process exit code."""
    cfg.validate()
    op, v = _make_problem(cfg)
    scfg = SolverConfig(
        t=cfg.t,
        tol=cfg.tol,
        k_max=cfg.kmax,
        method=cfg.method,
        monitor_points=cfg.monitor_points,
        gamma=cfg.gamma_value(),
        cost_model=cfg.cost_model,
        delta_grid=cfg.delta_grid,
        substeps=cfg.substeps,
    )
    solver = _SOLVERS[cfg.method]
    try:
        y, report = solver(op, v, scfg)
    except (NoConvergenceError, NoConvergenceAtStep, StagnationError) as err:
        report = getattr(err, "report", None)
        if report is not None and cfg.history:
            write_history(cfg.history, report)
        print(f"error: {err}", file=sys.stderr)
        if isinstance(err, StagnationError):
            return EXIT_STAGNATION
        return EXIT_NO_CONVERGENCE

    if cfg.out:
        mmio.write_vector(cfg.out, y)
    if cfg.history:
        write_history(cfg.history, report)
    print(_summary(report))
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if report.accuracy_floor is not None:
        return EXIT_ACCURACY_FLOOR
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig(**vars(args))
    try:
        return run(cfg)
    except (ExpmrtError, OSError, ValueError, TypeError, RuntimeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


def console_main():
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
