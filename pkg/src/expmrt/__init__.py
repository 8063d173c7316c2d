"""Matrix exponential actions exp(-tA) v via restarted Krylov methods.

The restart driver advances the solution to the largest time at which the
exponential residual provably stays within tolerance, then continues on
the shrunken interval, which converges for any restart length.  Variants:
an adaptive driver that re-tunes the restart length from per-cycle cost
probes, a shift-and-invert driver for stiff operators, and a fixed-substep
baseline.
"""

from .approximant import (
    MonitorGrid,
    ResidualSample,
    evaluate,
    monitor,
    residual_bound,
    residual_norm,
    residual_scalar,
)
from .arnoldi import ArnoldiDecomposition
from .dense import expm, log_norm_2, norm_2, phi1
from .errors import (
    ExpmrtError,
    MatrixMarketError,
    NoConvergenceAtStep,
    NoConvergenceError,
    SaiSingularProjection,
    StagnationError,
    ZeroStartVector,
)
from .operators import DenseOperator, LinearOperator, SparseOperator
from .problems import ConvDiffSpec, build_conv_diff, build_random_wellposed
from .restart import (
    AdaptationRecord,
    CostMeter,
    CostModel,
    CycleRecord,
    DeltaResult,
    SolveReport,
    SolverConfig,
    art_checkpoints,
    art_choose_next_length,
    art_solve,
    find_delta,
    fixed_step_solve,
    rt_solve,
)
from .sai import (
    SaiOperator,
    SaiProjection,
    sai_evaluate,
    sai_find_delta,
    sai_project,
    sai_residual_norm,
    sai_residual_scalar,
    sai_rt_solve,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptationRecord",
    "ArnoldiDecomposition",
    "ConvDiffSpec",
    "CostMeter",
    "CostModel",
    "CycleRecord",
    "DeltaResult",
    "DenseOperator",
    "ExpmrtError",
    "LinearOperator",
    "MatrixMarketError",
    "MonitorGrid",
    "NoConvergenceAtStep",
    "NoConvergenceError",
    "ResidualSample",
    "SaiOperator",
    "SaiProjection",
    "SaiSingularProjection",
    "SolveReport",
    "SolverConfig",
    "SparseOperator",
    "StagnationError",
    "ZeroStartVector",
    "art_checkpoints",
    "art_choose_next_length",
    "art_solve",
    "build_conv_diff",
    "build_random_wellposed",
    "evaluate",
    "expm",
    "find_delta",
    "fixed_step_solve",
    "log_norm_2",
    "monitor",
    "norm_2",
    "phi1",
    "residual_bound",
    "residual_norm",
    "residual_scalar",
    "rt_solve",
    "sai_evaluate",
    "sai_find_delta",
    "sai_project",
    "sai_residual_norm",
    "sai_residual_scalar",
    "sai_rt_solve",
]
