import numpy as np
import pytest

from expmrt import ConvDiffSpec, SolverConfig, build_conv_diff
from expmrt.restart import fixed_step_solve


@pytest.fixture(scope="session")
def cd102():
    """Convection-diffusion benchmark: Peclet 100 on the 102x102 mesh."""
    return build_conv_diff(ConvDiffSpec(N=102, pe=100.0))


@pytest.fixture(scope="session")
def cd102_reference(cd102):
    """Tight fixed-substep reference solution for the cd102 problem at t=1."""
    op, v = cd102
    cfg = SolverConfig(t=1.0, tol=1e-9, k_max=60)
    y_ref, report = fixed_step_solve(op, v, cfg, substeps=100)
    assert report.converged
    return y_ref
