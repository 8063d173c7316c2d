"""End-to-end behavioral contract of the solver stack.

Each test is one independently checkable claim about the shipped code,
pinned at stated tolerances against oracle routes that do not share the
code under test.  Thresholds are not tuned to pass: a failure here means
the claim does not hold as stated.
"""

import itertools
import time

import numpy as np
import pytest

from expmrt import (
    DenseOperator,
    SolverConfig,
    art_checkpoints,
    build_conv_diff,
    build_random_wellposed,
    evaluate,
    fixed_step_solve,
    residual_bound,
    residual_scalar,
    rt_solve,
)
from expmrt.arnoldi import ArnoldiDecomposition
from expmrt.cli import write_history
from expmrt.dense import expm
from expmrt.problems import ConvDiffSpec
from expmrt.restart import art_solve
from expmrt.sai import (
    SaiOperator,
    sai_find_delta,
    sai_project,
    sai_residual_norm,
    sai_rt_solve,
)

from _oracles import dense_action


def _stepped(op, v, k):
    dec = ArnoldiDecomposition.start(op, v)
    for _ in range(k):
        dec.step()
    return dec


@pytest.fixture(scope="module")
def rt_sweep(cd102):
    op, v = cd102
    out = {}
    for k_max in (3, 5, 10, 20, 40):
        cfg = SolverConfig(t=1.0, tol=1e-6, k_max=k_max)
        out[k_max] = rt_solve(op, v, cfg)
    return out


def test_01_dense_oracle_equivalence():
    t0 = time.perf_counter()
    t, tol = 1.0, 1e-8
    sizes = itertools.cycle([20, 50, 100])
    lengths = itertools.cycle([3, 5, 10])
    worst = 0.0
    for seed in range(20):
        n = next(sizes)
        k_max = next(lengths)
        op, v = build_random_wellposed(n, seed=seed)
        y, report = rt_solve(op, v, SolverConfig(t=t, tol=tol, k_max=k_max))
        assert report.converged
        err = np.linalg.norm(y - dense_action(op.matrix, v, t))
        worst = max(worst, err)
        assert err <= 10.0 * t * tol, f"seed={seed} n={n} k_max={k_max} err={err:.3e}"
    elapsed = time.perf_counter() - t0
    print(f"worst error {worst:.3e} over 20 cases, {elapsed:.1f}s")
    assert elapsed < 30.0


def test_02_residual_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(42)

    worst_poly = 0.0
    for _ in range(100):
        n = int(rng.integers(10, 50))
        k = int(rng.integers(1, min(11, n)))
        s = float(rng.uniform(0.0, 2.0))
        op, v = build_random_wellposed(n, seed=int(rng.integers(0, 2**31)))
        dec = _stepped(op, v, k)
        u = expm(-s * dec.h_square) @ (dec.beta * np.eye(k)[:, 0])
        direct = dec.basis @ (dec.h_square @ u) - op.matrix @ (dec.basis @ u)
        scale = np.linalg.norm(op.matrix, 2)
        gap = abs(np.linalg.norm(direct) - abs(residual_scalar(dec, s)))
        worst_poly = max(worst_poly, gap / scale)
        assert gap <= 1e-10 * scale

    worst_sai = 0.0
    for _ in range(100):
        n = int(rng.integers(10, 40))
        k = int(rng.integers(1, 9))
        s = float(rng.uniform(0.0, 2.0))
        gamma = float(rng.uniform(0.05, 0.5))
        op, v = build_random_wellposed(n, seed=int(rng.integers(0, 2**31)))
        sop = SaiOperator(op, gamma)
        dec = _stepped(sop, v, k)
        p = sai_project(sop, dec)
        u = expm(-s * p.h_back) @ (p.beta * np.eye(k)[:, 0])
        direct = dec.basis @ (p.h_back @ u) - op.matrix @ (dec.basis @ u)
        scale = np.linalg.norm(op.matrix, 2)
        gap = abs(np.linalg.norm(direct) - sai_residual_norm(p, s))
        worst_sai = max(worst_sai, gap / scale)
        assert gap <= 1e-9 * scale

    elapsed = time.perf_counter() - t0
    print(f"worst gaps: {worst_poly:.3e} (poly), {worst_sai:.3e} (sai), {elapsed:.1f}s")
    assert elapsed < 10.0


def test_03_residual_upper_bound(cd102):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    slack = 1.0 - 1e-12
    checked = 0
    min_ratio = np.inf
    while checked < 1000:
        n = int(rng.integers(6, 40))
        k = int(rng.integers(2, min(9, n)))  # bound is valid for k >= 2
        op, v = build_random_wellposed(n, seed=int(rng.integers(0, 2**31)))
        dec = _stepped(op, v, k)
        for s in rng.uniform(0.0, 2.0, size=5):
            r = abs(residual_scalar(dec, float(s)))
            b = residual_bound(dec, float(s))
            assert b >= slack * r, f"n={n} k={k} s={s}: bound {b:.3e} < residual {r:.3e}"
            if r > 0.0:
                min_ratio = min(min_ratio, b / r)
            checked += 1

    op, v = cd102
    dec = _stepped(op, v, 40)
    for s in np.linspace(0.01, 1.0, 100):
        r = abs(residual_scalar(dec, s))
        b = residual_bound(dec, s)
        assert b >= slack * r
    elapsed = time.perf_counter() - t0
    print(f"{checked} random samples, min bound/residual ratio {min_ratio:.3f}, {elapsed:.1f}s")
    assert elapsed < 30.0


def test_04_any_restart_length_converges(rt_sweep, cd102_reference):
    lines = []
    for k_max, (y, report) in sorted(rt_sweep.items()):
        assert report.converged, f"k_max={k_max} did not converge"
        err = np.linalg.norm(y - cd102_reference)
        assert err <= 1e-5, f"k_max={k_max} err={err:.3e}"
        lines.append(
            f"k_max={k_max:2d}: steps={report.total_steps:5d} "
            f"restarts={report.restarts:4d} err={err:.3e}"
        )
    print("\n".join(lines))


def test_05_delta_stabilization(rt_sweep):
    _, report = rt_sweep[40]
    deltas = [c.delta for c in report.cycles if c.t_remaining > 0.0]
    tail = deltas[2:]
    assert len(tail) >= 2
    ratio = max(tail) / min(tail)
    assert ratio <= 2.0, (
        f"step sizes after the second restart vary by {ratio:.3f}x (> 2x): "
        f"{[round(d, 6) for d in tail]}"
    )


def test_06_sai_floor_and_delta(cd102):
    t0 = time.perf_counter()
    op, v = cd102
    sop = SaiOperator(op, 0.1)
    dec = ArnoldiDecomposition.start(sop, v)
    for _ in range(5):
        dec.step()
    res = sai_find_delta(sai_project(sop, dec), 1.0, 1e-6)
    assert 0.4 <= res.delta <= 0.8, f"delta={res.delta}"
    assert 1e-6 <= res.floor <= 1e-4, f"floor={res.floor:.3e}"
    assert res.floor_exceeds_tol

    cfg5 = SolverConfig(t=1.0, tol=1e-6, k_max=5, gamma=0.1)
    _, rep5 = sai_rt_solve(op, v, cfg5)
    assert rep5.warnings, "short cycles must warn about the accuracy floor"
    assert rep5.accuracy_floor is not None

    cfg10 = SolverConfig(t=1.0, tol=1e-6, k_max=10, gamma=0.1)
    _, rep10 = sai_rt_solve(op, v, cfg10)
    assert rep10.converged
    assert rep10.total_steps <= 30, f"steps={rep10.total_steps}"
    assert rep10.accuracy_floor is None
    elapsed = time.perf_counter() - t0
    print(
        f"delta={res.delta:.3f} floor={res.floor:.3e}; "
        f"10-step solve: {rep10.total_steps} steps, {elapsed:.1f}s"
    )
    assert elapsed < 60.0


def test_07_sai_back_transform_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    worst = 0.0
    for case in range(50):
        n = int(rng.integers(12, 40))
        gamma = float(rng.uniform(0.05, 0.4))
        op, v = build_random_wellposed(n, seed=1000 + case)
        sop = SaiOperator(op, gamma)
        dec = ArnoldiDecomposition.start(sop, v)
        scale = np.linalg.norm(op.matrix, 2)
        for k in range(1, 11):
            dec.step()
            p = sai_project(sop, dec)
            V = dec.basis
            w = sop.apply_shifted(dec.basis_next)
            defect = (
                op.matrix @ V
                - V @ p.h_back
                + (p.h_tilde_last / p.gamma) * np.outer(w, p.einv_row)
            )
            col = np.linalg.norm(defect, axis=0).max()
            worst = max(worst, col / scale)
            assert col <= 1e-9 * scale, f"case={case} k={k} defect={col:.3e}"
    elapsed = time.perf_counter() - t0
    print(f"worst columnwise defect {worst:.3e} (relative), {elapsed:.1f}s")
    assert elapsed < 10.0


def test_08_adaptive_matches_fixed_contract(cd102, cd102_reference, tmp_path):
    op, v = cd102
    cfg = SolverConfig(t=1.0, tol=1e-6, k_max=40, cost_model="deterministic")
    y1, rep1 = art_solve(op, v, cfg)
    y2, rep2 = art_solve(op, v, cfg)

    assert rep1.converged
    err = np.linalg.norm(y1 - cd102_reference)
    assert err <= 1e-5, f"err={err:.3e}"

    allowed = set(art_checkpoints(40))
    for rec in rep1.adaptations:
        ok = (
            rec.chosen_length == rec.current_length
            or rec.chosen_length in allowed
            or rec.chosen_length == min(rec.current_length + 5, 40)
        )
        assert ok, f"cycle {rec.cycle_index}: {rec.current_length} -> {rec.chosen_length}"

    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_history(str(p1), rep1)
    write_history(str(p2), rep2)
    assert p1.read_bytes() == p2.read_bytes()
    np.testing.assert_array_equal(y1, y2)
    lengths = [c.restart_length for c in rep1.cycles]
    print(f"lengths per cycle: {lengths}, err={err:.3e}")


@pytest.mark.slow
def test_09_large_mesh_step_count():
    import scipy.sparse.linalg

    op, v = build_conv_diff(ConvDiffSpec(N=802, pe=200.0))
    assert op.n == 640000

    S = 0.5 * (op.matrix + op.matrix.T)
    sym_norm = abs(
        scipy.sparse.linalg.eigsh(S, k=1, which="LM", return_eigenvectors=False)[0]
    )
    K = 0.5 * (op.matrix - op.matrix.T)
    skew_norm = scipy.sparse.linalg.svds(K, k=1, return_singular_vectors=False)[0]
    assert 4000.0 <= sym_norm <= 9000.0, f"sym norm {sym_norm:.1f}"
    assert 0.33 <= skew_norm <= 0.75, f"skew norm {skew_norm:.3f}"

    cfg = SolverConfig(t=1.0, tol=1e-6, k_max=30)
    y, report = rt_solve(op, v, cfg)
    assert report.converged
    assert 427 <= report.total_steps <= 711, f"total steps {report.total_steps}"

    ref_cfg = SolverConfig(t=1.0, tol=1e-9, k_max=60)
    y_ref, ref_report = fixed_step_solve(op, v, ref_cfg, substeps=100)
    assert ref_report.converged
    err = np.linalg.norm(y - y_ref)
    print(
        f"steps={report.total_steps} restarts={report.restarts} err={err:.3e} "
        f"norms: sym={sym_norm:.1f} skew={skew_norm:.3f}"
    )
    assert err <= 1e-6, f"err={err:.3e}"


def test_10_happy_breakdown_exactness():
    rng = np.random.default_rng(3)
    B = rng.standard_normal((3, 3))
    B = B.T @ B / 10.0 + np.eye(3)  # small well-posed invariant block
    C = rng.standard_normal((6, 6))
    C = C.T @ C / 10.0 + np.eye(6)
    A = np.zeros((9, 9))
    A[:3, :3] = B
    A[3:, 3:] = C
    v = np.zeros(9)
    v[:3] = rng.standard_normal(3)

    op = DenseOperator(A)
    y, report = rt_solve(op, v, SolverConfig(t=1.0, tol=1e-14, k_max=9))
    assert report.converged
    assert report.total_steps <= 3, f"steps={report.total_steps}"
    err = np.linalg.norm(y - dense_action(A, v, 1.0))
    print(f"steps={report.total_steps}, err={err:.3e}")
    assert err <= 1e-12
