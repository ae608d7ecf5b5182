"""Constrained gradient flow: convergence anchors and conservation accounting."""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest

from binorm_gs.analysis import soliton_energy_p1
from binorm_gs.grid import Field, State, make_grid, norm_sq
from binorm_gs.model import PotentialSpec, ProblemSpec
from binorm_gs.solver import (
    SolverConfig,
    default_grid,
    minimize,
    minimize_scalar,
    scan_subadditivity,
)

from _cases import QUICK, REFERENCE, symmetric_cubic, wells_spec

pytestmark = pytest.mark.filterwarnings("error::RuntimeWarning")


@pytest.fixture(scope="module")
def wells_result():
    return minimize(wells_spec(), config=QUICK)


@pytest.fixture(scope="module")
def near_decoupled_result():
    return minimize(symmetric_cubic(1e-6), config=REFERENCE)


def test_default_grids():
    g1 = default_grid(1)
    assert (g1.dim, g1.n, g1.length) == (1, 4096, 64.0)
    g2 = default_grid(2)
    assert (g2.dim, g2.n, g2.length) == (2, 256, 32.0)


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(dt=0.0)
    with pytest.raises(ValueError):
        SolverConfig(multi_start=0)
    with pytest.raises(ValueError):
        SolverConfig(max_iters=0)


def test_minimize_rejects_inadmissible_spec():
    bad = replace(wells_spec(), p1=5.0, beta=-1.0)
    with pytest.raises(ValueError) as exc:
        minimize(bad, config=QUICK)
    assert "(p1)" in str(exc.value) and "beta" in str(exc.value)


def test_minimize_rejects_init_on_other_grid():
    g = make_grid(1, 128, 64.0)
    z = Field(g, np.zeros(g.shape))
    with pytest.raises(ValueError):
        minimize(wells_spec(), config=QUICK, init=State(z, z))


def test_near_decoupled_energy_doubles_the_scalar(near_decoupled_result):
    # beta -> 0 limit: two independent mass-1 cubic solitons
    target = 2.0 * soliton_energy_p1(1.0, 1.0)
    res = near_decoupled_result
    assert res.converged
    assert abs(res.report.total - target) / abs(target) < 5e-3


def test_masses_exact_and_energy_monotone(near_decoupled_result):
    res = near_decoupled_result
    assert res.diagnostics["max_mass_error"] < 1e-12
    assert res.diagnostics["max_energy_increase"] <= 1e-13
    # trajectory rows are subsampled: the roundoff slack between two logged
    # energies scales with the number of steps in between
    rows = res.trajectory_energies
    for (it_a, e_a, _), (it_b, e_b, _) in zip(rows, rows[1:]):
        assert e_b <= e_a + 1.1e-13 * (it_b - it_a)


def test_gradient_norms_stay_bounded(wells_result, near_decoupled_result):
    # coercivity witness: the flow never blows past its initial slope
    for res in (wells_result, near_decoupled_result):
        assert res.diagnostics["max_grad_ratio"] <= 10.0


def test_trajectory_is_capped(wells_result):
    assert len(wells_result.trajectory_energies) <= 2000
    iters = [row[0] for row in wells_result.trajectory_energies]
    assert iters == sorted(iters)


def test_wells_ground_state_is_negative_and_converged(wells_result):
    assert wells_result.converged
    assert wells_result.report.total < -1e-6
    # ground states are positive up to phase: the solver returns the
    # nonnegative representative (roundoff-scale tail dips aside)
    assert wells_result.state.u1.values.min() > -1e-12
    assert wells_result.state.u2.values.min() > -1e-12


def test_symmetric_problem_keeps_components_equal():
    spec = symmetric_cubic(0.5)
    grid = default_grid(1)
    bump = np.exp(-grid.radius() ** 2 / 8.0)
    vals = bump * math.sqrt(1.0 / (float(np.sum(bump**2)) * grid.cell_volume))
    f = Field(grid, vals)
    res = minimize(spec, config=QUICK, init=State(f, f))
    diff = np.max(np.abs(res.state.u1.values - res.state.u2.values))
    assert diff < 1e-10


def test_scalar_mass_scaling_law():
    # for p = 1, V = 0: e(2 gamma) = 8 e(gamma)
    cfg = REFERENCE
    e1 = minimize_scalar(1.0, 1.0, 1.0, config=cfg).report.total
    e2 = minimize_scalar(1.0, 1.0, 2.0, config=cfg).report.total
    assert abs(e2 - 8.0 * e1) / abs(8.0 * e1) < 1e-2


def test_well_strictly_lowers_scalar_energy():
    free = minimize_scalar(1.0, 1.0, 1.0, config=QUICK).report.total
    well = PotentialSpec.gaussian_well(depth=0.5, width=2.0)
    pinned = minimize_scalar(1.0, 1.0, 1.0, potential=well, config=QUICK).report.total
    assert pinned < free - 1e-4


def test_both_masses_zero_short_circuits():
    spec = wells_spec().with_masses(0.0, 0.0)
    res = minimize(spec, config=QUICK)
    assert res.converged
    assert res.report.total == 0.0
    assert math.isnan(res.multipliers.lambda1)
    assert res.diagnostics["starts"] == 0


def test_single_mass_zero_reduces_to_scalar():
    spec = symmetric_cubic(0.5).with_masses(1.0, 0.0)
    res = minimize(spec, config=REFERENCE)
    assert res.converged
    assert norm_sq(res.state.u2) == 0.0
    target = soliton_energy_p1(1.0, 1.0)
    assert abs(res.report.total - target) / abs(target) < 5e-3
    assert res.multipliers.lambda1 > 0.0
    assert math.isnan(res.multipliers.lambda2)


def test_same_seed_reproduces_bitwise():
    cfg = replace(QUICK, multi_start=2)
    a = minimize(wells_spec(), config=cfg)
    b = minimize(wells_spec(), config=cfg)
    assert a.report.total == b.report.total
    assert np.array_equal(a.state.u1.values, b.state.u1.values)
    assert a.iterations == b.iterations


def test_multi_start_picks_the_best():
    res = minimize(wells_spec(), config=replace(QUICK, multi_start=3))
    assert res.diagnostics["starts"] == 3
    assert 0 <= res.diagnostics["best_start"] < 3


def test_split_never_beats_joint_minimum(wells_result):
    # e(alpha) <= e(gamma) + e_inf(alpha - gamma) for any interior split
    spec = wells_spec()
    inner_spec = spec.with_masses(0.5, 0.5)
    outer_spec = spec.without_potentials().with_masses(0.5, 0.5)
    e_in = minimize(inner_spec, config=QUICK).report.total
    e_out = minimize(outer_spec, config=QUICK).report.total
    assert wells_result.report.total <= e_in + e_out + 1e-6


def test_scan_subadd_origin_point(wells_result):
    report = scan_subadditivity(
        wells_spec(), [(0.0, 0.0)], config=QUICK
    )
    (point,) = report.points
    assert point.e_inner == 0.0
    assert point.trusted
    assert point.gap < 0.0
    assert report.e_total == pytest.approx(wells_result.report.total, rel=1e-6)


def test_scan_subadd_threads_match_serial():
    thetas = [(0.0, 0.0), (0.5, 0.5), (1.0, 0.5)]
    serial = scan_subadditivity(wells_spec(), thetas, config=QUICK, threads=1)
    threaded = scan_subadditivity(wells_spec(), thetas, config=QUICK, threads=3)
    assert serial.thetas == threaded.thetas
    assert serial.gaps == pytest.approx(threaded.gaps, rel=1e-12)
    assert serial.untrusted == threaded.untrusted


def test_scan_subadd_rejects_bad_theta():
    with pytest.raises(ValueError):
        scan_subadditivity(wells_spec(), [(0.0, 1.5)], config=QUICK)


def test_trapped_regime_converges_with_positive_multipliers():
    spec = ProblemSpec(
        dim=1, p1=1.0, p2=1.0, p3=1.0, mu1=1.0, mu2=2.0, beta=0.5,
        alpha1=1.0, alpha2=3.0,
        v2=PotentialSpec.harmonic_trap(stiffness=0.05), regime="trapping",
    )
    res = minimize(spec, config=QUICK)
    assert res.converged
    assert res.multipliers.lambda1 > 0.0
    assert res.multipliers.lambda2 > 0.0
