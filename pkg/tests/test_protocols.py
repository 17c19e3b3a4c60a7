"""Protocol evaluators: closed-form agreement, route agreement, invariants.

The load-bearing checks: the single-ancilla evaluator against the analytic
final state (both with and without the interleaved rotation), the three
evaluation routes agreeing where they must (n = 1; full rethermalization),
and additivity of the marginal-product stream against a brute-force QFIM on
the tensor product.
"""

import math
from dataclasses import replace

import numpy as np
import numpy.testing as npt
import pytest

import oracles
from colltherm.channels import BathSpec, RotationSpec, thermal_populations
from colltherm.estimation import thermal_fim
from colltherm.protocols import (
    SIM_DIM_CAP,
    ProtocolConfig,
    SweepGrid,
    evaluate,
    multi_ancilla_correlated,
    multi_ancilla_uncorrelated,
    scenario_for,
    single_run,
    sweep,
    three_bath_qutrit,
)
from colltherm.protocols import _stream_marginals
from colltherm.estimation import finite_diff_derivatives, qfim


def two_bath_config(**overrides):
    base = dict(
        baths=(BathSpec(2.0, therm_time=0.5), BathSpec(1.0, therm_time=0.5)),
        collision_angles=(0.5 * math.pi, 0.3 * math.pi),
        rotation=RotationSpec(math.pi / 4, "x"),
    )
    base.update(overrides)
    return ProtocolConfig(**base)


def three_bath_config(**overrides):
    base = dict(
        baths=(
            BathSpec(2.0, therm_time=0.5),
            BathSpec(1.0, therm_time=0.5),
            BathSpec(3.0, therm_time=0.5),
        ),
        collision_angles=(0.5 * math.pi, 0.2 * math.pi, 0.35 * math.pi),
        ancilla_dim=3,
    )
    base.update(overrides)
    return ProtocolConfig(**base)


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

class TestProtocolConfig:
    def test_bath_count(self):
        with pytest.raises(ValueError, match="baths"):
            ProtocolConfig(baths=(BathSpec(2.0),), collision_angles=(0.1,))

    def test_angle_count_must_match_baths(self):
        with pytest.raises(ValueError, match="collision_angles"):
            two_bath_config(collision_angles=(0.1,))

    def test_ancilla_dim(self):
        with pytest.raises(ValueError, match="ancilla_dim"):
            two_bath_config(ancilla_dim=4)

    def test_n_ancillas_positive(self):
        with pytest.raises(ValueError, match="n_ancillas"):
            two_bath_config(n_ancillas=0)

    def test_ancilla_init_defaults_to_bottom_level(self):
        assert two_bath_config().ancilla_init == 1
        assert three_bath_config().ancilla_init == 2

    def test_ancilla_init_range(self):
        with pytest.raises(ValueError, match="ancilla_init"):
            two_bath_config(ancilla_init=2)

    def test_at_temperatures(self):
        cfg = two_bath_config().at_temperatures((2.5, 0.8))
        assert cfg.temperatures == (2.5, 0.8)
        # everything else untouched
        assert cfg.baths[0].therm_time == 0.5
        assert cfg.collision_angles == two_bath_config().collision_angles

    def test_joint_dim(self):
        assert two_bath_config(n_ancillas=3).joint_dim() == 2**2 * 2**3
        assert three_bath_config(n_ancillas=2).joint_dim() == 2**3 * 3**2


# ---------------------------------------------------------------------------
# single ancilla vs closed forms
# ---------------------------------------------------------------------------

def test_single_run_requires_one_ancilla():
    with pytest.raises(ValueError, match="n_ancillas"):
        single_run(two_bath_config(n_ancillas=2))


def test_single_run_plain_final_state(rng):
    """Rotation off: the final ancilla is diagonal with excited population
    v = q sin^2 g2 + p sin^2 g1 cos^2 g2."""
    for _ in range(10):
        g1, g2 = rng.uniform(0.1 * math.pi, 0.9 * math.pi, size=2)
        t1, t2 = rng.uniform(0.5, 4.0, size=2)
        cfg = two_bath_config(
            baths=(BathSpec(t1), BathSpec(t2)),
            collision_angles=(g1, g2),
            rotation_enabled=False,
        )
        final, _ = single_run(cfg)
        p, _ = thermal_populations(1.0, t1)
        q, _ = thermal_populations(1.0, t2)
        v = oracles.plain_final_v(g1, g2, p, q)
        npt.assert_allclose(final.mat, np.diag([v, 1.0 - v]), atol=1e-10)


def test_single_run_plain_qfim_is_rank_one(rng):
    """Rotation off: one binomial observable, so F = grad(v) grad(v)^T / v(1-v)."""
    g1, g2 = 0.45 * math.pi, 0.3 * math.pi
    t1, t2 = 2.0, 1.0
    cfg = two_bath_config(
        baths=(BathSpec(t1), BathSpec(t2)),
        collision_angles=(g1, g2),
        rotation_enabled=False,
    )
    _, rep = single_run(cfg)
    p, _ = thermal_populations(1.0, t1)
    q, _ = thermal_populations(1.0, t2)
    v = oracles.plain_final_v(g1, g2, p, q)
    grad = np.array(
        [
            math.sin(g1) ** 2 * math.cos(g2) ** 2 * oracles.dlam0_dT(1.0, t1),
            math.sin(g2) ** 2 * oracles.dlam0_dT(1.0, t2),
        ]
    )
    expected = np.outer(grad, grad) / (v * (1.0 - v))
    npt.assert_allclose(rep.qfim.matrix, expected, atol=1e-8)
    assert rep.singular
    assert math.isinf(rep.eta_acc) and rep.eta_acc < 0


def test_single_run_rotated_final_state(rng):
    for _ in range(10):
        g1, g2 = rng.uniform(0.1 * math.pi, 0.9 * math.pi, size=2)
        t1, t2 = rng.uniform(0.5, 4.0, size=2)
        cfg = two_bath_config(baths=(BathSpec(t1), BathSpec(t2)), collision_angles=(g1, g2))
        final, _ = single_run(cfg)
        p, _ = thermal_populations(1.0, t1)
        q, _ = thermal_populations(1.0, t2)
        npt.assert_allclose(final.mat, oracles.rotated_final_state(g1, g2, p, q), atol=1e-10)


def test_single_run_qfim_against_bloch_oracle():
    """QFIM from the analytic state derivative and the Bloch formula; no
    package code in the expected value."""
    g1, g2 = 0.5 * math.pi, 0.3 * math.pi
    t1, t2 = 2.0, 1.0
    cfg = two_bath_config(baths=(BathSpec(t1), BathSpec(t2)), collision_angles=(g1, g2))
    _, rep = single_run(cfg)
    p, _ = thermal_populations(1.0, t1)
    q, _ = thermal_populations(1.0, t2)
    rho = oracles.rotated_final_state(g1, g2, p, q)
    chi_dot = -math.sin(g1) ** 2 * math.cos(g2) * oracles.dlam0_dT(1.0, t1)
    mu_dot = math.sin(g2) ** 2 * oracles.dlam0_dT(1.0, t2)
    d1 = np.array([[0.0, -1j * chi_dot], [1j * chi_dot, 0.0]])
    d2 = np.array([[mu_dot, 0.0], [0.0, -mu_dot]], dtype=complex)
    expected = oracles.qfim_bloch(rho, [d1, d2])
    npt.assert_allclose(rep.qfim.matrix, expected, rtol=1e-6, atol=1e-9)
    assert not rep.singular
    assert rep.sld_commutator_norm > 1e-10


def test_full_swap_reads_second_bath_only():
    """g1 = g2 = pi/2 without rotation swaps the second probe onto the
    ancilla: the state is the bath-2 Gibbs state and the only information
    left is the bath-2 thermometer at its equilibrium ceiling."""
    cfg = two_bath_config(
        collision_angles=(0.5 * math.pi, 0.5 * math.pi), rotation_enabled=False
    )
    final, rep = single_run(cfg)
    q, _ = thermal_populations(1.0, 1.0)
    npt.assert_allclose(final.mat, np.diag([q, 1.0 - q]), atol=1e-12)
    benchmark = thermal_fim(cfg.baths).matrix
    # the T1 derivative is finite-difference noise (~1e-11): squared on the
    # diagonal, multiplied by the O(1) bath-2 SLD in the cross entry
    assert rep.qfim.matrix[0, 0] < 1e-20
    assert abs(rep.qfim.matrix[0, 1]) < 1e-10
    assert rep.qfim.matrix[1, 1] == pytest.approx(benchmark[1, 1], abs=1e-6)
    assert rep.singular


# ---------------------------------------------------------------------------
# route agreement
# ---------------------------------------------------------------------------

def test_stream_routes_agree_at_one_ancilla():
    cfg = two_bath_config()
    _, rep_single = single_run(cfg)
    rep_stream = multi_ancilla_uncorrelated(cfg)
    rep_joint = multi_ancilla_correlated(replace(cfg, correlated=True))
    npt.assert_allclose(rep_stream.qfim.matrix, rep_single.qfim.matrix, atol=1e-9)
    npt.assert_allclose(rep_joint.qfim.matrix, rep_single.qfim.matrix, atol=1e-9)
    assert rep_stream.eta_joint == pytest.approx(rep_single.eta_joint, rel=1e-8)


def test_qutrit_stream_agrees_with_single_run_at_one_ancilla():
    cfg = three_bath_config()
    _, rep_single = single_run(cfg)
    rep_stream = three_bath_qutrit(cfg)
    npt.assert_allclose(rep_stream.qfim.matrix, rep_single.qfim.matrix, atol=1e-9)


def test_uncorrelated_additivity_against_product_qfim():
    """The stream report must equal a brute-force QFIM of the tensor product
    of the recorded marginals."""
    cfg = two_bath_config(n_ancillas=2, collision_angles=(0.5 * math.pi, 0.3 * math.pi))
    rep = multi_ancilla_uncorrelated(cfg)

    def joint(tvec):
        m = _stream_marginals(cfg.at_temperatures(tvec))
        return np.kron(m[0], m[1])

    pd = finite_diff_derivatives(joint, np.array(cfg.temperatures))
    brute = qfim(pd)
    npt.assert_allclose(rep.qfim.matrix, brute.matrix, atol=1e-8)


def test_correlated_reduces_to_fresh_singles_under_full_rethermalization():
    """therm_time = 50/gamma resets the probes between ancillas, so the joint
    simulation must give exactly n independent copies of the single run."""
    single_cfg = two_bath_config(
        baths=(BathSpec(2.0, therm_time=50.0), BathSpec(1.0, therm_time=50.0)),
        collision_angles=(0.5 * math.pi, 0.3 * math.pi),
    )
    _, rep1 = single_run(single_cfg)
    rep2 = multi_ancilla_correlated(replace(single_cfg, n_ancillas=2, correlated=True))
    npt.assert_allclose(rep2.qfim.matrix, 2.0 * rep1.qfim.matrix, atol=1e-6)


def test_uncorrelated_rejects_correlated_config():
    cfg = two_bath_config(n_ancillas=2, correlated=True)
    with pytest.raises(ValueError, match="correlated"):
        multi_ancilla_uncorrelated(cfg)


def test_correlated_dimension_cap():
    cfg = two_bath_config(n_ancillas=7, correlated=True)
    assert cfg.joint_dim() > SIM_DIM_CAP
    with pytest.raises(ValueError, match="cap"):
        multi_ancilla_correlated(cfg)


def test_trailing_rotation_does_not_change_information():
    """A fixed unitary after the last collision is invisible to the QFIM."""
    for base in (
        two_bath_config(),
        two_bath_config(n_ancillas=2, correlated=True),
    ):
        f0 = evaluate(base).qfim.matrix
        f1 = evaluate(replace(base, apply_rotation_after_last=True)).qfim.matrix
        assert np.max(np.abs(f0 - f1)) < 1e-8


# ---------------------------------------------------------------------------
# three baths
# ---------------------------------------------------------------------------

def test_three_bath_qutrit_validation():
    with pytest.raises(ValueError, match="3 baths"):
        three_bath_qutrit(two_bath_config())
    with pytest.raises(ValueError, match="uncorrelated"):
        three_bath_qutrit(three_bath_config(correlated=True))


def test_three_bath_decoupled_stage_gives_zero_row():
    """g3 = 0: the third bath never touches the ancilla, so its row and
    column of the QFIM vanish and the report flags the singularity."""
    cfg = three_bath_config(collision_angles=(0.5 * math.pi, 0.2 * math.pi, 0.0))
    rep = three_bath_qutrit(cfg)
    npt.assert_allclose(rep.qfim.matrix[2, :], np.zeros(3), atol=1e-12)
    assert rep.singular and math.isinf(rep.eta_acc)


def test_three_bath_qubit_diagnostic_runs():
    cfg = three_bath_config(ancilla_dim=2)
    rep = three_bath_qutrit(cfg)
    assert rep.qfim.matrix.shape == (3, 3)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

def test_sweep_grid_validation():
    cfg = two_bath_config()
    with pytest.raises(ValueError, match="axis"):
        SweepGrid("bogus_axis", (0.1, 0.2), cfg)
    with pytest.raises(ValueError, match="increasing"):
        SweepGrid("g_t2_over_pi", (0.2, 0.2), cfg)


def test_sweep_axis_setters():
    cfg = two_bath_config()
    grid = SweepGrid("g_t2_over_pi", (0.25,), cfg)
    assert grid.at(0.25).collision_angles[1] == pytest.approx(0.25 * math.pi)
    theta_grid = SweepGrid("theta_over_pi", (1.0 / 6.0,), cfg)
    assert theta_grid.at(1.0 / 6.0).rotation.theta == pytest.approx(math.pi / 6.0)
    gt_grid = SweepGrid("gamma_t", (2.0,), cfg)
    assert gt_grid.at(2.0).baths[0].therm_time == pytest.approx(2.0)
    n_grid = SweepGrid("n_ancillas", (3.0,), cfg)
    assert n_grid.at(3.0).n_ancillas == 3
    with pytest.raises(ValueError, match="whole"):
        n_grid.at(2.5)
    with pytest.raises(ValueError, match="stage"):
        SweepGrid("g_t3_over_pi", (0.3,), cfg).at(0.3)


def test_sweep_rows_and_error_capture():
    """A grid point that produces an invalid collision angle records its
    error in-row; the remaining points still evaluate."""
    cfg = two_bath_config()
    grid = SweepGrid("g_t2_over_pi", (-0.2, 0.3, 0.7), cfg)
    rows = sweep(grid, "single")
    assert len(rows) == 3
    assert rows[0]["error"] is not None and "ValueError" in rows[0]["error"]
    assert math.isnan(rows[0]["eta_joint"])
    for row in rows[1:]:
        assert row["error"] is None
        assert math.isfinite(row["eta_joint"])
        assert row["axis_value"] in (0.3, 0.7)
        assert set(row) == {
            "axis_value",
            "eta_joint",
            "eta_acc",
            "det_qfim",
            "trace_qfim",
            "singular",
            "error",
        }


def test_sweep_threaded_matches_serial():
    cfg = two_bath_config()
    grid = SweepGrid("g_t2_over_pi", tuple(np.linspace(0.1, 0.9, 9)), cfg)
    serial = sweep(grid, "single", threads=1)
    threaded = sweep(grid, "single", threads=4)
    assert serial == threaded


def test_sweep_unknown_scenario():
    grid = SweepGrid("g_t2_over_pi", (0.3,), two_bath_config())
    with pytest.raises(ValueError, match="scenario"):
        sweep(grid, "bogus")


def test_scenario_dispatch():
    assert scenario_for(two_bath_config()) == "single"
    assert scenario_for(two_bath_config(n_ancillas=3)) == "uncorrelated"
    assert scenario_for(two_bath_config(n_ancillas=2, correlated=True)) == "correlated"
    assert scenario_for(three_bath_config()) == "qutrit"
    with pytest.raises(ValueError, match="scenario"):
        evaluate(two_bath_config(), scenario="bogus")
