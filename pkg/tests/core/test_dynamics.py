"""Tests for exact propagation, fidelity and string order."""

import math

import numpy as np
import pytest

from orbit_scars_mcp.core.dynamics import (
    analytic_trajectory,
    entropy_series,
    exact_evolve,
    fidelity_density_series,
    fidelity_series,
    orbit_overlap_series,
    string_order,
    string_order_limit,
    string_order_scan,
    time_grid,
)
from orbit_scars_mcp.core.errors import CapacityError, ParameterError, ShapeError
from orbit_scars_mcp.core.lattice_models import build_model
from orbit_scars_mcp.core.orbits import AnalyticOrbit


@pytest.mark.unit
class TestTimeGrid:
    """Uniform sampling grids."""

    def test_grid_ends_at_final_time(self):
        times, step = time_grid(1.0, 0.3)
        assert times[-1] == pytest.approx(1.0)
        assert step == pytest.approx(0.25)
        assert len(times) == 5

    def test_zero_final_time(self):
        times, _ = time_grid(0.0, 0.1)
        assert times.tolist() == [0.0]

    def test_rejects_bad_step(self):
        with pytest.raises(ParameterError):
            time_grid(1.0, 0.0)
        with pytest.raises(ParameterError):
            time_grid(-1.0, 0.1)


@pytest.mark.unit
class TestExactEvolve:
    """Dense Schrödinger evolution and revivals."""

    def test_static_ssh_embedding_revives(self):
        params = {"j_o": 1.0, "j_e": 2 / 3, "delta": -2 / 3}
        orbit = AnalyticOrbit("ssh", 10, params)
        h = build_model("ssh", params, 10)
        traj = exact_evolve(h, orbit.dense(0.0), math.pi, dt=math.pi / 40)
        fidelity, summary = fidelity_series(traj, window=(1.0, math.pi))
        assert fidelity[0] == pytest.approx(1.0)
        assert summary.f_max >= 1 - 1e-8
        assert summary.t_star == pytest.approx(math.pi)
        assert traj.richardson == {}

    def test_driven_ssh_follows_orbit(self, ssh_driven_params):
        orbit = AnalyticOrbit("ssh", 8, ssh_driven_params)
        h = build_model("ssh", ssh_driven_params, 8)
        traj = exact_evolve(h, orbit.dense(0.0), math.pi, dt=0.025)
        overlap = orbit_overlap_series(traj, orbit)
        assert np.min(overlap) >= 1 - 1e-5
        _, summary = fidelity_series(traj, window=(2.0, math.pi))
        assert summary.f_max >= 1 - 1e-5
        assert traj.richardson["fine_error"] < 1e-10 or traj.richardson["ratio"] >= 3.5

    def test_driven_aklt_revives_at_half_pi(self, aklt_driven_params):
        orbit = AnalyticOrbit("aklt", 6, aklt_driven_params)
        h = build_model("aklt", aklt_driven_params, 6)
        traj = exact_evolve(h, orbit.dense(0.0), math.pi / 2, dt=0.025)
        fidelity, _ = fidelity_series(traj)
        assert fidelity[-1] >= 1 - 1e-5

    def test_aklt_revival_defect_grows_off_cancellation_line(self):
        gamma = 0.1

        def defect(delta0):
            params = {"gamma": gamma, "delta0": delta0}
            orbit = AnalyticOrbit("aklt", 6, params)
            traj = exact_evolve(build_model("aklt", params, 6), orbit.dense(0.0), math.pi / 2, dt=math.pi / 80)
            _, summary = fidelity_series(traj, window=(math.pi / 4, math.pi / 2))
            return 1.0 - summary.f_max

        on_line = defect(2 * gamma)
        below = [defect(2 * gamma - offset) for offset in (0.05, 0.1)]
        above = [defect(2 * gamma + offset) for offset in (0.05, 0.1)]
        assert on_line < 1e-5
        assert on_line <= below[0] <= below[1]
        assert on_line <= above[0] <= above[1]
        assert min(below[0], above[0]) > 10 * on_line

    def test_refined_run_reports_sampling_step(self, ssh_driven_params):
        orbit = AnalyticOrbit("ssh", 6, ssh_driven_params)
        h = build_model("ssh", ssh_driven_params, 6)
        traj = exact_evolve(h, orbit.dense(0.0), math.pi, dt=math.pi / 16)
        assert len(traj) == 17
        assert traj.dt == pytest.approx(traj.times[1] - traj.times[0])
        refined = traj.richardson["refined_dt"]
        assert refined == pytest.approx(traj.dt / 2 ** traj.richardson["refinements"])
        assert refined <= traj.dt

    def test_cluster_h0_revives_at_pi(self):
        params = {"beta": 0.2}
        orbit = AnalyticOrbit("cluster", 10, params)
        h = build_model("cluster", params, 10).h0
        traj = exact_evolve(h, orbit.dense(0.0), math.pi, dt=math.pi / 20)
        fidelity, _ = fidelity_series(traj)
        assert fidelity[-1] == pytest.approx(1.0, abs=1e-8)

    def test_norm_is_preserved(self):
        h = build_model("xy", {"d_anis": 0.5, "gamma": 0.3, "delta0": 0.2}, 4)
        psi0 = np.random.default_rng(2).normal(size=81) + 0j
        traj = exact_evolve(h, psi0, 0.5, dt=0.05)
        for k in range(len(traj)):
            assert np.linalg.norm(traj.dense(k)) == pytest.approx(1.0, abs=1e-8)

    def test_capacity_guard(self):
        h = build_model("ssh", {}, 8)
        with pytest.raises(CapacityError):
            exact_evolve(h, np.ones(256), 1.0, cap=100)

    def test_shape_and_zero_state(self):
        h = build_model("ssh", {}, 4)
        with pytest.raises(ShapeError):
            exact_evolve(h, np.ones(8), 1.0)
        with pytest.raises(ParameterError, match="zero"):
            exact_evolve(h, np.zeros(16), 1.0)


@pytest.mark.unit
class TestObservables:
    """Fidelity, entropy and overlap series."""

    def test_fidelity_window_without_samples(self):
        traj = analytic_trajectory("ssh", {"j_o": 1.0}, 4, 1.0, dt=0.5)
        with pytest.raises(ParameterError, match="no samples"):
            fidelity_series(traj, window=(5.0, 6.0))

    def test_fidelity_density_of_orthogonal_dimers(self):
        traj = analytic_trajectory("ssh", {"j_o": 1.0}, 4, math.pi, dt=math.pi / 4)
        fidelity, summary = fidelity_series(traj)
        density = fidelity_density_series(traj)
        # at t = pi/2 every dimer has flipped
        assert fidelity[2] == pytest.approx(0.0, abs=1e-20)
        assert fidelity[1] == pytest.approx(0.25)
        assert density[1] == pytest.approx(-math.log(0.25) / 4)
        assert summary.fidelity_density == pytest.approx(0.0, abs=1e-12)
        assert "fidelity_density" in traj.observables

    def test_product_orbit_has_no_entanglement(self):
        traj = analytic_trajectory("xy", {"h": 1.0}, 4, 1.0, dt=0.25)
        assert np.max(entropy_series(traj)) == pytest.approx(0.0, abs=1e-12)

    def test_aklt_entropy_is_constant_along_orbit(self):
        traj = analytic_trajectory("aklt", {"z": 0.5}, 6, math.pi / 2, dt=math.pi / 16)
        series = entropy_series(traj, cut=3)
        assert np.ptp(series) < 1e-9
        assert series[0] > 0.0

    def test_analytic_trajectory_layout(self):
        traj = analytic_trajectory("aklt", {}, 4, 1.0, dt=0.25)
        assert len(traj) == 5
        assert traj.d == 3
        assert traj.method == "analytic"


@pytest.mark.unit
class TestStringOrder:
    """AKLT and cluster string order parameters."""

    def test_aklt_string_order_is_minus_four_ninths(self):
        ((z, value, separation),) = string_order_scan([0.0])
        assert z == 0.0
        assert value == pytest.approx(-4 / 9, abs=1e-10)
        assert separation >= 2

    def test_string_order_is_time_independent_on_orbit(self):
        first = AnalyticOrbit("aklt", 0, {"z": 0.5}, "thermodynamic")
        v0, _ = string_order_limit(first.state(0.0))
        v1, _ = string_order_limit(first.state(0.3))
        assert v1 == pytest.approx(v0, abs=1e-8)

    def test_dense_string_order_is_time_independent(self):
        orbit = AnalyticOrbit("aklt", 8, {"z": 0.5})
        values = [string_order(orbit.dense(t), "Oz_AKLT", 2, 5, n_sites=8) for t in (0.0, 0.3, 1.1)]
        assert max(values) - min(values) < 1e-10

    def test_cluster_string_order_at_quarter_period(self):
        orbit = AnalyticOrbit("cluster", 10, {})
        value = string_order(orbit.state(math.pi / 4), "Oy_cluster", 2, 7)
        assert abs(value) == pytest.approx(1.0, abs=1e-8)
        assert string_order(orbit.state(0.0), "Oy_cluster", 2, 7) == pytest.approx(0.0, abs=1e-12)

    def test_cluster_string_bounds(self):
        orbit = AnalyticOrbit("cluster", 8, {})
        with pytest.raises(ShapeError):
            string_order(orbit.state(0.0), "Oy_cluster", 0, 3)

    def test_unknown_kind(self):
        with pytest.raises(ParameterError, match="unknown string order"):
            string_order(np.ones(9), "Ox", 0, 1)

    def test_limit_needs_uniform_state(self):
        with pytest.raises(ParameterError):
            string_order_limit(AnalyticOrbit("aklt", 6, {}).state(0.0))


@pytest.mark.slow
class TestAcceptanceScale:
    """Revivals at the acceptance chain lengths."""

    def test_static_ssh_embedding_n12(self):
        params = {"j_o": 1.0, "j_e": 2 / 3, "delta": -2 / 3}
        orbit = AnalyticOrbit("ssh", 12, params)
        traj = exact_evolve(build_model("ssh", params, 12), orbit.dense(0.0), math.pi, dt=math.pi / 10)
        fidelity, _ = fidelity_series(traj)
        assert fidelity[-1] >= 1 - 1e-8

    def test_driven_ssh_n12_dt_convergence(self, ssh_driven_params):
        orbit = AnalyticOrbit("ssh", 12, ssh_driven_params)
        traj = exact_evolve(build_model("ssh", ssh_driven_params, 12), orbit.dense(0.0), math.pi, dt=0.025)
        fidelity, _ = fidelity_series(traj)
        assert fidelity[-1] >= 1 - 1e-5
        assert traj.richardson["fine_error"] < 1e-10 or traj.richardson["ratio"] >= 3.5

    def test_driven_xy_n8_revives_at_pi(self):
        params = {"j": 1.0, "h": 1.0, "d_anis": 0.5, "gamma": 0.1, "delta0": 0.1}
        orbit = AnalyticOrbit("xy", 8, params)
        traj = exact_evolve(build_model("xy", params, 8), orbit.dense(0.0), math.pi, dt=0.025)
        fidelity, _ = fidelity_series(traj)
        assert fidelity[-1] >= 1 - 1e-5
