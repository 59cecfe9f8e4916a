"""Unit tests for the closed-form periodic orbits."""

import math

import numpy as np
import pytest

from orbit_scars_mcp.core.errors import ParameterError
from orbit_scars_mcp.core.lattice_models import build_model
from orbit_scars_mcp.core.mps import boundary_fixed_points, is_left_canonical, to_dense
from orbit_scars_mcp.core.operators import apply
from orbit_scars_mcp.core.orbits import (
    AnalyticOrbit,
    aklt_norm_factor,
    aklt_site_tensor,
    analytic_orbit,
    orbit_period,
)

ORBIT_CASES = [
    ("ssh", {"j_o": 1.0}, 8),
    ("aklt", {"z": 0.5}, 6),
    ("xy", {"h": 1.0}, 5),
    ("iadecola_schecter", {"delta": 1.0, "j": 0.2}, 7),
    ("cluster", {}, 8),
]


@pytest.mark.unit
class TestAnalyticOrbit:
    """States, periods and the H0 dynamics they solve."""

    @pytest.mark.parametrize("model,params,n_sites", ORBIT_CASES)
    def test_dense_state_is_normalized(self, model, params, n_sites):
        orbit = AnalyticOrbit(model, n_sites, params)
        psi = orbit.dense(0.4)
        assert psi.size == orbit.local_dim**n_sites
        assert np.linalg.norm(psi) == pytest.approx(1.0)

    @pytest.mark.parametrize("model,params,n_sites", ORBIT_CASES)
    def test_returns_after_one_period(self, model, params, n_sites):
        orbit = AnalyticOrbit(model, n_sites, params)
        start, end = orbit.dense(0.1), orbit.dense(0.1 + orbit.period)
        assert abs(np.vdot(start, end)) ** 2 == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("model,params,n_sites", ORBIT_CASES)
    def test_orbit_solves_h0_schrodinger_equation(self, model, params, n_sites):
        h0 = build_model(model, params, n_sites).h0
        orbit = AnalyticOrbit(model, n_sites, params)
        t, eps = 0.3, 1e-5
        psi = orbit.dense(t)
        derivative = (orbit.dense(t + eps) - orbit.dense(t - eps)) / (2 * eps)
        h_psi = apply(h0, psi)
        # equal up to a global energy shift
        energy = np.vdot(psi, h_psi)
        phase = np.vdot(psi, 1j * derivative)
        residual = 1j * derivative - phase * psi - (h_psi - energy * psi)
        assert np.linalg.norm(residual) < 1e-6

    def test_periods(self):
        assert orbit_period("ssh", {"j_o": 2.0}) == pytest.approx(math.pi / 2)
        assert orbit_period("aklt", {}) == pytest.approx(math.pi / 2)
        assert orbit_period("xy", {"h": 0.5}) == pytest.approx(2 * math.pi)
        assert orbit_period("iadecola_schecter", {"delta": 1.0, "j": 0.2}) == pytest.approx(2 * math.pi / 1.2)
        assert orbit_period("cluster", {}) == pytest.approx(math.pi)

    def test_zero_tower_spacing(self):
        with pytest.raises(ParameterError, match="zero tower spacing"):
            orbit_period("iadecola_schecter", {"delta": 1.0, "j": 0.5})

    def test_ssh_orbit_is_blocked(self):
        state = analytic_orbit("ssh", {}, 0.2, 8)
        assert state.n_sites == 4
        assert state.d == 4

    def test_xy_nematic_control_is_static(self):
        first = to_dense(analytic_orbit("xy", {"nematic": True}, 0.0, 4))
        later = to_dense(analytic_orbit("xy", {"nematic": True}, 0.9, 4))
        np.testing.assert_allclose(first, later)
        site = np.array([1.0, 0.0, 1.0]) / math.sqrt(2.0)
        np.testing.assert_allclose(first, np.kron(np.kron(site, site), np.kron(site, site)))
        staggered = to_dense(analytic_orbit("xy", {}, 0.0, 4))
        assert abs(np.vdot(staggered, first)) < 1 - 1e-3

    def test_ssh_needs_even_chain(self):
        with pytest.raises(ParameterError, match="even"):
            analytic_orbit("ssh", {}, 0.0, 7)

    def test_domain_wall_orbit_is_open_only(self):
        with pytest.raises(ParameterError, match="open chains"):
            analytic_orbit("iadecola_schecter", {}, 0.0, 8, "periodic")

    def test_unknown_model(self):
        with pytest.raises(ParameterError, match="unknown orbit model"):
            analytic_orbit("heisenberg", {}, 0.0, 4)

    def test_single_site_rejected(self):
        with pytest.raises(ParameterError, match="at least two sites"):
            analytic_orbit("aklt", {}, 0.0, 1)


@pytest.mark.unit
class TestAkltTensor:
    """The AKLT tensor and its (S+)^2 deformation."""

    def test_undeformed_tensor_is_canonical(self):
        a = aklt_site_tensor(0.0)
        assert is_left_canonical(a)
        right = np.einsum("asb,csb->ac", a, a.conj())
        np.testing.assert_allclose(right, np.eye(2), atol=1e-14)

    @pytest.mark.parametrize("z", [0.0, 0.5, 1.3j])
    def test_transfer_eigenvalue_is_norm_factor(self, z):
        state = AnalyticOrbit("aklt", 0, {"z": z}, "thermodynamic").state(0.7)
        pair = boundary_fixed_points(state)
        assert pair.dominant_eigenvalue == pytest.approx(aklt_norm_factor(z) ** 2, rel=1e-10)

    def test_periodic_orbit(self):
        psi = to_dense(analytic_orbit("aklt", {"z": 0.5}, 0.2, 4, "periodic"))
        assert np.linalg.norm(psi) == pytest.approx(1.0)
        with pytest.raises(ParameterError):
            analytic_orbit("aklt", {}, 0.0, 5, "periodic")
