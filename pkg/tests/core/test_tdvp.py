"""Tests for the MPO builder and one-site TDVP."""

import math

import numpy as np
import pytest

from orbit_scars_mcp.core.dynamics import exact_evolve, orbit_overlap_series
from orbit_scars_mcp.core.errors import CapacityError, ParameterError, ShapeError
from orbit_scars_mcp.core.lattice_models import build_model
from orbit_scars_mcp.core.mps import from_dense, norm, to_dense
from orbit_scars_mcp.core.operators import bitstring_state
from orbit_scars_mcp.core.orbits import AnalyticOrbit
from orbit_scars_mcp.core.tdvp import build_mpo, krylov_expm, mpo_to_dense, tdvp_evolve


@pytest.mark.unit
class TestMpo:
    """MPO assembly from operator strings."""

    @pytest.mark.parametrize(
        "model,params,n_sites",
        [
            ("ssh", {"j_o": 1.0, "j_e": 0.5, "delta": 0.2, "alpha0": 0.3}, 6),
            ("aklt", {"gamma": 0.1, "delta0": 0.2, "kappa": 0.3}, 4),
            ("cluster", {"j_heis": 0.3, "beta": 0.2}, 7),
        ],
    )
    def test_mpo_matches_dense_hamiltonian(self, model, params, n_sites):
        h = build_model(model, params, n_sites)
        np.testing.assert_allclose(mpo_to_dense(build_mpo(h, 0.3)), h.dense(0.3), atol=1e-12)

    def test_periodic_chain_rejected(self):
        h = build_model("ssh", {}, 8, "periodic")
        with pytest.raises(ParameterError, match="open chains"):
            build_mpo(h)


@pytest.mark.unit
class TestKrylov:
    """Lanczos exponential against the dense one."""

    def test_matches_dense_exponential(self):
        rng = np.random.default_rng(9)
        a = rng.normal(size=(30, 30)) + 1j * rng.normal(size=(30, 30))
        h = a + a.conj().T
        v = rng.normal(size=30) + 0j
        eigenvalues, vectors = np.linalg.eigh(h)
        expected = vectors @ (np.exp(-0.2j * eigenvalues) * (vectors.conj().T @ v))
        np.testing.assert_allclose(krylov_expm(lambda x: h @ x, v, 0.2), expected, atol=1e-10)

    def test_zero_vector(self):
        assert not np.any(krylov_expm(lambda x: x, np.zeros(4, dtype=complex), 1.0))


@pytest.mark.unit
class TestTdvp:
    """Fixed bond-dimension evolution."""

    def test_aklt_orbit_stays_on_chi_two_manifold(self):
        params = {"z": 0.5}
        orbit = AnalyticOrbit("aklt", 6, params)
        h = build_model("aklt", params, 6).h0
        traj = tdvp_evolve(h, orbit.state(0.0), math.pi / 2, dt=0.025, chi_max=2)
        assert traj.method == "tdvp"
        assert max(traj.final.chi) == 2
        assert np.min(orbit_overlap_series(traj, orbit)) >= 1 - 1e-6
        assert norm(traj.final) == pytest.approx(1.0, abs=1e-8)

    def test_full_bond_dimension_matches_exact(self):
        h = build_model("ssh", {"j_o": 1.0, "j_e": 0.5, "delta": 0.2, "alpha0": 0.3}, 6)
        psi0 = bitstring_state("010101")
        traj = tdvp_evolve(h, from_dense(psi0, 2), 0.5, dt=0.01, chi_max=8)
        exact = exact_evolve(h, psi0, 0.5, dt=0.01)
        psi = to_dense(traj.final)
        assert abs(np.vdot(exact.dense(-1), psi)) ** 2 >= 1 - 1e-4

    def test_chi_above_cap(self):
        orbit = AnalyticOrbit("aklt", 6, {})
        with pytest.raises(CapacityError):
            tdvp_evolve(build_model("aklt", {}, 6), orbit.state(0.0), 0.1, chi_max=1)

    def test_state_and_hamiltonian_must_agree(self):
        orbit = AnalyticOrbit("aklt", 6, {})
        with pytest.raises(ShapeError):
            tdvp_evolve(build_model("aklt", {}, 5), orbit.state(0.0), 0.1)

    def test_periodic_hamiltonian_rejected(self):
        psi = from_dense(bitstring_state("01010101"), 2)
        with pytest.raises(ParameterError):
            tdvp_evolve(build_model("ssh", {}, 8, "periodic"), psi, 0.1)
