"""Unit tests for matrix-product states and transfer matrices."""

import math

import numpy as np
import pytest

from orbit_scars_mcp.core.errors import CapacityError, ParameterError, ShapeError
from orbit_scars_mcp.core.mps import (
    MpsState,
    boundary_fixed_points,
    entanglement_entropy,
    from_dense,
    is_left_canonical,
    left_canonicalize,
    local_expectation,
    norm,
    normalize,
    overlap,
    to_dense,
    transfer_matrix,
    unblock,
    uniform_left_canonical,
)
from orbit_scars_mcp.core.operators import S_Z, SIGMA_Z
from orbit_scars_mcp.core.orbits import aklt_site_tensor


def _ghz_tensor() -> np.ndarray:
    a = np.zeros((2, 2, 2), dtype=complex)
    a[0, 0, 0] = 1.0
    a[1, 1, 1] = 1.0
    return a


@pytest.mark.unit
class TestMpsState:
    """Construction and shape validation."""

    def test_mismatched_bond_is_rejected(self):
        with pytest.raises(ShapeError, match="bond 0"):
            MpsState((np.ones((1, 2, 2)), np.ones((3, 2, 1))))

    def test_mixed_physical_dimension_is_rejected(self):
        with pytest.raises(ShapeError, match="physical dimension"):
            MpsState((np.ones((1, 2, 1)), np.ones((1, 3, 1))))

    def test_open_chain_with_wide_ends_needs_boundary_vectors(self):
        with pytest.raises(ShapeError, match="boundary vectors"):
            MpsState((_ghz_tensor(), _ghz_tensor()), boundary="open")

    def test_boundary_vectors_only_on_open_chains(self):
        with pytest.raises(ParameterError):
            MpsState((_ghz_tensor(),), boundary="periodic", boundary_vectors=(np.ones(2), np.ones(2)))

    def test_false_canonical_flag_is_rejected(self):
        with pytest.raises(ParameterError, match="left-canonical"):
            MpsState((2 * np.ones((1, 2, 1)),), left_canonical=(0,))

    def test_chi_lists_every_bond(self):
        mps = MpsState((np.ones((1, 2, 2)), np.ones((2, 2, 3)), np.ones((3, 2, 1))))
        assert mps.chi == (1, 2, 3, 1)
        assert mps.max_chi == 3
        assert mps.n_sites == 3
        assert mps.d == 2


@pytest.mark.unit
class TestDenseConversion:
    """Dense vectors and exact-rank decompositions."""

    def test_periodic_ghz_contracts_to_cat_state(self):
        mps = MpsState((_ghz_tensor(),) * 4, boundary="periodic")
        psi = to_dense(mps)
        expected = np.zeros(16)
        expected[0] = expected[15] = 1.0
        np.testing.assert_allclose(psi, expected, atol=1e-14)
        assert norm(mps) == pytest.approx(math.sqrt(2))

    def test_from_dense_reproduces_random_state(self):
        rng = np.random.default_rng(7)
        psi = rng.normal(size=3**4) + 1j * rng.normal(size=3**4)
        mps = from_dense(psi, 3)
        assert mps.n_sites == 4
        np.testing.assert_allclose(to_dense(mps), psi, atol=1e-12)
        assert all(is_left_canonical(mps.tensors[n]) for n in range(3))

    def test_from_dense_rejects_wrong_length(self):
        with pytest.raises(ShapeError, match="power"):
            from_dense(np.ones(6), 2)

    def test_dense_cap_is_enforced(self):
        mps = MpsState((np.ones((1, 2, 1)),) * 6)
        with pytest.raises(CapacityError) as excinfo:
            to_dense(mps, cap=32)
        assert excinfo.value.requested == 64
        assert "ORBIT_SCARS_DENSE_CAP" in str(excinfo.value)

    def test_left_canonicalize_keeps_the_state(self):
        mps = MpsState(
            (aklt_site_tensor(0.3),) * 4,
            boundary="open",
            boundary_vectors=(np.array([1.0, 0.0]), np.array([0.0, 1.0])),
        )
        canonical = left_canonicalize(mps)
        assert canonical.left_canonical == (0, 1, 2)
        np.testing.assert_allclose(to_dense(canonical), to_dense(mps), atol=1e-12)

    def test_unblock_splits_dimer_sites(self):
        rng = np.random.default_rng(3)
        psi = rng.normal(size=16) + 0j
        blocked = from_dense(psi, 4)
        split = unblock(blocked, 2)
        assert split.n_sites == 4
        assert split.d == 2
        np.testing.assert_allclose(to_dense(split), psi, atol=1e-12)

    def test_overlap_mixes_mps_and_dense(self):
        rng = np.random.default_rng(11)
        a = rng.normal(size=8) + 1j * rng.normal(size=8)
        b = rng.normal(size=8) + 1j * rng.normal(size=8)
        assert overlap(from_dense(a, 2), b) == pytest.approx(np.vdot(a, b))
        assert overlap(from_dense(a, 2), from_dense(b, 2)) == pytest.approx(np.vdot(a, b))

    def test_overlap_shape_mismatch(self):
        with pytest.raises(ShapeError):
            overlap(np.ones(4), np.ones(8))


@pytest.mark.unit
class TestTransferMatrices:
    """Transfer matrices and their fixed points."""

    def test_identity_transfer_of_left_canonical_tensor_fixes_identity(self):
        a = from_dense(np.random.default_rng(0).normal(size=8) + 0j, 2).tensors[1]
        e = transfer_matrix(a, None, a).matrix
        chi_l, chi_r = a.shape[0], a.shape[2]
        left = np.eye(chi_l).ravel()
        np.testing.assert_allclose(left @ e, np.eye(chi_r).ravel(), atol=1e-12)

    def test_operator_shape_mismatch(self):
        a = np.ones((1, 2, 1))
        with pytest.raises(ShapeError, match="physical dimensions"):
            transfer_matrix(a, np.eye(3), a)

    def test_row_index_is_bra_then_ket(self):
        bra = np.zeros((2, 1, 1), dtype=complex)
        ket = np.zeros((1, 1, 1), dtype=complex)
        bra[1, 0, 0] = 1.0
        ket[0, 0, 0] = 1.0
        e = transfer_matrix(bra, None, ket).matrix
        assert e.shape == (2, 1)
        assert e[1, 0] == 1.0

    def test_aklt_fixed_points_are_normalized(self):
        mps = MpsState((aklt_site_tensor(0.0),), boundary="thermodynamic")
        pair = boundary_fixed_points(mps)
        assert not pair.degenerate
        assert pair.left @ pair.right == pytest.approx(1.0)
        assert np.trace(pair.left.reshape(2, 2)) == pytest.approx(2.0)
        assert pair.dominant_eigenvalue == pytest.approx(1.0)

    def test_fixed_points_need_uniform_state(self):
        with pytest.raises(ParameterError):
            boundary_fixed_points(MpsState((np.ones((1, 2, 1)),)))

    def test_uniform_left_canonical_form(self):
        rng = np.random.default_rng(5)
        a = rng.normal(size=(3, 2, 3)) + 1j * rng.normal(size=(3, 2, 3))
        gauged = uniform_left_canonical(MpsState((a,), boundary="thermodynamic"))
        assert is_left_canonical(gauged.tensors[0], tol=1e-10)
        assert boundary_fixed_points(gauged).dominant_eigenvalue == pytest.approx(1.0)


@pytest.mark.unit
class TestObservables:
    """Entropies and local expectations."""

    def test_aklt_bulk_entropy_is_log_two(self):
        mps = MpsState((aklt_site_tensor(0.0),), boundary="thermodynamic")
        assert entanglement_entropy(mps, 0) == pytest.approx(math.log(2), abs=1e-10)

    def test_product_state_entropy_vanishes(self):
        mps = MpsState((np.array([1.0, 1.0]).reshape(1, 2, 1) / math.sqrt(2),) * 4)
        assert entanglement_entropy(mps, 2) == pytest.approx(0.0, abs=1e-12)

    def test_dense_bell_pair_entropy(self):
        psi = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2)
        assert entanglement_entropy(psi, 1) == pytest.approx(math.log(2))

    def test_cut_out_of_range(self):
        with pytest.raises(ShapeError, match="cut"):
            entanglement_entropy(np.ones(8) / math.sqrt(8), 3)

    def test_local_expectation_on_open_chain(self):
        up = np.array([0.0, 1.0]).reshape(1, 2, 1)
        down = np.array([1.0, 0.0]).reshape(1, 2, 1)
        mps = MpsState((up, down, up))
        assert local_expectation(mps, {0: SIGMA_Z}) == pytest.approx(1.0)
        assert local_expectation(mps, {1: SIGMA_Z}) == pytest.approx(-1.0)
        assert local_expectation(mps, {0: SIGMA_Z, 1: SIGMA_Z}) == pytest.approx(-1.0)

    def test_local_expectation_site_out_of_range(self):
        mps = MpsState((np.array([0.0, 1.0]).reshape(1, 2, 1),) * 2)
        with pytest.raises(ShapeError):
            local_expectation(mps, {5: SIGMA_Z})

    def test_aklt_magnetization_vanishes_in_bulk(self):
        mps = MpsState((aklt_site_tensor(0.0),), boundary="thermodynamic")
        assert abs(local_expectation(mps, {3: S_Z})) < 1e-12

    def test_normalize_thermodynamic_scales_eigenvalue_to_one(self):
        mps = MpsState((3.0 * aklt_site_tensor(0.0),), boundary="thermodynamic")
        assert boundary_fixed_points(normalize(mps)).dominant_eigenvalue == pytest.approx(1.0)

    def test_normalize_zero_state(self):
        with pytest.raises(ParameterError, match="zero"):
            normalize(MpsState((np.zeros((1, 2, 1)),)))
