"""Unit tests for symmetry operators and sector bases."""

import numpy as np
import pytest

from orbit_scars_mcp.core.errors import CapacityError, ParameterError
from orbit_scars_mcp.core.lattice_models import build_model
from orbit_scars_mcp.core.symmetry import (
    basis_digits,
    commutation_residual,
    diagonal_values,
    permutation,
    sector_operator,
    symmetry_operator,
    symmetry_sectors,
    verify_symmetry,
)


@pytest.mark.unit
class TestSymmetryOperators:
    """Diagonal and permutation symmetries on the computational basis."""

    def test_basis_digits_site_zero_most_significant(self):
        digits = basis_digits(3, 2)
        assert digits[:, 4].tolist() == [1, 0, 0]
        assert digits.shape == (3, 8)

    def test_magnetization_of_spin_one_basis(self):
        values = diagonal_values("magnetization", 2, 3)
        # digit 0 is m=+1
        assert values[0] == 2
        assert values[8] == -2

    def test_z4_squares_to_z2(self):
        z4 = diagonal_values("Z4_parity", 3, 3)
        z2 = diagonal_values("Z2_parity", 3, 3)
        np.testing.assert_allclose(z4**2, z2, atol=1e-14)

    def test_z4_needs_spin_one(self):
        with pytest.raises(ParameterError, match="spin-1"):
            diagonal_values("Z4_parity", 2, 2)

    @pytest.mark.parametrize(
        "kind", ["spatial_inversion", "global_spin_flip_X", "inversion_flip", "sublattice_flip_even", "sublattice_flip_odd"]
    )
    def test_permutations_are_involutions(self, kind):
        image = permutation(kind, 4, 3)
        assert sorted(image.tolist()) == list(range(81))
        np.testing.assert_array_equal(image[image], np.arange(81))

    def test_inversion_reverses_sites(self):
        image = permutation("spatial_inversion", 3, 2)
        assert image[0b100] == 0b001

    def test_unknown_kind(self):
        with pytest.raises(ParameterError, match="unknown symmetry"):
            symmetry_operator("translation", 4, 2)

    def test_flip_anticommutes_with_magnetization(self):
        flip = symmetry_operator("global_spin_flip_X", 4, 2).matrix
        mag = symmetry_operator("magnetization", 4, 2).matrix
        assert commutation_residual(flip, mag) > 1.0
        assert commutation_residual(flip, mag, anti=True) == 0.0


@pytest.mark.unit
class TestSectors:
    """Joint sectors and their orthonormal bases."""

    def test_ssh_magnetization_sectors_cover_space(self):
        h = build_model("ssh", {"j_e": 0.5}, 4)
        sectors = symmetry_sectors(h, ["magnetization"])
        assert sum(s.dimension for s in sectors) == 16
        assert sorted(s.dimension for s in sectors) == [1, 1, 4, 4, 6]

    def test_inversion_resolved_sectors_are_orthonormal(self):
        h = build_model("ssh", {"j_e": 0.5, "delta": 0.3}, 4)
        sectors = symmetry_sectors(h, ["magnetization", "spatial_inversion"])
        assert sum(s.dimension for s in sectors) == 16
        full = np.hstack([s.basis.toarray() for s in sectors])
        np.testing.assert_allclose(full.conj().T @ full, np.eye(16), atol=1e-12)
        for sector in sectors:
            restricted = sector_operator(sector, "spatial_inversion", 4, 2)
            np.testing.assert_allclose(restricted, sector.labels["spatial_inversion"] * np.eye(sector.dimension), atol=1e-12)

    def test_pinned_label(self):
        h = build_model("ssh", {"j_e": 0.5}, 4)
        (sector,) = symmetry_sectors(h, ["magnetization"], only={"magnetization": 0})
        assert sector.dimension == 6
        assert sector.label_text() == "magnetization=0"

    def test_restricted_hamiltonian_keeps_spectrum(self):
        h = build_model("aklt", {"gamma": 0.1}, 4)
        sectors = symmetry_sectors(h, ["Z2_parity"])
        energies = np.sort(np.concatenate([np.linalg.eigvalsh(s.restrict(h.sparse(0.3)).toarray()) for s in sectors]))
        np.testing.assert_allclose(energies, np.linalg.eigvalsh(h.dense(0.3)), atol=1e-10)

    def test_project_and_embed(self):
        h = build_model("ssh", {"j_e": 0.5}, 4)
        (sector,) = symmetry_sectors(h, ["magnetization"], only={"magnetization": 0})
        coefficients = np.arange(6, dtype=complex)
        np.testing.assert_allclose(sector.project(sector.embed(coefficients)), coefficients, atol=1e-14)

    def test_non_symmetry_is_rejected(self):
        h = build_model("cluster", {}, 6)
        with pytest.raises(ParameterError, match="does not commute"):
            verify_symmetry(h, "magnetization")

    def test_pin_needs_request(self):
        h = build_model("ssh", {}, 4)
        with pytest.raises(ParameterError, match="pinned"):
            symmetry_sectors(h, ["magnetization"], only={"Z2_parity": 1})

    def test_sector_cap(self):
        h = build_model("ssh", {}, 4)
        with pytest.raises(CapacityError):
            symmetry_sectors(h, ["magnetization"], sector_cap=4)
