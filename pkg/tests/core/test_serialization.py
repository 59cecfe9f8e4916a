"""Tests for mps-v1 documents and Hamiltonian listings."""

import json

import numpy as np
import pytest

from orbit_scars_mcp.core.errors import ShapeError
from orbit_scars_mcp.core.lattice_models import build_model
from orbit_scars_mcp.core.mps import to_dense
from orbit_scars_mcp.core.orbits import AnalyticOrbit
from orbit_scars_mcp.core.serialization import (
    ComplexArray,
    hamiltonian_listing,
    load_mps,
    mps_from_json,
    mps_to_json,
    save_mps,
)


@pytest.mark.unit
class TestMpsDocuments:
    """Structured-text MPS container."""

    def test_document_layout(self):
        mps = AnalyticOrbit("aklt", 4, {"z": 0.5}).state(0.3)
        document = json.loads(mps_to_json(mps))
        assert document["format"] == "mps-v1"
        assert document["boundary"] == "open"
        assert document["chi"] == list(mps.chi)
        assert document["tensors"][0]["shape"] == [2, 3, 2]
        assert len(document["tensors"][0]["data"]) == 12
        assert len(document["boundary_vectors"]) == 2

    def test_save_and_load_keep_amplitudes(self, tmp_path):
        mps = AnalyticOrbit("cluster", 6, {}).state(0.4)
        path = save_mps(mps, tmp_path / "states" / "cluster.json")
        loaded = load_mps(path)
        np.testing.assert_array_equal(to_dense(loaded), to_dense(mps))
        assert loaded.boundary == "open"

    def test_thermodynamic_cell(self):
        mps = AnalyticOrbit("aklt", 0, {"z": 0.5}, "thermodynamic").state(0.1)
        loaded = mps_from_json(mps_to_json(mps, indent=None))
        assert loaded.boundary == "thermodynamic"
        assert loaded.n_sites == 2
        np.testing.assert_array_equal(loaded.tensors[1], mps.tensors[1])

    def test_wrong_format_tag(self):
        text = mps_to_json(AnalyticOrbit("xy", 3, {}).state(0.0)).replace("mps-v1", "mps-v0")
        with pytest.raises(ShapeError, match="invalid mps-v1"):
            mps_from_json(text)

    def test_tensor_count_must_match(self):
        document = json.loads(mps_to_json(AnalyticOrbit("xy", 3, {}).state(0.0)))
        document["n_sites"] = 4
        with pytest.raises(ShapeError, match="n_sites=4"):
            mps_from_json(json.dumps(document))

    def test_recorded_chi_must_match(self):
        document = json.loads(mps_to_json(AnalyticOrbit("xy", 3, {}).state(0.0)))
        document["chi"] = [1, 2, 2, 1]
        with pytest.raises(ShapeError, match="bond dimensions"):
            mps_from_json(json.dumps(document))

    def test_complex_array_size_check(self):
        with pytest.raises(ValueError):
            ComplexArray(shape=[2, 2], data=[(1.0, 0.0)])
        array = ComplexArray.from_array(np.array([[1 + 2j, 3.0]]))
        assert array.data == [(1.0, 2.0), (3.0, 0.0)]


@pytest.mark.unit
class TestHamiltonianListing:
    """Operator-string listings with their H0/H1 roles."""

    def test_roles_and_schedules(self):
        h = build_model("ssh", {"j_o": 1.0, "j_e": 0.5, "alpha0": 0.3}, 6)
        listing = hamiltonian_listing(h)
        assert listing.model == "ssh"
        assert len(listing.strings) == len(h.terms)
        roles = {record.role for record in listing.strings}
        assert roles == {"h0", "h1"}
        driven = [r for r in listing.strings if r.part == "driven"]
        assert driven and all(r.schedule == "alpha" for r in driven)
        assert listing.schedules["alpha"].form == "sine"

    def test_sites_follow_support(self):
        listing = hamiltonian_listing(build_model("cluster", {}, 6, "periodic"))
        wrapped = [r for r in listing.strings if r.support_start == 5]
        assert wrapped and wrapped[0].sites == [5, 0, 1]
