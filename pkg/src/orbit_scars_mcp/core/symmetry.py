"""Symmetry operators and symmetry-resolved sector bases.

Diagonal symmetries (magnetization, Z2, Z4) split the computational basis
directly. Permutation involutions (inversion, spin flips and their product)
are resolved with characters +1/-1 on top of the diagonal split.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Literal, Mapping, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .errors import CapacityError, ParameterError
from .operators import DEFAULT_DENSE_CAP, Hamiltonian

logger = logging.getLogger(__name__)

SymmetryKind = Literal[
    "magnetization",
    "Z2_parity",
    "Z4_parity",
    "spatial_inversion",
    "global_spin_flip_X",
    "inversion_flip",
    "sublattice_flip_even",
    "sublattice_flip_odd",
]

DIAGONAL_KINDS = ("magnetization", "Z2_parity", "Z4_parity")
PERMUTATION_KINDS = (
    "spatial_inversion",
    "global_spin_flip_X",
    "inversion_flip",
    "sublattice_flip_even",
    "sublattice_flip_odd",
)
COMMUTATION_TOL = 1e-10


def basis_digits(n_sites: int, d: int) -> np.ndarray:
    """(N, d**N) array of local digits; site 0 is the most significant."""
    index = np.arange(d**n_sites)
    powers = d ** np.arange(n_sites - 1, -1, -1)
    return (index[None, :] // powers[:, None]) % d


def _digits_to_index(digits: np.ndarray, d: int) -> np.ndarray:
    n_sites = digits.shape[0]
    powers = d ** np.arange(n_sites - 1, -1, -1)
    return (digits * powers[:, None]).sum(axis=0)


def _local_m(digits: np.ndarray, d: int) -> np.ndarray:
    """Local magnetization: sigma^z eigenvalue for d=2, S^z for d=3."""
    if d == 2:
        return 2 * digits - 1
    if d == 3:
        return 1 - digits
    raise ParameterError(f"symmetries are defined for d=2 or d=3, got d={d}")


def _flip_digits(digits: np.ndarray, d: int, mask: np.ndarray) -> np.ndarray:
    flipped = (d - 1) - digits
    return np.where(mask[:, None], flipped, digits)


def permutation(kind: str, n_sites: int, d: int) -> np.ndarray:
    """Image index of every basis state under a permutation symmetry."""
    digits = basis_digits(n_sites, d)
    sites = np.arange(n_sites)
    if kind == "spatial_inversion":
        image = digits[::-1]
    elif kind == "global_spin_flip_X":
        image = _flip_digits(digits, d, np.ones(n_sites, dtype=bool))
    elif kind == "inversion_flip":
        image = _flip_digits(digits[::-1], d, np.ones(n_sites, dtype=bool))
    elif kind == "sublattice_flip_even":
        image = _flip_digits(digits, d, sites % 2 == 0)
    elif kind == "sublattice_flip_odd":
        image = _flip_digits(digits, d, sites % 2 == 1)
    else:
        raise ParameterError(f"{kind!r} is not a permutation symmetry")
    return _digits_to_index(image, d)


def diagonal_values(kind: str, n_sites: int, d: int) -> np.ndarray:
    m_total = _local_m(basis_digits(n_sites, d), d).sum(axis=0)
    if kind == "magnetization":
        return m_total.astype(complex)
    if kind == "Z2_parity":
        if d == 2:
            return np.where((n_sites - (m_total + n_sites) // 2) % 2 == 0, 1.0, -1.0).astype(complex)
        return np.where(m_total % 2 == 0, 1.0, -1.0).astype(complex)
    if kind == "Z4_parity":
        if d != 3:
            raise ParameterError("Z4 parity is defined for spin-1 chains")
        return (-1j) ** (m_total % 4)
    raise ParameterError(f"{kind!r} is not a diagonal symmetry")


@dataclass(frozen=True, eq=False)
class SymmetryOperator:
    kind: str
    n_sites: int
    d: int
    matrix: sp.csr_matrix

    @property
    def is_diagonal(self) -> bool:
        return self.kind in DIAGONAL_KINDS


def symmetry_operator(kind: str, n_sites: int, d: int) -> SymmetryOperator:
    dim = d**n_sites
    if kind in DIAGONAL_KINDS:
        matrix = sp.diags(diagonal_values(kind, n_sites, d), format="csr")
    elif kind in PERMUTATION_KINDS:
        image = permutation(kind, n_sites, d)
        matrix = sp.csr_matrix((np.ones(dim, dtype=complex), (image, np.arange(dim))), shape=(dim, dim))
    else:
        raise ParameterError(f"unknown symmetry kind {kind!r}")
    return SymmetryOperator(kind, n_sites, d, matrix)


def _residual(a: sp.spmatrix) -> float:
    a = sp.csr_matrix(a)
    return float(np.max(np.abs(a.data))) if a.nnz else 0.0


def commutation_residual(op: sp.spmatrix, h: sp.spmatrix, anti: bool = False) -> float:
    """max |[op, h]| (or of the anticommutator) over matrix entries."""
    return _residual(op @ h + h @ op if anti else op @ h - h @ op)


def verify_symmetry(h: Hamiltonian, kind: str, cap: int = DEFAULT_DENSE_CAP) -> None:
    """Raise unless ``kind`` commutes with the static part and every driven part."""
    op = symmetry_operator(kind, h.n_sites, h.d).matrix
    parts = h.sparse_parts(cap)
    scale = max(1.0, _residual(parts.static))
    if commutation_residual(op, parts.static) > COMMUTATION_TOL * scale:
        raise ParameterError(f"{kind} does not commute with the static part of the {h.model} Hamiltonian on {h.n_sites} sites")
    for schedule, matrix in parts.driven:
        if commutation_residual(op, matrix) > COMMUTATION_TOL * max(1.0, _residual(matrix)):
            raise ParameterError(
                f"{kind} does not commute with the {schedule.form} driven part of the {h.model} Hamiltonian on {h.n_sites} sites"
            )


@dataclass(frozen=True, eq=False)
class SectorBasis:
    """Orthonormal columns spanning one symmetry sector."""

    labels: Dict[str, complex]
    basis: sp.csc_matrix

    @property
    def dimension(self) -> int:
        return int(self.basis.shape[1])

    def restrict(self, matrix: sp.spmatrix) -> sp.csr_matrix:
        return (self.basis.conj().T @ matrix @ self.basis).tocsr()

    def project(self, vector: np.ndarray) -> np.ndarray:
        return self.basis.conj().T @ np.asarray(vector, dtype=complex)

    def embed(self, coefficients: np.ndarray) -> np.ndarray:
        return self.basis @ np.asarray(coefficients, dtype=complex)

    def label_text(self) -> str:
        return ",".join(f"{k}={_format_label(v)}" for k, v in self.labels.items()) or "full"


def _format_label(value: complex) -> str:
    value = complex(value)
    if abs(value.imag) < 1e-12:
        return f"{value.real:g}"
    return f"{value.real:g}{value.imag:+g}j"


def _group(perms: Sequence[np.ndarray], characters: Sequence[int]) -> List[Tuple[np.ndarray, int]]:
    """All products of the commuting involutions with their characters."""
    dim = perms[0].shape[0] if perms else 0
    elements = [(np.arange(dim), 1)]
    for perm, character in zip(perms, characters):
        elements = elements + [(perm[g], c * character) for g, c in elements]
    return elements


def _permutation_sector(indices: np.ndarray, elements: List[Tuple[np.ndarray, int]], dim: int) -> Optional[sp.csc_matrix]:
    images = np.stack([g[indices] for g, _ in elements])
    reps = images.min(axis=0)
    keep = indices == reps
    if not np.any(keep):
        return None
    kept_images = images[:, keep]
    n_cols = kept_images.shape[1]
    rows = kept_images.ravel()
    cols = np.tile(np.arange(n_cols), len(elements))
    data = np.repeat(np.array([c for _, c in elements], dtype=complex), n_cols)
    basis = sp.csc_matrix((data, (rows, cols)), shape=(dim, n_cols))
    norms = np.sqrt(np.asarray(abs(basis).power(2).sum(axis=0)).ravel())
    nonzero = norms > 1e-12
    if not np.any(nonzero):
        return None
    basis = basis[:, np.flatnonzero(nonzero)] @ sp.diags(1.0 / norms[nonzero])
    return sp.csc_matrix(basis)


def symmetry_sectors(
    h: Hamiltonian,
    requested: Sequence[str],
    only: Optional[Mapping[str, complex]] = None,
    cap: int = DEFAULT_DENSE_CAP,
    sector_cap: Optional[int] = None,
) -> List[SectorBasis]:
    """Orthonormal bases of every joint sector of the requested symmetries.

    ``only`` pins labels (e.g. ``{"magnetization": 0}``); without it the
    sector dimensions sum to the full Hilbert-space dimension.
    """
    only = dict(only or {})
    for kind in requested:
        if kind not in DIAGONAL_KINDS and kind not in PERMUTATION_KINDS:
            raise ParameterError(f"unknown symmetry kind {kind!r}")
    for kind in only:
        if kind not in requested:
            raise ParameterError(f"label {kind!r} pinned but not requested")
    if h.dimension > cap:
        raise CapacityError("Hilbert space", h.dimension, cap, hint="raise ORBIT_SCARS_DENSE_CAP")
    for kind in requested:
        verify_symmetry(h, kind, cap)

    dim = h.dimension
    diagonal = [k for k in requested if k in DIAGONAL_KINDS]
    perm_kinds = [k for k in requested if k in PERMUTATION_KINDS]
    perms = [permutation(k, h.n_sites, h.d) for k in perm_kinds]

    values = {k: np.round(diagonal_values(k, h.n_sites, h.d), 12) for k in diagonal}
    label_sets = [
        sorted(set(values[k].tolist()), key=lambda v: (v.real, v.imag)) if k not in only else [complex(only[k])]
        for k in diagonal
    ]
    sectors: List[SectorBasis] = []
    for combo in itertools.product(*label_sets):
        mask = np.ones(dim, dtype=bool)
        for k, v in zip(diagonal, combo):
            mask &= np.abs(values[k] - v) < 1e-9
        indices = np.flatnonzero(mask)
        if indices.size == 0:
            continue
        labels = dict(zip(diagonal, combo))
        for kind, perm in zip(perm_kinds, perms):
            if not np.all(mask[perm[indices]]):
                raise ParameterError(f"{kind} does not preserve the sector {labels}")
        if not perm_kinds:
            data = np.ones(indices.size, dtype=complex)
            basis = sp.csc_matrix((data, (indices, np.arange(indices.size))), shape=(dim, indices.size))
            sectors.append(SectorBasis(labels, basis))
            continue
        for characters in itertools.product((1, -1), repeat=len(perm_kinds)):
            perm_labels = dict(zip(perm_kinds, characters))
            if any(k in only and complex(only[k]) != c for k, c in perm_labels.items()):
                continue
            basis = _permutation_sector(indices, _group(perms, characters), dim)
            if basis is not None:
                sectors.append(SectorBasis({**labels, **perm_labels}, basis))

    if sector_cap is not None:
        for sector in sectors:
            if sector.dimension > sector_cap:
                raise CapacityError(
                    f"sector {sector.label_text()}", sector.dimension, sector_cap, hint="raise ORBIT_SCARS_SECTOR_CAP"
                )
    logger.info(f"Resolved {len(sectors)} sectors of {h.model} on {h.n_sites} sites: dims {[s.dimension for s in sectors]}")
    return sectors


def sector_operator(sector: SectorBasis, kind: str, n_sites: int, d: int) -> np.ndarray:
    """Dense matrix of a symmetry operator inside a sector it preserves."""
    op = symmetry_operator(kind, n_sites, d).matrix
    restricted = (sector.basis.conj().T @ op @ sector.basis).toarray()
    image = (op @ sector.basis).toarray()
    leak = np.linalg.norm(image - sector.basis @ restricted) if sector.dimension else 0.0
    if leak > 1e-9:
        raise ParameterError(f"{kind} does not preserve the sector {sector.label_text()}")
    return restricted
