"""Floquet operators, eigenphase statistics and factorization certificates."""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import CapacityError, NumericalError, ParameterError, ShapeError
from .operators import DEFAULT_DENSE_CAP, Hamiltonian, SparseParts
from .reports import FactorizationCertificate, FloquetSpectrum, ScarModeOverlap
from .symmetry import SectorBasis, sector_operator, symmetry_operator

logger = logging.getLogger(__name__)

DEFAULT_SECTOR_CAP = 8192
DEFAULT_STEPS_PER_PERIOD = 2000
UNITARITY_TOL = 1e-8
HISTOGRAM_BINS = 40
HISTOGRAM_RANGE = (0.0, 4.0)
QUASI_DEGENERATE_SPACING = 0.1

IDENTITY_LABELS = {
    "global_spin_flip_X": "U_T=(X*U_a)^2",
    "spatial_inversion": "U_T=(R*U_a)^2",
    "Z4_parity": "U_T=z(Z4*U_a)^2",
}


@dataclass(frozen=True, eq=False)
class FloquetOperator:
    """U_T over one period; U_a covers [0, T/2] and U_b = U_T U_a^dagger covers [T/2, T]."""

    u_t: np.ndarray
    u_a: np.ndarray
    u_b: np.ndarray
    period: float
    dt: float
    sector: str
    unitarity_residual: float

    @property
    def dimension(self) -> int:
        return int(self.u_t.shape[0])


def unitarity_residual(u: np.ndarray) -> float:
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def _sector_parts(h: Hamiltonian, sector: Optional[SectorBasis], cap: int) -> SparseParts:
    parts = h.sparse_parts(cap)
    if sector is None:
        return parts
    return SparseParts(
        static=sector.restrict(parts.static),
        driven=tuple((schedule, sector.restrict(matrix)) for schedule, matrix in parts.driven),
    )


def _dense_parts(parts: SparseParts):
    static = parts.static.toarray() if sp.issparse(parts.static) else np.asarray(parts.static)
    driven = [(s, m.toarray() if sp.issparse(m) else np.asarray(m)) for s, m in parts.driven if not s.is_zero]
    return static, driven


def _propagate_dense(static: np.ndarray, driven, block: np.ndarray, t0: float, dt: float, n_steps: int) -> np.ndarray:
    if not driven:
        return scipy.linalg.expm(-1j * dt * n_steps * static) @ block
    out = block
    for k in range(n_steps):
        t_mid = t0 + (k + 0.5) * dt
        matrix = static + sum(schedule(t_mid) * m for schedule, m in driven)
        out = scipy.linalg.expm(-1j * dt * matrix) @ out
    return out


def floquet_operator(
    h: Hamiltonian,
    sector: Optional[SectorBasis] = None,
    period: Optional[float] = None,
    dt: Optional[float] = None,
    sector_cap: int = DEFAULT_SECTOR_CAP,
    cap: int = DEFAULT_DENSE_CAP,
) -> FloquetOperator:
    """Time-ordered U_T inside a sector by midpoint steps on a grid symmetric about T/2.

    The unitarity check refines dt once before giving up.
    """
    period = period or h.period
    if not period:
        raise ParameterError(f"{h.model} Hamiltonian has no drive period; pass period=")
    dim = sector.dimension if sector is not None else h.dimension
    if dim > sector_cap:
        label = sector.label_text() if sector is not None else "full space"
        raise CapacityError(f"Floquet sector {label}", dim, sector_cap, hint="raise ORBIT_SCARS_SECTOR_CAP or resolve more symmetries")
    static, driven = _dense_parts(_sector_parts(h, sector, cap))
    half = period / 2
    step = dt or period / DEFAULT_STEPS_PER_PERIOD
    label = sector.label_text() if sector is not None else "full"

    for attempt in range(2):
        n_half = max(1, int(math.ceil(half / step - 1e-9)))
        step = half / n_half
        identity = np.eye(dim, dtype=complex)
        u_a = _propagate_dense(static, driven, identity, 0.0, step, n_half)
        u_t = _propagate_dense(static, driven, u_a, half, step, n_half)
        residual = unitarity_residual(u_t)
        if residual <= UNITARITY_TOL:
            break
        if attempt == 0:
            logger.info(f"Unitarity residual {residual:.3e} in sector {label}; halving dt to {step / 2:.3e}")
            step /= 2
            continue
        logger.warning(f"U_T not unitary to {UNITARITY_TOL:.0e} in sector {label}")
        raise NumericalError(f"Floquet operator failed the unitarity check: residual {residual:.3e}")

    u_b = u_t @ u_a.conj().T
    logger.info(f"Floquet operator of {h.model} in sector {label}: dim={dim}, {2 * n_half} steps")
    return FloquetOperator(u_t, u_a, u_b, period, step, label, residual)


def phase_statistics(phases: Sequence[float], sector: str = "") -> FloquetSpectrum:
    """Spacing statistics of phases on the circle, wrap-around spacing included."""
    phi = np.sort(np.mod(np.asarray(phases, dtype=float) + math.pi, 2 * math.pi) - math.pi)
    if phi.size < 2:
        raise ShapeError(f"spacing statistics need at least two phases, got {phi.size}")
    spacings = np.diff(np.append(phi, phi[0] + 2 * math.pi))
    following = np.roll(spacings, -1)
    larger = np.maximum(spacings, following)
    smaller = np.minimum(spacings, following)
    r_values = np.divide(smaller, larger, out=np.ones_like(spacings), where=larger > 0)
    mean = float(np.mean(spacings))
    histogram, edges = np.histogram(spacings / mean, bins=HISTOGRAM_BINS, range=HISTOGRAM_RANGE, density=True)
    return FloquetSpectrum(
        sector=sector,
        phases=phi.tolist(),
        spacings=spacings.tolist(),
        r_values=r_values.tolist(),
        r_mean=float(np.mean(r_values)),
        histogram=histogram.tolist(),
        bin_edges=edges.tolist(),
        quasi_degenerate_fraction=float(np.mean(spacings < QUASI_DEGENERATE_SPACING * mean)),
    )


def eigenphases(u: np.ndarray) -> np.ndarray:
    return np.sort(np.angle(np.linalg.eigvals(u)))


def eigenphase_statistics(u: np.ndarray, sector: str = "") -> FloquetSpectrum:
    residual = unitarity_residual(u)
    if residual > UNITARITY_TOL:
        logger.warning(f"Eigenphase statistics on a matrix {residual:.3e} away from unitary")
    return phase_statistics(eigenphases(u), sector)


def poisson_phases(n: int, seed: int = 0) -> np.ndarray:
    """Independent uniform phases, the uncorrelated reference spectrum."""
    rng = np.random.default_rng(seed)
    return rng.uniform(-math.pi, math.pi, size=n)


def factorization_check(
    model: str,
    u_t: np.ndarray,
    u_a: np.ndarray,
    symmetry: str,
    sector: Optional[SectorBasis],
    n_sites: int,
    d: int,
) -> FactorizationCertificate:
    """Residual of U_T = z (S U_a)^2 with z the Z2 label of the sector for Z4 (else 1)."""
    if sector is None:
        s_matrix = symmetry_operator(symmetry, n_sites, d).matrix.toarray()
    else:
        s_matrix = sector_operator(sector, symmetry, n_sites, d)
    prefactor = 1.0
    if symmetry == "Z4_parity":
        labels = sector.labels if sector is not None else {}
        if "Z2_parity" not in labels:
            raise ParameterError("the Z4 factorization needs a Z2_parity sector")
        prefactor = float(complex(labels["Z2_parity"]).real)
    candidate = prefactor * (s_matrix @ u_a) @ (s_matrix @ u_a)
    residual = float(np.max(np.linalg.norm(u_t - candidate, axis=0)))
    certificate = FactorizationCertificate(
        model=model,
        identity=IDENTITY_LABELS.get(symmetry, "U_T=(S*U_a)^2"),
        symmetry=symmetry,
        residual=residual,
        prefactor=prefactor,
    )
    logger.info(f"Factorization {certificate.identity} for {model}: residual {residual:.3e}")
    return certificate


def scar_mode_overlap(
    u_t: np.ndarray,
    probes: Sequence[np.ndarray],
    sector: Optional[SectorBasis] = None,
    labels: Optional[Sequence[str]] = None,
) -> List[ScarModeOverlap]:
    """|<p|U_T|p>|^2 for each probe after projection into the sector."""
    labels = list(labels) if labels is not None else [f"probe{k}" for k in range(len(probes))]
    if len(labels) != len(probes):
        raise ShapeError(f"{len(labels)} labels for {len(probes)} probes")
    out = []
    for label, probe in zip(labels, probes):
        vec = np.asarray(probe, dtype=complex).ravel()
        full_norm = float(np.vdot(vec, vec).real)
        coefficients = sector.project(vec) if sector is not None else vec
        if coefficients.size != u_t.shape[0]:
            raise ShapeError(f"probe of sector length {coefficients.size} vs U_T of dimension {u_t.shape[0]}")
        inside = float(np.vdot(coefficients, coefficients).real)
        if inside <= 1e-300:
            out.append(ScarModeOverlap(label=label, return_probability=0.0, outside_weight=1.0))
            continue
        amplitude = np.vdot(coefficients, u_t @ coefficients) / inside
        out.append(
            ScarModeOverlap(
                label=label,
                return_probability=float(abs(amplitude) ** 2),
                outside_weight=max(0.0, 1.0 - inside / full_norm),
            )
        )
    return out


def phase_doubling_residual(u_t: np.ndarray, v: np.ndarray, prefactor: float = 1.0) -> float:
    """Circular Hausdorff distance between phases of U_T and doubled phases of V.

    Zero when U_T = prefactor * V^2 with both matrices diagonalizable.
    """
    doubled = np.angle(prefactor * np.exp(2j * np.angle(np.linalg.eigvals(v))))
    actual = np.angle(np.linalg.eigvals(u_t))
    if doubled.size == 0:
        return 0.0
    gap = np.abs(np.angle(np.exp(1j * (doubled[:, None] - actual[None, :]))))
    return float(max(gap.min(axis=1).max(), gap.min(axis=0).max()))
