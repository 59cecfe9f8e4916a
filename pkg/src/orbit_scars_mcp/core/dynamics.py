"""Exact propagation and observable time series."""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .errors import CapacityError, NumericalError, ParameterError, ShapeError
from .lattice_models import cluster_string_operator
from .mps import DEFAULT_DENSE_CAP, MpsState, as_dense, entanglement_entropy, local_expectation
from .operators import DENSE_MATRIX_CAP, Hamiltonian, OperatorString, S_Z, SparseParts, apply_string
from .orbits import analytic_orbit
from .reports import FidelitySummary

logger = logging.getLogger(__name__)

DEFAULT_DT = 0.025
EIG_CAP = 4096
NORM_TOL = 1e-8
RICHARDSON_FLOOR = 1e-10
RICHARDSON_MIN_RATIO = 3.5
STRING_ORDER_TOL = 1e-8

State = Union[np.ndarray, MpsState]


@dataclass
class Trajectory:
    """Sampled states on a uniform time grid plus named observable series."""

    times: np.ndarray
    states: List[State]
    method: str
    dt: float
    n_sites: int
    d: int
    observables: Dict[str, np.ndarray] = field(default_factory=dict)
    integrator_order: int = 2
    richardson: Dict[str, float] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)

    def dense(self, index: int, cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
        return as_dense(self.states[index], cap)

    @property
    def final(self) -> State:
        return self.states[-1]


def time_grid(t_final: float, dt: float) -> Tuple[np.ndarray, float]:
    """Uniform grid ending exactly at ``t_final``; dt is shrunk to fit."""
    if dt <= 0.0:
        raise ParameterError(f"dt must be positive, got {dt}")
    if t_final < 0.0:
        raise ParameterError(f"t_final must be non-negative, got {t_final}")
    if t_final == 0.0:
        return np.zeros(1), dt
    n_steps = max(1, int(math.ceil(t_final / dt - 1e-9)))
    step = t_final / n_steps
    return step * np.arange(n_steps + 1), step


def midpoint_propagate(
    parts: SparseParts,
    block: np.ndarray,
    t0: float,
    dt: float,
    n_steps: int,
    keep: bool = False,
) -> Tuple[np.ndarray, List[np.ndarray]]:
    """Apply prod_k exp(-i dt H(t0 + (k + 1/2) dt)) to a vector or a block of columns."""
    current = np.asarray(block, dtype=complex)
    history = [current] if keep else []
    static_only = not parts.driven
    frozen = parts.static.tocsc() if static_only else None
    for k in range(n_steps):
        matrix = frozen if static_only else parts.at(t0 + (k + 0.5) * dt).tocsc()
        current = scipy.sparse.linalg.expm_multiply(-1j * dt * matrix, current)
        if keep:
            history.append(current)
    return current, history


def _check_norms(states: Sequence[np.ndarray], tol: float = NORM_TOL) -> float:
    drift = max(abs(np.linalg.norm(s) - 1.0) for s in states)
    if drift > tol:
        logger.warning(f"Norm drift {drift:.3e} exceeds {tol:.0e}")
        raise NumericalError(f"propagation lost normalization: max |norm - 1| = {drift:.3e}")
    return drift


def _richardson(parts: SparseParts, psi0: np.ndarray, dt: float, n_steps: int, terminal: np.ndarray) -> Dict[str, float]:
    half, _ = midpoint_propagate(parts, psi0, 0.0, dt / 2, 2 * n_steps)
    quarter, _ = midpoint_propagate(parts, psi0, 0.0, dt / 4, 4 * n_steps)
    coarse = float(np.linalg.norm(terminal - half))
    fine = float(np.linalg.norm(half - quarter))
    ratio = coarse / fine if fine > 0.0 else math.inf
    return {"coarse_error": coarse, "fine_error": fine, "ratio": ratio}


def exact_evolve(
    h: Hamiltonian,
    psi0: np.ndarray,
    t_final: float,
    dt: float = DEFAULT_DT,
    check: bool = True,
    max_refinements: int = 3,
    cap: int = DEFAULT_DENSE_CAP,
    eig_cap: int = EIG_CAP,
) -> Trajectory:
    """Dense Schrödinger evolution sampled every dt.

    Static Hamiltonians up to ``eig_cap`` use the eigendecomposition; everything
    else takes midpoint exponential steps, validated by a Richardson check that
    halves dt until the second-order contract holds.
    """
    if h.dimension > cap:
        raise CapacityError("dense evolution", h.dimension, cap, hint="raise ORBIT_SCARS_DENSE_CAP or reduce n_sites")
    psi = np.asarray(psi0, dtype=complex).ravel()
    if psi.size != h.dimension:
        raise ShapeError(f"initial state of length {psi.size} on a Hilbert space of dimension {h.dimension}")
    norm0 = np.linalg.norm(psi)
    if norm0 == 0.0:
        raise ParameterError("initial state is the zero vector")
    psi = psi / norm0
    times, sample_step = time_grid(t_final, dt)
    step, n_steps = sample_step, len(times) - 1

    if not h.is_driven and h.dimension <= eig_cap:
        energies, vectors = scipy.linalg.eigh(h.dense(0.0, cap=max(eig_cap, DENSE_MATRIX_CAP)))
        coefficients = vectors.conj().T @ psi
        states = [vectors @ (np.exp(-1j * energies * t) * coefficients) for t in times]
        _check_norms(states)
        return Trajectory(times, states, "exact", sample_step, h.n_sites, h.d)

    parts = h.sparse_parts(cap)
    if not h.is_driven:
        parts = SparseParts(static=parts.static, driven=())
    refinements = 0
    while True:
        final, history = midpoint_propagate(parts, psi, 0.0, step, n_steps, keep=True)
        if not check or not parts.driven or n_steps == 0:
            richardson: Dict[str, float] = {}
            break
        richardson = _richardson(parts, psi, step, n_steps, final)
        if richardson["fine_error"] < RICHARDSON_FLOOR or richardson["ratio"] >= RICHARDSON_MIN_RATIO:
            break
        if refinements >= max_refinements:
            raise NumericalError(
                f"Richardson check failed at dt={step:.3e}: error ratio {richardson['ratio']:.3f} "
                f"(needs >= {RICHARDSON_MIN_RATIO}) after {refinements} refinements"
            )
        refinements += 1
        logger.info(f"Richardson ratio {richardson['ratio']:.3f} at dt={step:.3e}; halving dt")
        step /= 2
        n_steps *= 2

    if richardson:
        richardson.update(refined_dt=step, refinements=float(refinements))
    if refinements:
        # report on the requested grid
        history = history[:: 2**refinements]
    _check_norms(history)
    return Trajectory(times, history, "exact", sample_step, h.n_sites, h.d, richardson=richardson)


def analytic_trajectory(
    model: str,
    params: Dict[str, object],
    n_sites: int,
    t_final: float,
    dt: float = DEFAULT_DT,
    boundary: str = "open",
) -> Trajectory:
    times, step = time_grid(t_final, dt)
    states = [analytic_orbit(model, params, float(t), n_sites, boundary) for t in times]
    d = 3 if model in ("aklt", "xy") else 2
    return Trajectory(times, states, "analytic", step, n_sites, d)


def _window_mask(times: np.ndarray, window: Optional[Tuple[float, float]]) -> np.ndarray:
    if window is None:
        return np.ones(len(times), dtype=bool)
    t0, t1 = window
    mask = (times >= t0 - 1e-12) & (times <= t1 + 1e-12)
    if not np.any(mask):
        raise ParameterError(f"window [{t0}, {t1}] contains no samples of the trajectory")
    return mask


def fidelity_series(
    traj: Trajectory,
    ref: Optional[State] = None,
    window: Optional[Tuple[float, float]] = None,
    cap: int = DEFAULT_DENSE_CAP,
) -> Tuple[np.ndarray, FidelitySummary]:
    """F(t) = |<ref|psi(t)>|^2 (ref defaults to psi(0)) and its maximum over ``window``."""
    ref_vec = as_dense(traj.states[0] if ref is None else ref, cap)
    ref_vec = ref_vec / np.linalg.norm(ref_vec)
    values = []
    for k in range(len(traj)):
        psi = traj.dense(k, cap)
        values.append(abs(np.vdot(ref_vec, psi)) ** 2 / np.vdot(psi, psi).real)
    fidelity = np.asarray(values)
    traj.observables["fidelity"] = fidelity

    mask = _window_mask(traj.times, window)
    windowed = np.flatnonzero(mask)
    best = windowed[int(np.argmax(fidelity[windowed]))]
    f_max = float(fidelity[best])
    span = list(window) if window is not None else [float(traj.times[0]), float(traj.times[-1])]
    summary = FidelitySummary(
        f_max=f_max,
        t_star=float(traj.times[best]),
        window=span,
        fidelity_density=-math.log(max(f_max, 1e-300)) / traj.n_sites,
    )
    return fidelity, summary


def fidelity_density_series(traj: Trajectory, ref: Optional[State] = None) -> np.ndarray:
    """-log(F(t)) / N along the trajectory."""
    fidelity = traj.observables.get("fidelity")
    if fidelity is None or ref is not None:
        fidelity, _ = fidelity_series(traj, ref)
    series = -np.log(np.maximum(fidelity, 1e-300)) / traj.n_sites
    traj.observables["fidelity_density"] = series
    return series


def entropy_series(traj: Trajectory, cut: Optional[int] = None, cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    """Half-chain (or ``cut``) von Neumann entropy at every sample."""
    cut = traj.n_sites // 2 if cut is None else cut
    series = np.array([entanglement_entropy(s, cut, d=traj.d, cap=cap) for s in traj.states])
    traj.observables["entropy"] = series
    return series


# string order

STRING_PHASE = np.diag([-1.0, 1.0, -1.0]).astype(complex)


def aklt_string_operator(i: int, j: int) -> OperatorString:
    """S^z_i prod_{i<k<j} exp(i pi S^z_k) S^z_j."""
    if j <= i:
        raise ShapeError(f"string order needs i < j, got i={i}, j={j}")
    factors = (S_Z,) + (STRING_PHASE,) * (j - i - 1) + (S_Z,)
    return OperatorString(i, factors, 1.0, label=f"Oz[{i},{j}]")


def _dense_string_expectation(psi: np.ndarray, term: OperatorString, n_sites: int) -> float:
    tensor = psi.reshape((term.d,) * n_sites)
    value = np.vdot(psi, apply_string(term, tensor, n_sites).ravel()) / np.vdot(psi, psi)
    return float(value.real)


def string_order(
    state: State,
    kind: str,
    i: int,
    j: int,
    n_sites: Optional[int] = None,
    cap: int = DEFAULT_DENSE_CAP,
) -> float:
    """<O^z_AKLT(i, j)> or <prod_{m=i..j} K^y_m> on a dense vector or an MPS."""
    if j <= i or i < 0:
        raise ShapeError(f"string order needs 0 <= i < j, got i={i}, j={j}")
    if kind == "Oz_AKLT":
        if isinstance(state, MpsState) and state.boundary == "thermodynamic":
            ops = {i: S_Z, j: S_Z}
            ops.update({k: STRING_PHASE for k in range(i + 1, j)})
            return float(local_expectation(state, ops).real)
        psi = as_dense(state, cap)
        n = n_sites or (state.n_sites if isinstance(state, MpsState) else int(round(math.log(psi.size, 3))))
        if j >= n:
            raise ShapeError(f"site {j} outside a chain of {n} sites")
        return _dense_string_expectation(psi, aklt_string_operator(i, j), n)
    if kind == "Oy_cluster":
        psi = as_dense(state, cap)
        n = n_sites or (state.n_sites if isinstance(state, MpsState) else int(round(math.log2(psi.size))))
        if i < 1 or j > n - 2:
            raise ShapeError(f"cluster string needs 1 <= i < j <= N-2, got i={i}, j={j}, N={n}")
        return _dense_string_expectation(psi, cluster_string_operator(i, j, n), n)
    raise ParameterError(f"unknown string order {kind!r}; use Oz_AKLT or Oy_cluster")


def string_order_limit(
    mps: MpsState,
    start: int = 0,
    max_separation: int = 256,
    tol: float = STRING_ORDER_TOL,
) -> Tuple[float, int]:
    """Long-distance O^z on a uniform MPS: grow the separation until it stops changing."""
    if mps.boundary != "thermodynamic":
        raise ParameterError("the separation limit is taken on a uniform (thermodynamic) MPS")
    previous = string_order(mps, "Oz_AKLT", start, start + 1)
    for separation in range(2, max_separation + 1):
        current = string_order(mps, "Oz_AKLT", start, start + separation)
        if abs(current - previous) < tol:
            return current, separation
        previous = current
    logger.warning(f"String order not converged to {tol:.0e} within separation {max_separation}")
    return previous, max_separation


def string_order_scan(z_grid: Sequence[float], t: float = 0.0, start: int = 0) -> List[Tuple[float, float, int]]:
    """(z, O^z, separation used) for the uniform AKLT orbit state at each z."""
    out = []
    for z in z_grid:
        mps = analytic_orbit("aklt", {"z": float(z)}, t, boundary="thermodynamic")
        value, separation = string_order_limit(mps, start)
        logger.debug(f"O^z(z={z}) = {value:.12f} at separation {separation}")
        out.append((float(z), value, separation))
    return out


def orbit_overlap_series(traj: Trajectory, orbit: Callable[[float], State], cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    """|<orbit(t)|psi(t)>|^2 at every sample."""
    values = []
    for k, t in enumerate(traj.times):
        ref = as_dense(orbit(float(t)), cap)
        psi = traj.dense(k, cap)
        values.append(abs(np.vdot(ref, psi)) ** 2 / (np.vdot(ref, ref).real * np.vdot(psi, psi).real))
    series = np.asarray(values)
    traj.observables["orbit_overlap"] = series
    return series
