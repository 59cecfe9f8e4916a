"""One-site TDVP on open-chain MPS.

Each step evaluates the Hamiltonian at the step midpoint, writes it as an
MPO and runs a left-to-right then right-to-left projector-splitting sweep
of half a step each. The bond dimension never grows.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np
import scipy.linalg

from .dynamics import DEFAULT_DT, Trajectory, time_grid
from .errors import CapacityError, ConvergenceError, NumericalError, ParameterError, ShapeError
from .mps import MpsState, absorb_boundary, norm
from .operators import Hamiltonian

logger = logging.getLogger(__name__)

DENSE_HEFF_DIM = 128
KRYLOV_DIM = 40
KRYLOV_TOL = 1e-12
TDVP_NORM_TOL = 1e-6


# MPO


def build_mpo(h: Hamiltonian, t: float = 0.0) -> List[np.ndarray]:
    """Site tensors W[n] of shape (D_left, D_right, d, d) for H(t).

    Channel 0 is "nothing placed yet", the last channel "string finished";
    every string crossing a bond gets its own channel on that bond.
    """
    if h.boundary != "open":
        raise ParameterError("the MPO is built for open chains")
    n, d = h.n_sites, h.d
    active = [(term, h.coefficient(term, t)) for term in h.terms]
    active = [(term, c) for term, c in active if c != 0]

    channels: List[int] = [0] * max(n - 1, 0)
    assignments = []
    for term, coefficient in active:
        if term.support_start + term.length > n:
            raise ShapeError(f"string {term.label!r} wraps around an open chain")
        crossed = []
        for bond in range(term.support_start, term.support_start + term.length - 1):
            channels[bond] += 1
            crossed.append(channels[bond])
        assignments.append((term, coefficient, crossed))

    dims = [2] + [c + 2 for c in channels] + [2]
    identity = np.eye(d, dtype=complex)
    mpo = []
    for site in range(n):
        w = np.zeros((dims[site], dims[site + 1], d, d), dtype=complex)
        w[0, 0] = identity
        w[-1, -1] = identity
        mpo.append(w)

    for term, coefficient, crossed in assignments:
        s = term.support_start
        if term.length == 1:
            mpo[s][0, -1] += coefficient * term.factors[0]
            continue
        mpo[s][0, crossed[0]] += coefficient * term.factors[0]
        for k in range(1, term.length - 1):
            mpo[s + k][crossed[k - 1], crossed[k]] += term.factors[k]
        mpo[s + term.length - 1][crossed[-1], -1] += term.factors[-1]
    return mpo


def mpo_to_dense(mpo: Sequence[np.ndarray]) -> np.ndarray:
    """Full matrix of an MPO (small chains only)."""
    acc = mpo[0][0:1]
    for w in mpo[1:]:
        acc = np.einsum("abij,bckl->acikjl", acc, w)
        a, c, i, k, j, l = acc.shape
        acc = acc.reshape(a, c, i * k, j * l)
    return acc[0, -1]


# Krylov exponential


def krylov_expm(matvec, v: np.ndarray, tau: float, m_max: int = KRYLOV_DIM, tol: float = KRYLOV_TOL) -> np.ndarray:
    """exp(-i tau H) v for Hermitian H given as a matvec (Lanczos, full reorthogonalization)."""
    beta0 = float(np.linalg.norm(v))
    if beta0 == 0.0:
        return np.zeros_like(v)
    m_max = min(m_max, v.size)
    basis = [v / beta0]
    alphas: List[float] = []
    betas: List[float] = []
    coefficients = np.ones(1, dtype=complex)
    for j in range(m_max):
        w = matvec(basis[j])
        alpha = float(np.vdot(basis[j], w).real)
        w = w - alpha * basis[j]
        if j > 0:
            w = w - betas[-1] * basis[j - 1]
        stacked = np.array(basis)
        w = w - stacked.T @ (stacked.conj() @ w)
        beta = float(np.linalg.norm(w))
        alphas.append(alpha)
        evals, evecs = scipy.linalg.eigh_tridiagonal(np.array(alphas), np.array(betas))
        coefficients = evecs @ (np.exp(-1j * tau * evals) * evecs[0, :])
        if beta < 1e-14 or abs(coefficients[-1]) * beta < tol:
            break
        if j == m_max - 1:
            raise ConvergenceError(f"Lanczos exponential did not converge in {m_max} vectors", abs(coefficients[-1]) * beta)
        betas.append(beta)
        basis.append(w / beta)
    return beta0 * (np.array(basis[: len(alphas)]).T @ coefficients)


def _evolve(matvec, dim: int, v: np.ndarray, tau: float, dense_builder=None) -> np.ndarray:
    if dim <= DENSE_HEFF_DIM and dense_builder is not None:
        matrix = dense_builder()
        return scipy.linalg.expm(-1j * tau * matrix) @ v
    return krylov_expm(matvec, v, tau)


# environments


def _left_update(env: np.ndarray, a: np.ndarray, w: np.ndarray) -> np.ndarray:
    return np.einsum("xwy,xsb,wvst,ytc->bvc", env, a.conj(), w, a, optimize=True)


def _right_update(env: np.ndarray, a: np.ndarray, w: np.ndarray) -> np.ndarray:
    return np.einsum("bvc,xsb,wvst,ytc->xwy", env, a.conj(), w, a, optimize=True)


def _site_step(left: np.ndarray, w: np.ndarray, right: np.ndarray, a: np.ndarray, tau: float) -> np.ndarray:
    shape = a.shape

    def matvec(x: np.ndarray) -> np.ndarray:
        x = x.reshape(shape)
        return np.einsum("xwy,wvst,bvc,ytc->xsb", left, w, right, x, optimize=True).ravel()

    def dense() -> np.ndarray:
        return np.einsum("xwy,wvst,bvc->xsbytc", left, w, right, optimize=True).reshape(a.size, a.size)

    return _evolve(matvec, a.size, a.ravel(), tau, dense).reshape(shape)


def _bond_step(left: np.ndarray, right: np.ndarray, c: np.ndarray, tau: float) -> np.ndarray:
    shape = c.shape

    def matvec(x: np.ndarray) -> np.ndarray:
        x = x.reshape(shape)
        return np.einsum("xwy,bwc,yc->xb", left, right, x, optimize=True).ravel()

    def dense() -> np.ndarray:
        return np.einsum("xwy,bwc->xbyc", left, right, optimize=True).reshape(c.size, c.size)

    return _evolve(matvec, c.size, c.ravel(), tau, dense).reshape(shape)


# state preparation


def _target_dims(n: int, d: int, chi_max: int) -> List[int]:
    return [1] + [min(chi_max, d**b, d ** (n - b)) for b in range(1, n)] + [1]


def _pad(tensors: List[np.ndarray], dims: List[int]) -> List[np.ndarray]:
    out = []
    for k, a in enumerate(tensors):
        left, d, right = a.shape
        padded = np.zeros((max(left, dims[k]), d, max(right, dims[k + 1])), dtype=complex)
        padded[:left, :, :right] = a
        out.append(padded)
    return out


def _right_canonical(tensors: List[np.ndarray]) -> List[np.ndarray]:
    """Right-orthonormal sites 1..N-1, the norm left on site 0; bond dims kept."""
    tensors = list(tensors)
    for k in range(len(tensors) - 1, 0, -1):
        left, d, right = tensors[k].shape
        q, r = np.linalg.qr(tensors[k].reshape(left, d * right).T)
        tensors[k] = q.T.reshape(left, d, right)
        tensors[k - 1] = np.einsum("asb,bc->asc", tensors[k - 1], r.T)
    return tensors


def prepare_tdvp_state(mps0: MpsState, chi_max: int) -> List[np.ndarray]:
    if mps0.boundary != "open":
        raise ParameterError("TDVP runs on open-chain MPS")
    if mps0.max_chi > chi_max:
        raise CapacityError(
            "TDVP bond dimension", mps0.max_chi, chi_max, hint="one-site TDVP never grows chi; raise chi_max"
        )
    tensors = list(absorb_boundary(mps0).tensors)
    n, d = len(tensors), mps0.d
    for b in range(1, n):
        chi = tensors[b].shape[0]
        if chi > min(d**b, d ** (n - b)):
            raise ShapeError(f"bond {b} has chi={chi}, more than the Schmidt rank bound {min(d**b, d ** (n - b))}")
    dims = _target_dims(n, d, chi_max)
    return _right_canonical(_pad(tensors, dims))


# integrator


class _Sweeper:
    """Holds environments for one step at fixed MPO."""

    def __init__(self, tensors: List[np.ndarray], mpo: List[np.ndarray]):
        self.tensors = tensors
        self.mpo = mpo
        n = len(tensors)
        self.left: List[Optional[np.ndarray]] = [None] * n
        self.right: List[Optional[np.ndarray]] = [None] * n
        self.left[0] = self._edge(mpo[0].shape[0], start=True)
        self.right[n - 1] = self._edge(mpo[-1].shape[1], start=False)
        for k in range(n - 1, 0, -1):
            self.right[k - 1] = _right_update(self.right[k], tensors[k], mpo[k])

    @staticmethod
    def _edge(dim: int, start: bool) -> np.ndarray:
        env = np.zeros((1, dim, 1), dtype=complex)
        env[0, 0 if start else dim - 1, 0] = 1.0
        return env

    def left_to_right(self, tau: float) -> None:
        n = len(self.tensors)
        for k in range(n):
            a = _site_step(self.left[k], self.mpo[k], self.right[k], self.tensors[k], tau)
            if k == n - 1:
                self.tensors[k] = a
                break
            left, d, right = a.shape
            q, r = np.linalg.qr(a.reshape(left * d, right))
            q = q.reshape(left, d, right)
            self.tensors[k] = q
            self.left[k + 1] = _left_update(self.left[k], q, self.mpo[k])
            c = _bond_step(self.left[k + 1], self.right[k], r, -tau)
            self.tensors[k + 1] = np.einsum("ab,bsc->asc", c, self.tensors[k + 1])

    def right_to_left(self, tau: float) -> None:
        n = len(self.tensors)
        for k in range(n - 1, -1, -1):
            a = _site_step(self.left[k], self.mpo[k], self.right[k], self.tensors[k], tau)
            if k == 0:
                self.tensors[k] = a
                break
            left, d, right = a.shape
            q, r = np.linalg.qr(a.reshape(left, d * right).T)
            b = q.T.reshape(left, d, right)
            self.tensors[k] = b
            self.right[k - 1] = _right_update(self.right[k], b, self.mpo[k])
            c = _bond_step(self.left[k], self.right[k - 1], r.T, -tau)
            self.tensors[k - 1] = np.einsum("asb,bc->asc", self.tensors[k - 1], c)


def tdvp_step(tensors: List[np.ndarray], mpo: List[np.ndarray], dt: float) -> List[np.ndarray]:
    """One symmetric step; ``tensors`` must be right-canonical with the centre on site 0."""
    sweeper = _Sweeper(list(tensors), mpo)
    sweeper.left_to_right(dt / 2)
    sweeper.right_to_left(dt / 2)
    return sweeper.tensors


def tdvp_evolve(
    h: Hamiltonian,
    mps0: MpsState,
    t_final: float,
    dt: float = DEFAULT_DT,
    chi_max: int = 64,
) -> Trajectory:
    """Fixed-chi one-site TDVP sampled every step."""
    if h.boundary != "open":
        raise ParameterError("TDVP is implemented for open chains")
    if mps0.n_sites != h.n_sites or mps0.d != h.d:
        raise ShapeError(
            f"MPS with {mps0.n_sites} sites of dimension {mps0.d} vs Hamiltonian with {h.n_sites} of {h.d}"
        )
    tensors = prepare_tdvp_state(mps0, chi_max)
    scale = float(np.linalg.norm(tensors[0]))
    if scale == 0.0:
        raise ParameterError("initial MPS is the zero state")
    tensors[0] = tensors[0] / scale

    times, step = time_grid(t_final, dt)
    states = [MpsState(tuple(tensors), boundary="open")]
    static_mpo = None if h.is_driven else build_mpo(h, 0.0)
    for k in range(len(times) - 1):
        mpo = static_mpo if static_mpo is not None else build_mpo(h, times[k] + step / 2)
        tensors = tdvp_step(tensors, mpo, step)
        states.append(MpsState(tuple(tensors), boundary="open"))
        logger.debug(f"TDVP step {k + 1}/{len(times) - 1} at t={times[k + 1]:.4f}")

    drift = max(abs(norm(s) - 1.0) for s in states)
    if drift > TDVP_NORM_TOL * max(1.0, t_final):
        raise NumericalError(f"TDVP lost normalization: max |norm - 1| = {drift:.3e}")
    logger.info(f"TDVP {h.model}: {len(times) - 1} steps of dt={step:.4g}, bond dims {[a.shape[2] for a in tensors[:-1]]}")
    return Trajectory(times, states, "tdvp", step, h.n_sites, h.d)
