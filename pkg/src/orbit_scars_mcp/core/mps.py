"""Matrix-product states, transfer matrices and boundary fixed points.

Tensors are indexed (left-bond, physical, right-bond). Transfer matrices
sandwich a single-site operator between a bra and a ket tensor:

    E(O)[(x, a), (y, b)] = sum_{s', s} O[s', s] conj(B[x, s', y]) A[a, s, b]

so the row index is (bra-left, ket-left) and the column index is
(bra-right, ket-right), row = x * chi_ket + a. Dense vectors list site 0 as the
most significant digit.
"""

import logging
from dataclasses import dataclass
from typing import Literal, Mapping, Optional, Union

import numpy as np
import scipy.linalg

from .errors import CapacityError, ConvergenceError, ParameterError, ShapeError

logger = logging.getLogger(__name__)

Boundary = Literal["open", "periodic", "thermodynamic"]

DEFAULT_DENSE_CAP = 2**24
CANONICAL_TOL = 1e-12
SVD_CUTOFF = 1e-14
DEGENERACY_GAP = 1e-8
FIXED_POINT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class MpsState:
    """Finite (open or periodic) or uniform matrix-product state.

    For ``boundary="thermodynamic"`` the tensors form the unit cell of a
    translation-invariant chain and ``n_sites`` is the cell length.
    """

    tensors: tuple
    boundary: Boundary = "open"
    boundary_vectors: Optional[tuple] = None
    left_canonical: tuple = ()

    def __post_init__(self):
        if len(self.tensors) == 0:
            raise ShapeError("an MPS needs at least one tensor")
        tensors = tuple(np.asarray(a, dtype=complex) for a in self.tensors)
        for n, a in enumerate(tensors):
            if a.ndim != 3:
                raise ShapeError(f"tensor {n} has rank {a.ndim}, expected (left, physical, right)")
        d = tensors[0].shape[1]
        for n, a in enumerate(tensors):
            if a.shape[1] != d:
                raise ShapeError(f"tensor {n} has physical dimension {a.shape[1]}, site 0 has {d}")
        for n in range(len(tensors) - 1):
            if tensors[n].shape[2] != tensors[n + 1].shape[0]:
                raise ShapeError(
                    f"bond {n}: right dimension {tensors[n].shape[2]} of site {n} "
                    f"!= left dimension {tensors[n + 1].shape[0]} of site {n + 1}"
                )
        if self.boundary in ("periodic", "thermodynamic") and tensors[-1].shape[2] != tensors[0].shape[0]:
            raise ShapeError(
                f"wrap-around bond: right dimension {tensors[-1].shape[2]} of the last site "
                f"!= left dimension {tensors[0].shape[0]} of site 0"
            )
        object.__setattr__(self, "tensors", tensors)

        if self.boundary_vectors is not None:
            if self.boundary != "open":
                raise ParameterError("boundary vectors only apply to open chains")
            v_l, v_r = (np.asarray(v, dtype=complex).ravel() for v in self.boundary_vectors)
            if v_l.shape[0] != tensors[0].shape[0] or v_r.shape[0] != tensors[-1].shape[2]:
                raise ShapeError(
                    f"boundary vectors of length ({v_l.shape[0]}, {v_r.shape[0]}) do not match "
                    f"end bonds ({tensors[0].shape[0]}, {tensors[-1].shape[2]})"
                )
            object.__setattr__(self, "boundary_vectors", (v_l, v_r))
        elif self.boundary == "open" and (tensors[0].shape[0] != 1 or tensors[-1].shape[2] != 1):
            raise ShapeError("an open chain with end bonds larger than 1 needs boundary vectors")

        for n in self.left_canonical:
            if not is_left_canonical(tensors[n]):
                raise ParameterError(f"site {n} is flagged left-canonical but is not")

    @property
    def n_sites(self) -> int:
        return len(self.tensors)

    @property
    def d(self) -> int:
        return int(self.tensors[0].shape[1])

    @property
    def chi(self) -> tuple:
        """Bond dimensions, left of site 0 through right of the last site."""
        return tuple(int(a.shape[0]) for a in self.tensors) + (int(self.tensors[-1].shape[2]),)

    @property
    def max_chi(self) -> int:
        return max(self.chi)

    def scaled(self, factor: complex) -> "MpsState":
        tensors = list(self.tensors)
        tensors[0] = tensors[0] * factor
        return MpsState(tuple(tensors), self.boundary, self.boundary_vectors)


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    matrix: np.ndarray
    operator_label: str = "identity"

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix(self.matrix @ other.matrix, f"{self.operator_label}*{other.operator_label}")


@dataclass(frozen=True, eq=False)
class BoundaryPair:
    """Dominant left/right eigenvectors of the identity transfer matrix.

    ``left`` is scaled so that its chi x chi reshape has trace chi, and
    ``right`` so that ``left @ right == 1``.
    """

    left: np.ndarray
    right: np.ndarray
    dominant_eigenvalue: complex
    degenerate: bool


StateLike = Union[MpsState, np.ndarray]


def is_left_canonical(tensor: np.ndarray, tol: float = CANONICAL_TOL) -> bool:
    a = np.asarray(tensor)
    gram = np.einsum("asb,asc->bc", a.conj(), a)
    return bool(np.allclose(gram, np.eye(a.shape[2]), atol=tol, rtol=0.0))


def transfer_matrix(
    bra_tensor: np.ndarray,
    op: Optional[np.ndarray],
    ket_tensor: np.ndarray,
    label: Optional[str] = None,
) -> TransferMatrix:
    """Sandwich ``op`` between a bra and a ket tensor; ``op=None`` means identity."""
    bra = np.asarray(bra_tensor, dtype=complex)
    ket = np.asarray(ket_tensor, dtype=complex)
    if bra.ndim != 3 or ket.ndim != 3:
        raise ShapeError(f"transfer matrix needs rank-3 tensors, got ranks {bra.ndim} and {ket.ndim}")
    d = ket.shape[1]
    if op is None:
        op = np.eye(d)
        label = label or "identity"
    op = np.asarray(op, dtype=complex)
    if bra.shape[1] != d or op.shape != (d, d):
        raise ShapeError(
            f"physical dimensions disagree: bra index {bra.shape[1]}, ket index {d}, operator {op.shape}"
        )
    matrix = np.einsum("ts,xty,asb->xayb", op, bra.conj(), ket)
    matrix = matrix.reshape(bra.shape[0] * ket.shape[0], bra.shape[2] * ket.shape[2])
    return TransferMatrix(matrix=matrix, operator_label=label or "custom")


def cell_transfer_matrix(mps: MpsState, ops: Optional[Mapping[int, np.ndarray]] = None) -> np.ndarray:
    """Product of the per-site transfer matrices over all tensors of ``mps``."""
    ops = ops or {}
    result = None
    for n, a in enumerate(mps.tensors):
        e = transfer_matrix(a, ops.get(n), a).matrix
        result = e if result is None else result @ e
    return result


def boundary_fixed_points(mps: MpsState) -> BoundaryPair:
    if mps.boundary != "thermodynamic":
        raise ParameterError("boundary fixed points need a uniform (thermodynamic) MPS")
    e0 = cell_transfer_matrix(mps)
    chi = mps.tensors[0].shape[0]
    try:
        eigvals, vl, vr = scipy.linalg.eig(e0, left=True, right=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceError(f"eigensolver failed on the {e0.shape[0]}x{e0.shape[0]} transfer matrix", float("nan")) from exc

    order = np.argsort(-np.abs(eigvals), kind="stable")
    lam = complex(eigvals[order[0]])
    degenerate = bool(
        len(eigvals) > 1 and abs(lam) - abs(eigvals[order[1]]) < DEGENERACY_GAP * abs(lam)
    )
    left = vl[:, order[0]].conj()
    right = vr[:, order[0]]

    trace = np.trace(left.reshape(chi, chi))
    if abs(trace) > 1e-14:
        left = left * (chi / trace)
    else:
        left = left / left[np.argmax(np.abs(left))]
    norm = left @ right
    if abs(norm) < 1e-14:
        if not degenerate:
            raise ConvergenceError("dominant left and right eigenvectors are orthogonal", abs(norm))
        logger.warning("Degenerate transfer matrix: fixed points left unnormalized")
    else:
        right = right / norm

    residual = max(
        np.linalg.norm(left @ e0 - lam * left) / np.linalg.norm(left),
        np.linalg.norm(e0 @ right - lam * right) / np.linalg.norm(right),
    )
    if residual > FIXED_POINT_TOL * max(1.0, abs(lam)):
        raise ConvergenceError("dominant eigenvectors of the transfer matrix did not converge", residual)
    return BoundaryPair(left=left, right=right, dominant_eigenvalue=lam, degenerate=degenerate)


def uniform_left_canonical(mps: MpsState) -> MpsState:
    """Gauge a one-site uniform MPS into left-canonical form with eigenvalue 1."""
    if mps.boundary != "thermodynamic" or mps.n_sites != 1:
        raise ParameterError("uniform canonicalization expects a one-site thermodynamic unit cell")
    pair = boundary_fixed_points(mps)
    chi = mps.tensors[0].shape[0]
    gram = pair.left.reshape(chi, chi)
    gram = 0.5 * (gram + gram.conj().T)
    w, u = np.linalg.eigh(gram)
    if np.min(w) <= 1e-14 * np.max(w):
        raise ParameterError("left fixed point is not positive definite; the MPS is not injective")
    x = np.sqrt(w)[:, None] * u.conj().T
    x_inv = u * (1.0 / np.sqrt(w))[None, :]
    a = np.einsum("xa,asb,by->xsy", x, mps.tensors[0], x_inv) / np.sqrt(pair.dominant_eigenvalue)
    return MpsState((a,), boundary="thermodynamic", left_canonical=(0,))


def edge_vectors(mps: MpsState) -> tuple:
    if mps.boundary_vectors is not None:
        return mps.boundary_vectors
    return np.ones(1, dtype=complex), np.ones(1, dtype=complex)


def absorb_boundary(mps: MpsState) -> MpsState:
    """Fold open-chain boundary vectors into the end tensors (end bonds become 1)."""
    if mps.boundary != "open" or mps.boundary_vectors is None:
        return mps
    v_l, v_r = mps.boundary_vectors
    tensors = list(mps.tensors)
    tensors[0] = np.einsum("a,asb->sb", v_l, tensors[0])[None, :, :]
    tensors[-1] = np.einsum("asb,b->as", tensors[-1], v_r)[:, :, None]
    return MpsState(tuple(tensors), boundary="open")


def _require_finite(mps: MpsState, what: str) -> None:
    if mps.boundary == "thermodynamic":
        raise ParameterError(f"{what} needs a finite chain, got a thermodynamic MPS")


def _mps_overlap(a: MpsState, b: MpsState) -> complex:
    if a.boundary == "open":
        v_la, v_ra = edge_vectors(a)
        v_lb, v_rb = edge_vectors(b)
        env = np.outer(v_la.conj(), v_lb)
        for ta, tb in zip(a.tensors, b.tensors):
            env = np.einsum("xa,xsy,asb->yb", env, ta.conj(), tb)
        return complex(v_ra.conj() @ env @ v_rb)
    env = np.einsum(
        "xy,ab->xayb",
        np.eye(a.tensors[0].shape[0]),
        np.eye(b.tensors[0].shape[0]),
    ).astype(complex)
    for ta, tb in zip(a.tensors, b.tensors):
        env = np.einsum("pqxa,xsy,asb->pqyb", env, ta.conj(), tb)
    return complex(np.einsum("pqpq->", env))


def norm(mps: MpsState) -> float:
    _require_finite(mps, "norm")
    return float(np.sqrt(max(_mps_overlap(mps, mps).real, 0.0)))


def normalize(mps: MpsState) -> MpsState:
    if mps.boundary == "thermodynamic":
        lam = boundary_fixed_points(mps).dominant_eigenvalue
        scale = abs(lam) ** (-0.5 / mps.n_sites)
        return MpsState(tuple(a * scale for a in mps.tensors), boundary="thermodynamic")
    value = norm(mps)
    if value == 0.0:
        raise ParameterError("cannot normalize the zero state")
    return mps.scaled(1.0 / value)


def to_dense(mps: MpsState, cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    _require_finite(mps, "to_dense")
    size = mps.d**mps.n_sites
    if size > cap:
        raise CapacityError(
            "dense state", size, cap, hint="raise ORBIT_SCARS_DENSE_CAP or reduce the number of sites"
        )
    if mps.boundary == "open":
        v_l, v_r = edge_vectors(mps)
        psi = v_l.reshape(1, -1)
        for a in mps.tensors:
            psi = np.einsum("ca,asb->csb", psi, a).reshape(-1, a.shape[2])
        return psi @ v_r
    chi0 = mps.tensors[0].shape[0]
    psi = np.eye(chi0, dtype=complex).reshape(chi0, 1, chi0)
    for a in mps.tensors:
        psi = np.einsum("lca,asb->lcsb", psi, a).reshape(chi0, -1, a.shape[2])
    return np.einsum("lcl->c", psi)


def infer_sites(size: int, d: int) -> int:
    n = int(round(np.log(size) / np.log(d))) if size > 1 else 0
    if n < 1 or d**n != size:
        raise ShapeError(f"vector length {size} is not a power of the local dimension {d}")
    return n


def from_dense(vector: np.ndarray, d: int, cutoff: float = SVD_CUTOFF) -> MpsState:
    """Exact-rank open MPS of a dense vector by successive SVDs."""
    psi = np.asarray(vector, dtype=complex).ravel()
    n = infer_sites(psi.size, d)
    tensors = []
    rest = psi.reshape(1, -1)
    chi = 1
    for _ in range(n - 1):
        u, s, vh = np.linalg.svd(rest.reshape(chi * d, -1), full_matrices=False)
        keep = max(1, int(np.sum(s > cutoff * s[0]))) if s[0] > 0 else 1
        tensors.append(u[:, :keep].reshape(chi, d, keep))
        rest = s[:keep, None] * vh[:keep]
        chi = keep
    tensors.append(rest.reshape(chi, d, 1))
    return MpsState(tuple(tensors), boundary="open", left_canonical=tuple(range(n - 1)))


def left_canonicalize(mps: MpsState) -> MpsState:
    if mps.boundary != "open":
        raise ParameterError("left canonicalization is implemented for open chains")
    tensors = list(absorb_boundary(mps).tensors)
    for n in range(len(tensors) - 1):
        left, d, right = tensors[n].shape
        q, r = np.linalg.qr(tensors[n].reshape(left * d, right))
        tensors[n] = q.reshape(left, d, q.shape[1])
        tensors[n + 1] = np.einsum("ab,bsc->asc", r, tensors[n + 1])
    return MpsState(tuple(tensors), boundary="open", left_canonical=tuple(range(len(tensors) - 1)))


def unblock(mps: MpsState, local_dim: int) -> MpsState:
    """Split every site of dimension ``local_dim**k`` into ``k`` sites by SVD."""
    if mps.boundary != "open":
        raise ParameterError("unblocking is implemented for open chains")
    k = infer_sites(mps.d, local_dim)
    tensors = []
    for a in absorb_boundary(mps).tensors:
        left, _, right = a.shape
        rest = a.reshape(left, -1)
        chi = left
        for _ in range(k - 1):
            mat = rest.reshape(chi * local_dim, -1)
            u, s, vh = np.linalg.svd(mat, full_matrices=False)
            keep = max(1, int(np.sum(s > SVD_CUTOFF * s[0]))) if s[0] > 0 else 1
            tensors.append(u[:, :keep].reshape(chi, local_dim, keep))
            rest = s[:keep, None] * vh[:keep]
            chi = keep
        tensors.append(rest.reshape(chi, local_dim, right))
    return MpsState(tuple(tensors), boundary="open")


def as_dense(state: StateLike, cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    if isinstance(state, MpsState):
        return to_dense(state, cap)
    return np.asarray(state, dtype=complex).ravel()


def overlap(a: StateLike, b: StateLike, cap: int = DEFAULT_DENSE_CAP) -> complex:
    """<a|b> for any mix of MPS and dense vectors."""
    if isinstance(a, MpsState) and isinstance(b, MpsState):
        _require_finite(a, "overlap")
        _require_finite(b, "overlap")
        same_layout = (
            a.n_sites == b.n_sites and a.d == b.d and a.boundary == b.boundary
        )
        if same_layout:
            return _mps_overlap(a, b)
    va, vb = as_dense(a, cap), as_dense(b, cap)
    if va.shape != vb.shape:
        raise ShapeError(f"overlap of states with {va.size} and {vb.size} amplitudes")
    return complex(np.vdot(va, vb))


def _entropy(probabilities: np.ndarray) -> float:
    p = np.asarray(probabilities, dtype=float)
    p = p[p > 1e-300]
    return float(max(0.0, -np.sum(p * np.log(p))))


def _open_schmidt_values(mps: MpsState, cut: int) -> np.ndarray:
    tensors = list(absorb_boundary(mps).tensors)
    r = np.ones((1, 1), dtype=complex)
    for k in range(cut):
        a = np.einsum("ab,bsc->asc", r, tensors[k])
        left, d, right = a.shape
        _, r = np.linalg.qr(a.reshape(left * d, right))
    lmat = np.ones((1, 1), dtype=complex)
    for k in range(len(tensors) - 1, cut - 1, -1):
        a = np.einsum("asb,bc->asc", tensors[k], lmat)
        left, d, right = a.shape
        _, rt = np.linalg.qr(a.reshape(left, d * right).T)
        lmat = rt.T
    return np.linalg.svd(r @ lmat, compute_uv=False)


def _uniform_schmidt_probabilities(mps: MpsState, cut: int) -> np.ndarray:
    shift = cut % mps.n_sites
    rotated = MpsState(mps.tensors[shift:] + mps.tensors[:shift], boundary="thermodynamic")
    pair = boundary_fixed_points(rotated)
    chi = rotated.tensors[0].shape[0]
    gram_l = pair.left.reshape(chi, chi)
    gram_r = pair.right.reshape(chi, chi)
    p = np.linalg.eigvals(gram_r.T @ gram_l).real
    p = np.clip(p, 0.0, None)
    return p / np.sum(p)


def schmidt_probabilities(state: StateLike, cut: int, d: int = 2, cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    if isinstance(state, MpsState):
        if state.boundary == "thermodynamic":
            return _uniform_schmidt_probabilities(state, cut)
        if not 1 <= cut < state.n_sites:
            raise ShapeError(f"cut {cut} outside 1..{state.n_sites - 1}")
        if state.boundary == "open":
            s = _open_schmidt_values(state, cut)
            return s**2 / np.sum(s**2)
        d = state.d
    psi = as_dense(state, cap)
    n = infer_sites(psi.size, d)
    if not 1 <= cut < n:
        raise ShapeError(f"cut {cut} outside 1..{n - 1}")
    s = np.linalg.svd(psi.reshape(d**cut, -1), compute_uv=False)
    return s**2 / np.sum(s**2)


def entanglement_entropy(state: StateLike, cut: int, d: int = 2, cap: int = DEFAULT_DENSE_CAP) -> float:
    """Von Neumann entropy (nats) across the bond left of site ``cut``."""
    return _entropy(schmidt_probabilities(state, cut, d=d, cap=cap))


def local_expectation(mps: MpsState, ops: Mapping[int, np.ndarray]) -> complex:
    """<prod_k O_k> for single-site factors placed at the given sites."""
    if not ops:
        return 1.0 + 0.0j
    sites = sorted(ops)
    if mps.boundary == "thermodynamic":
        cell = mps.n_sites
        first = (sites[0] // cell) * cell
        last = (sites[-1] // cell + 1) * cell
        pair = boundary_fixed_points(mps)
        vec = pair.left
        for s in range(first, last):
            a = mps.tensors[s % cell]
            vec = vec @ transfer_matrix(a, ops.get(s), a).matrix
        n_cells = (last - first) // cell
        return complex(vec @ pair.right / pair.dominant_eigenvalue**n_cells)
    if sites[0] < 0 or sites[-1] >= mps.n_sites:
        raise ShapeError(f"operator sites {sites[0]}..{sites[-1]} outside 0..{mps.n_sites - 1}")
    if mps.boundary == "periodic":
        psi = to_dense(mps)
        out = psi.reshape([mps.d] * mps.n_sites)
        for s, op in ops.items():
            out = np.moveaxis(np.tensordot(op, out, axes=([1], [s])), 0, s)
        return complex(np.vdot(psi, out.ravel()) / np.vdot(psi, psi))
    v_l, v_r = edge_vectors(mps)
    env = np.outer(v_l.conj(), v_l)
    env_norm = env.copy()
    for n, a in enumerate(mps.tensors):
        op = ops.get(n)
        if op is None:
            env = np.einsum("xa,xsy,asb->yb", env, a.conj(), a)
        else:
            env = np.einsum("xa,xty,ts,asb->yb", env, a.conj(), op, a)
        env_norm = np.einsum("xa,xsy,asb->yb", env_norm, a.conj(), a)
    return complex((v_r.conj() @ env @ v_r) / (v_r.conj() @ env_norm @ v_r))
