"""Closed-form periodic orbits as matrix-product states."""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Literal, Mapping

import numpy as np

from .errors import ParameterError
from .lattice_models import AKLT_EPSILON, is_epsilon
from .mps import DEFAULT_DENSE_CAP, MpsState, normalize, to_dense

logger = logging.getLogger(__name__)

OrbitModel = Literal["ssh", "aklt", "xy", "iadecola_schecter", "cluster"]
OrbitBoundary = Literal["open", "periodic", "thermodynamic"]

SQRT_2_3 = math.sqrt(2.0 / 3.0)
SQRT_1_3 = math.sqrt(1.0 / 3.0)


def aklt_site_tensor(c: complex) -> np.ndarray:
    """AKLT tensor with the (S+)^2 admixture ``c`` on the m=+1 component."""
    a = np.zeros((2, 3, 2), dtype=complex)
    a[:, 0, :] = SQRT_2_3 * np.array([[0, 1], [-2 * c, 0]])
    a[:, 1, :] = SQRT_1_3 * np.array([[-1, 0], [0, 1]])
    a[:, 2, :] = -SQRT_2_3 * np.array([[0, 0], [1, 0]])
    return a


def aklt_open_mps(n_sites: int, w: complex) -> MpsState:
    """Unnormalized exp(w Q+) applied to the open-chain AKLT state with up-up edges."""
    tensors = tuple(aklt_site_tensor((-1) ** j * w) for j in range(n_sites))
    return MpsState(
        tensors,
        boundary="open",
        boundary_vectors=(np.array([1.0, 0.0]), np.array([0.0, 1.0])),
    )


def aklt_norm_factor(z: complex) -> float:
    """Per-site normalization n_z = (2 sqrt(4|z|^2 + 1) + 1) / 3 of the uniform orbit state."""
    return (2.0 * math.sqrt(4.0 * abs(z) ** 2 + 1.0) + 1.0) / 3.0


def ssh_dimer(k: int, t: float, j_o: float) -> np.ndarray:
    """Blocked d=4 amplitudes of dimer ``k``, block index 2a+b."""
    c, s = math.cos(j_o * t), math.sin(j_o * t)
    vec = np.zeros(4, dtype=complex)
    if k % 2 == 0:
        vec[2], vec[1] = c, -1j * s
    else:
        vec[1], vec[2] = c, -1j * s
    return vec


def xy_site(n: int, t: float, h: float, nematic: bool = False) -> np.ndarray:
    vec = np.zeros(3, dtype=complex)
    vec[2] = 1.0 / math.sqrt(2.0)
    vec[0] = (1.0 if nematic else (-1) ** n * cmath.exp(-2j * h * t)) / math.sqrt(2.0)
    return vec


def _product_mps(vectors, boundary: OrbitBoundary) -> MpsState:
    tensors = tuple(np.asarray(v, dtype=complex).reshape(1, -1, 1) for v in vectors)
    return MpsState(tensors, boundary=boundary)


def _is_tensor(n: int, eta_t: complex, edge: bool) -> np.ndarray:
    """Constrained tensor: bond carries the previous occupation, no two adjacent 1s."""
    a = np.zeros((2, 2, 2), dtype=complex)
    a[0, 0, 0] = a[1, 0, 0] = 1.0
    if not edge:
        a[0, 1, 1] = eta_t * (-1) ** n
    return a


def _cluster_tensor(amp_one: complex, amp_zero: complex) -> np.ndarray:
    """Bond carries the previous bit; controlled-Z sign (-1)^(a x)."""
    a = np.zeros((2, 2, 2), dtype=complex)
    a[0, 0, 0] = a[1, 0, 0] = amp_zero
    a[0, 1, 1] = amp_one
    a[1, 1, 1] = -amp_one
    return a


def _param(params: Mapping[str, Any], key: str, default: float) -> float:
    value = params.get(key, default)
    try:
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"orbit parameter {key!r} must be a number, got {value!r}") from exc


def analytic_orbit(
    model: str,
    params: Mapping[str, Any],
    t: float,
    n_sites: int = 0,
    boundary: OrbitBoundary = "open",
) -> MpsState:
    """Orbit state at time ``t``; ``n_sites`` is ignored for thermodynamic cells.

    The SSH orbit is blocked into d=4 dimers, so it has ``n_sites // 2`` tensors.
    """
    thermo = boundary == "thermodynamic"
    if not thermo and n_sites < 2:
        raise ParameterError(f"a finite orbit needs at least two sites, got {n_sites}")

    if model == "ssh":
        j_o = _param(params, "j_o", 1.0)
        if not thermo and n_sites % 2:
            raise ParameterError(f"SSH orbit needs an even number of sites, got {n_sites}")
        n_dimers = 2 if thermo else n_sites // 2
        return _product_mps([ssh_dimer(k, t, j_o) for k in range(n_dimers)], boundary)

    if model == "xy":
        h = _param(params, "h", 1.0)
        nematic = bool(params.get("nematic", False))
        count = 2 if thermo else n_sites
        return _product_mps([xy_site(n, t, h, nematic) for n in range(count)], boundary)

    if model == "aklt":
        z = complex(params.get("z", 0.5))
        w = z * cmath.exp(-1j * AKLT_EPSILON * t)
        if thermo:
            return MpsState(
                (aklt_site_tensor(w), aklt_site_tensor(-w)), boundary="thermodynamic"
            )
        if boundary == "periodic":
            if n_sites % 2:
                raise ParameterError("periodic AKLT orbit needs an even number of sites")
            tensors = tuple(aklt_site_tensor((-1) ** j * w) for j in range(n_sites))
            return normalize(MpsState(tensors, boundary="periodic"))
        return normalize(aklt_open_mps(n_sites, w))

    if model == "iadecola_schecter":
        eta = complex(params.get("eta", 1.0))
        eps = is_epsilon(_param(params, "delta", 1.0), _param(params, "j", 0.0))
        eta_t = eta * cmath.exp(-1j * eps * t)
        if thermo:
            return MpsState((_is_tensor(0, eta_t, False), _is_tensor(1, eta_t, False)), boundary="thermodynamic")
        if boundary == "periodic":
            raise ParameterError("the domain-wall orbit is defined on open chains")
        tensors = tuple(
            _is_tensor(n, eta_t, edge=n in (0, n_sites - 1)) for n in range(n_sites)
        )
        mps = MpsState(tensors, boundary="open", boundary_vectors=(np.array([1.0, 0.0]), np.array([1.0, 1.0])))
        return normalize(mps)

    if model == "cluster":
        c, s = math.cos(t), math.sin(t)
        bulk = _cluster_tensor(c, 1j * s)
        if thermo:
            return MpsState((bulk,), boundary="thermodynamic")
        if boundary == "periodic":
            return MpsState(tuple(bulk for _ in range(n_sites)), boundary="periodic")
        edge = _cluster_tensor(1.0, 0.0)
        tensors = (edge,) + tuple(bulk for _ in range(n_sites - 2)) + (edge,)
        return MpsState(tensors, boundary="open", boundary_vectors=(np.array([1.0, 0.0]), np.array([1.0, 1.0])))

    raise ParameterError(f"unknown orbit model {model!r}")


def orbit_period(model: str, params: Mapping[str, Any]) -> float:
    if model == "ssh":
        return math.pi / _param(params, "j_o", 1.0)
    if model == "xy":
        return math.pi / abs(_param(params, "h", 1.0))
    if model == "aklt":
        return 2 * math.pi / AKLT_EPSILON
    if model == "iadecola_schecter":
        eps = is_epsilon(_param(params, "delta", 1.0), _param(params, "j", 0.0))
        if eps == 0.0:
            raise ParameterError("domain-wall orbit has zero tower spacing (2*delta == 4*j)")
        return 2 * math.pi / abs(eps)
    if model == "cluster":
        return math.pi
    raise ParameterError(f"unknown orbit model {model!r}")


@dataclass(frozen=True)
class AnalyticOrbit:
    """Time-parametrized orbit; ``state(t)`` is the MPS, ``dense(t)`` its amplitudes."""

    model: str
    n_sites: int
    params: Dict[str, Any] = field(default_factory=dict)
    boundary: OrbitBoundary = "open"

    @property
    def period(self) -> float:
        return orbit_period(self.model, self.params)

    @property
    def local_dim(self) -> int:
        return 3 if self.model in ("aklt", "xy") else 2

    def state(self, t: float) -> MpsState:
        return analytic_orbit(self.model, self.params, t, self.n_sites, self.boundary)

    def dense(self, t: float, cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
        vec = to_dense(self.state(t), cap)
        return vec / np.linalg.norm(vec)

    def __call__(self, t: float) -> np.ndarray:
        return self.dense(t)
