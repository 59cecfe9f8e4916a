"""Operator strings, drive schedules and Hamiltonians built from them.

A Hamiltonian is a sum of operator strings, each a product of single-site
factors on a window of consecutive sites. Driven strings carry a schedule
id; their coefficient is multiplied by the schedule value at time ``t``.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Dict, Iterable, Literal, Mapping, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .errors import CapacityError, ParameterError, ShapeError

logger = logging.getLogger(__name__)

DEFAULT_DENSE_CAP = 2**24
DENSE_MATRIX_CAP = 8192

# spin-1/2, basis (down, up)
ID2 = np.eye(2, dtype=complex)
SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, 1j], [-1j, 0]], dtype=complex)
SIGMA_Z = np.diag([-1.0, 1.0]).astype(complex)
P_UP = np.diag([0.0, 1.0]).astype(complex)
P_DOWN = np.diag([1.0, 0.0]).astype(complex)

# spin-1, basis (m=+1, m=0, m=-1)
ID3 = np.eye(3, dtype=complex)
S_PLUS = np.array([[0, math.sqrt(2), 0], [0, 0, math.sqrt(2)], [0, 0, 0]], dtype=complex)
S_MINUS = S_PLUS.T.copy()
S_X = (S_PLUS + S_MINUS) / 2
S_Y = (S_PLUS - S_MINUS) / 2j
S_Z = np.diag([1.0, 0.0, -1.0]).astype(complex)

Waveform = Literal["constant", "sine", "cosine"]


@dataclass(frozen=True)
class DriveSchedule:
    """``amplitude * {1, sin, cos}(omega * t + phase)``."""

    form: Waveform
    amplitude: float
    omega: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if self.form not in ("constant", "sine", "cosine"):
            raise ParameterError(f"unsupported waveform {self.form!r}; use constant, sine or cosine")
        if self.form != "constant" and self.omega <= 0.0:
            raise ParameterError(f"a {self.form} schedule needs a positive angular frequency")

    @classmethod
    def constant(cls, amplitude: float) -> "DriveSchedule":
        return cls("constant", float(amplitude))

    @classmethod
    def sine(cls, amplitude: float, omega: float, phase: float = 0.0) -> "DriveSchedule":
        return cls("sine", float(amplitude), float(omega), float(phase))

    @classmethod
    def cosine(cls, amplitude: float, omega: float, phase: float = 0.0) -> "DriveSchedule":
        return cls("cosine", float(amplitude), float(omega), float(phase))

    def __call__(self, t: float) -> float:
        if self.form == "constant":
            return self.amplitude
        arg = self.omega * t + self.phase
        return self.amplitude * (math.sin(arg) if self.form == "sine" else math.cos(arg))

    @property
    def period(self) -> float:
        return math.inf if self.form == "constant" else 2 * math.pi / self.omega

    @property
    def is_zero(self) -> bool:
        return self.amplitude == 0.0


@dataclass(frozen=True, eq=False)
class OperatorString:
    """Product of ``factors`` on consecutive sites starting at ``support_start``.

    Sites wrap modulo the chain length on periodic chains.
    """

    support_start: int
    factors: tuple
    coefficient: complex = 1.0
    schedule_id: Optional[str] = None
    label: str = ""

    def __post_init__(self):
        if len(self.factors) == 0:
            raise ShapeError("an operator string needs at least one factor")
        factors = tuple(np.asarray(f, dtype=complex) for f in self.factors)
        d = factors[0].shape[0]
        for k, f in enumerate(factors):
            if f.shape != (d, d):
                raise ShapeError(f"factor {k} has shape {f.shape}, expected ({d}, {d})")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "coefficient", complex(self.coefficient))

    @property
    def d(self) -> int:
        return int(self.factors[0].shape[0])

    @property
    def length(self) -> int:
        return len(self.factors)

    def sites(self, n_sites: int) -> list:
        if self.length > n_sites:
            raise ShapeError(f"string of length {self.length} does not fit on {n_sites} sites")
        return [(self.support_start + k) % n_sites for k in range(self.length)]

    def dagger(self) -> "OperatorString":
        label = self.label[:-3] if self.label.endswith("^hc") else f"{self.label}^hc"
        return OperatorString(
            self.support_start,
            tuple(f.conj().T for f in self.factors),
            np.conj(self.coefficient),
            self.schedule_id,
            label,
        )

    def with_coefficient(self, coefficient: complex) -> "OperatorString":
        return OperatorString(self.support_start, self.factors, coefficient, self.schedule_id, self.label)


def with_hc(terms: Iterable[OperatorString]) -> list:
    """Each string followed by its Hermitian conjugate."""
    out = []
    for term in terms:
        out.extend((term, term.dagger()))
    return out


def string_sparse(term: OperatorString, n_sites: int) -> sp.csr_matrix:
    d = term.d
    per_site: list = [None] * n_sites
    for site, factor in zip(term.sites(n_sites), term.factors):
        per_site[site] = sp.csr_matrix(factor)
    blocks = []
    run = 0
    for op in per_site:
        if op is None:
            run += 1
            continue
        if run:
            blocks.append(sp.identity(d**run, dtype=complex, format="csr"))
            run = 0
        blocks.append(op)
    if run:
        blocks.append(sp.identity(d**run, dtype=complex, format="csr"))
    return reduce(lambda a, b: sp.kron(a, b, format="csr"), blocks)


def apply_string(term: OperatorString, psi: np.ndarray, n_sites: int) -> np.ndarray:
    """Apply the factors of ``term`` (no coefficient) to a (d,)*N tensor."""
    out = psi
    for site, factor in zip(term.sites(n_sites), term.factors):
        out = np.moveaxis(np.tensordot(factor, out, axes=([1], [site])), 0, site)
    return out


@dataclass(frozen=True, eq=False)
class SparseParts:
    """Static matrix plus one matrix per drive schedule, assembled once."""

    static: sp.csr_matrix
    driven: tuple

    def at(self, t: float) -> sp.csr_matrix:
        out = self.static
        for schedule, matrix in self.driven:
            out = out + schedule(t) * matrix
        return out.tocsr()


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    n_sites: int
    d: int
    static_terms: tuple = ()
    driven_terms: tuple = ()
    schedules: Mapping[str, DriveSchedule] = field(default_factory=dict)
    boundary: Literal["open", "periodic"] = "open"
    h0_terms: Optional[tuple] = None
    h1_terms: Optional[tuple] = None
    model: str = "custom"
    period: Optional[float] = None

    def __post_init__(self):
        if self.n_sites < 1:
            raise ParameterError(f"n_sites must be positive, got {self.n_sites}")
        for term in self.terms:
            if term.d != self.d:
                raise ShapeError(f"term {term.label!r} has local dimension {term.d}, chain has {self.d}")
            term.sites(self.n_sites)
        for term in self.driven_terms:
            if term.schedule_id not in self.schedules:
                raise ParameterError(f"driven term {term.label!r} references unknown schedule {term.schedule_id!r}")
        for term in self.static_terms:
            if term.schedule_id is not None:
                raise ParameterError(f"static term {term.label!r} carries schedule {term.schedule_id!r}")

    @property
    def terms(self) -> tuple:
        return tuple(self.static_terms) + tuple(self.driven_terms)

    @property
    def dimension(self) -> int:
        return self.d**self.n_sites

    @property
    def has_decomposition(self) -> bool:
        return self.h0_terms is not None and self.h1_terms is not None

    @property
    def is_driven(self) -> bool:
        return any(not self.schedules[t.schedule_id].is_zero for t in self.driven_terms)

    def coefficient(self, term: OperatorString, t: float) -> complex:
        if term.schedule_id is None:
            return term.coefficient
        return term.coefficient * self.schedules[term.schedule_id](t)

    def subset(self, terms: Sequence[OperatorString], model: Optional[str] = None) -> "Hamiltonian":
        static = tuple(term for term in terms if term.schedule_id is None)
        driven = tuple(term for term in terms if term.schedule_id is not None)
        return Hamiltonian(
            n_sites=self.n_sites,
            d=self.d,
            static_terms=static,
            driven_terms=driven,
            schedules=dict(self.schedules),
            boundary=self.boundary,
            model=model or self.model,
            period=self.period,
        )

    @property
    def h0(self) -> "Hamiltonian":
        if self.h0_terms is None:
            raise ParameterError(f"{self.model} Hamiltonian has no H0/H1 decomposition")
        return self.subset(self.h0_terms, f"{self.model}:h0")

    @property
    def h1(self) -> "Hamiltonian":
        if self.h1_terms is None:
            raise ParameterError(f"{self.model} Hamiltonian has no H0/H1 decomposition")
        return self.subset(self.h1_terms, f"{self.model}:h1")

    @property
    def static_part(self) -> "Hamiltonian":
        return self.subset(self.static_terms, f"{self.model}:static")

    @property
    def driven_part(self) -> "Hamiltonian":
        return self.subset(self.driven_terms, f"{self.model}:driven")

    def _check_capacity(self, cap: int) -> None:
        if self.dimension > cap:
            raise CapacityError(
                "Hilbert space", self.dimension, cap, hint="raise ORBIT_SCARS_DENSE_CAP or reduce n_sites"
            )

    def sparse_parts(self, cap: int = DEFAULT_DENSE_CAP) -> SparseParts:
        self._check_capacity(cap)
        dim = self.dimension
        static = sp.csr_matrix((dim, dim), dtype=complex)
        for term in self.static_terms:
            static = static + term.coefficient * string_sparse(term, self.n_sites)
        by_schedule: Dict[str, sp.csr_matrix] = {}
        for term in self.driven_terms:
            matrix = term.coefficient * string_sparse(term, self.n_sites)
            previous = by_schedule.get(term.schedule_id)
            by_schedule[term.schedule_id] = matrix if previous is None else previous + matrix
        driven = tuple(
            (self.schedules[key], matrix.tocsr()) for key, matrix in sorted(by_schedule.items())
        )
        logger.debug(f"Assembled {self.model}: dim={dim}, {len(self.terms)} strings, {len(driven)} schedules")
        return SparseParts(static=static.tocsr(), driven=driven)

    def sparse(self, t: float = 0.0, cap: int = DEFAULT_DENSE_CAP) -> sp.csr_matrix:
        return self.sparse_parts(cap).at(t)

    def dense(self, t: float = 0.0, cap: int = DENSE_MATRIX_CAP) -> np.ndarray:
        if self.dimension > cap:
            raise CapacityError(
                "dense Hamiltonian matrix", self.dimension, cap, hint="use the sparse path or fewer sites"
            )
        return self.sparse(t).toarray()


def apply(h: Hamiltonian, v: np.ndarray, t: float = 0.0, cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    """H(t) v, string by string, without assembling a matrix."""
    if h.dimension > cap:
        raise CapacityError("Hilbert space", h.dimension, cap, hint="raise ORBIT_SCARS_DENSE_CAP or reduce n_sites")
    vec = np.asarray(v, dtype=complex).ravel()
    if vec.size != h.dimension:
        raise ShapeError(f"vector of length {vec.size} on a Hilbert space of dimension {h.dimension}")
    psi = vec.reshape((h.d,) * h.n_sites)
    out = np.zeros_like(psi)
    for term in h.terms:
        coefficient = h.coefficient(term, t)
        if coefficient == 0:
            continue
        out += coefficient * apply_string(term, psi, h.n_sites)
    return out.ravel()


def expectation(h: Hamiltonian, v: np.ndarray, t: float = 0.0) -> complex:
    vec = np.asarray(v, dtype=complex).ravel()
    return complex(np.vdot(vec, apply(h, vec, t)) / np.vdot(vec, vec))


def hermiticity_residual(h: Hamiltonian, t: float = 0.0) -> float:
    matrix = h.sparse(t)
    diff = matrix - matrix.conj().T
    return float(np.max(np.abs(diff.data))) if diff.nnz else 0.0


def local_operator(op: np.ndarray, site: int, n_sites: int, label: str = "") -> OperatorString:
    return OperatorString(site, (op,), 1.0, label=label or f"op@{site}")


def product_string(
    ops: Sequence[np.ndarray],
    start: int,
    coefficient: complex = 1.0,
    schedule_id: Optional[str] = None,
    label: str = "",
) -> OperatorString:
    return OperatorString(start, tuple(ops), coefficient, schedule_id, label)


def padded_string(
    placed: Mapping[int, np.ndarray],
    d: int,
    coefficient: complex = 1.0,
    schedule_id: Optional[str] = None,
    label: str = "",
) -> OperatorString:
    """String spanning min..max of ``placed`` with identities in the gaps."""
    first, last = min(placed), max(placed)
    identity = np.eye(d, dtype=complex)
    factors = tuple(placed.get(site, identity) for site in range(first, last + 1))
    return OperatorString(first, factors, coefficient, schedule_id, label)


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, mats)


def dense_product_state(site_vectors: Sequence[np.ndarray]) -> np.ndarray:
    return kron_all([np.asarray(v, dtype=complex) for v in site_vectors])


def basis_state(digits: Sequence[int], d: int) -> np.ndarray:
    index = 0
    for digit in digits:
        if not 0 <= digit < d:
            raise ShapeError(f"digit {digit} outside local dimension {d}")
        index = index * d + int(digit)
    vec = np.zeros(d ** len(digits), dtype=complex)
    vec[index] = 1.0
    return vec


def bitstring_state(bits: str) -> np.ndarray:
    """Spin-1/2 basis state from a string such as ``"1001"`` (site 0 first)."""
    return basis_state([int(b) for b in bits], 2)


def sum_strings_matrix(terms: Iterable[Tuple[complex, OperatorString]], n_sites: int, dim: int) -> sp.csr_matrix:
    out = sp.csr_matrix((dim, dim), dtype=complex)
    for coefficient, term in terms:
        out = out + coefficient * term.coefficient * string_sparse(term, n_sites)
    return out.tocsr()
