"""Text exchange formats: ``mps-v1`` documents and operator-string listings."""

import logging
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import ShapeError
from .mps import MpsState
from .operators import DriveSchedule, Hamiltonian, OperatorString

logger = logging.getLogger(__name__)

MPS_FORMAT = "mps-v1"


class ComplexArray(BaseModel):
    """Row-major complex array stored as ``[re, im]`` pairs."""

    model_config = ConfigDict(extra="forbid")

    shape: List[int]
    data: List[Tuple[float, float]]

    @model_validator(mode="after")
    def _size_matches(self) -> "ComplexArray":
        expected = int(np.prod(self.shape)) if self.shape else 1
        if len(self.data) != expected:
            raise ValueError(f"shape {self.shape} needs {expected} entries, got {len(self.data)}")
        return self

    @classmethod
    def from_array(cls, array: np.ndarray) -> "ComplexArray":
        flat = np.asarray(array, dtype=complex).ravel(order="C")
        return cls(shape=list(np.shape(array)), data=[(float(z.real), float(z.imag)) for z in flat])

    def to_array(self) -> np.ndarray:
        pairs = np.asarray(self.data, dtype=float).reshape(-1, 2)
        return (pairs[:, 0] + 1j * pairs[:, 1]).reshape(self.shape)


class MpsDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    format: Literal["mps-v1"] = MPS_FORMAT
    boundary: Literal["open", "periodic", "thermodynamic"]
    n_sites: int
    d: int
    chi: List[int]
    tensors: List[ComplexArray]
    boundary_vectors: Optional[Tuple[ComplexArray, ComplexArray]] = None

    @model_validator(mode="after")
    def _consistent(self) -> "MpsDocument":
        if len(self.tensors) != self.n_sites:
            raise ValueError(f"n_sites={self.n_sites} but {len(self.tensors)} tensors")
        for n, tensor in enumerate(self.tensors):
            if len(tensor.shape) != 3 or tensor.shape[1] != self.d:
                raise ValueError(f"tensor {n} has shape {tensor.shape}, expected (left, {self.d}, right)")
        return self


def mps_document(mps: MpsState) -> MpsDocument:
    vectors = None
    if mps.boundary_vectors is not None:
        vectors = tuple(ComplexArray.from_array(v) for v in mps.boundary_vectors)
    return MpsDocument(
        boundary=mps.boundary,
        n_sites=mps.n_sites,
        d=mps.d,
        chi=list(mps.chi),
        tensors=[ComplexArray.from_array(a) for a in mps.tensors],
        boundary_vectors=vectors,
    )


def mps_to_json(mps: MpsState, indent: Optional[int] = 2) -> str:
    return mps_document(mps).model_dump_json(indent=indent)


def mps_from_json(text: Union[str, bytes]) -> MpsState:
    """Inverse of :func:`mps_to_json`; pydantic errors surface as ShapeError."""
    try:
        document = MpsDocument.model_validate_json(text)
    except ValueError as e:
        raise ShapeError(f"invalid {MPS_FORMAT} document: {e}") from e
    vectors = None
    if document.boundary_vectors is not None:
        vectors = tuple(v.to_array() for v in document.boundary_vectors)
    mps = MpsState(tuple(t.to_array() for t in document.tensors), document.boundary, vectors)
    if list(mps.chi) != document.chi:
        raise ShapeError(f"recorded bond dimensions {document.chi} differ from the tensors' {list(mps.chi)}")
    return mps


def save_mps(mps: MpsState, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(mps_to_json(mps))
    logger.debug(f"Wrote {MPS_FORMAT} state with chi={mps.max_chi} to {path}")
    return path


def load_mps(path: Union[str, Path]) -> MpsState:
    return mps_from_json(Path(path).read_text())


class StringRecord(BaseModel):
    label: str
    support_start: int
    sites: List[int]
    coefficient: Tuple[float, float]
    schedule: Optional[str] = None
    part: Literal["static", "driven"]
    role: Literal["h0", "h1", "other"] = "other"
    factors: List[ComplexArray]


class ScheduleRecord(BaseModel):
    form: str
    amplitude: float
    omega: float
    phase: float


class HamiltonianListing(BaseModel):
    model: str
    n_sites: int
    d: int
    boundary: str
    period: Optional[float] = None
    schedules: Dict[str, ScheduleRecord] = Field(default_factory=dict)
    strings: List[StringRecord] = Field(default_factory=list)


def _role(term: OperatorString, h: Hamiltonian) -> str:
    if h.h0_terms is not None and any(term is t for t in h.h0_terms):
        return "h0"
    if h.h1_terms is not None and any(term is t for t in h.h1_terms):
        return "h1"
    return "other"


def _schedule_record(schedule: DriveSchedule) -> ScheduleRecord:
    return ScheduleRecord(form=schedule.form, amplitude=schedule.amplitude, omega=schedule.omega, phase=schedule.phase)


def hamiltonian_listing(h: Hamiltonian) -> HamiltonianListing:
    """Every operator string of ``h`` with its coefficient, schedule and H0/H1 role."""
    records = []
    for part, terms in (("static", h.static_terms), ("driven", h.driven_terms)):
        for term in terms:
            records.append(
                StringRecord(
                    label=term.label,
                    support_start=term.support_start,
                    sites=term.sites(h.n_sites),
                    coefficient=(float(term.coefficient.real), float(term.coefficient.imag)),
                    schedule=term.schedule_id,
                    part=part,
                    role=_role(term, h),
                    factors=[ComplexArray.from_array(f) for f in term.factors],
                )
            )
    return HamiltonianListing(
        model=h.model,
        n_sites=h.n_sites,
        d=h.d,
        boundary=h.boundary,
        period=h.period,
        schedules={key: _schedule_record(s) for key, s in sorted(h.schedules.items())},
        strings=records,
    )
