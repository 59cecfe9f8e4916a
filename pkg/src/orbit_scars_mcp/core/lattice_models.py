"""Builders for the five spin-chain models and their scar towers.

Sites are 0-based and every staggering sign ``(-1)**n`` uses the 0-based
index. Each builder records the H0/H1 split and the orbit period.
"""

import logging
import math
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple, Union

import numpy as np

from .errors import CapacityError, ParameterError
from .operators import (
    DEFAULT_DENSE_CAP,
    DriveSchedule,
    Hamiltonian,
    ID2,
    OperatorString,
    P_DOWN,
    P_UP,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    S_MINUS,
    S_PLUS,
    S_X,
    S_Y,
    S_Z,
    apply,
    basis_state,
    with_hc,
)

logger = logging.getLogger(__name__)

ScheduleLike = Union[DriveSchedule, float, int]
BoundaryKind = Literal["open", "periodic"]

AKLT_EPSILON = 4.0


class _TermCollector:
    """Accumulates H0/H1 strings and the schedules they reference."""

    def __init__(self, n_sites: int, d: int):
        self.n_sites = n_sites
        self.d = d
        self.h0: List[OperatorString] = []
        self.h1: List[OperatorString] = []
        self.schedules: Dict[str, DriveSchedule] = {}

    def coefficient(self, value: ScheduleLike, name: str) -> Tuple[complex, Optional[str]]:
        """Static coefficient or (1, schedule id) for a genuinely time-dependent value."""
        if isinstance(value, DriveSchedule):
            if value.form == "constant":
                return value.amplitude, None
            self.schedules[name] = value
            return 1.0, name
        return float(value), None

    def build(self, boundary: BoundaryKind, model: str, period: Optional[float]) -> Hamiltonian:
        terms = self.h0 + self.h1
        return Hamiltonian(
            n_sites=self.n_sites,
            d=self.d,
            static_terms=tuple(t for t in terms if t.schedule_id is None),
            driven_terms=tuple(t for t in terms if t.schedule_id is not None),
            schedules=dict(self.schedules),
            boundary=boundary,
            h0_terms=tuple(self.h0),
            h1_terms=tuple(self.h1),
            model=model,
            period=period,
        )


def _hop(start: int, span: int, coefficient: complex, schedule_id: Optional[str], label: str) -> OperatorString:
    """sigma^+ at ``start``, sigma^- at ``start + span``."""
    factors = (SIGMA_PLUS,) + (ID2,) * (span - 1) + (SIGMA_MINUS,)
    return OperatorString(start, factors, coefficient, schedule_id, label)


def _nonzero(terms: List[OperatorString]) -> List[OperatorString]:
    return [t for t in terms if t.coefficient != 0]


# SSH


def build_ssh(
    n_sites: int,
    j_o: float = 1.0,
    j_e: float = 0.0,
    delta: float = 0.0,
    alpha: ScheduleLike = 0.0,
    boundary: BoundaryKind = "open",
    alpha_variant: Literal["main", "swapped"] = "main",
    j_nn: float = 0.0,
) -> Hamiltonian:
    """Dimerized hopping chain with the orbit-preserving long-range drive.

    H0 hops inside the dimers {2n, 2n+1}; H1 couples neighbouring dimers
    through J_e, Delta and the staggered imaginary alpha hopping.
    """
    if n_sites < 2 or n_sites % 2:
        raise ParameterError(f"SSH chain needs an even number of sites, got {n_sites}")
    if boundary == "periodic" and n_sites % 4:
        raise ParameterError(f"periodic SSH chain needs N divisible by 4, got {n_sites}")
    if alpha_variant not in ("main", "swapped"):
        raise ParameterError(f"unknown alpha variant {alpha_variant!r}")
    n = n_sites
    terms = _TermCollector(n, 2)
    alpha_coef, alpha_id = terms.coefficient(alpha, "alpha")
    sign = 1.0 if alpha_variant == "main" else -1.0

    for k in range(n // 2):
        terms.h0.extend(with_hc([_hop(2 * k, 1, j_o, None, f"J_o@{2 * k}")]))

    n_windows = n // 2 if boundary == "periodic" else n // 2 - 1
    for k in range(n_windows):
        stagger = sign * (-1) ** k
        bulk = [
            _hop(2 * k + 1, 1, j_e, None, f"J_e@{2 * k + 1}"),
            _hop(2 * k, 3, delta, None, f"Delta@{2 * k}"),
        ]
        drive = [
            _hop(2 * k, 2, 1j * stagger * alpha_coef, alpha_id, f"alpha@{2 * k}"),
            _hop(2 * k + 1, 2, -1j * stagger * alpha_coef, alpha_id, f"alpha@{2 * k + 1}"),
        ]
        terms.h1.extend(with_hc(_nonzero(bulk) + _nonzero(drive)))

    n_nn = n // 2 if boundary == "periodic" else n // 2 - 2
    if j_nn != 0.0:
        for k in range(n_nn):
            terms.h1.extend(with_hc([_hop(2 * k + 1, 3, j_nn, None, f"J_nn@{2 * k + 1}")]))

    return terms.build(boundary, "ssh", math.pi / j_o if j_o else None)


# AKLT

KET_PLUS = np.array([1, 0, 0], dtype=complex)
KET_ZERO = np.array([0, 1, 0], dtype=complex)
KET_MINUS = np.array([0, 0, 1], dtype=complex)
KET_ALPHA_PLUS = (KET_PLUS + KET_MINUS) / math.sqrt(2)
KET_ALPHA_MINUS = (KET_PLUS - KET_MINUS) / math.sqrt(2)
P_MINUS = np.outer(KET_MINUS, KET_MINUS)


def _projector_string(
    kets: Tuple[np.ndarray, ...], bra: np.ndarray, start: int, coefficient: complex, schedule_id: Optional[str], label: str
) -> OperatorString:
    return OperatorString(start, tuple(np.outer(k, bra.conj()) for k in kets), coefficient, schedule_id, label)


def aklt_bond_terms(site: int) -> List[OperatorString]:
    """S.S + (S.S)^2 / 3 on the bond (site, site+1)."""
    spins = (S_X, S_Y, S_Z)
    out = [OperatorString(site, (s, s), 1.0, label=f"SS@{site}") for s in spins]
    for a in spins:
        for b in spins:
            out.append(OperatorString(site, (a @ b, a @ b), 1.0 / 3.0, label=f"SS2@{site}"))
    return out


def build_aklt(
    n_sites: int,
    gamma: float = 0.0,
    delta: ScheduleLike = 0.0,
    boundary: BoundaryKind = "open",
    kappa: float = 0.0,
) -> Hamiltonian:
    """Bilinear-biquadratic AKLT chain plus the four-site orbit-preserving drive.

    ``kappa`` adds kappa * sum P^-_n P^-_{n+1} with the time dependence of
    the Delta drive.
    """
    with_h1 = gamma != 0.0 or _schedule_nonzero(delta) or kappa != 0.0
    if with_h1 and n_sites < 4:
        raise ParameterError(f"AKLT four-site perturbation needs N >= 4, got {n_sites}")
    if n_sites < 2:
        raise ParameterError(f"AKLT chain needs N >= 2, got {n_sites}")
    n = n_sites
    terms = _TermCollector(n, 3)
    n_bonds = n if boundary == "periodic" else n - 1
    for site in range(n_bonds):
        terms.h0.extend(aklt_bond_terms(site))

    delta_coef, delta_id = terms.coefficient(delta, "delta")
    n_windows = n if boundary == "periodic" else n - 3
    if with_h1:
        for site in range(n_windows):
            window = []
            if gamma != 0.0:
                window.append(_projector_string(
                    (KET_ALPHA_PLUS, KET_ALPHA_MINUS, KET_ALPHA_PLUS, KET_ALPHA_MINUS),
                    KET_MINUS, site, gamma, None, f"gamma+@{site}",
                ))
                window.append(_projector_string(
                    (KET_ALPHA_MINUS, KET_ALPHA_PLUS, KET_ALPHA_MINUS, KET_ALPHA_PLUS),
                    KET_MINUS, site, gamma, None, f"gamma-@{site}",
                ))
            if delta_coef != 0.0:
                window.append(_projector_string(
                    (KET_ZERO, KET_PLUS, KET_ZERO, KET_PLUS),
                    KET_MINUS, site, (-1) ** site * delta_coef, delta_id, f"Delta@{site}",
                ))
            terms.h1.extend(with_hc(window))

    if kappa != 0.0:
        if isinstance(delta, DriveSchedule) and delta.form != "constant":
            kappa_schedule: ScheduleLike = DriveSchedule(delta.form, kappa, delta.omega, delta.phase)
        else:
            kappa_schedule = kappa
        kappa_coef, kappa_id = terms.coefficient(kappa_schedule, "kappa")
        for site in range(n_bonds):
            terms.h1.append(OperatorString(site, (P_MINUS, P_MINUS), kappa_coef, kappa_id, f"kappa@{site}"))

    return terms.build(boundary, "aklt", 2 * math.pi / AKLT_EPSILON)


def _schedule_nonzero(value: ScheduleLike) -> bool:
    if isinstance(value, DriveSchedule):
        return not value.is_zero
    return float(value) != 0.0


def aklt_ground_energy(n_sites: int) -> float:
    """Open-chain ground energy, -2/3 per bond."""
    return -2.0 / 3.0 * (n_sites - 1)


# spin-1 XY


def build_spin1_xy(
    n_sites: int,
    j: float = 1.0,
    h: float = 1.0,
    d_anis: float = 0.0,
    gamma: float = 0.0,
    delta: ScheduleLike = 0.0,
) -> Hamiltonian:
    """Open spin-1 XY chain with field and single-ion anisotropy.

    H1 = gamma (SxSx - SySy) + (-1)^n Delta (SxSy - SySx) on every bond.
    """
    if n_sites < 2:
        raise ParameterError(f"XY chain needs N >= 2, got {n_sites}")
    n = n_sites
    terms = _TermCollector(n, 3)
    for site in range(n - 1):
        terms.h0.append(OperatorString(site, (S_X, S_X), j, label=f"XX@{site}"))
        terms.h0.append(OperatorString(site, (S_Y, S_Y), j, label=f"YY@{site}"))
    for site in range(n):
        if h != 0.0:
            terms.h0.append(OperatorString(site, (S_Z,), h, label=f"h@{site}"))
        if d_anis != 0.0:
            terms.h0.append(OperatorString(site, (S_Z @ S_Z,), d_anis, label=f"D@{site}"))

    delta_coef, delta_id = terms.coefficient(delta, "delta")
    for site in range(n - 1):
        if gamma != 0.0:
            terms.h1.append(OperatorString(site, (S_PLUS, S_PLUS), gamma / 2, label=f"gamma@{site}"))
            terms.h1.append(OperatorString(site, (S_MINUS, S_MINUS), gamma / 2, label=f"gamma@{site}^hc"))
        if delta_coef != 0.0:
            c = (-1) ** site * delta_coef * 0.5j
            terms.h1.append(OperatorString(site, (S_PLUS, S_MINUS), c, delta_id, f"Delta@{site}"))
            terms.h1.append(OperatorString(site, (S_MINUS, S_PLUS), -c, delta_id, f"Delta@{site}^hc"))

    return terms.build("open", "xy", math.pi / abs(h) if h else None)


# Iadecola-Schecter domain-wall model


def is_epsilon(delta: float, j: float) -> float:
    """Scar-tower spacing 2*Delta - 4*J."""
    return 2.0 * delta - 4.0 * j


def build_iadecola_schecter(
    n_sites: int,
    lam: float = 1.0,
    delta: float = 1.0,
    j: float = 0.0,
    gamma: ScheduleLike = 0.0,
    delta_p: ScheduleLike = 0.0,
) -> Hamiltonian:
    """Open domain-wall preserving chain; lambda flips act on bulk sites 1..N-2.

    H1 is a sum over seven-site windows centred on n = 3..N-4 of
    s+ s+ [gamma s+ P1 s+ + Delta_p (-1)^n (s+ s+ s+ + P1 s+ P1)] s+ s+ + h.c.
    """
    with_h1 = _schedule_nonzero(gamma) or _schedule_nonzero(delta_p)
    if with_h1 and n_sites < 7:
        raise ParameterError(f"seven-site perturbation does not fit on {n_sites} sites")
    if n_sites < 3:
        raise ParameterError(f"domain-wall model needs N >= 3, got {n_sites}")
    n = n_sites
    terms = _TermCollector(n, 2)
    for site in range(1, n - 1):
        terms.h0.append(OperatorString(site, (SIGMA_X,), lam, label=f"lambda@{site}"))
        terms.h0.append(OperatorString(site - 1, (SIGMA_Z, SIGMA_X, SIGMA_Z), -lam, label=f"lambda_zxz@{site}"))
    for site in range(n):
        terms.h0.append(OperatorString(site, (SIGMA_Z,), delta, label=f"Delta@{site}"))
    for site in range(n - 1):
        if j != 0.0:
            terms.h0.append(OperatorString(site, (SIGMA_Z, SIGMA_Z), j, label=f"J@{site}"))

    gamma_coef, gamma_id = terms.coefficient(gamma, "gamma")
    dp_coef, dp_id = terms.coefficient(delta_p, "delta_p")
    sp = SIGMA_PLUS
    if with_h1:
        for centre in range(3, n - 3):
            start = centre - 3
            window = []
            if gamma_coef != 0.0:
                window.append(OperatorString(start, (sp, sp, sp, P_UP, sp, sp, sp), gamma_coef, gamma_id, f"gamma@{centre}"))
            if dp_coef != 0.0:
                c = (-1) ** centre * dp_coef
                window.append(OperatorString(start, (sp,) * 7, c, dp_id, f"Delta_p@{centre}"))
                window.append(OperatorString(start, (sp, sp, P_UP, sp, P_UP, sp, sp), c, dp_id, f"Delta_p1@{centre}"))
            terms.h1.extend(with_hc(window))

    eps = is_epsilon(delta, j)
    return terms.build("open", "iadecola_schecter", 2 * math.pi / abs(eps) if eps else None)


# cluster (ZXZ) model


def _product(*placements: Dict[int, np.ndarray]) -> Dict[int, np.ndarray]:
    """Operator product of site->matrix maps, leftmost factor first."""
    out: Dict[int, np.ndarray] = {}
    for placed in placements:
        for site, op in placed.items():
            out[site] = out[site] @ op if site in out else op
    return out


def cluster_kz(site: int, n_sites: int) -> Dict[int, np.ndarray]:
    return {(site - 1) % n_sites: SIGMA_Z, site % n_sites: SIGMA_X, (site + 1) % n_sites: SIGMA_Z}


def cluster_kx(site: int, n_sites: int) -> Dict[int, np.ndarray]:
    return {site % n_sites: SIGMA_Z}


def cluster_ky(site: int, n_sites: int) -> Dict[int, np.ndarray]:
    return {(site - 1) % n_sites: SIGMA_Z, site % n_sites: SIGMA_Y, (site + 1) % n_sites: SIGMA_Z}


def _cluster_string(placed: Dict[int, np.ndarray], anchor: int, n_sites: int, coefficient: complex,
                    schedule_id: Optional[str], label: str) -> OperatorString:
    """Window string starting at ``anchor`` covering the placed sites (mod N)."""
    offsets = {(site - anchor) % n_sites: op for site, op in placed.items()}
    length = max(offsets) + 1
    factors = tuple(offsets.get(k, ID2) for k in range(length))
    return OperatorString(anchor % n_sites, factors, coefficient, schedule_id, label)


def build_cluster(
    n_sites: int,
    j_heis: float = 0.0,
    alpha: ScheduleLike = 0.0,
    beta: float = 0.0,
    boundary: BoundaryKind = "open",
) -> Hamiltonian:
    """H0 = -sum K^z_n; open chains keep only bulk clusters 1..N-2.

    H1 = sum K^z_n (alpha (K^z_{n+2} - K^z_{n+3}) + beta (K^z_{n+2} K^x_{n+3} - K^x_{n+2} K^z_{n+3})).
    """
    n = n_sites
    min_sites = 6 if (_schedule_nonzero(alpha) or beta != 0.0) else 3
    if n < min_sites:
        raise ParameterError(f"cluster model needs N >= {min_sites}, got {n}")
    terms = _TermCollector(n, 2)
    centres = range(n) if boundary == "periodic" else range(1, n - 1)
    for site in centres:
        terms.h0.append(_cluster_string(cluster_kz(site, n), site - 1, n, -1.0, None, f"Kz@{site}"))

    if j_heis != 0.0:
        bonds = range(n) if boundary == "periodic" else range(1, n - 2)
        for site in bonds:
            terms.h0.append(_cluster_string({site: SIGMA_Z, (site + 1) % n: SIGMA_Z}, site, n, j_heis, None, f"heis_zz@{site}"))
            for pauli, tag in ((SIGMA_X, "xx"), (SIGMA_Y, "yy")):
                placed = {(site - 1) % n: SIGMA_Z, site: pauli, (site + 1) % n: pauli, (site + 2) % n: SIGMA_Z}
                terms.h0.append(_cluster_string(placed, site - 1, n, j_heis, None, f"heis_{tag}@{site}"))

    alpha_coef, alpha_id = terms.coefficient(alpha, "alpha")
    windows = range(n) if boundary == "periodic" else range(1, n - 4)
    for site in windows:
        kz_n = cluster_kz(site, n)
        pieces = []
        if alpha_coef != 0.0:
            pieces.append((_product(kz_n, cluster_kz(site + 2, n)), alpha_coef, alpha_id, "alpha_a"))
            pieces.append((_product(kz_n, cluster_kz(site + 3, n)), -alpha_coef, alpha_id, "alpha_b"))
        if beta != 0.0:
            pieces.append((_product(kz_n, cluster_kz(site + 2, n), cluster_kx(site + 3, n)), beta, None, "beta_a"))
            pieces.append((_product(kz_n, cluster_kx(site + 2, n), cluster_kz(site + 3, n)), -beta, None, "beta_b"))
        for placed, coefficient, schedule_id, tag in pieces:
            terms.h1.append(_cluster_string(placed, site - 1, n, coefficient, schedule_id, f"{tag}@{site}"))

    return terms.build(boundary, "cluster", math.pi)


def cluster_string_operator(n1: int, n2: int, n_sites: int) -> OperatorString:
    """prod_{m=n1..n2} K^y_m as one string on sites n1-1..n2+1."""
    placed = _product(*(cluster_ky(m, n_sites) for m in range(n1, n2 + 1)))
    return _cluster_string(placed, n1 - 1, n_sites, 1.0, None, f"Oy[{n1},{n2}]")


# scar towers

TowerModel = Literal["aklt", "xy", "iadecola_schecter"]


def raising_operator(model: str, n_sites: int) -> Hamiltonian:
    """pi-momentum raising operator Q+ of the model's scar tower."""
    if model == "aklt" or model == "xy":
        s2 = S_PLUS @ S_PLUS
        strings = tuple(OperatorString(n, (s2,), (-1) ** n, label=f"Q+@{n}") for n in range(n_sites))
        return Hamiltonian(n_sites=n_sites, d=3, static_terms=strings, model=f"{model}:Q+")
    if model == "iadecola_schecter":
        strings = tuple(
            OperatorString(n - 1, (P_DOWN, SIGMA_PLUS, P_DOWN), (-1) ** n, label=f"Q+@{n}")
            for n in range(1, n_sites - 1)
        )
        return Hamiltonian(n_sites=n_sites, d=2, static_terms=strings, model=f"{model}:Q+")
    raise ParameterError(f"model {model!r} has no scar tower; use aklt, xy or iadecola_schecter")


def tower_mother_state(model: str, n_sites: int, cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    if model == "aklt":
        from .mps import normalize, to_dense
        from .orbits import aklt_open_mps

        return to_dense(normalize(aklt_open_mps(n_sites, 0.0)), cap)
    if model == "xy":
        _guard(3**n_sites, cap)
        return basis_state([2] * n_sites, 3)
    if model == "iadecola_schecter":
        _guard(2**n_sites, cap)
        return basis_state([0] * n_sites, 2)
    raise ParameterError(f"cannot build a mother state for model {model!r}")


def _guard(size: int, cap: int) -> None:
    if size > cap:
        raise CapacityError("dense scar tower", size, cap, hint="raise ORBIT_SCARS_DENSE_CAP or reduce n_sites")


def scar_tower(model: str, n_sites: int, n_max: int, cap: int = DEFAULT_DENSE_CAP) -> List[np.ndarray]:
    """Normalized states (Q+)^m |mother>, m = 0..n_max."""
    q_plus = raising_operator(model, n_sites)
    state = tower_mother_state(model, n_sites, cap)
    tower = [state / np.linalg.norm(state)]
    for m in range(1, n_max + 1):
        state = apply(q_plus, state, cap=cap)
        norm = np.linalg.norm(state)
        if norm < 1e-12:
            raise ParameterError(f"{model} scar tower on {n_sites} sites ends before level {m}")
        state = state / norm
        tower.append(state)
    return tower


def tower_energy(model: str, n_sites: int, level: int, **params: float) -> float:
    """Closed-form energy of tower level ``level``."""
    n = n_sites
    if model == "aklt":
        return aklt_ground_energy(n) + AKLT_EPSILON * level
    if model == "xy":
        return params.get("h", 1.0) * (2 * level - n) + n * params.get("d_anis", 0.0)
    if model == "iadecola_schecter":
        delta, j = params.get("delta", 1.0), params.get("j", 0.0)
        return is_epsilon(delta, j) * level + j * (n - 1) - delta * n
    raise ParameterError(f"model {model!r} has no scar tower")


# parameter dictionaries


def _waveform(form: str, amplitude: float, omega: float) -> DriveSchedule:
    if form == "constant":
        return DriveSchedule.constant(amplitude)
    if amplitude == 0.0:
        return DriveSchedule.constant(0.0)
    if omega == 0.0:
        # sin(0) = 0, cos(0) = 1
        return DriveSchedule.constant(amplitude if form == "cosine" else 0.0)
    if form == "sine":
        return DriveSchedule.sine(amplitude, abs(omega))
    if form == "cosine":
        return DriveSchedule.cosine(amplitude, abs(omega))
    raise ParameterError(f"unsupported drive form {form!r}; use constant, sine or cosine")


def _num(params: Mapping[str, Any], key: str, default: float) -> float:
    value = params.get(key, default)
    try:
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"model parameter {key!r} must be a number, got {value!r}") from exc


def drive_schedules(model: str, params: Mapping[str, Any]) -> Dict[str, DriveSchedule]:
    """Time dependence of every driven coupling, keyed by schedule id.

    ssh: alpha(t) = -alpha0 sin(2 J_o t); aklt: Delta(t) = delta0 cos(4t);
    xy: Delta(t) = delta0 sin(2ht); iadecola_schecter: gamma(t) = gamma0 cos(eps t);
    cluster: alpha(t) = alpha0 cos(2t). ``*_form`` keys switch the waveform.
    """
    if model == "ssh":
        j_o = _num(params, "j_o", 1.0)
        return {"alpha": _waveform(str(params.get("alpha_form", "sine")), -_num(params, "alpha0", 0.0), 2 * j_o)}
    if model == "aklt":
        return {"delta": _waveform(str(params.get("delta_form", "cosine")), _num(params, "delta0", 0.0), AKLT_EPSILON)}
    if model == "xy":
        h = _num(params, "h", 1.0)
        return {"delta": _waveform(str(params.get("delta_form", "sine")), _num(params, "delta0", 0.0), 2 * h)}
    if model == "iadecola_schecter":
        eps = is_epsilon(_num(params, "delta", 1.0), _num(params, "j", 0.0))
        return {
            "gamma": _waveform(str(params.get("gamma_form", "cosine")), _num(params, "gamma0", 0.0), eps),
            "delta_p": DriveSchedule.constant(_num(params, "delta_p", 0.0)),
        }
    if model == "cluster":
        return {"alpha": _waveform(str(params.get("alpha_form", "cosine")), _num(params, "alpha0", 0.0), 2.0)}
    raise ParameterError(f"unknown model {model!r}")


MODEL_NAMES = ("ssh", "aklt", "xy", "iadecola_schecter", "cluster")


def build_model(model: str, params: Mapping[str, Any], n_sites: int, boundary: BoundaryKind = "open") -> Hamiltonian:
    """Hamiltonian of ``model`` from a flat parameter dictionary."""
    schedules = drive_schedules(model, params)
    if model == "ssh":
        return build_ssh(
            n_sites,
            j_o=_num(params, "j_o", 1.0),
            j_e=_num(params, "j_e", 0.0),
            delta=_num(params, "delta", 0.0),
            alpha=schedules["alpha"],
            boundary=boundary,
            alpha_variant=str(params.get("alpha_variant", "main")),
            j_nn=_num(params, "j_nn", 0.0),
        )
    if model == "aklt":
        return build_aklt(
            n_sites,
            gamma=_num(params, "gamma", 0.0),
            delta=schedules["delta"],
            boundary=boundary,
            kappa=_num(params, "kappa", 0.0),
        )
    if boundary != "open" and model in ("xy", "iadecola_schecter"):
        raise ParameterError(f"model {model!r} is built on open chains only")
    if model == "xy":
        return build_spin1_xy(
            n_sites,
            j=_num(params, "j", 1.0),
            h=_num(params, "h", 1.0),
            d_anis=_num(params, "d_anis", 0.0),
            gamma=_num(params, "gamma", 0.0),
            delta=schedules["delta"],
        )
    if model == "iadecola_schecter":
        return build_iadecola_schecter(
            n_sites,
            lam=_num(params, "lam", 1.0),
            delta=_num(params, "delta", 1.0),
            j=_num(params, "j", 0.0),
            gamma=schedules["gamma"],
            delta_p=schedules["delta_p"],
        )
    if model == "cluster":
        return build_cluster(
            n_sites,
            j_heis=_num(params, "j_heis", 0.0),
            alpha=schedules["alpha"],
            beta=_num(params, "beta", 0.0),
            boundary=boundary,
        )
    raise ParameterError(f"unknown model {model!r}; choose one of {', '.join(MODEL_NAMES)}")
