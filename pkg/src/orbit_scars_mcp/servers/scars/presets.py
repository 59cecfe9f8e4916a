"""Named experiment presets, reduced to desk-scale chain lengths."""

import math
from typing import Any, Dict, List

from ...core.errors import ParameterError
from .models import EXPERIMENT_ADAPTER, PresetInfo

SSH_DRIVEN = {"j_o": 1.0, "j_e": 2 / 3, "delta": 0.2, "alpha0": (2 / 3 + 0.2) / 2}
AKLT_DRIVEN = {"gamma": 0.1, "delta0": 0.2}

PRESETS: Dict[str, Dict[str, Any]] = {
    "fig2a-ssh-revival": {
        "description": "SSH revival heatmap over (alpha0, delta); F_max ~ 1 along alpha0 = (J_e + delta) / 2",
        "config": {
            "experiment": "revival-scan",
            "model": {"name": "ssh", "n_sites": 10, "params": {"j_o": 1.0, "j_e": 2 / 3}},
            "x": {"param": "alpha0", "start": 0.0, "stop": 1.0, "num": 6},
            "y": {"param": "delta", "start": -0.6, "stop": 1.0, "num": 5},
            "window": {"t0": 1.0, "t1": 2 * math.pi},
        },
    },
    "fig2b-aklt-revival": {
        "description": "AKLT revival heatmap over (gamma, delta0); cancellation along delta0 = 2 gamma",
        "config": {
            "experiment": "revival-scan",
            "model": {"name": "aklt", "n_sites": 6, "params": {"z": 0.5}},
            "x": {"param": "gamma", "values": [0.0, 0.05, 0.1]},
            "y": {"param": "delta0", "values": [0.0, 0.1, 0.2, 0.3]},
            "window": {"t0": 0.5, "t1": math.pi},
        },
    },
    "figS6-ssh-stats": {
        "description": "Driven SSH Floquet statistics in the zero-magnetization, inversion-resolved sectors",
        "config": {
            "experiment": "floquet-stats",
            "model": {"name": "ssh", "n_sites": 12, "params": SSH_DRIVEN},
            "symmetries": ["magnetization", "spatial_inversion"],
            "pinned": {"magnetization": 0},
            "factor_symmetry": "global_spin_flip_X",
            "dt": math.pi / 400,
            "require_factorization": True,
            "r_range": [0.50, 0.56],
            "min_quasi_degenerate_ratio": 3.0,
        },
    },
    "ssh-leakage": {
        "description": "Numeric SSH leakage on the orbit against the closed form",
        "config": {
            "experiment": "leakage",
            "model": {"name": "ssh", "n_sites": 10, "params": {"j_o": 1.0, "j_e": 2 / 3, "delta": 0.2, "alpha0": 0.3}},
            "n_samples": 20,
            "max_rel_residual": 1e-9,
        },
    },
    "static-ssh-embedding": {
        "description": "Static SSH with delta = -J_e: perfect revival at T = pi / J_o",
        "config": {
            "experiment": "trajectory",
            "model": {"name": "ssh", "n_sites": 12, "params": {"j_o": 1.0, "j_e": 2 / 3, "delta": -2 / 3}},
            "min_fidelity": 1 - 1e-8,
        },
    },
    "ssh-driven-revival": {
        "description": "Driven SSH on the cancellation line, Richardson-checked exact evolution",
        "config": {
            "experiment": "trajectory",
            "model": {"name": "ssh", "n_sites": 12, "params": SSH_DRIVEN},
            "min_fidelity": 1 - 1e-5,
        },
    },
    "aklt-driven-revival": {
        "description": "AKLT with Delta(t) = 2 gamma cos 4t: revival at T = pi / 2",
        "config": {
            "experiment": "trajectory",
            "model": {"name": "aklt", "n_sites": 8, "params": AKLT_DRIVEN},
            "min_fidelity": 1 - 1e-5,
        },
    },
    "xy-driven-revival": {
        "description": "Spin-1 XY with Delta(t) = gamma sin 2ht: revival at T = pi",
        "config": {
            "experiment": "trajectory",
            "model": {
                "name": "xy",
                "n_sites": 8,
                "params": {"j": 1.0, "h": 1.0, "d_anis": 0.5, "gamma": 0.1, "delta0": 0.1},
            },
            "min_fidelity": 1 - 1e-5,
        },
    },
    "conditions-all": {
        "description": "Transfer-matrix and dense tangent-space certificates for every shipped model, drives off the cancellation line",
        "config": {
            "experiment": "check-conditions",
            "models": [
                {"name": "ssh", "n_sites": 8, "params": {"j_o": 1.0, "j_e": 2 / 3, "delta": 0.2, "alpha0": 0.1}},
                {"name": "aklt", "n_sites": 6, "params": {"gamma": 0.1, "delta0": 0.05}},
                {"name": "xy", "n_sites": 6, "params": {"d_anis": 0.5, "gamma": 0.1, "delta0": 0.03}},
                {"name": "iadecola_schecter", "n_sites": 8, "params": {"lam": 1.0, "delta": 1.0, "j": 0.2, "gamma0": 0.3}},
                {"name": "cluster", "n_sites": 8, "params": {"j_heis": 0.3, "alpha0": 0.1, "beta": 0.2}},
            ],
            "n_times": 10,
        },
    },
    "conditions-identity-control": {
        "description": "Negative control: H1 = identity must fail the certificates",
        "config": {
            "experiment": "check-conditions",
            "models": [{"name": "ssh", "n_sites": 8, "params": SSH_DRIVEN}],
            "n_times": 3,
            "h1_override": "identity",
        },
    },
    "aklt-string-order": {
        "description": "Converged long-distance AKLT string order along the orbit family",
        "config": {
            "experiment": "string-order",
            "z": {"param": "z", "values": [0.0, 0.25, 0.5, 1.0, 2.0]},
            "o_z_tolerance": 1e-10,
        },
    },
    "ssh-jnn-optimum": {
        "description": "Optimal next-next-nearest coupling versus J_e (no exact cancellation)",
        "config": {
            "experiment": "jnn-optimize",
            "j_o": 1.0,
            "j_e": {"param": "j_e", "start": 0.05, "stop": 1.0, "num": 12},
            "n_sites": 20,
        },
    },
    "ssh-fidelity-density": {
        "description": "Static SSH fidelity density -log(F_max)/N against 1/N off the embedding point",
        "config": {
            "experiment": "fidelity-density",
            "model": {"name": "ssh", "n_sites": 8, "params": {"j_o": 1.0, "j_e": 2 / 3, "alpha0": 0.0}},
            "sizes": [8, 10, 12],
            "sweep": {"param": "delta", "values": [-0.4, 0.0, 0.4]},
            "window": {"t0": 1.0, "t1": 2 * math.pi},
        },
    },
    "cluster-revival": {
        "description": "Cluster model under H0 alone: perfect revival at T = pi",
        "config": {
            "experiment": "trajectory",
            "model": {"name": "cluster", "n_sites": 10, "params": {"j_heis": 0.3, "beta": 0.2}},
            "hamiltonian": "h0",
            "min_fidelity": 1 - 1e-8,
        },
    },
    "cluster-driven-revival": {
        "description": "Cluster model with alpha(t) = -beta cos 2t",
        "config": {
            "experiment": "trajectory",
            "model": {"name": "cluster", "n_sites": 10, "params": {"j_heis": 0.3, "beta": 0.2, "alpha0": -0.2}},
            "min_fidelity": 1 - 1e-5,
        },
    },
    "tdvp-aklt-orbit": {
        "description": "chi=2 TDVP under the AKLT H0 follows the closed-form orbit",
        "config": {
            "experiment": "trajectory",
            "model": {"name": "aklt", "n_sites": 12, "params": {"z": 0.5}},
            "integrator": {"method": "tdvp", "dt": 0.025, "chi_max": 2},
            "hamiltonian": "h0",
            "track_orbit": True,
            "min_orbit_overlap": 1 - 1e-6,
        },
    },
    "aklt-z4-factorization": {
        "description": "AKLT U_T = z (Z4 U_a)^2 in each Z2 sector",
        "config": {
            "experiment": "floquet-stats",
            "model": {"name": "aklt", "n_sites": 6, "params": AKLT_DRIVEN},
            "symmetries": ["Z2_parity"],
            "factor_symmetry": "Z4_parity",
            "dt": math.pi / 400,
            "require_factorization": True,
        },
    },
    "aklt-kappa-stats": {
        "description": "AKLT with the kappa P-P- drive: no factorization, spectrum of U_T",
        "config": {
            "experiment": "floquet-stats",
            "model": {"name": "aklt", "n_sites": 7, "params": {**AKLT_DRIVEN, "kappa": 0.3}},
            "symmetries": ["Z2_parity"],
            "factor_symmetry": "Z4_parity",
            "dt": math.pi / 200,
            "require_factorization": False,
            "r_range": [0.50, 0.56],
        },
    },
    "xy-inversion-factorization": {
        "description": "Driven spin-1 XY: U_T = (R U_a)^2 with R the spatial inversion",
        "config": {
            "experiment": "floquet-stats",
            "model": {"name": "xy", "n_sites": 4, "params": {"j": 1.0, "h": 1.0, "d_anis": 0.5, "gamma": 0.1, "delta0": 0.1}},
            "factor_symmetry": "spatial_inversion",
            "dt": math.pi / 400,
            "require_factorization": True,
        },
    },
    "is-cancellation-candidates": {
        "description": "Iadecola-Schecter leakage for gamma0 = -2 delta_p and gamma0 = -delta_p / 2; only the first cancels",
        "config": {
            "experiment": "leakage",
            "model": {"name": "iadecola_schecter", "n_sites": 8,
                      "params": {"lam": 1.0, "delta": 1.0, "j": 0.2, "gamma0": -0.6, "delta_p": 0.3}},
            "n_samples": 20,
            "compare_analytic": False,
            "candidates": {"param": "gamma0", "values": [-0.6, -0.15]},
        },
    },
    "aklt-scar-modes": {
        "description": "Return probability under U_T: orbit state kept, static scar tower destroyed",
        "config": {
            "experiment": "scar-modes",
            "model": {"name": "aklt", "n_sites": 6, "params": AKLT_DRIVEN},
            "n_tower": 3,
            "dt": math.pi / 400,
            "min_orbit_return": 0.999,
            "max_tower_median": 0.5,
        },
    },
}


def list_presets() -> List[PresetInfo]:
    return [
        PresetInfo(name=name, experiment=entry["config"]["experiment"], description=entry["description"])
        for name, entry in sorted(PRESETS.items())
    ]


def preset_config(name: str):
    """Validated config of a preset, named after it."""
    entry = PRESETS.get(name)
    if entry is None:
        raise ParameterError(f"unknown preset {name!r}; see `orbit-scars list`")
    return EXPERIMENT_ADAPTER.validate_python({**entry["config"], "name": name})
