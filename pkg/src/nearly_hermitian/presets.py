"""Figure presets and the acceptance suite run by ``verify``."""
import copy
import json
import logging
from typing import Any, Dict, List

from . import config
from .errors import ConfigurationError

# Configure logging
logger = logging.getLogger(__name__)

FIGURES = ["fig1", "fig2", "fig3", "fig4", "fig5"]

FIG3_DIAGONAL = [[0.0, 1.5], [1.0, 1.0], 2.0]
FIG5_DIAGONAL = [-1.5, [0.0, 1.5], [1.0, 1.0], 2.0]


def load_preset(name: str) -> Dict[str, Any]:
    """Read a preset experiment from ``data/presets/<name>.json``.

    Raises:
        ConfigurationError: If no preset of that name exists or it is not valid JSON
    """
    path = config.PRESETS_DIR / f"{name}.json"
    if not path.is_file():
        raise ConfigurationError(f"Unknown preset {name!r}; available: {', '.join(available_presets())}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Preset file {path} is not valid JSON: {str(e)}")


def available_presets() -> List[str]:
    return sorted(p.stem for p in config.PRESETS_DIR.glob("*.json"))


def _merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def expand_entry(entry: Any) -> Any:
    """Replace ``{"preset": name, ...}`` by the preset with the remaining keys merged in."""
    if not isinstance(entry, dict) or "preset" not in entry:
        return entry
    overrides = dict(entry)
    name = overrides.pop("preset")
    if not isinstance(name, str):
        raise ConfigurationError("preset must be a preset name")
    preset = load_preset(name)
    if "n" in overrides:
        # a bare n resizes the preset; square covariance presets stay square
        n = overrides.pop("n")
        ensemble = preset["ensemble"]
        family = ensemble.get("family", {})
        if family.get("kind") == "sample_covariance" and family.get("m") == ensemble["n"]:
            family["m"] = n
        ensemble["n"] = n
    return _merge(preset, overrides)


def _covariance(n: int, normalization: str = "one_over_n", m: int = None) -> Dict[str, Any]:
    return {
        "family": {"kind": "sample_covariance", "atom": {"kind": "gaussian"}, "m": m or n},
        "n": n,
        "normalization": normalization,
    }


def verify_suite(quick: bool = False) -> List[Dict[str, Any]]:
    """Experiments making up the acceptance run.

    ``quick`` shrinks the large dimensions and loosens the tolerances that
    scale with them.
    """
    big = 1000 if quick else 2000
    mid = 300 if quick else 1000
    suite = [
        {
            "name": "bounds_suite",
            "experiment": "bounds_suite",
            "n": 30 if quick else 100,
            "trials": 100 if quick else 500,
            "params": {"threshold": 1.0},
        },
        _merge(load_preset("fig3"), {
            "ensemble": {"n": big},
            "params": {"dump_eigenvalues": False, "match_tolerance": 0.2 if quick else 0.1},
        }),
        _merge(load_preset("fig5"), {
            "ensemble": {"n": big, "family": {"m": big}},
            "params": {"dump_eigenvalues": False, "match_tolerance": 0.3 if quick else 0.2},
        }),
        _merge(load_preset("fig1"), {"params": {"dump_eigenvalues": False}}),
        _merge(load_preset("fig2"), {"params": {"dump_eigenvalues": False}}),
        {
            "name": "bulk_im_bound",
            "experiment": "bulk_im_bound",
            "n": big,
            "perturbation": {"kind": "diagonal", "values": FIG3_DIAGONAL},
            "params": {"epsilon": 0.6, "threshold": 0.9},
        },
        {
            "name": "overlap_wigner",
            "experiment": "overlap_wigner",
            "n": mid,
            "params": {"theta": 2.0, "threshold": 0.9, "overlap_tolerance": 0.08 if quick else 0.05},
        },
        {
            "name": "critical_points",
            "experiment": "critical_points",
            "n": big,
            "perturbation": {"kind": "diagonal", "values": FIG3_DIAGONAL},
            "params": {"threshold": 0.9, "ks_threshold": 0.08 if quick else 0.05},
        },
        {
            "name": "interlacing",
            "experiment": "interlacing",
            "n": 50,
            "trials": 100,
            "params": {"threshold": 1.0},
        },
        {
            "name": "nonreal_deterministic",
            "experiment": "nonreal_deterministic",
            "n": 50,
            "params": {"k": 3, "toeplitz_n": 5, "threshold": 1.0},
        },
        {
            "name": "global_law_wigner",
            "experiment": "global_law_wigner",
            "n": mid,
            "perturbation": {"kind": "diagonal", "values": FIG3_DIAGONAL},
            "params": {"ks_threshold": 0.08 if quick else 0.05},
        },
        {
            "name": "global_law_mp",
            "experiment": "global_law_mp",
            "ensemble": _covariance(mid),
            "perturbation": {"kind": "diagonal", "values": FIG5_DIAGONAL, "mode": "multiplicative"},
            "params": {"ks_threshold": 0.08 if quick else 0.05},
        },
        {
            "name": "isotropic_law",
            "experiment": "isotropic_law",
            "n": mid,
            "params": {"isotropic_tolerance": 0.2 if quick else 0.1},
        },
    ]
    logger.info(f"Built verify suite with {len(suite)} experiments (quick={quick})")
    return suite
