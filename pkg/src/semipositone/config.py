"""JSON scenario configs.

A config is one JSON object::

    {
      "domain":       {"bounds": [0, 1], "resolution": 257},
      "weight":       {"kind": "constant", "value": 1.0},
      "nonlinearity": {"family": "F1", "p": 0.5},
      "k":            1.0,
      "pipeline":     {"tag": "sublinear_c1", "delta": 0.25, "beta": null},
      "lambda":       {"value": 200.0},
      "tolerances":   {"tol": 1e-9, "max_iter": 10000, "cone": 1e-8, "residual": 1e-6},
      "output":       {"probe": [0.5], "csv": "sweep.csv", "profile": "solution.txt"}
    }

Shorthands: ``domain`` may be a bare ``[a, b]`` / ``[[a1, b1], [a2, b2]]``,
``pipeline`` a bare tag and ``lambda`` a number or a list.  The ``lambda``
object accepts ``value``, ``values``, ``range`` + ``count`` (geometric) and
``search`` + ``refine_steps`` (threshold search).  Missing entries take the
values in :data:`DEFAULTS`.
"""

import copy
import json
import math

import numpy as np

from .errors import ConfigurationError
from .estimator import DEFAULT_DELTA
from .experiments import REFINE_STEPS, Scenario
from .nonlinearity import Nonlinearity
from .weights import Weight

__all__ = ["DEFAULTS", "load_config", "parse_config", "dump_config", "scenario_to_config", "lambda_list"]

#: Every default in one place.  ``None`` means "derived": resolution from the
#: dimension, delta from the pipeline tag, beta = beta0, probe = midpoint.
DEFAULTS = {
    "resolution_1d": 257,
    "resolution_2d": [65, 65],
    "weight": {"kind": "constant", "value": 1.0},
    "delta": dict(DEFAULT_DELTA),
    "beta": None,
    "probe": None,
    "tol": 1e-9,
    "max_iter": 10_000,
    "cone": 1e-8,
    "residual": 1e-6,
    "sweep_count": 20,
    "refine_steps": REFINE_STEPS,
    "search": [1e-2, 1e6],
    "csv": "sweep.csv",
    "profile": "solution.txt",
}

TOP_KEYS = {"domain", "weight", "nonlinearity", "k", "pipeline", "lambda", "tolerances", "output"}


def _num(value, name):
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"{name} must be a number, got {value!r}") from None
    if not math.isfinite(out):
        raise ConfigurationError(f"{name} must be finite, got {value!r}")
    return out


def _domain(spec):
    if isinstance(spec, dict):
        bounds = spec.get("bounds")
        resolution = spec.get("resolution")
    else:
        bounds, resolution = spec, None
    if bounds is None:
        raise ConfigurationError("domain needs bounds")
    arr = np.asarray(bounds, dtype=float)
    if arr.shape == (2,):
        domain = (float(arr[0]), float(arr[1]))
        default = DEFAULTS["resolution_1d"]
    elif arr.shape == (2, 2):
        domain = tuple((float(a), float(b)) for a, b in arr)
        default = tuple(DEFAULTS["resolution_2d"])
    else:
        raise ConfigurationError(f"cannot interpret domain bounds {bounds!r}")
    for a, b in np.reshape(arr, (-1, 2)):
        if not a < b:
            raise ConfigurationError(f"degenerate interval ({a}, {b})")
    if resolution is None:
        resolution = default
    elif isinstance(resolution, (list, tuple)):
        resolution = tuple(int(r) for r in resolution)
    else:
        resolution = int(resolution)
    return domain, resolution


def parse_config(cfg):
    """Validate a config dict; return ``(Scenario, run_options)``."""
    if not isinstance(cfg, dict):
        raise ConfigurationError("config must be a JSON object")
    unknown = set(cfg) - TOP_KEYS
    if unknown:
        raise ConfigurationError(f"unknown config keys {sorted(unknown)}")
    for key in ("domain", "nonlinearity", "k"):
        if key not in cfg:
            raise ConfigurationError(f"config is missing {key!r}")
    domain, resolution = _domain(cfg["domain"])
    weight = Weight.from_dict(cfg.get("weight", DEFAULTS["weight"]))
    nl = cfg["nonlinearity"]
    if not isinstance(nl, dict):
        raise ConfigurationError("nonlinearity must be an object")
    try:
        f = Nonlinearity(**nl)
    except TypeError as exc:
        raise ConfigurationError(f"bad nonlinearity spec: {exc}") from None
    k = _num(cfg["k"], "k")
    if k < 0:
        raise ConfigurationError(f"k must be >= 0, got {k}")
    pipe = cfg.get("pipeline")
    if pipe is None or isinstance(pipe, str):
        pipe = {"tag": pipe}
    if not isinstance(pipe, dict):
        raise ConfigurationError("pipeline must be a tag or an object")
    tol = cfg.get("tolerances", {})
    out = cfg.get("output", {})
    probe = out.get("probe", DEFAULTS["probe"])
    scenario = Scenario(
        domain=domain,
        weight=weight,
        nonlinearity=f,
        k=k,
        pipeline=pipe.get("tag"),
        resolution=resolution,
        delta=None if pipe.get("delta") is None else _num(pipe["delta"], "delta"),
        beta=None if pipe.get("beta") is None else _num(pipe["beta"], "beta"),
        probe=None if probe is None else tuple(float(v) for v in np.atleast_1d(probe)),
        tol=_num(tol.get("tol", DEFAULTS["tol"]), "tol"),
        max_iter=int(tol.get("max_iter", DEFAULTS["max_iter"])),
        cone_tol=_num(tol.get("cone", DEFAULTS["cone"]), "cone"),
        residual_tol=_num(tol.get("residual", DEFAULTS["residual"]), "residual"),
    )
    # fail early on inconsistent pipeline / nonlinearity pairs
    scenario.estimator()._validate_params()
    options = {
        "lambda": _lambda_spec(cfg.get("lambda")),
        "csv": out.get("csv", DEFAULTS["csv"]),
        "profile": out.get("profile", DEFAULTS["profile"]),
    }
    return scenario, options


def _lambda_spec(spec):
    if spec is None:
        return {}
    if isinstance(spec, (int, float)):
        spec = {"value": spec}
    elif isinstance(spec, list):
        spec = {"values": spec}
    if not isinstance(spec, dict):
        raise ConfigurationError(f"cannot interpret lambda spec {spec!r}")
    spec = copy.deepcopy(spec)
    for key in ("value",):
        if key in spec:
            spec[key] = _num(spec[key], "lambda")
    for key in ("values", "range", "search"):
        if key in spec:
            spec[key] = [_num(v, "lambda") for v in spec[key]]
    return spec


def lambda_list(spec):
    """Explicit λ values of a sweep spec."""
    if "values" in spec:
        vals = spec["values"]
    elif "range" in spec:
        lo, hi = spec["range"]
        vals = np.geomspace(lo, hi, int(spec.get("count", DEFAULTS["sweep_count"]))).tolist()
    elif "value" in spec:
        vals = [spec["value"]]
    else:
        raise ConfigurationError("sweep needs lambda 'values', 'range' or 'value'")
    if not vals or any(v <= 0 for v in vals):
        raise ConfigurationError("lambda values must be > 0")
    return [float(v) for v in vals]


def load_config(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from None
    return cfg


def scenario_to_config(s, options=None):
    """Fully explicit config dict for ``s`` (the inverse of :func:`parse_config`)."""
    options = options or {}
    domain = list(s.domain) if np.ndim(s.domain) == 1 else [list(b) for b in s.domain]
    res = list(s.resolution) if isinstance(s.resolution, tuple) else s.resolution
    cfg = {
        "domain": {"bounds": domain, "resolution": res},
        "weight": s.weight.to_dict(),
        "nonlinearity": s.nonlinearity.to_dict(),
        "k": s.k,
        "pipeline": {"tag": s.pipeline, "delta": s.delta, "beta": s.beta},
        "tolerances": {"tol": s.tol, "max_iter": s.max_iter, "cone": s.cone_tol, "residual": s.residual_tol},
        "output": {
            "probe": None if s.probe is None else list(s.probe),
            "csv": options.get("csv", DEFAULTS["csv"]),
            "profile": options.get("profile", DEFAULTS["profile"]),
        },
    }
    if options.get("lambda"):
        cfg["lambda"] = options["lambda"]
    return cfg


def dump_config(s, options=None):
    return json.dumps(scenario_to_config(s, options), indent=2, sort_keys=True)
