"""Scenario documents: parsing, validation and re-emission.

A scenario is one JSON object::

    {
      "units": "natural",
      "laser": {"hbar": 1, "k0": 1, "intensity": 0.5},
      "mechanics": {"type": "damped_harmonic", "mass": 1, "omega_m": 0.001, "gamma": 0.001},
      "port_b": {"type": "vacuum"},
      "extra_force": {"type": "zero"},
      "filter": {"type": "gaussian", "omega_s": 1, "sigma": 0.02},
      "strategies": ["sql", {"name": "caves", "K": 10}, "per_frequency", "broadband"],
      "grid": {"min": 0.5, "max": 2, "count": 101, "scale": "log"},
      "sweep": {"path": "laser.intensity", "min": 0.01, "max": 100, "count": 61,
                "scale": "log", "quantity": "noise"},
      "options": {"r_max": 12, "rtol": 1e-8, "eps_feas": 1e-9}
    }

In natural units ``c = 1`` and ``hbar`` defaults to 1; in SI units ``hbar``
defaults to its physical value and the laser is given by ``omega0``.
"""
import copy
from dataclasses import dataclass, field
import json
import math

import numpy as np

from .bandavg import filter_from_dict
from .errors import ConfigError
from .mechanics import susceptibility_from_dict
from .noise import C_SI, HBAR_SI, LaserParams, force_from_dict
from .optimize import R_MAX
from .quadrature import MAX_EVALS, RTOL
from .spectra import EPS_FEAS, spectra_from_dict

STRATEGIES = ("sql", "caves", "per_frequency", "broadband")
SWEEP_QUANTITIES = ("noise",) + STRATEGIES


@dataclass(frozen=True)
class Grid:
    min: float
    max: float
    count: int
    scale: str = "lin"

    def __post_init__(self):
        if not (math.isfinite(self.min) and self.min > 0):
            raise ConfigError(f"must be finite and > 0, got {self.min!r}", "grid.min")
        if not (math.isfinite(self.max) and self.max >= self.min):
            raise ConfigError("must be finite and >= grid.min", "grid.max")
        if not (isinstance(self.count, int) and self.count >= 2):
            raise ConfigError(f"must be an integer >= 2, got {self.count!r}", "grid.count")
        if self.scale not in ("lin", "log"):
            raise ConfigError("must be 'lin' or 'log'", "grid.scale")

    def values(self):
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)

    @classmethod
    def parse(cls, text):
        """From ``min:max:count[:lin|log]``."""
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise ConfigError("expected min:max:count[:lin|log]", "grid")
        try:
            return cls(float(parts[0]), float(parts[1]), int(parts[2]),
                       parts[3] if len(parts) == 4 else "lin")
        except ValueError as exc:
            raise ConfigError(str(exc), "grid") from None

    @classmethod
    def from_dict(cls, cfg, path="grid"):
        if not isinstance(cfg, dict):
            raise ConfigError("expected an object", path)
        try:
            count = cfg["count"]
            if isinstance(count, float) and count.is_integer():
                count = int(count)
            return cls(float(cfg["min"]), float(cfg["max"]), count, cfg.get("scale", "lin"))
        except KeyError as exc:
            raise ConfigError(f"missing field {exc.args[0]!r}", path) from None

    def to_dict(self):
        return {"min": self.min, "max": self.max, "count": self.count, "scale": self.scale}


@dataclass(frozen=True)
class Strategy:
    name: str
    K: float = 1.0

    def to_dict(self):
        if self.name == "caves":
            return {"name": self.name, "K": self.K}
        return {"name": self.name}


@dataclass(frozen=True)
class Options:
    r_max: float = R_MAX
    rtol: float = RTOL
    eps_feas: float = EPS_FEAS
    max_evals: int = MAX_EVALS


@dataclass(frozen=True)
class Scenario:
    units: str
    laser: LaserParams
    mechanics: object
    port_b: object
    extra_force: object
    filter: object
    strategies: tuple = ()
    grid: Grid = None
    sweep: dict = None
    options: Options = field(default_factory=Options)

    def to_dict(self):
        if self.units == "natural":
            laser = {"hbar": self.laser.hbar, "k0": self.laser.k0}
        else:
            laser = {"hbar": self.laser.hbar, "omega0": self.laser.omega0, "c": self.laser.c}
        if self.laser.intensity is not None:
            laser["intensity"] = self.laser.intensity
        out = {
            "units": self.units,
            "laser": laser,
            "mechanics": self.mechanics.to_dict(),
            "port_b": self.port_b.to_dict(),
            "extra_force": self.extra_force.to_dict(),
            "filter": self.filter.to_dict(),
            "strategies": [s.to_dict() for s in self.strategies],
            "options": {"r_max": self.options.r_max, "rtol": self.options.rtol,
                        "eps_feas": self.options.eps_feas,
                        "max_evals": self.options.max_evals},
        }
        if self.grid is not None:
            out["grid"] = self.grid.to_dict()
        if self.sweep is not None:
            out["sweep"] = dict(self.sweep)
        return out


def _laser(cfg, units):
    if not isinstance(cfg, dict):
        raise ConfigError("expected an object", "laser")
    try:
        intensity = cfg.get("intensity")
        intensity = None if intensity is None else float(intensity)
        if units == "natural":
            return LaserParams.natural(float(cfg.get("k0", 1.0)), intensity,
                                       float(cfg.get("hbar", 1.0)))
        return LaserParams(float(cfg.get("hbar", HBAR_SI)), float(cfg["omega0"]),
                           float(cfg.get("c", C_SI)), intensity)
    except KeyError as exc:
        raise ConfigError(f"missing field {exc.args[0]!r}", "laser") from None
    except ConfigError as exc:
        raise ConfigError(str(exc), "laser") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), "laser") from None


def _strategies(cfg):
    if cfg is None:
        return tuple(Strategy(n) for n in STRATEGIES)
    if not isinstance(cfg, list):
        raise ConfigError("expected a list", "strategies")
    out = []
    for i, item in enumerate(cfg):
        path = f"strategies[{i}]"
        if isinstance(item, str):
            item = {"name": item}
        if not isinstance(item, dict) or item.get("name") not in STRATEGIES:
            raise ConfigError(f"expected one of {', '.join(STRATEGIES)}", path)
        K = item.get("K", 1.0)
        if item["name"] == "caves" and not (isinstance(K, (int, float)) and K > 0):
            raise ConfigError("K must be a number > 0", f"{path}.K")
        out.append(Strategy(item["name"], float(K)))
    return tuple(out)


def _sweep(cfg):
    if cfg is None:
        return None
    if not isinstance(cfg, dict) or "path" not in cfg:
        raise ConfigError("expected an object with a 'path' field", "sweep")
    quantity = cfg.get("quantity", "noise")
    if quantity not in SWEEP_QUANTITIES:
        raise ConfigError(f"expected one of {', '.join(SWEEP_QUANTITIES)}",
                          "sweep.quantity")
    grid = Grid.from_dict(cfg, "sweep")
    return {"path": str(cfg["path"]), "quantity": quantity, **grid.to_dict()}


def _options(cfg):
    if cfg is None:
        return Options()
    if not isinstance(cfg, dict):
        raise ConfigError("expected an object", "options")
    unknown = set(cfg) - {"r_max", "rtol", "eps_feas", "max_evals"}
    if unknown:
        raise ConfigError(f"unknown option(s) {sorted(unknown)}", "options")
    opts = Options(float(cfg.get("r_max", R_MAX)), float(cfg.get("rtol", RTOL)),
                   float(cfg.get("eps_feas", EPS_FEAS)), int(cfg.get("max_evals", MAX_EVALS)))
    if not (opts.r_max > 0 and opts.rtol > 0 and opts.eps_feas >= 0 and opts.max_evals >= 30):
        raise ConfigError("r_max, rtol must be > 0, eps_feas >= 0, max_evals >= 30",
                          "options")
    return opts


def scenario_from_dict(cfg):
    if not isinstance(cfg, dict):
        raise ConfigError("scenario must be a JSON object")
    known = {"units", "laser", "mechanics", "port_b", "extra_force", "filter",
             "strategies", "grid", "sweep", "options", "output"}
    unknown = set(cfg) - known
    if unknown:
        raise ConfigError(f"unknown field(s) {sorted(unknown)}")
    units = cfg.get("units", "si")
    if units not in ("natural", "si"):
        raise ConfigError("must be 'natural' or 'si'", "units")
    for required in ("laser", "mechanics", "filter"):
        if required not in cfg:
            raise ConfigError("missing", required)
    return Scenario(
        units=units,
        laser=_laser(cfg["laser"], units),
        mechanics=susceptibility_from_dict(cfg["mechanics"]),
        port_b=spectra_from_dict(cfg.get("port_b", {"type": "vacuum"})),
        extra_force=force_from_dict(cfg.get("extra_force")),
        filter=filter_from_dict(cfg["filter"]),
        strategies=_strategies(cfg.get("strategies")),
        grid=None if cfg.get("grid") is None else Grid.from_dict(cfg["grid"]),
        sweep=_sweep(cfg.get("sweep")),
        options=_options(cfg.get("options")),
    )


def load_scenario(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read scenario: {exc.strerror}", str(path)) from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}", str(path)) from None
    return cfg


def set_path(cfg, path, value):
    """Copy of ``cfg`` with the scalar at dotted ``path`` replaced.

    List items are addressed by index or, for strategies, by name
    (``strategies.caves.K``).
    """
    out = copy.deepcopy(cfg)
    keys = path.split(".")
    node = out
    for i, key in enumerate(keys):
        last = i == len(keys) - 1
        where = ".".join(keys[:i + 1])
        if isinstance(node, list):
            idx = _list_index(node, key, where)
            if last:
                _require_scalar(node[idx], where)
                node[idx] = value
                return out
            if isinstance(node[idx], str):
                node[idx] = {"name": node[idx]}
            node = node[idx]
        elif isinstance(node, dict):
            if last:
                if key in node:
                    _require_scalar(node[key], where)
                elif not _settable_default(keys):
                    raise ConfigError("no such field", where)
                node[key] = value
                return out
            if key not in node:
                raise ConfigError("no such field", where)
            node = node[key]
        else:
            raise ConfigError("path descends into a scalar", where)
    raise ConfigError("empty sweep path", "sweep.path")


def _settable_default(keys):
    # optional scalars that may be absent from the document
    return tuple(keys) in {("laser", "intensity"), ("laser", "hbar"), ("laser", "k0")} or (
        len(keys) == 3 and keys[0] == "strategies" and keys[2] == "K")


def _list_index(node, key, where):
    if key.isdigit() and int(key) < len(node):
        return int(key)
    for j, item in enumerate(node):
        name = item if isinstance(item, str) else (item or {}).get("name")
        if name == key:
            return j
    raise ConfigError("no such list item", where)


def _require_scalar(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError("sweep path must address a numeric scalar", where)
