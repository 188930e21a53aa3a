"""Run configuration: a flat JSON document selecting the space, intensity,
Monte Carlo and quadrature controls, check suites and the declared event
family.

Schema (config_version 1), all keys at fixed nesting:

  space:  {dimension: int, sides: [float...], mass: float,
           quad_mode: "mc" | "midpoint" (optional)}
  intensity: float
  mc:     {n_outer: int, seed: int, ci_level: float,
           n_shards: int (opt), workers: int (opt)}
  quad:   {n_sigma_samples: int, seed: int}
  suites: [suite name...]
  events: [{kind: "count", lower: [...], upper: [...],
            relation: "="|">="|"<=", k: int}
           | {kind: "linear", f: catalogue name, threshold: float}]
  out_dir: path (optional, overridable on the command line)

The environment variable POISSONCALC_SEED overrides mc.seed when set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .estimates import McSpec
from .events import EventSet, count_event, linear_event
from .space import PointSpace, QuadSpec, Region, build_box_space

CONFIG_VERSION = 1

SUITES = ("identities", "kernels", "boundaries", "coarea", "margulis_russo",
          "deviation", "profiles", "inequalities", "clark")

SEED_ENV_VAR = "POISSONCALC_SEED"

LINEAR_CATALOGUE = {
    "one": (lambda x: 1.0, "+"),
    "coord_sum": (lambda x: float(np.sum(x)), "+"),
    "neg_coord_sum": (lambda x: -float(np.sum(x)), "-"),
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    space: PointSpace
    lam: float
    mc: McSpec
    quad: QuadSpec
    suites: tuple[str, ...]
    events: tuple[EventSet, ...]
    out_dir: str
    raw: dict


def default_config() -> dict:
    """Bundled defaults: unit-mass interval, unit intensity, every suite, and
    a twelve-event count family with probabilities between 0.02 and 0.45."""
    events = [
        {"kind": "count", "lower": [0.0], "upper": [1.0], "relation": "=", "k": 0},
        {"kind": "count", "lower": [0.0], "upper": [1.0], "relation": "=", "k": 1},
        {"kind": "count", "lower": [0.0], "upper": [1.0], "relation": "=", "k": 2},
        {"kind": "count", "lower": [0.0], "upper": [1.0], "relation": "=", "k": 3},
        {"kind": "count", "lower": [0.0], "upper": [1.0], "relation": ">=", "k": 2},
        {"kind": "count", "lower": [0.0], "upper": [1.0], "relation": ">=", "k": 3},
        {"kind": "count", "lower": [0.0], "upper": [0.5], "relation": ">=", "k": 1},
        {"kind": "count", "lower": [0.0], "upper": [0.5], "relation": "=", "k": 1},
        {"kind": "count", "lower": [0.0], "upper": [0.5], "relation": ">=", "k": 2},
        {"kind": "count", "lower": [0.0], "upper": [0.25], "relation": ">=", "k": 1},
        {"kind": "count", "lower": [0.0], "upper": [0.25], "relation": "=", "k": 1},
        {"kind": "count", "lower": [0.0], "upper": [0.25], "relation": ">=", "k": 2},
    ]
    return {
        "config_version": CONFIG_VERSION,
        "space": {"dimension": 1, "sides": [1.0], "mass": 1.0},
        "intensity": 1.0,
        "mc": {"n_outer": 100000, "seed": 42, "ci_level": 0.95,
               "n_shards": 8, "workers": 1},
        "quad": {"n_sigma_samples": 64, "seed": 7},
        "suites": list(SUITES),
        "events": events,
        "out_dir": "reports",
    }


def _require(d: dict, key: str, where: str):
    if key not in d:
        raise ConfigError(f"missing key {key!r} in {where}")
    return d[key]


def event_from_decl(space: PointSpace, decl: dict) -> EventSet:
    kind = _require(decl, "kind", "event declaration")
    if kind == "count":
        region = Region(tuple(float(v) for v in _require(decl, "lower", "count event")),
                        tuple(float(v) for v in _require(decl, "upper", "count event")))
        return count_event(space, region,
                           _require(decl, "relation", "count event"),
                           int(_require(decl, "k", "count event")))
    if kind == "linear":
        name = _require(decl, "f", "linear event")
        if name not in LINEAR_CATALOGUE:
            raise ConfigError(f"unknown linear functional {name!r}; "
                              f"catalogue: {sorted(LINEAR_CATALOGUE)}")
        f, sign = LINEAR_CATALOGUE[name]
        return linear_event(f, float(_require(decl, "threshold", "linear event")),
                            sign=sign, label=name)
    raise ConfigError(f"unknown event kind {kind!r}")


def parse_config(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    version = doc.get("config_version", CONFIG_VERSION)
    if version != CONFIG_VERSION:
        raise ConfigError(f"unsupported config_version {version}")
    space_doc = _require(doc, "space", "config")
    try:
        space = build_box_space(int(_require(space_doc, "dimension", "space")),
                                _require(space_doc, "sides", "space"),
                                float(_require(space_doc, "mass", "space")))
    except ValueError as err:
        raise ConfigError(f"bad space: {err}") from err
    lam = float(_require(doc, "intensity", "config"))
    if lam < 0:
        raise ConfigError("intensity must be non-negative")
    mc_doc = _require(doc, "mc", "config")
    try:
        mc = McSpec(int(_require(mc_doc, "n_outer", "mc")),
                    int(_require(mc_doc, "seed", "mc")),
                    float(mc_doc.get("ci_level", 0.95)),
                    int(mc_doc.get("n_shards", 8)),
                    int(mc_doc.get("workers", 1)))
    except ValueError as err:
        raise ConfigError(f"bad mc spec: {err}") from err
    quad_doc = _require(doc, "quad", "config")
    try:
        quad = QuadSpec(int(_require(quad_doc, "n_sigma_samples", "quad")),
                        int(quad_doc.get("seed", 0)),
                        space_doc.get("quad_mode", "mc"))
    except ValueError as err:
        raise ConfigError(f"bad quad spec: {err}") from err
    suites = tuple(_require(doc, "suites", "config"))
    if not suites:
        raise ConfigError("at least one suite must be selected")
    for s in suites:
        if s not in SUITES:
            raise ConfigError(f"unknown suite {s!r}; available: {SUITES}")
    events = tuple(event_from_decl(space, decl)
                   for decl in doc.get("events", []))
    return RunConfig(space, lam, mc, quad, suites, events,
                     str(doc.get("out_dir", "reports")), doc)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(
            f"malformed config {path}: line {err.lineno}, column {err.colno}: "
            f"{err.msg}") from err
    return parse_config(doc)
