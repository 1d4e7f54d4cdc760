"""Experiment configs: one flat JSON object per experiment.

Every config has ``kind`` plus the optional common keys ``seed``,
``output`` and ``format``; all other keys are parameters of the kind.
Unknown keys and out-of-range values raise :class:`ConfigError` naming
the offending key.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from numbers import Integral, Real
from pathlib import Path

DEFAULT_SEED = 1729
SEED_LIMIT = 1 << 64


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


@dataclass(frozen=True)
class Param:
    type: str  # "int", "float", "str", "ints"
    default: object = None
    lo: float | None = None
    hi: float | None = None
    lo_open: bool = False
    choices: tuple | None = None
    doc: str = ""

    def check(self, key: str, v):
        if self.type == "str":
            if not isinstance(v, str):
                raise ConfigError("expected a string", key)
            if self.choices and v not in self.choices:
                raise ConfigError(f"must be one of {', '.join(self.choices)}", key)
            return v
        if self.type == "ints":
            if not isinstance(v, list) or not v:
                raise ConfigError("expected a non-empty list of integers", key)
            return tuple(Param("int", lo=self.lo, hi=self.hi).check(key, e) for e in v)
        if isinstance(v, bool) or not isinstance(v, Real):
            raise ConfigError(f"expected a number, got {v!r}", key)
        if self.type == "int":
            if not isinstance(v, Integral):
                if isinstance(v, float) and v.is_integer():
                    v = int(v)
                else:
                    raise ConfigError(f"expected an integer, got {v!r}", key)
            v = int(v)
        else:
            v = float(v)
            if not math.isfinite(v):
                raise ConfigError("must be finite", key)
        if self.lo is not None and (v < self.lo or (self.lo_open and v == self.lo)):
            op = ">" if self.lo_open else ">="
            raise ConfigError(f"must be {op} {self.lo}, got {v}", key)
        if self.hi is not None and v > self.hi:
            raise ConfigError(f"must be <= {self.hi}, got {v}", key)
        return v


BASEPOINTS = ("identity", "generic")

SCHEMA: dict[str, dict[str, Param]] = {
    "horocycle": {
        "T": Param("float", 10.0, 0, 1e6, lo_open=True, doc="horocycle length"),
        "nodes": Param("int", None, 8, 10_000_000, doc="sample points; default max(64, 8T)"),
        "basepoint": Param("str", "generic", choices=BASEPOINTS),
        "suite_n": Param("int", 1_000_000, 10_000, 10_000_000, doc="reference sample size"),
    },
    "sparse-horocycle": {
        "gamma": Param("float", 0.0, 0.0, 1.0, doc="time exponent is 1 + gamma"),
        "N": Param("int", 1000, 1, 10_000_000),
        "basepoint": Param("str", "identity", choices=BASEPOINTS),
        "suite_n": Param("int", 1_000_000, 10_000, 10_000_000),
    },
    "rational-horocycle": {
        "q": Param("int", 97, 1, 1_000_000),
        "y": Param("float", None, 0, 1e6, lo_open=True, doc="height; default 1/q"),
        "suite_n": Param("int", 1_000_000, 10_000, 10_000_000),
    },
    "hecke-orbit": {
        "n": Param("int", 11, 1, 10_000),
        "x": Param("float", 0.0, -1e6, 1e6),
        "y": Param("float", 1.0, 0, 1e6, lo_open=True),
        "suite_n": Param("int", 1_000_000, 10_000, 10_000_000),
    },
    "matrix-coefficient": {
        "t": Param("float", 4.0, 0.0, 30.0),
        "n": Param("int", 200_000, 10_000, 10_000_000),
        "center_x": Param("float", 0.0, -0.5, 0.5),
        "center_y": Param("float", 2.0, 0.9, 1e3),
        "radius": Param("float", 0.2, 0, 1.0, lo_open=True),
    },
    "eisenstein-check": {
        "samples": Param("int", 20, 1, 10_000),
        "tol": Param("float", 1e-8, 0, 1, lo_open=True),
    },
    "fourier-coeff": {
        "n_max": Param("int", 10, 1, 500),
        "tol": Param("float", 1e-6, 0, 1, lo_open=True),
    },
    "twisted-period": {
        "q": Param("int", 5, 3, 1000),
        "index": Param("int", None, 1, 999, doc="character index; default quadratic"),
        "s_re": Param("float", 3.0, 1.5, 50.0, lo_open=True),
        "s_im": Param("float", 0.0, -50.0, 50.0),
        "N": Param("int", 10_000, 100, 1_000_000, doc="series terms"),
        "tol": Param("float", 1e-4, 0, 1, lo_open=True),
    },
    "rankin-selberg": {
        "s_re": Param("float", 2.0, -50.0, 50.0),
        "s_im": Param("float", 0.0, -50.0, 50.0),
        "mc_n": Param("int", 1_000_000, 100_000, 100_000_000),
        "N": Param("int", 10_000, 100, 1_000_000, doc="series terms for the oracle"),
    },
    "heegner": {
        "discriminants": Param("ints", [-23, -2003, -20003], -10_000_000, -3),
        "suite_n": Param("int", 1_000_000, 10_000, 10_000_000),
    },
    "heegner-sparse": {
        "D": Param("int", -2003, -10_000_000, -3),
        "index": Param("int", 3, 1, 10_000, doc="subgroup index"),
        "delta": Param("float", 0.25, 0, 2.0, lo_open=True),
        "suite_n": Param("int", 1_000_000, 10_000, 10_000_000),
    },
    "amplifier": {
        "K": Param("ints", [20, 50], 2, 2000),
    },
}

COMMON = {
    "kind": Param("str", None, choices=tuple(SCHEMA)),
    "seed": Param("int", DEFAULT_SEED, 0, SEED_LIMIT - 1),
    "output": Param("str", None),
    "format": Param("str", "json", choices=("json", "csv")),
}


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    params: tuple  # sorted (key, value) pairs, defaults filled in
    seed: int = DEFAULT_SEED
    output: str | None = None
    format: str = "json"

    def __getitem__(self, key):
        return dict(self.params)[key]

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    def with_seed(self, seed: int) -> "ExperimentConfig":
        seed = COMMON["seed"].check("seed", seed)
        return ExperimentConfig(self.kind, self.params, seed, self.output, self.format)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "seed": self.seed}
        if self.output is not None:
            out["output"] = self.output
        out["format"] = self.format
        for k, v in self.params:
            if v is not None:
                out[k] = list(v) if isinstance(v, tuple) else v
        return out


def parse_config(data) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    if "kind" not in data:
        raise ConfigError("missing required key", "kind")
    kind = COMMON["kind"].check("kind", data["kind"])
    schema = SCHEMA[kind]
    for key in data:
        if key not in schema and key not in COMMON:
            raise ConfigError(f"unknown key for kind {kind!r}", key)
    common = {}
    for key in ("seed", "output", "format"):
        p = COMMON[key]
        common[key] = p.check(key, data[key]) if key in data and data[key] is not None else p.default
    params = {}
    for key, p in schema.items():
        v = data.get(key)
        params[key] = p.check(key, v) if v is not None else (tuple(p.default) if isinstance(p.default, list) else p.default)
    _cross_checks(kind, params)
    return ExperimentConfig(kind, tuple(sorted(params.items())), **common)


def _cross_checks(kind: str, p: dict):
    from ..hecke import is_prime

    if kind == "twisted-period":
        if not is_prime(p["q"]):
            raise ConfigError(f"modulus must be prime, got {p['q']}", "q")
        if p["index"] is not None and p["index"] % (p["q"] - 1) == 0:
            raise ConfigError("index selects the principal character", "index")
    if kind == "rankin-selberg":
        s = complex(p["s_re"], p["s_im"])
        if abs(s) < 1e-3 or abs(s - 1) < 1e-3:
            raise ConfigError("s is too close to a pole of E*", "s_re")


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    text = path.read_text()  # FileNotFoundError carries the path
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from e
    return parse_config(data)
