"""Scenario files: strict JSON documents with a versioned schema field."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import forces as fm
from .pointsys import ParticleCloud, random_cloud

SCHEMA = "granex/1"
MODES = ("fit", "simulate", "closure", "dist")


class ConfigError(ValueError):
    """Malformed or invalid scenario document."""


@dataclass
class Integration:
    dt: float = 1e-3
    steps: int = 1000


@dataclass
class ClosureConfig:
    model: str = "isotropic"  # "isotropic" | "zero"
    mu: float = 1.0
    pseudo_rigid: bool = False
    init: dict = field(default_factory=dict)


@dataclass
class ScenarioConfig:
    mode: str
    schema: str = SCHEMA
    seed: int = 0
    cloud: dict | None = None
    forces: list = field(default_factory=list)
    integration: Integration = field(default_factory=Integration)
    closure: ClosureConfig | None = None
    distributions: list = field(default_factory=list)
    histogram: dict | None = None
    roots: bool = False
    fit: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    base_dir: str = field(default=".", repr=False, compare=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("base_dir")
        return {k: v for k, v in d.items() if v is not None}


_TOP = {"schema", "mode", "seed", "cloud", "forces", "integration", "closure", "distributions",
        "histogram", "roots", "fit", "output"}
_CLOUD = {"particles", "csv", "sample"}
_PARTICLE = {"mass", "position", "velocity"}
_SAMPLE = {"n", "seed", "spread", "speed"}
_FORCE = {
    "uniform": {"type", "g"},
    "trap": {"type", "stiffness", "center"},
    "spring": {"type", "pairs", "stiffness", "rest_length", "damping"},
}
_INTEGRATION = {"dt", "steps"}
_CLOSURE = {"model", "mu", "pseudo_rigid", "init"}
_INIT = {"x", "v", "G", "B", "Y", "H"}
_DIST = {"name", "params", "table"}
_HIST = {"delta", "energies", "masses"}
_FIT = {"G"}
_OUTPUT = {"dir"}


def _strict(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(map(repr, unknown))}")


def validate(doc: dict) -> None:
    _strict(doc, _TOP, "scenario")
    if doc.get("schema", SCHEMA) != SCHEMA:
        raise ConfigError(f"schema: expected {SCHEMA!r}, got {doc.get('schema')!r}")
    if doc.get("mode") not in MODES:
        raise ConfigError(f"mode: must be one of {', '.join(MODES)}")
    cloud = doc.get("cloud")
    if cloud is not None:
        _strict(cloud, _CLOUD, "cloud")
        if len(cloud) != 1:
            raise ConfigError("cloud: give exactly one of 'particles', 'csv', 'sample'")
        for i, p in enumerate(cloud.get("particles", [])):
            _strict(p, _PARTICLE, f"cloud.particles[{i}]")
        if "sample" in cloud:
            _strict(cloud["sample"], _SAMPLE, "cloud.sample")
    for i, f in enumerate(doc.get("forces", [])):
        kind = f.get("type") if isinstance(f, dict) else None
        if kind not in _FORCE:
            raise ConfigError(f"forces[{i}].type: must be one of {', '.join(_FORCE)}")
        _strict(f, _FORCE[kind], f"forces[{i}]")
    integ = doc.get("integration", {})
    _strict(integ, _INTEGRATION, "integration")
    if not float(integ.get("dt", 1.0)) > 0.0:
        raise ConfigError("integration.dt: dt must be positive")
    if int(integ.get("steps", 1)) < 1:
        raise ConfigError("integration.steps: steps must be at least 1")
    if doc.get("closure") is not None:
        _strict(doc["closure"], _CLOSURE, "closure")
        _strict(doc["closure"].get("init", {}), _INIT, "closure.init")
        if doc["closure"].get("model", "isotropic") not in ("isotropic", "zero"):
            raise ConfigError("closure.model: must be 'isotropic' or 'zero'")
    for i, d in enumerate(doc.get("distributions", [])):
        _strict(d, _DIST, f"distributions[{i}]")
    if doc.get("histogram") is not None:
        _strict(doc["histogram"], _HIST, "histogram")
        if not float(doc["histogram"].get("delta", 0.1)) > 0.0:
            raise ConfigError("histogram.delta: delta must be positive")
    _strict(doc.get("fit", {}), _FIT, "fit")
    _strict(doc.get("output", {}), _OUTPUT, "output")
    mode = doc["mode"]
    if mode in ("fit", "simulate") and cloud is None:
        raise ConfigError(f"cloud: required in {mode} mode")


def from_dict(doc: dict, base_dir=".") -> ScenarioConfig:
    validate(doc)
    d = dict(doc)
    d.setdefault("schema", SCHEMA)
    d["integration"] = Integration(**d.get("integration", {}))
    d["integration"].dt = float(d["integration"].dt)
    d["integration"].steps = int(d["integration"].steps)
    if d.get("closure") is not None:
        d["closure"] = ClosureConfig(**d["closure"])
    if d.get("histogram") is not None:
        d["histogram"] = {"delta": 0.1, **d["histogram"]}
    cfg = ScenarioConfig(**d)
    cfg.base_dir = str(base_dir)
    cloud = cfg.cloud or {}
    if "csv" in cloud and not (Path(base_dir) / cloud["csv"]).is_file():
        raise ConfigError(f"cloud.csv: file not found: {cloud['csv']}")
    return cfg


def parse_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        return from_dict(doc, path.parent)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: {exc}") from exc


def write_config(cfg: ScenarioConfig, path) -> None:
    Path(path).write_text(json.dumps(cfg.to_dict(), indent=2) + "\n", encoding="utf-8")


def build_cloud(cfg: ScenarioConfig) -> ParticleCloud | None:
    c = cfg.cloud
    if c is None:
        return None
    if "particles" in c:
        ps = c["particles"]
        return ParticleCloud([p["mass"] for p in ps], [p["position"] for p in ps],
                             [p["velocity"] for p in ps])
    if "csv" in c:
        with open(Path(cfg.base_dir) / c["csv"], newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        arr = np.array([[float(r[k]) for k in ("mass", "x", "y", "z", "vx", "vy", "vz")] for r in rows])
        return ParticleCloud(arr[:, 0], arr[:, 1:4], arr[:, 4:7])
    s = c["sample"]
    rng = np.random.default_rng(int(s.get("seed", cfg.seed)))
    return random_cloud(rng, int(s["n"]), float(s.get("spread", 1.0)), float(s.get("speed", 1.0)))


def build_forces(cfg: ScenarioConfig) -> list:
    out = []
    for f in cfg.forces:
        kind = f["type"]
        if kind == "uniform":
            out.append(fm.UniformField(f["g"]))
        elif kind == "trap":
            out.append(fm.QuadraticTrap(f["stiffness"], f.get("center", [0.0, 0.0, 0.0])))
        else:
            out.append(fm.PairSpring([tuple(p) for p in f["pairs"]], float(f["stiffness"]),
                                     float(f.get("rest_length", 0.0)), float(f.get("damping", 0.0))))
    return out
