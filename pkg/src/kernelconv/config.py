"""Loading and validating JSON run configurations.

Structural checks use the bundled JSON schema; semantic checks (expression
parsing, shape parameters, index budgets) follow, and every failure is a
:class:`ValidationError` carrying a JSON-pointer path.
"""
from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Tuple

import jsonschema

from .errors import KernelConvError, ValidationError
from .grid import GridSpec
from .sequences import (DEFAULT_J_MAX, DEFAULT_WINDOW, ConstantTail, DomainSequenceSpec,
                        FunctionalTail, PeriodicTail)
from .shapes import shape_from_dict
from .sublevel import EPS_SUP, ScalarFieldSeq

DEFAULTS = {"band": 2, "seed": 42, "trials": 50}
_DATA = resources.files("kernelconv").joinpath("data")


def _schema() -> dict:
    return json.loads(_DATA.joinpath("config.schema.json").read_text())


def bundled_configs() -> list:
    return sorted(p.name for p in _DATA.iterdir()
                  if p.name.endswith(".json") and p.name != "config.schema.json")


@dataclass
class RunConfig:
    raw: dict
    grid: GridSpec
    sequence: Optional[DomainSequenceSpec] = None
    field_seq: Optional[ScalarFieldSeq] = None
    field_limit: Optional[Tuple[float, float]] = None
    field_track: Optional[tuple] = None
    params: dict = field(default_factory=dict)
    source: str = ""

    @property
    def digest(self) -> str:
        canonical = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path) if path else "/"


def _schema_error(err: jsonschema.ValidationError) -> ValidationError:
    path = list(err.absolute_path)
    if err.validator == "required":
        m = re.match(r"'([^']+)' is a required property", err.message)
        if m:
            path.append(m.group(1))
    elif err.validator == "additionalProperties":
        m = re.search(r"\('([^']+)'", err.message)
        if m:
            path.append(m.group(1))
        return ValidationError(_pointer(path), "unknown key")
    return ValidationError(_pointer(path), err.message)


def _at(path, fn, *args):
    try:
        return fn(*args)
    except ValidationError:
        raise
    except (KernelConvError, KeyError, TypeError, ValueError) as err:
        raise ValidationError(path, str(err)) from None


def _shape(d, path):
    return _at(path, shape_from_dict, d)


def _tail(d, path):
    kind = d["kind"]
    if kind == "constant":
        return ConstantTail(_shape(d["shape"], f"{path}/shape"))
    if kind == "periodic":
        shapes = tuple(_shape(s, f"{path}/shapes/{i}") for i, s in enumerate(d["shapes"]))
        return PeriodicTail(shapes)
    template = _shape(d["template"], f"{path}/template")
    return _at(path, FunctionalTail, template, d.get("j0", 1),
               d.get("j_max", DEFAULT_J_MAX), d.get("window", DEFAULT_WINDOW))


def parse_config(raw: dict, source: str = "") -> RunConfig:
    """Validate an already-decoded configuration object."""
    if not isinstance(raw, dict):
        raise ValidationError("/", "configuration must be a JSON object")
    validator = jsonschema.Draft202012Validator(_schema())
    errors = sorted(validator.iter_errors(raw), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        raise _schema_error(errors[0])

    g = raw["grid"]
    grid = _at("/grid", GridSpec, tuple(g["origin"]), tuple(g["extent"]), g["nx"], g["ny"])
    cfg = RunConfig(raw=raw, grid=grid, params={**DEFAULTS, **raw.get("params", {})}, source=source)

    if "sequence" in raw:
        s = raw["sequence"]
        prefix = tuple(_shape(p, f"/sequence/prefix/{i}") for i, p in enumerate(s.get("prefix", [])))
        tail = _tail(s["tail"], "/sequence/tail")
        cfg.sequence = _at("/sequence", DomainSequenceSpec, grid, prefix, tail,
                           tuple(s["point_track"]), tuple(s["declared_limit"]))
        _at("/sequence/declared_limit", grid.cell_of, cfg.sequence.declared_limit)

    if "field" in raw:
        f = raw["field"]
        cfg.field_seq = _at("/field", ScalarFieldSeq, f["expr"], f.get("j0", 1), f.get("j_max", 512),
                            f.get("window", 5), f.get("monotone_hint", "none"), f.get("eps_sup", EPS_SUP))
        cfg.field_limit = tuple(float(v) for v in f["limit"])
        _at("/field/limit", grid.cell_of, cfg.field_limit)
        if "point_track" in f:
            cfg.field_track = tuple(f["point_track"])

    params = cfg.params
    for key in ("candidate",):
        if key in params:
            _shape(params[key], f"/params/{key}")
    if "hausdorff" in params:
        _shape(params["hausdorff"]["reference"], "/params/hausdorff/reference")
    return cfg


def resolve_path(path) -> Path:
    """A filesystem path, falling back to a bundled configuration of that name."""
    p = Path(path)
    if p.exists():
        return p
    bundled = _DATA.joinpath(p.name)
    if bundled.is_file():
        return Path(str(bundled))
    raise ValidationError("/", f"configuration file not found: {path}")


def load_config(path) -> RunConfig:
    p = resolve_path(path)
    try:
        raw = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise ValidationError("/", f"invalid JSON at line {err.lineno} column {err.colno}: {err.msg}") from None
    return parse_config(raw, source=str(p))
