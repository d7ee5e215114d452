"""JSON run configurations: validation, tower construction and serialization."""

from __future__ import annotations

import json
import re
import sys
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Any, Mapping

import jsonschema

from . import algebra
from .algebra import BaseModel, CenterModel, Tower
from .errors import ConfigError, MathError
from .exact import as_rational, format_rational

SCHEMA_VERSION = 1


@lru_cache(maxsize=1)
def load_schema() -> dict:
    text = resources.files("blowtower").joinpath("schema/config.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path)


def validate(data: Any) -> None:
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        # the deepest error is usually the most specific one
        err = max(errors, key=lambda e: len(e.absolute_path))
        raise ConfigError(err.message, _pointer(err.absolute_path))


@dataclass(frozen=True)
class RunConfig:
    base: BaseModel
    centers: tuple[Mapping, ...]
    queries: tuple[Mapping, ...]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "base": self.base.to_dict(),
            "tower": [dict(c) for c in self.centers],
            "queries": [dict(q) for q in self.queries],
        }


def parse_base(spec: Mapping) -> BaseModel:
    kind = spec["kind"]
    try:
        if kind == algebra.PROJECTIVE_SPACE:
            return BaseModel.projective_space(spec["dim"])
        if kind == algebra.MULTI_PROJECTIVE:
            return BaseModel.multi_projective(*spec["dims"])
        if kind == algebra.PICARD_ONE:
            return BaseModel.picard_one(spec["dim"], as_rational(spec.get("top_degree", 1)),
                                        None if "canonical" not in spec else as_rational(spec["canonical"]))
        return BaseModel.hyperkahler(spec["l"])
    except (MathError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(str(exc), "/base") from None


def parse_config(data: Any) -> RunConfig:
    """Validate a decoded JSON document (or JSON text) and wrap it."""
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})", "/") from None
    validate(data)
    for path, value in _rationals(data):
        try:
            as_rational(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(str(exc), _pointer(path)) from None
    base = parse_base(data["base"])
    return RunConfig(base, tuple(data.get("tower", [])), tuple(data.get("queries", [])))


def _rationals(data):
    """Every string that the schema accepted as a rational, with its path."""
    def walk(node, path):
        if isinstance(node, dict):
            for k, v in node.items():
                yield from walk(v, path + [k])
        elif isinstance(node, list):
            for i, v in enumerate(node):
                yield from walk(v, path + [i])
        elif isinstance(node, str) and re.fullmatch(r"[+-]?\d+/\d+", node):
            yield path, node
    yield from walk(data, [])


def load_config(source) -> RunConfig:
    """Read a config from a path, an open text stream, or ``"-"`` for stdin."""
    if source is None or source == "-":
        return parse_config(sys.stdin.read())
    if hasattr(source, "read"):
        return parse_config(source.read())
    try:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(source)) from None
    return parse_config(text)


def _flags(spec: Mapping) -> dict:
    flags = spec.get("flags", {})
    return {
        "movable": bool(flags.get("movable", False)),
        "proper_intersection_level": flags.get("proper_intersection_level"),
        "label": spec.get("label", ""),
    }


def center_from_spec(spec: Mapping, tower: Tower, index: int) -> CenterModel:
    kind = spec["kind"]
    k = tower.k
    loc = f"/tower/{index}"
    flags = _flags(spec)
    if kind == "point":
        return algebra.point_center(k, **flags)
    if kind == "curve":
        rest = spec.get("restriction")
        if rest is not None:
            rest = {g: as_rational(v) for g, v in rest.items()}
        return algebra.curve_center(k, as_rational(spec["degree"]), as_rational(spec["c1_normal"]),
                                    restriction=rest,
                                    c1_tangent=None if "c1_tangent" not in spec else as_rational(spec["c1_tangent"]),
                                    **flags)
    if kind == "complete_intersection":
        top = spec.get("top")
        return algebra.complete_intersection_center(
            tower.base, [as_rational(d) for d in spec["degrees"]],
            top=None if top is None else as_rational(top), **flags)
    if kind == "fiber":
        host = spec["host"]
        try:
            j = tower.step_index(host)
        except MathError:
            raise ConfigError(f"unknown host exceptional class {host!r}", loc + "/host") from None
        fiber_dim = tower.steps[j].center.codim_s - 1
        return algebra.center_in_fiber(k, spec.get("t_codim", 0), fiber_dim, host, **flags)
    if kind == "slice":
        return algebra.slice_center(tower.base, spec["factor"] - 1, **flags)
    rest = tuple((g, None if v is None else as_rational(v)) for g, v in spec.get("restriction", {}).items())
    return CenterModel(
        spec["ring_model"], spec["dim"], spec["codim"], as_rational(spec.get("top", 1)),
        tuple(as_rational(c) for c in spec["chern"]), rest, spec.get("others_vanish", False),
        None if "c1_tangent" not in spec else as_rational(spec["c1_tangent"]),
        tuple(as_rational(d) for d in spec.get("degrees", ())), **flags)


def build_tower(config: RunConfig) -> Tower:
    """Blow up the configured centers in order; math errors carry the step index."""
    tower = algebra.make_base(config.base)
    for i, spec in enumerate(config.centers):
        try:
            center = center_from_spec(spec, tower, i)
            tower = algebra.blow_up(tower, center, spec.get("host_level"), spec.get("name"),
                                    spec.get("disjoint_from", ()))
        except MathError as exc:
            if exc.step is None:
                exc.step = i
            raise
    return tower


def tower_to_config(tower: Tower, queries=()) -> dict:
    """A config that rebuilds ``tower`` exactly, with every center spelled out."""
    centers = []
    for i, st in enumerate(tower.steps):
        spec = st.center.to_dict()
        spec["name"] = st.name
        spec["host_level"] = st.host_level
        earlier = [s.name for s in tower.steps[: st.host_level]]
        declared = [g for g in earlier if tower.are_disjoint(g, st.name)]
        if declared:
            spec["disjoint_from"] = declared
        centers.append(spec)
    return {"schema_version": SCHEMA_VERSION, "base": tower.base.to_dict(), "tower": centers,
            "queries": list(queries)}


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False)


__all__ = [
    "RunConfig", "SCHEMA_VERSION", "build_tower", "center_from_spec", "dumps", "format_rational",
    "load_config", "load_schema", "parse_config", "tower_to_config", "validate",
]
