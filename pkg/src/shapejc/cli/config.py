"""Run configuration: strict YAML parsing, validation and serialization."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
import yaml

from ..algebra import ShapeInvariantModel
from ..errors import InvalidModel, ShapeJCError

BACKEND_CHOICES = ("series", "quadrature", "ho_closed_form", "all")
FORMATS = ("csv", "json")


class ConfigError(ShapeJCError, ValueError):
    pass


class ParseError(ConfigError):
    def __init__(self, line: int | None, message: str):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class UnknownKey(ConfigError):
    def __init__(self, name: str, where: str = ""):
        self.name = name
        super().__init__(f"unknown key {name!r}" + (f" in {where}" if where else ""))


class ValidationError(ConfigError):
    def __init__(self, field_name: str, reason: str):
        self.field = field_name
        self.reason = reason
        super().__init__(f"{field_name}: {reason}")


@dataclass(frozen=True)
class TimeGrid:
    start: float | None = None
    stop: float | None = None
    count: int | None = None
    values: tuple[float, ...] | None = None

    def points(self) -> np.ndarray:
        if self.values is not None:
            return np.asarray(self.values, dtype=float)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class InitialState:
    kind: str = "bare"          # ground | bare | dressed | amplitudes
    m: int = 0
    sector: str = "e"
    branch: str = "+"
    amplitudes: tuple[complex, ...] | None = None


@dataclass(frozen=True)
class OutputSpec:
    format: str = "csv"
    path: str | None = None


@dataclass(frozen=True)
class RunConfig:
    model: ShapeInvariantModel
    N: int
    alpha: float
    delta: float = 0.0
    hbar: float = 1.0
    times: TimeGrid = field(default_factory=lambda: TimeGrid(0.0, 10.0, 101))
    backend: str = "quadrature"
    series_order: int = 60
    quadrature_tol: float = 1e-10
    initial_state: InitialState = field(default_factory=InitialState)
    output: OutputSpec = field(default_factory=OutputSpec)


TOP_KEYS = {"model", "N", "alpha", "delta", "hbar", "times", "backend", "series_order",
            "quadrature_tol", "initial_state", "output"}
MODEL_KEYS = {"kind", "omega", "r1", "q", "remainders"}
TIME_KEYS = {"start", "stop", "count"}
OUTPUT_KEYS = {"format", "path"}


def _reject_unknown(d: dict, allowed: set, where: str) -> None:
    for k in d:
        if k not in allowed:
            raise UnknownKey(str(k), where)


def _number(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(name, f"expected a number, got {value!r}")
    if not np.isfinite(value):
        raise ValidationError(name, "must be finite")
    return float(value)


def _integer(value: Any, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(name, f"expected an integer, got {value!r}")
    return int(value)


def _mapping(value: Any, name: str) -> dict:
    if not isinstance(value, dict):
        raise ValidationError(name, f"expected a mapping, got {type(value).__name__}")
    return value


def _parse_model(raw: Any, hbar: float) -> ShapeInvariantModel:
    d = _mapping(raw, "model")
    _reject_unknown(d, MODEL_KEYS, "model")
    kind = d.get("kind")
    try:
        if kind == "harmonic":
            _reject_unknown(d, {"kind", "omega"}, "harmonic model")
            return ShapeInvariantModel.harmonic(_number(d.get("omega"), "model.omega"), hbar)
        if kind == "self_similar":
            _reject_unknown(d, {"kind", "r1", "q"}, "self_similar model")
            return ShapeInvariantModel.self_similar(
                _number(d.get("r1"), "model.r1"), _number(d.get("q"), "model.q"), hbar)
        if kind == "explicit":
            _reject_unknown(d, {"kind", "remainders"}, "explicit model")
            rem = d.get("remainders")
            if not isinstance(rem, list) or not rem:
                raise ValidationError("model.remainders", "expected a non-empty list")
            return ShapeInvariantModel.explicit(
                [_number(r, "model.remainders") for r in rem], hbar)
    except InvalidModel as exc:
        raise ValidationError("model", str(exc)) from exc
    raise ValidationError("model.kind", f"expected harmonic, self_similar or explicit, got {kind!r}")


def _parse_times(raw: Any) -> TimeGrid:
    if isinstance(raw, list):
        vals = tuple(_number(v, "times") for v in raw)
        if not vals:
            raise ValidationError("times", "need at least one time point")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValidationError("times", "time points must be strictly increasing")
        return TimeGrid(values=vals)
    d = _mapping(raw, "times")
    _reject_unknown(d, TIME_KEYS, "times")
    for k in TIME_KEYS:
        if k not in d:
            raise ValidationError("times", f"missing {k!r}")
    start, stop = _number(d["start"], "times.start"), _number(d["stop"], "times.stop")
    count = _integer(d["count"], "times.count")
    if count < 1:
        raise ValidationError("times", "count must be at least 1")
    if count == 1 and stop != start:
        raise ValidationError("times", "count 1 needs stop == start")
    if count > 1 and not stop > start:
        raise ValidationError("times", "stop must exceed start")
    return TimeGrid(start, stop, count)


def _parse_amplitude(v: Any) -> complex:
    if isinstance(v, bool):
        raise ValidationError("initial_state", f"bad amplitude {v!r}")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2:
        return complex(_number(v[0], "initial_state"), _number(v[1], "initial_state"))
    if isinstance(v, str):
        try:
            return complex(v.replace(" ", ""))
        except ValueError:
            pass
    raise ValidationError("initial_state", f"bad amplitude {v!r}")


def _parse_state(raw: Any, N: int) -> InitialState:
    if raw == "ground":
        return InitialState("ground")
    if isinstance(raw, list):
        amps = tuple(_parse_amplitude(v) for v in raw)
        if len(amps) != 2 * N:
            raise ValidationError("initial_state", f"expected {2 * N} amplitudes, got {len(amps)}")
        if not np.linalg.norm(amps) > 0:
            raise ValidationError("initial_state", "amplitudes are all zero")
        return InitialState("amplitudes", amplitudes=amps)
    d = _mapping(raw, "initial_state")
    if len(d) != 1:
        raise ValidationError("initial_state", "expected exactly one of ground, bare, dressed")
    (kind, body), = d.items()
    if kind == "bare":
        b = _mapping(body, "initial_state.bare")
        _reject_unknown(b, {"m", "sector"}, "initial_state.bare")
        m = _integer(b.get("m"), "initial_state.bare.m")
        sector = b.get("sector")
        if sector not in ("e", "g"):
            raise ValidationError("initial_state.bare.sector", "expected 'e' or 'g'")
        if not 0 <= m < N:
            raise ValidationError("initial_state.bare.m", f"level outside 0..{N - 1}")
        return InitialState("bare", m=m, sector=sector)
    if kind == "dressed":
        b = _mapping(body, "initial_state.dressed")
        _reject_unknown(b, {"m", "branch"}, "initial_state.dressed")
        m = _integer(b.get("m"), "initial_state.dressed.m")
        branch = str(b.get("branch"))
        if branch not in ("+", "-"):
            raise ValidationError("initial_state.dressed.branch", "expected '+' or '-'")
        if not 0 <= m <= N - 2:
            raise ValidationError("initial_state.dressed.m", f"block outside 0..{N - 2}")
        return InitialState("dressed", m=m, branch=branch)
    raise UnknownKey(str(kind), "initial_state")


def config_from_dict(doc: Any) -> RunConfig:
    d = _mapping(doc, "config")
    _reject_unknown(d, TOP_KEYS, "config")
    for k in ("model", "N", "alpha"):
        if k not in d:
            raise ValidationError(k, "required")
    N = _integer(d["N"], "N")
    if N < 2:
        raise ValidationError("N", "must be at least 2")
    hbar = _number(d.get("hbar", 1.0), "hbar")
    if not hbar > 0:
        raise ValidationError("hbar", "must be positive")
    alpha = _number(d["alpha"], "alpha")
    if alpha == 0:
        raise ValidationError("alpha", "must be nonzero")
    model = _parse_model(d["model"], hbar)
    if model.kind == "explicit" and len(model.remainders) < N - 1:
        raise ValidationError("model.remainders", f"need at least {N - 1} remainders for N = {N}")
    backend = d.get("backend", "quadrature")
    if backend not in BACKEND_CHOICES:
        raise ValidationError("backend", f"expected one of {BACKEND_CHOICES}")
    K = _integer(d.get("series_order", 60), "series_order")
    if K < 0:
        raise ValidationError("series_order", "must be non-negative")
    tol = _number(d.get("quadrature_tol", 1e-10), "quadrature_tol")
    if not tol > 0:
        raise ValidationError("quadrature_tol", "must be positive")
    out = _mapping(d.get("output", {}), "output")
    _reject_unknown(out, OUTPUT_KEYS, "output")
    fmt = out.get("format", "csv")
    if fmt not in FORMATS:
        raise ValidationError("output.format", f"expected one of {FORMATS}")
    path = out.get("path")
    if path is not None and not isinstance(path, str):
        raise ValidationError("output.path", "expected a string")
    return RunConfig(
        model=model, N=N, alpha=alpha,
        delta=_number(d.get("delta", 0.0), "delta"), hbar=hbar,
        times=_parse_times(d["times"]) if "times" in d else TimeGrid(0.0, 10.0, 101),
        backend=backend, series_order=K, quadrature_tol=tol,
        initial_state=_parse_state(d["initial_state"], N) if "initial_state" in d else InitialState(),
        output=OutputSpec(fmt, path),
    )


def parse_config(text: str) -> RunConfig:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ParseError(line, getattr(exc, "problem", None) or str(exc)) from exc
    if doc is None:
        raise ParseError(1, "empty document")
    return config_from_dict(doc)


def config_to_dict(cfg: RunConfig) -> dict:
    m = cfg.model
    model: dict[str, Any] = {"kind": m.kind}
    if m.kind == "harmonic":
        model["omega"] = m.omega
    elif m.kind == "self_similar":
        model.update(r1=m.r1, q=m.q)
    else:
        model["remainders"] = list(m.remainders)
    g = cfg.times
    times: Any = list(g.values) if g.values is not None else {
        "start": g.start, "stop": g.stop, "count": g.count}
    s = cfg.initial_state
    if s.kind == "ground":
        state: Any = "ground"
    elif s.kind == "bare":
        state = {"bare": {"m": s.m, "sector": s.sector}}
    elif s.kind == "dressed":
        state = {"dressed": {"m": s.m, "branch": s.branch}}
    else:
        state = [[a.real, a.imag] for a in s.amplitudes]
    out: dict[str, Any] = {"format": cfg.output.format}
    if cfg.output.path is not None:
        out["path"] = cfg.output.path
    return {
        "model": model, "N": cfg.N, "alpha": cfg.alpha, "delta": cfg.delta,
        "hbar": cfg.hbar, "times": times, "backend": cfg.backend,
        "series_order": cfg.series_order, "quadrature_tol": cfg.quadrature_tol,
        "initial_state": state, "output": out,
    }


def serialize_config(cfg: RunConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False, default_flow_style=None)
