"""Scenario records and the flat ``section.key = value`` config format.

Example::

    # three-variable run
    model.kind = three_var
    params.alpha1 = 0.03
    ...
    initial.x = 0.07
    initial.y = 0.053
    initial.z = 0.05
    grid.t0 = 0.0
    grid.tf = 200.0
    grid.dt = 0.001
    outputs.requests = trajectory

Blank lines and ``#`` comments are ignored. Sections: ``model``, ``params``,
``initial``, ``grid``, ``noise``, ``interaction``, ``scale``, ``outputs``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields

from .errors import ParseError, UnknownPreset, ValidationError
from .integrate import RealScale, TimeGrid
from .models import InteractionSpec, LVParams, NoiseSpec, ThreeVarParams, TwoVarParams

MODEL_PARAMS = {
    "lotka_volterra": LVParams,
    "two_var": TwoVarParams,
    "three_var": ThreeVarParams,
    "sde": ThreeVarParams,
    "interaction": ThreeVarParams,
}
OUTPUT_KINDS = ("trajectory", "scaled", "plot")
SECTIONS = ("model", "params", "initial", "grid", "noise", "interaction", "scale", "outputs")


def state_labels(model: str) -> tuple:
    return ("x", "y") if model in ("lotka_volterra", "two_var") else ("x", "y", "z")


@dataclass(frozen=True)
class Scenario:
    model: str
    params: object
    initial: tuple
    grid: TimeGrid
    noise: NoiseSpec | None = None
    interaction: InteractionSpec | None = None
    scale: RealScale | None = None
    outputs: tuple = ("trajectory",)
    name: str = ""

    def __post_init__(self):
        if self.model not in MODEL_PARAMS:
            raise ValidationError("model.kind", f"unknown model {self.model!r}")
        if not isinstance(self.params, MODEL_PARAMS[self.model]):
            raise ValidationError("params", f"{self.model} needs {MODEL_PARAMS[self.model].__name__}")
        initial = tuple(float(v) for v in self.initial)
        if len(initial) != len(state_labels(self.model)):
            raise ValidationError("initial", f"expected {len(state_labels(self.model))} components")
        for lbl, v in zip(state_labels(self.model), initial):
            if not v > 0:
                raise ValidationError(f"initial.{lbl}", "must be positive")
        object.__setattr__(self, "initial", initial)
        if self.model in ("sde", "interaction") and self.noise is None:
            raise ValidationError("noise", f"required for model {self.model}")
        if self.model == "interaction":
            if self.interaction is None:
                raise ValidationError("interaction", "required for model interaction")
            knots = [k for k in (self.interaction.T1, self.interaction.contact_time) if k < self.grid.tf]
            if any(k not in self.grid.mandatory_knots and k > self.grid.t0 for k in knots):
                object.__setattr__(self, "grid", self.grid.with_knots(*[k for k in knots if k > self.grid.t0]))
        bad = [o for o in self.outputs if o not in OUTPUT_KINDS]
        if bad:
            raise ValidationError("outputs.requests", f"unknown output {bad[0]!r}")
        object.__setattr__(self, "outputs", tuple(self.outputs))

    def with_dt(self, dt: float) -> "Scenario":
        g = self.grid
        return _replace(self, grid=TimeGrid(g.t0, g.tf, dt, g.mandatory_knots))

    def with_seed(self, seed: int) -> "Scenario":
        if self.noise is None:
            return self
        return _replace(self, noise=self.noise.with_seed(seed))

    def with_initial(self, initial) -> "Scenario":
        return _replace(self, initial=tuple(initial))

    def with_horizon(self, tf: float) -> "Scenario":
        g = self.grid
        return _replace(self, grid=TimeGrid(g.t0, tf, g.dt, tuple(k for k in g.mandatory_knots if k <= tf)))


def _replace(s: Scenario, **changes) -> Scenario:
    values = {f.name: getattr(s, f.name) for f in fields(s)}
    values.update(changes)
    return Scenario(**values)


def parse_lines(text: str) -> dict:
    """``{key: (raw_value, line_number)}`` for a config text."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if "." not in key or not value:
            raise ParseError(f"malformed entry {raw.strip()!r}", lineno)
        section = key.split(".", 1)[0]
        if section not in SECTIONS:
            raise ParseError(f"unknown section {section!r}", lineno)
        if key in entries:
            raise ParseError(f"duplicate key {key!r} (first on line {entries[key][1]})", lineno)
        entries[key] = (value, lineno)
    return entries


def _number(entries, key, kind=float):
    value, line = entries[key]
    try:
        return kind(value)
    except ValueError:
        raise ParseError(f"{key}: not a number: {value!r}", line) from None


def _section(entries, name):
    prefix = name + "."
    return {k[len(prefix) :]: k for k in entries if k.startswith(prefix)}


def _record(entries, section, cls, required=None):
    """Build dataclass ``cls`` from ``section.*``, re-anchoring its ValueErrors."""
    keys = _section(entries, section)
    names = [f.name for f in fields(cls)]
    for short, key in keys.items():
        if short not in names:
            raise ValidationError(key, f"unknown field for {cls.__name__}", entries[key][1])
    for name in required if required is not None else names:
        if name not in keys:
            raise ValidationError(f"{section}.{name}", "missing")
    kwargs = {}
    for short, key in keys.items():
        kind = int if short == "seed" else float
        kwargs[short] = _number(entries, key, kind)
    try:
        return cls(**kwargs)
    except ValueError as exc:
        name = str(exc).split(":", 1)[0]
        key = keys.get(name)
        line = entries[key][1] if key else None
        raise ValidationError(f"{section}.{name}", str(exc).split(":", 1)[-1].strip(), line) from None


def scenario_from_text(text: str) -> Scenario:
    entries = parse_lines(text)
    if "model.kind" not in entries:
        raise ValidationError("model.kind", "missing")
    model, mline = entries["model.kind"]
    if model not in MODEL_PARAMS:
        raise ValidationError("model.kind", f"unknown model {model!r}", mline)
    name = entries["model.name"][0] if "model.name" in entries else ""

    params = _record(entries, "params", MODEL_PARAMS[model])
    initial = []
    for lbl in state_labels(model):
        key = f"initial.{lbl}"
        if key not in entries:
            raise ValidationError(key, "missing")
        v = _number(entries, key)
        if not v > 0:
            raise ValidationError(key, "must be positive", entries[key][1])
        initial.append(v)

    for key in ("grid.t0", "grid.tf", "grid.dt"):
        if key not in entries:
            raise ValidationError(key, "missing")
    knots = ()
    if "grid.knots" in entries:
        value, line = entries["grid.knots"]
        try:
            knots = tuple(float(v) for v in value.split(",") if v.strip())
        except ValueError:
            raise ParseError(f"grid.knots: not a number list: {value!r}", line) from None
    try:
        grid = TimeGrid(_number(entries, "grid.t0"), _number(entries, "grid.tf"), _number(entries, "grid.dt"), knots)
    except ValueError as exc:
        raise ValidationError("grid", str(exc), entries["grid.tf"][1]) from None

    noise = _record(entries, "noise", NoiseSpec, ["sigma1", "sigma2", "sigma3"]) if _section(entries, "noise") else None
    inter = (
        _record(entries, "interaction", InteractionSpec, ["c1", "c2"]) if _section(entries, "interaction") else None
    )
    scale = _record(entries, "scale", RealScale, []) if _section(entries, "scale") else None
    outputs = ("trajectory",)
    if "outputs.requests" in entries:
        value, line = entries["outputs.requests"]
        outputs = tuple(v.strip() for v in value.split(",") if v.strip())
        bad = [o for o in outputs if o not in OUTPUT_KINDS]
        if bad:
            raise ValidationError("outputs.requests", f"unknown output {bad[0]!r}", line)
    for key, what in (("noise", noise), ("interaction", inter)):
        if what is None and (model == "interaction" or (key == "noise" and model == "sde")):
            raise ValidationError(key, f"section required for model {model}", mline)
    return Scenario(model, params, tuple(initial), grid, noise, inter, scale, outputs, name)


def scenario_to_text(s: Scenario) -> str:
    lines = [f"model.kind = {s.model}"]
    if s.name:
        lines.append(f"model.name = {s.name}")
    lines += [f"params.{f.name} = {getattr(s.params, f.name)!r}" for f in fields(s.params)]
    lines += [f"initial.{lbl} = {v!r}" for lbl, v in zip(state_labels(s.model), s.initial)]
    g = s.grid
    lines += [f"grid.t0 = {g.t0!r}", f"grid.tf = {g.tf!r}", f"grid.dt = {g.dt!r}"]
    if g.mandatory_knots:
        lines.append("grid.knots = " + ", ".join(repr(k) for k in g.mandatory_knots))
    for section, rec in (("noise", s.noise), ("interaction", s.interaction), ("scale", s.scale)):
        if rec is not None:
            lines += [f"{section}.{f.name} = {getattr(rec, f.name)!r}" for f in fields(rec)]
    lines.append("outputs.requests = " + ", ".join(s.outputs))
    return "\n".join(lines) + "\n"


def load_scenario(source: str) -> Scenario:
    """Scenario from a config file path, or from a bundled preset name."""
    if os.path.isfile(source):
        with open(source, encoding="utf-8") as fh:
            return scenario_from_text(fh.read())
    from .presets import PRESETS

    if source in PRESETS:
        return PRESETS[source]
    raise UnknownPreset(f"{source!r} is neither a readable file nor a preset ({', '.join(PRESETS)})")


def dump_scenario(s: Scenario, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(scenario_to_text(s))
