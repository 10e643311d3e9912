"""Project spec files: device, grid, layout, program overrides and fuzzy sets.

The format is INI-like and parsed with :mod:`configparser`::

    # comment
    [device]
    r_off = 16k          # SI suffixes f p n u µ m k M G T
    [grid]
    x_min = 0
    x_max = 13
    step = 1
    [layout]
    kind = rows          # or antidiagonal (exactly one set)
    r_feedback = 100
    [program]
    rel_tolerance = 0.01
    [set A]
    shape = triangular   # trapezoidal, gaussian, piecewise, tabulated
    params = 0, 3, 6

``piecewise`` and ``tabulated`` sets take ``points = x:mu, x:mu, ...``
instead of ``params``.  See ``docs/formats.md`` for every key.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

from .compiler import (
    ANTIDIAGONAL,
    ROWS,
    Gaussian,
    MembershipSpec,
    PiecewiseLinear,
    QuantizationGrid,
    Tabulated,
    TargetMatrix,
    Trapezoidal,
    Triangular,
    compile_antidiagonal,
    compile_rows,
)
from .device import DeviceParams
from .programming import ProgramConfig


class SpecError(ValueError):
    """Malformed spec file; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        self.line = line
        self.path = path
        where = f"{path or '<spec>'}:{line}: " if line else f"{path or '<spec>'}: "
        super().__init__(where + message)


SI_SUFFIX = {
    "f": 1e-15, "p": 1e-12, "n": 1e-9, "u": 1e-6, "µ": 1e-6, "μ": 1e-6, "m": 1e-3,
    "k": 1e3, "M": 1e6, "G": 1e9, "T": 1e12,
}
_NUMBER = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*([fpnuµμmkMGT]?)$")


def parse_number(text: str) -> float:
    """Decimal number with an optional SI suffix (``10k``, ``1u``, ``inf``)."""
    s = text.strip()
    if s.lower() in ("inf", "+inf", "-inf"):
        return float(s)
    m = _NUMBER.match(s)
    if not m:
        raise ValueError(f"not a number: {text!r}")
    value = float(m.group(1))
    return value * SI_SUFFIX[m.group(2)] if m.group(2) else value


def _parse_bool(text: str) -> bool:
    s = text.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_int(text: str) -> int:
    v = parse_number(text)
    if not math.isfinite(v) or v != int(v):
        raise ValueError(f"not an integer: {text!r}")
    return int(v)


DEVICE_KEYS = {f.name: parse_number for f in fields(DeviceParams)}
GRID_KEYS = {"x_min": parse_number, "x_max": parse_number, "step": parse_number}
PROGRAM_KEYS = {
    "write_voltage": parse_number, "pulse_width": parse_number,
    "rel_tolerance": parse_number, "max_pulses_per_cell": _parse_int,
    "max_sweeps": _parse_int, "scale_width": _parse_bool, "substeps": _parse_int,
}
SHAPES = {"triangular": (Triangular, 3), "trapezoidal": (Trapezoidal, 4),
          "gaussian": (Gaussian, 2), "piecewise": (PiecewiseLinear, None),
          "tabulated": (Tabulated, None)}


@dataclass
class ProjectSpec:
    params: DeviceParams
    grid: QuantizationGrid
    sets: list
    layout_kind: str = ROWS
    r_feedback: Optional[float] = None
    program: ProgramConfig = field(default_factory=ProgramConfig)

    @property
    def feedback(self) -> float:
        return self.params.r_on if self.r_feedback is None else self.r_feedback

    def grid_at(self, step: Optional[float] = None) -> QuantizationGrid:
        return self.grid if step is None else self.grid.with_step(step)

    def compile(self, step: Optional[float] = None) -> TargetMatrix:
        grid = self.grid_at(step)
        if self.layout_kind == ANTIDIAGONAL:
            return compile_antidiagonal(self.sets[0], grid, self.r_feedback, self.params)
        return compile_rows(self.sets, grid, self.r_feedback, self.params)

    def set_named(self, name: str) -> MembershipSpec:
        for s in self.sets:
            if s.name == name:
                return s
        raise KeyError(name)


def _line_index(text: str) -> dict:
    """(section, key) -> line number, and (section, None) -> header line."""
    index, section = {}, None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("[") and "]" in line:
            section = line[1:line.index("]")].strip()
            index.setdefault((section, None), no)
        elif "=" in line and section is not None:
            index.setdefault((section, line.split("=", 1)[0].strip().lower()), no)
    return index


def parse_spec(text: str, path: Optional[str] = None) -> ProjectSpec:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",),
                                   comment_prefixes=("#", ";"), delimiters=("=",),
                                   strict=True, default_section="\x00")
    try:
        cp.read_string(text, source=path or "<spec>")
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        if line is None and getattr(exc, "errors", None):
            line = exc.errors[0][0]
        raise SpecError(exc.message.splitlines()[0] if hasattr(exc, "message") else str(exc),
                        line, path) from None
    index = _line_index(text)

    def fail(msg, section, key=None):
        line = index.get((section, key)) or index.get((section, None))
        raise SpecError(msg, line, path)

    def read_keys(section, allowed):
        out = {}
        for key, raw in cp[section].items():
            if key not in allowed:
                fail(f"unknown key {key!r} in [{section}]", section, key)
            try:
                out[key] = allowed[key](raw)
            except ValueError as exc:
                fail(f"[{section}] {key}: {exc}", section, key)
        return out

    known = {"device", "grid", "layout", "program"}
    for sec in cp.sections():
        if sec not in known and not sec.startswith("set "):
            fail(f"unknown section [{sec}]", sec)

    dev = read_keys("device", DEVICE_KEYS) if cp.has_section("device") else {}
    try:
        params = DeviceParams(**dev)
    except ValueError as exc:
        fail(f"[device] {exc}", "device")

    if not cp.has_section("grid"):
        raise SpecError("missing [grid] section", None, path)
    g = read_keys("grid", GRID_KEYS)
    missing = set(GRID_KEYS) - set(g)
    if missing:
        fail(f"[grid] missing {sorted(missing)}", "grid")
    try:
        grid = QuantizationGrid(g["x_min"], g["x_max"], g["step"])
    except ValueError as exc:
        fail(f"[grid] {exc}", "grid")

    kind, r_fb = ROWS, None
    if cp.has_section("layout"):
        lay = cp["layout"]
        for key in lay:
            if key not in ("kind", "r_feedback"):
                fail(f"unknown key {key!r} in [layout]", "layout", key)
        kind = lay.get("kind", ROWS).strip()
        if kind not in (ROWS, ANTIDIAGONAL):
            fail(f"layout kind must be {ROWS!r} or {ANTIDIAGONAL!r}, got {kind!r}", "layout", "kind")
        if "r_feedback" in lay:
            try:
                r_fb = parse_number(lay["r_feedback"])
            except ValueError as exc:
                fail(f"[layout] r_feedback: {exc}", "layout", "r_feedback")
            if r_fb < params.r_on:
                fail(f"r_feedback={r_fb} below r_on={params.r_on}", "layout", "r_feedback")

    prog = read_keys("program", PROGRAM_KEYS) if cp.has_section("program") else {}
    try:
        program = ProgramConfig(**prog)
    except ValueError as exc:
        fail(f"[program] {exc}", "program")

    sets = [_parse_set(sec, cp[sec], fail) for sec in cp.sections() if sec.startswith("set ")]
    if not sets:
        raise SpecError("no [set NAME] sections", None, path)
    if kind == ANTIDIAGONAL and len(sets) != 1:
        raise SpecError(f"antidiagonal layout stores exactly one set, got {len(sets)}",
                        index.get(("layout", "kind")), path)
    return ProjectSpec(params, grid, sets, kind, r_fb, program)


def _parse_set(section: str, body, fail) -> MembershipSpec:
    name = section[4:].strip()
    if not name or "," in name:
        fail(f"bad set name {name!r}", section)
    for key in body:
        if key not in ("shape", "params", "points"):
            fail(f"unknown key {key!r} in [{section}]", section, key)
    shape = body.get("shape", "").strip().lower()
    if shape not in SHAPES:
        fail(f"shape must be one of {sorted(SHAPES)}, got {shape!r}", section, "shape")
    cls, arity = SHAPES[shape]
    try:
        if arity is None:
            if "points" not in body:
                fail(f"{shape} set needs points = x:mu, ...", section)
            pts = []
            for item in body["points"].split(","):
                if ":" not in item:
                    raise ValueError(f"point {item.strip()!r} is not x:mu")
                x, mu = item.split(":", 1)
                pts.append((parse_number(x), parse_number(mu)))
            return MembershipSpec(name, cls(pts))
        if "params" not in body:
            fail(f"{shape} set needs params", section)
        vals = [parse_number(v) for v in body["params"].split(",")]
        if len(vals) != arity:
            raise ValueError(f"{shape} takes {arity} params, got {len(vals)}")
        return MembershipSpec(name, cls(*vals))
    except ValueError as exc:
        if isinstance(exc, SpecError):
            raise
        key = "points" if arity is None else "params"
        fail(f"[{section}] {exc}", section, key)


def load_spec(path) -> ProjectSpec:
    path = Path(path)
    return parse_spec(path.read_text(encoding="utf-8"), str(path))
