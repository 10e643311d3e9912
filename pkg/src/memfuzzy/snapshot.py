"""JSON snapshots of programmed arrays.

A snapshot stores the device state ``x`` and scale factor of every cell,
the device parameters, the feedback resistance and the layout.  Floats are
written with ``repr`` precision by :mod:`json`, so ``load(save(a))`` is
bit-identical.  Files are replaced atomically (temp file + rename).
"""
from __future__ import annotations

import dataclasses
import json
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np

from .compiler import LayoutMeta, QuantizationGrid
from .crossbar import CrossbarArray
from .device import DeviceParams

FORMAT = "memfuzzy-snapshot"
VERSION = 1


class SnapshotError(ValueError):
    pass


def to_dict(array: CrossbarArray, layout: Optional[LayoutMeta]) -> dict:
    lay = None
    if layout is not None:
        lay = {"kind": layout.kind, "names": list(layout.names),
               "grid": dataclasses.asdict(layout.grid), "r_feedback": layout.r_feedback}
    return {
        "format": FORMAT,
        "version": VERSION,
        "written_at": datetime.now(timezone.utc).isoformat(),
        "rows": array.rows,
        "cols": array.cols,
        "device": dataclasses.asdict(array.params),
        "r_feedback": array.r_feedback,
        "x": array.x.tolist(),
        "scale": array.scale.tolist(),
        "layout": lay,
    }


def from_dict(d: dict) -> tuple[CrossbarArray, Optional[LayoutMeta]]:
    if not isinstance(d, dict) or d.get("format") != FORMAT:
        raise SnapshotError(f"not a {FORMAT} file")
    if d.get("version") != VERSION:
        raise SnapshotError(f"unsupported snapshot version {d.get('version')!r}")
    try:
        params = DeviceParams(**d["device"])
        x = np.array(d["x"], dtype=float).reshape(d["rows"], d["cols"])
        scale = np.array(d["scale"], dtype=float).reshape(d["rows"], d["cols"])
        array = CrossbarArray(d["rows"], d["cols"], params, d["r_feedback"], x, scale)
        layout = None
        if d.get("layout") is not None:
            lay = d["layout"]
            layout = LayoutMeta(lay["kind"], tuple(lay["names"]),
                                QuantizationGrid(**lay["grid"]), lay["r_feedback"])
    except (KeyError, TypeError) as exc:
        raise SnapshotError(f"malformed snapshot: {exc!r}") from None
    if layout is not None:
        if layout.shape != array.shape:
            raise SnapshotError(f"layout shape {layout.shape} does not match array {array.shape}")
        if layout.r_feedback != array.r_feedback:
            raise SnapshotError("layout r_feedback differs from array r_feedback")
    return array, layout


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save(path, array: CrossbarArray, layout: Optional[LayoutMeta]) -> None:
    atomic_write_text(path, json.dumps(to_dict(array, layout), indent=1) + "\n")


def load(path) -> tuple[CrossbarArray, Optional[LayoutMeta]]:
    try:
        d = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SnapshotError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return from_dict(d)
