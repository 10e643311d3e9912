"""Command-line front end for the crossbar fuzzy-membership simulator.

Run as ``memfuzzy <command> ...`` or ``python3 -m memfuzzy <command> ...``.

Exit statuses::

    0 success            3 parse error (spec, snapshot, input file)
    1 I/O error          4 validation error
    2 usage (argparse)   5 programming did not converge
                         6 query input outside the quantizer domain
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import snapshot
from .compiler import ROWS, OutOfDomainError, QuantizationGrid, quantize, sample_mf
from .crossbar import CrossbarArray
from .inference import (
    FuzzyNumber,
    evolve_cell,
    fuzzy_number_query,
    membership_query,
    stored_curve,
)
from .programming import NonConvergence, ProgramConfig, ProgramReport, program_matrix
from .specfile import ProjectSpec, SpecError, load_spec, parse_number

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_PARSE, EXIT_INVALID, EXIT_NONCONV, EXIT_DOMAIN = range(7)
CSV_VERSION = 1
REPORT_FORMAT = "memfuzzy-report"


class InputError(ValueError):
    """Malformed fuzzy-number input file."""


def fmt(v) -> str:
    return repr(float(v))


def _grid_comment(grid: QuantizationGrid) -> str:
    return f"# grid x_min={fmt(grid.x_min)} x_max={fmt(grid.x_max)} step={fmt(grid.step)} n={grid.n}"


def _csv_text(kind: str, meta: list, header: list, rows: list) -> str:
    buf = io.StringIO()
    buf.write(f"# format=memfuzzy-{kind} version={CSV_VERSION}\n")
    for line in meta:
        buf.write(line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        snapshot.atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def _config(args, base: ProgramConfig) -> ProgramConfig:
    over = {}
    if getattr(args, "tolerance", None) is not None:
        over["rel_tolerance"] = args.tolerance
    if getattr(args, "max_sweeps", None) is not None:
        over["max_sweeps"] = args.max_sweeps
    if getattr(args, "max_pulses", None) is not None:
        over["max_pulses_per_cell"] = args.max_pulses
    if getattr(args, "pulse_width", None) is not None:
        over["pulse_width"] = args.pulse_width
    return dataclasses.replace(base, **over)


def _spec(args) -> Optional[ProjectSpec]:
    return load_spec(args.spec) if getattr(args, "spec", None) else None


def _load_snapshot(path: str):
    array, layout = snapshot.load(path)
    if layout is None:
        raise ValueError(f"{path}: snapshot has no layout metadata")
    return array, layout


def _ideal(spec: Optional[ProjectSpec], layout) -> Optional[np.ndarray]:
    """Spec samples on the snapshot grid, shape (sets, points), or None."""
    if spec is None:
        return None
    try:
        return np.array([sample_mf(spec.set_named(n), layout.grid) for n in layout.names])
    except KeyError as exc:
        raise ValueError(f"spec has no set named {exc.args[0]!r}") from None


def _report_path(args) -> Path:
    if args.report:
        return Path(args.report)
    out = Path(args.out)
    return out.with_name(out.stem + ".report.json")


def _write_report(path, rep: ProgramReport, extra: Optional[dict] = None) -> None:
    d = {"format": REPORT_FORMAT, "version": 1, **rep.to_dict(), **(extra or {})}
    snapshot.atomic_write_text(path, json.dumps(d, indent=1) + "\n")


# --------------------------------------------------------------------------
# Commands


def cmd_compile(args) -> int:
    spec = load_spec(args.spec)
    tm = spec.compile(args.step)
    grid, layout = tm.layout.grid, tm.layout
    floor = layout.r_feedback / spec.params.r_off
    labels = list(layout.names) if layout.kind == ROWS else [str(i) for i in range(tm.shape[0])]
    rows = [[lab] + [fmt(v) for v in vals] for lab, vals in zip(labels, tm.values)]
    header = ["row"] + [fmt(x) for x in grid.points]
    meta = [f"# leakage_floor={fmt(floor)}", _grid_comment(grid),
            f"# layout={layout.kind} r_feedback={fmt(layout.r_feedback)} unit=ohm"]
    _emit(_csv_text("targets", meta, header, rows), args.out)
    summary = sys.stdout if args.out else sys.stderr
    print(f"columns={tm.shape[1]} rows={tm.shape[0]} mu_floor={fmt(floor)}", file=summary)
    by_set = {}
    for name, x, mu in tm.clipped:
        by_set.setdefault(name, []).append((x, mu))
    for name, pts in by_set.items():
        where = ", ".join(f"x={fmt(x)} (mu={mu:.6g})" for x, mu in pts)
        print(f"warning: set {name}: membership below floor {floor:.6g} clipped to r_off at {where}",
              file=sys.stderr)
    return EXIT_OK


def cmd_program(args) -> int:
    spec = load_spec(args.spec)
    cfg = _config(args, spec.program)
    tm = spec.compile(args.step)
    if args.snapshot:
        array, _ = snapshot.load(args.snapshot)
        if array.shape != tm.shape:
            raise ValueError(f"snapshot array {array.shape} does not match compiled targets {tm.shape}")
        if array.params != spec.params or array.r_feedback != tm.layout.r_feedback:
            raise ValueError("snapshot device parameters or r_feedback differ from the spec file")
    else:
        array = CrossbarArray(*tm.shape, spec.params, tm.layout.r_feedback)
    if args.out is None:
        if not args.snapshot:
            raise ValueError("program needs --out (or --snapshot to update in place)")
        args.out = args.snapshot
    try:
        new, rep = program_matrix(array, tm, cfg)
    except NonConvergence as exc:
        if exc.report is not None:
            _write_report(_report_path(args), exc.report, {"error": str(exc)})
        print(f"error: programming did not converge; worst cell (row={exc.row}, col={exc.col}): {exc}",
              file=sys.stderr)
        return EXIT_NONCONV
    snapshot.save(args.out, new, tm.layout)
    _write_report(_report_path(args), rep)
    print(f"converged sweeps={rep.sweeps} pulses={rep.total_pulses} "
          f"max_rel_error={rep.to_dict()['max_rel_error']:.4g} max_disturb={rep.max_disturb:.4g}")
    return EXIT_OK


def read_fuzzy_file(path, grid: QuantizationGrid) -> FuzzyNumber:
    """CSV of ``x,mu`` pairs (missing grid points are 0) or one ``mu`` per line."""
    pairs, single = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        for no, row in enumerate(csv.reader(fh), 1):
            cells = [c.strip() for c in row]
            if not cells or not any(cells) or cells[0].startswith("#"):
                continue
            try:
                nums = [parse_number(c) for c in cells]
            except ValueError:
                if not pairs and not single:
                    continue  # header
                raise InputError(f"{path}:{no}: not numeric: {row}") from None
            if len(nums) == 1:
                single.append(nums[0])
            elif len(nums) == 2:
                pairs.append((no, *nums))
            else:
                raise InputError(f"{path}:{no}: expected 'mu' or 'x,mu', got {len(nums)} fields")
    if pairs and single:
        raise InputError(f"{path}: mixes one- and two-column rows")
    if single:
        if len(single) != grid.n:
            raise InputError(f"{path}: {len(single)} samples, grid has {grid.n} points")
        return FuzzyNumber(single)
    samples = np.zeros(grid.n)
    seen = set()
    for no, x, mu in pairs:
        k = quantize(grid, x)
        if abs(grid.points[k] - x) > 1e-9 * max(1.0, abs(grid.step)):
            raise InputError(f"{path}:{no}: x={x} is not a grid point")
        if k in seen:
            raise InputError(f"{path}:{no}: duplicate grid point x={x}")
        seen.add(k)
        samples[k] = mu
    return FuzzyNumber(samples)


def cmd_query(args) -> int:
    array, layout = _load_snapshot(args.snapshot)
    spec = _spec(args)
    ideal = _ideal(spec, layout)
    tol = args.tolerance if args.tolerance is not None else (
        spec.program.rel_tolerance if spec else ProgramConfig().rel_tolerance)
    floor = array.leakage_floor
    grid = layout.grid
    meta = [f"# leakage_floor={fmt(floor)}", _grid_comment(grid),
            f"# layout={layout.kind} rel_tolerance={fmt(tol)}"]
    if args.fuzzy is None:
        res = membership_query(array, layout, args.x)
        k = quantize(grid, args.x)
        measured = res.grades
        ids = list(layout.names)
        want = None if ideal is None else ideal[:, k]
        bound = tol / (1 - tol) + floor
        meta.append(f"# query=singleton x={fmt(args.x)} grid_point={fmt(grid.points[k])}")
    else:
        fnum = read_fuzzy_file(args.fuzzy, grid)
        measured = fuzzy_number_query(array, layout, fnum).output
        ids = [fmt(x) for x in grid.points]
        want = None if ideal is None else ideal[0] * fnum.samples
        peak = float(fnum.samples.max())
        bound = peak * (tol / (1 - tol) + grid.n * floor)
        meta.append("# query=fuzzy")
    meta.append(f"# error_bound={fmt(bound)}")
    rows = []
    for i, m in enumerate(measured):
        if want is None:
            rows.append([ids[i], "", fmt(m), ""])
        else:
            rows.append([ids[i], fmt(want[i]), fmt(m), fmt(abs(m - want[i]))])
    _emit(_csv_text("query", meta, ["id", "ideal_mu", "measured", "abs_error"], rows), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    array, layout = _load_snapshot(args.snapshot)
    ideal = _ideal(_spec(args), layout)
    curve = stored_curve(array, layout)
    header = ["x"] + [f"{n}_measured" for n in layout.names]
    if ideal is not None:
        header += [f"{n}_ideal" for n in layout.names]
    rows = []
    for k, x in enumerate(layout.grid.points):
        row = [fmt(x)] + [fmt(v) for v in curve[:, k]]
        if ideal is not None:
            row += [fmt(v) for v in ideal[:, k]]
        rows.append(row)
    meta = [f"# leakage_floor={fmt(array.leakage_floor)}", _grid_comment(layout.grid),
            f"# layout={layout.kind}"]
    _emit(_csv_text("sweep", meta, header, rows), args.out)
    return EXIT_OK


def cmd_evolve(args) -> int:
    array, layout = _load_snapshot(args.snapshot)
    spec = _spec(args)
    cfg = _config(args, spec.program if spec else ProgramConfig())
    out = args.out or args.snapshot
    try:
        new, rep = evolve_cell(array, layout, args.set, args.x, args.mu, cfg)
    except NonConvergence as exc:
        print(f"error: evolve did not converge at cell (row={exc.row}, col={exc.col}): {exc}",
              file=sys.stderr)
        return EXIT_NONCONV
    snapshot.save(out, new, layout)
    if args.report:
        _write_report(args.report, rep)
    print(f"evolved set={args.set} x={fmt(args.x)} mu={fmt(args.mu)} pulses={rep.total_pulses} "
          f"max_disturb={rep.max_disturb:.4g}")
    return EXIT_OK


def cmd_export(args) -> int:
    array, layout = snapshot.load(args.snapshot)
    if args.format == "json":
        snapshot.save(args.out, array, layout)
        return EXIT_OK
    m = array.memristances()
    rows = [[i, j, fmt(array.x[i, j]), fmt(array.scale[i, j]), fmt(m[i, j])]
            for i in range(array.rows) for j in range(array.cols)]
    meta = [f"# leakage_floor={fmt(array.leakage_floor)}",
            f"# rows={array.rows} cols={array.cols} r_feedback={fmt(array.r_feedback)}"]
    if layout is not None:
        meta.append(_grid_comment(layout.grid))
    _emit(_csv_text("state", meta, ["row", "col", "x", "scale", "memristance"], rows), args.out)
    return EXIT_OK


def cmd_import_check(args) -> int:
    array, layout = _load_snapshot(args.snapshot)
    again, lay2 = snapshot.from_dict(json.loads(json.dumps(snapshot.to_dict(array, layout))))
    same = (lay2 == layout and np.array_equal(again.x, array.x)
            and np.array_equal(again.scale, array.scale)
            and np.array_equal(stored_curve(again, lay2), stored_curve(array, layout)))
    if not same:
        print("error: snapshot does not round-trip bit-identically", file=sys.stderr)
        return EXIT_INVALID
    print(f"ok rows={array.rows} cols={array.cols} layout={layout.kind} sets={','.join(layout.names)}")
    return EXIT_OK


# --------------------------------------------------------------------------


def _number(text: str) -> float:
    try:
        return parse_number(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="reserved; every command is deterministic")
    prog = argparse.ArgumentParser(prog="memfuzzy", description=__doc__.splitlines()[0],
                                   formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = prog.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    def program_flags(p):
        p.add_argument("--tolerance", type=_number, help="relative verify tolerance")
        p.add_argument("--max-sweeps", type=int)
        p.add_argument("--max-pulses", type=int, help="pulse budget per cell")
        p.add_argument("--pulse-width", type=_number, help="base write pulse width (s)")

    p = add("compile", cmd_compile, "spec -> target memristance CSV")
    p.add_argument("--spec", required=True)
    p.add_argument("--step", type=_number, help="override the grid step")
    p.add_argument("--out", help="CSV path (default: stdout)")

    p = add("program", cmd_program, "program-and-verify; writes snapshot and report")
    p.add_argument("--spec", required=True)
    p.add_argument("--snapshot", help="start from this array state")
    p.add_argument("--out", help="snapshot to write (default: --snapshot)")
    p.add_argument("--report", help="report path (default: <out stem>.report.json)")
    p.add_argument("--step", type=_number)
    program_flags(p)

    p = add("query", cmd_query, "singleton or fuzzy-number query -> CSV")
    p.add_argument("--snapshot", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--x", type=_number, help="crisp input value")
    g.add_argument("--fuzzy", help="fuzzy-number file (x,mu rows or one mu per grid point)")
    p.add_argument("--spec", help="adds ideal membership columns")
    p.add_argument("--tolerance", type=_number, help="tolerance used for the error bound")
    p.add_argument("--out")

    p = add("sweep", cmd_sweep, "measured grade at every grid point -> CSV")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--spec")
    p.add_argument("--out")

    p = add("evolve", cmd_evolve, "reprogram one stored membership value")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--set", required=True)
    p.add_argument("--x", type=_number, required=True)
    p.add_argument("--mu", type=_number, required=True)
    p.add_argument("--out", help="default: replace --snapshot")
    p.add_argument("--report")
    p.add_argument("--spec", help="program settings from this spec")
    program_flags(p)

    p = add("export", cmd_export, "rewrite a snapshot or dump cell state as CSV")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"), default="csv")

    p = add("import-check", cmd_import_check, "validate a snapshot and its round trip")
    p.add_argument("--snapshot", required=True)
    return prog


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "export" and args.format == "json" and not args.out:
        print("error: export --format json needs --out", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (SpecError, snapshot.SnapshotError, InputError) as exc:
        code, msg = EXIT_PARSE, str(exc)
    except OutOfDomainError as exc:
        code, msg = EXIT_DOMAIN, str(exc)
    except (ValueError, KeyError, IndexError) as exc:
        code, msg = EXIT_INVALID, str(exc)
    except OSError as exc:
        code, msg = EXIT_IO, f"{exc.filename or ''}: {exc.strerror or exc}"
    print(f"error: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
