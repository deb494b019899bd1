"""Command-line front end.

Commands: ``inspect`` (model diagnostics), ``features`` (feature and edge
listing), ``params`` (process-parameter report), ``batch`` (directory of
models). Exit codes: 0 success, 2 parse failure, 3 validation failure,
4 unknown material/tool or invalid override, 5 no feature produced parameters.

The PUNCHPLAN_DB_DIR environment variable may point at a directory holding
``materials.json`` / ``tools.json`` used as default databases.
"""
from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

from . import report as _report
from .brep import (
    BrepError,
    SchemaError,
    Solid,
    edge_length,
    face_area,
    face_normal,
    load_brep_json,
    planar_faces,
    validate_manifold,
)
from .features import RecognitionError, sheet_metrics
from .process import DEFAULT_H1_FRACTION, DEFAULT_HOLDING_FRACTION
from .report import PartAnalysis, ReportSettings, analyze_solid, report_document
from .resources import (
    NotFound,
    ResourceError,
    builtin_materials,
    builtin_tools,
    load_materials,
    load_tools,
    lookup,
    merge,
)
from .step import StepError, parse_exchange, resolve_brep

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_RESOURCE = 4
EXIT_NO_FEATURE = 5

DB_DIR_ENV = "PUNCHPLAN_DB_DIR"


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _detect_format(path: Path, requested: str) -> str:
    if requested != "auto":
        return requested
    suffix = path.suffix.lower()
    if suffix in (".step", ".stp"):
        return "step"
    if suffix == ".json":
        return "brep-json"
    raise CliError(EXIT_PARSE, f"{path}: cannot infer input format from extension {suffix!r}; "
                               "use --input-format")


def _load_solid(path: Path, requested: str) -> tuple[Solid, list[str], int | None]:
    """Read a model file; returns (solid, warnings, entity count for STEP input)."""
    fmt = _detect_format(path, requested)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}") from None
    try:
        if fmt == "step":
            xs = parse_exchange(text)
            warnings = list(xs.warnings)
            for kw, count in sorted(xs.ignored_keywords.items()):
                warnings.append(f"ignored {count} {kw} entities")
            return resolve_brep(xs), warnings, len(xs.entities)
        solid = load_brep_json(text)
        if not solid.name:
            solid.name = path.stem
        return solid, [], None
    except (StepError, SchemaError, BrepError) as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}") from None


def _write_output(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    target = Path(out)
    target.parent.mkdir(parents=True, exist_ok=True)
    _atomic_write(target, text)


def _atomic_write(target: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=str(target.parent), prefix=target.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _load_dbs(args) -> tuple[dict, dict]:
    materials = builtin_materials()
    tools = builtin_tools()
    db_dir = os.environ.get(DB_DIR_ENV)
    mat_path = args.materials_db
    tool_path = args.tools_db
    if db_dir:
        base = Path(db_dir)
        if mat_path is None and (base / "materials.json").exists():
            mat_path = str(base / "materials.json")
        if tool_path is None and (base / "tools.json").exists():
            tool_path = str(base / "tools.json")
    try:
        if mat_path is not None:
            materials = merge(materials, load_materials(Path(mat_path).read_text(encoding="utf-8")))
        if tool_path is not None:
            tools = merge(tools, load_tools(Path(tool_path).read_text(encoding="utf-8")))
    except OSError as exc:
        raise CliError(EXIT_RESOURCE, str(exc)) from None
    except ResourceError as exc:
        raise CliError(EXIT_RESOURCE, str(exc)) from None
    return materials, tools


def _analyze_validated(solid: Solid, cut_height: float | None) -> PartAnalysis:
    try:
        analysis = analyze_solid(solid, cut_height)
    except (RecognitionError, BrepError) as exc:
        raise CliError(EXIT_VALIDATION, str(exc)) from None
    if analysis.violations:
        lines = "\n".join(f"  {v.kind}: {v.message}" for v in analysis.violations)
        raise CliError(EXIT_VALIDATION, f"model is not a closed manifold:\n{lines}")
    return analysis


def _settings(args) -> ReportSettings:
    for name in ("kd", "h1_fraction", "holding_fraction", "cut_height"):
        value = getattr(args, name, None)
        if value is not None and value <= 0:
            raise CliError(EXIT_RESOURCE, f"--{name.replace('_', '-')} must be > 0")
    return ReportSettings(
        kd=args.kd,
        h1_fraction=args.h1_fraction,
        holding_fraction=args.holding_fraction,
        cut_height=args.cut_height,
    )


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_inspect(args) -> int:
    path = Path(args.input)
    solid, warnings, entity_count = _load_solid(path, args.input_format)
    lines = [f"part: {solid.name or path.stem}"]
    if entity_count is not None:
        lines.append(f"entities: {entity_count}")
    n_planar = len(planar_faces(solid))
    lines.append(
        f"faces: {len(solid.faces)} ({n_planar} planar, {len(solid.faces) - n_planar} cylindrical)"
    )
    lines.append(f"edges: {len(solid.edges)}   vertices: {len(solid.vertices)}   loops: {len(solid.loops)}")
    lines.append("face table:")
    lines.append("  id    kind      area_mm2      outward_normal")
    planar_ids = {pf.id for pf in planar_faces(solid)}
    for fid in sorted(solid.faces):
        f = solid.faces[fid]
        if fid in planar_ids:
            n = face_normal(f)
            lines.append(
                f"  {fid:<5} plane     {face_area(f, solid):<13.6g} ({n.x:.3g},{n.y:.3g},{n.z:.3g})"
            )
        else:
            lines.append(f"  {fid:<5} cylinder  -             -")
    violations = validate_manifold(solid)
    if violations:
        lines.append(f"manifold: {len(violations)} violation(s)")
        for v in violations:
            lines.append(f"  {v.kind}: {v.message}")
        _write_output("\n".join(lines) + "\n", args.out)
        return EXIT_VALIDATION
    lines.append("manifold: OK")
    try:
        metrics = sheet_metrics(solid)
        lines.append(f"thickness: {metrics.thickness:.6g} mm")
        lines.append(
            f"reference face: {metrics.reference_face} "
            f"(area {face_area(solid.faces[metrics.reference_face], solid):.6g} mm2, "
            f"opposite face {metrics.opposite_face})"
        )
    except RecognitionError as exc:
        lines.append(f"sheet metrics: unavailable ({exc})")
        _write_output("\n".join(lines) + "\n", args.out)
        return EXIT_VALIDATION
    for w in warnings:
        lines.append(f"warning: {w}")
    _write_output("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_features(args) -> int:
    path = Path(args.input)
    solid, warnings, _ = _load_solid(path, args.input_format)
    if args.cut_height is not None and args.cut_height <= 0:
        raise CliError(EXIT_RESOURCE, "--cut-height must be > 0")
    analysis = _analyze_validated(solid, args.cut_height)
    lines = [f"part: {solid.name or path.stem}"]
    lines.append(f"thickness: {analysis.metrics.thickness:.6g} mm   "
                 f"reference face: {analysis.metrics.reference_face}")
    if not analysis.features:
        lines.append("no features")
    for feat in analysis.features:
        h = "?" if feat.height is None else f"{feat.height:.6g}"
        members = ",".join(str(i) for i in sorted(feat.member_faces)) or "-"
        lines.append(f"feature {feat.id}: kind={feat.kind.value} h={h} members=[{members}]")
        for eid, cls in analysis.classification.by_feature[feat.id]:
            length = edge_length(solid.edges[eid], solid)
            lines.append(f"  {cls.value} edge {eid} length {length:.6f}")
        tot = analysis.totals[feat.id]
        lines.append(
            f"  totals: n_CEE={tot.n_cee} n_CIE={tot.n_cie} n_IIE={tot.n_iie} "
            f"TLIIEs={tot.tl_iie:.6f} TLCIEs={tot.tl_cie:.6f} TLCEEs={tot.tl_cee:.6f}"
        )
        if feat.id in analysis.height_errors:
            lines.append(f"  note: {analysis.height_errors[feat.id]}")
    uncommitted = [e for e in analysis.classification.part_level]
    if uncommitted:
        total = sum(edge_length(solid.edges[eid], solid) for eid, _ in uncommitted)
        lines.append(f"part-level edges: {len(uncommitted)} IEE (total length {total:.6f})")
    for w in warnings:
        lines.append(f"warning: {w}")
    _write_output("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _params_document(path: Path, args) -> dict:
    solid, warnings, _ = _load_solid(path, args.input_format)
    settings = _settings(args)
    materials, tools = _load_dbs(args)
    try:
        mat = lookup(materials, args.material, "material")
        tool = lookup(tools, args.tool, "tool")
    except NotFound as exc:
        raise CliError(EXIT_RESOURCE, str(exc)) from None
    analysis = _analyze_validated(solid, settings.cut_height)
    if not solid.name:
        solid.name = path.stem
    return report_document(analysis, mat, tool, settings, warnings)


def cmd_params(args) -> int:
    path = Path(args.input)
    doc = _params_document(path, args)
    text = _report.RENDERERS[args.format](doc)
    _write_output(text, args.out)
    feature_blocks = doc["features"]
    if feature_blocks and all(b["error"] for b in feature_blocks):
        return EXIT_NO_FEATURE
    return EXIT_OK


def cmd_batch(args) -> int:
    in_dir = Path(args.input)
    if not in_dir.is_dir():
        raise CliError(EXIT_PARSE, f"{in_dir}: not a directory")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model_files = sorted(
        p for p in in_dir.iterdir()
        if p.suffix.lower() in (".step", ".stp", ".json") and p.is_file()
    )
    results = []
    all_ok = True
    for path in model_files:
        entry = {"file": path.name, "status": "ok", "report": None, "error": None}
        try:
            doc = _params_document(path, args)
            report_name = path.stem + ".report.json"
            _atomic_write(out_dir / report_name, _report.render_json(doc))
            entry["report"] = report_name
        except CliError as exc:
            entry["status"] = "error"
            entry["error"] = str(exc)
            all_ok = False
        results.append(entry)
    summary = {"schema_version": _report.SCHEMA_VERSION, "count": len(results), "results": results}
    _atomic_write(out_dir / "index.json", _report.render_json(summary))
    sys.stdout.write(
        f"processed {len(results)} model(s), "
        f"{sum(1 for r in results if r['status'] == 'ok')} ok, "
        f"{sum(1 for r in results if r['status'] != 'ok')} failed\n"
    )
    return EXIT_OK if all_ok else 1


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_input_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="model file (.step/.stp or .json)")
    p.add_argument("--input-format", choices=("auto", "step", "brep-json"), default="auto")
    p.add_argument("--out", help="output path (default: standard output)")


def _add_param_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--material", default="low_carbon_steel")
    p.add_argument("--tool", default="punching_press")
    p.add_argument("--materials-db", help="JSON materials database")
    p.add_argument("--tools-db", help="JSON tools database")
    p.add_argument("--kd", type=float, help="force coefficient override")
    p.add_argument("--h1-fraction", type=float, default=DEFAULT_H1_FRACTION,
                   help="shear penetration as a fraction of thickness")
    p.add_argument("--holding-fraction", type=float, default=DEFAULT_HOLDING_FRACTION,
                   help="blank holding force as a fraction of the peak force")
    p.add_argument("--cut-height", type=float,
                   help="tool travel for through cuts (default: sheet thickness)")
    p.add_argument("--format", choices=("json", "csv", "table"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="punchplan",
        description="Extract sheet-metal process parameters from part models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_inspect = sub.add_parser("inspect", help="entity/face diagnostics and manifold check")
    _add_input_args(p_inspect)
    p_inspect.set_defaults(func=cmd_inspect)

    p_features = sub.add_parser("features", help="list recognized features and edge classes")
    _add_input_args(p_features)
    p_features.add_argument("--cut-height", type=float)
    p_features.set_defaults(func=cmd_features)

    p_params = sub.add_parser("params", help="compute the process-parameter report")
    _add_input_args(p_params)
    _add_param_args(p_params)
    p_params.set_defaults(func=cmd_params)

    p_batch = sub.add_parser("batch", help="process every model file in a directory")
    p_batch.add_argument("input", help="directory of model files")
    p_batch.add_argument("--input-format", choices=("auto", "step", "brep-json"), default="auto")
    p_batch.add_argument("--out-dir", required=True, help="directory for per-model reports")
    _add_param_args(p_batch)
    p_batch.set_defaults(func=cmd_batch)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
