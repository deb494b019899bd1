"""End-to-end pipeline and the report document emitters.

The report is a plain dict rendered to JSON (stable key order, byte-stable
across runs), CSV (fixed header), or an aligned text table. JSON carries
full double precision; CSV and the table round forces to whole newtons and
travels to three decimals.
"""
from __future__ import annotations

import io
import json
from dataclasses import dataclass

from . import classify as _classify
from . import features as _features
from .brep import Solid, Violation, validate_manifold
from .classify import Classification, EdgeClassTotals
from .features import FacePairing, SheetFeature, SheetMetrics
from .process import (
    DEFAULT_H1_FRACTION,
    DEFAULT_HOLDING_FRACTION,
    FeatureReport,
    build_report,
)
from .resources import MaterialSpec, ToolSpec

SCHEMA_VERSION = 1

CSV_HEADER = (
    "feature,kind,t,n_CEE,n_CIE,n_IIE,TLIIEs,TLCIEs,TLCEEs,h,Fs,Fd,Fh,H1,H2,capacity_ok"
)


@dataclass
class PartAnalysis:
    solid: Solid
    metrics: SheetMetrics
    pairing: FacePairing
    features: list[SheetFeature]
    classification: Classification
    totals: dict[int, EdgeClassTotals]
    height_errors: dict[int, str]
    violations: list[Violation]


def analyze_solid(solid: Solid, cut_height: float | None = None) -> PartAnalysis:
    """Run metrics, pairing, grouping, heights, and edge classification."""
    violations = validate_manifold(solid)
    metrics = _features.sheet_metrics(solid)
    pairing = _features.pair_faces(solid, metrics)
    grouped = _features.group_features(solid, pairing, metrics)
    feats, height_errors = _features.measure_heights(solid, metrics, grouped, cut_height)
    classification = _classify.classify_reference_edges(solid, metrics, pairing, feats)
    feature_totals = {
        feat.id: _classify.totals(classification.by_feature[feat.id], solid)
        for feat in feats
    }
    return PartAnalysis(
        solid=solid,
        metrics=metrics,
        pairing=pairing,
        features=feats,
        classification=classification,
        totals=feature_totals,
        height_errors=height_errors,
        violations=violations,
    )


@dataclass
class ReportSettings:
    kd: float | None = None
    h1_fraction: float = DEFAULT_H1_FRACTION
    holding_fraction: float = DEFAULT_HOLDING_FRACTION
    cut_height: float | None = None


def feature_reports(
    analysis: PartAnalysis,
    mat: MaterialSpec,
    tool: ToolSpec,
    settings: ReportSettings,
) -> list[FeatureReport]:
    pairs = [(feat, analysis.totals[feat.id]) for feat in analysis.features]
    return build_report(
        pairs,
        analysis.metrics.thickness,
        mat,
        tool,
        kd=settings.kd,
        h1_fraction=settings.h1_fraction,
        holding_fraction=settings.holding_fraction,
        height_errors=analysis.height_errors,
    )


def report_document(
    analysis: PartAnalysis,
    mat: MaterialSpec,
    tool: ToolSpec,
    settings: ReportSettings,
    warnings: list[str] | None = None,
) -> dict:
    """Assemble the versioned report document (JSON-ready, key order fixed)."""
    reports = feature_reports(analysis, mat, tool, settings)
    kd_used = tool.force_coefficient if settings.kd is None else settings.kd
    blocks = []
    for rep in reports:
        tot = rep.totals
        block = {
            "feature": rep.feature_id,
            "kind": rep.kind.value,
            "t": rep.thickness,
            "counts": {
                "CEE": tot.n_cee,
                "IEE": tot.n_iee,
                "CIE": tot.n_cie,
                "IIE": tot.n_iie,
            },
            "totals": {
                "TLIIEs": tot.tl_iie,
                "TLCIEs": tot.tl_cie,
                "TLCEEs": tot.tl_cee,
                "TLIEEs": tot.tl_iee,
            },
            "h": rep.height,
            "params": None if rep.params is None else {
                "Fs": rep.params.Fs,
                "Fd": rep.params.Fd,
                "Fh": rep.params.Fh,
                "H1": rep.params.H1,
                "H2": rep.params.H2,
            },
            "capacity_ok": rep.capacity_ok,
            "error": rep.error,
        }
        blocks.append(block)
    n = analysis.metrics.reference_normal
    return {
        "schema_version": SCHEMA_VERSION,
        "part": analysis.solid.name,
        "metrics": {
            "thickness": analysis.metrics.thickness,
            "reference_face": analysis.metrics.reference_face,
            "reference_normal": [n.x, n.y, n.z],
            "opposite_face": analysis.metrics.opposite_face,
        },
        "material": {
            "name": mat.name,
            "shear_stress": mat.shear_stress,
            "yield_stress": mat.yield_stress,
        },
        "tool": {
            "name": tool.name,
            "kind": tool.kind,
            "force_coefficient": tool.force_coefficient,
            "max_force": tool.max_force,
        },
        "settings": {
            "kd": kd_used,
            "h1_fraction": settings.h1_fraction,
            "holding_fraction": settings.holding_fraction,
            "cut_height": settings.cut_height,
        },
        "features": blocks,
        "warnings": list(warnings or []),
    }


def _fmt_len(x: float) -> str:
    return format(x, ".6g")


def _csv_row(block: dict) -> str:
    params = block["params"]
    if params is None:
        force_cols = ["", "", "", "", ""]
        cap = ""
    else:
        force_cols = [
            str(round(params["Fs"])),
            str(round(params["Fd"])),
            str(round(params["Fh"])),
            format(params["H1"], ".3f"),
            format(params["H2"], ".3f"),
        ]
        cap = "true" if block["capacity_ok"] else "false"
    h = "" if block["h"] is None else _fmt_len(block["h"])
    cols = [
        str(block["feature"]),
        block["kind"],
        _fmt_len(block["t"]),
        str(block["counts"]["CEE"]),
        str(block["counts"]["CIE"]),
        str(block["counts"]["IIE"]),
        _fmt_len(block["totals"]["TLIIEs"]),
        _fmt_len(block["totals"]["TLCIEs"]),
        _fmt_len(block["totals"]["TLCEEs"]),
        h,
        *force_cols,
        cap,
    ]
    return ",".join(cols)


def render_json(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def render_csv(doc: dict) -> str:
    lines = [CSV_HEADER]
    lines.extend(_csv_row(block) for block in doc["features"])
    return "\n".join(lines) + "\n"


def render_table(doc: dict) -> str:
    out = io.StringIO()
    m = doc["metrics"]
    out.write(f"part: {doc['part'] or '(unnamed)'}\n")
    out.write(
        f"t = {_fmt_len(m['thickness'])} mm   reference face {m['reference_face']}   "
        f"material {doc['material']['name']}   tool {doc['tool']['name']}\n"
    )
    header = CSV_HEADER.split(",")
    rows = [_csv_row(block).split(",") for block in doc["features"]]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(header)]
    out.write("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip() + "\n")
    for r in rows:
        out.write("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")
    for block in doc["features"]:
        if block["error"]:
            out.write(f"feature {block['feature']}: ERROR {block['error']}\n")
    for w in doc["warnings"]:
        out.write(f"warning: {w}\n")
    return out.getvalue()


RENDERERS = {"json": render_json, "csv": render_csv, "table": render_table}
