"""Per-feature manufacturing process parameters.

Shearing force comes from the isolated interior edge length, deformation
force from the common edge length, blank holding from whichever dominates.
When a feature shears material the tool first penetrates a fixed fraction
of the sheet (default one third) before the forming stroke.
"""
from __future__ import annotations

from dataclasses import dataclass

from .classify import EdgeClassTotals
from .features import FeatureKind, SheetFeature
from .resources import MaterialSpec, ToolSpec

DEFAULT_H1_FRACTION = 1.0 / 3.0
DEFAULT_HOLDING_FRACTION = 0.2


class ProcessError(Exception):
    pass


class NonPositiveThickness(ProcessError):
    def __init__(self, t: float):
        super().__init__(f"sheet thickness must be > 0, got {t}")
        self.thickness = t


class NegativeTravel(ProcessError):
    def __init__(self, h: float, h1: float):
        super().__init__(
            f"feature height {h} mm is smaller than the shear travel {h1:.6g} mm; "
            "the tool cannot complete the shear before reaching the feature height"
        )
        self.height = h
        self.h1 = h1


@dataclass(frozen=True)
class ProcessParameters:
    Fs: float  # shearing force, N
    Fd: float  # deformation force, N
    Fh: float  # blank holding force, N
    H1: float  # primary tool travel (shear penetration), mm
    H2: float  # secondary tool travel (forming), mm


def compute_process_parameters(
    tot: EdgeClassTotals,
    t: float,
    h: float,
    mat: MaterialSpec,
    kd: float,
    h1_fraction: float = DEFAULT_H1_FRACTION,
    holding_fraction: float = DEFAULT_HOLDING_FRACTION,
) -> ProcessParameters:
    """Forces and tool travels for one feature.

    With isolated interior edges present the primary travel is
    h1_fraction * t and the secondary travel is the remainder up to the
    feature height; otherwise the whole stroke is forming travel.
    """
    if not t > 0:
        raise NonPositiveThickness(t)
    fs = mat.shear_stress * t * tot.tl_iie
    fd = kd * mat.yield_stress * t * (tot.tl_cie + tot.tl_cee)
    fh = holding_fraction * max(fs, fd)
    if tot.n_iie > 0:
        h1 = h1_fraction * t
        if h < h1:
            raise NegativeTravel(h, h1)
        h2 = h - h1
    else:
        h1 = 0.0
        h2 = h
    return ProcessParameters(Fs=fs, Fd=fd, Fh=fh, H1=h1, H2=h2)


@dataclass(frozen=True)
class FeatureReport:
    feature_id: int
    kind: FeatureKind
    thickness: float
    totals: EdgeClassTotals
    height: float | None
    params: ProcessParameters | None
    material: str
    tool: str
    capacity_ok: bool | None
    error: str | None = None


def build_report(
    features: list[tuple[SheetFeature, EdgeClassTotals]],
    thickness: float,
    mat: MaterialSpec,
    tool: ToolSpec,
    kd: float | None = None,
    h1_fraction: float = DEFAULT_H1_FRACTION,
    holding_fraction: float = DEFAULT_HOLDING_FRACTION,
    height_errors: dict[int, str] | None = None,
) -> list[FeatureReport]:
    """One report entry per feature; a failing feature becomes an error entry
    without disturbing the others."""
    kd_used = tool.force_coefficient if kd is None else kd
    height_errors = height_errors or {}
    out: list[FeatureReport] = []
    for feat, tot in features:
        error = height_errors.get(feat.id)
        params: ProcessParameters | None = None
        capacity_ok: bool | None = None
        if error is None:
            try:
                if feat.height is None:
                    raise ProcessError("feature height is unknown")
                params = compute_process_parameters(
                    tot, thickness, feat.height, mat, kd_used,
                    h1_fraction=h1_fraction, holding_fraction=holding_fraction,
                )
                peak = max(params.Fs, params.Fd) + params.Fh
                capacity_ok = tool.max_force == 0 or peak <= tool.max_force
            except ProcessError as exc:
                error = str(exc)
                params = None
                capacity_ok = None
        out.append(FeatureReport(
            feature_id=feat.id,
            kind=feat.kind,
            thickness=thickness,
            totals=tot,
            height=feat.height,
            params=params,
            material=mat.name,
            tool=tool.name,
            capacity_ok=capacity_ok,
            error=error,
        ))
    return out
