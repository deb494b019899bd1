"""Material-property and machine-tool databases.

Both databases are JSON documents; loading merges user entries over the
built-in defaults (user wins, merge is idempotent). Lookups are
case-insensitive and suggest near-miss names on failure.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass


class ResourceError(Exception):
    pass


class ResourceSchemaError(ResourceError):
    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class DuplicateName(ResourceError):
    def __init__(self, name: str):
        super().__init__(f"name {name!r} defined more than once")
        self.name = name


class NotFound(ResourceError):
    def __init__(self, kind: str, name: str, suggestions: list[str]):
        msg = f"unknown {kind} {name!r}"
        if suggestions:
            msg += "; did you mean: " + ", ".join(suggestions)
        super().__init__(msg)
        self.kind = kind
        self.name = name
        self.suggestions = suggestions


@dataclass(frozen=True)
class MaterialSpec:
    name: str
    shear_stress: float  # tau, N/mm^2
    yield_stress: float  # Ys, N/mm^2


@dataclass(frozen=True)
class ToolSpec:
    name: str
    kind: str
    force_coefficient: float  # Kd, dimensionless
    max_force: float  # N; 0 means unlimited


# Kd = 1/3 reproduces every golden-row force figure for a plain punching press.
DEFAULT_KD = 1.0 / 3.0

_BUILTIN_MATERIALS = {
    "low_carbon_steel": MaterialSpec("low_carbon_steel", shear_stress=100.0, yield_stress=210.0),
}

_BUILTIN_TOOLS = {
    "punching_press": ToolSpec("punching_press", kind="punching_press",
                               force_coefficient=DEFAULT_KD, max_force=0.0),
}


def builtin_materials() -> dict[str, MaterialSpec]:
    return dict(_BUILTIN_MATERIALS)


def builtin_tools() -> dict[str, ToolSpec]:
    return dict(_BUILTIN_TOOLS)


def _positive(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ResourceSchemaError(path, f"expected a finite number, got {value!r}")
    if value <= 0:
        raise ResourceSchemaError(path, f"must be > 0, got {value}")
    return float(value)


def _non_negative(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ResourceSchemaError(path, f"expected a finite number, got {value!r}")
    if value < 0:
        raise ResourceSchemaError(path, f"must be >= 0, got {value}")
    return float(value)


def _name(entry: dict, path: str) -> str:
    name = entry.get("name")
    if not isinstance(name, str) or not name.strip():
        raise ResourceSchemaError(f"{path}/name", "expected a non-empty string")
    return name.strip().lower()


def _entries(text: str, key: str) -> list:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ResourceSchemaError("/", f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or key not in doc:
        raise ResourceSchemaError(f"/{key}", "missing required key")
    entries = doc[key]
    if not isinstance(entries, list):
        raise ResourceSchemaError(f"/{key}", "expected a list")
    return entries


def load_materials(text: str) -> dict[str, MaterialSpec]:
    """Parse {"materials": [...]} into a name-keyed map (names lower-cased)."""
    out: dict[str, MaterialSpec] = {}
    for i, entry in enumerate(_entries(text, "materials")):
        path = f"/materials/{i}"
        if not isinstance(entry, dict):
            raise ResourceSchemaError(path, "expected an object")
        name = _name(entry, path)
        if name in out:
            raise DuplicateName(name)
        if "shear_stress" not in entry:
            raise ResourceSchemaError(f"{path}/shear_stress", "missing required key")
        if "yield_stress" not in entry:
            raise ResourceSchemaError(f"{path}/yield_stress", "missing required key")
        out[name] = MaterialSpec(
            name=name,
            shear_stress=_positive(entry["shear_stress"], f"{path}/shear_stress"),
            yield_stress=_positive(entry["yield_stress"], f"{path}/yield_stress"),
        )
    return out


def load_tools(text: str) -> dict[str, ToolSpec]:
    """Parse {"tools": [...]} into a name-keyed map (names lower-cased)."""
    out: dict[str, ToolSpec] = {}
    for i, entry in enumerate(_entries(text, "tools")):
        path = f"/tools/{i}"
        if not isinstance(entry, dict):
            raise ResourceSchemaError(path, "expected an object")
        name = _name(entry, path)
        if name in out:
            raise DuplicateName(name)
        if "force_coefficient" not in entry:
            raise ResourceSchemaError(f"{path}/force_coefficient", "missing required key")
        kind = entry.get("kind", "punching_press")
        if not isinstance(kind, str):
            raise ResourceSchemaError(f"{path}/kind", "expected a string")
        out[name] = ToolSpec(
            name=name,
            kind=kind,
            force_coefficient=_positive(entry["force_coefficient"], f"{path}/force_coefficient"),
            max_force=_non_negative(entry.get("max_force", 0.0), f"{path}/max_force"),
        )
    return out


def merge(base: dict, extra: dict) -> dict:
    """User entries override built-ins; applying the same overlay twice is a no-op."""
    out = dict(base)
    out.update(extra)
    return out


def _edit_distance(a: str, b: str, cap: int = 3) -> int:
    if abs(len(a) - len(b)) > cap:
        return cap + 1
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def lookup(db: dict, name: str, kind: str):
    """Case-insensitive fetch; raises NotFound with names at edit distance <= 2."""
    key = name.strip().lower()
    if key in db:
        return db[key]
    suggestions = sorted(n for n in db if _edit_distance(key, n) <= 2)
    raise NotFound(kind, name, suggestions)
