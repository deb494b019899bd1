"""Sheet-level facts and deformation-feature recognition.

The chain is: compute the sheet thickness, pick the reference face (largest
planar face), pair the remaining faces into walls (planar pairs one
thickness apart) and bends (coaxial cylinder pairs one thickness apart in
radius), group paired faces into connected features, and measure each
feature's height above the reference plane.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from . import brep
from .brep import Cylinder, Face, Plane, Solid, face_area, face_normal
from .geom import FACING_DOT, TOL, Vec3, is_anti_parallel, is_parallel


class RecognitionError(Exception):
    """Base class for sheet-recognition failures."""


class NoParallelPairs(RecognitionError):
    def __init__(self) -> None:
        super().__init__("no anti-parallel same-kind face pair exists; not a sheet-metal solid")


class NoPlanarFace(RecognitionError):
    def __init__(self) -> None:
        super().__init__("the solid has no planar face to serve as reference face")


class NoOppositeFace(RecognitionError):
    def __init__(self, rf: int, t: float):
        super().__init__(f"no planar face anti-parallel to face {rf} at distance {t}")
        self.reference_face = rf
        self.thickness = t


class AmbiguousPairing(RecognitionError):
    def __init__(self, face_id: int, candidates: list[int]):
        super().__init__(
            f"face {face_id} qualifies for {len(candidates)} partners at the sheet "
            f"thickness: {sorted(candidates)}"
        )
        self.face_id = face_id
        self.candidates = sorted(candidates)


class NoParallelFeatureFace(RecognitionError):
    def __init__(self, feature_id: int):
        super().__init__(
            f"feature {feature_id} has no planar face parallel to the reference face; "
            "supply its height explicitly"
        )
        self.feature_id = feature_id


@dataclass(frozen=True)
class SheetMetrics:
    thickness: float
    reference_face: int
    reference_normal: Vec3
    opposite_face: int


class Role(enum.Enum):
    REFERENCE = "reference"
    WALL = "wall"
    BEND = "bend"
    SIDE = "side"


@dataclass(frozen=True)
class FaceRole:
    role: Role
    pair_id: int | None = None


@dataclass(frozen=True)
class FacePairing:
    roles: dict[int, FaceRole]
    pairs: dict[int, tuple[int, int]]  # pair id -> the two face ids

    def role_of(self, face_id: int) -> Role:
        return self.roles[face_id].role

    def is_member(self, face_id: int) -> bool:
        return self.roles[face_id].role in (Role.WALL, Role.BEND)


class FeatureKind(enum.Enum):
    FORMED = "formed"
    CUT = "cut"
    MIXED = "mixed"


@dataclass(frozen=True)
class SheetFeature:
    id: int
    member_faces: frozenset[int]
    kind: FeatureKind
    interior_loops: frozenset[int]
    height: float | None = None


# ---------------------------------------------------------------------------
# Thickness
# ---------------------------------------------------------------------------

def _plane_pair_distance(a: Face, b: Face) -> float | None:
    na, nb = face_normal(a), face_normal(b)
    if not is_anti_parallel(na, nb):
        return None
    assert isinstance(a.surface, Plane) and isinstance(b.surface, Plane)
    return abs((b.surface.origin - a.surface.origin).dot(na))


def _coaxial(a: Cylinder, b: Cylinder) -> bool:
    da, db = a.axis_dir, b.axis_dir
    if not (is_parallel(da, db) or is_anti_parallel(da, db)):
        return False
    offset = b.axis_point - a.axis_point
    return offset.cross(da).norm() <= TOL


def anti_parallel_pair_distances(solid: Solid) -> list[tuple[int, int, float]]:
    """All qualifying same-kind anti-parallel face pairs with their distances.

    Coplanar (zero-distance) pairs are excluded: opposed cut faces in the
    same plane carry no thickness information.
    """
    out: list[tuple[int, int, float]] = []
    faces = sorted(solid.faces.values(), key=lambda f: f.id)
    for i, a in enumerate(faces):
        for b in faces[i + 1:]:
            if isinstance(a.surface, Plane) and isinstance(b.surface, Plane):
                d = _plane_pair_distance(a, b)
            elif isinstance(a.surface, Cylinder) and isinstance(b.surface, Cylinder):
                if not _coaxial(a.surface, b.surface):
                    continue
                d = abs(a.surface.radius - b.surface.radius)
            else:
                continue
            if d is not None and d > TOL:
                out.append((a.id, b.id, d))
    return out


def compute_thickness(solid: Solid) -> float:
    """Minimum separation over anti-parallel same-kind face pairs."""
    pairs = anti_parallel_pair_distances(solid)
    if not pairs:
        raise NoParallelPairs()
    return min(d for _, _, d in pairs)


# ---------------------------------------------------------------------------
# Reference face
# ---------------------------------------------------------------------------

def select_reference_face(solid: Solid, thickness: float) -> int:
    """Largest planar face; co-maximal areas tie-break toward the smaller id."""
    areas = [(face_area(f, solid), f.id) for f in brep.planar_faces(solid)]
    if not areas:
        raise NoPlanarFace()
    best_area = max(a for a, _ in areas)
    co_maximal = [fid for a, fid in areas if math.isclose(a, best_area, rel_tol=1e-9)]
    return min(co_maximal)


def _opposite_face(solid: Solid, rf_id: int, thickness: float) -> int:
    rf = solid.faces[rf_id]
    n = face_normal(rf)
    candidates: list[tuple[float, int]] = []
    for f in brep.planar_faces(solid):
        if f.id == rf_id:
            continue
        if not is_anti_parallel(face_normal(f), n):
            continue
        assert isinstance(f.surface, Plane) and isinstance(rf.surface, Plane)
        d = abs((f.surface.origin - rf.surface.origin).dot(n))
        if abs(d - thickness) <= TOL:
            candidates.append((-face_area(f, solid), f.id))
    if not candidates:
        raise NoOppositeFace(rf_id, thickness)
    candidates.sort()
    return candidates[0][1]


def sheet_metrics(solid: Solid) -> SheetMetrics:
    """Thickness, reference face, its outward normal, and its opposite face."""
    t = compute_thickness(solid)
    rf = select_reference_face(solid, t)
    return SheetMetrics(
        thickness=t,
        reference_face=rf,
        reference_normal=face_normal(solid.faces[rf]),
        opposite_face=_opposite_face(solid, rf, t),
    )


# ---------------------------------------------------------------------------
# Pairing
# ---------------------------------------------------------------------------

def _face_sample_points(solid: Solid, face: Face) -> list[Vec3]:
    pts: list[Vec3] = []
    for lid, _ in face.bounds:
        for eid, _sense in solid.loops[lid].oriented_edges:
            e = solid.edges[eid]
            a, b = solid.vertex(e.start), solid.vertex(e.end)
            pts.append(a)
            pts.append(b)
            if isinstance(e.curve, brep.Circle):
                circ = e.curve
                if e.start == e.end:
                    sweep = 2.0 * math.pi
                else:
                    sweep = brep._arc_sweep(circ, a, b)
                u = a - circ.center
                u = (u - circ.axis * u.dot(circ.axis)).normalized()
                v = circ.axis.cross(u)
                for k in range(1, 8):
                    ang = sweep * k / 8.0
                    pts.append(circ.center + u * (circ.radius * math.cos(ang)) + v * (circ.radius * math.sin(ang)))
    return pts


def _interval(values: list[float]) -> tuple[float, float]:
    return min(values), max(values)


def _overlaps(a: tuple[float, float], b: tuple[float, float]) -> bool:
    return min(a[1], b[1]) - max(a[0], b[0]) > TOL


def _planes_face_each_other(solid: Solid, a: Face, b: Face) -> bool:
    # Plane separation alone treats planes as infinite; require the two
    # bounded faces to overlap when projected along the common normal.
    from .geom import plane_basis

    n = face_normal(a)
    u, v = plane_basis(n)
    pa = _face_sample_points(solid, a)
    pb = _face_sample_points(solid, b)
    au = _interval([p.dot(u) for p in pa])
    bu = _interval([p.dot(u) for p in pb])
    av = _interval([p.dot(v) for p in pa])
    bv = _interval([p.dot(v) for p in pb])
    return _overlaps(au, bu) and _overlaps(av, bv)


def _cylinders_face_each_other(solid: Solid, a: Face, b: Face) -> bool:
    assert isinstance(a.surface, Cylinder)
    axis = a.surface.axis_dir
    ia = _interval([p.dot(axis) for p in _face_sample_points(solid, a)])
    ib = _interval([p.dot(axis) for p in _face_sample_points(solid, b)])
    return _overlaps(ia, ib)


def _sort_measure(solid: Solid, face: Face) -> float:
    if isinstance(face.surface, Plane):
        return face_area(face, solid)
    pts = _face_sample_points(solid, face)
    lo, hi = _interval([p.dot(face.surface.axis_dir) for p in pts])
    return 2.0 * math.pi * face.surface.radius * (hi - lo)


def pair_faces(solid: Solid, metrics: SheetMetrics) -> FacePairing:
    """Assign every face a role: reference pair, wall pair, bend pair, or side face."""
    t = metrics.thickness
    roles: dict[int, FaceRole] = {
        metrics.reference_face: FaceRole(Role.REFERENCE),
        metrics.opposite_face: FaceRole(Role.REFERENCE),
    }
    pairs: dict[int, tuple[int, int]] = {}
    remaining = [f for f in solid.faces.values() if f.id not in roles]
    remaining.sort(key=lambda f: (-_sort_measure(solid, f), f.id))
    paired: set[int] = set()

    def qualifies(a: Face, b: Face) -> bool:
        if isinstance(a.surface, Plane) and isinstance(b.surface, Plane):
            d = _plane_pair_distance(a, b)
            return d is not None and abs(d - t) <= TOL and _planes_face_each_other(solid, a, b)
        if isinstance(a.surface, Cylinder) and isinstance(b.surface, Cylinder):
            return (
                _coaxial(a.surface, b.surface)
                and abs(abs(a.surface.radius - b.surface.radius) - t) <= TOL
                and _cylinders_face_each_other(solid, a, b)
            )
        return False

    next_pair = 1
    for f in remaining:
        if f.id in paired:
            continue
        candidates = [g for g in remaining if g.id != f.id and g.id not in paired and qualifies(f, g)]
        if len(candidates) > 1:
            raise AmbiguousPairing(f.id, [g.id for g in candidates])
        if candidates:
            g = candidates[0]
            kind = Role.WALL if isinstance(f.surface, Plane) else Role.BEND
            roles[f.id] = FaceRole(kind, next_pair)
            roles[g.id] = FaceRole(kind, next_pair)
            pairs[next_pair] = (f.id, g.id)
            paired.update((f.id, g.id))
            next_pair += 1
    for f in remaining:
        if f.id not in paired:
            roles[f.id] = FaceRole(Role.SIDE)
    return FacePairing(roles, pairs)


# ---------------------------------------------------------------------------
# Grouping
# ---------------------------------------------------------------------------

class _UnionFind:
    def __init__(self, items):
        self.parent = {i: i for i in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _adjacent_non_rf_face(solid: Solid, edge_id: int, rf_id: int) -> int | None:
    others = [fid for fid in solid.edge_uses[edge_id] if fid != rf_id]
    return others[0] if others else None


def group_features(solid: Solid, pairing: FacePairing, metrics: SheetMetrics) -> list[SheetFeature]:
    """Connect wall/bend faces into features and attach reference-face holes.

    Two member faces belong to the same feature when they share an edge or
    form a wall/bend pair (the two skins of one wall never touch directly;
    the pair relation is what joins them).
    """
    members = sorted(fid for fid in solid.faces if pairing.is_member(fid))
    uf = _UnionFind(members)
    for a, b in pairing.pairs.values():
        uf.union(a, b)
    member_set = set(members)
    for eid, uses in solid.edge_uses.items():
        shared = [fid for fid in uses if fid in member_set]
        for a, b in zip(shared, shared[1:]):
            uf.union(a, b)

    components: dict[int, set[int]] = {}
    for fid in members:
        components.setdefault(uf.find(fid), set()).add(fid)

    rf = solid.faces[metrics.reference_face]
    loop_attachment: dict[int, int | None] = {}
    loop_has_sheared_edge: dict[int, bool] = {}
    for lid in rf.inner_loops():
        attached_root: int | None = None
        sheared = False
        for eid, _ in sorted(solid.loops[lid].oriented_edges):
            other = _adjacent_non_rf_face(solid, eid, rf.id)
            if other is not None and other in member_set:
                if attached_root is None:
                    attached_root = uf.find(other)
            else:
                sheared = True
        loop_attachment[lid] = attached_root
        loop_has_sheared_edge[lid] = sheared

    features: list[SheetFeature] = []
    next_id = 1
    for root in sorted(components):
        faces = components[root]
        loops = {lid for lid, r in loop_attachment.items() if r == root}
        mixed = any(loop_has_sheared_edge[lid] for lid in loops)
        features.append(SheetFeature(
            id=next_id,
            member_faces=frozenset(faces),
            kind=FeatureKind.MIXED if mixed else FeatureKind.FORMED,
            interior_loops=frozenset(loops),
        ))
        next_id += 1
    for lid in sorted(lid for lid, r in loop_attachment.items() if r is None):
        features.append(SheetFeature(
            id=next_id,
            member_faces=frozenset(),
            kind=FeatureKind.CUT,
            interior_loops=frozenset({lid}),
        ))
        next_id += 1
    return features


def feature_height(
    solid: Solid,
    metrics: SheetMetrics,
    feature: SheetFeature,
    cut_height: float | None = None,
) -> float:
    """Maximum reference-plane distance of member faces facing the reference way.

    Cut features have no formed faces; the punch must traverse the sheet, so
    their height is the thickness (or the explicit cut_height override).
    """
    if feature.kind is FeatureKind.CUT:
        return cut_height if cut_height is not None else metrics.thickness
    rf = solid.faces[metrics.reference_face]
    assert isinstance(rf.surface, Plane)
    n = metrics.reference_normal
    origin = rf.surface.origin
    best: float | None = None
    for fid in sorted(feature.member_faces):
        f = solid.faces[fid]
        if not isinstance(f.surface, Plane):
            continue
        if face_normal(f).dot(n) <= FACING_DOT:
            continue
        d = abs((f.surface.origin - origin).dot(n))
        if best is None or d > best:
            best = d
    if best is None:
        raise NoParallelFeatureFace(feature.id)
    return best


def measure_heights(
    solid: Solid,
    metrics: SheetMetrics,
    features: list[SheetFeature],
    cut_height: float | None = None,
) -> tuple[list[SheetFeature], dict[int, str]]:
    """Fill in feature heights; unmeasurable features get an error note instead."""
    out: list[SheetFeature] = []
    errors: dict[int, str] = {}
    for f in features:
        try:
            out.append(replace(f, height=feature_height(solid, metrics, f, cut_height)))
        except NoParallelFeatureFace as exc:
            errors[f.id] = str(exc)
            out.append(f)
    return out, errors
