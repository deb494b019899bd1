"""Metric queries, manifold validation, and the native JSON loader."""
import json
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import modelzoo
import oracles
from conftest import solid_from
from punchplan import load_brep_json, load_step
from punchplan.brep import (
    Circle,
    DegenerateEdge,
    Edge,
    Line,
    NonManifoldEdge,
    NonPlanarFace,
    Plane,
    SchemaError,
    Solid,
    UnknownEdge,
    edge_adjacent_faces,
    edge_length,
    face_area,
    face_normal,
    validate_manifold,
)
from punchplan.geom import vec


def tiny_solid(edges_spec):
    """Solid holding loose edges (no faces); enough for edge_length tests."""
    vertices = {}
    edges = {}
    vid = 0

    def add_vertex(p):
        nonlocal vid
        vid += 1
        vertices[vid] = vec(*p)
        return vid

    for i, (curve, a, b) in enumerate(edges_spec, start=1):
        va = add_vertex(a)
        vb = va if a == b else add_vertex(b)
        edges[i] = Edge(i, curve, va, vb)
    return Solid("tiny", vertices, edges, {}, {})


# ---------------------------------------------------------------------------
# edge_length
# ---------------------------------------------------------------------------

def test_line_length_3_4_5():
    s = tiny_solid([(Line(vec(0, 0, 0), vec(0.6, 0.8, 0)), (0, 0, 0), (3, 4, 0))])
    assert edge_length(s.edges[1], s) == pytest.approx(5.0)


def test_full_circle_length():
    circ = Circle(vec(0, 0, 0), vec(0, 0, 1), 10.0)
    s = tiny_solid([(circ, (10, 0, 0), (10, 0, 0))])
    assert edge_length(s.edges[1], s) == pytest.approx(62.83185307179586, abs=1e-9)


def test_quarter_arc_length():
    circ = Circle(vec(0, 0, 0), vec(0, 0, 1), 2.0)
    s = tiny_solid([(circ, (2, 0, 0), (0, 2, 0))])
    assert edge_length(s.edges[1], s) == pytest.approx(math.pi, abs=1e-9)


def test_three_quarter_arc_uses_axis_orientation():
    # Same endpoints as the quarter arc but swept the other way round.
    circ = Circle(vec(0, 0, 0), vec(0, 0, -1), 2.0)
    s = tiny_solid([(circ, (2, 0, 0), (0, 2, 0))])
    assert edge_length(s.edges[1], s) == pytest.approx(3 * math.pi, abs=1e-9)


def test_degenerate_line_edge_rejected():
    s = tiny_solid([(Line(vec(0, 0, 0), vec(1, 0, 0)), (1, 1, 1), (1, 1, 1))])
    with pytest.raises(DegenerateEdge):
        edge_length(s.edges[1], s)


@given(st.floats(0.1, 0.9))
def test_line_split_lengths_add_up(frac):
    a, b = (0.0, 0.0, 0.0), (7.0, 3.0, 1.0)
    mid = tuple(a[i] + frac * (b[i] - a[i]) for i in range(3))
    d = vec(*b).normalized()
    whole = tiny_solid([(Line(vec(*a), d), a, b)])
    split = tiny_solid([(Line(vec(*a), d), a, mid), (Line(vec(*mid), d), mid, b)])
    total = edge_length(split.edges[1], split) + edge_length(split.edges[2], split)
    assert total == pytest.approx(edge_length(whole.edges[1], whole), rel=1e-9)


# ---------------------------------------------------------------------------
# face_area / face_normal
# ---------------------------------------------------------------------------

def test_unit_square_area():
    doc = modelzoo.flat_face_doc([(0, 0), (1, 0), (1, 1), (0, 1)])
    s = solid_from(doc)
    assert face_area(s.faces[1], s) == pytest.approx(1.0, abs=1e-12)


def test_rect_with_circular_hole_area():
    doc = modelzoo.flat_face_doc([(0, 0), (100, 0), (100, 80), (0, 80)],
                                 circle_holes=[(50, 40, 10)])
    s = solid_from(doc)
    expected = 8000.0 - math.pi * 100.0
    assert face_area(s.faces[1], s) == pytest.approx(expected, abs=1e-9)
    grid = oracles.grid_area([(0, 0), (100, 0), (100, 80), (0, 80)],
                             circle_holes=[(50, 40, 10)])
    assert face_area(s.faces[1], s) == pytest.approx(grid, rel=1e-3)


def test_l_hexagon_area():
    # Shoelace by hand: 4*2 + 2*2 = 12.
    doc = modelzoo.flat_face_doc([(0, 0), (4, 0), (4, 2), (2, 2), (2, 4), (0, 4)])
    s = solid_from(doc)
    assert face_area(s.faces[1], s) == pytest.approx(12.0, abs=1e-12)


def test_area_orientation_insensitive():
    cw = modelzoo.flat_face_doc([(0, 4), (2, 4), (2, 2), (4, 2), (4, 0), (0, 0)])
    s = solid_from(cw)
    assert face_area(s.faces[1], s) == pytest.approx(12.0, abs=1e-12)


def test_hole_subtraction_matches_standalone_areas():
    outer = [(0, 0), (100, 0), (100, 80), (0, 80)]
    rects = [(10, 10, 20, 18), (40, 30, 60, 50)]
    circles = [(80, 60, 6)]
    with_holes = solid_from(modelzoo.flat_face_doc(outer, rects, circles))
    outer_alone = solid_from(modelzoo.flat_face_doc(outer))
    hole_areas = 0.0
    for x0, y0, x1, y1 in rects:
        s = solid_from(modelzoo.flat_face_doc([(x0, y0), (x1, y0), (x1, y1), (x0, y1)]))
        hole_areas += face_area(s.faces[1], s)
    hole_areas += math.pi * 36.0
    assert face_area(with_holes.faces[1], with_holes) == pytest.approx(
        face_area(outer_alone.faces[1], outer_alone) - hole_areas, rel=1e-9
    )


def test_area_rigid_motion_invariant(bridge_sheet):
    doc = modelzoo.fixture_row4_bridge()
    rot = modelzoo.rot_axis_angle((1, 2, 3), 0.7)
    moved = solid_from(modelzoo.transform_doc(doc, rot, translate=(11.0, -3.0, 5.5)))
    for fid in bridge_sheet.faces:
        f = bridge_sheet.faces[fid]
        if isinstance(f.surface, Plane):
            assert face_area(moved.faces[fid], moved) == pytest.approx(
                face_area(f, bridge_sheet), rel=1e-6
            )


def test_arc_bounded_profile_area(l_bend):
    # 60x2 strip + quarter annulus between radii 5 and 7 + 20x2 leg.
    profile = next(
        f for f in l_bend.faces.values()
        if isinstance(f.surface, Plane) and abs(f.surface.normal.y) == 1.0
    )
    expected = 120.0 + (math.pi / 4) * (49.0 - 25.0) + 40.0
    assert face_area(profile, l_bend) == pytest.approx(expected, abs=1e-9)


def test_face_normal_respects_same_sense(flat_sheet):
    bottom = flat_sheet.faces[1]
    n = face_normal(bottom)
    assert (n.x, n.y, n.z) == pytest.approx((0, 0, -1))
    flipped = bottom.__class__(bottom.id, bottom.surface, False, bottom.bounds)
    nf = face_normal(flipped)
    assert (nf.x, nf.y, nf.z) == pytest.approx((0, 0, 1))


def test_face_normal_rejects_cylinder(hole_sheet):
    wall = next(f for f in hole_sheet.faces.values() if not isinstance(f.surface, Plane))
    with pytest.raises(NonPlanarFace):
        face_normal(wall)
    with pytest.raises(NonPlanarFace):
        face_area(wall, hole_sheet)


# ---------------------------------------------------------------------------
# adjacency and validation
# ---------------------------------------------------------------------------

def test_box_edge_adjacency(flat_sheet):
    # Edge 1 is the bottom y=0 edge, bounded by the bottom face and the y=0 wall.
    assert set(edge_adjacent_faces(flat_sheet, 1)) == {1, 3}


def test_hole_edge_adjacency(hole_sheet):
    circle_edge = next(e for e in hole_sheet.edges.values() if isinstance(e.curve, Circle))
    faces = set(edge_adjacent_faces(hole_sheet, circle_edge.id))
    wall = next(f.id for f in hole_sheet.faces.values() if not isinstance(f.surface, Plane))
    assert faces == {1, wall} or faces == {2, wall}


def test_unknown_and_non_manifold_edge(flat_sheet):
    with pytest.raises(UnknownEdge):
        edge_adjacent_faces(flat_sheet, 999)
    doc = modelzoo.box_doc()
    doc["faces"] = doc["faces"][:-1]
    open_shell = solid_from(doc)
    bad = next(eid for eid, uses in open_shell.edge_uses.items() if len(uses) != 2)
    with pytest.raises(NonManifoldEdge):
        edge_adjacent_faces(open_shell, bad)


def test_validate_clean_box(flat_sheet):
    assert validate_manifold(flat_sheet) == []


def test_validate_box_with_missing_face():
    doc = modelzoo.box_doc()
    doc["faces"] = doc["faces"][:-1]  # drop the x=0 wall
    report = validate_manifold(solid_from(doc))
    non_manifold = [v for v in report if v.kind == "non_manifold_edge"]
    assert len(non_manifold) == 4


def test_validate_open_loop():
    doc = modelzoo.box_doc()
    # Swap the sense of one oriented edge so the loop no longer chains.
    oe = doc["loops"][0]["oriented_edges"][1]
    oe["sense"] = not oe["sense"]
    report = validate_manifold(solid_from(doc))
    assert any(v.kind == "open_loop" for v in report)


def test_validate_endpoint_off_curve():
    circ = Circle(vec(0, 0, 0), vec(0, 0, 1), 5.0)
    s = tiny_solid([(circ, (5.5, 0, 0), (0, 5, 0))])
    report = validate_manifold(s)
    assert any(v.kind == "endpoint_off_curve" for v in report)


def test_oriented_edge_uses_are_twice_edge_count(flat_sheet, bridge_sheet, boss_sheet):
    for solid in (flat_sheet, bridge_sheet, boss_sheet):
        uses = sum(len(u) for u in solid.edge_uses.values())
        assert uses == 2 * len(solid.edges)


# ---------------------------------------------------------------------------
# native JSON loader
# ---------------------------------------------------------------------------

def test_load_box_json():
    s = solid_from(modelzoo.box_doc())
    assert len(s.faces) == 6


def test_schema_error_missing_faces():
    doc = modelzoo.box_doc()
    del doc["faces"]
    with pytest.raises(SchemaError) as exc:
        load_brep_json(json.dumps(doc))
    assert exc.value.path == "/faces"


def test_schema_error_paths():
    doc = modelzoo.box_doc()
    doc["edges"][0]["start"] = 999
    with pytest.raises(SchemaError) as exc:
        load_brep_json(json.dumps(doc))
    assert "start" in exc.value.path

    doc = modelzoo.box_doc()
    doc["faces"][0]["surface"]["kind"] = "sphere"
    with pytest.raises(SchemaError) as exc:
        load_brep_json(json.dumps(doc))
    assert exc.value.path.endswith("surface/kind")


def test_json_and_step_encodings_agree(step_sheet_text):
    from_step = load_step(step_sheet_text)
    from_json = solid_from(modelzoo.box_doc())
    areas_step = sorted(
        face_area(f, from_step) for f in from_step.faces.values()
    )
    areas_json = sorted(
        face_area(f, from_json) for f in from_json.faces.values()
    )
    for a, b in zip(areas_step, areas_json):
        assert a == pytest.approx(b, abs=1e-9)
    lens_step = sorted(edge_length(e, from_step) for e in from_step.edges.values())
    lens_json = sorted(edge_length(e, from_json) for e in from_json.edges.values())
    for a, b in zip(lens_step, lens_json):
        assert a == pytest.approx(b, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_area_grid_oracle_property(seed):
    rng = random.Random(seed)
    outer, rects, circles, exact = oracles.random_polygon_with_holes(rng)
    s = solid_from(modelzoo.flat_face_doc(outer, rects, circles))
    area = face_area(s.faces[1], s)
    assert area == pytest.approx(exact, rel=1e-9)
