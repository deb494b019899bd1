#!/usr/bin/env python3
"""Regenerate the checked-in model fixtures under tests/fixtures/.

Writes one native-JSON B-Rep document per modelzoo fixture plus a Part-21
STEP file of the flat 100 x 80 x 2 sheet. Run from anywhere:

    python scripts/make_fixtures.py
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import modelzoo  # noqa: E402


def box_step_text(w: float = 100.0, d: float = 80.0, t: float = 2.0,
                  name: str = "flat_sheet_100x80x2") -> str:
    """Hand-built AP-203 style Part-21 text for a plain w x d x t box."""
    lines: list[str] = []
    counter = [0]

    def ent(text: str) -> int:
        counter[0] += 1
        lines.append(f"#{counter[0]}={text};")
        return counter[0]

    def fmt(x: float) -> str:
        s = repr(float(x))
        return s if "." in s or "e" in s else s + "."

    corners = [
        (0, 0, 0), (w, 0, 0), (w, d, 0), (0, d, 0),
        (0, 0, t), (w, 0, t), (w, d, t), (0, d, t),
    ]
    pts = [ent(f"CARTESIAN_POINT('',({fmt(x)},{fmt(y)},{fmt(z)}))") for x, y, z in corners]
    vts = [ent(f"VERTEX_POINT('',#{p})") for p in pts]

    # (start vertex, end vertex) index pairs: bottom ring, top ring, risers.
    edge_verts = [
        (0, 1), (1, 2), (2, 3), (3, 0),
        (4, 5), (5, 6), (6, 7), (7, 4),
        (0, 4), (1, 5), (2, 6), (3, 7),
    ]
    edges = []
    for a, b in edge_verts:
        ax, ay, az = corners[a]
        bx, by, bz = corners[b]
        length = ((bx - ax) ** 2 + (by - ay) ** 2 + (bz - az) ** 2) ** 0.5
        dx, dy, dz = (bx - ax) / length, (by - ay) / length, (bz - az) / length
        d_id = ent(f"DIRECTION('',({fmt(dx)},{fmt(dy)},{fmt(dz)}))")
        v_id = ent(f"VECTOR('',#{d_id},1.)")
        l_id = ent(f"LINE('',#{pts[a]},#{v_id})")
        edges.append(ent(f"EDGE_CURVE('',#{vts[a]},#{vts[b]},#{l_id},.T.)"))

    faces_spec = [
        # (normal, ref_dir, origin corner, [(edge index, sense), ...])
        ((0, 0, -1), (1, 0, 0), 0, [(3, False), (2, False), (1, False), (0, False)]),
        ((0, 0, 1), (1, 0, 0), 4, [(4, True), (5, True), (6, True), (7, True)]),
        ((0, -1, 0), (1, 0, 0), 0, [(0, True), (9, True), (4, False), (8, False)]),
        ((1, 0, 0), (0, 1, 0), 1, [(1, True), (10, True), (5, False), (9, False)]),
        ((0, 1, 0), (1, 0, 0), 2, [(2, True), (11, True), (6, False), (10, False)]),
        ((-1, 0, 0), (0, 1, 0), 3, [(3, True), (8, True), (7, False), (11, False)]),
    ]
    face_ids = []
    for normal, ref_dir, origin_idx, loop in faces_spec:
        n_id = ent(f"DIRECTION('',({fmt(normal[0])},{fmt(normal[1])},{fmt(normal[2])}))")
        r_id = ent(f"DIRECTION('',({fmt(ref_dir[0])},{fmt(ref_dir[1])},{fmt(ref_dir[2])}))")
        a_id = ent(f"AXIS2_PLACEMENT_3D('',#{pts[origin_idx]},#{n_id},#{r_id})")
        p_id = ent(f"PLANE('',#{a_id})")
        oes = [
            ent(f"ORIENTED_EDGE('',*,*,#{edges[ei]},{'.T.' if sense else '.F.'})")
            for ei, sense in loop
        ]
        loop_id = ent(f"EDGE_LOOP('',({','.join(f'#{o}' for o in oes)}))")
        bound_id = ent(f"FACE_OUTER_BOUND('',#{loop_id},.T.)")
        face_ids.append(ent(f"ADVANCED_FACE('',(#{bound_id}),#{p_id},.T.)"))

    shell = ent(f"CLOSED_SHELL('',({','.join(f'#{f}' for f in face_ids)}))")
    ent(f"MANIFOLD_SOLID_BREP('{name}',#{shell})")

    header = [
        "ISO-10303-21;",
        "HEADER;",
        "FILE_DESCRIPTION(('sheet metal part'),'2;1');",
        f"FILE_NAME('{name}','2026-08-08T00:00:00',('punchplan'),(''),'','','');",
        "FILE_SCHEMA(('CONFIG_CONTROL_DESIGN'));",
        "ENDSEC;",
        "DATA;",
    ]
    footer = ["ENDSEC;", "END-ISO-10303-21;"]
    return "\n".join(header + lines + footer) + "\n"


def main() -> None:
    out_dir = ROOT / "tests" / "fixtures"
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, build in modelzoo.FIXTURES.items():
        path = out_dir / f"{name}.json"
        path.write_text(json.dumps(build(), indent=1) + "\n", encoding="utf-8")
        print(f"wrote {path.relative_to(ROOT)}")
    step_path = out_dir / "flat_sheet_100x80x2.step"
    step_path.write_text(box_step_text(), encoding="utf-8")
    print(f"wrote {step_path.relative_to(ROOT)}")


if __name__ == "__main__":
    main()
