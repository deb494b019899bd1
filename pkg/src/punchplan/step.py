"""ISO 10303-21 clear-text reader and the AP-203 geometry subset resolver.

``parse_exchange`` turns a Part-21 file into an id -> entity map without
interpreting any schema; ``resolve_brep`` then walks the one
MANIFOLD_SOLID_BREP tree and builds a :class:`punchplan.brep.Solid`.

Only the geometry subset needed for sheet-metal parts is resolved
(points, directions, placements, lines, circles, planes, cylinders, and
the face/loop/edge/vertex topology). Anything else stays in the entity
map and is counted as ignored.

Coordinates are taken as millimetres; unit declarations are not applied.
A warning is recorded if the file declares a non-millimetre length unit.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Union

from .brep import Circle, Cylinder, Edge, Face, Line, Loop, Plane, Solid
from .geom import Vec3, vec


class StepError(Exception):
    """Base class for Part-21 reading errors."""


class StepSyntaxError(StepError):
    def __init__(self, line: int, column: int, expected: str, found: str = ""):
        detail = f" (found {found!r})" if found else ""
        super().__init__(f"line {line}, column {column}: expected {expected}{detail}")
        self.line = line
        self.column = column
        self.expected = expected


class MissingSection(StepError):
    def __init__(self, section: str):
        super().__init__(f"required section {section} is missing")
        self.section = section


class DuplicateEntityId(StepError):
    def __init__(self, entity_id: int):
        super().__init__(f"instance name #{entity_id} is defined more than once")
        self.entity_id = entity_id


class DanglingReference(StepError):
    def __init__(self, from_id: int, to_id: int):
        super().__init__(f"entity #{from_id} references #{to_id}, which does not exist")
        self.from_id = from_id
        self.to_id = to_id


class UnsupportedGeometry(StepError):
    def __init__(self, entity_id: int, keyword: str):
        super().__init__(f"entity #{entity_id} ({keyword}) is outside the supported geometry subset")
        self.entity_id = entity_id
        self.keyword = keyword


class MultipleSolids(StepError):
    def __init__(self, ids: list[int]):
        super().__init__(f"more than one MANIFOLD_SOLID_BREP present: {ids}")
        self.ids = ids


class MissingSolid(StepError):
    def __init__(self) -> None:
        super().__init__("no MANIFOLD_SOLID_BREP entity present")


SUPPORTED_ENTITIES = frozenset({
    "CARTESIAN_POINT", "DIRECTION", "AXIS2_PLACEMENT_3D", "VERTEX_POINT",
    "LINE", "CIRCLE", "VECTOR", "EDGE_CURVE", "ORIENTED_EDGE", "EDGE_LOOP",
    "FACE_BOUND", "FACE_OUTER_BOUND", "PLANE", "CYLINDRICAL_SURFACE",
    "ADVANCED_FACE", "CLOSED_SHELL", "MANIFOLD_SOLID_BREP",
})


class Unset:
    """The ``$`` placeholder."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "$"


class Derived:
    """The ``*`` placeholder."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "*"


UNSET = Unset()
DERIVED = Derived()


@dataclass(frozen=True)
class Ref:
    id: int

    def __repr__(self) -> str:
        return f"#{self.id}"


@dataclass(frozen=True)
class Enum:
    name: str

    def __repr__(self) -> str:
        return f".{self.name}."


@dataclass(frozen=True)
class SimpleEntity:
    keyword: str
    args: tuple


@dataclass(frozen=True)
class ComplexEntity:
    parts: tuple[tuple[str, tuple], ...]

    @property
    def keyword(self) -> str:
        return "+".join(kw for kw, _ in self.parts)


EntityRecord = Union[SimpleEntity, ComplexEntity]


@dataclass
class Header:
    description: str = ""
    name: str = ""
    schema: tuple[str, ...] = ()
    records: list[tuple[str, tuple]] = field(default_factory=list)


@dataclass
class ExchangeStructure:
    header: Header
    entities: dict[int, EntityRecord]
    ignored_keywords: Counter
    warnings: list[str]


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_PUNCT = set("();,=")


class _Token:
    __slots__ = ("kind", "value", "line", "col")

    def __init__(self, kind: str, value, line: int, col: int):
        self.kind = kind
        self.value = value
        self.line = line
        self.col = col

    def __repr__(self) -> str:  # debugging aid
        return f"<{self.kind} {self.value!r} @{self.line}:{self.col}>"


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _skip_ws_and_comments(self) -> None:
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch in " \t\r\n":
                self._advance()
            elif self.text.startswith("/*", self.pos):
                start_line, start_col = self.line, self.col
                self._advance(2)
                while self.pos < len(self.text) and not self.text.startswith("*/", self.pos):
                    self._advance()
                if self.pos >= len(self.text):
                    raise StepSyntaxError(start_line, start_col, "closing */ for comment")
                self._advance(2)
            else:
                return

    def next_token(self) -> _Token:
        self._skip_ws_and_comments()
        line, col = self.line, self.col
        if self.pos >= len(self.text):
            return _Token("eof", None, line, col)
        ch = self.text[self.pos]
        if ch in _PUNCT:
            self._advance()
            return _Token(ch, ch, line, col)
        if ch == "$":
            self._advance()
            return _Token("unset", UNSET, line, col)
        if ch == "*":
            self._advance()
            return _Token("derived", DERIVED, line, col)
        if ch == "#":
            self._advance()
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self._advance()
            if self.pos == start:
                raise StepSyntaxError(line, col, "entity id digits after '#'")
            return _Token("ref", int(self.text[start:self.pos]), line, col)
        if ch == "'":
            return self._string(line, col)
        if ch == ".":
            nxt = self.text[self.pos + 1] if self.pos + 1 < len(self.text) else ""
            if nxt.isdigit():
                return self._number(line, col)
            return self._enum(line, col)
        if ch.isdigit() or ch in "+-":
            return self._number(line, col)
        if ch.isalpha() or ch == "_":
            start = self.pos
            while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] in "_-"):
                self._advance()
            return _Token("keyword", self.text[start:self.pos], line, col)
        raise StepSyntaxError(line, col, "a Part-21 token", ch)

    def _string(self, line: int, col: int) -> _Token:
        # '' inside a string is a literal quote; backslash escapes pass through.
        self._advance()
        out: list[str] = []
        while True:
            if self.pos >= len(self.text):
                raise StepSyntaxError(line, col, "closing ' for string")
            ch = self.text[self.pos]
            if ch == "'":
                if self.text.startswith("''", self.pos):
                    out.append("'")
                    self._advance(2)
                    continue
                self._advance()
                return _Token("string", "".join(out), line, col)
            out.append(ch)
            self._advance()

    def _number(self, line: int, col: int) -> _Token:
        start = self.pos
        if self.text[self.pos] in "+-":
            self._advance()
        digits = 0
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self._advance()
            digits += 1
        is_real = False
        if self.pos < len(self.text) and self.text[self.pos] == ".":
            is_real = True
            self._advance()
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self._advance()
        if self.pos < len(self.text) and self.text[self.pos] in "eE":
            is_real = True
            self._advance()
            if self.pos < len(self.text) and self.text[self.pos] in "+-":
                self._advance()
            exp_digits = 0
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self._advance()
                exp_digits += 1
            if exp_digits == 0:
                raise StepSyntaxError(self.line, self.col, "exponent digits")
        if digits == 0 and not is_real:
            raise StepSyntaxError(line, col, "digits in number")
        raw = self.text[start:self.pos]
        if is_real:
            return _Token("real", float(raw), line, col)
        return _Token("integer", int(raw), line, col)

    def _enum(self, line: int, col: int) -> _Token:
        self._advance()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self._advance()
        if self.pos >= len(self.text) or self.text[self.pos] != ".":
            raise StepSyntaxError(line, col, "closing '.' for enumeration")
        name = self.text[start:self.pos]
        self._advance()
        if name == "T":
            return _Token("bool", True, line, col)
        if name == "F":
            return _Token("bool", False, line, col)
        return _Token("enum", Enum(name), line, col)


class _Parser:
    def __init__(self, text: str):
        self.scanner = _Scanner(text)
        self.tok = self.scanner.next_token()

    def _bump(self) -> _Token:
        tok = self.tok
        self.tok = self.scanner.next_token()
        return tok

    def _expect(self, kind: str, what: str | None = None) -> _Token:
        if self.tok.kind != kind:
            raise StepSyntaxError(self.tok.line, self.tok.col, what or kind, str(self.tok.value))
        return self._bump()

    def _expect_keyword(self, word: str) -> None:
        if self.tok.kind != "keyword" or self.tok.value != word:
            raise StepSyntaxError(self.tok.line, self.tok.col, word, str(self.tok.value))
        self._bump()

    def parse(self) -> ExchangeStructure:
        self._expect_keyword("ISO-10303-21")
        self._expect(";")
        if self.tok.kind != "keyword" or self.tok.value != "HEADER":
            raise MissingSection("HEADER")
        self._bump()
        self._expect(";")
        header = self._header_section()
        if self.tok.kind != "keyword" or self.tok.value != "DATA":
            raise MissingSection("DATA")
        self._bump()
        self._expect(";")
        entities = self._data_section()
        self._expect_keyword("END-ISO-10303-21")
        self._expect(";")
        warnings = _unit_warnings(entities)
        ignored = Counter()
        for rec in entities.values():
            for kw in (p[0] for p in rec.parts) if isinstance(rec, ComplexEntity) else (rec.keyword,):
                if kw not in SUPPORTED_ENTITIES:
                    ignored[kw] += 1
        return ExchangeStructure(header, entities, ignored, warnings)

    def _header_section(self) -> Header:
        header = Header()
        while True:
            if self.tok.kind == "keyword" and self.tok.value == "ENDSEC":
                self._bump()
                self._expect(";")
                return header
            if self.tok.kind == "eof":
                raise StepSyntaxError(self.tok.line, self.tok.col, "ENDSEC for HEADER")
            kw_tok = self._expect("keyword", "header entity keyword")
            args = self._arg_list()
            self._expect(";")
            header.records.append((kw_tok.value, args))
            if kw_tok.value == "FILE_DESCRIPTION" and args:
                if isinstance(args[0], tuple) and args[0] and isinstance(args[0][0], str):
                    header.description = args[0][0]
            elif kw_tok.value == "FILE_NAME" and args and isinstance(args[0], str):
                header.name = args[0]
            elif kw_tok.value == "FILE_SCHEMA" and args and isinstance(args[0], tuple):
                header.schema = tuple(s for s in args[0] if isinstance(s, str))

    def _data_section(self) -> dict[int, EntityRecord]:
        entities: dict[int, EntityRecord] = {}
        while True:
            if self.tok.kind == "keyword" and self.tok.value == "ENDSEC":
                self._bump()
                self._expect(";")
                return entities
            if self.tok.kind == "eof":
                raise StepSyntaxError(self.tok.line, self.tok.col, "ENDSEC for DATA")
            ref_tok = self._expect("ref", "instance name '#<id>'")
            if ref_tok.value <= 0:
                raise StepSyntaxError(ref_tok.line, ref_tok.col, "a positive instance name",
                                      f"#{ref_tok.value}")
            self._expect("=")
            if ref_tok.value in entities:
                raise DuplicateEntityId(ref_tok.value)
            if self.tok.kind == "(":
                entities[ref_tok.value] = self._complex_instance()
            else:
                kw_tok = self._expect("keyword", "entity keyword")
                args = self._arg_list()
                entities[ref_tok.value] = SimpleEntity(kw_tok.value, args)
            self._expect(";")

    def _complex_instance(self) -> ComplexEntity:
        self._expect("(")
        parts: list[tuple[str, tuple]] = []
        while self.tok.kind != ")":
            kw_tok = self._expect("keyword", "entity keyword inside complex instance")
            parts.append((kw_tok.value, self._arg_list()))
        self._expect(")")
        return ComplexEntity(tuple(parts))

    def _arg_list(self) -> tuple:
        self._expect("(")
        args: list = []
        if self.tok.kind == ")":
            self._bump()
            return tuple(args)
        while True:
            args.append(self._argument())
            if self.tok.kind == ",":
                self._bump()
                continue
            self._expect(")")
            return tuple(args)

    def _argument(self):
        tok = self.tok
        if tok.kind in ("string", "integer", "real", "bool", "enum", "unset", "derived"):
            self._bump()
            return tok.value
        if tok.kind == "ref":
            self._bump()
            return Ref(tok.value)
        if tok.kind == "(":
            return self._arg_list()
        if tok.kind == "keyword":
            # Typed parameter such as PARAMETER_VALUE(0.5): keep the payload.
            self._bump()
            inner = self._arg_list()
            return inner[0] if len(inner) == 1 else inner
        raise StepSyntaxError(tok.line, tok.col, "an argument", str(tok.value))


def _unit_warnings(entities: dict[int, EntityRecord]) -> list[str]:
    warnings: list[str] = []
    for eid, rec in entities.items():
        parts = rec.parts if isinstance(rec, ComplexEntity) else ((rec.keyword, rec.args),)
        for kw, args in parts:
            if kw != "SI_UNIT":
                continue
            names = [a.name for a in args if isinstance(a, Enum)]
            if "METRE" in names and "MILLI" not in names:
                warnings.append(
                    f"entity #{eid}: SI_UNIT declares a non-millimetre length unit"
                    " (coordinates are read as millimetres regardless)"
                )
    return warnings


def parse_exchange(text: str) -> ExchangeStructure:
    """Parse a Part-21 exchange file into header fields and the entity map."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Serialization (round-trip support)
# ---------------------------------------------------------------------------

def _fmt_real(x: float) -> str:
    s = repr(x)
    if "e" in s or "E" in s:
        mantissa, _, exp = s.partition("e" if "e" in s else "E")
        if "." not in mantissa:
            mantissa += "."
        return f"{mantissa}E{exp}"
    if "." not in s:
        s += "."
    return s


def _fmt_arg(value) -> str:
    if value is UNSET:
        return "$"
    if value is DERIVED:
        return "*"
    if isinstance(value, bool):
        return ".T." if value else ".F."
    if isinstance(value, Enum):
        return f".{value.name}."
    if isinstance(value, Ref):
        return f"#{value.id}"
    if isinstance(value, str):
        return "'" + value.replace("'", "''") + "'"
    if isinstance(value, float):
        return _fmt_real(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, tuple):
        return "(" + ",".join(_fmt_arg(a) for a in value) + ")"
    raise TypeError(f"cannot serialize argument {value!r}")


def _fmt_entity(rec: EntityRecord) -> str:
    if isinstance(rec, SimpleEntity):
        return f"{rec.keyword}({','.join(_fmt_arg(a) for a in rec.args)})"
    inner = " ".join(f"{kw}({','.join(_fmt_arg(a) for a in args)})" for kw, args in rec.parts)
    return f"( {inner} )"


def serialize_exchange(xs: ExchangeStructure) -> str:
    """Write the structure back to Part-21 text (stable entity-id order)."""
    lines = ["ISO-10303-21;", "HEADER;"]
    records = xs.header.records or [
        ("FILE_DESCRIPTION", ((xs.header.description,), "2;1")),
        ("FILE_NAME", (xs.header.name, "", ("",), ("",), "", "", "")),
        ("FILE_SCHEMA", (xs.header.schema,)),
    ]
    for kw, args in records:
        lines.append(f"{kw}({','.join(_fmt_arg(a) for a in args)});")
    lines.append("ENDSEC;")
    lines.append("DATA;")
    for eid in sorted(xs.entities):
        lines.append(f"#{eid}={_fmt_entity(xs.entities[eid])};")
    lines.append("ENDSEC;")
    lines.append("END-ISO-10303-21;")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Resolver
# ---------------------------------------------------------------------------

class _Resolver:
    def __init__(self, xs: ExchangeStructure):
        self.xs = xs
        self.vertices: dict[int, Vec3] = {}
        self.edges: dict[int, Edge] = {}
        self.loops: dict[int, Loop] = {}
        self.faces: dict[int, Face] = {}

    def _entity(self, from_id: int, ref) -> tuple[int, SimpleEntity]:
        if not isinstance(ref, Ref):
            raise UnsupportedGeometry(from_id, f"expected entity reference, got {ref!r}")
        rec = self.xs.entities.get(ref.id)
        if rec is None:
            raise DanglingReference(from_id, ref.id)
        if isinstance(rec, ComplexEntity):
            raise UnsupportedGeometry(ref.id, rec.keyword)
        return ref.id, rec

    def _expect(self, from_id: int, ref, keywords: tuple[str, ...]) -> tuple[int, SimpleEntity]:
        eid, rec = self._entity(from_id, ref)
        if rec.keyword not in keywords:
            raise UnsupportedGeometry(eid, rec.keyword)
        return eid, rec

    def _point(self, from_id: int, ref) -> Vec3:
        eid, rec = self._expect(from_id, ref, ("CARTESIAN_POINT",))
        coords = rec.args[1] if len(rec.args) > 1 else ()
        if not isinstance(coords, tuple) or len(coords) != 3:
            raise UnsupportedGeometry(eid, "CARTESIAN_POINT (needs 3 coordinates)")
        return vec(*(float(c) for c in coords))

    def _direction(self, from_id: int, ref) -> Vec3:
        eid, rec = self._expect(from_id, ref, ("DIRECTION",))
        comps = rec.args[1] if len(rec.args) > 1 else ()
        if not isinstance(comps, tuple) or len(comps) != 3:
            raise UnsupportedGeometry(eid, "DIRECTION (needs 3 components)")
        return vec(*(float(c) for c in comps)).normalized()

    def _axis2(self, from_id: int, ref) -> tuple[Vec3, Vec3]:
        eid, rec = self._expect(from_id, ref, ("AXIS2_PLACEMENT_3D",))
        point = self._point(eid, rec.args[1])
        axis = self._direction(eid, rec.args[2]) if isinstance(rec.args[2], Ref) else vec(0, 0, 1)
        return point, axis

    def _vertex(self, from_id: int, ref) -> int:
        eid, rec = self._expect(from_id, ref, ("VERTEX_POINT",))
        if eid not in self.vertices:
            self.vertices[eid] = self._point(eid, rec.args[1])
        return eid

    def _edge(self, from_id: int, ref) -> int:
        eid, rec = self._expect(from_id, ref, ("EDGE_CURVE",))
        if eid in self.edges:
            return eid
        v1 = self._vertex(eid, rec.args[1])
        v2 = self._vertex(eid, rec.args[2])
        curve_id, curve_rec = self._entity(eid, rec.args[3])
        same_sense = rec.args[4] if len(rec.args) > 4 else True
        if curve_rec.keyword == "LINE":
            pnt = self._point(curve_id, curve_rec.args[1])
            _, vec_rec = self._expect(curve_id, curve_rec.args[2], ("VECTOR",))
            direction = self._direction(curve_id, vec_rec.args[1])
            curve = Line(pnt, direction)
        elif curve_rec.keyword == "CIRCLE":
            center, axis = self._axis2(curve_id, curve_rec.args[1])
            radius = float(curve_rec.args[2])
            # Arcs are stored start-to-end CCW about the axis; a reversed
            # EDGE_CURVE flips the axis so that rule keeps holding.
            if same_sense is False:
                axis = -axis
            curve = Circle(center, axis, radius)
        else:
            raise UnsupportedGeometry(curve_id, curve_rec.keyword)
        self.edges[eid] = Edge(eid, curve, v1, v2)
        return eid

    def _oriented_edge(self, from_id: int, ref) -> tuple[int, bool]:
        eid, rec = self._expect(from_id, ref, ("ORIENTED_EDGE",))
        edge_id = self._edge(eid, rec.args[3])
        sense = rec.args[4] if len(rec.args) > 4 else True
        return edge_id, bool(sense)

    def _loop(self, from_id: int, ref, reverse: bool) -> int:
        eid, rec = self._expect(from_id, ref, ("EDGE_LOOP",))
        oriented = [self._oriented_edge(eid, oe) for oe in rec.args[1]]
        if reverse:
            oriented = [(e, not s) for e, s in reversed(oriented)]
        if eid in self.loops:
            if self.loops[eid].oriented_edges != tuple(oriented):
                # Same EDGE_LOOP used with both orientations: store a twin id.
                twin = -eid
                self.loops[twin] = Loop(twin, tuple(oriented))
                return twin
            return eid
        self.loops[eid] = Loop(eid, tuple(oriented))
        return eid

    def _face(self, from_id: int, ref) -> int:
        eid, rec = self._expect(from_id, ref, ("ADVANCED_FACE",))
        if eid in self.faces:
            return eid
        bounds: list[tuple[int, bool]] = []
        for bref in rec.args[1]:
            bid, brec = self._expect(eid, bref, ("FACE_BOUND", "FACE_OUTER_BOUND"))
            orientation = brec.args[2] if len(brec.args) > 2 else True
            loop_id = self._loop(bid, brec.args[1], reverse=orientation is False)
            bounds.append((loop_id, brec.keyword == "FACE_OUTER_BOUND"))
        surf_id, surf_rec = self._entity(eid, rec.args[2])
        if surf_rec.keyword == "PLANE":
            origin, normal = self._axis2(surf_id, surf_rec.args[1])
            surface = Plane(origin, normal)
        elif surf_rec.keyword == "CYLINDRICAL_SURFACE":
            point, axis = self._axis2(surf_id, surf_rec.args[1])
            surface = Cylinder(point, axis, float(surf_rec.args[2]))
        else:
            raise UnsupportedGeometry(surf_id, surf_rec.keyword)
        same_sense = rec.args[3] if len(rec.args) > 3 else True
        if not any(outer for _, outer in bounds) and len(bounds) == 1:
            # Single FACE_BOUND: treat it as the outer bound.
            bounds[0] = (bounds[0][0], True)
        self.faces[eid] = Face(eid, surface, bool(same_sense), tuple(bounds))
        return eid

    def resolve(self) -> Solid:
        solids = [
            (eid, rec) for eid, rec in self.xs.entities.items()
            if isinstance(rec, SimpleEntity) and rec.keyword == "MANIFOLD_SOLID_BREP"
        ]
        if not solids:
            raise MissingSolid()
        if len(solids) > 1:
            raise MultipleSolids(sorted(eid for eid, _ in solids))
        brep_id, brep_rec = solids[0]
        name = brep_rec.args[0] if brep_rec.args and isinstance(brep_rec.args[0], str) else ""
        shell_id, shell_rec = self._expect(brep_id, brep_rec.args[1], ("CLOSED_SHELL",))
        for fref in shell_rec.args[1]:
            self._face(shell_id, fref)
        return Solid(name, self.vertices, self.edges, self.loops, self.faces)


def resolve_brep(xs: ExchangeStructure) -> Solid:
    """Resolve the single MANIFOLD_SOLID_BREP entity tree into a Solid."""
    return _Resolver(xs).resolve()


def load_step(text: str) -> Solid:
    """Convenience: parse Part-21 text and resolve its solid."""
    return resolve_brep(parse_exchange(text))
