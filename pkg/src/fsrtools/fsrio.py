"""The .fsr textual description language: parser and canonical serializer.

Line-oriented grammar (``#`` starts a comment, blank lines ignored)::

    fsr NAME
    complex (base|refined)
    vertex ID [marked]
    edge ID V1 V2
    tile ID E1+, E2-, ...
    carrier (vertex|edge|tile) SUB -> (vertex|edge|tile) BASE
    map tile SUB -> BASE offset K [reversed]
    map edge SUB -> BASE [reversed]
    map vertex SUB -> BASE

A document with only a base complex describes a standalone complex; one
with both blocks plus carrier and map lines describes a subdivision rule.
Serialization is canonical: sorted ids, fixed block order, single spaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .complexes import (Cell, Occurrence, SphereComplex, DiskComplex,
                        VERTEX, EDGE, TILE, make_disk)
from .rules import SubdivisionRule


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


@dataclass
class ComplexDecl:
    vertices: dict[str, bool] = field(default_factory=dict)   # id -> marked
    edges: dict[str, tuple[str, str]] = field(default_factory=dict)
    tiles: dict[str, list[Occurrence]] = field(default_factory=dict)

    def to_complex(self) -> SphereComplex:
        return SphereComplex(
            vertices=set(self.vertices),
            edges=dict(self.edges),
            tiles={t: list(w) for t, w in self.tiles.items()},
            marked={v for v, m in self.vertices.items() if m},
        )


@dataclass
class FsrDocument:
    name: str
    complexes: dict[str, ComplexDecl] = field(default_factory=dict)
    carrier: dict[Cell, Cell] = field(default_factory=dict)
    map_v: dict[str, str] = field(default_factory=dict)
    map_e: dict[str, tuple[str, bool]] = field(default_factory=dict)
    map_t: dict[str, tuple[str, int, bool]] = field(default_factory=dict)

    def is_rule(self) -> bool:
        return "refined" in self.complexes

    def to_rule(self) -> SubdivisionRule:
        if not self.is_rule():
            raise ValueError(f"document {self.name} has no refined complex")
        return SubdivisionRule(
            base=self.complexes["base"].to_complex(),
            refined=self.complexes["refined"].to_complex(),
            carrier=dict(self.carrier),
            sigma_v=dict(self.map_v),
            sigma_e=dict(self.map_e),
            sigma_t=dict(self.map_t),
            name=self.name,
        )

    def to_complex(self) -> SphereComplex:
        return self.complexes["base"].to_complex()

    def to_disk(self) -> DiskComplex:
        decl = self.complexes["base"]
        cx = decl.to_complex()
        return make_disk(cx.vertices, cx.edges, cx.tiles, cx.marked)


_KINDS = (VERTEX, EDGE, TILE)


def parse(text: str) -> FsrDocument:
    """Parse .fsr text; raises ParseError with a location on any defect."""
    doc: FsrDocument | None = None
    current: ComplexDecl | None = None

    def err(lineno: int, col: int, msg: str):
        raise ParseError(lineno, col, msg)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        tokens = line.split()
        head = tokens[0]
        col = raw.index(head) + 1
        if head == "fsr":
            if len(tokens) != 2:
                err(lineno, col, "expected: fsr NAME")
            if doc is not None:
                err(lineno, col, "duplicate fsr header")
            doc = FsrDocument(name=tokens[1])
            continue
        if doc is None:
            err(lineno, col, "missing fsr header")
        if head == "complex":
            if len(tokens) != 2 or tokens[1] not in ("base", "refined"):
                err(lineno, col, "expected: complex (base|refined)")
            if tokens[1] in doc.complexes:
                err(lineno, col, f"duplicate complex {tokens[1]}")
            current = ComplexDecl()
            doc.complexes[tokens[1]] = current
            continue
        if head in ("vertex", "edge", "tile"):
            if current is None:
                err(lineno, col, f"{head} outside a complex block")
            if head == "vertex":
                if len(tokens) not in (2, 3) or \
                        (len(tokens) == 3 and tokens[2] != "marked"):
                    err(lineno, col, "expected: vertex ID [marked]")
                if tokens[1] in current.vertices:
                    err(lineno, col, f"duplicate vertex {tokens[1]}")
                current.vertices[tokens[1]] = len(tokens) == 3
            elif head == "edge":
                if len(tokens) != 4:
                    err(lineno, col, "expected: edge ID V1 V2")
                if tokens[1] in current.edges:
                    err(lineno, col, f"duplicate edge {tokens[1]}")
                current.edges[tokens[1]] = (tokens[2], tokens[3])
            else:
                if len(tokens) < 3:
                    err(lineno, col, "expected: tile ID E1+, E2-, ...")
                if tokens[1] in current.tiles:
                    err(lineno, col, f"duplicate tile {tokens[1]}")
                rest = line.split(None, 2)[2]
                word: list[Occurrence] = []
                for item in rest.split(","):
                    item = item.strip()
                    if not item:
                        err(lineno, col, "empty occurrence in tile word")
                    if item[-1] not in "+-":
                        err(lineno, raw.index(item) + 1,
                            f"occurrence {item!r} must end with + or -")
                    word.append((item[:-1], item[-1] == "+"))
                current.tiles[tokens[1]] = word
            continue
        if head == "carrier":
            if len(tokens) != 6 or tokens[4] != "->" or \
                    tokens[1] not in _KINDS or tokens[3] not in _KINDS:
                err(lineno, col,
                    "expected: carrier (vertex|edge|tile) ID -> "
                    "(vertex|edge|tile) ID")
            doc.carrier[(tokens[1], tokens[2])] = (tokens[3], tokens[5])
            continue
        if head == "map":
            if len(tokens) < 5 or tokens[3] != "->" or tokens[1] not in _KINDS:
                err(lineno, col, "expected: map (vertex|edge|tile) SUB -> ...")
            kind, sub, target = tokens[1], tokens[2], tokens[4]
            rest = tokens[5:]
            if kind == "vertex":
                if rest:
                    err(lineno, col, "map vertex takes no modifiers")
                doc.map_v[sub] = target
            elif kind == "edge":
                if rest not in ([], ["reversed"]):
                    err(lineno, col, "map edge allows only 'reversed'")
                doc.map_e[sub] = (target, rest == ["reversed"])
            else:
                if not rest or rest[0] != "offset" or len(rest) < 2:
                    err(lineno, col, "map tile requires: offset K [reversed]")
                try:
                    offset = int(rest[1])
                except ValueError:
                    err(lineno, col, f"offset {rest[1]!r} is not an integer")
                tail = rest[2:]
                if tail not in ([], ["reversed"]):
                    err(lineno, col, "map tile allows only 'reversed' after "
                                     "the offset")
                doc.map_t[sub] = (target, offset, tail == ["reversed"])
            continue
        err(lineno, col, f"unknown directive {head!r}")

    if doc is None:
        raise ParseError(1, 1, "empty document (missing fsr header)")
    if "base" not in doc.complexes:
        raise ParseError(1, 1, f"document {doc.name} has no base complex")
    _check_references(doc)
    return doc


def _check_references(doc: FsrDocument) -> None:
    def err(msg):
        raise ParseError(0, 0, msg)

    for which, decl in doc.complexes.items():
        for e, (u, v) in decl.edges.items():
            for x in (u, v):
                if x not in decl.vertices:
                    err(f"{which}: edge {e} references undeclared vertex {x}")
        for t, word in decl.tiles.items():
            for e, _ in word:
                if e not in decl.edges:
                    err(f"{which}: tile {t} references undeclared edge {e}")
    if doc.is_rule():
        base, ref = doc.complexes["base"], doc.complexes["refined"]
        pools = {VERTEX: (ref.vertices, base.vertices),
                 EDGE: (ref.edges, base.edges), TILE: (ref.tiles, base.tiles)}
        for (k1, sub), (k2, tgt) in doc.carrier.items():
            if sub not in pools[k1][0]:
                err(f"carrier: undeclared refined {k1} {sub}")
            if tgt not in pools[k2][1]:
                err(f"carrier: undeclared base {k2} {tgt}")
        for sub, tgt in doc.map_v.items():
            if sub not in ref.vertices or tgt not in base.vertices:
                err(f"map vertex {sub} -> {tgt}: undeclared id")
        for sub, (tgt, _) in doc.map_e.items():
            if sub not in ref.edges or tgt not in base.edges:
                err(f"map edge {sub} -> {tgt}: undeclared id")
        for sub, (tgt, _, _) in doc.map_t.items():
            if sub not in ref.tiles or tgt not in base.tiles:
                err(f"map tile {sub} -> {tgt}: undeclared id")


def _emit_complex(lines: list[str], which: str, cx: SphereComplex) -> None:
    lines.append(f"complex {which}")
    for v in sorted(cx.vertices):
        lines.append(f"vertex {v} marked" if v in cx.marked else f"vertex {v}")
    for e in sorted(cx.edges):
        u, v = cx.edges[e]
        lines.append(f"edge {e} {u} {v}")
    for t in sorted(cx.tiles):
        word = ", ".join(f"{e}{'+' if d else '-'}" for e, d in cx.tiles[t])
        lines.append(f"tile {t} {word}")


def serialize(obj, name: str | None = None) -> str:
    """Canonical .fsr text for a rule, a complex, or a parsed document."""
    if isinstance(obj, FsrDocument):
        if obj.is_rule():
            return serialize(obj.to_rule(), name or obj.name)
        return serialize(obj.to_complex(), name or obj.name)
    lines: list[str] = []
    if isinstance(obj, SubdivisionRule):
        title = name or obj.name
        if not title:
            raise ValueError("rule has no name to serialize under")
        lines.append(f"fsr {title}")
        _emit_complex(lines, "base", obj.base)
        _emit_complex(lines, "refined", obj.refined)
        for (k1, sub), (k2, tgt) in sorted(obj.carrier.items()):
            lines.append(f"carrier {k1} {sub} -> {k2} {tgt}")
        for t in sorted(obj.sigma_t):
            tgt, offset, rev = obj.sigma_t[t]
            suffix = " reversed" if rev else ""
            lines.append(f"map tile {t} -> {tgt} offset {offset}{suffix}")
        for e in sorted(obj.sigma_e):
            tgt, rev = obj.sigma_e[e]
            suffix = " reversed" if rev else ""
            lines.append(f"map edge {e} -> {tgt}{suffix}")
        for v in sorted(obj.sigma_v):
            lines.append(f"map vertex {v} -> {obj.sigma_v[v]}")
    elif isinstance(obj, SphereComplex):
        title = name
        if not title:
            raise ValueError("complex has no name to serialize under")
        lines.append(f"fsr {title}")
        _emit_complex(lines, "base", obj)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    return "\n".join(lines) + "\n"


def load(path: str) -> FsrDocument:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


def save(path: str, obj, name: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(obj, name))
