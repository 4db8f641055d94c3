"""Line-oriented text format for systems of fans, sublattices and maps.

Example::

    toricsys 1
    rank 2
    chart 1: (1,0)
    chart 2: (0,1)
    glue 1 2: 0
    sublattice L: (1,-1)
    target T rank 1
    target T chart 1: (1)
    map P: (1,1) -> T

A chart or glue line lists maximal cones separated by ``|``; a cone is a list
of generators or ``0`` for the zero cone.  ``sublattice NAME: kernel ROWS``
defines the kernel of the matrix with the given rows.  A map lists the rows of
its matrix, names its target and optionally an index map ``index 1=2 2=2``.
``#`` starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .cone import Cone
from .lattice import LatticeMap, Sublattice, integer_kernel, saturate
from .sysfan import SystemOfFans

VERSION = "1"

Generators = tuple[tuple[int, ...], ...]


class DocumentError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message, self.line, self.column = message, line, column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


@dataclass
class FanBlock:
    rank: int
    charts: dict[int, list[Generators]] = field(default_factory=dict)
    glue: dict[tuple[int, int], list[Generators]] = field(default_factory=dict)

    def system(self) -> SystemOfFans:
        maxima = {(i, i): [Cone.from_generators(self.rank, g) for g in cones]
                  for i, cones in self.charts.items()}
        for (i, j), cones in self.glue.items():
            maxima[(i, j)] = [Cone.from_generators(self.rank, g) for g in cones]
        return SystemOfFans.from_maximal(self.rank, maxima, sorted(self.charts))


@dataclass
class SublatticeDecl:
    mode: str  # "span" or "kernel"
    vectors: Generators

    def sublattice(self, rank: int) -> Sublattice:
        if self.mode == "kernel":
            return Sublattice(rank, integer_kernel(self.vectors, rank))
        return saturate(self.vectors, rank)


@dataclass
class MapDecl:
    rows: Generators
    target: str
    index: dict[int, int] | None = None

    def lattice_map(self, source_rank: int) -> LatticeMap:
        return LatticeMap.from_rows(self.rows, source_rank)


@dataclass
class Document:
    version: str
    main: FanBlock
    sublattices: dict[str, SublatticeDecl] = field(default_factory=dict)
    targets: dict[str, FanBlock] = field(default_factory=dict)
    maps: dict[str, MapDecl] = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return self.main.rank

    def system(self) -> SystemOfFans:
        return self.main.system()


_VEC = re.compile(r"\(\s*(-?\d+(?:\s*,\s*-?\d+)*)?\s*\)")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


class _Line:
    def __init__(self, number: int, text: str):
        self.number, self.text = number, text

    def error(self, message: str, fragment: str | None = None) -> DocumentError:
        col = None
        if fragment is not None:
            pos = self.text.find(fragment)
            col = pos + 1 if pos >= 0 else None
        return DocumentError(message, self.number, col)


def _vectors(line: _Line, text: str, rank: int | None) -> Generators:
    text = text.strip()
    out = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _VEC.match(text, pos)
        if not m:
            raise line.error(f"expected a vector like (1,-2) near {text[pos:pos + 12]!r}", text[pos:pos + 12])
        entries = tuple(int(a) for a in m.group(1).split(",")) if m.group(1) else ()
        if rank is not None and len(entries) != rank:
            raise line.error(f"vector {m.group(0)} has {len(entries)} entries, expected {rank}", m.group(0))
        out.append(entries)
        pos = m.end()
    return tuple(out)


def _cones(line: _Line, text: str, rank: int) -> list[Generators]:
    cones = []
    for part in text.split("|"):
        part = part.strip()
        if part == "0":
            cones.append(())
        elif not part:
            raise line.error("empty cone; write 0 for the zero cone")
        else:
            cones.append(_vectors(line, part, rank))
    return cones


def _int(line: _Line, token: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise line.error(f"expected an integer, got {token!r}", token) from None


def _block_line(line: _Line, block: FanBlock, words: list[str], rest: str):
    kind = words[0]
    if kind == "chart" and len(words) == 2:
        i = _int(line, words[1])
        if i in block.charts:
            raise line.error(f"chart {i} defined twice", words[1])
        block.charts[i] = _cones(line, rest, block.rank)
    elif kind == "glue" and len(words) == 3:
        key = (_int(line, words[1]), _int(line, words[2]))
        if key in block.glue:
            raise line.error(f"glue {key[0]} {key[1]} defined twice", words[1])
        block.glue[key] = _cones(line, rest, block.rank)
    else:
        raise line.error(f"cannot parse {' '.join(words)!r}", words[0])


def parse(text: str) -> Document:
    lines = []
    for n, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if body.strip():
            lines.append(_Line(n, body))
    if not lines:
        raise DocumentError("empty document")
    head = lines[0].text.split()
    if len(head) != 2 or head[0] != "toricsys":
        raise lines[0].error("document must start with 'toricsys 1'", lines[0].text.strip())
    if head[1] != VERSION:
        raise lines[0].error(f"unsupported version {head[1]}", head[1])
    if len(lines) < 2 or not re.fullmatch(r"\s*rank\s+\d+\s*", lines[1].text):
        raise (lines[1] if len(lines) > 1 else lines[0]).error("second line must be 'rank <n>'")
    main = FanBlock(int(lines[1].text.split()[1]))
    doc = Document(VERSION, main)
    pending_maps: list[tuple[_Line, str, MapDecl]] = []

    for line in lines[2:]:
        head, colon, rest = line.text.partition(":")
        words = head.split()
        if not words:
            raise line.error("missing keyword")
        kind = words[0]
        if kind in ("chart", "glue"):
            if not colon:
                raise line.error("missing ':'")
            _block_line(line, main, words, rest)
        elif kind == "sublattice":
            if len(words) != 2 or not colon or not _NAME.match(words[1]):
                raise line.error("expected 'sublattice NAME: vectors'", kind)
            name = words[1]
            if name in doc.sublattices:
                raise line.error(f"sublattice {name} defined twice", name)
            rest = rest.strip()
            if rest.startswith("kernel"):
                rows = _vectors(line, rest[len("kernel"):], main.rank)
                doc.sublattices[name] = SublatticeDecl("kernel", rows)
            else:
                doc.sublattices[name] = SublatticeDecl("span", _vectors(line, rest, main.rank))
        elif kind == "target":
            if len(words) < 3 or not _NAME.match(words[1]):
                raise line.error("expected 'target NAME rank n' or 'target NAME chart/glue ...'", kind)
            name = words[1]
            if words[2] == "rank" and len(words) == 4 and not colon:
                if name in doc.targets:
                    raise line.error(f"target {name} defined twice", name)
                doc.targets[name] = FanBlock(_int(line, words[3]))
            else:
                if name not in doc.targets:
                    raise line.error(f"target {name} used before 'target {name} rank n'", name)
                if not colon:
                    raise line.error("missing ':'")
                _block_line(line, doc.targets[name], words[2:], rest)
        elif kind == "map":
            if len(words) != 2 or not colon or not _NAME.match(words[1]):
                raise line.error("expected 'map NAME: rows -> TARGET'", kind)
            name = words[1]
            if name in doc.maps:
                raise line.error(f"map {name} defined twice", name)
            matrix, arrow, tail = rest.partition("->")
            if not arrow:
                raise line.error("map needs '-> TARGET'")
            tail_words = tail.split()
            if not tail_words:
                raise line.error("map needs a target name after '->'")
            index = None
            if len(tail_words) > 1:
                if tail_words[1] != "index":
                    raise line.error(f"unexpected {tail_words[1]!r}", tail_words[1])
                index = {}
                for item in tail_words[2:]:
                    a, eq, b = item.partition("=")
                    if not eq:
                        raise line.error(f"expected i=j, got {item!r}", item)
                    index[_int(line, a)] = _int(line, b)
            decl = MapDecl(_vectors(line, matrix, main.rank), tail_words[0], index)
            doc.maps[name] = decl
            pending_maps.append((line, name, decl))
        else:
            raise line.error(f"unknown keyword {kind!r}", kind)

    if not main.charts:
        raise DocumentError("document defines no charts")
    for line, name, decl in pending_maps:
        if decl.target not in doc.targets:
            raise line.error(f"map {name} refers to unknown target {decl.target}", decl.target)
        if len(decl.rows) != doc.targets[decl.target].rank:
            raise line.error(f"map {name} has {len(decl.rows)} rows but its target has rank "
                             f"{doc.targets[decl.target].rank}")
    return doc


# ------------------------------------------------------------ emitting


def _fmt_vec(v) -> str:
    return "(" + ",".join(str(a) for a in v) + ")"


def _fmt_cones(cones) -> str:
    return " | ".join(" ".join(_fmt_vec(v) for v in g) if g else "0" for g in cones)


def _emit_block(block: FanBlock, prefix: str) -> list[str]:
    out = []
    for i in sorted(block.charts):
        out.append(f"{prefix}chart {i}: {_fmt_cones(block.charts[i])}")
    for i, j in sorted(block.glue):
        out.append(f"{prefix}glue {i} {j}: {_fmt_cones(block.glue[(i, j)])}")
    return out


def emit(doc: Document) -> str:
    out = [f"toricsys {doc.version}", f"rank {doc.rank}"]
    out += _emit_block(doc.main, "")
    for name in sorted(doc.sublattices):
        decl = doc.sublattices[name]
        vecs = " ".join(_fmt_vec(v) for v in decl.vectors)
        out.append(f"sublattice {name}: {'kernel ' if decl.mode == 'kernel' else ''}{vecs}".rstrip())
    for name in sorted(doc.targets):
        block = doc.targets[name]
        out.append(f"target {name} rank {block.rank}")
        out += _emit_block(block, f"target {name} ")
    for name in sorted(doc.maps):
        decl = doc.maps[name]
        line = f"map {name}: {' '.join(_fmt_vec(r) for r in decl.rows)} -> {decl.target}"
        if decl.index is not None:
            line += " index " + " ".join(f"{a}={b}" for a, b in sorted(decl.index.items()))
        out.append(line)
    return "\n".join(out) + "\n"


def document_from_system(S: SystemOfFans) -> Document:
    """A document describing S by maximal cones."""
    main = FanBlock(S.rank)
    for i in S.charts:
        main.charts[i] = [c.generators() for c in S.delta_max(i, i)]
    for i, j in S.pairs():
        if i < j:
            main.glue[(i, j)] = [c.generators() for c in S.delta_max(i, j)]
    return Document(VERSION, main)
