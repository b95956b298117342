"""The ``.pxl`` fixture format: a line-oriented description of a lattice or an axiom system.

Lattice fixtures::

    lattice C3
    elements 0 m 1
    hasse 0<m m<1
    prox
    0<m m<1 0<1 0<0 1<1

Axiom fixtures::

    entail E
    generators a b
    axiom a |- b
    axiom |- a b
    approx
    a<a b<b

Blank lines and ``#`` comments are ignored.  Pairs after ``prox`` or
``approx`` may continue over several lines.  A missing ``prox`` section
means the order itself; a missing ``approx`` section means equality.
``grid`` lines list exact rationals (``n/d`` or integers).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .constructions import RationalGrid
from .entail import AxiomSet, ApproxRel, SCEnt, scent_from_axioms
from .errors import InvalidStructure, ParseError
from .lattice import DistLattice, transitive_closure
from .prox import StrongProxLat
from .sets import Tagged, Universe, canon_finset, fraction_str

KEYWORDS = ("lattice", "elements", "hasse", "prox", "entail", "generators", "axiom", "approx", "grid")
NAME_RE = re.compile(r"[^\s<#|:{},]+")
RATIONAL_RE = re.compile(r"[+-]?\d+(/\d+)?")
TAGGED_RE = re.compile(r"(dia|box|bar):([^\s<#|:{},]+)")
VALUED_RE = re.compile(r"val:([+-]?\d+(?:/\d+)?):([^\s<#|:{},]+)")


def encode_symbol(x) -> str:
    """Fixture spelling of a generator: ``dia:a``, ``box:a``, ``bar:a``, ``val:1/2:a``, ``{a,b}``."""
    if isinstance(x, Tagged):
        if x.tag == "val":
            return f"val:{fraction_str(x.weight)}:{encode_symbol(x.base)}"
        return f"{x.tag}:{encode_symbol(x.base)}"
    if isinstance(x, tuple):
        return "{" + ",".join(encode_symbol(y) for y in x) + "}"
    return str(x)


def decode_symbol(tok: str):
    """Inverse of :func:`encode_symbol`; ``None`` if ``tok`` is not a valid spelling."""
    if NAME_RE.fullmatch(tok):
        return tok
    m = TAGGED_RE.fullmatch(tok)
    if m:
        return Tagged(m.group(1), m.group(2))
    m = VALUED_RE.fullmatch(tok)
    if m:
        return Tagged("val", m.group(2), Fraction(m.group(1)))
    if tok.startswith("{") and tok.endswith("}"):
        inner = tok[1:-1]
        parts = [decode_symbol(t) for t in inner.split(",")] if inner else []
        if all(p is not None and not isinstance(p, tuple) for p in parts):
            return canon_finset(parts)
    return None


@dataclass
class FixtureFile:
    kind: str  # "lattice" or "entail"
    name: str
    elements: list[str] = field(default_factory=list)
    covers: list[tuple[str, str]] = field(default_factory=list)
    prox: list[tuple[str, str]] | None = None
    generators: list[str] = field(default_factory=list)
    axioms: list[tuple[tuple[str, ...], tuple[str, ...]]] = field(default_factory=list)
    approx: list[tuple[str, str]] | None = None
    grid: RationalGrid | None = None
    path: str | None = None

    def symbols(self) -> list[str]:
        return self.elements if self.kind == "lattice" else self.generators

    def lattice(self) -> DistLattice:
        if self.kind != "lattice":
            raise InvalidStructure("not a lattice fixture")
        idx = {e: i for i, e in enumerate(self.elements)}
        rel = np.zeros((len(idx), len(idx)), dtype=bool)
        for a, b in self.covers:
            rel[idx[a], idx[b]] = True
        return DistLattice(self.elements, transitive_closure(rel), name=self.name)

    def prox_lattice(self) -> StrongProxLat:
        """The lattice with its approximation; validity is the caller's business."""
        L = self.lattice()
        if self.prox is None:
            return StrongProxLat.with_order(L, name=self.name)
        return StrongProxLat.from_pairs(L, self.prox, name=self.name)

    def scent(self) -> SCEnt:
        if self.kind != "entail":
            raise InvalidStructure("not an axiom fixture")
        dec = {g: decode_symbol(g) for g in self.generators}
        U = Universe(dec.values())
        ax = AxiomSet.build(U, [(tuple(dec[a] for a in A), tuple(dec[b] for b in B)) for A, B in self.axioms])
        if self.approx is None:
            p = ApproxRel.identity(U)
        else:
            p = ApproxRel.from_pairs(U, [(dec[a], dec[b]) for a, b in self.approx])
        return scent_from_axioms(ax, p, name=self.name)


def _tokens(line: str):
    """Whitespace separated tokens with 1-based columns; ``#`` starts a comment."""
    for m in re.finditer(r"\S+", line):
        if m.group().startswith("#"):
            return
        yield m.group(), m.start() + 1


def _name(tok: str, line: int, col: int) -> str:
    if not NAME_RE.fullmatch(tok):
        raise ParseError(f"bad name {tok!r}", line, col)
    return tok


def _generator(tok: str, line: int, col: int) -> str:
    if decode_symbol(tok) is None:
        raise ParseError(f"bad generator {tok!r}", line, col)
    return tok


def _pair(tok: str, line: int, col: int, known: dict[str, int]) -> tuple[str, str]:
    a, sep, b = tok.partition("<")
    if not sep or not a or not b:
        raise ParseError(f"expected a pair a<b, got {tok!r}", line, col)
    for part, offset in ((a, 0), (b, len(a) + 1)):
        if part not in known:
            raise ParseError(f"unknown symbol {part!r}", line, col + offset)
    return a, b


def parse_rational(tok: str, line: int = 0, col: int = 0) -> Fraction:
    if "." in tok or "e" in tok.lower():
        raise ParseError(f"decimal {tok!r} is not allowed; write rationals as n/d", line, col)
    if not RATIONAL_RE.fullmatch(tok):
        raise ParseError(f"bad rational {tok!r}", line, col)
    try:
        return Fraction(tok)
    except ZeroDivisionError:
        raise ParseError(f"zero denominator in {tok!r}", line, col) from None


def parse_fixture(text: str, path: str | None = None) -> FixtureFile:
    ff: FixtureFile | None = None
    section = None  # "prox" or "approx" while reading pairs
    known: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = list(_tokens(raw))
        if not toks:
            continue
        head, col = toks[0]
        rest = toks[1:]
        if head not in KEYWORDS:
            if section is None:
                raise ParseError(f"unknown keyword {head!r}", lineno, col)
            rest = toks
            head = section
        elif head in ("lattice", "entail"):
            if ff is not None:
                raise ParseError("only one structure per file", lineno, col)
            if len(rest) != 1:
                raise ParseError(f"expected `{head} NAME`", lineno, col)
            ff = FixtureFile(head, _name(rest[0][0], lineno, rest[0][1]), path=path)
            section = None
            continue
        if ff is None:
            raise ParseError("file must start with `lattice NAME` or `entail NAME`", lineno, col)
        if head == "grid":
            section = None
            if ff.grid is not None:
                raise ParseError("grid given twice", lineno, col)
            ff.grid = RationalGrid.of(parse_rational(t, lineno, c) for t, c in rest)
            continue
        lattice_kw = ("elements", "hasse", "prox")
        if (head in lattice_kw) != (ff.kind == "lattice"):
            raise ParseError(f"`{head}` is not allowed in a{'n' if ff.kind == 'entail' else ''} {ff.kind} fixture", lineno, col)
        if head in ("elements", "generators"):
            section = None
            if known:
                raise ParseError(f"`{head}` given twice", lineno, col)
            check = _name if head == "elements" else _generator
            names = [check(t, lineno, c) for t, c in rest]
            for (t, c) in rest:
                if t in known:
                    raise ParseError(f"duplicate symbol {t!r}", lineno, c)
                known[t] = len(known)
            if head == "elements":
                ff.elements = names
            else:
                ff.generators = names
        elif head == "hasse":
            section = None
            ff.covers += [_pair(t, lineno, c, known) for t, c in rest]
        elif head in ("prox", "approx"):
            if toks[0][0] == head:
                if getattr(ff, head) is not None and section != head:
                    raise ParseError(f"`{head}` given twice", lineno, col)
                section = head
                if getattr(ff, head) is None:
                    setattr(ff, head, [])
            getattr(ff, head).extend(_pair(t, lineno, c, known) for t, c in rest)
        elif head == "axiom":
            section = None
            words = [t for t, _ in rest]
            if words.count("|-") != 1:
                raise ParseError("an axiom needs exactly one `|-`", lineno, col)
            k = words.index("|-")
            for t, c in rest[:k] + rest[k + 1 :]:
                if t not in known:
                    raise ParseError(f"unknown symbol {t!r}", lineno, c)
            ff.axioms.append((tuple(words[:k]), tuple(words[k + 1 :])))
    if ff is None:
        raise ParseError("empty fixture", 1, 1)
    if not ff.symbols():
        raise ParseError(f"no {'elements' if ff.kind == 'lattice' else 'generators'} declared", 1, 1)
    return ff


def read_fixture(path: str) -> FixtureFile:
    with open(path, encoding="utf-8") as fh:
        return parse_fixture(fh.read(), path=path)


def _wrap(prefix: str, items: list[str], width: int = 8) -> list[str]:
    if not items:
        return [prefix]
    lines = []
    for k in range(0, len(items), width):
        lines.append(" ".join(([prefix] if k == 0 else []) + items[k : k + width]))
    return lines


def format_fixture(ff: FixtureFile) -> str:
    """Printer; ``parse_fixture(format_fixture(ff))`` gives back ``ff``."""
    out = [f"{ff.kind} {ff.name}"]
    if ff.kind == "lattice":
        out.append("elements " + " ".join(ff.elements))
        if ff.covers:
            out += _wrap("hasse", [f"{a}<{b}" for a, b in ff.covers])
        if ff.prox is not None:
            out.append("prox")
            if ff.prox:
                out += _wrap("", [f"{a}<{b}" for a, b in ff.prox])
    else:
        out.append("generators " + " ".join(ff.generators))
        for A, B in ff.axioms:
            out.append(" ".join(["axiom", *A, "|-", *B]))
        if ff.approx is not None:
            out.append("approx")
            if ff.approx:
                out += _wrap("", [f"{a}<{b}" for a, b in ff.approx])
    if ff.grid is not None:
        out.append("grid " + " ".join(fraction_str(p) for p in ff.grid))
    return "\n".join(line.strip() for line in out) + "\n"


def fixture_from_lattice(S: StrongProxLat, name: str | None = None) -> FixtureFile:
    L = S.lattice
    E = L.elements
    covers = [(E[a], E[b]) for a, b in L.covers()]
    prox = [(E[i], E[j]) for i, j in np.argwhere(S.m)]
    return FixtureFile("lattice", name or S.name or "S", list(E), covers, prox)


def fixture_from_scent(e: SCEnt, axioms: list | None = None, name: str | None = None) -> FixtureFile:
    """An axiom fixture for ``e``; by default its own axioms, if it has any."""
    U = e.universe
    gens = [encode_symbol(s) for s in U.symbols]
    if axioms is None:
        axioms = e.axioms.symbolic() if e.axioms is not None else []
    enc = [(tuple(map(encode_symbol, A)), tuple(map(encode_symbol, B))) for A, B in axioms]
    approx = [(encode_symbol(a), encode_symbol(b)) for a, b in e.approx.pairs()]
    return FixtureFile("entail", name or e.name or "E", generators=gens, axioms=enc, approx=approx)
