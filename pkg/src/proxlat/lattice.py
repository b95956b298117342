"""Finite distributive lattices, their duals, ideals and filters."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidStructure, SizeCapExceeded

MAX_LATTICE = 64


@dataclass
class Report:
    """Result of a validator: a list of human readable violations."""

    subject: str
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, msg: str) -> None:
        self.violations.append(msg)

    def extend(self, other: "Report") -> None:
        self.violations.extend(other.violations)

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return f"{self.subject}: ok"
        return f"{self.subject}: {len(self.violations)} violation(s)\n" + "\n".join(
            "  " + v for v in self.violations
        )


def transitive_closure(rel: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure of a square boolean matrix (Warshall)."""
    c = rel.copy() | np.eye(rel.shape[0], dtype=bool)
    for k in range(c.shape[0]):
        c |= c[:, k : k + 1] & c[k : k + 1, :]
    return c


class DistLattice:
    """A finite lattice given by its order matrix.

    Meet and join tables are materialised eagerly.  Entries are -1 where the
    glb/lub does not exist, so a malformed order can still be diagnosed by
    :func:`validate_lattice`.
    """

    def __init__(self, elements: Sequence[str], leq: np.ndarray, name: str = ""):
        if len(elements) > MAX_LATTICE:
            raise SizeCapExceeded(f"lattice has {len(elements)} elements (cap {MAX_LATTICE})")
        if len(set(elements)) != len(elements):
            raise InvalidStructure("duplicate element labels")
        self.elements = tuple(elements)
        self.name = name
        self.index = {e: i for i, e in enumerate(self.elements)}
        self.leq = np.asarray(leq, dtype=bool)
        self.leq.setflags(write=False)
        n = len(self.elements)
        self.meet = np.full((n, n), -1, dtype=np.int64)
        self.join = np.full((n, n), -1, dtype=np.int64)
        for i in range(n):
            for j in range(n):
                self.meet[i, j] = self._extremum(self.leq[:, i] & self.leq[:, j], greatest=True)
                self.join[i, j] = self._extremum(self.leq[i, :] & self.leq[j, :], greatest=False)
        self.bottom = self._extremum(np.ones(n, dtype=bool), greatest=False)
        self.top = self._extremum(np.ones(n, dtype=bool), greatest=True)

    def _extremum(self, candidates: np.ndarray, greatest: bool) -> int:
        idx = np.flatnonzero(candidates)
        for c in idx:
            if greatest and self.leq[idx, c].all():
                return int(c)
            if not greatest and self.leq[c, idx].all():
                return int(c)
        return -1

    @classmethod
    def from_hasse(cls, elements: Sequence[str], covers: Iterable[tuple[str, str]], name: str = ""):
        """Build from cover pairs ``(a, b)`` meaning ``a < b``."""
        elements = list(elements)
        index = {e: i for i, e in enumerate(elements)}
        rel = np.zeros((len(elements), len(elements)), dtype=bool)
        for a, b in covers:
            rel[index[a], index[b]] = True
        return cls(elements, transitive_closure(rel), name=name)

    @classmethod
    def chain(cls, labels: Sequence[str], name: str = ""):
        return cls.from_hasse(labels, zip(labels, labels[1:]), name=name)

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"DistLattice({self.name or '?'}, {list(self.elements)})"

    def __eq__(self, other):
        return (
            isinstance(other, DistLattice)
            and self.elements == other.elements
            and np.array_equal(self.leq, other.leq)
        )

    def __hash__(self):
        return hash((self.elements, self.leq.tobytes()))

    def idx(self, e) -> int:
        return e if isinstance(e, (int, np.integer)) else self.index[e]

    def le(self, a, b) -> bool:
        return bool(self.leq[self.idx(a), self.idx(b)])

    def big_meet(self, xs: Iterable[int]) -> int:
        acc = self.top
        for x in xs:
            acc = int(self.meet[acc, x])
        return acc

    def big_join(self, xs: Iterable[int]) -> int:
        acc = self.bottom
        for x in xs:
            acc = int(self.join[acc, x])
        return acc

    @cached_property
    def mask_meet(self) -> np.ndarray:
        """``mask_meet[m]`` is the meet of the elements whose bits are set in ``m``."""
        return self._fold_masks(self.meet, self.top)

    @cached_property
    def mask_join(self) -> np.ndarray:
        return self._fold_masks(self.join, self.bottom)

    def _fold_masks(self, table: np.ndarray, unit: int) -> np.ndarray:
        n = len(self)
        if n > 20:
            raise SizeCapExceeded(f"subset tables need |S| <= 20, got {n}")
        out = np.empty(1 << n, dtype=np.int64)
        out[0] = unit
        for m in range(1, 1 << n):
            low = m & -m
            out[m] = table[out[m ^ low], low.bit_length() - 1]
        return out

    def up(self, a: int) -> np.ndarray:
        return self.leq[a, :]

    def down(self, a: int) -> np.ndarray:
        return self.leq[:, a]

    def covers(self) -> list[tuple[int, int]]:
        n = len(self)
        lt = self.leq & ~np.eye(n, dtype=bool)
        out = []
        for i in range(n):
            for j in range(n):
                if lt[i, j] and not (lt[i, :] & lt[:, j]).any():
                    out.append((i, j))
        return out

    def is_chain(self) -> bool:
        return bool((self.leq | self.leq.T).all())


def validate_lattice(L: DistLattice) -> Report:
    rep = Report(f"lattice {L.name or ''}".strip())
    n = len(L)
    leq = L.leq
    E = L.elements
    for i in range(n):
        if not leq[i, i]:
            rep.add(f"reflexivity fails at {E[i]}")
    for i, j in zip(*np.nonzero(leq & leq.T)):
        if i < j:
            rep.add(f"antisymmetry fails: {E[i]} <= {E[j]} <= {E[i]}")
    comp = (leq.astype(np.int64) @ leq.astype(np.int64)) > 0
    for i, j in zip(*np.nonzero(comp & ~leq)):
        rep.add(f"transitivity fails between {E[i]} and {E[j]}")
    if L.bottom < 0:
        rep.add("no least element")
    if L.top < 0:
        rep.add("no greatest element")
    for i in range(n):
        for j in range(i, n):
            if L.meet[i, j] < 0:
                rep.add(f"no meet for ({E[i]}, {E[j]})")
            if L.join[i, j] < 0:
                rep.add(f"no join for ({E[i]}, {E[j]})")
    if not rep.ok:
        return rep
    for x, y, z in itertools.product(range(n), repeat=3):
        lhs = L.meet[x, L.join[y, z]]
        rhs = L.join[L.meet[x, y], L.meet[x, z]]
        if lhs != rhs:
            rep.add(
                f"distributivity fails at ({E[x]}, {E[y]}, {E[z]}): "
                f"{E[x]}^({E[y]}v{E[z]}) = {E[lhs]} but ({E[x]}^{E[y]})v({E[x]}^{E[z]}) = {E[rhs]}"
            )
            break
    return rep


def dual_lattice(L: DistLattice) -> DistLattice:
    return DistLattice(L.elements, L.leq.T.copy(), name=f"{L.name}^op" if L.name else "")


def _as_index_set(L: DistLattice, X: Iterable) -> frozenset[int]:
    return frozenset(L.idx(x) for x in X)


def is_ideal(L: DistLattice, I: Iterable) -> bool:
    I = _as_index_set(L, I)
    if L.bottom not in I:
        return False
    for a in I:
        if any(L.leq[b, a] and b not in I for b in range(len(L))):
            return False
    return all(int(L.join[a, b]) in I for a in I for b in I)


def is_filter(L: DistLattice, F: Iterable) -> bool:
    F = _as_index_set(L, F)
    if L.top not in F:
        return False
    for a in F:
        if any(L.leq[a, b] and b not in F for b in range(len(L))):
            return False
    return all(int(L.meet[a, b]) in F for a in F for b in F)


def principal_ideal(L: DistLattice, a: int) -> frozenset[int]:
    return frozenset(int(i) for i in np.flatnonzero(L.leq[:, a]))


def principal_filter(L: DistLattice, a: int) -> frozenset[int]:
    return frozenset(int(i) for i in np.flatnonzero(L.leq[a, :]))


def ideal_completion(L: DistLattice):
    """Frame of all ideals of ``L`` ordered by inclusion.

    In a finite lattice every ideal is principal, so the candidates are the
    principal ideals; each one is still checked against :func:`is_ideal`.  The
    join of two ideals is the ideal generated by their union, realised as
    ``{x : x <= a v b for some a in I, b in J}``.
    """
    from .spectra import Frame

    ideals = [principal_ideal(L, a) for a in range(len(L))]
    assert all(is_ideal(L, I) for I in ideals)

    def join(I, J):
        return frozenset(
            x for x in range(len(L)) if any(L.leq[x, L.join[a, b]] for a in I for b in J)
        )

    def meet(I, J):
        return I & J

    return Frame.from_sets(
        ideals, L.elements, join=join, meet=meet, name=f"Idl({L.name})" if L.name else "Idl"
    )
