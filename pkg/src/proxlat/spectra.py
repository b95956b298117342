"""Finite spectra: frames of rounded ideals and upsets, points, models."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .entail import ApproxRel, EntailRel, SCEnt, UpperRel
from .errors import InvalidStructure, SizeCapExceeded
from .lattice import MAX_LATTICE, DistLattice, is_filter, is_ideal, validate_lattice
from .prox import ProxMap, StrongProxLat, is_join_preserving_map
from .sets import FinSubset, Universe, format_subset

POINT_CAP = 16

SetOp = Callable[[frozenset, frozenset], frozenset]


def ordered_label(labels: Sequence, X: Iterable[int]) -> str:
    """``{x,y}`` listing members in the order of ``labels`` (lattice order, not name order)."""
    return "{" + ",".join(str(labels[i]) for i in sorted(X)) + "}"


class Frame:
    """A finite frame whose elements are sets of indices into ``labels``, ordered by inclusion."""

    def __init__(self, sets: Sequence[frozenset], labels: Sequence, name: str = ""):
        self.labels = tuple(labels)
        self.sets = tuple(sorted(set(sets), key=lambda X: (len(X), sorted(X))))
        if len(self.sets) > MAX_LATTICE:
            raise SizeCapExceeded(f"frame has {len(self.sets)} elements (cap {MAX_LATTICE})")
        self.index = {X: k for k, X in enumerate(self.sets)}
        n = len(self.sets)
        leq = np.array([[X <= Y for Y in self.sets] for X in self.sets], dtype=bool).reshape(n, n)
        self.lattice = DistLattice([self.member_label(X) for X in self.sets], leq, name=name)
        self.name = name
        rep = validate_lattice(self.lattice)
        if not rep.ok:
            raise InvalidStructure(f"not a finite frame: {rep}")

    @classmethod
    def from_sets(
        cls,
        sets: Iterable[Iterable[int]],
        labels: Sequence,
        join: SetOp | None = None,
        meet: SetOp | None = None,
        name: str = "",
    ) -> "Frame":
        """Build and check that the given ``join``/``meet`` formulas are the inclusion lub/glb."""
        F = cls([frozenset(X) for X in sets], labels, name=name)
        for op, table, what in ((join, F.lattice.join, "join"), (meet, F.lattice.meet, "meet")):
            if op is None:
                continue
            for i, X in enumerate(F.sets):
                for j, Y in enumerate(F.sets):
                    got = frozenset(op(X, Y))
                    want = F.sets[table[i, j]]
                    if got != want:
                        raise InvalidStructure(
                            f"{what} formula gives {F.member_label(got)} for "
                            f"{F.member_label(X)}, {F.member_label(Y)}; the {what} in the order is {F.member_label(want)}"
                        )
        return F

    def member_label(self, X: Iterable[int]) -> str:
        return ordered_label(self.labels, X)

    def members(self, k: int) -> tuple:
        return tuple(self.labels[i] for i in sorted(self.sets[k]))

    @property
    def elements(self) -> tuple:
        return self.lattice.elements

    def __len__(self):
        return len(self.sets)

    def __repr__(self):
        return f"Frame({self.name or '?'}, {len(self)} elements)"


# ---------------------------------------------------------------- rounded ideals and upsets


def is_rounded_ideal(S: StrongProxLat, I: Iterable[int]) -> bool:
    """An ideal with ``a in I`` iff ``a < b`` for some ``b in I``."""
    I = frozenset(I)
    if not is_ideal(S.lattice, I):
        return False
    p = S.m
    return all((a in I) == any(p[a, b] for b in I) for a in range(len(S)))


def rounded_ideals(S: StrongProxLat) -> Frame:
    """Rounded ideals; in a finite lattice every ideal is principal."""
    L, p = S.lattice, S.m
    cands = [frozenset(int(i) for i in np.flatnonzero(L.leq[:, c])) for c in range(len(L))]
    ideals = [I for I in cands if is_rounded_ideal(S, I)]

    def down(x: int) -> frozenset:
        return frozenset(int(i) for i in np.flatnonzero(p[:, x]))

    def join(I, J):
        out = frozenset()
        for a in I:
            for b in J:
                out |= down(int(L.join[a, b]))
        return out

    return Frame.from_sets(
        ideals, L.elements, join=join, meet=frozenset.__and__, name=f"RIdl({S.name})" if S.name else "RIdl"
    )


def is_rounded_upset(S: StrongProxLat, U: Iterable[int]) -> bool:
    U = frozenset(U)
    p = S.m
    return all((a in U) == any(p[b, a] for b in U) for a in range(len(S)))


def scott_upsets(S: StrongProxLat) -> Frame:
    """Rounded upper sets: unions of the sets ``{b : a < b}``."""
    L, p = S.lattice, S.m

    def up(x: int) -> frozenset:
        return frozenset(int(i) for i in np.flatnonzero(p[x, :]))

    family = {frozenset()}
    for a in range(len(L)):
        g = up(a)
        family |= {X | g for X in family}
        if len(family) > MAX_LATTICE:
            raise SizeCapExceeded(f"more than {MAX_LATTICE} rounded upsets")
    assert all(is_rounded_upset(S, U) for U in family)

    def meet(U, V):
        out = frozenset()
        for a in U:
            for b in V:
                out |= up(int(L.join[a, b]))
        return out

    F = Frame.from_sets(family, L.elements, join=frozenset.__or__, meet=meet, name=f"Ups({S.name})" if S.name else "Ups")
    if F.sets[F.lattice.top] != up(L.bottom):
        raise InvalidStructure("top rounded upset differs from the upset of 0")
    return F


def filters_frame(F: Frame | DistLattice) -> Frame:
    """All filters of a finite frame, by inclusion.

    Filters are inhabited (they contain the top), so the least one is ``{1}``
    and the improper filter is the greatest.  Every filter of a finite lattice
    is principal.
    """
    L = F.lattice if isinstance(F, Frame) else F
    filters = [frozenset(int(i) for i in np.flatnonzero(L.leq[c, :])) for c in range(len(L))]
    assert all(is_filter(L, X) for X in filters)

    def join(X, Y):
        m = L.big_meet([L.big_meet(X), L.big_meet(Y)])
        return frozenset(int(i) for i in np.flatnonzero(L.leq[m, :]))

    return Frame.from_sets(filters, L.elements, join=join, meet=frozenset.__and__, name=f"Filt({L.name})" if L.name else "Filt")


# ---------------------------------------------------------------- points and models


@dataclass(frozen=True)
class Point:
    """A rounded prime filter; members are listed in lattice order."""

    filter: tuple

    def __str__(self):
        return "{" + ",".join(map(str, self.filter)) + "}"


@dataclass(frozen=True)
class Model:
    alpha: FinSubset

    def __str__(self):
        return format_subset(self.alpha)


def is_point(S: StrongProxLat, F: Iterable[int]) -> bool:
    """Rounded prime filter: a proper filter, prime, with ``a in F`` iff ``b < a`` for some ``b in F``."""
    L, p = S.lattice, S.m
    F = frozenset(F)
    if not is_filter(L, F) or L.bottom in F:
        return False
    n = len(L)
    for x in range(n):
        for y in range(x, n):
            if int(L.join[x, y]) in F and x not in F and y not in F:
                return False
    return all((a in F) == any(p[b, a] for b in F) for a in range(n))


def points(S: StrongProxLat) -> list[Point]:
    L = S.lattice
    if len(L) > 64:
        raise SizeCapExceeded("points need |S| <= 64")
    found = []
    for c in range(len(L)):
        F = frozenset(int(i) for i in np.flatnonzero(L.leq[c, :]))
        if is_point(S, F):
            found.append(sorted(F))
    found.sort(key=lambda F: (len(F), F))
    return [Point(tuple(L.elements[i] for i in F)) for F in found]


def is_model_of_scent(e: SCEnt, alpha: int) -> bool:
    p = e.approx
    if alpha not in e.ent.models:
        return False
    for i in range(e.universe.n):
        if alpha >> i & 1:
            if p.up[i] & ~alpha:
                return False
            if not p.down[i] & alpha:
                return False
    return True


def model_masks(e: SCEnt) -> list[int]:
    if e.universe.n > 24:
        raise SizeCapExceeded("model enumeration needs at most 24 generators")
    masks = [a for a in e.ent.models if is_model_of_scent(e, a)]
    return e.universe.sorted_masks(masks)


def models_of_scent(e: SCEnt) -> list[Model]:
    return [Model(e.universe.subset(a)) for a in model_masks(e)]


ONE_UNIVERSE = Universe(())


def terminal_scent() -> SCEnt:
    """``(empty, overlap, =)``: one model, the empty set."""
    return SCEnt(EntailRel.overlap(ONE_UNIVERSE), ApproxRel.identity(ONE_UNIVERSE), name="1")


def model_to_map(alpha: Model | Iterable, e: SCEnt) -> ProxMap:
    """``{} r A`` iff ``alpha`` meets ``A``."""
    syms = alpha.alpha if isinstance(alpha, Model) else tuple(alpha)
    a = e.universe.mask(syms)
    if not is_model_of_scent(e, a):
        raise InvalidStructure(f"{format_subset(syms)} is not a model")
    rel = UpperRel(ONE_UNIVERSE, e.universe, [(0, e.universe.full ^ a)])
    return ProxMap(terminal_scent(), e, rel)


def map_to_model(m: ProxMap) -> Model:
    """``{a : {} r {a}}``."""
    if m.source.universe.n != 0:
        raise InvalidStructure("the map must start at the terminal object")
    if not is_join_preserving_map(m):
        raise InvalidStructure("the map is not join-preserving")
    U = m.target.universe
    return Model(tuple(s for s in U.symbols if m.rel.holds(0, U.bit(s))))


# ---------------------------------------------------------------- isomorphism search


def frame_iso(
    F1: Frame | DistLattice, F2: Frame | DistLattice, preserve: Sequence[tuple[np.ndarray, np.ndarray]] = ()
) -> dict[str, str] | None:
    """An order isomorphism as a label map, or ``None``.

    Backtracks over elements in order of their down-set size, matching only
    elements with the same numbers of elements below and above.  Each pair of
    square matrices in ``preserve`` must also be carried onto each other.
    """
    A = F1.lattice if isinstance(F1, Frame) else F1
    B = F2.lattice if isinstance(F2, Frame) else F2
    if len(A) > MAX_LATTICE or len(B) > MAX_LATTICE:
        raise SizeCapExceeded(f"isomorphism search is capped at {MAX_LATTICE} elements")
    if len(A) != len(B):
        return None
    n = len(A)
    rels = [(A.leq, B.leq)] + [(np.asarray(x, bool), np.asarray(y, bool)) for x, y in preserve]

    def signature(k, side):
        return tuple(v for r in rels for v in (int(r[side][:, k].sum()), int(r[side][k, :].sum())))

    sig_a = [signature(i, 0) for i in range(n)]
    sig_b = [signature(j, 1) for j in range(n)]
    if sorted(sig_a) != sorted(sig_b):
        return None
    order = sorted(range(n), key=lambda i: sig_a[i])
    image = [-1] * n
    used = [False] * n

    def extend(k: int) -> bool:
        if k == n:
            return True
        i = order[k]
        for j in range(n):
            if used[j] or sig_b[j] != sig_a[i]:
                continue
            if all(
                ra[i, order[t]] == rb[j, image[order[t]]] and ra[order[t], i] == rb[image[order[t]], j]
                for ra, rb in rels
                for t in range(k)
            ) and all(ra[i, i] == rb[j, j] for ra, rb in rels):
                image[i], used[j] = j, True
                if extend(k + 1):
                    return True
                image[i], used[j] = -1, False
        return False

    if not extend(0):
        return None
    return {A.elements[i]: B.elements[image[i]] for i in range(n)}


def frames_equal_by_inclusion(F1: Frame, F2: Frame) -> bool:
    return [F1.members(k) for k in range(len(F1))] == [F2.members(k) for k in range(len(F2))]
