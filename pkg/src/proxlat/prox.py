"""Proximity relations, strong proximity lattices and the functors F and G.

Lattice elements double as generators: ``G`` turns a strong proximity lattice
into a strong continuous entailment relation whose generators are the element
labels, and ``F`` goes back through ``L(S, |-)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .entail import (
    ApproxRel,
    AxiomSet,
    EntailmentLattice,
    SCEnt,
    UpperRel,
    cut_compose,
    scent_from_axioms,
)
from .errors import InvalidStructure, SizeCapExceeded
from .lattice import DistLattice, Report, dual_lattice, is_filter, is_ideal
from .sets import Universe, format_subset, iter_bits, popcount

VEE_CAP = 12
WEDGE_CAP = 6


def _mat(m) -> np.ndarray:
    return np.asarray(m, dtype=bool)


def _bool_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.int64) @ b.astype(np.int64)) > 0


# ---------------------------------------------------------------- proximity relations


class ProxRel:
    """A relation between the elements of two finite distributive lattices."""

    def __init__(self, source: DistLattice, target: DistLattice, matrix):
        matrix = _mat(matrix)
        if matrix.shape != (len(source), len(target)):
            raise InvalidStructure(
                f"relation shape {matrix.shape} does not match lattices of size "
                f"{len(source)} and {len(target)}"
            )
        self.source = source
        self.target = target
        self.matrix = matrix
        self.matrix.setflags(write=False)

    @classmethod
    def from_pairs(cls, source: DistLattice, target: DistLattice, pairs: Iterable[tuple]):
        m = np.zeros((len(source), len(target)), dtype=bool)
        for a, b in pairs:
            m[source.idx(a), target.idx(b)] = True
        return cls(source, target, m)

    @classmethod
    def order(cls, L: DistLattice) -> "ProxRel":
        return cls(L, L, L.leq)

    def holds(self, a, b) -> bool:
        return bool(self.matrix[self.source.idx(a), self.target.idx(b)])

    def pairs(self) -> list[tuple[str, str]]:
        return [(self.source.elements[i], self.target.elements[j]) for i, j in np.argwhere(self.matrix)]

    def transpose(self) -> "ProxRel":
        """The relational opposite, a relation between the dual lattices."""
        return ProxRel(dual_lattice(self.target), dual_lattice(self.source), self.matrix.T.copy())

    def __eq__(self, other):
        return (
            isinstance(other, ProxRel)
            and self.source == other.source
            and self.target == other.target
            and np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self):
        return hash(self.matrix.tobytes())

    def __le__(self, other: "ProxRel") -> bool:
        return bool((self.matrix <= other.matrix).all())

    def __repr__(self):
        return f"ProxRel({self.source.name or '?'} -> {self.target.name or '?'}, {int(self.matrix.sum())} pairs)"

    def first_difference(self, other: "ProxRel") -> tuple[str, str] | None:
        diff = np.argwhere(self.matrix != other.matrix)
        if not len(diff):
            return None
        i, j = diff[0]
        return self.source.elements[i], self.target.elements[j]


def validate_prox_relation(r: ProxRel) -> Report:
    rep = Report("proximity relation")
    S, T = r.source, r.target
    for b in range(len(T)):
        pre = np.flatnonzero(r.matrix[:, b])
        if not is_ideal(S, pre):
            rep.add(f"(ProxI) preimage of {T.elements[b]} is {format_subset(S.elements[i] for i in pre)}, not an ideal")
    for a in range(len(S)):
        img = np.flatnonzero(r.matrix[a, :])
        if not is_filter(T, img):
            rep.add(f"(ProxF) image of {S.elements[a]} is {format_subset(T.elements[j] for j in img)}, not a filter")
    return rep


def compose_prox(r: ProxRel, s: ProxRel) -> ProxRel:
    """Relational composite: first ``r``, then ``s``."""
    if r.target != s.source:
        raise InvalidStructure("cannot compose: target of the first relation is not the source of the second")
    return ProxRel(r.source, s.target, _bool_product(r.matrix, s.matrix))


def is_idempotent(r: ProxRel) -> bool:
    return compose_prox(r, r) == r


# ---------------------------------------------------------------- proximity lattices


class StrongProxLat:
    """A distributive lattice with an endo-relation ``prec``.

    Nothing is enforced at construction; run :func:`validate_prox_lattice`
    and :func:`classify_prox` to find out which axioms hold.
    """

    def __init__(self, lattice: DistLattice, prec, name: str = ""):
        if not isinstance(prec, ProxRel):
            prec = ProxRel(lattice, lattice, prec)
        if prec.source != lattice or prec.target != lattice:
            raise InvalidStructure("prec must be an endo-relation on the lattice")
        self.lattice = lattice
        self.prec = prec
        self.name = name or lattice.name
        self.presentation: EntailmentLattice | None = None

    @classmethod
    def with_order(cls, L: DistLattice, name: str = "") -> "StrongProxLat":
        return cls(L, L.leq, name=name)

    @classmethod
    def from_pairs(cls, L: DistLattice, pairs: Iterable[tuple], name: str = "") -> "StrongProxLat":
        return cls(L, ProxRel.from_pairs(L, L, pairs), name=name)

    @property
    def elements(self) -> tuple:
        return self.lattice.elements

    @property
    def m(self) -> np.ndarray:
        return self.prec.matrix

    def __len__(self):
        return len(self.lattice)

    def __eq__(self, other):
        return isinstance(other, StrongProxLat) and self.lattice == other.lattice and self.prec == other.prec

    def __hash__(self):
        return hash((self.lattice, self.prec))

    def __repr__(self):
        return f"StrongProxLat({self.name or '?'}, {len(self)} elements)"

    def identity(self) -> ProxRel:
        return self.prec


def validate_prox_lattice(S: StrongProxLat) -> Report:
    """Lattice axioms, (ProxI)/(ProxF) and idempotence."""
    from .lattice import validate_lattice

    rep = validate_lattice(S.lattice)
    if not rep.ok:
        return rep
    rep.extend(validate_prox_relation(S.prec))
    if not is_idempotent(S.prec):
        comp = compose_prox(S.prec, S.prec)
        a, b = comp.first_difference(S.prec)
        if comp.holds(a, b):
            rep.add(f"not idempotent: {a} < c < {b} for some c, but not {a} < {b}")
        else:
            rep.add(f"not idempotent: {a} < {b} has no interpolant")
    return rep


@dataclass
class ProxClassification:
    prox0: list[str] = field(default_factory=list)
    prox_vee: list[str] = field(default_factory=list)
    prox1: list[str] = field(default_factory=list)
    prox_wedge: list[str] = field(default_factory=list)

    @property
    def vee_strong(self) -> bool:
        return not (self.prox0 or self.prox_vee)

    @property
    def strong(self) -> bool:
        return self.vee_strong and not (self.prox1 or self.prox_wedge)

    def witnesses(self) -> list[str]:
        return self.prox0 + self.prox_vee + self.prox1 + self.prox_wedge


def classify_prox(S: StrongProxLat) -> ProxClassification:
    """Check the four interpolation axioms exhaustively, keeping one witness each."""
    L, p = S.lattice, S.m
    E = L.elements
    out = ProxClassification()
    for a in np.flatnonzero(p[:, L.bottom]):
        if a != L.bottom:
            out.prox0.append(f"(Prox0) {E[a]} < {E[L.bottom]} but {E[a]} is not bottom")
            break
    for a in np.flatnonzero(p[L.top, :]):
        if a != L.top:
            out.prox1.append(f"(Prox1) {E[L.top]} < {E[a]} but {E[a]} is not top")
            break
    n = len(L)
    for b in range(n):
        for c in range(b, n):
            # a < b v c  =>  a <= b' v c' for some b' < b, c' < c
            if not out.prox_vee:
                joins = L.join[np.ix_(p[:, b], p[:, c])].ravel()
                reach = L.leq[:, joins].any(axis=1) if len(joins) else np.zeros(n, bool)
                bad = np.flatnonzero(p[:, L.join[b, c]] & ~reach)
                if len(bad):
                    out.prox_vee.append(
                        f"(Prox-join) {E[bad[0]]} < {E[b]} v {E[c]} has no interpolants below {E[b]} and {E[c]}"
                    )
            # b ^ c < a  =>  b' ^ c' <= a for some b' > b, c' > c
            if not out.prox_wedge:
                meets = L.meet[np.ix_(p[b, :], p[c, :])].ravel()
                reach = L.leq[meets, :].any(axis=0) if len(meets) else np.zeros(n, bool)
                bad = np.flatnonzero(p[L.meet[b, c], :] & ~reach)
                if len(bad):
                    out.prox_wedge.append(
                        f"(Prox-meet) {E[b]} ^ {E[c]} < {E[bad[0]]} has no interpolants above {E[b]} and {E[c]}"
                    )
    return out


def dual_prox_lattice(S: StrongProxLat) -> StrongProxLat:
    """``(S^op, >)``."""
    t = S.prec.transpose()
    return StrongProxLat(t.source, t, name=f"{S.name}^op" if S.name else "")


# ---------------------------------------------------------------- generators from lattice elements


def element_universe(L: DistLattice) -> tuple[Universe, list[int]]:
    """Universe of element labels plus the bit of each lattice index."""
    U = Universe(L.elements)
    return U, [U.index[e] for e in L.elements]


def _to_lattice_mask(bits: Sequence[int], A: int) -> int:
    """Translate a universe mask into a mask over lattice indices."""
    out = 0
    for i, bit in enumerate(bits):
        if A >> bit & 1:
            out |= 1 << i
    return out


def lattice_presentation_axioms(L: DistLattice) -> AxiomSet:
    """Generators and relations presenting ``L`` as a distributive lattice."""
    U, bit = element_universe(L)
    b = [1 << k for k in bit]
    n = len(L)
    ax = [(0, b[L.top]), (b[L.bottom], 0)]
    for x in range(n):
        for y in range(x, n):
            ax.append((b[x] | b[y], b[int(L.meet[x, y])]))
            ax.append((b[int(L.join[x, y])], b[x] | b[y]))
        for y in range(n):
            if x != y and L.leq[x, y]:
                ax.append((b[x], b[y]))
    return AxiomSet.from_masks(U, ax)


def approx_of(S: StrongProxLat) -> ApproxRel:
    U, bit = element_universe(S.lattice)
    m = np.zeros((U.n, U.n), dtype=bool)
    for i, j in np.argwhere(S.m):
        m[bit[i], bit[j]] = True
    return ApproxRel(U, m)


def functor_G(S: StrongProxLat) -> SCEnt:
    """``(S, |-, <)`` with ``A |- B`` iff ``meet A <= join B``."""
    ax = lattice_presentation_axioms(S.lattice)
    return scent_from_axioms(ax, approx_of(S), name=f"G({S.name})" if S.name else "G")


def meet_join_predicate(L: DistLattice, rel: np.ndarray):
    """``(A, B) -> rel[meet A, join B]`` on universe masks of element labels."""
    U, bit = element_universe(L)
    mm, mj = L.mask_meet, L.mask_join

    def pred(A: int, B: int) -> bool:
        return bool(rel[mm[_to_lattice_mask(bit, A)], mj[_to_lattice_mask(bit, B)]])

    return pred


# ---------------------------------------------------------------- F: from entailment back to lattices


def _approx_ext_on_elements(EL: EntailmentLattice, ll: UpperRel) -> np.ndarray:
    """``x <<~ y`` on elements of ``L(S,|-)``.

    With ``x`` and ``y`` given by their canonical families, ``x <<~ y``
    fails exactly when some counter-pair ``(X, Y)`` of ``<<`` has ``X`` in
    the family of ``x`` and ``S - Y`` outside the family of ``y``.
    """
    exts = np.array(EL.exts, dtype=np.int64)
    full = EL.universe.full
    ok = np.ones((len(exts), len(exts)), dtype=bool)
    for X, Y in ll.counter:
        left = (np.int64(EL.ext_single[X]) & ~exts) == 0
        # Y hits every member of y's family iff S - Y is not in that family
        right = (np.int64(EL.ext_single[full ^ Y]) & ~exts) != 0
        ok[np.ix_(left, right)] = False
    return ok


def functor_F(e: SCEnt, cap: int = 64) -> StrongProxLat:
    """``(L(S,|-), <<~)``; ``presentation`` keeps the family bookkeeping."""
    EL = EntailmentLattice(e.ent, cap=cap)
    lat = EL.to_lattice(name=f"F({e.name})" if e.name else "F")
    S = StrongProxLat(lat, _approx_ext_on_elements(EL, e.ll), name=lat.name)
    S.presentation = EL
    return S


def _value_of_element(S: StrongProxLat, FS: StrongProxLat, k: int) -> int:
    """``join of meets`` of the minimal family of element ``k`` of ``F(G(S))``."""
    EL = FS.presentation
    _, bit = element_universe(S.lattice)
    L = S.lattice
    v = L.bottom
    for A in EL.minimal_masks(EL.exts[k]):
        v = int(L.join[v, L.mask_meet[_to_lattice_mask(bit, A)]])
    return v


@dataclass
class EquivalenceWitness:
    source: StrongProxLat
    image: StrongProxLat
    r: ProxRel
    s: ProxRel

    def report(self) -> Report:
        rep = Report(f"witnesses between {self.source.name} and {self.image.name}")
        for name, rel in (("r", self.r), ("s", self.s)):
            sub = validate_prox_relation(rel)
            for v in sub.violations:
                rep.add(f"{name}: {v}")
        sr = compose_prox(self.r, self.s)
        if sr != self.source.prec:
            rep.add(f"r then s differs from the source approximation at {sr.first_difference(self.source.prec)}")
        rs = compose_prox(self.s, self.r)
        if rs != self.image.prec:
            rep.add(f"s then r differs from the image approximation at {rs.first_difference(self.image.prec)}")
        return rep


def fg_witnesses(S: StrongProxLat, cap: int = 64) -> EquivalenceWitness:
    """``a r x`` iff ``a < v(x)`` and ``x s a`` iff ``v(x) < a`` for ``v`` = join of meets."""
    FS = functor_F(functor_G(S), cap=cap)
    v = [_value_of_element(S, FS, k) for k in range(len(FS))]
    r = S.m[:, v]
    s = S.m[v, :]
    return EquivalenceWitness(
        S, FS, ProxRel(S.lattice, FS.lattice, r), ProxRel(FS.lattice, S.lattice, s)
    )


# ---------------------------------------------------------------- S^v


@dataclass
class VeeResult:
    """``S^v`` with its class representatives and the witness relations."""

    lattice: StrongProxLat
    representatives: list[int]
    r: ProxRel
    s: ProxRel
    source: StrongProxLat
    # class of each singleton {a}, i.e. the inclusion S -> S^v
    singletons: list[int]

    def report(self) -> Report:
        return EquivalenceWitness(self.source, self.lattice, self.r, self.s).report()

    def inclusion_join_failure(self) -> tuple[str, str] | None:
        """A pair ``a, b`` whose join the inclusion ``a -> [{a}]`` does not preserve.

        Only a diagnostic: the inclusion need not preserve finite joins unless
        the lattice is join-strong.
        """
        L, V = self.source.lattice, self.lattice.lattice
        i = self.singletons
        for a in range(len(L)):
            for b in range(a + 1, len(L)):
                if i[L.join[a, b]] != V.join[i[a], i[b]]:
                    return L.elements[a], L.elements[b]
        return None


def vee_value(P: StrongProxLat, A: int) -> int:
    """``join(down A)`` where ``down A = {c : c < a for some a in A}``.

    ``A <=v B`` quantifies over all ``C <_L A`` and ``D <_L B``; in a finite
    lattice the extreme choices ``C = down A`` and ``D = down B`` decide it,
    so ``A <=v B`` iff ``vee_value(A) < vee_value(B)``.
    """
    L, p = P.lattice, P.m
    down = np.zeros(len(L), dtype=bool)
    for a in iter_bits(A):
        down |= p[:, a]
    return L.big_join(np.flatnonzero(down))


def _down_mask(P: StrongProxLat, B: int) -> int:
    out = 0
    for b in iter_bits(B):
        out |= sum(1 << int(c) for c in np.flatnonzero(P.m[:, b]))
    return out


def veeify(P: StrongProxLat) -> VeeResult:
    """Build ``S^v`` on Fin(S) modulo ``=v``; masks range over lattice indices."""
    L, p = P.lattice, P.m
    n = len(L)
    if n > VEE_CAP:
        raise SizeCapExceeded(f"S^v enumerates Fin(S); needs |S| <= {VEE_CAP}, got {n}")
    masks = sorted(range(1 << n), key=lambda m: (popcount(m), tuple(iter_bits(m))))
    val = {A: vee_value(P, A) for A in masks}
    reps: list[int] = []
    cls_of: dict[int, int] = {}
    for A in masks:
        for k, R in enumerate(reps):
            if p[val[A], val[R]] and p[val[R], val[A]]:
                cls_of[A] = k
                break
        else:
            cls_of[A] = len(reps)
            reps.append(A)
    m = len(reps)
    leq = np.array([[p[val[X], val[Y]] for Y in reps] for X in reps], dtype=bool)
    labels = [format_subset(L.elements[i] for i in iter_bits(R)) for R in reps]
    lat = DistLattice(labels, leq, name=f"{P.name}^v" if P.name else "")
    # the lattice operations on representatives agree with the order
    top_cls = cls_of[1 << L.top]
    if cls_of[0] != lat.bottom or top_cls != lat.top:
        raise InvalidStructure("S^v: empty set / {1} are not bottom / top")
    for i, X in enumerate(reps):
        for j, Y in enumerate(reps):
            if cls_of[X | Y] != lat.join[i, j]:
                raise InvalidStructure(f"S^v: union of {labels[i]} and {labels[j]} is not their join")
            pm = 0
            for a in iter_bits(X):
                for b in iter_bits(Y):
                    pm |= 1 << int(L.meet[a, b])
            if cls_of[pm] != lat.meet[i, j]:
                raise InvalidStructure(f"S^v: pairwise meet of {labels[i]} and {labels[j]} is not their meet")
    dval = [vee_value(P, _down_mask(P, R)) for R in reps]
    prec = np.array([[p[val[X], dval[j]] for j in range(m)] for X in reps], dtype=bool)
    V = StrongProxLat(lat, prec, name=lat.name)
    r = np.array([[p[a, val[R]] for R in reps] for a in range(n)], dtype=bool)
    s = np.array([[prec[i, cls_of[1 << a]] for a in range(n)] for i in range(m)], dtype=bool)
    return VeeResult(V, reps, ProxRel(L, lat, r), ProxRel(lat, L, s), P, [cls_of[1 << a] for a in range(n)])


# ---------------------------------------------------------------- |-^ for join-strong lattices


def wedge_axioms(P: StrongProxLat) -> AxiomSet:
    """``A |- B`` whenever ``A <_U C`` and ``meet C <= join B`` for some ``C``.

    ``A <_U C`` says ``C`` lies inside ``up A``, and a larger ``C`` has a
    smaller meet, so ``C = up A`` is the one to test.
    """
    L, p = P.lattice, P.m
    n = len(L)
    if n > WEDGE_CAP:
        raise SizeCapExceeded(f"wedge axioms enumerate Fin(S)^2; needs |S| <= {WEDGE_CAP}, got {n}")
    U, bit = element_universe(L)
    lift = [sum(1 << bit[i] for i in iter_bits(A)) for A in range(1 << n)]
    ax = []
    for A in range(1 << n):
        up = np.zeros(n, dtype=bool)
        for a in iter_bits(A):
            up |= p[a, :]
        m = L.big_meet(np.flatnonzero(up))
        for B in range(1 << n):
            if L.leq[m, L.mask_join[B]]:
                ax.append((lift[A], lift[B]))
    return AxiomSet.from_masks(U, ax)


def wedge_entailment(P: StrongProxLat) -> SCEnt:
    """``(S, |-^, <)``; raises if the ``<<`` characterisation fails."""
    sc = scent_from_axioms(wedge_axioms(P), approx_of(P), name=f"W({P.name})" if P.name else "W")
    w = wedge_ll_mismatch(P, sc)
    if w is not None:
        raise InvalidStructure(f"<< of the wedge entailment is not characterised at {w}")
    return sc


def wedge_ll_mismatch(P: StrongProxLat, sc: SCEnt) -> tuple[str, str] | None:
    """First ``(A, B)`` where ``A << B`` differs from ``meet(up A) < join B``."""
    L, p = P.lattice, P.m
    U, bit = element_universe(L)
    n = len(L)
    up_meet = {}
    for A in range(1 << n):
        up = np.zeros(n, dtype=bool)
        for a in iter_bits(A):
            up |= p[a, :]
        up_meet[A] = L.big_meet(np.flatnonzero(up))
    for A in range(1 << n):
        for B in range(1 << n):
            expect = bool(p[up_meet[A], L.mask_join[B]])
            uA = sum(1 << bit[i] for i in iter_bits(A))
            uB = sum(1 << bit[i] for i in iter_bits(B))
            if sc.ll.holds(uA, uB) != expect:
                return format_subset(U.subset(uA)), format_subset(U.subset(uB))
    return None


# ---------------------------------------------------------------- proximity maps


@dataclass
class ProxMap:
    source: SCEnt
    target: SCEnt
    rel: UpperRel

    def holds(self, A: int, B: int) -> bool:
        return self.rel.holds(A, B)

    def __eq__(self, other):
        return isinstance(other, ProxMap) and self.rel == other.rel

    def then(self, other: "ProxMap") -> "ProxMap":
        return ProxMap(self.source, other.target, cut_compose(other.rel, self.rel))


def identity_map(e: SCEnt) -> ProxMap:
    return ProxMap(e, e, e.ll)


def check_karoubi_morphism(r: UpperRel | ProxMap, src: SCEnt | None = None, tgt: SCEnt | None = None) -> bool:
    """``<<' . r = r = r . <<`` under cut composition."""
    if isinstance(r, ProxMap):
        src, tgt, r = r.source, r.target, r.rel
    return cut_compose(tgt.ll, r) == r and cut_compose(r, src.ll) == r


def karoubi_witness(r: UpperRel, src: SCEnt, tgt: SCEnt) -> str | None:
    for name, comp in (("<<' . r", cut_compose(tgt.ll, r)), ("r . <<", cut_compose(r, src.ll))):
        w = comp.difference_witness(r)
        if w is not None:
            A, B = w
            return (
                f"{name} differs from r at {format_subset(src.universe.subset(A))}, "
                f"{format_subset(tgt.universe.subset(B))}"
            )
    return None


def _relevant_counters(r: UpperRel, alpha: int) -> list[int]:
    return [Y for X, Y in r.counter if alpha & ~X == 0]


def jp0_witness(m: ProxMap) -> int | None:
    """A model ``a`` with ``a r {}``; such an ``a`` breaks ``A r {} => A |- {}``."""
    for a in m.source.ent.models:
        if not _relevant_counters(m.rel, a):
            return a
    return None


def jp_vee_witness(m: ProxMap, exhaustive_cap: int = 6) -> tuple[int, int, int] | None:
    """``(a, B, C)`` with ``a r B u C`` for a model ``a`` but neither ``a r B`` nor ``a r C``.

    ``{A} |-~ U u V`` for the maximal families ``U``, ``V`` reduces to
    every model above ``A`` being related to ``B`` or ``C``, and
    ``A r B u C`` passes to every model above ``A``.  Small targets are
    checked over all ``(B, C)``; larger ones use the fact that an up-set
    of Fin(S') is union-prime iff its minimal members have size <= 1.
    """
    tgt = m.target.universe
    for a in m.source.ent.models:
        ys = _relevant_counters(m.rel, a)
        if tgt.n <= exhaustive_cap:
            for B in range(1 << tgt.n):
                for C in range(B, 1 << tgt.n):
                    if m.rel.holds(a, B | C) and not m.rel.holds(a, B) and not m.rel.holds(a, C):
                        return a, B, C
        else:
            # minimal members of {B : a r B} are the minimal transversals of the complements of ys
            W = 0
            for Y in ys:
                W |= Y
            if ys and not any(W & ~Y == 0 for Y in ys):
                for B in range(1, 1 << tgt.n):
                    if popcount(B) >= 2 and B & ~W == 0 and m.rel.holds(a, B):
                        low = B & -B
                        return a, low, B ^ low
    return None


def is_join_preserving_map(m: ProxMap) -> bool:
    return jp0_witness(m) is None and jp_vee_witness(m) is None


def jp_direct(m: ProxMap) -> bool:
    """``A r B`` implies every model above ``A`` is related to a single ``b`` in ``B``.

    For a model ``a`` the sets ``B`` with ``a r B`` are those outside every
    relevant counter ``Y``; the singletons there are the points outside
    their union, so the condition says that union is itself one of them.
    """
    for a in m.source.ent.models:
        ys = _relevant_counters(m.rel, a)
        if not ys:
            return False
        W = 0
        for Y in ys:
            W |= Y
        if not any(W & ~Y == 0 for Y in ys):
            return False
    return True


# ---------------------------------------------------------------- adjoint pairs


@dataclass
class AdjointCheck:
    ok: bool
    witness: str | None = None

    def __bool__(self):
        return self.ok


def is_adjoint_pair(f, g, source: StrongProxLat | None = None, target: StrongProxLat | None = None) -> AdjointCheck:
    """``f . g <= id_B`` and ``id_A <= g . f`` for ``f : A -> B``, ``g : B -> A``.

    Relations between lattices compose relationally with identity ``<``;
    proximity maps compose by cut with identity ``<<``.
    """
    if isinstance(f, ProxMap):
        gf = cut_compose(g.rel, f.rel)
        fg = cut_compose(f.rel, g.rel)
        if not fg <= g.source.ll:
            return AdjointCheck(False, f"f . g not below << of the target at {fg.difference_witness(g.source.ll)}")
        if not f.source.ll <= gf:
            return AdjointCheck(False, f"<< of the source not below g . f at {gf.difference_witness(f.source.ll)}")
        return AdjointCheck(True)
    if source is None or target is None:
        raise InvalidStructure("adjointness of proximity relations needs the source and target lattices")
    fg = compose_prox(g, f)
    gf = compose_prox(f, g)
    if not fg <= target.prec:
        bad = np.argwhere(fg.matrix & ~target.m)[0]
        return AdjointCheck(False, f"f . g relates {target.elements[bad[0]]} to {target.elements[bad[1]]}, outside <")
    if not source.prec <= gf:
        bad = np.argwhere(source.m & ~gf.matrix)[0]
        return AdjointCheck(False, f"{source.elements[bad[0]]} < {source.elements[bad[1]]} is missing from g . f")
    return AdjointCheck(True)


# ---------------------------------------------------------------- morphisms between proximity lattices


def join_preserving_witness(r: ProxRel) -> str | None:
    """Failure of ``a r 0' => a = 0`` or ``a r b v c => a <= b' v c'`` with ``b' r b``, ``c' r c``."""
    S, T, m = r.source, r.target, r.matrix
    E = S.elements
    for a in np.flatnonzero(m[:, T.bottom]):
        if a != S.bottom:
            return f"{E[a]} r {T.elements[T.bottom]} but {E[a]} is not bottom"
    n = len(T)
    for b in range(n):
        for c in range(b, n):
            joins = S.join[np.ix_(m[:, b], m[:, c])].ravel()
            reach = S.leq[:, joins].any(axis=1) if len(joins) else np.zeros(len(S), bool)
            bad = np.flatnonzero(m[:, T.join[b, c]] & ~reach)
            if len(bad):
                return f"{E[bad[0]]} r {T.elements[b]} v {T.elements[c]} does not split"
    return None


def is_join_preserving_relation(r: ProxRel) -> bool:
    return join_preserving_witness(r) is None


def morphism_report(r: ProxRel, S: StrongProxLat, T: StrongProxLat) -> Report:
    """A join-preserving proximity relation with ``< ; r = r = r ; <'``."""
    rep = validate_prox_relation(r)
    w = join_preserving_witness(r)
    if w:
        rep.add(f"not join-preserving: {w}")
    if compose_prox(S.prec, r) != r:
        rep.add(f"< then r differs from r at {compose_prox(S.prec, r).first_difference(r)}")
    if compose_prox(r, T.prec) != r:
        rep.add(f"r then <' differs from r at {compose_prox(r, T.prec).first_difference(r)}")
    return rep


def lattice_homomorphisms(A: DistLattice, B: DistLattice) -> list[tuple[int, ...]]:
    """All bounded lattice homomorphisms ``A -> B`` as index tuples (small lattices only)."""
    import itertools

    n = len(A)
    out = []
    for f in itertools.product(range(len(B)), repeat=n):
        if f[A.bottom] != B.bottom or f[A.top] != B.top:
            continue
        if all(
            f[A.join[x, y]] == B.join[f[x], f[y]] and f[A.meet[x, y]] == B.meet[f[x], f[y]]
            for x in range(n)
            for y in range(x, n)
        ):
            out.append(f)
    return out


def morphism_from_homomorphism(S: StrongProxLat, T: StrongProxLat, h: Sequence[int]) -> ProxRel:
    """``a r b`` iff ``a < h(c) `` and ``c <' b`` for some ``c``, for a lattice map ``h : T -> S``."""
    via = S.m[:, list(h)]
    return ProxRel(S.lattice, T.lattice, _bool_product(via, T.m))
