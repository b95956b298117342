"""Powerlocales, patch and valuation constructions, and their action on morphisms.

Every construction takes a strong proximity lattice (or a strong continuous
entailment relation), instantiates its axiom schemas over the finite
generator set, and returns the generated :class:`SCEnt` with ``axioms`` set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from .entail import (
    ApproxRel,
    AxiomSet,
    EntailRel,
    SCEnt,
    UpperRel,
    dual_scent,
    scent_from_axioms,
)
from .errors import InvalidStructure, SizeCapExceeded
from .prox import ProxMap, ProxRel, StrongProxLat, functor_G
from .sets import Tagged, Universe, iter_bits

FIN_CAP = 4


# ---------------------------------------------------------------- rational grids


@dataclass(frozen=True)
class RationalGrid:
    """A finite sorted set of exact rationals indexing valuation generators."""

    values: tuple[Fraction, ...]

    @classmethod
    def of(cls, values: Iterable) -> "RationalGrid":
        vals = []
        for v in values:
            if isinstance(v, float):
                raise ValueError("grid values must be exact rationals, not floats")
            vals.append(Fraction(v))
        return cls(tuple(sorted(set(vals))))

    @classmethod
    def parse(cls, text: str) -> "RationalGrid":
        out = []
        for tok in text.replace(",", " ").split():
            if "." in tok or "e" in tok.lower():
                raise ValueError(f"decimal {tok!r} is not allowed; write rationals as n/d")
            out.append(Fraction(tok))
        return cls.of(out)

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def closed_under_complement(self) -> bool:
        s = set(self.values)
        return all(1 - p in s for p in s)

    def require_complement_closed(self) -> None:
        missing = sorted({1 - p for p in self.values} - set(self.values))
        if missing:
            raise InvalidStructure(f"grid is not closed under p -> 1-p: missing {missing[0]}")

    def sums(self) -> dict[Fraction, list[tuple[Fraction, Fraction]]]:
        """Ordered pairs of grid values grouped by their sum."""
        out: dict[Fraction, list] = {}
        for p, q in itertools.product(self.values, repeat=2):
            out.setdefault(p + q, []).append((p, q))
        return out


DEFAULT_GRID = RationalGrid.of([0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1])


def val(p, a) -> Tagged:
    return Tagged("val", a, Fraction(p))


def dia(a) -> Tagged:
    return Tagged("dia", a)


def box(a) -> Tagged:
    return Tagged("box", a)


def bar(a) -> Tagged:
    return Tagged("bar", a)


# ---------------------------------------------------------------- helpers


def _approx(universe: Universe, pairs: Iterable[tuple]) -> ApproxRel:
    return ApproxRel.from_pairs(universe, pairs)


def _build(name: str, symbols: Iterable, axioms: list, approx_pairs: Iterable[tuple]) -> SCEnt:
    U = Universe(symbols)
    ax = AxiomSet.build(U, axioms)
    return scent_from_axioms(ax, _approx(U, approx_pairs), name=name)


def _label(kind: str, S) -> str:
    return f"{kind}({S.name})" if getattr(S, "name", "") else kind


def _prec_pairs(S: StrongProxLat) -> list[tuple[int, int]]:
    return [(int(i), int(j)) for i, j in np.argwhere(S.m)]


# ---------------------------------------------------------------- Scott topology and powerlocales


def sigma_axioms(S: StrongProxLat) -> list:
    L, E = S.lattice, S.elements
    n = len(L)
    ax = [((), (E[L.bottom],))]
    for a in range(n):
        for b in range(a, n):
            ax.append(((E[a], E[b]), (E[L.join[a, b]],)))
        for b in range(n):
            if L.leq[b, a] and a != b:
                ax.append(((E[a],), (E[b],)))
    return ax


def sigma(S: StrongProxLat) -> SCEnt:
    """Scott topology: approximation is the converse of ``<``."""
    E = S.elements
    return _build(_label("Sigma", S), E, sigma_axioms(S), [(E[j], E[i]) for i, j in _prec_pairs(S)])


def upper_axioms(S: StrongProxLat) -> list:
    L, E = S.lattice, S.elements
    n = len(L)
    ax = [((), (E[L.top],))]
    for a in range(n):
        for b in range(a, n):
            ax.append(((E[a], E[b]), (E[L.meet[a, b]],)))
        for b in range(n):
            if L.leq[a, b] and a != b:
                ax.append(((E[a],), (E[b],)))
    return ax


def upper(S: StrongProxLat) -> SCEnt:
    E = S.elements
    return _build(_label("PU", S), E, upper_axioms(S), [(E[i], E[j]) for i, j in _prec_pairs(S)])


def lower_axioms(S: StrongProxLat) -> list:
    L, E = S.lattice, S.elements
    n = len(L)
    ax = [((E[L.bottom],), ())]
    for a in range(n):
        for b in range(a, n):
            ax.append(((E[L.join[a, b]],), (E[a], E[b])))
        for b in range(n):
            if L.leq[a, b] and a != b:
                ax.append(((E[a],), (E[b],)))
    return ax


def lower(S: StrongProxLat) -> SCEnt:
    E = S.elements
    return _build(_label("PL", S), E, lower_axioms(S), [(E[i], E[j]) for i, j in _prec_pairs(S)])


def double_axioms(S: StrongProxLat) -> list:
    L, E = S.lattice, S.elements
    n = len(L)
    return [((E[a],), (E[b],)) for a in range(n) for b in range(n) if L.leq[a, b] and a != b]


def double(S: StrongProxLat) -> SCEnt:
    E = S.elements
    return _build(_label("PD", S), E, double_axioms(S), [(E[i], E[j]) for i, j in _prec_pairs(S)])


def vietoris_axioms(S: StrongProxLat) -> list:
    L, E = S.lattice, S.elements
    n = len(L)
    ax = [((dia(E[L.bottom]),), ()), ((), (box(E[L.top]),))]
    for a in range(n):
        for b in range(n):
            if b >= a:
                ab_join, ab_meet = E[L.join[a, b]], E[L.meet[a, b]]
                ax.append(((dia(ab_join),), (dia(E[a]), dia(E[b]))))
                ax.append(((box(E[a]), box(E[b])), (box(ab_meet),)))
            if L.leq[a, b] and a != b:
                ax.append(((dia(E[a]),), (dia(E[b]),)))
                ax.append(((box(E[a]),), (box(E[b]),)))
            # mixed axioms are not symmetric in a and b
            ax.append(((box(E[a]), dia(E[b])), (dia(E[L.meet[a, b]]),)))
            ax.append(((box(E[L.join[a, b]]),), (box(E[a]), dia(E[b]))))
    return ax


def vietoris(S: StrongProxLat) -> SCEnt:
    E = S.elements
    symbols = [dia(e) for e in E] + [box(e) for e in E]
    approx = []
    for i, j in _prec_pairs(S):
        approx += [(dia(E[i]), dia(E[j])), (box(E[i]), box(E[j]))]
    return _build(_label("PV", S), symbols, vietoris_axioms(S), approx)


# ---------------------------------------------------------------- closed forms


def closed_form(kind: str, S: StrongProxLat, order: np.ndarray | None = None) -> Callable[[tuple, tuple], bool]:
    """The explicit description of the generated relation, on symbol tuples.

    ``order`` defaults to ``<=``; passing ``<`` gives the associated ``<<``
    for the Scott/upper/lower/double constructions.
    """
    L = S.lattice
    le = L.leq if order is None else order

    def idx(A):
        return [L.index[a] for a in A]

    def jn(A):
        return L.big_join(idx(A))

    def mt(A):
        return L.big_meet(idx(A))

    if kind == "sigma":
        return lambda A, B: any(le[L.index[b], jn(A)] for b in B)
    if kind == "upper":
        return lambda A, B: any(le[mt(A), L.index[b]] for b in B)
    if kind == "lower":
        return lambda A, B: any(le[L.index[a], jn(B)] for a in A)
    if kind == "double":
        return lambda A, B: any(le[L.index[a], L.index[b]] for a in A for b in B)
    raise ValueError(f"no closed form for {kind!r}")


# ---------------------------------------------------------------- lower and upper powerlocales over Fin(S)


def _fin_universe(e: SCEnt) -> tuple[Universe, list[int]]:
    U = e.universe
    if U.n > FIN_CAP:
        raise SizeCapExceeded(f"Fin(S) generators need |S| <= {FIN_CAP}, got {U.n}")
    fin = Universe(U.subset(A) for A in range(1 << U.n))
    # bit of each subset mask of S inside the Fin(S) universe
    return fin, [fin.index[U.subset(A)] for A in range(1 << U.n)]


def _fin_approx(e: SCEnt, fin: Universe, bit: list[int], holds: Callable[[int, int], bool]) -> ApproxRel:
    N = 1 << e.universe.n
    m = np.zeros((N, N), dtype=bool)
    for A in range(N):
        for B in range(N):
            m[bit[A], bit[B]] = holds(A, B)
    return ApproxRel(fin, m)


def scent_lower_axioms(e: SCEnt) -> AxiomSet:
    """``A |- A_0 .. A_k`` whenever ``A |- B`` for every ``B`` in the star of ``{A_i}``.

    Exponential in ``2^|S|``; meant for cross-checks on ``|S| <= 3``.
    """
    from .sets import star

    fin, bit = _fin_universe(e)
    U = e.universe
    N = 1 << U.n
    ax = []
    for fam in range(1 << N):
        members = [A for A in range(N) if fam >> A & 1]
        star_masks = [U.mask(B) for B in star(U.subset(A) for A in members)]
        rhs = sum(1 << bit[A] for A in members)
        for A in range(N):
            if all(e.ent.holds(A, B) for B in star_masks):
                ax.append((1 << bit[A], rhs))
    return AxiomSet.from_masks(fin, ax)


def scent_lower(e: SCEnt) -> SCEnt:
    """``(Fin(S), |-^L, <_U)``.

    ``U |-^L V`` iff some ``A`` in ``U`` entails every member of the star of
    ``V``, i.e. every model above ``A`` contains a member of ``V``.  A family
    of subsets is therefore a model iff it is a union of powersets of models,
    and the relation is built from those models directly.
    """
    fin, bit = _fin_universe(e)
    U = e.universe
    powersets = set()
    for a in e.ent.models:
        m = 0
        for A in range(1 << U.n):
            if A & ~a == 0:
                m |= 1 << bit[A]
        powersets.add(m)
    models = {0}
    for g in sorted(powersets):
        models |= {x | g for x in models}
    p = e.approx
    approx = _fin_approx(e, fin, bit, p.upper_holds)
    return SCEnt(EntailRel(fin, models, name=_label("Lfin", e)), approx, name=_label("Lfin", e))


def scent_lower_closed_form(e: SCEnt) -> Callable[[int, int], bool]:
    """``U |-^L V`` on Fin(S)-masks, straight from the star-based definition."""
    from .sets import star

    fin, bit = _fin_universe(e)
    U = e.universe
    back = {bit[A]: A for A in range(1 << U.n)}

    def pred(X: int, Y: int) -> bool:
        fam_u = [back[i] for i in iter_bits(X)]
        fam_v = [U.subset(back[i]) for i in iter_bits(Y)]
        star_v = [U.mask(B) for B in star(fam_v)]
        return any(all(e.ent.holds(A, B) for B in star_v) for A in fam_u)

    return pred


def scent_upper(e: SCEnt) -> SCEnt:
    """``(Fin(S), |-^U, <_L)``, obtained as the dual of the lower construction on the dual."""
    out = dual_scent(scent_lower(dual_scent(e)))
    out.name = _label("Ufin", e)
    out.ent.name = out.name
    return out


def scent_upper_closed_form(e: SCEnt) -> Callable[[int, int], bool]:
    """``U |-^U V`` iff some ``B`` in ``V`` is entailed by every member of the star of ``U``."""
    from .sets import star

    fin, bit = _fin_universe(e)
    U = e.universe
    back = {bit[A]: A for A in range(1 << U.n)}

    def pred(X: int, Y: int) -> bool:
        star_u = [U.mask(A) for A in star(U.subset(back[i]) for i in iter_bits(X))]
        return any(all(e.ent.holds(A, back[j]) for A in star_u) for j in iter_bits(Y))

    return pred


# ---------------------------------------------------------------- patch


def _entailment_generators(e: SCEnt) -> list[tuple[int, int]]:
    """Minimal pairs of ``|-``; weakening recovers the rest."""
    return e.ent.as_upper().minimal_pairs()


def patch_axioms(e: SCEnt, prime: bool = False) -> list:
    U, p = e.universe, e.approx
    ax = []
    for A, B in _entailment_generators(e):
        ax.append((U.subset(A), U.subset(B)))
        if prime:
            ax.append((tuple(bar(b) for b in U.subset(B)), tuple(bar(a) for a in U.subset(A))))
    for a, b in p.pairs():
        ax.append(((a, bar(b)), ()))
        ax.append(((), (bar(a), b)))
    return ax


def _patch_approx(e: SCEnt) -> list[tuple]:
    out = []
    for a, b in e.approx.pairs():
        out += [(a, b), (bar(b), bar(a))]
    return out


def patch(e: SCEnt) -> SCEnt:
    S = e.universe.symbols
    return _build(_label("Patch", e), list(S) + [bar(s) for s in S], patch_axioms(e), _patch_approx(e))


def patch_prime(e: SCEnt) -> SCEnt:
    S = e.universe.symbols
    return _build(_label("Patch'", e), list(S) + [bar(s) for s in S], patch_axioms(e, prime=True), _patch_approx(e))


# ---------------------------------------------------------------- valuations


def _val_symbols(S: StrongProxLat, grid: RationalGrid) -> list[Tagged]:
    return [val(p, e) for p in grid for e in S.elements]


def _modular_axioms(S: StrongProxLat, grid: RationalGrid) -> list:
    L, E = S.lattice, S.elements
    n = len(L)
    by_sum = grid.sums()
    ax = []
    for a in range(n):
        for b in range(n):
            m, j = E[L.meet[a, b]], E[L.join[a, b]]
            for total, pqs in by_sum.items():
                for p, q in pqs:
                    for r, s in pqs:
                        ax.append(((val(p, E[a]), val(q, E[b])), (val(r, m), val(s, j))))
                        ax.append(((val(r, m), val(s, j)), (val(p, E[a]), val(q, E[b]))))
    return ax


def valuation_axioms(S: StrongProxLat, grid: RationalGrid, co: bool = False, probabilistic: bool = False) -> list:
    L, E = S.lattice, S.elements
    n = len(L)
    zero, one = E[L.bottom], E[L.top]
    ax = []
    for p in grid:
        if not co:
            if p < 0:
                ax += [((), (val(p, e),)) for e in E]
            if p > 0:
                ax.append(((val(p, zero),), ()))
        else:
            if p < 0:
                ax += [((val(p, e),), ()) for e in E]
            if p > 0:
                ax.append(((), (val(p, one),)))
        if probabilistic:
            if not co:
                if p > 1:
                    ax += [((val(p, e),), ()) for e in E]
                if p < 1:
                    ax.append(((), (val(p, one),)))
            else:
                if p > 1:
                    ax += [((), (val(p, e),)) for e in E]
                if p < 1:
                    ax.append(((val(p, zero),), ()))
    for p, q in itertools.product(grid, repeat=2):
        if (q <= p) if not co else (p <= q):
            for a in range(n):
                for b in range(n):
                    if L.leq[a, b] and (p, a) != (q, b):
                        ax.append(((val(p, E[a]),), (val(q, E[b]),)))
    return ax + _modular_axioms(S, grid)


def _valuation_approx(S: StrongProxLat, grid: RationalGrid, co: bool) -> list[tuple]:
    E = S.elements
    out = []
    for p, q in itertools.product(grid, repeat=2):
        if (q < p) if not co else (p < q):
            out += [(val(p, E[i]), val(q, E[j])) for i, j in _prec_pairs(S)]
    return out


def _valuation_scent(S, grid, co, probabilistic, kind) -> SCEnt:
    grid = grid or DEFAULT_GRID
    return _build(
        _label(kind, S),
        _val_symbols(S, grid),
        valuation_axioms(S, grid, co=co, probabilistic=probabilistic),
        _valuation_approx(S, grid, co),
    )


def valuations(S: StrongProxLat, grid: RationalGrid | None = None) -> SCEnt:
    return _valuation_scent(S, grid, False, False, "V")


def covaluations(S: StrongProxLat, grid: RationalGrid | None = None) -> SCEnt:
    return _valuation_scent(S, grid, True, False, "C")


def prob_valuations(S: StrongProxLat, grid: RationalGrid | None = None) -> SCEnt:
    return _valuation_scent(S, grid, False, True, "VP")


def prob_covaluations(S: StrongProxLat, grid: RationalGrid | None = None) -> SCEnt:
    return _valuation_scent(S, grid, True, True, "CP")


# ---------------------------------------------------------------- dispatch


LATTICE_KINDS = {
    "sigma": sigma,
    "upper": upper,
    "lower": lower,
    "double": double,
    "vietoris": vietoris,
    "val": valuations,
    "coval": covaluations,
    "valp": prob_valuations,
    "covalp": prob_covaluations,
}

SCENT_KINDS = {
    "patch": patch,
    "patchp": patch_prime,
    "scent-lower": scent_lower,
    "scent-upper": scent_upper,
}

KINDS = tuple(LATTICE_KINDS) + tuple(SCENT_KINDS)


def construct(kind: str, S: StrongProxLat, grid: RationalGrid | None = None) -> SCEnt:
    """Run a construction by name; entailment-level ones are applied to ``G(S)``."""
    if kind in ("val", "coval", "valp", "covalp"):
        return LATTICE_KINDS[kind](S, grid)
    if kind in LATTICE_KINDS:
        return LATTICE_KINDS[kind](S)
    if kind in SCENT_KINDS:
        return SCENT_KINDS[kind](functor_G(S))
    raise ValueError(f"unknown construction {kind!r}")


# ---------------------------------------------------------------- action on morphisms


class _Split:
    """Per-mask lattice masks of each tagged part of a construction's universe."""

    def __init__(self, U: Universe, S: StrongProxLat, part: Callable[[object], tuple[int, str]], parts: int):
        if U.n > 12:
            raise SizeCapExceeded(f"functor tables need at most 12 generators, got {U.n}")
        L = S.lattice
        N = 1 << U.n
        contrib = []
        for s in U.symbols:
            k, label = part(s)
            contrib.append((k, 1 << L.index[label]))
        self.masks = np.zeros((parts, N), dtype=np.int64)
        for m in range(1, N):
            low = m & -m
            i = low.bit_length() - 1
            self.masks[:, m] = self.masks[:, m ^ low]
            k, bit = contrib[i]
            self.masks[k, m] |= bit
        self.L = L
        self.n = len(L)

    def meet(self, k: int) -> np.ndarray:
        return self.L.mask_meet[self.masks[k]]

    def join(self, k: int) -> np.ndarray:
        return self.L.mask_join[self.masks[k]]

    def has(self, k: int, a: int) -> np.ndarray:
        return (self.masks[k] >> a) & 1 == 1


def _plain(s):
    return 0, s


def _tagged(s):
    if isinstance(s, Tagged) and s.tag in ("box", "bar"):
        return 1, s.base
    if isinstance(s, Tagged):
        return 0, s.base
    return 0, s


def _functor_table(kind: str, r: np.ndarray, src_e: SCEnt, S: StrongProxLat, tgt_e: SCEnt, T: StrongProxLat, s=None) -> np.ndarray:
    """Boolean table of the functor image on Fin(src) x Fin(tgt).

    ``r`` is the relation matrix in the direction the formula reads it.
    """
    if kind == "sigma":
        # A (src, over T) Sigma(r) B (tgt, over S): some b in B has b r join A
        X = _Split(src_e.universe, T, _plain, 1)
        Y = _Split(tgt_e.universe, S, _plain, 1)
        jA = X.join(0)
        out = np.zeros((len(jA), Y.masks.shape[1]), dtype=bool)
        for b in range(len(S)):
            out |= np.outer(r[b, jA], Y.has(0, b))
        return out
    X = _Split(src_e.universe, S, _tagged, 2)
    Y = _Split(tgt_e.universe, T, _tagged, 2)
    NX, NY = X.masks.shape[1], Y.masks.shape[1]
    out = np.zeros((NX, NY), dtype=bool)
    if kind == "upper":
        mA = X.meet(0)
        for b in range(len(T)):
            out |= np.outer(r[mA, b], Y.has(0, b))
    elif kind == "lower":
        jB = Y.join(0)
        for a in range(len(S)):
            out |= np.outer(X.has(0, a), r[a, jB])
    elif kind == "double":
        for a in range(len(S)):
            for b in range(len(T)):
                if r[a, b]:
                    out |= np.outer(X.has(0, a), Y.has(0, b))
    elif kind == "vietoris":
        L, LT = S.lattice, T.lattice
        mB = X.meet(1)
        jC = Y.join(0)
        for a in range(len(S)):
            rows = L.meet[a, mB]
            out |= r[np.ix_(rows, jC)] & X.has(0, a)[:, None]
        for d in range(len(T)):
            cols = LT.join[d, jC]
            out |= r[np.ix_(mB, cols)] & Y.has(1, d)[None, :]
    elif kind == "patch":
        # A, ~B  P(r)  C, ~D  iff  some a, b in S have  meet A ^ b < join B v a,  a r join C,  meet D s b
        L, p = S.lattice, S.m
        mA, jB = X.meet(0), X.join(1)
        jC, mD = Y.join(0), Y.meet(1)
        for a in range(len(S)):
            for b in range(len(S)):
                left = p[L.meet[mA, b], L.join[jB, a]]
                right = r[a, jC] & s[mD, b]
                out |= np.outer(left, right)
    elif kind == "patch-s":
        # C, ~D  P(s)  A, ~B  iff  some a, b in S have  meet B ^ a < join A v b,  b r join D,  meet C s a
        # here the source is over T and the target over S
        L, p = T.lattice, T.m
        mC, jD = X.meet(0), X.join(1)
        jA, mB = Y.join(0), Y.meet(1)
        for a in range(len(T)):
            for b in range(len(T)):
                left = r[b, jD] & s[mC, a]
                right = p[L.meet[mB, a], L.join[jA, b]]
                out |= np.outer(left, right)
    else:
        raise ValueError(f"no table for functor kind {kind!r}")
    return out


def _valuation_map(r: np.ndarray, src_e: SCEnt, tgt_e: SCEnt, S: StrongProxLat, T: StrongProxLat, co: bool) -> UpperRel:
    """``A V(r) B`` iff ``A |- Z_B`` with ``Z_B = {<p,c> : some <q,b> in B, p > q, c r b}``.

    ``Z_B`` is the largest admissible ``C`` and ``|-`` is monotone on the
    right.  The map fails at ``(A, B)`` iff a model above ``A`` misses every
    ``Z_y`` for ``y`` in ``B``, so the counter pairs are ``(a, Y_a)``.
    """
    U, V = src_e.universe, tgt_e.universe
    z = []
    for y in V.symbols:
        q, b = y.weight, T.lattice.index[y.base]
        zy = 0
        for i, x in enumerate(U.symbols):
            p, c = x.weight, S.lattice.index[x.base]
            if ((p < q) if co else (p > q)) and r[c, b]:
                zy |= 1 << i
        z.append(zy)
    counters = []
    for a in src_e.ent.models:
        ya = sum(1 << j for j, zy in enumerate(z) if not zy & a)
        counters.append((a, ya))
    return UpperRel(U, V, counters)


def apply_functor(
    kind: str,
    r: ProxRel,
    source: StrongProxLat,
    target: StrongProxLat,
    *,
    grid: RationalGrid | None = None,
    s: ProxRel | None = None,
    src_e: SCEnt | None = None,
    tgt_e: SCEnt | None = None,
) -> ProxMap:
    """Image of a morphism ``r : source -> target`` under a construction.

    ``sigma`` is contravariant and returns a map ``Sigma(target) -> Sigma(source)``.
    ``patch`` needs the right adjoint ``s`` and returns ``P(r)``; ``patch-s``
    returns ``P(s) : Patch(G(target)) -> Patch(G(source))``.
    """
    m = r.matrix
    if kind == "sigma":
        src_e = src_e or sigma(target)
        tgt_e = tgt_e or sigma(source)
        table = _functor_table(kind, m, src_e, source, tgt_e, target)
        return ProxMap(src_e, tgt_e, UpperRel.from_table(src_e.universe, tgt_e.universe, table))
    if kind in ("val", "coval", "valp", "covalp"):
        src_e = src_e or construct(kind, source, grid)
        tgt_e = tgt_e or construct(kind, target, grid)
        rel = _valuation_map(m, src_e, tgt_e, source, target, co=kind.startswith("co"))
        return ProxMap(src_e, tgt_e, rel)
    if kind in ("patch", "patch-s"):
        if s is None:
            raise InvalidStructure("the patch functor acts on adjoint pairs; pass the right adjoint s")
        if kind == "patch":
            src_e = src_e or patch(functor_G(source))
            tgt_e = tgt_e or patch(functor_G(target))
            table = _functor_table("patch", m, src_e, source, tgt_e, target, s=s.matrix)
        else:
            src_e = src_e or patch(functor_G(target))
            tgt_e = tgt_e or patch(functor_G(source))
            table = _functor_table("patch-s", m, src_e, target, tgt_e, source, s=s.matrix)
        return ProxMap(src_e, tgt_e, UpperRel.from_table(src_e.universe, tgt_e.universe, table))
    if kind in ("upper", "lower", "double", "vietoris"):
        src_e = src_e or construct(kind, source)
        tgt_e = tgt_e or construct(kind, target)
        table = _functor_table(kind, m, src_e, source, tgt_e, target)
        return ProxMap(src_e, tgt_e, UpperRel.from_table(src_e.universe, tgt_e.universe, table))
    raise ValueError(f"no functor action for {kind!r}")


FUNCTOR_KINDS = ("sigma", "upper", "lower", "double", "vietoris", "val", "coval", "valp", "covalp")
