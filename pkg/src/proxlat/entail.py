"""Entailment relations over a finite generator set.

An entailment relation on a finite set is determined by its models: the
subsets ``alpha`` with ``not (alpha |- S - alpha)``.  ``A |- B`` holds exactly
when no model contains ``A`` while missing all of ``B``.  :class:`EntailRel`
stores that model list, which keeps every query a handful of bit operations
even for universes whose pair table (``4**n`` entries) would not fit in memory.

Upper relations (closed under enlarging either side) are stored the same way,
by their maximal non-pairs ("counter pairs").  With that encoding the cut
composition is a join on counter pairs; see :func:`cut_compose`.

:func:`saturate` is the literal rule-by-rule fixpoint over the full pair table.
It is kept as an independent engine and is cross-checked against the model
enumeration in the test-suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InvalidStructure, SizeCapExceeded
from .lattice import DistLattice, Report
from .sets import (
    Universe,
    format_family,
    format_subset,
    hits_all,
    iter_bits,
    popcount,
)

SATURATION_CAP = 12
MODEL_CAP = 24
LATTICE_GENERATOR_CAP = 20
TABLE_CAP = 12


def _check_table_size(n: int, m: int | None = None) -> None:
    m = n if m is None else m
    if n > TABLE_CAP or m > TABLE_CAP:
        raise SizeCapExceeded(f"pair table 2^{n} x 2^{m} exceeds the 2^{TABLE_CAP} cap")


def submask_array(m: int) -> np.ndarray:
    out = []
    s = m
    while True:
        out.append(s)
        if s == 0:
            break
        s = (s - 1) & m
    return np.array(out, dtype=np.int64)


# ---------------------------------------------------------------- axioms


@dataclass(frozen=True)
class AxiomSet:
    universe: Universe
    axioms: tuple[tuple[int, int], ...]

    @classmethod
    def build(cls, universe: Universe, axioms: Iterable[tuple[Iterable, Iterable]]):
        pairs = {(universe.mask(A), universe.mask(B)) for A, B in axioms}
        return cls.from_masks(universe, pairs)

    @classmethod
    def from_masks(cls, universe: Universe, pairs: Iterable[tuple[int, int]]):
        key = lambda ab: (popcount(ab[0]) + popcount(ab[1]), ab[0], ab[1])
        return cls(universe, tuple(sorted(set(pairs), key=key)))

    def __len__(self):
        return len(self.axioms)

    def transpose(self) -> "AxiomSet":
        return AxiomSet.from_masks(self.universe, ((B, A) for A, B in self.axioms))

    def symbolic(self) -> list[tuple[tuple, tuple]]:
        U = self.universe
        return [(U.subset(A), U.subset(B)) for A, B in self.axioms]

    def as_set(self) -> frozenset:
        return frozenset(self.symbolic())

    def lines(self) -> list[str]:
        return [
            " ".join(_sym(x) for x in A) + (" " if A else "") + "|-" + ("" if not B else " " + " ".join(_sym(x) for x in B))
            for A, B in self.symbolic()
        ]


def _sym(x) -> str:
    from .sets import symbol_str

    return symbol_str(x)


def enumerate_models(universe: Universe, axioms: Iterable[tuple[int, int]]) -> tuple[int, ...]:
    """All ``alpha`` with ``A <= alpha  =>  alpha & B != 0`` for every axiom.

    Generators are assigned one at a time; an axiom is checked as soon as its
    highest generator is assigned, which prunes early.
    """
    n = universe.n
    if n > MODEL_CAP:
        raise SizeCapExceeded(f"{n} generators exceeds the model enumeration cap {MODEL_CAP}")
    groups: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for A, B in set(axioms):
        u = A | B
        if u == 0:
            return ()
        groups[u.bit_length() - 1].append((A, B))
    cur = np.zeros(1, dtype=np.int64)
    for k in range(n):
        cur = np.concatenate([cur, cur | np.int64(1 << k)])
        if not groups[k]:
            continue
        As = np.array([a for a, _ in groups[k]], dtype=np.int64)
        Bs = np.array([b for _, b in groups[k]], dtype=np.int64)
        step = max(1, 4_000_000 // max(1, len(cur)))
        for lo in range(0, len(As), step):
            a, b = As[lo : lo + step], Bs[lo : lo + step]
            bad = ((cur[:, None] & a) == a) & ((cur[:, None] & b) == 0)
            cur = cur[~bad.any(axis=1)]
            if not len(cur):
                return ()
    return tuple(sorted(int(x) for x in cur))


def saturate(ax: AxiomSet, cap: int = SATURATION_CAP) -> np.ndarray:
    """Least relation containing the overlap pairs and the axioms, closed under (M) and (T).

    Returns the full ``2^n x 2^n`` boolean table indexed by masks.
    """
    n = ax.universe.n
    if n > cap:
        raise SizeCapExceeded(
            f"saturation over {n} generators needs a 4^{n} = {4 ** n} pair table (cap {cap} generators)"
        )
    N = 1 << n
    masks = np.arange(N, dtype=np.int64)
    T = (masks[:, None] & masks[None, :]) != 0
    for A, B in ax.axioms:
        T[A, B] = True
    without = [masks[(masks >> i) & 1 == 0] for i in range(n)]
    while True:
        before = int(T.sum())
        for i in range(n):
            rows = without[i]
            T[rows | (1 << i), :] |= T[rows, :]
            T[:, rows | (1 << i)] |= T[:, rows]
        for i in range(n):
            rows = without[i]
            bit = 1 << i
            sub = np.ix_(rows, rows)
            T[sub] |= T[np.ix_(rows, rows | bit)] & T[np.ix_(rows | bit, rows)]
        if int(T.sum()) == before:
            return T


# ---------------------------------------------------------------- dense tables


class PairTable:
    """An arbitrary relation on Fin(S) x Fin(S') stored as a dense boolean table."""

    def __init__(self, src: Universe, tgt: Universe, table: np.ndarray):
        self.src, self.tgt = src, tgt
        self.table = np.asarray(table, dtype=bool)
        assert self.table.shape == (1 << src.n, 1 << tgt.n)

    def holds(self, A: int, B: int) -> bool:
        return bool(self.table[A, B])

    def __eq__(self, other):
        return (
            isinstance(other, PairTable)
            and self.src == other.src
            and self.tgt == other.tgt
            and np.array_equal(self.table, other.table)
        )

    def __le__(self, other: "PairTable") -> bool:
        return bool((~self.table | other.table).all())

    def transpose(self) -> "PairTable":
        return PairTable(self.tgt, self.src, self.table.T.copy())

    def then(self, other: "PairTable") -> "PairTable":
        """Relational composite: ``A (other o self) C`` iff ``A self B other C`` for some ``B``."""
        prod = self.table.astype(np.float32) @ other.table.astype(np.float32)
        return PairTable(self.src, other.tgt, prod > 0)

    def first_difference(self, other: "PairTable") -> tuple[int, int] | None:
        diff = np.argwhere(self.table != other.table)
        return None if not len(diff) else (int(diff[0][0]), int(diff[0][1]))

    @classmethod
    def from_predicate(cls, src: Universe, tgt: Universe, pred: Callable[[int, int], bool]):
        _check_table_size(src.n, tgt.n)
        t = np.zeros((1 << src.n, 1 << tgt.n), dtype=bool)
        for A in range(1 << src.n):
            for B in range(1 << tgt.n):
                t[A, B] = pred(A, B)
        return cls(src, tgt, t)


def is_upper(r) -> bool:
    """``A r B`` implies ``(A u A') r (B u B')``; always true for :class:`UpperRel`."""
    if isinstance(r, (UpperRel, EntailRel)):
        return True
    t = r.table
    for i in range(r.src.n):
        rows = np.flatnonzero((np.arange(t.shape[0]) >> i) & 1 == 0)
        if (t[rows] & ~t[rows | (1 << i)]).any():
            return False
    for j in range(r.tgt.n):
        cols = np.flatnonzero((np.arange(t.shape[1]) >> j) & 1 == 0)
        if (t[:, cols] & ~t[:, cols | (1 << j)]).any():
            return False
    return True


def maximal_pairs(pairs: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    """Drop pairs dominated componentwise (by inclusion) by another pair."""
    uniq = sorted(set(pairs), key=lambda p: (-(popcount(p[0]) + popcount(p[1])), p))
    kx: list[int] = []
    ky: list[int] = []
    for X, Y in uniq:
        if kx:
            ax = np.array(kx, dtype=np.int64)
            ay = np.array(ky, dtype=np.int64)
            if (((X & ~ax) == 0) & ((Y & ~ay) == 0)).any():
                continue
        kx.append(X)
        ky.append(Y)
    return tuple(sorted(zip(kx, ky)))


class UpperRel:
    """An upper relation, stored by its maximal non-pairs.

    ``A r B`` holds iff no counter pair ``(X, Y)`` has ``A <= X`` and ``B <= Y``.
    """

    def __init__(self, src: Universe, tgt: Universe, counter: Iterable[tuple[int, int]], reduce: bool = True):
        self.src, self.tgt = src, tgt
        self.counter = maximal_pairs(counter) if reduce else tuple(sorted(set(counter)))
        self._cx = np.array([x for x, _ in self.counter], dtype=np.int64)
        self._cy = np.array([y for _, y in self.counter], dtype=np.int64)

    def __repr__(self):
        return f"UpperRel({self.src.n}->{self.tgt.n}, {len(self.counter)} counter pairs)"

    def holds(self, A: int, B: int) -> bool:
        if not len(self.counter):
            return True
        return not bool((((A & ~self._cx) == 0) & ((B & ~self._cy) == 0)).any())

    def holds_sets(self, A: Iterable, B: Iterable) -> bool:
        return self.holds(self.src.mask(A), self.tgt.mask(B))

    def __eq__(self, other):
        return (
            isinstance(other, UpperRel)
            and self.src == other.src
            and self.tgt == other.tgt
            and self.counter == other.counter
        )

    def __hash__(self):
        return hash((self.src, self.tgt, self.counter))

    def __le__(self, other: "UpperRel") -> bool:
        # every pair of self is a pair of other <=> every counter pair of other is a non-pair of self
        return all(not self.holds(X, Y) for X, Y in other.counter)

    def difference_witness(self, other: "UpperRel") -> tuple[int, int] | None:
        """A pair in exactly one of the two relations, or None if equal."""
        for X, Y in other.counter:
            if self.holds(X, Y):
                return (X, Y)
        for X, Y in self.counter:
            if other.holds(X, Y):
                return (X, Y)
        return None

    def transpose(self) -> "UpperRel":
        return UpperRel(self.tgt, self.src, ((Y, X) for X, Y in self.counter), reduce=False)

    def table(self) -> np.ndarray:
        _check_table_size(self.src.n, self.tgt.n)
        t = np.ones((1 << self.src.n, 1 << self.tgt.n), dtype=bool)
        for X, Y in self.counter:
            t[np.ix_(submask_array(X), submask_array(Y))] = False
        return t

    def as_table(self) -> PairTable:
        return PairTable(self.src, self.tgt, self.table())

    def pairs(self) -> list[tuple[int, int]]:
        t = self.table()
        out = [(int(a), int(b)) for a, b in np.argwhere(t)]
        key = lambda ab: (self.src.mask_key(ab[0]), self.tgt.mask_key(ab[1]))
        return sorted(out, key=key)

    def minimal_pairs(self) -> list[tuple[int, int]]:
        t = self.table()
        minimal = t.copy()
        for i in range(self.src.n):
            rows = np.flatnonzero((np.arange(t.shape[0]) >> i) & 1)
            minimal[rows] &= ~t[rows ^ (1 << i)]
        for j in range(self.tgt.n):
            cols = np.flatnonzero((np.arange(t.shape[1]) >> j) & 1)
            minimal[:, cols] &= ~t[:, cols ^ (1 << j)]
        out = [(int(a), int(b)) for a, b in np.argwhere(minimal)]
        return sorted(out, key=lambda ab: (self.src.mask_key(ab[0]), self.tgt.mask_key(ab[1])))

    @classmethod
    def from_table(cls, src: Universe, tgt: Universe, table: np.ndarray) -> "UpperRel":
        pt = PairTable(src, tgt, table)
        if not is_upper(pt):
            raise InvalidStructure("relation is not upper")
        non = ~pt.table
        maximal = non.copy()
        for i in range(src.n):
            rows = np.flatnonzero((np.arange(non.shape[0]) >> i) & 1 == 0)
            maximal[rows] &= pt.table[rows | (1 << i)]
        for j in range(tgt.n):
            cols = np.flatnonzero((np.arange(non.shape[1]) >> j) & 1 == 0)
            maximal[:, cols] &= pt.table[:, cols | (1 << j)]
        return cls(src, tgt, ((int(a), int(b)) for a, b in np.argwhere(maximal)), reduce=False)

    @classmethod
    def from_predicate(cls, src: Universe, tgt: Universe, pred: Callable[[int, int], bool]):
        return cls.from_table(src, tgt, PairTable.from_predicate(src, tgt, pred).table)

    @classmethod
    def full(cls, src: Universe, tgt: Universe) -> "UpperRel":
        return cls(src, tgt, ())

    @classmethod
    def empty(cls, src: Universe, tgt: Universe) -> "UpperRel":
        return cls(src, tgt, [(src.full, tgt.full)])


def cut_compose(s: UpperRel, r: UpperRel) -> UpperRel:
    """The cut composite ``s . r`` (first ``r``, then ``s``).

    ``A (s.r) C`` iff some family ``V`` has ``A r B'`` for all ``B'`` in ``V*``
    and ``B s C`` for all ``B`` in ``V``.  Taking ``V`` maximal, namely
    ``{B : B s C}``, and using upper-ness on both sides, this fails exactly
    when there are counter pairs ``(X, Y)`` of ``r`` and ``(U, W)`` of ``s`` with
    ``Y | U`` covering the middle universe, ``A <= X`` and ``C <= W``.
    """
    if r.tgt != s.src:
        raise InvalidStructure("cut composition: middle universes differ")
    full = r.tgt.full
    out = []
    if len(r.counter) and len(s.counter):
        ry = r._cy
        for U, W in s.counter:
            sel = np.flatnonzero((ry | U) == full)
            out.extend((int(r._cx[i]), W) for i in sel)
    return UpperRel(r.src, s.tgt, out)


def relational_compose(s, r) -> PairTable:
    """Plain relational composite ``s o r`` on full tables."""
    rt = r.as_table() if isinstance(r, UpperRel) else r
    st = s.as_table() if isinstance(s, UpperRel) else s
    return rt.then(st)


def approx_ext(r: UpperRel) -> Callable[[Sequence[int], Sequence[int]], bool]:
    """``U r~ V`` iff ``A r B`` for every ``A`` in ``U`` and ``B`` in ``V*``.

    Families are given as sequences of masks.  By upper-ness it is enough to
    look at counter pairs ``(X, Y)`` where ``Y`` meets every member of ``V``.
    """

    def rel(U: Sequence[int], V: Sequence[int]) -> bool:
        for X, Y in r.counter:
            if hits_all(Y, V) and any(A & ~X == 0 for A in U):
                return False
        return True

    return rel


# ---------------------------------------------------------------- entailment relations


class EntailRel:
    """An entailment relation on a finite universe, represented by its models."""

    def __init__(self, universe: Universe, models: Iterable[int], name: str = ""):
        self.universe = universe
        self.models = tuple(sorted(set(models)))
        self.name = name
        self._m = np.array(self.models, dtype=np.int64)

    def __repr__(self):
        return f"EntailRel({self.name or '?'}, {self.universe.n} generators, {len(self.models)} models)"

    def __eq__(self, other):
        return (
            isinstance(other, EntailRel)
            and self.universe == other.universe
            and self.models == other.models
        )

    def __hash__(self):
        return hash((self.universe, self.models))

    def holds(self, A: int, B: int) -> bool:
        if not len(self._m):
            return True
        return not bool((((self._m & A) == A) & ((self._m & B) == 0)).any())

    def holds_sets(self, A: Iterable, B: Iterable) -> bool:
        return self.holds(self.universe.mask(A), self.universe.mask(B))

    def as_upper(self) -> UpperRel:
        full = self.universe.full
        return UpperRel(self.universe, self.universe, ((a, full ^ a) for a in self.models), reduce=False)

    def table(self) -> np.ndarray:
        return self.as_upper().table()

    def as_table(self) -> PairTable:
        return PairTable(self.universe, self.universe, self.table())

    def models_above(self, A: int) -> np.ndarray:
        return self._m[(self._m & A) == A]

    @classmethod
    def from_axioms(cls, ax: AxiomSet, name: str = "") -> "EntailRel":
        return cls(ax.universe, enumerate_models(ax.universe, ax.axioms), name=name)

    @classmethod
    def from_table(cls, universe: Universe, table: np.ndarray, name: str = "") -> "EntailRel":
        rep = validate_entailment(PairTable(universe, universe, table))
        if not rep.ok:
            raise InvalidStructure(str(rep))
        full = universe.full
        models = [a for a in range(1 << universe.n) if not table[a, full ^ a]]
        return cls(universe, models, name=name)

    @classmethod
    def overlap(cls, universe: Universe) -> "EntailRel":
        return cls(universe, range(1 << universe.n), name="overlap")

    def rename(self, mapping: Callable, universe: Universe | None = None) -> "EntailRel":
        """Transport along a bijection of generators."""
        new_u = universe or Universe(mapping(s) for s in self.universe.symbols)
        perm = [new_u.index[mapping(s)] for s in self.universe.symbols]
        models = []
        for a in self.models:
            m = 0
            for i in iter_bits(a):
                m |= 1 << perm[i]
            models.append(m)
        return EntailRel(new_u, models, name=self.name)


def generate_entailment(ax: AxiomSet, method: str = "models", name: str = "") -> EntailRel:
    """Least entailment relation containing the axioms.

    ``method="models"`` enumerates the countermodels directly (cap
    ``MODEL_CAP`` generators); ``method="saturate"`` runs the literal rule
    fixpoint (cap ``SATURATION_CAP`` generators) and reads the models off the
    table.  Both give the same relation.
    """
    if method == "saturate":
        T = saturate(ax)
        full = ax.universe.full
        return EntailRel(ax.universe, [a for a in range(1 << ax.universe.n) if not T[a, full ^ a]], name=name)
    if method != "models":
        raise ValueError(f"unknown method {method!r}")
    return EntailRel.from_axioms(ax, name=name)


def validate_entailment(r) -> Report:
    """Check (R), (M), (T) on a dense relation; EntailRel values are valid by construction."""
    if isinstance(r, EntailRel):
        r = r.as_table()
    U = r.src
    rep = Report("entailment relation")
    t = r.table
    for i, s in enumerate(U.symbols):
        if not t[1 << i, 1 << i]:
            rep.add(f"(R) fails at {s}: {{{s}}} |- {{{s}}} missing")
    masks = np.arange(t.shape[0])
    for i in range(U.n):
        rows = masks[(masks >> i) & 1 == 0]
        bad = np.argwhere(t[rows] & ~t[rows | (1 << i)])
        if len(bad):
            A, B = int(rows[bad[0][0]]), int(bad[0][1])
            rep.add(f"(M) fails: {format_subset(U.subset(A))} |- {format_subset(U.subset(B))} but not after adding {U.symbols[i]} on the left")
            break
        bad = np.argwhere(t[:, rows] & ~t[:, rows | (1 << i)])
        if len(bad):
            A, B = int(bad[0][0]), int(rows[bad[0][1]])
            rep.add(f"(M) fails: {format_subset(U.subset(A))} |- {format_subset(U.subset(B))} but not after adding {U.symbols[i]} on the right")
            break
    for i in range(U.n):
        rows = masks[(masks >> i) & 1 == 0]
        bit = 1 << i
        prem = t[np.ix_(rows, rows | bit)] & t[np.ix_(rows | bit, rows)]
        bad = np.argwhere(prem & ~t[np.ix_(rows, rows)])
        if len(bad):
            A, B = int(rows[bad[0][0]]), int(rows[bad[0][1]])
            rep.add(
                f"(T) fails at cut {U.symbols[i]}: A={format_subset(U.subset(A))}, B={format_subset(U.subset(B))}"
            )
    return rep


def dual_entailment(e: EntailRel) -> EntailRel:
    """The transposed relation; its models are the complements of the original ones."""
    full = e.universe.full
    return EntailRel(e.universe, (full ^ a for a in e.models), name=f"{e.name}^op" if e.name else "")


# ---------------------------------------------------------------- approximation relations


class ApproxRel:
    """A relation ``a < b`` on generators, stored as a boolean matrix."""

    def __init__(self, universe: Universe, matrix: np.ndarray):
        self.universe = universe
        self.matrix = np.asarray(matrix, dtype=bool)
        n = universe.n
        assert self.matrix.shape == (n, n)
        self.up = [sum(1 << j for j in range(n) if self.matrix[i, j]) for i in range(n)]
        self.down = [sum(1 << i for i in range(n) if self.matrix[i, j]) for j in range(n)]

    @classmethod
    def from_pairs(cls, universe: Universe, pairs: Iterable[tuple]):
        m = np.zeros((universe.n, universe.n), dtype=bool)
        for a, b in pairs:
            m[universe.index[a], universe.index[b]] = True
        return cls(universe, m)

    @classmethod
    def identity(cls, universe: Universe):
        return cls(universe, np.eye(universe.n, dtype=bool))

    def __eq__(self, other):
        return (
            isinstance(other, ApproxRel)
            and self.universe == other.universe
            and np.array_equal(self.matrix, other.matrix)
        )

    def pairs(self) -> list[tuple]:
        S = self.universe.symbols
        return [(S[i], S[j]) for i, j in np.argwhere(self.matrix)]

    def transpose(self) -> "ApproxRel":
        return ApproxRel(self.universe, self.matrix.T.copy())

    def compose_self(self) -> np.ndarray:
        m = self.matrix.astype(np.int64)
        return (m @ m) > 0

    def is_idempotent(self) -> bool:
        return bool(np.array_equal(self.compose_self(), self.matrix))

    def up_image(self, A: int) -> int:
        out = 0
        for i in iter_bits(A):
            out |= self.up[i]
        return out

    def down_image(self, B: int) -> int:
        out = 0
        for j in iter_bits(B):
            out |= self.down[j]
        return out

    def interior(self, X: int) -> int:
        """``{a : a < x implies x in X}``, the largest ``A`` with ``up_image(A) <= X``."""
        return sum(1 << i for i, u in enumerate(self.up) if u & ~X == 0)

    def lower_holds(self, A: int, B: int) -> bool:
        """``A <_L B``: every member of ``A`` is below some member of ``B``."""
        return all(self.up[i] & B for i in iter_bits(A))

    def upper_holds(self, A: int, B: int) -> bool:
        """``A <_U B``: every member of ``B`` is above some member of ``A``."""
        return all(self.down[j] & A for j in iter_bits(B))

    def rename(self, mapping: Callable, universe: Universe) -> "ApproxRel":
        perm = [universe.index[mapping(s)] for s in self.universe.symbols]
        m = np.zeros((universe.n, universe.n), dtype=bool)
        for i, j in np.argwhere(self.matrix):
            m[perm[i], perm[j]] = True
        return ApproxRel(universe, m)


def lower_upper_ext(p: ApproxRel) -> tuple[PairTable, PairTable]:
    """Materialise ``<_L`` and ``<_U`` on Fin(S) x Fin(S)."""
    U = p.universe
    _check_table_size(U.n)
    N = 1 << U.n
    masks = np.arange(N, dtype=np.int64)
    low = np.ones((N, N), dtype=bool)
    upp = np.ones((N, N), dtype=bool)
    for i in range(U.n):
        hit_up = (masks & p.up[i]) != 0  # B meets up(i)
        hit_down = (masks & p.down[i]) != 0  # A meets down(i)
        has = ((masks >> i) & 1) == 1
        low[np.ix_(has, ~hit_up)] = False
        upp[np.ix_(~hit_down, has)] = False
    return PairTable(U, U, low), PairTable(U, U, upp)


# ---------------------------------------------------------------- strong continuous entailment


class SCEnt:
    """An entailment relation with an approximation relation on its generators."""

    def __init__(self, ent: EntailRel, approx: ApproxRel, name: str = ""):
        if ent.universe != approx.universe:
            raise InvalidStructure("entailment and approximation live on different generators")
        self.ent = ent
        self.approx = approx
        self.name = name or ent.name
        self.axioms: AxiomSet | None = None

    @property
    def universe(self) -> Universe:
        return self.ent.universe

    def __repr__(self):
        return f"SCEnt({self.name or '?'}, {self.universe.n} generators, {len(self.ent.models)} models)"

    def __eq__(self, other):
        return isinstance(other, SCEnt) and self.ent == other.ent and self.approx == other.approx

    @cached_property
    def ll(self) -> UpperRel:
        """``|- o <_U``: ``A << B`` iff ``up_image(A) |- B``."""
        full = self.universe.full
        return UpperRel(
            self.universe, self.universe, ((self.approx.interior(a), full ^ a) for a in self.ent.models)
        )

    @cached_property
    def ll_lower(self) -> UpperRel:
        """``<_L o |-``: ``A << B`` iff ``A |- down_image(B)``."""
        full = self.universe.full
        return UpperRel(
            self.universe, self.universe, ((b, full ^ self.approx.up_image(b)) for b in self.ent.models)
        )


def ll_from(e: EntailRel, p: ApproxRel) -> UpperRel:
    sc = SCEnt(e, p)
    w = sc.ll.difference_witness(sc.ll_lower)
    if w is not None:
        U = e.universe
        raise InvalidStructure(
            f"|- o <_U differs from <_L o |- at A={format_subset(U.subset(w[0]))}, B={format_subset(U.subset(w[1]))}"
        )
    return sc.ll


def validate_scent(e: EntailRel, p: ApproxRel) -> Report:
    U = e.universe
    rep = Report("strong continuous entailment relation")
    if not p.is_idempotent():
        comp = p.compose_self()
        i, j = np.argwhere(comp != p.matrix)[0]
        kind = "missing from" if comp[i, j] else "not factorable through"
        rep.add(f"approximation not idempotent: ({U.symbols[i]}, {U.symbols[j]}) {kind} the composite")
    sc = SCEnt(e, p)
    w = sc.ll.difference_witness(sc.ll_lower)
    if w is not None:
        A, B = w
        left = sc.ll.holds(A, B)
        rep.add(
            f"interpolation fails at A={format_subset(U.subset(A))}, B={format_subset(U.subset(B))}: "
            f"exists A' (A <_U A' |- B) is {left}, exists B' (A |- B' <_L B) is {not left}"
        )
    return rep


def generated_scent_failures(ax: AxiomSet, p: ApproxRel, e: EntailRel | None = None) -> list[str]:
    """Axioms violating the two sufficient conditions for a generated SCEnt."""
    e = e or generate_entailment(ax)
    U = ax.universe
    M = e.models
    out = []
    ups = {a: p.up_image(a) for a in M}
    for A, B in ax.axioms:
        downB = p.down_image(B)
        # C <_U A |-0 B  =>  C |- down(B): fails iff some model a has A <= up(a) and a misses down(B)
        for a in M:
            if A & ~ups[a] == 0 and a & downB == 0:
                out.append(
                    f"condition 1 fails for axiom {format_subset(U.subset(A))} |- {format_subset(U.subset(B))} "
                    f"with C={format_subset(U.subset(a))}"
                )
                break
        upA = p.up_image(A)
        comp_down = {a: p.down_image(U.full ^ a) for a in M}
        # A |-0 B <_L C  =>  up(A) |- C: fails iff some model a contains up(A) and B <= down(S - a)
        for a in M:
            if upA & ~a == 0 and B & ~comp_down[a] == 0:
                out.append(
                    f"condition 2 fails for axiom {format_subset(U.subset(A))} |- {format_subset(U.subset(B))} "
                    f"with C={format_subset(U.subset(U.full ^ a))}"
                )
                break
    return out


def check_generated_scent(ax: AxiomSet, p: ApproxRel) -> bool:
    if not p.is_idempotent():
        return False
    return not generated_scent_failures(ax, p)


def scent_from_axioms(ax: AxiomSet, p: ApproxRel, name: str = "", method: str = "models") -> SCEnt:
    sc = SCEnt(generate_entailment(ax, method=method, name=name), p, name=name)
    sc.axioms = ax
    return sc


def dual_scent(sc: SCEnt) -> SCEnt:
    out = SCEnt(dual_entailment(sc.ent), sc.approx.transpose(), name=f"{sc.name}^op" if sc.name else "")
    if sc.axioms is not None:
        out.axioms = sc.axioms.transpose()
    return out


# ---------------------------------------------------------------- the lattice L(S, |-)


class EntailmentLattice:
    """``L(S, |-)``: families of subsets modulo mutual entailment.

    An element is identified by the set of models satisfying it (a bitmask
    over ``ent.models``).  Its canonical family ``{A : {A} |-~ U}`` is the set
    of ``A`` whose models all satisfy it.  Every element is a union of the
    sets ``ext({A})``, so the elements are found by closing those under union.
    """

    def __init__(self, ent: EntailRel, cap: int = 64):
        U = ent.universe
        if U.n > LATTICE_GENERATOR_CAP:
            raise SizeCapExceeded(f"L(S,|-) needs |S| <= {LATTICE_GENERATOR_CAP}, got {U.n}")
        if len(ent.models) + 1 > cap:
            raise SizeCapExceeded(f"L(S,|-) has more than {cap} elements ({len(ent.models)} models)")
        self.ent = ent
        self.universe = U
        self._masks = np.arange(1 << U.n, dtype=np.int64)
        ext_single = np.zeros(1 << U.n, dtype=np.int64)
        for k, a in enumerate(ent.models):
            ext_single[(self._masks & ~np.int64(a)) == 0] |= np.int64(1 << k)
        self.ext_single = ext_single
        elems = {0}
        for g in sorted({int(x) for x in np.unique(ext_single)}):
            elems |= {x | g for x in elems}
            if len(elems) > cap:
                raise SizeCapExceeded(f"L(S,|-) has more than {cap} elements")
        self.exts = sorted(elems, key=lambda x: (popcount(x), self._label_key(x)))
        self.index = {x: i for i, x in enumerate(self.exts)}

    def canon_masks(self, ext: int) -> np.ndarray:
        """All ``A`` whose models all satisfy the element (the canonical family)."""
        return np.flatnonzero((self.ext_single & ~np.int64(ext)) == 0)

    def minimal_masks(self, ext: int) -> list[int]:
        inside = (self.ext_single & ~np.int64(ext)) == 0
        minimal = inside.copy()
        for i in range(self.universe.n):
            has = ((self._masks >> i) & 1) == 1
            minimal[has] &= ~inside[self._masks[has] ^ (1 << i)]
        return self.universe.sorted_masks(int(a) for a in np.flatnonzero(minimal))

    def _label_key(self, ext: int):
        return tuple(self.universe.mask_key(A) for A in self.minimal_masks(ext))

    def label(self, ext: int) -> str:
        return format_family(self.universe.subset(A) for A in self.minimal_masks(ext))

    def ext_of(self, family_masks: Iterable[int]) -> int:
        out = 0
        for A in family_masks:
            out |= int(self.ext_single[A])
        return out

    def element_of(self, family: Iterable[Iterable]) -> int:
        return self.index[self.ext_of(self.universe.mask(A) for A in family)]

    def to_lattice(self, name: str = "") -> DistLattice:
        n = len(self.exts)
        leq = np.zeros((n, n), dtype=bool)
        for i, x in enumerate(self.exts):
            for j, y in enumerate(self.exts):
                leq[i, j] = x & ~y == 0
        return DistLattice([self.label(x) for x in self.exts], leq, name=name)


def lattice_of_entailment(e: EntailRel, cap: int = 64):
    """Return ``(lattice, canon)`` where ``canon`` maps a family to its element index."""
    L = EntailmentLattice(e, cap=cap)
    lat = L.to_lattice(name=f"L({e.name})" if e.name else "")
    return lat, L.element_of


def canon_literal(e: EntailRel, family_masks: Sequence[int]) -> list[int]:
    """``{A : {A} |-~ U}`` straight from the definition, via the star of ``U``."""
    from .sets import star

    U = e.universe
    st = [U.mask(B) for B in star([U.subset(A) for A in family_masks])]
    return [A for A in range(1 << U.n) if all(e.holds(A, B) for B in st)]
