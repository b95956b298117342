"""Canonical finite subsets, families of subsets and the star transpose.

Generators are hashable symbols (strings, ints, ``Tagged`` values or tuples of
generators).  ``symbol_key`` imposes one global total order on all of them, and
every canonical form in the package is sorted by it.

Two encodings coexist:

* ``FinSubset`` is a sorted duplicate-free tuple of generators and
  ``SubsetFamily`` is a sorted duplicate-free tuple of ``FinSubset``.  These are
  used at API boundaries and for anything a user may print.
* ``Universe`` indexes a finite generator set so that subsets become ``int``
  bitmasks.  The relation engines work on masks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Iterator, Sequence

Generator = Hashable
FinSubset = tuple
SubsetFamily = tuple

TAG_ORDER = {"dia": 0, "box": 1, "bar": 2, "val": 3}


@dataclass(frozen=True)
class Tagged:
    """A generator derived from a base generator: ``<>a``, ``[]a``, ``~a`` or ``<p,a>``."""

    tag: str
    base: Generator
    weight: Fraction | None = None

    def __post_init__(self):
        if self.tag not in TAG_ORDER:
            raise ValueError(f"unknown tag {self.tag!r}")
        if (self.tag == "val") != (self.weight is not None):
            raise ValueError("only valuation generators carry a weight")

    def __str__(self):
        base = symbol_str(self.base)
        if self.tag == "dia":
            return f"<>{base}"
        if self.tag == "box":
            return f"[]{base}"
        if self.tag == "bar":
            return f"~{base}"
        return f"<{fraction_str(self.weight)},{base}>"


def fraction_str(p: Fraction) -> str:
    p = Fraction(p)
    return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"


def symbol_key(x) -> tuple:
    """Total order key shared by every kind of generator."""
    if isinstance(x, bool):
        return (1, int(x))
    if isinstance(x, (int, Fraction)):
        return (1, Fraction(x))
    if isinstance(x, str):
        return (0, x)
    if isinstance(x, Tagged):
        return (2, TAG_ORDER[x.tag], x.weight or Fraction(0), symbol_key(x.base))
    if isinstance(x, tuple):
        return (3, len(x), tuple(symbol_key(y) for y in x))
    raise TypeError(f"unsupported generator {x!r}")


def symbol_str(x) -> str:
    if isinstance(x, tuple):
        return "{" + ",".join(symbol_str(y) for y in x) + "}"
    if isinstance(x, Fraction):
        return fraction_str(x)
    return str(x)


def subset_key(A: FinSubset) -> tuple:
    """Shortlex order on canonical subsets."""
    return (len(A), tuple(symbol_key(a) for a in A))


def canon_finset(elements: Iterable[Generator]) -> FinSubset:
    return tuple(sorted(set(elements), key=symbol_key))


def canon_family(sets: Iterable[Iterable[Generator]]) -> SubsetFamily:
    return tuple(sorted({canon_finset(A) for A in sets}, key=subset_key))


def format_subset(A: Iterable[Generator]) -> str:
    return "{" + ",".join(symbol_str(a) for a in canon_finset(A)) + "}"


def format_family(U: Iterable[Iterable[Generator]]) -> str:
    return "{" + ", ".join(format_subset(A) for A in canon_family(U)) + "}"


def nonempty_subsets(A: Iterable[Generator]) -> SubsetFamily:
    A = canon_finset(A)
    return canon_family(
        combo for k in range(1, len(A) + 1) for combo in itertools.combinations(A, k)
    )


def star(U: Iterable[Iterable[Generator]]) -> SubsetFamily:
    """The transpose of a family, unfolded clause by clause.

    ``star(()) == ((),)`` and ``star(U + [A])`` joins every member of
    ``star(U)`` with every inhabited subset of ``A``.  Redundant supersets are
    kept.
    """
    acc = {()}
    for A in canon_family(U):
        parts = nonempty_subsets(A)
        acc = {canon_finset(B + C) for B in acc for C in parts}
    return canon_family(acc)


def antichain_min(
    U: Iterable[Iterable[Generator]], leq: Callable[[FinSubset, FinSubset], bool]
) -> SubsetFamily:
    """Minimal members of ``U`` under the preorder ``leq``.

    Members that are ``leq``-equivalent collapse to the canonically least one.
    """
    members = canon_family(U)
    keep = []
    for A in members:
        if any(leq(B, A) and not leq(A, B) for B in members):
            continue
        if any(leq(B, A) and leq(A, B) for B in keep):
            continue
        keep.append(A)
    return tuple(keep)


def is_subset(A: FinSubset, B: FinSubset) -> bool:
    return set(A) <= set(B)


class Universe:
    """A finite indexed generator set; subsets are encoded as bitmasks."""

    def __init__(self, symbols: Iterable[Generator]):
        self.symbols: tuple = canon_finset(symbols)
        self.index = {s: i for i, s in enumerate(self.symbols)}
        self.n = len(self.symbols)
        self.full = (1 << self.n) - 1

    def __repr__(self):
        return f"Universe({[symbol_str(s) for s in self.symbols]})"

    def __eq__(self, other):
        return isinstance(other, Universe) and self.symbols == other.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __len__(self):
        return self.n

    def __contains__(self, x):
        return x in self.index

    def mask(self, subset: Iterable[Generator]) -> int:
        m = 0
        for s in subset:
            try:
                m |= 1 << self.index[s]
            except KeyError:
                raise KeyError(f"{symbol_str(s)} is not a generator of {self!r}") from None
        return m

    def bit(self, s: Generator) -> int:
        return 1 << self.index[s]

    def subset(self, mask: int) -> FinSubset:
        return tuple(self.symbols[i] for i in iter_bits(mask))

    def all_masks(self) -> range:
        return range(1 << self.n)

    def mask_key(self, mask: int) -> tuple:
        return subset_key(self.subset(mask))

    def sorted_masks(self, masks: Iterable[int]) -> list[int]:
        # bit order already follows symbol order, so shortlex on bits matches subset_key
        return sorted(masks, key=lambda m: (popcount(m), bits_tuple(m)))


def popcount(m: int) -> int:
    return bin(m).count("1")


def iter_bits(m: int) -> Iterator[int]:
    i = 0
    while m:
        if m & 1:
            yield i
        m >>= 1
        i += 1


def bits_tuple(m: int) -> tuple:
    return tuple(iter_bits(m))


def submasks(m: int) -> Iterator[int]:
    """All submasks of ``m``, including 0 and ``m`` itself."""
    s = m
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & m


def mask_family(universe: Universe, family: Iterable[Iterable[Generator]]) -> tuple[int, ...]:
    return tuple(sorted({universe.mask(A) for A in family}))


def hits_all(T: int, family_masks: Sequence[int]) -> bool:
    """True iff ``T`` meets every member of the family (a transversal)."""
    return all(T & B for B in family_masks)
