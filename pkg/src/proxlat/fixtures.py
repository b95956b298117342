"""Named example lattices and a seeded generator of random strong proximity lattices."""

from __future__ import annotations

import itertools
import random

import numpy as np

from .lattice import DistLattice, validate_lattice
from .prox import StrongProxLat, classify_prox, validate_prox_lattice

# C3 where m approximates nothing but 1 and nothing approximates m except 0
C3W_PAIRS = [("0", "0"), ("0", "m"), ("0", "1"), ("m", "1"), ("1", "1")]


def bool2() -> StrongProxLat:
    return StrongProxLat.with_order(DistLattice.chain(["0", "1"], name="BOOL2"), name="BOOL2")


def c3() -> StrongProxLat:
    return StrongProxLat.with_order(DistLattice.chain(["0", "m", "1"], name="C3"), name="C3")


def c3w() -> StrongProxLat:
    L = DistLattice.chain(["0", "m", "1"], name="C3")
    return StrongProxLat.from_pairs(L, C3W_PAIRS, name="C3w")


def m2() -> StrongProxLat:
    L = DistLattice.from_hasse(
        ["0", "a", "b", "1"], [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")], name="M2"
    )
    return StrongProxLat.with_order(L, name="M2")


def n5() -> StrongProxLat:
    """The pentagon: a lattice, but not distributive."""
    L = DistLattice.from_hasse(
        ["0", "a", "b", "c", "1"], [("0", "a"), ("a", "c"), ("c", "1"), ("0", "b"), ("b", "1")], name="N5"
    )
    return StrongProxLat.with_order(L, name="N5")


NAMED = {"BOOL2": bool2, "C3": c3, "C3w": c3w, "M2": m2}


def named_fixtures() -> list[StrongProxLat]:
    return [f() for f in NAMED.values()]


def downset_lattice(
    points: int, order: set[tuple[int, int]], name: str = "", letters: str = "abcdefgh"
) -> DistLattice:
    """Lattice of down-sets of a poset on ``range(points)`` (``(i, j)`` means ``i < j``).

    Elements are named by the letters of their members, with ``0`` and ``1``
    for the empty and the full down-set.
    """
    downs = []
    for bits in itertools.product([0, 1], repeat=points):
        X = {i for i in range(points) if bits[i]}
        if all(i in X for (i, j) in order if j in X):
            downs.append(frozenset(X))
    downs.sort(key=lambda X: (len(X), sorted(X)))
    full = frozenset(range(points))

    def label(X):
        if not X:
            return "0"
        if X == full:
            return "1"
        return "".join(letters[i] for i in sorted(X))

    n = len(downs)
    leq = np.array([[X <= Y for Y in downs] for X in downs], dtype=bool).reshape(n, n)
    return DistLattice([label(X) for X in downs], leq, name=name)


def sublattice_approx(L: DistLattice, K: set[int]) -> np.ndarray:
    """``a < b`` iff ``a <= k <= b`` for some ``k`` in ``K``."""
    Km = np.zeros(len(L), dtype=bool)
    Km[list(K)] = True
    leq = L.leq.astype(np.int64)
    return ((leq * Km) @ leq) > 0


def _close(L: DistLattice, K: set[int]) -> set[int]:
    K = set(K) | {L.bottom, L.top}
    while True:
        new = {int(L.join[a, b]) for a in K for b in K} | {int(L.meet[a, b]) for a in K for b in K}
        if new <= K:
            return K
        K |= new


def random_strong_lattices(count: int = 20, max_size: int = 5, seed: int = 20240611) -> list[StrongProxLat]:
    """Random strong proximity lattices with at most ``max_size`` elements.

    Each lattice is the down-set lattice of a random poset with randomly
    named points; the approximation factors through a random sublattice and is
    kept only if every check passes.
    """
    rng = random.Random(seed)
    out: list[StrongProxLat] = []
    seen = set()
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 10000:
            raise RuntimeError("could not generate enough random fixtures")
        pts = rng.randint(1, 4)
        pairs = [(i, j) for i in range(pts) for j in range(pts) if i < j]
        order = {p for p in pairs if rng.random() < 0.5}
        # transitive closure keeps the poset honest
        changed = True
        while changed:
            changed = False
            for (a, b), (c, d) in itertools.product(list(order), repeat=2):
                if b == c and (a, d) not in order:
                    order.add((a, d))
                    changed = True
        letters = "".join(rng.sample("abcdefghpqrstuvwxyz", pts))
        L = downset_lattice(pts, order, letters=letters)
        if len(L) > max_size or not validate_lattice(L).ok:
            continue
        K = _close(L, {i for i in range(len(L)) if rng.random() < 0.5})
        S = StrongProxLat(L, sublattice_approx(L, K))
        key = (L.elements, L.leq.tobytes(), S.m.tobytes())
        if key in seen:
            continue
        if not validate_prox_lattice(S).ok or not classify_prox(S).strong:
            continue
        seen.add(key)
        S.name = f"R{len(out)}"
        S.lattice.name = S.name
        out.append(S)
    return out


def all_fixtures() -> list[StrongProxLat]:
    return named_fixtures() + random_strong_lattices()
