import numpy as np
import pytest

import oracles
from conftest import everything
from proxlat.constructions import sigma
from proxlat.entail import ApproxRel, AxiomSet, SCEnt, UpperRel, scent_from_axioms
from proxlat.errors import InvalidStructure
from proxlat.fixtures import bool2, c3, c3w, m2
from proxlat.lattice import DistLattice, ideal_completion
from proxlat.prox import ProxMap, dual_prox_lattice, functor_F, functor_G, is_join_preserving_map
from proxlat.sets import Universe
from proxlat.spectra import (
    Frame,
    filters_frame,
    frame_iso,
    map_to_model,
    model_masks,
    model_to_map,
    models_of_scent,
    points,
    rounded_ideals,
    scott_upsets,
    terminal_scent,
)

# values frozen from the oracles in oracles.py
POINTS = {
    "BOOL2": [("1",)],
    "C3": [("1",), ("m", "1")],
    "C3w": [("1",)],
    "M2": [("a", "1"), ("b", "1")],
}
ROUNDED_IDEALS = {"BOOL2": 2, "C3": 3, "C3w": 2, "M2": 4}
UPSETS = {"BOOL2": 3, "C3": 4, "C3w": 3, "M2": 6}


def as_sets(F: Frame):
    return {frozenset(X) for X in F.sets}


@pytest.mark.parametrize("fx", [bool2, c3, c3w, m2], ids=lambda f: f.__name__)
def test_frozen_counts(fx):
    S = fx()
    assert [p.filter for p in points(S)] == POINTS[S.name]
    assert len(rounded_ideals(S)) == ROUNDED_IDEALS[S.name]
    assert len(scott_upsets(S)) == UPSETS[S.name]


def test_c3_strings():
    assert [str(p) for p in points(c3())] == ["{1}", "{m,1}"]
    assert rounded_ideals(c3w()).elements == ("{0}", "{0,m,1}")
    U = scott_upsets(c3())
    assert U.elements == ("{}", "{1}", "{m,1}", "{0,m,1}")


@pytest.mark.parametrize("S", everything(), ids=lambda S: S.name)
def test_enumerations_match_oracles(S):
    O = oracles.order_of(S)
    assert as_sets(rounded_ideals(S)) == set(oracles.rounded_ideals(O, S.m))
    assert as_sets(scott_upsets(S)) == set(oracles.rounded_upsets(O, S.m))
    want = {frozenset(O.labels[i] for i in F) for F in oracles.rounded_prime_filters(O, S.m)}
    assert {frozenset(p.filter) for p in points(S)} == want


@pytest.mark.parametrize("S", everything(), ids=lambda S: S.name)
def test_rounded_ideals_are_unions_of_way_below_sets(S):
    for I in rounded_ideals(S).sets:
        union = set()
        for a in I:
            union |= set(np.flatnonzero(S.m[:, a]).tolist())
        assert union == set(I)


@pytest.mark.parametrize("S", everything(), ids=lambda S: S.name)
def test_upset_top_is_everything(S):
    U = scott_upsets(S)
    assert U.sets[U.lattice.top] == frozenset(range(len(S)))


@pytest.mark.parametrize("S", everything(), ids=lambda S: S.name)
def test_models_match_oracle_and_points(S):
    G = functor_G(S)
    n = G.universe.n
    p = G.approx.matrix
    want = oracles.models(n, G.ent.holds, lambda i, j: p[i, j], lambda i, j: p[i, j])
    assert sorted(model_masks(G)) == sorted(want)
    assert len(models_of_scent(G)) == len(points(S))


def test_empty_set_is_not_a_model_of_c3():
    G = functor_G(c3())
    assert () not in [m.alpha for m in models_of_scent(G)]
    assert len(models_of_scent(G)) == 2


def test_inconsistent_theory_has_no_models():
    U = Universe("a")
    e = scent_from_axioms(AxiomSet.build(U, [((), ())]), ApproxRel.identity(U))
    assert models_of_scent(e) == []


def test_terminal_object():
    one = terminal_scent()
    assert [m.alpha for m in models_of_scent(one)] == [()]
    r = model_to_map((), one)
    assert map_to_model(r).alpha == ()


@pytest.mark.parametrize("S", everything(), ids=lambda S: S.name)
def test_model_map_round_trip(S):
    G = functor_G(S)
    for m in models_of_scent(G):
        r = model_to_map(m, G)
        assert is_join_preserving_map(r)
        assert map_to_model(r) == m


def test_model_to_map_rejects_non_models():
    G = functor_G(c3())
    with pytest.raises(InvalidStructure):
        model_to_map(("0",), G)


def test_map_to_model_rejects_non_jp_maps():
    G = functor_G(c3())
    one = terminal_scent()
    everything_rel = UpperRel.full(one.universe, G.universe)
    with pytest.raises(InvalidStructure):
        map_to_model(ProxMap(one, G, everything_rel))


def test_map_to_model_needs_terminal_source():
    G = functor_G(c3())
    with pytest.raises(InvalidStructure):
        map_to_model(ProxMap(G, G, G.ll))


# ---------------------------------------------------------------- filters and de Groot


def test_filters_of_small_frames():
    two = ideal_completion(bool2().lattice)
    assert len(filters_frame(two)) == 2
    three = ideal_completion(c3().lattice)
    assert len(filters_frame(three)) == 3


@pytest.mark.parametrize("S", everything(), ids=lambda S: S.name)
def test_filters_match_oracle(S):
    R = rounded_ideals(S)
    F = filters_frame(R)
    assert {frozenset(X) for X in F.sets} == set(oracles.filters_of_poset(R.lattice.leq))


@pytest.mark.parametrize("S", everything(), ids=lambda S: S.name)
def test_de_groot_frames(S):
    lhs = rounded_ideals(dual_prox_lattice(S))
    rhs = filters_frame(rounded_ideals(S))
    iso = frame_iso(lhs, rhs)
    assert iso is not None
    assert len(iso) == len(lhs)


def test_points_of_dual_c3():
    assert len(points(dual_prox_lattice(c3()))) == 2


@pytest.mark.parametrize("S", everything(), ids=lambda S: S.name)
def test_scott_frame_via_sigma(S):
    assert frame_iso(scott_upsets(S), rounded_ideals(functor_F(sigma(S)))) is not None


# ---------------------------------------------------------------- isomorphism search


def test_frame_iso_identity():
    F = rounded_ideals(m2())
    iso = frame_iso(F, F)
    assert iso == {e: e for e in F.elements}


def test_chain_iso_is_unique():
    L = c3().lattice
    assert frame_iso(L, L) == {"0": "0", "m": "m", "1": "1"}


def test_four_chain_is_not_the_diamond():
    chain = DistLattice.chain(["0", "x", "y", "1"])
    assert frame_iso(chain, m2().lattice) is None
    assert frame_iso(chain, c3().lattice) is None


def test_frame_iso_respects_extra_relations():
    S, T = c3(), c3w()
    assert frame_iso(S.lattice, T.lattice) is not None
    assert frame_iso(S.lattice, T.lattice, preserve=[(S.m, T.m)]) is None


def test_frame_rejects_non_lattice_families():
    with pytest.raises(InvalidStructure):
        Frame([frozenset({0}), frozenset({1})], ["a", "b"])


def test_frame_from_sets_checks_formulas():
    sets = [frozenset(), frozenset({0}), frozenset({0, 1})]
    with pytest.raises(InvalidStructure):
        Frame.from_sets(sets, ["a", "b"], join=lambda X, Y: X & Y)
    F = Frame.from_sets(sets, ["a", "b"], join=lambda X, Y: X | Y, meet=lambda X, Y: X & Y)
    assert len(F) == 3


def test_models_of_scent_with_strict_approx():
    # C3w: m is approximated only by 0, so no model contains m without 0
    G = functor_G(c3w())
    assert [m.alpha for m in models_of_scent(G)] == [("1",)]


def test_scent_equality_is_extensional():
    G = functor_G(c3())
    again = SCEnt(G.ent, G.approx)
    assert again == G
