import dataclasses

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import everything, morphism_pool, named
from proxlat.entail import (
    ApproxRel,
    AxiomSet,
    EntailRel,
    SCEnt,
    UpperRel,
    cut_compose,
    scent_from_axioms,
    validate_scent,
)
from proxlat.constructions import sigma
from proxlat.errors import InvalidStructure
from proxlat.fixtures import C3W_PAIRS, bool2, c3, c3w, m2
from proxlat.lattice import dual_lattice
from proxlat.prox import (
    ProxMap,
    ProxRel,
    StrongProxLat,
    check_karoubi_morphism,
    classify_prox,
    compose_prox,
    dual_prox_lattice,
    fg_witnesses,
    functor_F,
    functor_G,
    identity_map,
    is_adjoint_pair,
    is_idempotent,
    is_join_preserving_map,
    is_join_preserving_relation,
    jp_direct,
    jp0_witness,
    morphism_report,
    validate_prox_lattice,
    validate_prox_relation,
    veeify,
    wedge_entailment,
    wedge_ll_mismatch,
)
from proxlat.sets import Universe
from proxlat.spectra import frame_iso


def test_order_is_a_proximity_relation():
    for S in named():
        assert validate_prox_relation(ProxRel.order(S.lattice)).ok


def test_c3w_relation_is_valid_and_idempotent():
    S = c3w()
    assert validate_prox_relation(S.prec).ok
    assert is_idempotent(S.prec)


def test_dropping_bottom_pair_breaks_ideal_condition():
    L = c3().lattice
    r = ProxRel.from_pairs(L, L, [p for p in C3W_PAIRS if p != ("0", "0")])
    rep = validate_prox_relation(r)
    assert any(v.startswith("(ProxI) preimage of 0") for v in rep.violations)


def test_composition_examples():
    L = c3().lattice
    le = ProxRel.order(L)
    assert compose_prox(le, le) == le
    single = ProxRel.from_pairs(L, L, [("0", "1")])
    assert not is_idempotent(single)


def test_composition_shape_mismatch():
    with pytest.raises(InvalidStructure):
        compose_prox(ProxRel.order(c3().lattice), ProxRel.order(m2().lattice))


def test_classification_examples():
    assert classify_prox(c3()).strong
    assert classify_prox(c3w()).strong


def test_m2_without_a_below_1():
    # removing a < 1 leaves a relation that is not even a proximity relation: up(a) = {a} is no filter
    L = m2().lattice
    pairs = [(x, y) for x in L.elements for y in L.elements if L.le(x, y) and (x, y) != ("a", "1")]
    S = StrongProxLat.from_pairs(L, pairs)
    assert not validate_prox_lattice(S).ok


def test_prox0_witness():
    # 0 < m < 1 on C3 with m < 0: both sides of Prox0 fail
    L = c3().lattice
    S = StrongProxLat.from_pairs(L, [("0", "0"), ("m", "0"), ("0", "m"), ("m", "m"), ("0", "1"), ("m", "1"), ("1", "1")])
    cls = classify_prox(S)
    assert cls.prox0 and not cls.strong


def test_prox_join_witness():
    # on M2, 1 < 1 but no interpolants below a and b whose join reaches 1
    L = m2().lattice
    pairs = [("0", x) for x in L.elements] + [("a", "a"), ("a", "1"), ("b", "b"), ("b", "1"), ("1", "1")]
    pairs = [p for p in pairs if p not in (("a", "a"), ("b", "b"))]
    S = StrongProxLat.from_pairs(L, pairs)
    assert validate_prox_relation(S.prec).ok
    assert is_idempotent(S.prec)
    assert classify_prox(S).prox_vee


@pytest.mark.parametrize("S", everything(), ids=lambda S: S.name)
def test_strongness_is_self_dual(S):
    D = dual_prox_lattice(S)
    assert classify_prox(D).strong == classify_prox(S).strong
    assert dual_prox_lattice(D) == S


@pytest.mark.parametrize("S", everything(), ids=lambda S: S.name)
def test_transpose_is_a_proximity_relation_between_duals(S):
    t = S.prec.transpose()
    assert t.source == dual_lattice(S.lattice)
    assert validate_prox_relation(t).ok


def test_transpose_of_morphisms():
    for S, T, r in morphism_pool()[:40]:
        t = r.transpose()
        assert validate_prox_relation(t).ok
        assert t.source == dual_lattice(T.lattice) and t.target == dual_lattice(S.lattice)


# ---------------------------------------------------------------- G and F


def test_g_examples():
    G = functor_G(bool2())
    U = G.universe
    assert G.ent.holds(0, U.mask("1"))
    G = functor_G(m2())
    U = G.universe
    assert G.ent.holds(U.mask("ab"), 0)


@pytest.mark.parametrize("S", everything(), ids=lambda S: S.name)
def test_g_matches_meet_below_join(S):
    G = functor_G(S)
    O = oracles.order_of(S)
    U = G.universe
    idx = [O.labels.index(s) for s in U.symbols]
    assert validate_scent(G.ent, G.approx).ok
    for A in range(1 << U.n):
        for B in range(1 << U.n):
            a = [idx[i] for i in range(U.n) if A >> i & 1]
            b = [idx[i] for i in range(U.n) if B >> i & 1]
            assert G.ent.holds(A, B) == O.le(O.meet(a), O.join(b))
            assert G.ll.holds(A, B) == bool(S.m[O.meet(a), O.join(b)])


def test_f_of_one_free_generator():
    U = Universe("a")
    FS = functor_F(SCEnt(EntailRel.overlap(U), ApproxRel.identity(U)))
    assert len(FS) == 3
    assert np.array_equal(FS.m, FS.lattice.leq)
    assert classify_prox(FS).strong


@pytest.mark.parametrize("S", everything(), ids=lambda S: S.name)
def test_fg_witnesses_are_inverse(S):
    W = fg_witnesses(S)
    assert W.report().ok, str(W.report())
    assert classify_prox(W.image).strong
    assert frame_iso(W.image.lattice, S.lattice, preserve=[(W.image.m, S.m)]) is not None


def test_f_of_sigma_c3_size():
    FS = functor_F(sigma(c3()))
    # Sigma(C3) presents the Scott upsets of C3: four of them
    assert len(FS) == 4
    assert classify_prox(FS).strong


# ---------------------------------------------------------------- S^v and |-^


@pytest.mark.parametrize("S", everything(), ids=lambda S: S.name)
def test_veeify(S):
    V = veeify(S)
    assert V.report().ok, str(V.report())
    assert classify_prox(V.lattice).vee_strong
    P = V.lattice
    for k in range(len(P)):
        if P.m[k, P.lattice.bottom]:
            assert k == P.lattice.bottom


def test_veeify_c3_collapses_to_c3():
    V = veeify(c3())
    assert len(V.lattice) == 3
    assert frame_iso(V.lattice.lattice, c3().lattice) is not None


@pytest.mark.parametrize("S", everything(), ids=lambda S: S.name)
def test_wedge_entailment(S):
    W = wedge_entailment(S)
    assert wedge_ll_mismatch(S, W) is None
    G = functor_G(S)
    # for a strong lattice the wedge presentation has the same << as G(S)
    assert W.ll == G.ll
    assert validate_scent(W.ent, W.approx).ok


def test_wedge_on_c3():
    W = wedge_entailment(c3())
    U = W.universe
    assert W.ent.holds(U.mask("m"), U.mask("m"))


# ---------------------------------------------------------------- maps


def sandwich(r: UpperRel, src, tgt) -> ProxMap:
    return ProxMap(src, tgt, cut_compose(tgt.ll, cut_compose(r, src.ll)))


def jp_oracle(m: ProxMap) -> bool:
    """The defining condition, with the largest family ``{A' : A' r {b}, b in B}``."""
    S, T = m.source.universe, m.target.universe
    models = m.source.ent.models
    for A in range(1 << S.n):
        for B in range(1 << T.n):
            if not m.rel.holds(A, B):
                continue
            fam = [X for X in range(1 << S.n) if any(m.rel.holds(X, 1 << j) for j in range(T.n) if B >> j & 1)]
            # {A} |-~ fam: every model above A contains a member of fam
            if not all(any(X & ~a == 0 for X in fam) for a in models if A & ~a == 0):
                return False
    return True


small = [functor_G(S) for S in (bool2(), c3(), c3w())]


@given(
    st.integers(0, 2),
    st.integers(0, 2),
    st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), max_size=4),
)
def test_join_preservation_agrees_with_definition(i, j, counter):
    src, tgt = small[i], small[j]
    counter = [(X & src.universe.full, Y & tgt.universe.full) for X, Y in counter]
    m = sandwich(UpperRel(src.universe, tgt.universe, counter), src, tgt)
    assert check_karoubi_morphism(m)
    want = jp_oracle(m)
    assert is_join_preserving_map(m) == want
    assert jp_direct(m) == want


def test_identity_map_is_jp_and_karoubi():
    for S in named():
        m = identity_map(functor_G(S))
        assert is_join_preserving_map(m)
        assert check_karoubi_morphism(m)


def test_jp0_failure():
    src, tgt = small[1], small[0]
    m = ProxMap(src, tgt, UpperRel.full(src.universe, tgt.universe))
    assert jp0_witness(m) is not None
    assert not is_join_preserving_map(m)


def test_entailment_alone_is_not_karoubi_when_approx_is_strict():
    G = functor_G(c3w())
    assert not check_karoubi_morphism(G.ent.as_upper(), G, G)
    assert check_karoubi_morphism(G.ll, G, G)


@given(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.data())
def test_jp_maps_compose(i, j, k, data):
    A, B, C = small[i], small[j], small[k]

    def jp_map(src, tgt):
        counter = data.draw(st.lists(st.tuples(st.integers(0, src.universe.full), st.integers(0, tgt.universe.full)), max_size=3))
        return sandwich(UpperRel(src.universe, tgt.universe, counter), src, tgt)

    f, g = jp_map(A, B), jp_map(B, C)
    if is_join_preserving_map(f) and is_join_preserving_map(g):
        assert is_join_preserving_map(f.then(g))
        assert check_karoubi_morphism(f.then(g))


# ---------------------------------------------------------------- morphisms between lattices and adjoints


def test_morphism_pool_is_join_preserving():
    pool = morphism_pool()
    assert len(pool) > 50
    for S, T, r in pool:
        assert morphism_report(r, S, T).ok
        assert is_join_preserving_relation(r)


def test_identity_adjoint():
    for S in everything():
        assert is_adjoint_pair(S.prec, S.prec, source=S, target=S)
        G = functor_G(S)
        assert is_adjoint_pair(identity_map(G), identity_map(G))


def test_non_adjoint_pair_has_witness():
    S = c3()
    L = S.lattice
    full = ProxRel(L, L, np.ones((3, 3), dtype=bool))
    res = is_adjoint_pair(full, S.prec, source=S, target=S)
    assert not res and res.witness


def test_adjointness_needs_lattices():
    with pytest.raises(InvalidStructure):
        is_adjoint_pair(c3().prec, c3().prec)


def test_proxrel_shape_checked():
    with pytest.raises(InvalidStructure):
        ProxRel(c3().lattice, bool2().lattice, np.ones((3, 3), dtype=bool))


def test_wedge_axioms_generate_a_valid_scent():
    S = c3w()
    W = wedge_entailment(S)
    again = scent_from_axioms(W.axioms, W.approx)
    assert again == W
    assert isinstance(W.axioms, AxiomSet)


@pytest.mark.parametrize("S", everything(), ids=lambda S: S.name)
def test_inclusion_into_veeify_preserves_joins(S):
    # every fixture is join-strong, where the inclusion is a lattice map
    assert classify_prox(S).vee_strong
    assert veeify(S).inclusion_join_failure() is None


def test_inclusion_join_failure_is_detected():
    V = veeify(c3())
    bottom, top = V.lattice.lattice.bottom, V.lattice.lattice.top
    broken = dataclasses.replace(V, singletons=[bottom, top, bottom])
    assert broken.inclusion_join_failure() == ("m", "1")
