"""De Groot duals and a suite of machine-checked duality statements.

Each check tries the strongest available evidence first: literal equality
of generated relations (after a canonical renaming), then explicit witness
maps, then a search for a frame isomorphism.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import constructions as C
from .entail import SCEnt, UpperRel, cut_compose, dual_scent, approx_ext
from .errors import InvalidStructure, SizeCapExceeded
from .prox import (
    ProxRel,
    StrongProxLat,
    compose_prox,
    dual_prox_lattice,
    functor_F,
    functor_G,
    validate_prox_relation,
)
from .sets import Tagged, format_subset, star, symbol_str
from .spectra import filters_frame, frame_iso, rounded_ideals

THEOREMS = ("T-UL", "T-ΣU", "T-DD", "T-PC", "T-LS", "T-V", "T-P", "T-VAL", "T-NAT", "T-HM")
ALIASES = {"T-SU": "T-ΣU", "T-SIGMAU": "T-ΣU"}


def canonical_theorem_id(name: str) -> str:
    key = name.strip().upper()
    key = ALIASES.get(key, key)
    for t in THEOREMS:
        if t.upper() == key:
            return t
    raise KeyError(f"unknown theorem id {name!r}; known: {', '.join(THEOREMS)}")


# ---------------------------------------------------------------- duals


def degroot_dual_splat(S: StrongProxLat) -> StrongProxLat:
    return dual_prox_lattice(S)


def degroot_dual_scent(e: SCEnt) -> SCEnt:
    return dual_scent(e)


def dual_val_symbol(x: Tagged) -> Tagged:
    return Tagged("val", x.base, 1 - x.weight)


def dual_val_generators(A: Iterable[Tagged], grid: C.RationalGrid | None = None) -> tuple:
    """``<p,a> -> <1-p,a>`` pointwise; with a grid, the image must stay on it."""
    out = []
    for x in A:
        if not isinstance(x, Tagged) or x.tag != "val":
            raise InvalidStructure(f"{symbol_str(x)} is not a valuation generator")
        y = dual_val_symbol(x)
        if grid is not None and y.weight not in grid.values:
            raise InvalidStructure(f"grid is not closed under p -> 1-p: {symbol_str(y)} is off the grid")
        out.append(y)
    return tuple(sorted(out, key=lambda s: (s.weight, str(s.base))))


# ---------------------------------------------------------------- reports


@dataclass
class TheoremCheck:
    id: str
    inputs: tuple[str, ...]
    verdict: str = "pass"
    route: str = ""
    evidence: list[str] = field(default_factory=list)
    counterexample: str | None = None
    downgraded: bool = False
    # element maps found by the frame-isomorphism route
    isomorphisms: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def note(self, msg: str) -> None:
        self.evidence.append(msg)

    def fail(self, msg: str, counterexample: str | None = None) -> None:
        self.verdict = "fail"
        self.evidence.append(f"FAILED: {msg}")
        if counterexample and self.counterexample is None:
            self.counterexample = counterexample

    def lines(self) -> list[str]:
        out = [f"{self.id} on {', '.join(self.inputs)}: {self.verdict.upper()} (route: {self.route or 'none'})"]
        if self.downgraded:
            out.append("  note: a stronger route failed; the verdict rests on a weaker one")
        out += ["  " + e for e in self.evidence]
        if self.counterexample:
            out.append(f"  counterexample: {self.counterexample}")
        return out

    def __str__(self):
        return "\n".join(self.lines())


def _pair_str(e: SCEnt, w: tuple[int, int]) -> str:
    U = e.universe
    return f"{format_subset(U.subset(w[0]))} |- {format_subset(U.subset(w[1]))}"


def _compare_scents(chk: TheoremCheck, what: str, lhs: SCEnt, rhs: SCEnt) -> bool:
    """Literal equality of entailment and approximation; records a certificate or a counterexample."""
    if lhs.universe != rhs.universe:
        chk.fail(f"{what}: generator sets differ")
        return False
    if lhs.ent != rhs.ent:
        w = lhs.ent.as_upper().difference_witness(rhs.ent.as_upper())
        side = "left only" if w is not None and lhs.ent.holds(*w) else "right only"
        chk.fail(f"{what}: entailments differ", f"{_pair_str(lhs, w)} ({side})" if w else None)
        return False
    if lhs.approx != rhs.approx:
        i, j = np.argwhere(lhs.approx.matrix != rhs.approx.matrix)[0]
        S = lhs.universe.symbols
        chk.fail(f"{what}: approximations differ", f"({symbol_str(S[i])}, {symbol_str(S[j])})")
        return False
    chk.note(
        f"{what}: equal ({lhs.universe.n} generators, {len(lhs.ent.models)} models, "
        f"{int(lhs.approx.matrix.sum())} approximation pairs)"
    )
    return True


def _compare_upper(chk: TheoremCheck, what: str, lhs: UpperRel, rhs: UpperRel, e: SCEnt) -> bool:
    w = lhs.difference_witness(rhs)
    if w is None:
        chk.note(f"{what}: equal")
        return True
    U = e.universe
    chk.fail(what, f"A={format_subset(U.subset(w[0]))}, B={format_subset(U.subset(w[1]))}")
    return False


def _rename_scent(e: SCEnt, mapping: Callable, universe) -> SCEnt:
    return SCEnt(e.ent.rename(mapping, universe), e.approx.rename(mapping, universe), name=e.name)


def _frame_route(chk: TheoremCheck, what: str, F1, F2) -> bool:
    iso = frame_iso(F1, F2)
    if iso is None:
        chk.fail(f"{what}: no order isomorphism between frames of sizes {len(F1)} and {len(F2)}")
        return False
    chk.note(f"{what}: isomorphic frames of {len(F1)} elements")
    chk.isomorphisms.append(iso)
    return True


# ---------------------------------------------------------------- individual statements


def _check_ul(S, chk):
    D = dual_prox_lattice(S)
    chk.route = "literal"
    _compare_scents(chk, "dual of P_U(S) vs P_L(S^op)", dual_scent(C.upper(S)), C.lower(D))
    _compare_scents(chk, "dual of P_L(S) vs P_U(S^op)", dual_scent(C.lower(S)), C.upper(D))


def _check_sigma_u(S, chk):
    D = dual_prox_lattice(S)
    chk.route = "literal"
    _compare_scents(chk, "Sigma(S^op) vs P_U(S)", C.sigma(D), C.upper(S))
    _compare_scents(chk, "dual of Sigma(S) vs P_L(S)", dual_scent(C.sigma(S)), C.lower(S))


def _check_dd(S, chk):
    chk.route = "literal"
    _compare_scents(chk, "dual of P_D(S) vs P_D(S^op)", dual_scent(C.double(S)), C.double(dual_prox_lattice(S)))


def _swap_modal(x):
    return Tagged("box" if x.tag == "dia" else "dia", x.base)


def _check_v(S, chk):
    chk.route = "literal"
    lhs = dual_scent(C.vietoris(S))
    rhs = C.vietoris(dual_prox_lattice(S))
    _compare_scents(chk, "dual of P_V(S) with <> and [] swapped vs P_V(S^op)", _rename_scent(lhs, _swap_modal, rhs.universe), rhs)


def _swap_bar(x):
    return x.base if isinstance(x, Tagged) and x.tag == "bar" else Tagged("bar", x)


def _inverse_maps(chk, what, e1: SCEnt, e2: SCEnt, r: UpperRel, s: UpperRel) -> bool:
    ok = _compare_upper(chk, f"{what}: r then s is << of the source", cut_compose(s, r), e1.ll, e1)
    return _compare_upper(chk, f"{what}: s then r is << of the target", cut_compose(r, s), e2.ll, e2) and ok


def _check_p(S, chk):
    e = functor_G(S)
    ed = dual_scent(e)
    P, Pp = C.patch(e), C.patch_prime(e)
    chk.route = "literal"
    target = C.patch_prime(ed)
    _compare_scents(chk, "Patch'(e) with a and ~a exchanged vs Patch'(e^op)", _rename_scent(Pp, _swap_bar, target.universe), target)
    _compare_upper(chk, "<< of Patch equals << of Patch'", P.ll, Pp.ll, P)
    # r : Patch -> Patch' is <<_P and s is <<_P'
    _inverse_maps(chk, "Patch ~ Patch' witnesses", P, Pp, P.ll, Pp.ll)


def _val_witness(src: SCEnt, tgt: SCEnt) -> UpperRel:
    """``A r B`` iff ``A << dualval(B)``: the counter pairs of ``<<`` with the target side renamed."""
    U, V = src.universe, tgt.universe
    perm = [V.index[dual_val_symbol(x)] for x in U.symbols]

    def move(m):
        out = 0
        for i in range(U.n):
            if m >> i & 1:
                out |= 1 << perm[i]
        return out

    return UpperRel(U, V, [(X, move(Y)) for X, Y in src.ll.counter])


def _check_val(S, chk, grid: C.RationalGrid):
    grid.require_complement_closed()
    D = dual_prox_lattice(S)
    chk.route = "literal"
    V, Cd = C.valuations(S, grid), C.covaluations(D, grid)
    if V.axioms.transpose().as_set() == Cd.axioms.as_set():
        chk.note(f"reversed axioms of V(S) equal the axioms of C(S^op): {len(Cd.axioms.as_set())} axioms")
    else:
        diff = sorted(V.axioms.transpose().as_set() ^ Cd.axioms.as_set(), key=str)
        chk.fail("reversed axioms of V(S) differ from the axioms of C(S^op)", str(diff[0]))
    _compare_scents(chk, "dual of V(S) vs C(S^op)", dual_scent(V), Cd)
    VP, CP = C.prob_valuations(S, grid), C.prob_covaluations(S, grid)
    _compare_scents(chk, "VP(S) renamed by <p,a> -> <1-p,a> vs CP(S)", _rename_scent(VP, dual_val_symbol, CP.universe), CP)
    VPd = C.prob_valuations(D, grid)
    _compare_scents(chk, "dual of VP(S) vs CP(S^op)", dual_scent(VP), C.prob_covaluations(D, grid))
    _compare_scents(
        chk,
        "dual of VP(S), renamed by <p,a> -> <1-p,a>, vs VP(S^op)",
        _rename_scent(dual_scent(VP), dual_val_symbol, VPd.universe),
        VPd,
    )
    r, s = _val_witness(VP, CP), _val_witness(CP, VP)
    _inverse_maps(chk, "VP ~ CP witnesses", VP, CP, r, s)
    chk.note(f"grid: {', '.join(str(p) for p in grid)}")


def _star_family(U, family_masks):
    return [U.mask(B) for B in star(U.subset(A) for A in family_masks)]


def naturality_witnesses(e: SCEnt, cap: int = 64) -> tuple[StrongProxLat, StrongProxLat, ProxRel, ProxRel]:
    """``r_S : F(e)^op -> F(e^op)`` with ``U r V`` iff ``U* >>~ V`` and its inverse ``t_S``."""
    Fe = functor_F(e, cap=cap)
    ed = dual_scent(e)
    Fd = functor_F(ed, cap=cap)
    src = dual_prox_lattice(Fe)
    U = e.universe
    fam = [Fe.presentation.minimal_masks(x) for x in Fe.presentation.exts]
    fam_d = [Fd.presentation.minimal_masks(x) for x in Fd.presentation.exts]
    stars = [_star_family(U, f) for f in fam]
    stars_d = [_star_family(U, f) for f in fam_d]
    gg = approx_ext(ed.ll)  # >>~, the approximation of e^op extended to families
    ll = approx_ext(e.ll)
    r = np.array([[gg(stars[i], fam_d[j]) for j in range(len(Fd))] for i in range(len(Fe))], dtype=bool)
    t = np.array([[ll(fam[i], stars_d[j]) for i in range(len(Fe))] for j in range(len(Fd))], dtype=bool)
    # the dual lattice keeps element labels, so rows follow Fe's element order
    return src, Fd, ProxRel(src.lattice, Fd.lattice, r), ProxRel(Fd.lattice, src.lattice, t)


def _check_nat(S, chk):
    e = functor_G(S)
    src, tgt, r, t = naturality_witnesses(e)
    chk.route = "witness"
    for name, rel in (("r_S", r), ("t_S", t)):
        rep = validate_prox_relation(rel)
        if rep.ok:
            chk.note(f"{name} is a proximity relation")
        else:
            chk.fail(f"{name} is not a proximity relation", rep.violations[0])
    for what, got, want in (
        ("r_S then t_S is the approximation of F(e)^op", compose_prox(r, t), src.prec),
        ("t_S then r_S is the approximation of F(e^op)", compose_prox(t, r), tgt.prec),
    ):
        if got == want:
            chk.note(what)
        else:
            a, b = got.first_difference(want)
            chk.fail(what, f"({a}, {b})")
    chk.note(f"F(e)^op and F(e^op) have {len(src)} elements")


def _check_hm(S, chk):
    chk.route = "frame-iso"
    _frame_route(chk, "RIdl(S^op) vs filters of RIdl(S)", rounded_ideals(dual_prox_lattice(S)), filters_frame(rounded_ideals(S)))


def _ridl_of(e: SCEnt):
    return rounded_ideals(functor_F(e))


def _check_pc(S, chk):
    chk.route = "frame-iso"
    D, SS = C.double(S), C.sigma(functor_F(C.sigma(S)))
    if D.universe.n != SS.universe.n:
        chk.note(f"no literal route: {D.universe.n} generators for P_D(S), {SS.universe.n} for Sigma(F(Sigma(S)))")
    lhs = _ridl_of(D)
    rhs = _ridl_of(SS)
    _frame_route(chk, "RIdl F(P_D(S)) vs RIdl F(Sigma(F(Sigma(S))))", lhs, rhs)


def _check_ls(S, chk):
    chk.route = "frame-iso"
    a = _ridl_of(C.lower(functor_F(C.sigma(S))))
    b = _ridl_of(C.sigma(functor_F(C.upper(S))))
    _frame_route(chk, "RIdl F(P_L(F(Sigma(S)))) vs RIdl F(Sigma(F(P_U(S))))", a, b)
    c = _ridl_of(C.lower(functor_F(C.upper(S))))
    d = _ridl_of(C.double(S))
    _frame_route(chk, "RIdl F(P_L(F(P_U(S)))) vs RIdl F(P_D(S))", c, d)


_CHECKS = {
    "T-UL": _check_ul,
    "T-ΣU": _check_sigma_u,
    "T-DD": _check_dd,
    "T-PC": _check_pc,
    "T-LS": _check_ls,
    "T-V": _check_v,
    "T-P": _check_p,
    "T-NAT": _check_nat,
    "T-HM": _check_hm,
}


def verify_duality_theorem(theorem: str, S: StrongProxLat, grid: C.RationalGrid | None = None) -> TheoremCheck:
    """Run one duality statement on a fixture.

    Raises ``KeyError`` for an unknown id and ``SizeCapExceeded`` when an
    intermediate structure is too large.
    """
    tid = canonical_theorem_id(theorem)
    chk = TheoremCheck(tid, (S.name or "S",))
    if tid == "T-VAL":
        _check_val(S, chk, grid or C.DEFAULT_GRID)
    else:
        _CHECKS[tid](S, chk)
    return chk


def verify_all(S: StrongProxLat, grid: C.RationalGrid | None = None) -> list[TheoremCheck]:
    out = []
    for t in THEOREMS:
        try:
            out.append(verify_duality_theorem(t, S, grid))
        except SizeCapExceeded as exc:
            chk = TheoremCheck(t, (S.name or "S",), verdict="skipped")
            chk.note(f"size cap: {exc}")
            out.append(chk)
    return out
