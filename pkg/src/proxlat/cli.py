"""Command line front end.

Exit codes: 0 success, 1 a check failed, 2 invalid input, 3 a size cap was hit.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import constructions as C
from .duality import THEOREMS, canonical_theorem_id, verify_duality_theorem
from .entail import SCEnt, dual_scent, generated_scent_failures, validate_scent
from .errors import InvalidStructure, ParseError, SizeCapExceeded
from .lattice import validate_lattice
from .plotting import plot_hasse, to_dot
from .prox import StrongProxLat, classify_prox, dual_prox_lattice, functor_F, functor_G, validate_prox_lattice
from .pxl import FixtureFile, fixture_from_lattice, fixture_from_scent, format_fixture, parse_rational, read_fixture
from .spectra import frame_iso, models_of_scent, points, rounded_ideals, scott_upsets

OK, FAILED, INVALID, CAPPED = 0, 1, 2, 3
EMIT_CAP = 8  # generators; a full listing has up to 4^n pairs


class CliError(Exception):
    def __init__(self, msg: str, code: int):
        super().__init__(msg)
        self.code = code


class Output:
    def __init__(self):
        self.lines: list[str] = []

    def __call__(self, *parts: str) -> None:
        self.lines.extend(parts)

    def text(self) -> str:
        return "".join(line if line.endswith("\n") else line + "\n" for line in self.lines)


# ---------------------------------------------------------------- loading


def load(path: str, max_size: int) -> FixtureFile:
    try:
        ff = read_fixture(path)
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror}", INVALID) from None
    except ParseError as exc:
        raise CliError(f"{path}: {exc}", INVALID) from None
    n = len(ff.symbols())
    if n > max_size:
        raise CliError(f"{path}: {n} {'elements' if ff.kind == 'lattice' else 'generators'} exceed --max-size {max_size}", CAPPED)
    return ff


def lattice_reports(S: StrongProxLat) -> list:
    reps = [validate_lattice(S.lattice)]
    if reps[0].ok:
        reps.append(validate_prox_lattice(S))
    return reps


def strong_lattice(ff: FixtureFile, out: Output | None = None) -> StrongProxLat:
    """A valid strong proximity lattice from either kind of fixture; axiom fixtures go through F."""
    if ff.kind == "entail":
        e = valid_scent(ff)
        S = functor_F(e)
        if out is not None:
            out(f"using F({ff.name}): {len(S)} elements")
        return S
    try:
        S = ff.prox_lattice()
    except (InvalidStructure, KeyError) as exc:
        raise CliError(str(exc), INVALID) from None
    for rep in lattice_reports(S):
        if not rep.ok:
            raise CliError(str(rep), INVALID)
    cls = classify_prox(S)
    if not cls.strong:
        raise CliError(f"{ff.name} is not a strong proximity lattice: {cls.witnesses()[0]}", INVALID)
    return S


def valid_scent(ff: FixtureFile) -> SCEnt:
    try:
        e = ff.scent()
    except (InvalidStructure, KeyError) as exc:
        raise CliError(str(exc), INVALID) from None
    rep = validate_scent(e.ent, e.approx)
    if not rep.ok:
        raise CliError(str(rep), INVALID)
    return e


def grid_from(args, ff: FixtureFile) -> C.RationalGrid | None:
    if args.grid:
        try:
            return C.RationalGrid.of(parse_rational(t) for t in args.grid)
        except ParseError as exc:
            raise CliError(f"--grid: {str(exc).split(': ', 1)[-1]}", INVALID) from None
    return ff.grid


# ---------------------------------------------------------------- rendering helpers


def relation_listing(e: SCEnt, name: str) -> str:
    """Every pair ``A |- B`` as an axiom line, in canonical subset order."""
    U = e.universe
    if U.n > EMIT_CAP:
        raise SizeCapExceeded(f"--emit-relation lists up to 4^n pairs; n = {U.n} exceeds {EMIT_CAP}")
    order = U.sorted_masks(range(1 << U.n))
    pairs = [(U.subset(A), U.subset(B)) for A in order for B in order if e.ent.holds(A, B)]
    return format_fixture(fixture_from_scent(e, axioms=pairs, name=name))


def scent_summary(e: SCEnt, out: Output) -> bool:
    rep = validate_scent(e.ent, e.approx)
    out(f"generators: {e.universe.n}")
    if e.axioms is not None:
        out(f"axioms: {len(e.axioms)}")
    out(f"models of |-: {len(e.ent.models)}")
    out(f"approximation pairs: {int(e.approx.matrix.sum())}")
    out(f"strong continuous entailment relation: {'ok' if rep.ok else 'FAILED'}")
    out(*("  " + v for v in rep.violations))
    ok = rep.ok
    if e.axioms is not None:
        fails = generated_scent_failures(e.axioms, e.approx, e.ent) if e.approx.is_idempotent() else ["approximation not idempotent"]
        out(f"sufficient conditions on the axioms: {'ok' if not fails else 'FAILED'}")
        out(*("  " + f for f in fails[:5]))
        ok = ok and not fails
    return ok


def lattice_summary(S: StrongProxLat, out: Output) -> None:
    E = S.elements
    out(f"elements: {' '.join(E)}")
    out("covers: " + " ".join(f"{E[a]}<{E[b]}" for a, b in S.lattice.covers()))
    pairs = [f"{E[i]}<{E[j]}" for i in range(len(S)) for j in range(len(S)) if S.m[i, j] and i != j]
    out("approximation (off the diagonal): " + (" ".join(pairs) or "none"))


def render(out: Output, path: str, panels, **kw) -> None:
    plot_hasse(path, panels, **kw)
    out(f"plot written to {path}")


# ---------------------------------------------------------------- commands


def cmd_validate(args, out: Output) -> int:
    ff = load(args.file, args.max_size)
    if ff.kind == "lattice":
        try:
            S = ff.prox_lattice()
        except (InvalidStructure, KeyError) as exc:
            raise CliError(str(exc), INVALID) from None
        out(f"lattice {ff.name}: {len(S)} elements")
        for label, rep in zip(("distributive lattice", "proximity"), lattice_reports(S)):
            rep.subject = label
            out(str(rep))
            if not rep.ok:
                return INVALID
        cls = classify_prox(S)
        out(f"strong proximity lattice: {'ok' if cls.strong else 'FAILED'}")
        out(*("  " + w for w in cls.witnesses()))
        if args.format == "dot":
            out.lines = [to_dot(S.lattice, ff.name, S.m)]
        if args.plot:
            render(out, args.plot, [(S.lattice, ff.name, S.m)])
        return OK if cls.strong else FAILED
    try:
        e = ff.scent()
    except (InvalidStructure, KeyError) as exc:
        raise CliError(str(exc), INVALID) from None
    out(f"entailment {ff.name}")
    ok = scent_summary(e, out)
    if args.emit_relation:
        out(relation_listing(e, ff.name))
    if args.plot and ok:
        S = functor_F(e)
        render(out, args.plot, [(S.lattice, f"F({ff.name})", S.m)])
    return OK if ok else FAILED


def cmd_construct(args, out: Output) -> int:
    ff = load(args.file, args.max_size)
    grid = grid_from(args, ff)
    kind = args.kind
    if ff.kind == "entail" and kind in C.SCENT_KINDS:
        e = C.SCENT_KINDS[kind](valid_scent(ff))
    else:
        S = strong_lattice(ff, out)
        if kind in ("val", "coval", "valp", "covalp"):
            e = C.construct(kind, S, grid or C.DEFAULT_GRID)
            out("grid: " + " ".join(str(p) for p in (grid or C.DEFAULT_GRID)))
        else:
            e = C.construct(kind, S)
    out(f"{kind}({ff.name})")
    ok = scent_summary(e, out)
    if e.axioms is not None and not args.emit_relation:
        out("axioms:")
        out(*("  " + line for line in e.axioms.lines()))
    if args.emit_relation:
        out(relation_listing(e, f"{kind}_{ff.name}"))
    if args.format == "dot" or args.plot:
        F = functor_F(e)
        if args.format == "dot":
            out.lines = [to_dot(F.lattice, f"F({kind}({ff.name}))", F.m)]
        if args.plot:
            render(out, args.plot, [(F.lattice, f"F({kind}({ff.name}))", F.m)])
    return OK if ok else FAILED


def cmd_dual(args, out: Output) -> int:
    ff = load(args.file, args.max_size)
    if ff.kind == "entail":
        e = valid_scent(ff)
        d = dual_scent(e)
        if args.emit_relation:
            out(relation_listing(d, f"{ff.name}_op"))
        else:
            out(format_fixture(fixture_from_scent(d, name=f"{ff.name}_op")))
        return OK
    S = strong_lattice(ff)
    D = dual_prox_lattice(S)
    text = format_fixture(fixture_from_lattice(D, name=f"{ff.name}_op"))
    out(to_dot(D.lattice, f"{ff.name}_op", D.m) if args.format == "dot" else text)
    if args.plot:
        render(out, args.plot, [(S.lattice, ff.name, S.m), (D.lattice, f"{ff.name}^op", D.m)])
    return OK


def cmd_spectrum(args, out: Output) -> int:
    ff = load(args.file, args.max_size)
    S = strong_lattice(ff, out)
    R = rounded_ideals(S)
    U = scott_upsets(S)
    P = points(S)
    if args.format == "dot":
        out(to_dot(R.lattice, f"RIdl({ff.name})"))
    else:
        out(f"rounded ideals: {len(R)}: " + ", ".join(R.elements))
        E = R.elements
        out("  covers: " + (" ".join(f"{E[a]}<{E[b]}" for a, b in R.lattice.covers()) or "none"))
        out(f"rounded upsets: {len(U)}: " + ", ".join(U.elements))
        out(f"points: {len(P)}: " + ", ".join(map(str, P)))
    if args.plot:
        render(out, args.plot, [(S.lattice, ff.name, S.m), (R.lattice, "rounded ideals"), (U.lattice, "rounded upsets")])
    return OK


def cmd_points(args, out: Output) -> int:
    ff = load(args.file, args.max_size)
    S = strong_lattice(ff, out)
    P = points(S)
    out(f"{len(P)} point{'s' if len(P) != 1 else ''}: " + ", ".join(map(str, P)))
    if args.plot:
        panels = [(S.lattice, str(p), S.m, [S.lattice.index[x] for x in p.filter]) for p in P] or [(S.lattice, "no points")]
        render(out, args.plot, panels[:6], suptitle=f"points of {ff.name}")
    return OK


def cmd_models(args, out: Output) -> int:
    ff = load(args.file, args.max_size)
    if ff.kind == "lattice":
        e = functor_G(strong_lattice(ff))
    else:
        e = valid_scent(ff)
    M = models_of_scent(e)
    out(f"{len(M)} model{'s' if len(M) != 1 else ''}: " + ", ".join(map(str, M)))
    if args.plot:
        S = functor_F(e)
        render(out, args.plot, [(S.lattice, f"F({ff.name})", S.m)])
    return OK


def cmd_check(args, out: Output) -> int:
    ff = load(args.file, args.max_size)
    S = strong_lattice(ff, out)
    grid = grid_from(args, ff)
    ids = THEOREMS if args.theorem.lower() == "all" else [args.theorem]
    try:
        ids = [canonical_theorem_id(t) for t in ids]
    except KeyError as exc:
        raise CliError(exc.args[0], INVALID) from None
    code = OK
    for tid in ids:
        try:
            chk = verify_duality_theorem(tid, S, grid)
        except SizeCapExceeded as exc:
            out(f"{tid} on {S.name}: SKIPPED (size cap: {exc})")
            code = max(code, CAPPED) if code != FAILED else code
            continue
        out(*chk.lines())
        if not chk.passed:
            code = FAILED
    if args.plot:
        D = dual_prox_lattice(S)
        render(out, args.plot, [(S.lattice, S.name, S.m), (D.lattice, f"{S.name}^op", D.m),
                               (rounded_ideals(S).lattice, "rounded ideals")])
    return code


def cmd_compare(args, out: Output) -> int:
    A = strong_lattice(load(args.file1, args.max_size))
    B = strong_lattice(load(args.file2, args.max_size))
    iso = frame_iso(A.lattice, B.lattice, preserve=[(A.m, B.m)])
    if args.plot:
        render(out, args.plot, [(A.lattice, A.name, A.m), (B.lattice, B.name, B.m)])
    if args.format == "dot":
        out(to_dot(A.lattice, A.name, A.m), to_dot(B.lattice, B.name, B.m))
    if iso is None:
        out(f"{A.name} and {B.name} are not isomorphic as proximity lattices")
        return FAILED
    out(f"{A.name} and {B.name} are isomorphic: " + ", ".join(f"{k} -> {v}" for k, v in iso.items()))
    return OK


# ---------------------------------------------------------------- argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-size", type=int, default=64, metavar="N",
                        help="refuse inputs with more than N elements or generators (exit 3)")
    common.add_argument("--format", choices=("text", "dot"), default="text")
    common.add_argument("--emit-relation", action="store_true",
                        help="list every pair of the generated relation as a replayable fixture")
    common.add_argument("--plot", metavar="PATH", help="also render Hasse diagrams to an image file")

    p = argparse.ArgumentParser(prog="proxlat", description="Finite proximity lattices, entailment relations and their duals.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="run every validator for the fixture")
    s.add_argument("file")
    s = sub.add_parser("construct", parents=[common], help="build a construction and report on it")
    s.add_argument("kind", choices=C.KINDS)
    s.add_argument("file")
    s.add_argument("--grid", nargs="+", metavar="P", help="rationals for valuation generators")
    for name, text in (("dual", "print the de Groot dual"), ("spectrum", "rounded ideals, upsets and points"),
                       ("points", "list the points"), ("models", "list the models of the entailment relation")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("file")
    s = sub.add_parser("check", parents=[common], help="run a duality check (" + ", ".join(THEOREMS) + ", or all)")
    s.add_argument("theorem")
    s.add_argument("file")
    s.add_argument("--grid", nargs="+", metavar="P")
    s = sub.add_parser("compare", parents=[common], help="search for an isomorphism of proximity lattices")
    s.add_argument("file1")
    s.add_argument("file2")
    return p


COMMANDS = {
    "validate": cmd_validate,
    "construct": cmd_construct,
    "dual": cmd_dual,
    "spectrum": cmd_spectrum,
    "points": cmd_points,
    "models": cmd_models,
    "check": cmd_check,
    "compare": cmd_compare,
}


def run_command(argv: Sequence[str]) -> tuple[int, str]:
    """Run one command; returns the exit code and everything it printed."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return (INVALID if exc.code else OK), ""
    out = Output()
    try:
        code = COMMANDS[args.command](args, out)
    except CliError as exc:
        out(f"error: {exc}")
        code = exc.code
    except SizeCapExceeded as exc:
        out(f"size cap: {exc}")
        code = CAPPED
    except (InvalidStructure, ParseError) as exc:
        out(f"error: {exc}")
        code = INVALID
    return code, out.text()


def main(argv: Sequence[str] | None = None) -> int:
    code, text = run_command(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
