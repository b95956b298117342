import subprocess
import sys

import pytest

from proxlat.cli import CAPPED, EMIT_CAP, FAILED, INVALID, OK, main, run_command
from proxlat.constructions import sigma, valuations
from proxlat.fixtures import c3
from proxlat.pxl import parse_fixture


@pytest.fixture
def fx(fixture_dir):
    return lambda name: str(fixture_dir / f"{name}.pxl")


def run(*argv):
    return run_command([str(a) for a in argv])


def test_points_of_c3(fx):
    assert run("points", fx("c3")) == (OK, "2 points: {1}, {m,1}\n")


def test_check_ul_passes(fx):
    code, text = run("check", "T-UL", fx("c3"))
    assert code == OK
    assert text.startswith("T-UL on C3: PASS (route: literal)")


def test_validate_n5_gives_distributivity_witness(fx):
    code, text = run("validate", fx("n5"))
    assert code == INVALID
    assert "distributiv" in text


def test_validate_good_fixtures(fx):
    for name in ("bool2", "c3", "c3w", "m2"):
        code, text = run("validate", fx(name))
        assert code == OK, text
        assert "strong proximity lattice: ok" in text


def test_validate_entailment_fixture(fx):
    code, text = run("validate", fx("sierpinski"))
    assert code == OK
    assert "strong continuous entailment relation: ok" in text


def test_validate_reports_non_strong_relation(tmp_path):
    # a proximity relation on C3 that is not strong: m < 0 breaks Prox0
    p = tmp_path / "weak.pxl"
    p.write_text("lattice W\nelements 0 m 1\nhasse 0<m m<1\nprox\n0<0 m<0 0<m m<m 0<1 m<1 1<1\n")
    code, text = run("validate", p)
    assert code == FAILED
    assert "strong proximity lattice: FAILED" in text


def test_models_and_spectrum(fx):
    assert run("models", fx("sierpinski")) == (OK, "2 models: {}, {p}\n")
    code, text = run("spectrum", fx("c3"))
    assert code == OK
    assert "rounded ideals: 3: {0}, {0,m}, {0,m,1}" in text
    assert "points: 2: {1}, {m,1}" in text


def test_dual_prints_a_fixture(fx):
    code, text = run("dual", fx("c3w"))
    assert code == OK
    ff = parse_fixture(text)
    assert ff.name == "C3w_op"
    assert ("1", "m") in ff.prox


def test_compare(fx):
    assert run("compare", fx("c3"), fx("c3w"))[0] == FAILED
    code, text = run("compare", fx("m2"), fx("m2"))
    assert code == OK
    assert "0 -> 0" in text


@pytest.mark.parametrize("kind", ["sigma", "upper", "lower", "double", "vietoris", "patch", "patchp", "scent-lower", "scent-upper"])
def test_construct_kinds(fx, kind):
    code, text = run("construct", kind, fx("bool2"))
    assert code == OK, text
    assert "strong continuous entailment relation: ok" in text


@pytest.mark.parametrize("kind", ["val", "coval", "valp", "covalp"])
def test_construct_valuations_report_failure(fx, kind):
    code, text = run("construct", kind, fx("bool2"))
    assert code == FAILED
    assert "grid: 0 1/4 1/2 3/4 1" in text
    assert "interpolation" in text or "idempotent" in text


def test_grid_from_file_and_flag(fx):
    code, text = run("construct", "val", fx("val_c3"))
    assert "generators: 15" in text
    code, text = run("construct", "val", fx("c3"), "--grid", "0", "2/4", "1")
    assert "grid: 0 1/2 1" in text and "generators: 9" in text


def test_decimal_grid_rejected(fx):
    code, text = run("construct", "val", fx("c3"), "--grid", "1/4", "0.5")
    assert code == INVALID
    assert "decimal" in text


def test_check_all(fx):
    code, text = run("check", "all", fx("m2"))
    assert code == FAILED
    assert text.count(": PASS") == 9
    assert "T-VAL on M2: FAIL" in text


def test_check_alias_and_unknown(fx):
    assert run("check", "T-SU", fx("c3"))[0] == OK
    code, text = run("check", "T-NOPE", fx("c3"))
    assert code == INVALID and "T-NOPE" in text


def test_check_counterexample(fx):
    code, text = run("check", "T-VAL", fx("bool2"))
    assert code == FAILED
    assert "counterexample:" in text


def test_size_cap(fx):
    code, text = run("validate", fx("n5"), "--max-size", "3")
    assert code == CAPPED
    assert "--max-size 3" in text


def test_emit_relation_cap(fx):
    code, text = run("construct", "val", fx("c3"), "--emit-relation")
    assert valuations(c3()).universe.n > EMIT_CAP
    assert code == CAPPED


def test_input_errors(fx, tmp_path):
    assert run("points", tmp_path / "missing.pxl")[0] == INVALID
    bad = tmp_path / "bad.pxl"
    bad.write_text("lattice B\nelements 0 1\nhasse 0<2\n")
    code, text = run("points", bad)
    assert code == INVALID
    assert "line 3, column 9" in text
    assert run("frobnicate")[0] == INVALID


def test_emit_relation_replays(fx, tmp_path):
    code, text = run("construct", "sigma", fx("c3"), "--emit-relation")
    assert code == OK
    listing = text[text.index("entail sigma_C3") :]
    replay = tmp_path / "sigma.pxl"
    replay.write_text(listing)
    e = parse_fixture(listing).scent()
    assert e.ent == sigma(c3()).ent
    code, again = run("validate", replay, "--emit-relation")
    assert code == OK
    assert again[again.index("entail sigma_C3") :] == listing


def test_emit_relation_is_sorted(fx):
    _, text = run("construct", "sigma", fx("bool2"), "--emit-relation")
    axioms = [line for line in text.splitlines() if line.startswith("axiom ")]
    sides = [tuple(s.split() for s in line[len("axiom") :].split("|-")) for line in axioms]
    key = [(len(A), A, len(B), B) for A, B in sides]
    assert key == sorted(key)


def test_dot_output(fx):
    code, text = run("validate", fx("c3"), "--format", "dot")
    assert code == OK
    assert text.startswith("digraph")
    # covers are undirected edges, the approximation is dashed
    assert '"0" -> "m" [dir=none];' in text
    assert '"0" -> "1" [dir=none];' not in text
    assert '"0" -> "1" [style=dashed, color=gray50];' in text


def test_plot_written(fx, tmp_path):
    out = tmp_path / "c3.png"
    code, text = run("spectrum", fx("c3"), "--plot", out)
    assert code == OK
    assert f"plot written to {out}" in text
    assert out.read_bytes().startswith(b"\x89PNG")


COMMANDS = [
    ("validate", "m2"),
    ("construct", "vietoris", "bool2"),
    ("construct", "scent-lower", "c3"),
    ("construct", "val", "bool2"),
    ("dual", "c3w"),
    ("spectrum", "m2"),
    ("points", "m2"),
    ("models", "sierpinski"),
    ("check", "all", "bool2"),
    ("compare", "c3", "c3w"),
]


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: "-".join(a))
def test_commands_are_deterministic(fx, tmp_path, argv):
    args = [fx(a) if a in ("m2", "bool2", "c3", "c3w", "sierpinski") else a for a in argv]
    first = run(*args)
    assert run(*args) == first
    p1, p2 = tmp_path / "a.png", tmp_path / "b.png"
    run(*args, "--plot", p1)
    run(*args, "--plot", p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_main_writes_to_stdout(fx, capsys):
    assert main(["points", fx("c3")]) == OK
    assert capsys.readouterr().out == "2 points: {1}, {m,1}\n"


def test_separate_processes_agree(fx):
    cmd = [sys.executable, "-m", "proxlat.cli", "check", "all", fx("c3")]
    a = subprocess.run(cmd, capture_output=True, check=False)
    b = subprocess.run(cmd, capture_output=True, check=False)
    assert a.returncode == b.returncode == FAILED
    assert a.stdout == b.stdout
    assert a.stdout.decode() == run("check", "all", fx("c3"))[1]
