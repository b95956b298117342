import random
import sys
from functools import lru_cache
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from proxlat.fixtures import named_fixtures, random_strong_lattices  # noqa: E402
from proxlat.prox import (  # noqa: E402
    compose_prox,
    is_adjoint_pair,
    lattice_homomorphisms,
    morphism_from_homomorphism,
    morphism_report,
)

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("repo")

FIXTURE_DIR = Path(__file__).parent.parent / "fixtures"


@lru_cache(maxsize=None)
def _named():
    return tuple(named_fixtures())


@lru_cache(maxsize=None)
def _random():
    return tuple(random_strong_lattices(20, max_size=5))


def named():
    return list(_named())


def randoms():
    return list(_random())


def everything():
    return named() + randoms()


@lru_cache(maxsize=None)
def morphism_pool(limit: int = 8):
    """Join-preserving proximity relations ``(S, T, r)`` between small fixtures.

    Each comes from a lattice homomorphism ``T -> S``; the pool stays small by
    using the named fixtures and the first few random ones.
    """
    fx = named() + randoms()[:limit]
    out = []
    for S in fx:
        for T in fx:
            for h in lattice_homomorphisms(T.lattice, S.lattice):
                r = morphism_from_homomorphism(S, T, h)
                if morphism_report(r, S, T).ok:
                    out.append((S, T, r))
    return tuple(out)


def composable_triples(count: int, seed: int):
    """``count`` pairs of composable morphisms ``S -r-> T -r2-> W``."""
    rng = random.Random(seed)
    pool = morphism_pool()
    by_src = {}
    for S, T, r in pool:
        by_src.setdefault(S.name, []).append((S, T, r))
    out = []
    while len(out) < count:
        S, T, r = rng.choice(pool)
        _, W, r2 = rng.choice(by_src[T.name])
        out.append((S, T, W, r, r2))
    return out


@lru_cache(maxsize=None)
def adjoint_pool():
    """``(S, T, r, s)`` with ``r : S -> T`` and ``s : T -> S`` its left adjoint."""
    pool = morphism_pool()
    by_src = {}
    for S, T, r in pool:
        by_src.setdefault(S.name, []).append((S, T, r))
    seen = {}
    for S, T, r in pool:
        for _, S2, s in by_src.get(T.name, []):
            if S2.name == S.name and is_adjoint_pair(s, r, source=T, target=S):
                seen[(S.name, T.name, r.matrix.tobytes(), s.matrix.tobytes())] = (S, T, r, s)
    return tuple(seen.values())


def composable_adjoint_triples(count: int, seed: int):
    rng = random.Random(seed)
    pool = adjoint_pool()
    by_src = {}
    for p in pool:
        by_src.setdefault(p[0].name, []).append(p)
    out = []
    while len(out) < count:
        S, T, r, s = rng.choice(pool)
        if T.name not in by_src:
            continue
        _, W, r2, s2 = rng.choice(by_src[T.name])
        out.append((S, T, W, r, s, r2, s2, compose_prox(r, r2), compose_prox(s2, s)))
    return out


@pytest.fixture(scope="session")
def fixture_dir():
    return FIXTURE_DIR


# ---------------------------------------------------------------- acceptance report

ACCEPTANCE: dict[int, str] = {}


def record_criterion(number: int, title: str, ok: bool, detail: str = "") -> str:
    line = f"criterion {number:>2} ({title}): {'PASS' if ok else 'FAIL'}" + (f" - {detail}" if detail else "")
    ACCEPTANCE[number] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
