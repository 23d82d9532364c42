import random

import pytest

from lineleaf.poset_core import HasseDiagram, Universe

# The 23-element walkthrough tree, rooted at F so that F is nu.
EXAMPLE_EDGES = {
    "D": "F", "E": "F", "C": "F", "G": "F", "P": "F",
    "A": "C", "B": "C",
    "H": "G", "I": "H", "J": "I", "K": "J", "L": "K",
    "N": "L", "M": "L", "Y": "M", "Z": "M",
    "R": "P", "S": "R", "W": "R", "T": "S", "V": "T", "X": "W",
}
EXAMPLE_NAMES = ["F"] + sorted(EXAMPLE_EDGES)
EXAMPLE_ID = {c: i for i, c in enumerate(EXAMPLE_NAMES)}


def example_universe() -> Universe:
    par = [-1] * len(EXAMPLE_NAMES)
    for c, p in EXAMPLE_EDGES.items():
        par[EXAMPLE_ID[c]] = EXAMPLE_ID[p]
    return Universe(par)


@pytest.fixture
def example():
    U = example_universe()
    return HasseDiagram(U, range(U.M))


def random_universe(m: int, rng: random.Random) -> Universe:
    return Universe([-1] + [rng.randrange(i) for i in range(1, m)])


def random_members(U: Universe, rng: random.Random, p: float = 0.5) -> list[int]:
    return [0] + [v for v in range(1, U.M) if rng.random() < p]


# -- acceptance report -----------------------------------------------------------------
# tests/test_acceptance.py records one verdict per criterion here; the lines are
# printed again in the terminal summary so they survive output capture.

ACCEPTANCE: dict = {}


def record_criterion(number: int, ok: bool, detail: str) -> str:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
