from __future__ import annotations

from fractions import Fraction as F
import random
from pathlib import Path

import pytest
from hypothesis import settings

from groupfair.domain import parse_profile
from groupfair.groups import GroupStructure
from groupfair.representatives import RepSpec
from groupfair.rules import BallotFamily, GroupMinMaxRule, MedianRule, MinMaxRule, SubsetBallotRule

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ROOT = Path(__file__).resolve().parent.parent
INSTANCES = ROOT / "instances"

# four agents, three alternatives, peaks (a1, a3, a2, a3)
PROFILE_TEXT = "a1>a2>a3;a3>a2>a1;a2>a3>a1;a3>a2>a1"


def _lot(text: str):
    return [F(x) for x in text.split()]


PFBR_BALLOTS = {
    (): "0 0 1", (1,): "3/10 1/5 1/2", (2,): "1/10 1/2 2/5", (3,): "1/5 2/5 2/5",
    (4,): "1/5 2/5 2/5", (1, 2): "2/5 3/10 3/10", (1, 3): "1/2 3/10 1/5",
    (1, 4): "3/10 2/5 3/10", (2, 3): "2/5 3/10 3/10", (2, 4): "1/2 3/10 1/5",
    (3, 4): "3/10 2/5 3/10", (1, 2, 3): "4/5 1/5 0", (1, 2, 4): "4/5 1/5 0",
    (1, 3, 4): "9/10 1/10 0", (2, 3, 4): "9/10 1/10 0", (1, 2, 3, 4): "1 0 0",
}
MINMAX_PARAMS = {
    (): 3, (1,): 2, (2,): 2, (3,): 3, (4,): 3, (1, 2): 1, (1, 3): 2, (1, 4): 2,
    (2, 3): 2, (2, 4): 2, (3, 4): 3, (1, 2, 3): 1, (1, 2, 4): 1, (1, 3, 4): 2,
    (2, 3, 4): 2, (1, 2, 3, 4): 1,
}
PFGBR_BALLOTS = {
    (0, 0): "0 0 1", (0, 1): "0 1/10 9/10", (0, 2): "1/10 1/10 4/5", (0, 3): "1/5 0 4/5",
    (1, 0): "2/5 1/10 1/2", (1, 1): "1/2 0 1/2", (1, 2): "7/10 1/5 1/10", (1, 3): "1 0 0",
}
GMMR_PARAMS = {
    (0, 0): 3, (0, 1): 2, (0, 2): 2, (0, 3): 1, (1, 0): 3, (1, 1): 3, (1, 2): 3, (1, 3): 1,
}
MEDIAN_PARAMS = (1, 1, 2, 2, 3)
PARTITION = ((1,), (2, 3, 4))


@pytest.fixture
def profile():
    return parse_profile(PROFILE_TEXT, 3)


@pytest.fixture
def pfbr():
    return SubsetBallotRule(4, 3, {k: _lot(v) for k, v in PFBR_BALLOTS.items()})


@pytest.fixture
def minmax_rule():
    return MinMaxRule(4, 3, MINMAX_PARAMS)


def two_groups(psi2: RepSpec | None = None, eta=(F(1, 3), F(2, 5))) -> GroupStructure:
    psi2 = psi2 or RepSpec("R1", 2, r=1)
    return GroupStructure(PARTITION, eta=eta, psi=(RepSpec("R1", 1, r=1), psi2))


def pfgbr_ballots() -> dict:
    return {k: _lot(v) for k, v in PFGBR_BALLOTS.items()}


@pytest.fixture
def pfgbr():
    return BallotFamily(two_groups(), 3, pfgbr_ballots())


@pytest.fixture
def gmmr_bad():
    return GroupMinMaxRule(GroupStructure(PARTITION), 3, GMMR_PARAMS, validate=False)


@pytest.fixture
def median():
    return MedianRule(3, MEDIAN_PARAMS)


ETA_GRID = (F(0), F(1, 4), F(1, 3), F(1, 2), F(2, 3), F(1))
KINDS = ("R1", "R2", "R3", "R4")


def partitions(n: int, max_groups: int = 2):
    """Partitions of 1..n into contiguous blocks, at most ``max_groups`` of them."""
    out = [(tuple(range(1, n + 1)),)]
    if max_groups >= 2:
        out += [(tuple(range(1, c + 1)), tuple(range(c + 1, n + 1))) for c in range(1, n)]
    return out


def random_groups(rng: random.Random, n: int, m: int, partition=None, eta_grid=ETA_GRID) -> GroupStructure:
    partition = partition or rng.choice(partitions(n))
    psi, kappa = [], []
    for members in partition:
        kind = rng.choice(KINDS)
        k = rng.randint(1, m)
        psi.append(RepSpec(kind, k, r=rng.randint(1, len(members)) if kind == "R1" else None))
        kappa.append(k)
    eta = [rng.choice(eta_grid) for _ in partition]
    return GroupStructure(partition, kappa=tuple(kappa), eta=tuple(eta), psi=tuple(psi))


# -- acceptance summary ----------------------------------------------------

ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
