"""Random valid rules for sweeps and property tests.

Gamma vectors are visited in lexicographic order, which extends the
dominance order: everything a vector dominates is already assigned when
the vector is reached, so each draw only needs a lower (or upper) bound.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .domain import Lottery
from .groups import GroupStructure, dominates
from .rules import BallotFamily, GroupMinMaxRule, MedianRule, RandomRule


def _grid_draw(rng: random.Random, lo: int, hi: int, stick: float) -> int:
    """Integer in [lo, hi], equal to ``lo`` with probability ``stick``."""
    if lo >= hi or rng.random() < stick:
        return lo
    return rng.randint(lo, hi)


def random_pfgbr(
    rng: random.Random,
    groups: GroupStructure,
    m: int,
    denominator: int = 10,
    stick: float = 0.3,
) -> BallotFamily:
    """A valid ballot family with every prefix mass on the grid 1/denominator."""
    gammas = groups.gammas()
    bottom, top = groups.bottom, groups.top
    prefix: dict = {}
    for g in gammas:
        if g == bottom:
            cdf = [0] * (m - 1)
        elif g == top:
            cdf = [denominator] * (m - 1)
        else:
            below = [prefix[h] for h in prefix if dominates(g, h)]
            cdf, prev = [], 0
            for t in range(m - 1):
                lo = max([prev] + [c[t] for c in below])
                prev = _grid_draw(rng, lo, denominator, stick)
                cdf.append(prev)
        prefix[g] = cdf
    ballots = {}
    for g, cdf in prefix.items():
        full = [0] + cdf + [denominator]
        ballots[g] = Lottery(
            tuple(Fraction(full[t + 1] - full[t], denominator) for t in range(m))
        )
    return BallotFamily(groups, m, ballots)


def random_gmmr(rng: random.Random, groups: GroupStructure, m: int, stick: float = 0.4) -> GroupMinMaxRule:
    """Valid GMMR: a_m at the bottom vector, a_1 at the top, nonincreasing upward."""
    gammas = groups.gammas()
    params: dict = {}
    for g in gammas:
        if g == groups.bottom:
            params[g] = m
        elif g == groups.top:
            params[g] = 1
        else:
            ub = min([m] + [params[h] for h in params if dominates(g, h)])
            params[g] = ub - _grid_draw(rng, 0, ub - 1, stick)
    return GroupMinMaxRule(groups, m, params)


def random_weights(rng: random.Random, k: int, denominator: int = 12) -> list[Fraction]:
    """k positive weights summing to 1 (k <= denominator)."""
    cuts = sorted(rng.sample(range(1, denominator), k - 1))
    edges = [0] + cuts + [denominator]
    return [Fraction(edges[i + 1] - edges[i], denominator) for i in range(k)]


def random_random_gmmr(
    rng: random.Random, groups: GroupStructure, m: int, components: int = 3
) -> RandomRule:
    weights = random_weights(rng, components)
    return RandomRule((w, random_gmmr(rng, groups, m)) for w in weights)


def random_median(rng: random.Random, n: int, m: int) -> MedianRule:
    inner = sorted(rng.randint(1, m) for _ in range(n - 1))
    return MedianRule(m, [1] + inner + [m])


def random_random_median(rng: random.Random, n: int, m: int, components: int = 3) -> RandomRule:
    weights = random_weights(rng, components)
    return RandomRule((w, random_median(rng, n, m)) for w in weights)
