from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..domain import (
    DEFAULT_GUARD,
    Interval,
    Lottery,
    Preference,
    SizeGuard,
    enumerate_single_peaked,
)
from ..rules import evaluate


def rule_dims(rule, m: int | None, n: int | None) -> tuple[int, int]:
    m = m if m is not None else getattr(rule, "m", None)
    n = n if n is not None else getattr(rule, "n", None)
    if m is None or n is None:
        raise ValueError("m and n are required for rules that do not carry them")
    return int(m), int(n)


class LotteryTable:
    """Lotteries of a rule at every profile of the full single-peaked domain.

    Probabilities are stored as integer numerators over one common
    denominator so comparisons stay exact while vectorised. Axis ``i`` of
    ``num`` indexes agent ``i + 1``'s preference within ``domain``.
    """

    def __init__(self, rule, m: int | None = None, n: int | None = None, guard: SizeGuard = DEFAULT_GUARD):
        self.m, self.n = rule_dims(rule, m, n)
        guard.check_profiles(self.m, self.n)
        self.domain = enumerate_single_peaked(self.m, guard)
        d = len(self.domain)
        self.shape = (d,) * self.n
        index_tuples = itertools.product(range(d), repeat=self.n)
        if getattr(rule, "tops_only", False) and hasattr(rule, "lottery_peaks"):
            by_peaks = {
                pk: rule.lottery_peaks(pk)
                for pk in itertools.product(range(1, self.m + 1), repeat=self.n)
            }
            lotteries = [
                by_peaks[tuple(self.domain[j].peak for j in idx)] for idx in index_tuples
            ]
        else:
            lotteries = [
                evaluate(rule, tuple(self.domain[j] for j in idx)) for idx in index_tuples
            ]
        den = 1
        for lot in lotteries:
            for p in lot.probs:
                den = den * p.denominator // math.gcd(den, p.denominator)
        self.den = den
        dtype = np.int64 if den < 2**58 else object
        nums = [[p.numerator * (den // p.denominator) for p in lot.probs] for lot in lotteries]
        self.num = np.array(nums, dtype=dtype).reshape(self.shape + (self.m,))
        zeros = np.zeros(self.shape + (1,), dtype=dtype)
        self.cum = np.concatenate([zeros, np.cumsum(self.num, axis=-1)], axis=-1)

    def profile(self, idx: Sequence[int]) -> tuple[Preference, ...]:
        return tuple(self.domain[j] for j in idx)

    def index_of(self, profile: Sequence[Preference]) -> tuple[int, ...]:
        pos = {p: k for k, p in enumerate(self.domain)}
        return tuple(pos[p] for p in profile)

    def lottery(self, idx: Sequence[int]) -> Lottery:
        return Lottery(tuple(Fraction(int(x), self.den) for x in self.num[tuple(idx)]))

    def interval_mass(self, interval: Interval):
        """Array of numerators of the mass of ``interval`` at every profile."""
        return self.cum[..., interval.hi] - self.cum[..., interval.lo - 1]

    def indices(self):
        return itertools.product(range(len(self.domain)), repeat=self.n)
