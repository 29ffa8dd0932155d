"""Alternatives on a line, single-peaked preferences, profiles and lotteries.

Alternatives are the integers 1..m in their prior order, so ``a < b`` means
``a`` lies to the left of ``b``. Agents are numbered 1..n and a profile is a
tuple holding agent ``i``'s preference at position ``i - 1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import (
    IndexOutOfRange,
    InputError,
    NotAPermutation,
    NotSinglePeaked,
    ParseError,
    SizeGuardExceeded,
)


@dataclass(frozen=True)
class SizeGuard:
    """Upper bounds on exhaustive work.

    ``max_m`` and ``max_n`` bound full-domain enumeration, ``max_subset_n``
    bounds rules stored per agent subset (2^n entries) and ``max_profiles``
    bounds tables holding one lottery per profile.
    """

    max_m: int = 7
    max_n: int = 6
    max_subset_n: int = 5
    max_profiles: int = 2**21

    def check_m(self, m: int) -> None:
        if m > self.max_m:
            raise SizeGuardExceeded(f"m={m} exceeds guard {self.max_m}")

    def check_n(self, n: int) -> None:
        if n > self.max_n:
            raise SizeGuardExceeded(f"n={n} exceeds guard {self.max_n}")

    def check_domain(self, m: int, n: int) -> None:
        self.check_m(m)
        self.check_n(n)

    def check_profiles(self, m: int, n: int) -> None:
        self.check_domain(m, n)
        count = 2 ** ((m - 1) * n)
        if count > self.max_profiles:
            raise SizeGuardExceeded(f"{count} profiles (m={m}, n={n}) exceed guard {self.max_profiles}")

    def check_subsets(self, n: int) -> None:
        if n > self.max_subset_n:
            raise SizeGuardExceeded(
                f"subset-indexed rule with n={n} exceeds guard {self.max_subset_n}"
            )


DEFAULT_GUARD = SizeGuard()


def alt_name(a: int) -> str:
    return f"a{a}"


def parse_alt(text: str, m: int | None = None) -> int:
    """Parse ``"a3"`` (or ``"3"``) into 3."""
    s = str(text).strip()
    if s.startswith("a"):
        s = s[1:]
    if not s.isdigit():
        raise ParseError(f"not an alternative name: {text!r}")
    a = int(s)
    if a < 1 or (m is not None and a > m):
        raise ParseError(f"alternative {text!r} outside a1..a{m}")
    return a


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] of alternatives."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if self.lo < 1 or self.hi < self.lo:
            raise InputError(f"bad interval [{self.lo}, {self.hi}]")

    def __contains__(self, a: object) -> bool:
        return isinstance(a, int) and self.lo <= a <= self.hi

    def __len__(self) -> int:
        return self.hi - self.lo + 1

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.lo, self.hi + 1))

    def __str__(self) -> str:
        return "{" + ",".join(alt_name(a) for a in self) + "}"

    @classmethod
    def of_size(cls, start: int, size: int) -> "Interval":
        return cls(start, start + size - 1)

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi


def _check_permutation(ranking: Sequence[int], m: int) -> None:
    if len(ranking) != m or sorted(ranking) != list(range(1, m + 1)):
        raise NotAPermutation(f"{list(ranking)} is not a permutation of 1..{m}")


def is_single_peaked(ranking: Sequence[int], m: int) -> bool:
    """Read the ranking bottom-up; each alternative must be an endpoint of
    what remains."""
    _check_permutation(ranking, m)
    lo, hi = 1, m
    for a in reversed(ranking[1:]):
        if a == lo:
            lo += 1
        elif a == hi:
            hi -= 1
        else:
            return False
    return True


@dataclass(frozen=True)
class Preference:
    """A strict single-peaked ranking; ``ranking[0]`` is the peak."""

    ranking: tuple[int, ...]
    _rank: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        ranking = tuple(int(a) for a in self.ranking)
        object.__setattr__(self, "ranking", ranking)
        if not is_single_peaked(ranking, len(ranking)):
            raise NotSinglePeaked(f"{_fmt_ranking(ranking)} is not single-peaked")
        rank = [0] * (len(ranking) + 1)
        for k, a in enumerate(ranking, start=1):
            rank[a] = k
        object.__setattr__(self, "_rank", tuple(rank))

    @property
    def m(self) -> int:
        return len(self.ranking)

    @property
    def peak(self) -> int:
        return self.ranking[0]

    def rank(self, a: int) -> int:
        """1-based position of ``a`` in the ranking."""
        return self._rank[a]

    def prefers(self, a: int, b: int) -> bool:
        return self._rank[a] < self._rank[b]

    def upper_interval(self, a: int) -> Interval:
        top = self.ranking[: self._rank[a]]
        return Interval(min(top), max(top))

    def upper_contour(self, a: int) -> frozenset[int]:
        return frozenset(self.ranking[: self._rank[a]])

    def top(self, k: int) -> Interval:
        """The k most preferred alternatives, U(P(k), P)."""
        if not 1 <= k <= self.m:
            raise IndexOutOfRange(f"k={k} outside 1..{self.m}")
        return self.upper_interval(self.ranking[k - 1])

    def __str__(self) -> str:
        return _fmt_ranking(self.ranking)


Profile = tuple[Preference, ...]


def _fmt_ranking(ranking: Sequence[int]) -> str:
    return ">".join(alt_name(a) for a in ranking)


def upper_contour(pref: Preference, a: int) -> frozenset[int]:
    return pref.upper_contour(a)


@lru_cache(maxsize=None)
def _single_peaked(m: int) -> tuple[Preference, ...]:
    return tuple(
        Preference(r)
        for r in itertools.permutations(range(1, m + 1))
        if is_single_peaked(r, m)
    )


def enumerate_single_peaked(m: int, guard: SizeGuard = DEFAULT_GUARD) -> tuple[Preference, ...]:
    """All 2^(m-1) single-peaked preferences, lexicographic by ranking."""
    if m < 1:
        raise InputError("m must be positive")
    guard.check_m(m)
    return _single_peaked(m)


def preference_with_peak(m: int, peak: int) -> Preference:
    """A canonical preference with the given peak (alternate right, then left)."""
    order = [peak]
    lo, hi = peak - 1, peak + 1
    while lo >= 1 or hi <= m:
        if hi <= m:
            order.append(hi)
            hi += 1
        if lo >= 1:
            order.append(lo)
            lo -= 1
    return Preference(tuple(order))


def enumerate_profiles(m: int, n: int, guard: SizeGuard = DEFAULT_GUARD) -> Iterator[Profile]:
    guard.check_domain(m, n)
    return itertools.product(enumerate_single_peaked(m, guard), repeat=n)


def peaks(profile: Iterable[Preference]) -> tuple[int, ...]:
    return tuple(p.peak for p in profile)


def s_set(profile: Sequence[Preference], t: int) -> frozenset[int]:
    """Agents whose peak is weakly left of a_t."""
    return frozenset(i for i, p in enumerate(profile, start=1) if p.peak <= t)


def tau_of_peaks(group_peaks: Sequence[int], t: int) -> int:
    if not 0 <= t <= len(group_peaks):
        raise IndexOutOfRange(f"t={t} outside 0..{len(group_peaks)}")
    if t == 0:
        return 1
    return sorted(group_peaks)[t - 1]


def tau(group_profile: Sequence[Preference], t: int) -> int:
    """t-th smallest peak of the group, counting repetitions; tau_0 = a_1."""
    return tau_of_peaks(peaks(group_profile), t)


def alpha_of_peaks(profile_peaks: Sequence[int], t: int, groups) -> tuple[int, ...]:
    return tuple(
        sum(1 for i in members if profile_peaks[i - 1] <= t) for members in groups.groups
    )


def alpha(profile: Sequence[Preference], t: int, groups) -> tuple[int, ...]:
    """Per-group count of peaks weakly left of a_t (zero vector at t = 0)."""
    return alpha_of_peaks(peaks(profile), t, groups)


def parse_preference(text: str, m: int | None = None) -> Preference:
    ranking = tuple(parse_alt(s) for s in text.strip().split(">"))
    if m is not None and len(ranking) != m:
        raise ParseError(f"ranking {text!r} does not have {m} alternatives")
    return Preference(ranking)


def parse_profile(text: str, m: int | None = None) -> Profile:
    """Parse ``a1>a2>a3;a3>a2>a1``; errors name the offending agent."""
    prefs = []
    for i, chunk in enumerate(text.strip().split(";"), start=1):
        try:
            prefs.append(parse_preference(chunk, m))
        except NotSinglePeaked as exc:
            raise NotSinglePeaked(f"agent {i}: {exc}") from None
        except NotAPermutation as exc:
            raise ParseError(f"agent {i}: {exc}") from None
        except ParseError as exc:
            raise ParseError(f"agent {i}: {exc}") from None
    return tuple(prefs)


def format_profile(profile: Sequence[Preference]) -> str:
    return ";".join(str(p) for p in profile)


@dataclass(frozen=True)
class Lottery:
    """Exact probability distribution; ``probs[k]`` is the mass of a_{k+1}."""

    probs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        probs = tuple(Fraction(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if not probs:
            raise InputError("empty lottery")
        if any(p < 0 for p in probs):
            raise InputError(f"negative probability in {self}")
        if sum(probs) != 1:
            raise InputError(f"probabilities sum to {sum(probs)}, not 1")

    @classmethod
    def point(cls, m: int, a: int) -> "Lottery":
        return cls(tuple(Fraction(int(b == a)) for b in range(1, m + 1)))

    @classmethod
    def from_prefix(cls, prefix: Sequence[Fraction]) -> "Lottery":
        """Build from cumulative masses F(1..m) with F(m) = 1."""
        prev = Fraction(0)
        probs = []
        for f in prefix:
            probs.append(Fraction(f) - prev)
            prev = Fraction(f)
        return cls(tuple(probs))

    @property
    def m(self) -> int:
        return len(self.probs)

    def __getitem__(self, a: int) -> Fraction:
        return self.probs[a - 1]

    def mass(self, alts: Iterable[int]) -> Fraction:
        return sum((self.probs[a - 1] for a in alts), Fraction(0))

    def prefix(self, t: int) -> Fraction:
        """Mass of [a_1, a_t]; zero for t = 0."""
        return sum(self.probs[:t], Fraction(0))

    def prefixes(self) -> tuple[Fraction, ...]:
        return tuple(itertools.accumulate(self.probs))

    def support(self) -> tuple[int, ...]:
        return tuple(a for a in range(1, self.m + 1) if self.probs[a - 1])

    def __str__(self) -> str:
        return " ".join(f"{alt_name(a)}={self[a]}" for a in self.support())
