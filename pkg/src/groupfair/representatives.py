"""Representative functions, interval comparisons and feasibility predicates.

Every built-in representative function reads only the multiset of peaks of
its group, so exhaustive questions about it enumerate peak multisets.
Properties defined over full preferences (anonymity, candidate
monotonicity, pareto-efficiency) enumerate full group profiles instead.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

from .domain import (
    DEFAULT_GUARD,
    Interval,
    Preference,
    SizeGuard,
    enumerate_single_peaked,
    peaks,
)
from .errors import IndexOutOfRange, InvalidSpec, NotSinglePeaked, SizeMismatch

KINDS = ("R1", "R2", "R3", "R4", "table")
COMPARISONS = ("best", "lex_best", "worst", "lex_worst")


@dataclass(frozen=True)
class RepSpec:
    """A representative function selecting ``kappa`` consecutive alternatives.

    ``table`` maps a sorted peak tuple to an interval; it is only used by the
    ``"table"`` kind.
    """

    kind: str
    kappa: int
    r: int | None = None
    table: tuple[tuple[tuple[int, ...], Interval], ...] | None = field(default=None)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown representative kind {self.kind!r}")
        if self.kappa < 1:
            raise InvalidSpec("kappa must be positive")
        if self.kind == "R1" and (self.r is None or self.r < 1):
            raise InvalidSpec("R1 needs r >= 1")
        if self.kind != "R1" and self.r is not None:
            raise InvalidSpec(f"{self.kind} takes no r")
        if self.kind == "table":
            if not self.table:
                raise InvalidSpec("table kind needs entries")
            entries = tuple(
                (tuple(sorted(k)), v if isinstance(v, Interval) else Interval(*v))
                for k, v in self.table
            )
            keys = [k for k, _ in entries]
            if len(set(keys)) != len(keys):
                raise InvalidSpec("duplicate peak multiset in table")
            if len({len(k) for k in keys}) != 1:
                raise InvalidSpec("table entries must share one group size")
            for k, v in entries:
                if len(v) != self.kappa:
                    raise InvalidSpec(f"interval {v} for peaks {k} is not of size {self.kappa}")
            object.__setattr__(self, "table", tuple(sorted(entries)))
        elif self.table is not None:
            raise InvalidSpec(f"{self.kind} takes no table")

    tops_only = True

    @property
    def lookup(self) -> dict[tuple[int, ...], Interval]:
        return dict(self.table or ())

    def check(self, m: int) -> None:
        if self.kappa > m:
            raise InvalidSpec(f"kappa={self.kappa} exceeds m={m}")
        if self.kind == "table":
            for k, v in self.table:
                if v.hi > m or any(not 1 <= a <= m for a in k):
                    raise InvalidSpec(f"table entry {k} -> {v} outside a1..a{m}")

    def check_group(self, size: int, m: int | None = None) -> None:
        if self.kind == "R1" and self.r > size:
            raise InvalidSpec(f"R1 needs r <= group size {size}")
        if self.kind == "table":
            sizes = {len(k) for k, _ in self.table}
            if sizes != {size}:
                raise InvalidSpec(f"table is for group size {sizes.pop()}, not {size}")
            if m is not None:
                self.check(m)
                missing = [
                    ms for ms in peak_multisets(size, m) if ms not in self.lookup
                ]
                if missing:
                    raise InvalidSpec(f"table has no entry for peaks {missing[0]}")

    def apply_peaks(self, group_peaks: Sequence[int], m: int) -> Interval:
        k = self.kappa
        if k > m:
            raise InvalidSpec(f"kappa={k} exceeds m={m}")
        pk = sorted(group_peaks)
        if not pk:
            raise InvalidSpec("empty group profile")
        last = m - k + 1
        if self.kind == "R1":
            if self.r > len(pk):
                raise InvalidSpec(f"R1 needs r <= group size {len(pk)}")
            return Interval.of_size(min(pk[self.r - 1], last), k)
        if self.kind == "R2":
            distinct = set(pk)
            return Interval.of_size(
                max(range(1, last + 1), key=lambda x: (sum(x <= a < x + k for a in distinct), -x)),
                k,
            )
        if self.kind == "R3":
            return Interval.of_size(
                max(range(1, last + 1), key=lambda x: (sum(x <= a < x + k for a in pk), -x)),
                k,
            )
        if self.kind == "R4":
            counts = Counter(pk)
            top = max(counts.values())
            plural = min(a for a, c in counts.items() if c == top)
            return Interval.of_size(min(plural, last), k)
        try:
            return self.lookup[tuple(pk)]
        except KeyError:
            raise InvalidSpec(f"table has no entry for peaks {tuple(pk)}") from None

    def __str__(self) -> str:
        return f"{self.kind}(r={self.r})" if self.kind == "R1" else self.kind


def apply_psi(spec: RepSpec, group_profile: Sequence[Preference]) -> Interval:
    if not group_profile:
        raise InvalidSpec("empty group profile")
    return spec.apply_peaks(peaks(group_profile), group_profile[0].m)


def peak_multisets(size: int, m: int) -> Iterator[tuple[int, ...]]:
    return itertools.combinations_with_replacement(range(1, m + 1), size)


# -- interval comparisons --------------------------------------------------


def rank_positions(pref: Preference, interval: Interval) -> tuple[int, ...]:
    """Q_i(I): ranks of the members of I, ascending."""
    return tuple(sorted(pref.rank(a) for a in interval))


def compare_intervals(pref: Preference, i: Interval, j: Interval, cmp: str) -> int:
    """+1 if ``i`` is better for ``pref``, -1 if ``j`` is, 0 if equal."""
    if len(i) != len(j):
        raise SizeMismatch(f"|I|={len(i)} but |J|={len(j)}")
    if cmp not in COMPARISONS:
        raise InvalidSpec(f"unknown comparison {cmp!r}")
    qi, qj = rank_positions(pref, i), rank_positions(pref, j)
    if cmp == "best":
        x, y = qi[0], qj[0]
    elif cmp == "worst":
        x, y = qi[-1], qj[-1]
    else:
        idx = range(len(qi)) if cmp == "lex_best" else reversed(range(len(qi)))
        diff = [k for k in idx if qi[k] != qj[k]]
        if not diff:
            return 0
        x, y = qi[diff[0]], qj[diff[0]]
    return (x < y) - (x > y)


# -- exhaustive properties -------------------------------------------------


def _outputs(spec: RepSpec, size: int, m: int, guard: SizeGuard) -> Iterator[tuple[tuple[int, ...], Interval]]:
    guard.check_domain(m, size)
    spec.check_group(size, m if spec.kind == "table" else None)
    for ms in peak_multisets(size, m):
        yield ms, spec.apply_peaks(ms, m)


def is_top_ranged(spec: RepSpec, group_size: int, m: int, guard: SizeGuard = DEFAULT_GUARD) -> bool:
    return top_ranged_witness(spec, group_size, m, guard) is None


def top_ranged_witness(spec: RepSpec, group_size: int, m: int, guard: SizeGuard = DEFAULT_GUARD):
    """First peak multiset whose output misses [min peak, max peak], else None."""
    for ms, out in _outputs(spec, group_size, m, guard):
        if out.hi < ms[0] or out.lo > ms[-1]:
            return ms
    return None


def top_containing_witness(spec: RepSpec, group_size: int, m: int, guard: SizeGuard = DEFAULT_GUARD):
    """First peak multiset whose output holds none of its peaks, else None.

    psi only reads peaks, so peak multisets cover every group profile.
    """
    for ms, out in _outputs(spec, group_size, m, guard):
        if not any(a in out for a in ms):
            return ms
    return None


def is_compliant(spec: RepSpec, group_size: int, m: int, guard: SizeGuard = DEFAULT_GUARD) -> bool:
    return spec.kappa <= m and is_top_ranged(spec, group_size, m, guard)


def containment_holds(spec: RepSpec, group_size: int, m: int, guard: SizeGuard = DEFAULT_GUARD) -> bool:
    """Every output contains [tau_1, tau_max] or is contained in it."""
    for ms, out in _outputs(spec, group_size, m, guard):
        span = Interval(ms[0], ms[-1])
        if not (out.contains_interval(span) or span.contains_interval(out)):
            return False
    return True


@dataclass
class ScenarioReport:
    anonymous: bool
    top_containing: bool
    candidate_monotone: bool
    pareto_efficient: dict[str, bool]
    witnesses: dict[str, object]


def _shift_forward(pref: Preference, a: int) -> Preference | None:
    k = pref.rank(a)
    if k == 1:
        return None
    r = list(pref.ranking)
    r[k - 2], r[k - 1] = r[k - 1], r[k - 2]
    try:
        return Preference(tuple(r))
    except NotSinglePeaked:
        return None


def _pareto_witness(profile, out: Interval, m: int, cmp: str):
    k = len(out)
    for x in range(1, m - k + 2):
        j = Interval.of_size(x, k)
        if j == out:
            continue
        signs = [compare_intervals(p, j, out, cmp) for p in profile]
        if all(s >= 0 for s in signs) and any(s > 0 for s in signs):
            return j
    return None


def check_scenario_properties(
    spec: RepSpec,
    group_size: int,
    m: int,
    cmps: Sequence[str] = ("best", "lex_best"),
    guard: SizeGuard = DEFAULT_GUARD,
) -> ScenarioReport:
    """Decide anonymity, top-containingness, candidate monotonicity and
    pareto-efficiency by enumerating every group profile."""
    guard.check_domain(m, group_size)
    spec.check_group(group_size, m if spec.kind == "table" else None)
    domain = enumerate_single_peaked(m, guard)
    cache: dict[tuple[Preference, ...], Interval] = {}

    def psi(profile: tuple[Preference, ...]) -> Interval:
        if profile not in cache:
            cache[profile] = apply_psi(spec, profile)
        return cache[profile]

    witnesses: dict[str, object] = {}
    anonymous = top_containing = monotone = True
    pareto = {c: True for c in cmps}
    perms = list(itertools.permutations(range(group_size)))
    for profile in itertools.product(domain, repeat=group_size):
        out = psi(profile)
        if anonymous:
            for perm in perms:
                if psi(tuple(profile[i] for i in perm)) != out:
                    anonymous = False
                    witnesses["anonymous"] = (profile, perm)
                    break
        if top_containing and not any(p.peak in out for p in profile):
            top_containing = False
            witnesses["top_containing"] = profile
        if monotone:
            for a in out:
                for idx, pref in enumerate(profile):
                    shifted = _shift_forward(pref, a)
                    if shifted is None:
                        continue
                    moved = profile[:idx] + (shifted,) + profile[idx + 1:]
                    if a not in psi(moved):
                        monotone = False
                        witnesses["candidate_monotone"] = (profile, a, idx + 1)
                        break
                if not monotone:
                    break
        for c in cmps:
            if pareto[c]:
                better = _pareto_witness(profile, out, m, c)
                if better is not None:
                    pareto[c] = False
                    witnesses[f"pareto_{c}"] = (profile, out, better)
    return ScenarioReport(anonymous, top_containing, monotone, pareto, witnesses)


# -- feasibility -----------------------------------------------------------


@dataclass(frozen=True)
class Feasibility:
    """Every (start, count pattern) realised by some group profile.

    ``patterns`` maps (x, (z0, z1, .., z_kappa)) to a witness peak multiset,
    where z0 counts peaks left of a_x and z_j counts peaks weakly left of
    a_{x+j-1}. ``pairs`` maps (x, z1, z2) to a witness, z1 counting peaks
    left of the output and z2 those weakly left of its right end.
    """

    patterns: dict[tuple[int, tuple[int, ...]], tuple[int, ...]]
    pairs: dict[tuple[int, int, int], tuple[int, ...]]


@lru_cache(maxsize=4096)
def feasibility(spec: RepSpec, group_size: int, m: int) -> Feasibility:
    patterns: dict = {}
    pairs: dict = {}
    for ms in peak_multisets(group_size, m):
        out = spec.apply_peaks(ms, m)
        x = out.lo
        zs = (sum(a < x for a in ms),) + tuple(sum(a <= b for a in ms) for b in out)
        patterns.setdefault((x, zs), ms)
        pairs.setdefault((x, zs[0], zs[-1]), ms)
    return Feasibility(patterns, pairs)


def feasible_at(
    spec: RepSpec, a: int, z1: int, z2: int, group_size: int, m: int, guard: SizeGuard = DEFAULT_GUARD
) -> bool:
    if not 0 <= z1 <= z2 <= group_size:
        raise IndexOutOfRange(f"need 0 <= z1 <= z2 <= {group_size}")
    guard.check_domain(m, group_size)
    spec.check_group(group_size, m if spec.kind == "table" else None)
    return (a, z1, z2) in feasibility(spec, group_size, m).pairs


def feasible_set_at(
    spec: RepSpec,
    start: int,
    zs: Sequence[int],
    group_size: int,
    m: int,
    guard: SizeGuard = DEFAULT_GUARD,
) -> bool:
    zs = tuple(zs)
    if len(zs) != spec.kappa + 1:
        raise IndexOutOfRange(f"pattern needs {spec.kappa + 1} entries")
    if any(not 0 <= z <= group_size for z in zs) or list(zs) != sorted(zs):
        raise IndexOutOfRange("pattern must be nondecreasing within [0, group size]")
    guard.check_domain(m, group_size)
    spec.check_group(group_size, m if spec.kind == "table" else None)
    return (start, zs) in feasibility(spec, group_size, m).patterns
