"""Rule families on the single-peaked domain and conversions between them.

Every rule here only reads peaks, so each exposes ``lottery_peaks`` next to
``lottery``; deterministic rules also expose ``select``/``select_peaks``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .domain import DEFAULT_GUARD, Lottery, Preference, SizeGuard, alt_name, peaks
from .errors import (
    DimensionMismatch,
    InputError,
    InvalidBallotFamily,
    InvalidParameters,
    MissingBallot,
    MixedComponentKinds,
    RequiresSingleGroup,
)
from .groups import Gamma, GroupStructure, dominates, gamma_to_subset, subset_to_gamma


@dataclass(frozen=True)
class Violation:
    kind: str  # "unanimity" or "monotonicity"
    gamma: tuple
    gamma_prime: tuple | None = None
    t: int | None = None
    detail: str = ""

    def as_dict(self) -> dict:
        out = {"kind": self.kind, "gamma": list(self.gamma)}
        if self.gamma_prime is not None:
            out["gamma_prime"] = list(self.gamma_prime)
        if self.t is not None:
            out["t"] = self.t
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.valid

    def summary(self, limit: int = 3) -> str:
        shown = "; ".join(
            f"{v.kind} at {v.gamma}"
            + (f" vs {v.gamma_prime}" if v.gamma_prime is not None else "")
            + (f", t={v.t}" if v.t is not None else "")
            for v in self.violations[:limit]
        )
        extra = len(self.violations) - limit
        return shown + (f" (+{extra} more)" if extra > 0 else "")


def _check_profile(profile: Sequence[Preference], n: int, m: int) -> tuple[int, ...]:
    if len(profile) != n:
        raise DimensionMismatch(f"profile has {len(profile)} agents, rule expects {n}")
    if any(p.m != m for p in profile):
        raise DimensionMismatch(f"profile is not over m={m} alternatives")
    return peaks(profile)


def _check_peaks(pk: Sequence[int], n: int, m: int) -> None:
    if len(pk) != n or any(not 1 <= a <= m for a in pk):
        raise DimensionMismatch(f"peaks {tuple(pk)} do not fit n={n}, m={m}")


class DeterministicRule:
    """Shared plumbing for tops-only deterministic rules."""

    kind = ""
    tops_only = True
    n: int
    m: int

    def select_peaks(self, pk: Sequence[int]) -> int:
        raise NotImplementedError

    def select(self, profile: Sequence[Preference]) -> int:
        return self.select_peaks(_check_profile(profile, self.n, self.m))

    def lottery_peaks(self, pk: Sequence[int]) -> Lottery:
        return Lottery.point(self.m, self.select_peaks(pk))

    def lottery(self, profile: Sequence[Preference]) -> Lottery:
        return Lottery.point(self.m, self.select(profile))

    def _key(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other: object) -> bool:
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash((type(self).__name__, self._key()))


# -- group ballots ---------------------------------------------------------


class BallotFamily:
    """Probabilistic fixed group ballot rule: one lottery per Gamma vector."""

    kind = "pfgbr"
    tops_only = True

    def __init__(
        self,
        groups: GroupStructure,
        m: int,
        ballots: Mapping[Gamma, Lottery | Sequence],
        guard: SizeGuard = DEFAULT_GUARD,
    ) -> None:
        self.groups = groups
        self.m = int(m)
        self.n = groups.n
        self.gammas = groups.gammas(guard)
        table = {}
        for g in self.gammas:
            if g not in ballots:
                raise MissingBallot(f"no ballot for gamma {g}")
            b = ballots[g]
            if not isinstance(b, Lottery):
                b = Lottery(tuple(b))
            if b.m != self.m:
                raise DimensionMismatch(f"ballot {g} has {b.m} entries, expected {self.m}")
            table[g] = b
        extra = set(ballots) - set(table)
        if extra:
            raise DimensionMismatch(f"ballots for unknown gamma vectors {sorted(extra)}")
        self.ballots = table
        self._prefix = {g: (Fraction(0),) + b.prefixes() for g, b in table.items()}
        self._report: ValidationReport | None = None

    def prefix(self, gamma: Gamma, t: int) -> Fraction:
        """beta_gamma([a_1, a_t])."""
        return self._prefix[gamma][t]

    def validate(self) -> ValidationReport:
        if self._report is None:
            self._report = validate_pfgbr(self)
        return self._report

    def lottery_peaks(self, pk: Sequence[int]) -> Lottery:
        _check_peaks(pk, self.n, self.m)
        if not self.validate():
            raise InvalidBallotFamily(self.validate().summary())
        probs = []
        prev = Fraction(0)
        for t in range(1, self.m + 1):
            g = _alpha(pk, t, self.groups)
            cur = self._prefix[g][t]
            probs.append(cur - prev)
            prev = cur
        return Lottery(tuple(probs))

    def lottery(self, profile: Sequence[Preference]) -> Lottery:
        return self.lottery_peaks(_check_profile(profile, self.n, self.m))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BallotFamily)
            and self.groups.groups == other.groups.groups
            and self.m == other.m
            and self.ballots == other.ballots
        )

    __hash__ = None  # type: ignore[assignment]


def _alpha(pk: Sequence[int], t: int, groups: GroupStructure) -> Gamma:
    return tuple(sum(1 for i in g if pk[i - 1] <= t) for g in groups.groups)


def validate_pfgbr(b: BallotFamily) -> ValidationReport:
    """Ballot unanimity and prefix-sum monotonicity, listing every violation."""
    out: list[Violation] = []
    bottom, top = b.groups.bottom, b.groups.top
    if b.ballots[bottom][b.m] != 1:
        out.append(Violation("unanimity", bottom, detail=f"beta({alt_name(b.m)}) != 1"))
    if b.ballots[top][1] != 1:
        out.append(Violation("unanimity", top, detail="beta(a1) != 1"))
    for g in b.gammas:
        for h in b.gammas:
            if g == h or not dominates(g, h):
                continue
            for t in range(1, b.m):
                if b.prefix(g, t) < b.prefix(h, t):
                    out.append(
                        Violation(
                            "monotonicity",
                            g,
                            h,
                            t,
                            f"{b.prefix(g, t)} < {b.prefix(h, t)}",
                        )
                    )
    return ValidationReport(tuple(out))


def eval_pfgbr(b: BallotFamily, p: Sequence[Preference]) -> Lottery:
    return b.lottery(p)


# -- subset ballots --------------------------------------------------------


def _all_subsets(n: int) -> list[frozenset[int]]:
    agents = range(1, n + 1)
    return [
        frozenset(c) for k in range(n + 1) for c in itertools.combinations(agents, k)
    ]


class SubsetBallotRule:
    """Probabilistic fixed ballot rule with ballots indexed by agent subsets."""

    kind = "pfbr"
    tops_only = True

    def __init__(
        self,
        n: int,
        m: int,
        ballots: Mapping[Iterable[int], Lottery | Sequence],
        guard: SizeGuard = DEFAULT_GUARD,
    ) -> None:
        guard.check_subsets(n)
        self.n, self.m = int(n), int(m)
        given = {frozenset(k): v for k, v in ballots.items()}
        table = {}
        for s in _all_subsets(self.n):
            if s not in given:
                raise MissingBallot(f"no ballot for subset {sorted(s)}")
            v = given[s]
            table[s] = v if isinstance(v, Lottery) else Lottery(tuple(v))
            if table[s].m != self.m:
                raise DimensionMismatch(f"ballot {sorted(s)} has wrong length")
        self.ballots = table
        self._prefix = {s: (Fraction(0),) + v.prefixes() for s, v in table.items()}
        self._report: ValidationReport | None = None

    def validate(self) -> ValidationReport:
        if self._report is None:
            out = []
            empty, full = frozenset(), frozenset(range(1, self.n + 1))
            if self.ballots[empty][self.m] != 1:
                out.append(Violation("unanimity", ()))
            if self.ballots[full][1] != 1:
                out.append(Violation("unanimity", tuple(sorted(full))))
            for s in self.ballots:
                for u in self.ballots:
                    if s < u:
                        for t in range(1, self.m):
                            if self._prefix[u][t] < self._prefix[s][t]:
                                out.append(
                                    Violation(
                                        "monotonicity", tuple(sorted(u)), tuple(sorted(s)), t
                                    )
                                )
            self._report = ValidationReport(tuple(out))
        return self._report

    def lottery_peaks(self, pk: Sequence[int]) -> Lottery:
        _check_peaks(pk, self.n, self.m)
        if not self.validate():
            raise InvalidBallotFamily(self.validate().summary())
        probs, prev = [], Fraction(0)
        for t in range(1, self.m + 1):
            s = frozenset(i for i, a in enumerate(pk, start=1) if a <= t)
            cur = self._prefix[s][t]
            probs.append(cur - prev)
            prev = cur
        return Lottery(tuple(probs))

    def lottery(self, profile: Sequence[Preference]) -> Lottery:
        return self.lottery_peaks(_check_profile(profile, self.n, self.m))

    def to_pfgbr(self) -> BallotFamily:
        groups = GroupStructure.singletons(self.n)
        return BallotFamily(
            groups,
            self.m,
            {subset_to_gamma(s, self.n): v for s, v in self.ballots.items()},
        )


def eval_pfbr(ballots, p: Sequence[Preference]) -> Lottery:
    if not isinstance(ballots, SubsetBallotRule):
        m = p[0].m
        ballots = SubsetBallotRule(len(p), m, ballots)
    return ballots.lottery(p)


# -- deterministic rules ---------------------------------------------------


class GroupMinMaxRule(DeterministicRule):
    """f(P) = min over gamma of max(tau_{gamma_1}(P_{N_1}), ..., beta_gamma).

    ``validate=False`` keeps a parameter table that breaks the boundary or
    dominance conditions; the formula is still evaluated as written.
    """

    kind = "gmmr"

    def __init__(
        self,
        groups: GroupStructure,
        m: int,
        params: Mapping[Gamma, int],
        validate: bool = True,
        guard: SizeGuard = DEFAULT_GUARD,
    ) -> None:
        self.groups = groups
        self.m = int(m)
        self.n = groups.n
        self.gammas = groups.gammas(guard)
        missing = [g for g in self.gammas if g not in params]
        if missing:
            raise InvalidParameters(f"no parameter for gamma {missing[0]}")
        values = tuple(int(params[g]) for g in self.gammas)
        if any(not 1 <= a <= self.m for a in values):
            raise InvalidParameters(f"parameter outside a1..a{self.m}")
        self.values = values
        self.params = dict(zip(self.gammas, values))
        if validate:
            report = self.validate()
            if not report:
                raise InvalidParameters(report.summary())

    def validate(self) -> ValidationReport:
        out = []
        bottom, top = self.groups.bottom, self.groups.top
        if self.params[bottom] != self.m:
            out.append(Violation("unanimity", bottom, detail="beta must be a_m"))
        if self.params[top] != 1:
            out.append(Violation("unanimity", top, detail="beta must be a1"))
        for g in self.gammas:
            for h in self.gammas:
                if g != h and dominates(g, h) and self.params[g] > self.params[h]:
                    out.append(Violation("monotonicity", g, h))
        return ValidationReport(tuple(out))

    def select_peaks(self, pk: Sequence[int]) -> int:
        _check_peaks(pk, self.n, self.m)
        taus = [[1] + sorted(pk[i - 1] for i in g) for g in self.groups.groups]
        best = self.m
        for g, beta in zip(self.gammas, self.values):
            v = beta
            for q, x in enumerate(g):
                if taus[q][x] > v:
                    v = taus[q][x]
            if v < best:
                best = v
        return best

    def _key(self) -> tuple:
        return (self.groups.groups, self.m, self.values)

    def __repr__(self) -> str:
        return f"GroupMinMaxRule(m={self.m}, params={self.params})"


def eval_gmmr(r: GroupMinMaxRule, p: Sequence[Preference]) -> int:
    return r.select(p)


class MinMaxRule(DeterministicRule):
    """f(P) = min over S of max(max peak in S, beta_S)."""

    kind = "minmax"

    def __init__(
        self,
        n: int,
        m: int,
        params: Mapping[Iterable[int], int],
        validate: bool = True,
        guard: SizeGuard = DEFAULT_GUARD,
    ) -> None:
        guard.check_subsets(n)
        self.n, self.m = int(n), int(m)
        given = {frozenset(k): int(v) for k, v in params.items()}
        subsets = _all_subsets(self.n)
        missing = [s for s in subsets if s not in given]
        if missing:
            raise InvalidParameters(f"no parameter for subset {sorted(missing[0])}")
        self.subsets = subsets
        self.params = {s: given[s] for s in subsets}
        if any(not 1 <= a <= self.m for a in self.params.values()):
            raise InvalidParameters(f"parameter outside a1..a{self.m}")
        if validate:
            report = self.validate()
            if not report:
                raise InvalidParameters(report.summary())

    def validate(self) -> ValidationReport:
        out = []
        if self.params[frozenset()] != self.m:
            out.append(Violation("unanimity", ()))
        full = frozenset(range(1, self.n + 1))
        if self.params[full] != 1:
            out.append(Violation("unanimity", tuple(sorted(full))))
        for s in self.subsets:
            for u in self.subsets:
                if s < u and self.params[u] > self.params[s]:
                    out.append(Violation("monotonicity", tuple(sorted(u)), tuple(sorted(s))))
        return ValidationReport(tuple(out))

    def select_peaks(self, pk: Sequence[int]) -> int:
        _check_peaks(pk, self.n, self.m)
        best = self.m
        for s in self.subsets:
            v = max([self.params[s]] + [pk[i - 1] for i in s])
            best = min(best, v)
        return best

    def to_gmmr(self) -> GroupMinMaxRule:
        groups = GroupStructure.singletons(self.n)
        return GroupMinMaxRule(
            groups, self.m, {subset_to_gamma(s, self.n): v for s, v in self.params.items()}
        )

    def _key(self) -> tuple:
        return (self.n, self.m, tuple(self.params[s] for s in self.subsets))


def eval_minmax(params, p: Sequence[Preference]) -> int:
    if not isinstance(params, MinMaxRule):
        params = MinMaxRule(len(p), p[0].m, params)
    return params.select(p)


class MedianRule(DeterministicRule):
    """Median of the n peaks and the n + 1 parameters beta_0..beta_n."""

    kind = "median"

    def __init__(self, m: int, params: Sequence[int], validate: bool = True) -> None:
        self.m = int(m)
        self.params = tuple(int(a) for a in params)
        self.n = len(self.params) - 1
        if self.n < 1:
            raise InvalidParameters("a median rule needs n + 1 >= 2 parameters")
        if any(not 1 <= a <= self.m for a in self.params):
            raise InvalidParameters(f"parameter outside a1..a{self.m}")
        if validate:
            report = self.validate()
            if not report:
                raise InvalidParameters(report.summary())

    def validate(self) -> ValidationReport:
        out = []
        if self.params[0] != 1:
            out.append(Violation("unanimity", (0,), detail="beta_0 must be a1"))
        if self.params[-1] != self.m:
            out.append(Violation("unanimity", (self.n,), detail="beta_n must be a_m"))
        for j in range(self.n):
            if self.params[j] > self.params[j + 1]:
                out.append(Violation("monotonicity", (j + 1,), (j,)))
        return ValidationReport(tuple(out))

    def select_peaks(self, pk: Sequence[int]) -> int:
        _check_peaks(pk, self.n, self.m)
        values = sorted(tuple(pk) + self.params)
        return values[self.n]

    def _key(self) -> tuple:
        return (self.m, self.params)


def eval_median(r: MedianRule, p: Sequence[Preference]) -> int:
    return r.select(p)


class Dictatorship(DeterministicRule):
    kind = "dictatorship"

    def __init__(self, n: int, m: int, agent: int) -> None:
        self.n, self.m, self.agent = int(n), int(m), int(agent)
        if not 1 <= self.agent <= self.n:
            raise InvalidParameters(f"agent {agent} outside 1..{n}")

    def select_peaks(self, pk: Sequence[int]) -> int:
        _check_peaks(pk, self.n, self.m)
        return pk[self.agent - 1]

    def _key(self) -> tuple:
        return (self.n, self.m, self.agent)


# -- mixtures --------------------------------------------------------------


class RandomRule:
    """Convex combination of deterministic rules with exact weights.

    Identical components are merged, keeping first-appearance order.
    """

    kind = "random"
    tops_only = True

    def __init__(self, components: Iterable[tuple[Fraction | str | int, DeterministicRule]]) -> None:
        merged: dict[DeterministicRule, Fraction] = {}
        for w, rule in components:
            w = Fraction(w)
            if w <= 0:
                raise InputError(f"component weight {w} is not positive")
            if not isinstance(rule, DeterministicRule):
                raise InputError(f"component {rule!r} is not a deterministic rule")
            merged[rule] = merged.get(rule, Fraction(0)) + w
        if not merged:
            raise InputError("a random rule needs at least one component")
        if sum(merged.values()) != 1:
            raise InputError(f"weights sum to {sum(merged.values())}, not 1")
        self.components = tuple((w, r) for r, w in merged.items())
        first = self.components[0][1]
        self.n, self.m = first.n, first.m
        if any((r.n, r.m) != (self.n, self.m) for _, r in self.components):
            raise DimensionMismatch("components disagree on n or m")

    @property
    def kinds(self) -> frozenset[str]:
        return frozenset(r.kind for _, r in self.components)

    def lottery_peaks(self, pk: Sequence[int]) -> Lottery:
        probs = [Fraction(0)] * self.m
        for w, r in self.components:
            probs[r.select_peaks(pk) - 1] += w
        return Lottery(tuple(probs))

    def lottery(self, profile: Sequence[Preference]) -> Lottery:
        return self.lottery_peaks(_check_profile(profile, self.n, self.m))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RandomRule) and dict(
            (r, w) for w, r in self.components
        ) == dict((r, w) for w, r in other.components)

    __hash__ = None  # type: ignore[assignment]


def eval_random(rule: RandomRule, p: Sequence[Preference]) -> Lottery:
    return rule.lottery(p)


Rule = Union[BallotFamily, SubsetBallotRule, DeterministicRule, RandomRule]


def evaluate(rule, profile: Sequence[Preference]) -> Lottery:
    """Lottery of any rule object (or plain callable returning a Lottery)."""
    if hasattr(rule, "lottery"):
        return rule.lottery(profile)
    return rule(profile)


# -- conversions -----------------------------------------------------------


def decompose_pfgbr(b: BallotFamily) -> RandomRule:
    """Quantile coupling of a valid group ballot family into GMMRs.

    Thresholds are all distinct prefix values; the component for the
    interval (u_{k-1}, u_k] places beta_gamma at the first a_t whose prefix
    reaches u_k.
    """
    if not b.validate():
        raise InvalidBallotFamily(b.validate().summary())
    cuts = sorted({b.prefix(g, t) for g in b.gammas for t in range(1, b.m + 1)} - {0})
    components = []
    prev = Fraction(0)
    for u in cuts:
        params = {
            g: next(t for t in range(1, b.m + 1) if b.prefix(g, t) >= u) for g in b.gammas
        }
        components.append((u - prev, GroupMinMaxRule(b.groups, b.m, params)))
        prev = u
    return RandomRule(components)


def _require_gmmr_components(r: RandomRule) -> None:
    if r.kinds != {"gmmr"}:
        raise MixedComponentKinds(f"expected only GMMR components, got {sorted(r.kinds)}")
    groups = {c.groups.groups for _, c in r.components}
    if len(groups) != 1:
        raise MixedComponentKinds("GMMR components use different group structures")


def pfgbr_from_random(r: RandomRule, groups: GroupStructure | None = None) -> BallotFamily:
    """beta_gamma(a_t) = sum of weights of components with beta^w_gamma = a_t."""
    _require_gmmr_components(r)
    comp_groups = r.components[0][1].groups
    if groups is None:
        groups = comp_groups
    elif groups.groups != comp_groups.groups:
        raise MixedComponentKinds("components are not over the requested groups")
    ballots = {}
    for g in groups.gammas():
        probs = [Fraction(0)] * r.m
        for w, c in r.components:
            probs[c.params[g] - 1] += w
        ballots[g] = Lottery(tuple(probs))
    return BallotFamily(groups, r.m, ballots)


def gmmr_from_median(r: MedianRule, groups: GroupStructure | None = None) -> GroupMinMaxRule:
    """Single-group GMMR with beta_gamma = median parameter beta_{n - gamma}."""
    if groups is None:
        groups = GroupStructure.single(r.n)
    if groups.k != 1 or groups.n != r.n:
        raise RequiresSingleGroup("median correspondence needs one group of all n agents")
    return GroupMinMaxRule(groups, r.m, {(g,): r.params[r.n - g] for g in range(r.n + 1)})


def pfbr_to_minmax_mixture(rule: SubsetBallotRule) -> RandomRule:
    """Decompose a subset ballot rule into a random min-max rule."""
    mix = decompose_pfgbr(rule.to_pfgbr())
    return RandomRule(
        (
            w,
            MinMaxRule(
                rule.n,
                rule.m,
                {gamma_to_subset(g): a for g, a in c.params.items()},
            ),
        )
        for w, c in mix.components
    )
