"""Fairness for singleton groups (each agent its own group, psi_i = top kappa_i).

Semantic checks read U(P_i(kappa_i), P_i) from the full preference, so
they are not tops-only on the representative side. The direct ("dc") and
extreme point ("ep") scans quantify over agent subsets; the anonymous
scans quantify over median parameter positions.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from ..domain import DEFAULT_GUARD, Interval, Preference, SizeGuard, format_profile, preference_with_peak
from ..errors import InputError, InvalidBallotFamily, MixedComponentKinds, RequiresSingletonGroups, SizeGuardExceeded
from ..groups import gamma_to_subset, subset_to_gamma
from ..rules import BallotFamily, DeterministicRule, RandomRule, SubsetBallotRule, evaluate
from .realize import preference_with_top
from .report import AuditReport
from .table import LotteryTable

MODES = ("semantic", "dc", "ep")

# |S_2| and kappa bounds for the function enumeration in the ep strong scan
EP_STRONG_MAX_S2 = 4
EP_STRONG_MAX_KAPPA = 3


def _params(rule, kappa, eta, m: int) -> tuple[int, tuple[int, ...], tuple[Fraction, ...]]:
    # plain callables carry no n; the per-agent kappa then fixes it
    n = getattr(rule, "n", None) or len(kappa)
    if isinstance(rule, (BallotFamily,)) and not rule.groups.is_singletons:
        raise RequiresSingletonGroups("ballot family is not over singleton groups")
    kappa = tuple(int(k) for k in kappa)
    eta = tuple(Fraction(e) for e in eta)
    if len(kappa) != n or len(eta) != n:
        raise InputError(f"need one kappa and one eta per agent (n={n})")
    if any(not 1 <= k <= m for k in kappa) or any(not 0 <= e <= 1 for e in eta):
        raise InputError(f"bad kappa {kappa} or eta {eta}")
    return n, kappa, eta


def agent_value(rule, profile: Sequence[Preference], i: int, k: int, notion: str) -> Fraction:
    lot = evaluate(rule, profile)
    top = profile[i - 1].top(k)
    if notion == "weak":
        return lot.mass(top)
    return max(lot[a] for a in top)


# -- semantic --------------------------------------------------------------


def _semantic(notion, rule, kappa, eta, m, guard, profiles, table) -> AuditReport:
    m = m if m is not None else rule.m
    n, kappa, eta = _params(rule, kappa, eta, m)
    t = table if table is not None else LotteryTable(rule, m, n, guard)
    d = len(t.domain)
    picks = [t.index_of(p) for p in profiles] if profiles is not None else None
    levels, witnesses, checked = [], [], 0
    for i in range(1, n + 1):
        k = kappa[i - 1]
        starts = np.array([p.top(k).lo for p in t.domain], dtype=np.int64)
        shape = [1] * n
        shape[i - 1] = d
        start = np.broadcast_to(starts.reshape(shape), t.shape)[..., None]
        if notion == "weak":
            values = (
                np.take_along_axis(t.cum, start + k - 1, axis=-1)
                - np.take_along_axis(t.cum, start - 1, axis=-1)
            )[..., 0]
        else:
            values = np.take_along_axis(t.num, start - 1, axis=-1)
            for s in range(1, k):
                values = np.maximum(values, np.take_along_axis(t.num, start - 1 + s, axis=-1))
            values = values[..., 0]
        if picks is None:
            idx = tuple(int(v) for v in np.unravel_index(int(np.argmin(values)), values.shape))
            checked += values.size
        else:
            idx = min(picks, key=lambda p: (values[p], picks.index(p)))
            checked += len(picks)
        level = Fraction(int(values[idx]), t.den)
        levels.append(level)
        if level < eta[i - 1]:
            profile = t.profile(idx)
            witnesses.append(
                {
                    "agent": i,
                    "profile": format_profile(profile),
                    "representatives": str(profile[i - 1].top(k)),
                    "value": level,
                    "eta": eta[i - 1],
                }
            )
    return AuditReport(
        notion, "semantic", all(a >= b for a, b in zip(levels, eta)), witnesses,
        {"checked": checked, "levels": levels},
    )


# -- rule views --------------------------------------------------------------


def subset_prefix(rule) -> Callable[[frozenset, int], Fraction]:
    """beta_S([a1, a_t]) for a subset ballot rule or a singleton-group family."""
    if isinstance(rule, SubsetBallotRule):
        if not rule.validate():
            raise InvalidBallotFamily(rule.validate().summary())
        return lambda s, t: rule._prefix[s][t]
    if isinstance(rule, BallotFamily):
        if not rule.groups.is_singletons:
            raise RequiresSingletonGroups("ballot family is not over singleton groups")
        if not rule.validate():
            raise InvalidBallotFamily(rule.validate().summary())
        n = rule.n
        return lambda s, t: rule.prefix(subset_to_gamma(s, n), t)
    raise InputError(f"direct scan needs subset ballots, got {type(rule).__name__}")


def _component_params(c: DeterministicRule) -> dict[frozenset, int]:
    n, m = c.n, c.m
    if c.kind == "minmax":
        if not c.validate():
            raise InvalidBallotFamily(c.validate().summary())
        return dict(c.params)
    if c.kind == "gmmr":
        if not c.groups.is_singletons:
            raise RequiresSingletonGroups("GMMR component is not over singleton groups")
        if not c.validate():
            raise InvalidBallotFamily(c.validate().summary())
        return {gamma_to_subset(g): a for g, a in c.params.items()}
    if c.kind == "dictatorship":
        subsets = [frozenset(s) for k in range(n + 1) for s in itertools.combinations(range(1, n + 1), k)]
        return {s: 1 if c.agent in s else m for s in subsets}
    raise MixedComponentKinds(f"component kind {c.kind!r} is not a min-max rule")


def minmax_components(rule) -> list[tuple[Fraction, dict[frozenset, int]]]:
    """(weight, beta_S) per component; dictatorships count as min-max rules."""
    if isinstance(rule, DeterministicRule):
        return [(Fraction(1), _component_params(rule))]
    if not isinstance(rule, RandomRule):
        raise MixedComponentKinds(f"extreme point scan needs a mixture, got {type(rule).__name__}")
    return [(w, _component_params(c)) for w, c in rule.components]


def subset_ballots(rule) -> SubsetBallotRule:
    """Subset ballots of a random min-max rule (beta_S(a) = weight pinned at a)."""
    comps = minmax_components(rule)
    n, m = rule.n, rule.m
    ballots = {}
    for s in comps[0][1]:
        probs = [Fraction(0)] * m
        for w, b in comps:
            probs[b[s] - 1] += w
        ballots[s] = probs
    return SubsetBallotRule(n, m, ballots)


# -- case enumeration ------------------------------------------------------


def _realize(n: int, m: int, i: int, x: int, k: int, spots: dict[int, int]) -> tuple[Preference, ...]:
    interval = Interval.of_size(x, k)
    return tuple(
        preference_with_top(m, spots[j], interval) if j == i else preference_with_peak(m, spots[j])
        for j in range(1, n + 1)
    )


def _scan(notion, mode, rule, kappa, eta, m, cases) -> AuditReport:
    """``cases(i, k)`` yields (value, description, peak placement, x)."""
    n = rule.n
    levels, witnesses, checked = [], [], 0
    for i in range(1, n + 1):
        k = kappa[i - 1]
        best = None
        for value, desc, spots, x in cases(i, k):
            checked += 1
            if best is None or value < best[0]:
                best = (value, desc, spots, x)
        v, desc, spots, x = best
        levels.append(v)
        if v < eta[i - 1]:
            record = {"agent": i, "x": x, "value": v, "eta": eta[i - 1], **desc}
            record["profile"] = format_profile(_realize(n, m, i, x, k, spots))
            witnesses.append(record)
    return AuditReport(
        notion, mode, all(a >= b for a, b in zip(levels, eta)), witnesses,
        {"checked": checked, "levels": levels},
    )


def _sorted_set(s) -> list[int]:
    return sorted(s)


def _profile_labels(profiles, i: int, k: int):
    """(x, per-agent position) for each profile: 0 left of i's top-k interval,
    1..k inside it (offset + 1), k + 1 right of it."""
    for p in profiles:
        x = p[i - 1].top(k).lo
        yield x, tuple(min(max(q.peak - x + 1, 0), k + 1) for q in p)


def _dc_cases(notion, F, n, m, profiles=None):
    agents = range(1, n + 1)

    def weak_case(i, k, labels, x):
        s2 = frozenset(j for j in agents if labels[j - 1] == 0)
        s1 = frozenset(j for j in agents if labels[j - 1] <= 1)
        v = F(s1, x + k - 1) - F(s2, x - 1)
        spots = {j: (max(x - 1, 1), x, min(x + k, m))[labels[j - 1]] for j in agents}
        return v, {"S1": _sorted_set(s1), "S2": _sorted_set(s2)}, spots, x

    def weak(i, k):
        if profiles is not None:
            for x, pos in _profile_labels(profiles, i, k):
                yield weak_case(i, k, tuple(0 if e == 0 else (1 if e <= k else 2) for e in pos), x)
            return
        # label 0: in S2, 1: in S1 \ S2, 2: outside S1
        for labels in itertools.product((0, 1, 2), repeat=n):
            if labels[i - 1] != 1:
                continue
            for x in range(1, m - k + 2):
                yield weak_case(i, k, labels, x)

    def strong_case(i, k, levels, x):
        chain = [frozenset(j for j in agents if levels[j - 1] <= t) for t in range(k + 1)]
        v = max(F(chain[t + 1], x + t) - F(chain[t], x + t - 1) for t in range(k))
        spots = {
            j: max(x - 1, 1) if e == 0 else (min(x + k, m) if e == k + 1 else x + e - 1)
            for j, e in zip(agents, levels)
        }
        return v, {"chain": [_sorted_set(s) for s in chain]}, spots, x

    def strong(i, k):
        if profiles is not None:
            for x, pos in _profile_labels(profiles, i, k):
                yield strong_case(i, k, pos, x)
            return
        # entry level e_j: agent j belongs to S^t for t >= e_j (k + 1 = never)
        for levels in itertools.product(range(k + 2), repeat=n):
            if not 1 <= levels[i - 1] <= k:
                continue
            for x in range(1, m - k + 2):
                yield strong_case(i, k, levels, x)

    return weak if notion == "weak" else strong


def _weight(comps, pred) -> Fraction:
    return sum((w for w, b in comps if pred(b)), Fraction(0))


def _ep_cases(notion, comps, n, m, profiles=None):
    agents = range(1, n + 1)

    def weak_case(i, k, labels, x):
        s1 = frozenset(j for j in agents if labels[j - 1] == 0)
        s12 = frozenset(j for j in agents if labels[j - 1] <= 1)
        v = _weight(comps, lambda b: b[s1] >= x and b[s12] <= x + k - 1)
        spots = {j: (max(x - 1, 1), x, min(x + k, m))[labels[j - 1]] for j in agents}
        return v, {"S1": _sorted_set(s1), "S2": _sorted_set(s12 - s1)}, spots, x

    def weak(i, k):
        if profiles is not None:
            for x, pos in _profile_labels(profiles, i, k):
                yield weak_case(i, k, tuple(0 if e == 0 else (1 if e <= k else 2) for e in pos), x)
            return
        # label 0: in S1, 1: in S2, 2: outside
        for labels in itertools.product((0, 1, 2), repeat=n):
            if labels[i - 1] != 1:
                continue
            for x in range(1, m - k + 2):
                yield weak_case(i, k, labels, x)

    def strong_case(i, k, labels, x):
        inside = range(x, x + k)
        s1 = frozenset(j for j in agents if labels[j - 1] == "S1")
        f = {j: labels[j - 1] for j in agents if isinstance(labels[j - 1], int)}
        rng = sorted(set(f.values()))
        best = Fraction(0)
        for b in rng:
            lo = s1 | {j for j, a in f.items() if a < b}
            hi = s1 | {j for j, a in f.items() if a <= b}
            best = max(best, _weight(comps, lambda p: p[lo] >= b and p[hi] <= b))
        for c in inside:
            if c in f.values():
                continue
            below = [a for a in rng if a < c]
            u = s1 | {j for j, a in f.items() if below and a <= below[-1]}
            best = max(best, _weight(comps, lambda p: p[u] == c))
        spots = {
            j: max(x - 1, 1) if labels[j - 1] == "S1"
            else (min(x + k, m) if labels[j - 1] == "out" else labels[j - 1])
            for j in agents
        }
        desc = {"S1": _sorted_set(s1), "f": {str(j): f"a{a}" for j, a in sorted(f.items())}}
        return best, desc, spots, x

    def strong(i, k):
        if k > EP_STRONG_MAX_KAPPA or n > EP_STRONG_MAX_S2:
            raise SizeGuardExceeded(
                f"function enumeration limited to |S2| <= {EP_STRONG_MAX_S2} and kappa <= {EP_STRONG_MAX_KAPPA}"
            )
        if profiles is not None:
            for x, pos in _profile_labels(profiles, i, k):
                labels = tuple("S1" if e == 0 else ("out" if e == k + 1 else x + e - 1) for e in pos)
                yield strong_case(i, k, labels, x)
            return
        for x in range(1, m - k + 2):
            # each agent: "S1", "out", or its peak f(j) inside the interval
            options = ["S1", "out"] + list(range(x, x + k))
            for labels in itertools.product(options, repeat=n):
                if labels[i - 1] in ("S1", "out"):
                    continue
                yield strong_case(i, k, labels, x)

    return weak if notion == "weak" else strong


def _check(notion, rule, kappa, eta, mode, m, guard, profiles, table) -> AuditReport:
    if mode not in MODES:
        raise InputError(f"unknown mode {mode!r}")
    if isinstance(rule, BallotFamily) and not rule.groups.is_singletons:
        raise RequiresSingletonGroups("ballot family is not over singleton groups")
    for _, c in getattr(rule, "components", ()):
        if c.kind == "gmmr" and not c.groups.is_singletons:
            raise RequiresSingletonGroups("GMMR component is not over singleton groups")
    if mode == "semantic":
        return _semantic(notion, rule, kappa, eta, m, guard, profiles, table)
    m = rule.m
    n, kappa, eta = _params(rule, kappa, eta, m)
    guard.check_domain(m, n)
    if profiles is not None:
        profiles = [tuple(p) for p in profiles]
        for p in profiles:
            if len(p) != n or any(q.m != m for q in p):
                raise InputError(f"profile {format_profile(p)} does not match n={n}, m={m}")
    if mode == "dc":
        cases = _dc_cases(notion, subset_prefix(rule), n, m, profiles)
    else:
        cases = _ep_cases(notion, minmax_components(rule), n, m, profiles)
    return _scan(notion, mode, rule, kappa, eta, m, cases)


def check_special_weak(
    rule,
    kappa: Sequence[int],
    eta: Sequence,
    mode: str = "semantic",
    m: int | None = None,
    guard: SizeGuard = DEFAULT_GUARD,
    profiles: Iterable[Sequence[Preference]] | None = None,
    table: LotteryTable | None = None,
) -> AuditReport:
    """Each agent's top kappa_i alternatives jointly get eta_i."""
    return _check("weak", rule, kappa, eta, mode, m, guard, profiles, table)


def check_special_strong(
    rule,
    kappa: Sequence[int],
    eta: Sequence,
    mode: str = "semantic",
    m: int | None = None,
    guard: SizeGuard = DEFAULT_GUARD,
    profiles: Iterable[Sequence[Preference]] | None = None,
    table: LotteryTable | None = None,
) -> AuditReport:
    """Some alternative among each agent's top kappa_i gets eta_i."""
    return _check("strong", rule, kappa, eta, mode, m, guard, profiles, table)


def runs_condition(rule, kappa: Sequence[int], eta: Sequence) -> bool:
    """Fixed-pair run test for singleton strong fairness, taken literally.

    For S2 ⊆ S1, i in S1 \\ S2 and t < u: if every a_j in [a_t, a_u] has
    beta_S1([a1, a_j]) - beta_S2([a1, a_{j-1}]) < eta_i then u - t <= kappa_i.
    Kept to document that this test does not decide strong fairness; the
    audit uses the chain scan instead.
    """
    F = subset_prefix(rule)
    n, m = rule.n, rule.m
    eta = tuple(Fraction(e) for e in eta)
    agents = range(1, n + 1)
    for labels in itertools.product((0, 1, 2), repeat=n):
        s2 = frozenset(j for j in agents if labels[j - 1] == 0)
        s1 = frozenset(j for j in agents if labels[j - 1] <= 1)
        for i in (j for j in agents if labels[j - 1] == 1):
            low = [F(s1, j) - F(s2, j - 1) < eta[i - 1] for j in range(1, m + 1)]
            run = 0
            for flag in low:
                run = run + 1 if flag else 0
                if run - 1 > kappa[i - 1]:
                    return False
    return True


# -- total anonymity ---------------------------------------------------------


def median_components(r) -> list[tuple[Fraction, tuple[int, ...]]]:
    comps = [(Fraction(1), r)] if isinstance(r, DeterministicRule) else list(getattr(r, "components", ()))
    if not comps or any(c.kind != "median" for _, c in comps):
        kinds = sorted({c.kind for _, c in comps}) if comps else [type(r).__name__]
        raise MixedComponentKinds(f"expected only median components, got {kinds}")
    out = []
    for w, c in comps:
        if not c.validate():
            raise InvalidBallotFamily(f"median parameters invalid: {c.validate().summary()}")
        out.append((w, c.params))
    return out


def _anonymous_cases(notion, comps, n, m):
    def weak(i, k):
        for r in range(n):
            for x in range(1, m - k + 2):
                hi = x + k - 1
                v = _weight(comps, lambda p: p[r] <= hi and p[r + 1] >= x)
                # n - r - 1 agents at a1, r at a_m, agent i inside
                others = [1] * (n - r - 1) + [m] * r
                spots = {j: a for j, a in zip([j for j in range(1, n + 1) if j != i], others)}
                spots[i] = x
                yield v, {"r": r}, spots, x

    def strong(i, k):
        for r in range(1, n + 1):
            for s in range(n - r + 1):
                for x in range(1, m - k + 2):
                    inside = range(x, x + k)
                    for bs in itertools.combinations_with_replacement(inside, s + 1):
                        b = {r + j: a for j, a in enumerate(bs)}
                        best = Fraction(0)
                        for c in sorted(set(bs)):
                            ts = [t for t, a in b.items() if a == c]
                            best = max(
                                best,
                                _weight(comps, lambda p: any(p[n - t] <= c <= p[n - t + 1] for t in ts)),
                            )
                        for c in inside:
                            if c in bs:
                                continue
                            if c < bs[0]:
                                u = r - 1
                            elif c > bs[-1]:
                                u = r + s
                            else:
                                u = max(t for t, a in b.items() if a < c)
                            best = max(best, _weight(comps, lambda p: p[n - u] == c))
                        peaks_ = [1] * (r - 1) + list(bs) + [m] * (n - r - s)
                        # agent i takes the first inside peak
                        order = [i] + [j for j in range(1, n + 1) if j != i]
                        pos = r - 1
                        spots = {i: peaks_[pos]}
                        rest = peaks_[:pos] + peaks_[pos + 1:]
                        spots.update(zip(order[1:], rest))
                        yield best, {"r": r, "s": s, "b": [f"a{a}" for a in bs]}, spots, x

    return weak if notion == "weak" else strong


def check_anonymous_fair(
    r,
    kappa: Sequence[int],
    eta: Sequence,
    notion: str = "strong",
    mode: str = "characterization",
    guard: SizeGuard = DEFAULT_GUARD,
    table: LotteryTable | None = None,
) -> AuditReport:
    """Fairness of a random median rule via the bracket conditions (or semantically)."""
    if notion not in ("weak", "strong"):
        raise InputError(f"unknown notion {notion!r}")
    comps = median_components(r)
    if mode == "semantic":
        return _semantic(notion, r, kappa, eta, None, guard, None, table)
    if mode != "characterization":
        raise InputError(f"unknown mode {mode!r}")
    n, m = r.n, r.m
    guard.check_domain(m, n)
    n, kappa, eta = _params(r, kappa, eta, m)
    return _scan(notion, "characterization", r, kappa, eta, m, _anonymous_cases(notion, comps, n, m))


def replay_agent_witness(rule, notion: str, witness: dict, kappa: Sequence[int], eta: Sequence) -> bool:
    from ..domain import parse_profile

    profile = parse_profile(witness["profile"], rule.m)
    i = witness["agent"]
    return agent_value(rule, profile, i, kappa[i - 1], notion) < Fraction(eta[i - 1])
