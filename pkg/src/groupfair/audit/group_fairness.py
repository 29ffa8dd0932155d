"""Weak and strong group fairness, semantically and via characterizations.

Each checker computes a per-group *level*: the worst value over everything
it quantifies over (profiles for the semantic route, feasible count
patterns for the characterization routes). A rule meets quota eta_q iff
the level of group q is at least eta_q, so comparing levels compares the
verdicts for every eta at once.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ..domain import (
    DEFAULT_GUARD,
    Preference,
    SizeGuard,
    alpha_of_peaks,
    format_profile,
    peaks,
)
from ..errors import InputError, InvalidBallotFamily, MixedComponentKinds, NonCompliantScenario
from ..groups import Gamma, GroupStructure
from ..representatives import feasibility, top_ranged_witness
from ..rules import BallotFamily, RandomRule, evaluate
from .realize import realize_chain
from .report import AuditReport
from .table import LotteryTable

NOTIONS = ("weak", "strong")


def _prepare(groups: GroupStructure, m: int, guard: SizeGuard) -> None:
    groups.require_fairness_params()
    groups.check_m(m)
    guard.check_domain(m, max(groups.sizes))
    for q, (spec, members) in enumerate(zip(groups.psi, groups.groups)):
        bad = top_ranged_witness(spec, len(members), m, guard)
        if bad is not None:
            raise NonCompliantScenario(
                f"representative function of group {q + 1} is not top-ranged at peaks {bad}"
            )


def _verdict(levels: Sequence[Fraction], eta: Sequence[Fraction]) -> bool:
    return all(lv >= e for lv, e in zip(levels, eta))


# -- semantic --------------------------------------------------------------


def fairness_value(rule, groups: GroupStructure, profile: Sequence[Preference], q: int, notion: str) -> Fraction:
    """Mass on psi_q (weak) or the largest single mass inside it (strong)."""
    lot = evaluate(rule, profile)
    members = groups.groups[q]
    interval = groups.psi[q].apply_peaks([profile[i - 1].peak for i in members], lot.m)
    if notion == "weak":
        return lot.mass(interval)
    return max(lot[a] for a in interval)


def _start_array(t: LotteryTable, groups: GroupStructure, q: int):
    """Left end of psi_q at every profile, broadcast over the whole table."""
    members = groups.groups[q]
    spec = groups.psi[q]
    d = len(t.domain)
    dom_peaks = [p.peak for p in t.domain]
    local = np.empty((d,) * len(members), dtype=np.int64)
    for idx in itertools.product(range(d), repeat=len(members)):
        local[idx] = spec.apply_peaks([dom_peaks[j] for j in idx], t.m).lo
    shape = [1] * t.n
    for i in members:
        shape[i - 1] = d
    # members are sorted, so local axes already follow agent order
    return np.broadcast_to(local.reshape(shape), t.shape)


def _semantic_values(t: LotteryTable, groups: GroupStructure, q: int, notion: str):
    start = _start_array(t, groups, q)[..., None]
    k = groups.psi[q].kappa
    if notion == "weak":
        hi = np.take_along_axis(t.cum, start + k - 1, axis=-1)
        lo = np.take_along_axis(t.cum, start - 1, axis=-1)
        return (hi - lo)[..., 0]
    best = np.take_along_axis(t.num, start - 1, axis=-1)
    for s in range(1, k):
        best = np.maximum(best, np.take_along_axis(t.num, start - 1 + s, axis=-1))
    return best[..., 0]


def _semantic(
    notion: str,
    rule,
    groups: GroupStructure,
    m: int | None,
    guard: SizeGuard,
    profiles: Iterable[Sequence[Preference]] | None,
    table: LotteryTable | None,
) -> AuditReport:
    m = m if m is not None else rule.m
    _prepare(groups, m, guard)
    t = table if table is not None else LotteryTable(rule, m, groups.n, guard)
    picks = None
    if profiles is not None:
        picks = [t.index_of(p) for p in profiles]
        if not picks:
            raise InputError("empty profile restriction")
    levels, witnesses, checked = [], [], 0
    for q in range(groups.k):
        values = _semantic_values(t, groups, q, notion)
        if picks is None:
            flat = int(np.argmin(values))
            idx = tuple(int(v) for v in np.unravel_index(flat, values.shape))
            checked += values.size
        else:
            idx = min(picks, key=lambda p: (values[p], picks.index(p)))
            checked += len(picks)
        level = Fraction(int(values[idx]), t.den)
        levels.append(level)
        if level < groups.eta[q]:
            profile = t.profile(idx)
            members = groups.groups[q]
            interval = groups.psi[q].apply_peaks([profile[i - 1].peak for i in members], m)
            witnesses.append(
                {
                    "group": q + 1,
                    "profile": format_profile(profile),
                    "representatives": str(interval),
                    "value": level,
                    "eta": groups.eta[q],
                }
            )
    return AuditReport(
        notion,
        "semantic",
        _verdict(levels, groups.eta),
        witnesses,
        {"checked": checked, "levels": levels},
    )


def check_weak_fair_semantic(
    rule,
    groups: GroupStructure,
    m: int | None = None,
    guard: SizeGuard = DEFAULT_GUARD,
    profiles: Iterable[Sequence[Preference]] | None = None,
    table: LotteryTable | None = None,
) -> AuditReport:
    """phi(psi_q(P_{N_q})) >= eta_q at every profile (or every listed profile)."""
    return _semantic("weak", rule, groups, m, guard, profiles, table)


def check_strong_fair_semantic(
    rule,
    groups: GroupStructure,
    m: int | None = None,
    guard: SizeGuard = DEFAULT_GUARD,
    profiles: Iterable[Sequence[Preference]] | None = None,
    table: LotteryTable | None = None,
) -> AuditReport:
    """Some single alternative of psi_q(P_{N_q}) carries eta_q at every profile."""
    return _semantic("strong", rule, groups, m, guard, profiles, table)


# -- characterization scans ------------------------------------------------


def _weak_cases(groups: GroupStructure, m: int, q: int, profiles):
    """(x, gamma', gamma, group-q peaks) for every case of the weak condition."""
    spec, size = groups.psi[q], groups.sizes[q]
    if profiles is not None:
        for p in profiles:
            pk = peaks(p)
            gp = [pk[i - 1] for i in groups.groups[q]]
            x = spec.apply_peaks(gp, m).lo
            yield x, alpha_of_peaks(pk, x - 1, groups), alpha_of_peaks(pk, x + spec.kappa - 1, groups), gp
        return
    others = [
        list(itertools.combinations_with_replacement(range(s + 1), 2)) if h != q else [None]
        for h, s in enumerate(groups.sizes)
    ]
    for (x, z1, z2), ms in sorted(feasibility(spec, size, m).pairs.items()):
        for combo in itertools.product(*others):
            lo = tuple(z1 if h == q else c[0] for h, c in enumerate(combo))
            hi = tuple(z2 if h == q else c[1] for h, c in enumerate(combo))
            yield x, lo, hi, ms


def _strong_cases(groups: GroupStructure, m: int, q: int, profiles):
    """(x, chain gamma^0..gamma^kappa, group-q peaks) for the strong condition."""
    spec, size = groups.psi[q], groups.sizes[q]
    k = spec.kappa
    if profiles is not None:
        for p in profiles:
            pk = peaks(p)
            gp = [pk[i - 1] for i in groups.groups[q]]
            x = spec.apply_peaks(gp, m).lo
            chain = tuple(alpha_of_peaks(pk, x - 1 + j, groups) for j in range(k + 1))
            yield x, chain, gp
        return
    others = [
        list(itertools.combinations_with_replacement(range(s + 1), k + 1)) if h != q else [None]
        for h, s in enumerate(groups.sizes)
    ]
    for (x, zs), ms in sorted(feasibility(spec, size, m).patterns.items()):
        for combo in itertools.product(*others):
            chain = tuple(
                tuple(zs[j] if h == q else c[j] for h, c in enumerate(combo)) for j in range(k + 1)
            )
            yield x, chain, ms


def _scan(notion, mode, groups, m, weak_value, strong_value, profiles) -> AuditReport:
    levels, witnesses, checked = [], [], 0
    for q in range(groups.k):
        k = groups.psi[q].kappa
        best = None
        if notion == "weak":
            for x, lo, hi, ms in _weak_cases(groups, m, q, profiles):
                checked += 1
                v = weak_value(lo, hi, x, k)
                if best is None or v < best[0]:
                    best = (v, x, (lo, hi), ms)
        else:
            for x, chain, ms in _strong_cases(groups, m, q, profiles):
                checked += 1
                v = strong_value(chain, x)
                if best is None or v < best[0]:
                    best = (v, x, chain, ms)
        if best is None:
            # no feasible case at all: nothing to guarantee
            levels.append(Fraction(1))
            continue
        v, x, chain, ms = best
        levels.append(v)
        if v < groups.eta[q]:
            record = {"group": q + 1, "x": x, "value": v, "eta": groups.eta[q]}
            if notion == "weak":
                record["gamma_prime"], record["gamma"] = list(chain[0]), list(chain[1])
            else:
                record["chain"] = [list(g) for g in chain]
            record["profile"] = format_profile(realize_chain(groups, m, q, ms, x, k, chain))
            witnesses.append(record)
    return AuditReport(
        notion,
        mode,
        _verdict(levels, groups.eta),
        witnesses,
        {"checked": checked, "levels": levels},
    )


def _require_ballots(b) -> BallotFamily:
    if not isinstance(b, BallotFamily):
        raise InputError(f"direct characterization needs a group ballot family, got {type(b).__name__}")
    if not b.validate():
        raise InvalidBallotFamily(b.validate().summary())
    return b


def _dc(notion, b: BallotFamily, groups, guard, profiles) -> AuditReport:
    b = _require_ballots(b)
    if b.groups.groups != groups.groups:
        raise InputError("ballot family and fairness parameters use different groups")
    _prepare(groups, b.m, guard)
    f = b.prefix

    def weak(lo, hi, x, k):
        return f(hi, x + k - 1) - f(lo, x - 1)

    def strong(chain, x):
        return max(f(chain[t + 1], x + t) - f(chain[t], x + t - 1) for t in range(len(chain) - 1))

    return _scan(notion, "dc", groups, b.m, weak, strong, profiles)


def check_dc_weak(b: BallotFamily, groups: GroupStructure, guard: SizeGuard = DEFAULT_GUARD, profiles=None) -> AuditReport:
    """beta_gamma([a1, a_{x+k-1}]) - beta_gamma'([a1, a_{x-1}]) >= eta_q over feasible cases."""
    return _dc("weak", b, groups, guard, profiles)


def check_dc_strong(b: BallotFamily, groups: GroupStructure, guard: SizeGuard = DEFAULT_GUARD, profiles=None) -> AuditReport:
    """Along every feasible chain some alternative of the interval gets eta_q."""
    return _dc("strong", b, groups, guard, profiles)


def gmmr_components(r: RandomRule, groups: GroupStructure) -> list[tuple[Fraction, dict[Gamma, int]]]:
    if not isinstance(r, RandomRule) or r.kinds != {"gmmr"}:
        kinds = sorted(r.kinds) if isinstance(r, RandomRule) else [type(r).__name__]
        raise MixedComponentKinds(f"expected a mixture of GMMRs, got {kinds}")
    out = []
    for w, c in r.components:
        if c.groups.groups != groups.groups:
            raise MixedComponentKinds("a component uses a different group structure")
        if not c.validate():
            raise InvalidBallotFamily(f"component is not a valid GMMR: {c.validate().summary()}")
        out.append((w, c.params))
    return out


def _ep(notion, r: RandomRule, groups, guard, profiles) -> AuditReport:
    comps = gmmr_components(r, groups)
    _prepare(groups, r.m, guard)

    def weak(lo, hi, x, k):
        return sum((w for w, b in comps if b[lo] >= x and b[hi] <= x + k - 1), Fraction(0))

    def strong(chain, x):
        return max(
            sum((w for w, b in comps if b[chain[t]] >= x + t and b[chain[t + 1]] <= x + t), Fraction(0))
            for t in range(len(chain) - 1)
        )

    return _scan(notion, "ep", groups, r.m, weak, strong, profiles)


def check_ep_weak(r: RandomRule, groups: GroupStructure, guard: SizeGuard = DEFAULT_GUARD, profiles=None) -> AuditReport:
    """Weight of components with beta_gamma' >= a_x and beta_gamma <= a_{x+k-1} is >= eta_q."""
    return _ep("weak", r, groups, guard, profiles)


def check_ep_strong(r: RandomRule, groups: GroupStructure, guard: SizeGuard = DEFAULT_GUARD, profiles=None) -> AuditReport:
    """Along every feasible chain some t has enough components pinned to a_{x+t}."""
    return _ep("strong", r, groups, guard, profiles)


# -- replay ----------------------------------------------------------------


def replay_witness(rule, groups: GroupStructure, notion: str, witness: dict, m: int | None = None) -> bool:
    """True iff the witness profile violates the notion for the witness group."""
    from ..domain import parse_profile

    m = m if m is not None else rule.m
    profile = parse_profile(witness["profile"], m)
    q = witness["group"] - 1
    return fairness_value(rule, groups, profile, q, notion) < groups.eta[q]
