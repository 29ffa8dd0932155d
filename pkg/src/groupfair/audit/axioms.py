"""Unanimity, strategy-proofness and group-wise anonymity by enumeration."""

from __future__ import annotations

import itertools

import numpy as np

from ..domain import DEFAULT_GUARD, Lottery, SizeGuard, enumerate_single_peaked, format_profile
from ..groups import GroupStructure
from ..rules import evaluate
from .report import AuditReport
from .table import LotteryTable, rule_dims


def check_unanimity(rule, m: int | None = None, n: int | None = None, guard: SizeGuard = DEFAULT_GUARD) -> AuditReport:
    """Point mass at the common peak on every unanimous profile."""
    m, n = rule_dims(rule, m, n)
    guard.check_domain(m, n)
    domain = enumerate_single_peaked(m, guard)
    witnesses, checked = [], 0
    for a in range(1, m + 1):
        with_peak = [p for p in domain if p.peak == a]
        for profile in itertools.product(with_peak, repeat=n):
            checked += 1
            lot = evaluate(rule, profile)
            if lot != Lottery.point(m, a):
                witnesses.append(
                    {"profile": format_profile(profile), "lottery": str(lot), "peak": f"a{a}"}
                )
                break
    return AuditReport("unanimity", "semantic", not witnesses, witnesses, {"checked": checked})


def check_strategy_proofness(
    rule,
    m: int | None = None,
    n: int | None = None,
    guard: SizeGuard = DEFAULT_GUARD,
    table: LotteryTable | None = None,
) -> AuditReport:
    """phi_{U(a,P_i)}(P) >= phi_{U(a,P_i)}(P'_i, P_-i) for every i, P, P'_i, a."""
    t = table if table is not None else LotteryTable(rule, m, n, guard)
    d = len(t.domain)
    witnesses = []
    for i in range(t.n):
        for p_idx, pref in enumerate(t.domain):
            for a in range(1, t.m + 1):
                mass = t.interval_mass(pref.upper_interval(a))
                truthful = np.take(mass, p_idx, axis=i)
                best = mass.max(axis=i)
                bad = np.argwhere(best > truthful)
                if len(bad):
                    rest = tuple(int(x) for x in bad[0])
                    idx = rest[:i] + (p_idx,) + rest[i:]
                    lie = max(
                        range(d),
                        key=lambda k: (mass[rest[:i] + (k,) + rest[i:]], -k),
                    )
                    lied = rest[:i] + (lie,) + rest[i:]
                    witnesses.append(
                        {
                            "agent": i + 1,
                            "profile": format_profile(t.profile(idx)),
                            "misreport": str(t.domain[lie]),
                            "alternative": f"a{a}",
                            "truthful": str(t.lottery(idx)),
                            "deviation": str(t.lottery(lied)),
                        }
                    )
                    break
            if witnesses:
                break
        if witnesses:
            break
    checked = d**t.n * t.n * d * t.m
    return AuditReport(
        "strategy_proofness", "semantic", not witnesses, witnesses, {"checked": checked}
    )


def check_group_anonymity(
    rule,
    groups: GroupStructure,
    m: int | None = None,
    guard: SizeGuard = DEFAULT_GUARD,
    table: LotteryTable | None = None,
) -> AuditReport:
    """Invariance under swapping two agents of the same group.

    Such transpositions generate every group-preserving permutation, so
    invariance under them is invariance under all of them.
    """
    t = table if table is not None else LotteryTable(rule, m, groups.n, guard)
    witnesses, checked = [], 0
    for members in groups.groups:
        for i, j in itertools.combinations(members, 2):
            swapped = np.swapaxes(t.num, i - 1, j - 1)
            checked += t.num.size // t.m
            diff = np.argwhere((swapped != t.num).any(axis=-1))
            if len(diff):
                idx = tuple(int(x) for x in diff[0])
                other = list(idx)
                other[i - 1], other[j - 1] = other[j - 1], other[i - 1]
                witnesses.append(
                    {
                        "agents": [i, j],
                        "profile": format_profile(t.profile(idx)),
                        "permuted": format_profile(t.profile(other)),
                        "lottery": str(t.lottery(idx)),
                        "permuted_lottery": str(t.lottery(other)),
                    }
                )
                break
        if witnesses:
            break
    return AuditReport(
        "group_anonymity", "semantic", not witnesses, witnesses, {"checked": checked}
    )
