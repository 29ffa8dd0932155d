"""Run every applicable route for a notion and insist they agree."""

from __future__ import annotations

import itertools
from typing import Sequence

from ..domain import DEFAULT_GUARD, Preference, SizeGuard
from ..errors import DualModeDisagreement, InputError
from ..groups import GroupStructure
from ..rules import (
    BallotFamily,
    DeterministicRule,
    RandomRule,
    SubsetBallotRule,
    decompose_pfgbr,
    gmmr_from_median,
    pfgbr_from_random,
)
from . import group_fairness as gf
from . import special
from .report import AuditReport

MODES = ("semantic", "dc", "ep", "all")


def group_representations(rule, groups: GroupStructure) -> tuple[BallotFamily | None, RandomRule | None]:
    """The rule as a ballot family and as a GMMR mixture, when it is one of those."""
    if isinstance(rule, SubsetBallotRule) and groups.is_singletons:
        rule = rule.to_pfgbr()
    if isinstance(rule, BallotFamily):
        return rule, decompose_pfgbr(rule)
    if isinstance(rule, DeterministicRule):
        rule = RandomRule([(1, rule)])
    if isinstance(rule, RandomRule):
        if rule.kinds == {"median"} and groups.k == 1:
            rule = RandomRule((w, gmmr_from_median(c, groups)) for w, c in rule.components)
        if rule.kinds == {"gmmr"}:
            return pfgbr_from_random(rule, groups), rule
    return None, None


def audit_group(
    rule,
    groups: GroupStructure,
    notion: str,
    mode: str = "all",
    guard: SizeGuard = DEFAULT_GUARD,
    profiles: Sequence[Sequence[Preference]] | None = None,
) -> list[AuditReport]:
    if notion not in gf.NOTIONS or mode not in MODES:
        raise InputError(f"unknown notion {notion!r} or mode {mode!r}")
    weak = notion == "weak"
    reports = []
    if mode in ("semantic", "all"):
        sem = gf.check_weak_fair_semantic if weak else gf.check_strong_fair_semantic
        reports.append(sem(rule, groups, guard=guard, profiles=profiles))
    if mode != "semantic":
        ballots, mixture = group_representations(rule, groups)
        if mode in ("dc", "all") and ballots is not None:
            dc = gf.check_dc_weak if weak else gf.check_dc_strong
            reports.append(dc(ballots, groups, guard, profiles))
        elif mode == "dc":
            raise InputError("rule has no group ballot representation")
        if mode in ("ep", "all") and mixture is not None:
            ep = gf.check_ep_weak if weak else gf.check_ep_strong
            reports.append(ep(mixture, groups, guard, profiles))
        elif mode == "ep":
            raise InputError("rule has no GMMR mixture representation")
    if mode == "all":
        require_agreement(reports)
    return reports


def agent_representations(rule):
    """(subset ballots, min-max mixture, median mixture) views, where available."""
    ballots = mixture = medians = None
    if isinstance(rule, BallotFamily) and rule.groups.is_singletons:
        ballots, mixture = rule, decompose_pfgbr(rule)
    elif isinstance(rule, SubsetBallotRule):
        ballots, mixture = rule, decompose_pfgbr(rule.to_pfgbr())
    else:
        if isinstance(rule, DeterministicRule):
            rule = RandomRule([(1, rule)])
        if isinstance(rule, RandomRule):
            if rule.kinds == {"median"}:
                medians = rule
                groups = GroupStructure.single(rule.n)
                counted = pfgbr_from_random(
                    RandomRule((w, gmmr_from_median(c, groups)) for w, c in rule.components)
                )
                # one group: the ballot of S depends on |S| only
                ballots = _subset_ballots_from_anonymous(counted)
                mixture = decompose_pfgbr(ballots.to_pfgbr())
            elif rule.kinds <= {"minmax", "gmmr", "dictatorship"}:
                mixture = rule
                ballots = special.subset_ballots(rule)
    return ballots, mixture, medians


def _subset_ballots_from_anonymous(b: BallotFamily) -> SubsetBallotRule:
    n = b.n
    subsets = [frozenset(c) for k in range(n + 1) for c in itertools.combinations(range(1, n + 1), k)]
    return SubsetBallotRule(n, b.m, {s: b.ballots[(len(s),)] for s in subsets})


def audit_agents(
    rule,
    kappa: Sequence[int],
    eta: Sequence,
    notion: str,
    mode: str = "all",
    guard: SizeGuard = DEFAULT_GUARD,
    profiles: Sequence[Sequence[Preference]] | None = None,
) -> list[AuditReport]:
    """Singleton-group fairness (top kappa_i of each agent) across all routes.

    The anonymous-median route only covers the full domain, so it is left
    out when ``profiles`` restricts the audit.
    """
    if notion not in gf.NOTIONS or mode not in MODES:
        raise InputError(f"unknown notion {notion!r} or mode {mode!r}")
    check = special.check_special_weak if notion == "weak" else special.check_special_strong
    reports = []
    if mode in ("semantic", "all"):
        reports.append(check(rule, kappa, eta, "semantic", guard=guard, profiles=profiles))
    if mode != "semantic":
        ballots, mixture, medians = agent_representations(rule)
        if mode in ("dc", "all") and ballots is not None:
            reports.append(check(ballots, kappa, eta, "dc", guard=guard, profiles=profiles))
        elif mode == "dc":
            raise InputError("rule has no subset ballot representation")
        if mode in ("ep", "all") and mixture is not None:
            reports.append(check(mixture, kappa, eta, "ep", guard=guard, profiles=profiles))
        elif mode == "ep":
            raise InputError("rule has no min-max mixture representation")
        if mode == "all" and medians is not None and profiles is None:
            reports.append(special.check_anonymous_fair(medians, kappa, eta, notion, guard=guard))
    if mode == "all":
        require_agreement(reports)
    return reports


def require_agreement(reports: Sequence[AuditReport]) -> None:
    verdicts = {r.mode: r.verdict for r in reports}
    if len(set(verdicts.values())) > 1:
        detail = ", ".join(f"{r.mode}={r.verdict} levels={[str(x) for x in r.levels or []]}" for r in reports)
        raise DualModeDisagreement(f"{reports[0].notion} fairness routes disagree: {detail}")
