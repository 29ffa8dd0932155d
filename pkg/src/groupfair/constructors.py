"""Strong-fair random GMMRs for three sufficient regimes.

Every output is a convex combination of GMMRs with a_m at the bottom
vector and a_1 at the top vector. When the constructed weights fall short
of 1, the residual goes to the first component; the metadata records it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from .domain import DEFAULT_GUARD, SizeGuard
from .errors import InputError, InvalidOffset, NotTopContaining, PreconditionViolated
from .groups import Gamma, GroupStructure
from .representatives import top_containing_witness
from .rules import GroupMinMaxRule, RandomRule

CASES = ("I", "II", "III")
LADDERS = ("constant", "descending")


@dataclass(frozen=True)
class ConstructionRequest:
    groups: GroupStructure
    m: int
    case: str
    options: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.case not in CASES:
            raise InputError(f"unknown case {self.case!r}, expected one of {CASES}")
        if self.groups.kappa is None or self.groups.eta is None:
            raise InputError("construction needs kappa and eta for every group")
        self.groups.check_m(self.m)

    @property
    def kappa_min(self) -> int:
        return min(self.groups.kappa)

    @property
    def eta_max(self) -> Fraction:
        return max(self.groups.eta)


@dataclass
class Construction:
    rule: RandomRule
    metadata: dict[str, Any]


def _gmmr(groups: GroupStructure, m: int, interior: Callable[[Gamma], int], guard: SizeGuard) -> GroupMinMaxRule:
    params = {}
    for g in groups.gammas(guard):
        if g == groups.bottom:
            params[g] = m
        elif g == groups.top:
            params[g] = 1
        else:
            params[g] = interior(g)
    return GroupMinMaxRule(groups, m, params, guard=guard)


def _assemble(weighted: list[tuple[Fraction, GroupMinMaxRule]], meta: dict) -> Construction:
    residual = 1 - sum(w for w, _ in weighted)
    meta["filler_weight"] = str(residual)
    if residual:
        meta["filler"] = "residual weight added to the first component"
        w0, r0 = weighted[0]
        weighted = [(w0 + residual, r0)] + weighted[1:]
    return Construction(RandomRule((w, r) for w, r in weighted if w > 0), meta)


def _case1(req: ConstructionRequest, guard: SizeGuard) -> Construction:
    groups, m = req.groups, req.m
    total = sum(groups.eta)
    if total > 1:
        raise PreconditionViolated(f"sum of eta is {total} > 1")
    if 2 * req.kappa_min < m + 1:
        raise PreconditionViolated(f"kappa_min={req.kappa_min} < (m+1)/2 with m={m}")
    ladder = req.options.get("ladder", "constant")
    if ladder not in LADDERS:
        raise InputError(f"unknown ladder {ladder!r}, expected one of {LADDERS}")
    n = groups.n
    weighted = []
    for kq, eq in zip(groups.kappa, groups.eta):
        hi, lo = kq, m - kq + 1  # admissible interior range is [a_lo, a_hi]
        if ladder == "constant":
            interior = lambda g, a=req.kappa_min: a
        else:
            # a_hi just above the bottom vector, drifting to a_lo near the top
            def interior(g, hi=hi, lo=lo):
                return hi - (hi - lo) * (sum(g) - 1) // max(n - 2, 1)
        weighted.append((eq, _gmmr(groups, m, interior, guard)))
    return _assemble(weighted, {"case": "I", "ladder": ladder})


def case2_offsets(m: int, kappa_min: int) -> range:
    """Offsets d whose points a_d, a_{d+kappa_min}, ... meet every kappa_min-window."""
    r = m - kappa_min * (m // kappa_min)
    return range(r + 1, kappa_min + 1)


def _case2(req: ConstructionRequest, guard: SizeGuard) -> Construction:
    groups, m, kmin, emax = req.groups, req.m, req.kappa_min, req.eta_max
    blocks = m // kmin
    if blocks * emax > 1:
        raise PreconditionViolated(f"floor(m/kappa_min) * eta_max = {blocks * emax} > 1")
    offsets = case2_offsets(m, kmin)
    d = int(req.options.get("d", kmin))
    if d not in offsets:
        raise InvalidOffset(f"d={d} outside [{offsets.start}, {offsets.stop - 1}]")
    weighted = [
        (emax, _gmmr(groups, m, lambda g, a=d + i * kmin: a, guard)) for i in range(blocks)
    ]
    return _assemble(weighted, {"case": "II", "d": d})


def _case3(req: ConstructionRequest, guard: SizeGuard) -> Construction:
    groups, m, kmin = req.groups, req.m, req.kappa_min
    n = groups.n
    if req.eta_max * n > 1:
        raise PreconditionViolated(f"eta_max={req.eta_max} > 1/n with n={n}")
    if 2 * kmin >= m + 1:
        raise PreconditionViolated(f"kappa_min={kmin} >= (m+1)/2 with m={m}")
    if groups.psi is None:
        raise InputError("case III needs a representative function per group")
    for q, (spec, members) in enumerate(zip(groups.psi, groups.groups), 1):
        bad = top_containing_witness(spec, len(members), m, guard)
        if bad is not None:
            raise NotTopContaining(f"psi of group {q} misses every peak of {list(bad)}")
    low, high = kmin, m - kmin + 1
    weighted = [
        (Fraction(1, n), _gmmr(groups, m, lambda g, i=i: low if sum(g) >= i else high, guard))
        for i in range(1, n + 1)
    ]
    return _assemble(weighted, {"case": "III"})


_BUILDERS = {"I": _case1, "II": _case2, "III": _case3}


def construct(req: ConstructionRequest, guard: SizeGuard = DEFAULT_GUARD) -> Construction:
    return _BUILDERS[req.case](req, guard)


def construct_case1(req: ConstructionRequest, guard: SizeGuard = DEFAULT_GUARD) -> RandomRule:
    return _case1(req, guard).rule


def construct_case2(req: ConstructionRequest, guard: SizeGuard = DEFAULT_GUARD) -> RandomRule:
    return _case2(req, guard).rule


def construct_case3(req: ConstructionRequest, guard: SizeGuard = DEFAULT_GUARD) -> RandomRule:
    return _case3(req, guard).rule
