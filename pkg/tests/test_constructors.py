import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupfair.audit.axioms import check_group_anonymity, check_strategy_proofness, check_unanimity
from groupfair.audit.dual import audit_group
from groupfair.audit.group_fairness import check_ep_strong, check_strong_fair_semantic
from groupfair.audit.table import LotteryTable
from groupfair.constructors import (
    ConstructionRequest,
    case2_offsets,
    construct,
    construct_case1,
    construct_case2,
    construct_case3,
)
from groupfair.domain import DEFAULT_GUARD, Interval
from groupfair.errors import InputError, InvalidOffset, NotTopContaining, PreconditionViolated
from groupfair.groups import GroupStructure, dominates
from groupfair.representatives import RepSpec, peak_multisets
from groupfair.rules import RandomRule

from conftest import KINDS, partitions


def groups_with(partition, kappa, eta, kinds=None):
    kinds = kinds or ["R1"] * len(partition)
    psi = tuple(RepSpec(k, x, r=1 if k == "R1" else None) for k, x in zip(kinds, kappa))
    return GroupStructure(partition, kappa=tuple(kappa), eta=tuple(F(e) for e in eta), psi=psi)


def interiors(comp):
    g = comp.groups
    return {x: a for x, a in comp.params.items() if x not in (g.bottom, g.top)}


def assert_full_audit(rule, groups, m):
    t = LotteryTable(rule, m, groups.n)
    for c in (c for _, c in rule.components):
        assert c.validate()
    assert sum(w for w, _ in rule.components) == 1
    assert check_unanimity(rule, m, groups.n).verdict
    assert check_strategy_proofness(rule, m, groups.n, table=t).verdict
    assert check_group_anonymity(rule, groups, m, table=t).verdict
    assert check_strong_fair_semantic(rule, groups, m, table=t).verdict
    assert check_ep_strong(rule, groups).verdict


# -- case I --------------------------------------------------------------------


def test_case1_example():
    groups = groups_with(((1,), (2, 3)), (2, 2), ("1/2", "1/2"))
    c = construct(ConstructionRequest(groups, 3, "I"))
    assert len(c.rule.components) == 1  # both groups get the same constant ladder
    assert c.metadata == {"case": "I", "ladder": "constant", "filler_weight": "0"}
    assert_full_audit(c.rule, groups, 3)


def test_case1_constant_ladder_has_one_interior_value():
    groups = groups_with(((1,), (2,), (3,)), (3, 2, 2), ("1/4", "1/4", "1/4"))
    c = construct(ConstructionRequest(groups, 3, "I"))
    for _, comp in c.rule.components:
        assert set(interiors(comp).values()) == {2}
    assert c.metadata["filler_weight"] == "1/4"
    assert c.rule.components[0][0] == 1  # one merged component carries everything


def test_case1_descending_ladder():
    groups = groups_with(((1,), (2,), (3,)), (3, 4, 4), ("1/3", "1/3", "1/3"))
    rule = construct_case1(ConstructionRequest(groups, 4, "I", {"ladder": "descending"}))
    for (_, comp), kq in zip(rule.components, (3, 4, 4)):
        values = interiors(comp)
        assert all(4 - kq + 1 <= a <= kq for a in values.values())
        for x, a in values.items():
            for y, b in values.items():
                if dominates(x, y):
                    assert a <= b
    assert_full_audit(rule, groups, 4)


def test_case1_preconditions():
    with pytest.raises(PreconditionViolated, match="kappa_min"):
        construct_case1(ConstructionRequest(groups_with(((1,), (2,)), (1, 2), (0, 0)), 3, "I"))
    with pytest.raises(PreconditionViolated, match="sum of eta"):
        construct_case1(ConstructionRequest(groups_with(((1,), (2,)), (2, 2), ("2/3", "1/2")), 3, "I"))
    with pytest.raises(InputError):
        construct_case1(ConstructionRequest(groups_with(((1,),), (2,), (0,)), 3, "I", {"ladder": "spiral"}))


# -- case II -------------------------------------------------------------------


def test_case2_example():
    groups = groups_with(((1,), (2, 3)), (2, 2), ("1/2", "1/2"), ["R1", "R3"])
    c = construct(ConstructionRequest(groups, 4, "II", {"d": 2}))
    assert [(w, set(interiors(comp).values())) for w, comp in c.rule.components] == [
        (F(1, 2), {2}), (F(1, 2), {4}),
    ]
    assert_full_audit(c.rule, groups, 4)


def test_case2_offsets():
    assert list(case2_offsets(3, 2)) == [2]
    assert list(case2_offsets(4, 2)) == [1, 2]
    # r = 2 here; a2 and a5 leave the window a3..a4.. uncovered, so only d = 3
    assert list(case2_offsets(5, 3)) == [3]
    groups = groups_with(((1,), (2,)), (2, 3), ("1/3", "1/2"))
    rule = construct_case2(ConstructionRequest(groups, 3, "II"))
    assert [(w, set(interiors(c).values())) for w, c in rule.components] == [(1, {2})]


def test_case2_preconditions():
    with pytest.raises(PreconditionViolated):
        construct_case2(ConstructionRequest(groups_with(((1,), (2,)), (1, 1), (1, 1)), 2, "II"))
    with pytest.raises(InvalidOffset):
        construct_case2(ConstructionRequest(groups_with(((1,),), (3,), (1,)), 5, "II", {"d": 2}))


def test_excluded_offset_is_really_unfair():
    from groupfair.constructors import _gmmr

    groups = groups_with(((1,), (2,)), (3, 3), (1, 1))
    ok = construct_case2(ConstructionRequest(groups, 5, "II", {"d": 3}))
    assert check_strong_fair_semantic(ok, groups).verdict
    bad = RandomRule([(1, _gmmr(groups, 5, lambda g: 2, DEFAULT_GUARD))])
    report = check_strong_fair_semantic(bad, groups)
    assert not report.verdict
    assert report.witnesses[0]["profile"].startswith("a3>")


# -- case III ------------------------------------------------------------------


def test_case3_example():
    groups = groups_with(((1,), (2,)), (1, 1), ("1/2", "1/2"))
    c = construct(ConstructionRequest(groups, 3, "III"))
    assert [w for w, _ in c.rule.components] == [F(1, 2), F(1, 2)]
    assert_full_audit(c.rule, groups, 3)
    # interior of component i sits low exactly when at least i peaks are counted
    for i, (_, comp) in enumerate(c.rule.components, 1):
        assert all(a == (1 if sum(x) >= i else 3) for x, a in interiors(comp).items())


def test_case3_preconditions():
    with pytest.raises(PreconditionViolated):
        construct_case3(ConstructionRequest(groups_with(((1,), (2,)), (1, 1), (1, 0)), 3, "III"))
    with pytest.raises(PreconditionViolated):
        construct_case3(ConstructionRequest(groups_with(((1,), (2,)), (2, 2), (0, 0)), 3, "III"))
    constant = RepSpec("table", 1, table=tuple((ms, Interval(1, 1)) for ms in peak_multisets(1, 3)))
    groups = GroupStructure(((1,), (2,)), eta=(0, 0), psi=(RepSpec("R4", 1), constant))
    with pytest.raises(NotTopContaining):
        construct_case3(ConstructionRequest(groups, 3, "III"))


def test_request_validation():
    with pytest.raises(InputError):
        ConstructionRequest(groups_with(((1,),), (1,), (0,)), 3, "IV")
    with pytest.raises(InputError):
        ConstructionRequest(GroupStructure(((1,),)), 3, "I")


# -- sweep ---------------------------------------------------------------------


def random_request(rng):
    m = rng.choice([2, 3, 4])
    n = rng.choice([1, 2, 3])
    partition = rng.choice(partitions(n))
    case = rng.choice(["I", "II", "III"])
    k = len(partition)
    if case == "I":
        kappa = [rng.randint((m + 2) // 2, m) for _ in partition]
        eta = [F(1, k)] * k if rng.random() < 0.5 else [F(1, k + 1)] * k
        options = {"ladder": rng.choice(["constant", "descending"])}
    elif case == "II":
        kappa = [rng.randint(1, m) for _ in partition]
        blocks = m // min(kappa)
        eta = [F(1, blocks)] * k
        options = {"d": rng.choice(list(case2_offsets(m, min(kappa))))}
    else:
        kappa = [rng.randint(1, max(1, (m - 1) // 2)) for _ in partition]
        if 2 * min(kappa) >= m + 1:
            kappa = [1] * k
            m = max(m, 2)
        eta = [F(1, n)] * k
        options = {}
    kinds = [rng.choice(KINDS) for _ in partition]
    psi = tuple(
        RepSpec(kind, x, r=rng.randint(1, len(g)) if kind == "R1" else None)
        for kind, x, g in zip(kinds, kappa, partition)
    )
    groups = GroupStructure(partition, kappa=tuple(kappa), eta=tuple(eta), psi=psi)
    return ConstructionRequest(groups, m, case, options)


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_constructions_pass_full_audit(seed):
    req = random_request(random.Random(seed))
    try:
        c = construct(req)
    except PreconditionViolated:
        return
    assert_full_audit(c.rule, req.groups, req.m)
    assert all(r.verdict for r in audit_group(c.rule, req.groups, "strong"))
    assert construct(req).rule == c.rule
