import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from groupfair.domain import Lottery, enumerate_profiles, parse_profile, peaks
from groupfair.errors import (
    InvalidBallotFamily,
    InvalidParameters,
    MissingBallot,
    MixedComponentKinds,
    RequiresSingleGroup,
)
from groupfair.generators import random_gmmr, random_median, random_pfgbr, random_random_gmmr
from groupfair.groups import GroupStructure
from groupfair.rules import (
    BallotFamily,
    Dictatorship,
    GroupMinMaxRule,
    MedianRule,
    MinMaxRule,
    RandomRule,
    SubsetBallotRule,
    decompose_pfgbr,
    eval_gmmr,
    eval_median,
    eval_minmax,
    eval_pfbr,
    eval_pfgbr,
    eval_random,
    gmmr_from_median,
    pfbr_to_minmax_mixture,
    pfgbr_from_random,
    validate_pfgbr,
)

import oracles
from conftest import PARTITION, MINMAX_PARAMS, GMMR_PARAMS, pfgbr_ballots, two_groups

PARTITIONS = {
    1: [((1,),)],
    2: [((1, 2),), ((1,), (2,))],
    3: [((1, 2, 3),), ((1,), (2, 3)), ((1, 2), (3,)), ((1,), (2,), (3,))],
}


def rule_cases():
    return st.tuples(
        st.integers(0, 10**6),
        st.sampled_from([(m, part) for m in (2, 3, 4) for n in (1, 2, 3) for part in PARTITIONS[n]]),
    )


# -- worked examples ----------------------------------------------------------


def test_pfbr_worked_example(pfbr, profile):
    lot = eval_pfbr(pfbr, profile)
    assert lot[2] == F(1, 2)
    # prefix differences at t = 1, 2, 3 read from the rows {1}, {1,3}, N
    assert lot.probs == (F(3, 10), F(1, 2), F(1, 5))
    assert eval_pfbr(pfbr, parse_profile("a1>a2>a3;" * 3 + "a1>a2>a3")) == Lottery.point(3, 1)


def test_pfgbr_worked_example(pfgbr, profile):
    lot = eval_pfgbr(pfgbr, profile)
    assert lot[3] == F(1, 2)
    assert lot.probs == (F(2, 5), F(1, 10), F(1, 2))


def test_minmax_worked_example(minmax_rule, profile):
    assert eval_minmax(minmax_rule, profile) == 2
    dictator = MinMaxRule(4, 3, {s: (1 if 2 in s else 3) for s in MINMAX_PARAMS})
    for prof in enumerate_profiles(3, 4):
        assert eval_minmax(dictator, prof) == prof[1].peak


def test_gmmr_worked_example(gmmr_bad, profile):
    assert eval_gmmr(gmmr_bad, profile) == 2
    assert not gmmr_bad.validate()


def test_median_example(median, profile):
    assert eval_median(median, profile) == 2
    low = MedianRule(3, (1, 1, 1, 1, 3))
    for prof in enumerate_profiles(3, 4):
        assert eval_median(low, prof) == min(peaks(prof))


def test_random_dictatorship_example():
    right = ">".join(f"a{i}" for i in range(4, 11))
    prof = parse_profile(
        ";".join([f"a3>a2>{right}>a1"] * 2 + [f"a2>a3>{right}>a1"] + [">".join(f"a{i}" for i in range(1, 11))] * 2)
    )
    rd = RandomRule((F(1, 5), Dictatorship(5, 10, i)) for i in range(1, 6))
    lot = eval_random(rd, prof)
    assert (lot[1], lot[2], lot[3]) == (F(2, 5), F(1, 5), F(2, 5))


def test_gmmr_collapses_to_max_peak():
    g = GroupStructure(PARTITION)
    params = {x: 3 for x in g.gammas()}
    params[g.top] = 1
    r = GroupMinMaxRule(g, 3, params)
    for prof in enumerate_profiles(3, 4):
        assert eval_gmmr(r, prof) == max(peaks(prof))


# -- validation --------------------------------------------------------------


def test_validate_pfgbr_and_violations():
    g = two_groups()
    assert validate_pfgbr(BallotFamily(g, 3, pfgbr_ballots()))
    swapped = pfgbr_ballots()
    swapped[(0, 0)], swapped[(1, 3)] = swapped[(1, 3)], swapped[(0, 0)]
    report = validate_pfgbr(BallotFamily(g, 3, swapped))
    assert {v.kind for v in report.violations} >= {"unanimity"}
    broken = pfgbr_ballots()
    broken[(1, 1)] = [0, 0, 1]
    report = validate_pfgbr(BallotFamily(g, 3, broken))
    assert any(
        v.kind == "monotonicity" and v.gamma == (1, 1) and v.gamma_prime == (1, 0) and v.t == 1
        for v in report.violations
    )
    with pytest.raises(InvalidBallotFamily):
        BallotFamily(g, 3, broken).lottery(parse_profile("a1>a2>a3;" * 3 + "a1>a2>a3"))
    missing = pfgbr_ballots()
    del missing[(0, 2)]
    with pytest.raises(MissingBallot):
        BallotFamily(g, 3, missing)


def test_parameter_validation():
    with pytest.raises(InvalidParameters):
        GroupMinMaxRule(GroupStructure(PARTITION), 3, GMMR_PARAMS)
    with pytest.raises(InvalidParameters):
        MedianRule(3, (1, 3, 2, 3))
    with pytest.raises(InvalidParameters):
        MedianRule(3, (2, 2, 3))
    with pytest.raises(InvalidParameters):
        MinMaxRule(2, 3, {(): 3, (1,): 1, (2,): 2, (1, 2): 2})


# -- oracles -----------------------------------------------------------------


@given(rule_cases())
def test_pfgbr_matches_oracle(case):
    seed, (m, part) = case
    rng = random.Random(seed)
    g = GroupStructure(part)
    b = random_pfgbr(rng, g, m)
    ballots = {x: list(b.ballots[x].probs) for x in b.gammas}
    for prof in enumerate_profiles(m, g.n):
        assert list(eval_pfgbr(b, prof).probs) == oracles.ballot_rule(ballots, part, m, peaks(prof))


@given(rule_cases())
def test_gmmr_matches_oracle(case):
    seed, (m, part) = case
    g = GroupStructure(part)
    r = random_gmmr(random.Random(seed), g, m)
    for prof in enumerate_profiles(m, g.n):
        assert eval_gmmr(r, prof) == oracles.gmmr_winner(r.params, part, peaks(prof))


@given(st.integers(0, 10**6), st.integers(2, 4), st.integers(1, 4))
def test_median_and_minmax_match_oracle(seed, m, n):
    rng = random.Random(seed)
    med = random_median(rng, n, m)
    g = GroupStructure.singletons(n)
    mm = MinMaxRule(n, m, {frozenset(i for i, x in enumerate(k, 1) if x): v for k, v in random_gmmr(rng, g, m).params.items()})
    for prof in enumerate_profiles(m, n):
        pk = peaks(prof)
        assert eval_median(med, prof) == oracles.median_winner(med.params, pk)
        assert eval_minmax(mm, prof) == oracles.minmax_winner(mm.params, pk)


@given(rule_cases())
def test_random_gmmr_matches_oracle_mixture(case):
    seed, (m, part) = case
    g = GroupStructure(part)
    r = random_random_gmmr(random.Random(seed), g, m)
    for prof in enumerate_profiles(m, g.n):
        pk = peaks(prof)
        want = oracles.mixture(r.components, m, lambda c: oracles.gmmr_winner(c.params, part, pk))
        assert list(eval_random(r, prof).probs) == want


# -- conversions -------------------------------------------------------------


def test_pfgbr_decomposition_round_trip(pfgbr):
    mix = decompose_pfgbr(pfgbr)
    assert pfgbr_from_random(mix, pfgbr.groups) == pfgbr
    distinct = {pfgbr.prefix(g, t) for g in pfgbr.gammas for t in range(1, 4)}
    assert len(mix.components) <= 1 + len(distinct)
    for prof in enumerate_profiles(3, 4):
        assert eval_random(mix, prof) == eval_pfgbr(pfgbr, prof)


def test_point_mass_ballots_decompose_to_one_component():
    g = GroupStructure(PARTITION)
    params = {x: 2 for x in g.gammas()}
    params[g.bottom], params[g.top] = 3, 1
    r = GroupMinMaxRule(g, 3, params)
    b = pfgbr_from_random(RandomRule([(1, r)]))
    assert all(max(b.ballots[x].probs) == 1 for x in b.gammas)
    mix = decompose_pfgbr(b)
    assert len(mix.components) == 1 and mix.components[0] == (1, r)


def test_two_component_split():
    g = GroupStructure(PARTITION)
    base = {x: 3 for x in g.gammas()}
    base[g.top] = 1
    other = dict(base)
    other[(1, 2)] = 2
    mix = RandomRule([(F(1, 2), GroupMinMaxRule(g, 3, base)), (F(1, 2), GroupMinMaxRule(g, 3, other))])
    b = pfgbr_from_random(mix)
    assert b.ballots[(1, 2)].probs == (0, F(1, 2), F(1, 2))
    assert b.ballots[(0, 1)].probs == (0, 0, 1)


def test_mixed_components_rejected():
    g = GroupStructure(((1, 2),))
    mix = RandomRule([(F(1, 2), Dictatorship(2, 3, 1)), (F(1, 2), Dictatorship(2, 3, 2))])
    with pytest.raises(MixedComponentKinds):
        pfgbr_from_random(mix, g)


@given(rule_cases())
def test_decomposition_properties(case):
    seed, (m, part) = case
    g = GroupStructure(part)
    b = random_pfgbr(random.Random(seed), g, m)
    mix = decompose_pfgbr(b)
    assert sum(w for w, _ in mix.components) == 1
    for _, c in mix.components:
        assert c.validate()
    assert pfgbr_from_random(mix, g) == b


def test_gmmr_from_median():
    one = gmmr_from_median(MedianRule(3, (1, 3)))
    assert one.params == {(0,): 3, (1,): 1}
    for b in (1, 2, 3):
        med = MedianRule(3, (1, b, 3))
        g = gmmr_from_median(med)
        for prof in enumerate_profiles(3, 2):
            assert eval_gmmr(g, prof) == eval_median(med, prof)
    with pytest.raises(RequiresSingleGroup):
        gmmr_from_median(MedianRule(3, (1, 2, 3)), GroupStructure.singletons(2))


def test_median_example_gmmr_agrees(median, profile):
    assert eval_gmmr(gmmr_from_median(median), profile) == 2


@given(st.integers(0, 10**6), st.integers(2, 3), st.integers(1, 4))
def test_pfbr_equals_singleton_pfgbr(seed, m, n):
    b = random_pfgbr(random.Random(seed), GroupStructure.singletons(n), m)
    sub = SubsetBallotRule(n, m, {frozenset(i for i, x in enumerate(k, 1) if x): v for k, v in b.ballots.items()})
    assert sub.to_pfgbr() == b
    mm = pfbr_to_minmax_mixture(sub)
    for prof in enumerate_profiles(m, n):
        assert eval_pfbr(sub, prof) == eval_pfgbr(b, prof) == eval_random(mm, prof)


def test_identical_components_merge():
    d = Dictatorship(2, 3, 1)
    r = RandomRule([(F(1, 3), d), (F(2, 3), Dictatorship(2, 3, 1))])
    assert r.components == ((1, d),)
