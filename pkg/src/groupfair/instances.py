"""JSON instance files: groups, rules, representative functions, profiles.

Rationals travel as ``"p/q"`` strings and alternatives as ``"a3"``.
Gamma keys are comma-separated counts (``"0,1"``); subset keys are
comma-separated agent ids, with ``""`` for the empty set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .domain import Interval, Lottery, Preference, alt_name, format_profile, parse_alt, parse_profile
from .errors import InputError, ParseError
from .groups import GroupStructure
from .representatives import RepSpec
from .rules import (
    BallotFamily,
    DeterministicRule,
    Dictatorship,
    GroupMinMaxRule,
    MedianRule,
    MinMaxRule,
    RandomRule,
    SubsetBallotRule,
)


def parse_rational(value: Any) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ParseError(f"write rationals as strings like \"1/3\", got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise ParseError(f"not a rational: {value!r}")
    try:
        return Fraction(value.strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"malformed rational {value!r}") from None


def format_rational(x: Fraction) -> str:
    return str(Fraction(x))


def _alt(value: Any, m: int) -> int:
    if isinstance(value, int) and not isinstance(value, bool):
        value = str(value)
    if not isinstance(value, str):
        raise ParseError(f"not an alternative: {value!r}")
    return parse_alt(value, m)


def _int_key(key: str) -> tuple[int, ...]:
    key = key.strip()
    if not key:
        return ()
    try:
        return tuple(int(s) for s in key.split(","))
    except ValueError:
        raise ParseError(f"bad key {key!r}, expected comma-separated integers") from None


def _key(values) -> str:
    return ",".join(str(v) for v in values)


def _need(obj: dict, name: str, where: str) -> Any:
    if not isinstance(obj, dict) or name not in obj:
        raise ParseError(f"{where}: missing field {name!r}")
    return obj[name]


# -- representative functions ----------------------------------------------


def parse_psi(obj: Any, kappa: int, m: int | None = None) -> RepSpec:
    kind = _need(obj, "kind", "psi")
    if kind == "table":
        entries = []
        for e in _need(obj, "entries", "psi"):
            pk = tuple(sorted(_alt(a, m) for a in _need(e, "peaks", "psi entry")))
            lo, hi = (_alt(a, m) for a in _need(e, "interval", "psi entry"))
            entries.append((pk, Interval(lo, hi)))
        return RepSpec("table", kappa, table=tuple(entries))
    r = obj.get("r")
    if r is not None and (not isinstance(r, int) or isinstance(r, bool)):
        raise ParseError(f"psi r must be an integer, got {r!r}")
    return RepSpec(kind, kappa, r=r)


def psi_to_json(spec: RepSpec) -> dict[str, Any]:
    if spec.kind == "table":
        return {
            "kind": "table",
            "entries": [
                {"peaks": [alt_name(a) for a in pk], "interval": [alt_name(v.lo), alt_name(v.hi)]}
                for pk, v in spec.table
            ],
        }
    out: dict[str, Any] = {"kind": spec.kind}
    if spec.r is not None:
        out["r"] = spec.r
    return out


# -- groups ----------------------------------------------------------------


def parse_groups(items: Any, m: int | None = None) -> GroupStructure:
    if not isinstance(items, list) or not items:
        raise ParseError("groups must be a nonempty list")
    agents, kappa, eta, psi = [], [], [], []
    for g in items:
        members = _need(g, "agents", "group")
        if not isinstance(members, list) or not all(isinstance(i, int) for i in members):
            raise ParseError(f"group agents must be a list of integers, got {members!r}")
        agents.append(tuple(members))
        kappa.append(g.get("kappa"))
        eta.append(parse_rational(g["eta"]) if "eta" in g else None)
        psi.append(g.get("psi"))
    params: dict[str, Any] = {}
    if all(k is not None for k in kappa):
        params["kappa"] = tuple(kappa)
    elif any(k is not None for k in kappa):
        raise ParseError("kappa must be given for every group or for none")
    if all(e is not None for e in eta):
        params["eta"] = tuple(eta)
    elif any(e is not None for e in eta):
        raise ParseError("eta must be given for every group or for none")
    if all(p is not None for p in psi):
        if "kappa" not in params:
            raise ParseError("psi needs a kappa for its group")
        params["psi"] = tuple(parse_psi(p, k, m) for p, k in zip(psi, kappa))
    elif any(p is not None for p in psi):
        raise ParseError("psi must be given for every group or for none")
    return GroupStructure(tuple(agents), **params)


def groups_to_json(groups: GroupStructure) -> list[dict[str, Any]]:
    out = []
    for q, members in enumerate(groups.groups):
        g: dict[str, Any] = {"agents": list(members)}
        if groups.kappa is not None:
            g["kappa"] = groups.kappa[q]
        if groups.eta is not None:
            g["eta"] = format_rational(groups.eta[q])
        if groups.psi is not None:
            g["psi"] = psi_to_json(groups.psi[q])
        out.append(g)
    return out


# -- rules -----------------------------------------------------------------


def _lottery(values: Any, m: int) -> Lottery:
    if not isinstance(values, list) or len(values) != m:
        raise ParseError(f"ballot must list {m} probabilities, got {values!r}")
    try:
        return Lottery(tuple(parse_rational(v) for v in values))
    except ParseError:
        raise
    except InputError as exc:
        raise ParseError(str(exc)) from None


def _subset(key: str) -> frozenset[int]:
    return frozenset(_int_key(key))


def parse_rule(obj: Any, m: int, groups: GroupStructure | None = None, n: int | None = None):
    kind = _need(obj, "kind", "rule")
    validate = obj.get("validate", True)
    n = obj.get("n", n if n is not None else (groups.n if groups is not None else None))

    def need_groups() -> GroupStructure:
        if groups is None:
            raise ParseError(f"{kind} rule needs groups")
        return groups

    def need_n() -> int:
        if n is None:
            raise ParseError(f"{kind} rule needs n (or groups)")
        return int(n)

    if kind == "pfgbr":
        ballots = {_int_key(k): _lottery(v, m) for k, v in _need(obj, "ballots", "rule").items()}
        return BallotFamily(need_groups(), m, ballots)
    if kind == "gmmr":
        params = {_int_key(k): _alt(v, m) for k, v in _need(obj, "params", "rule").items()}
        return GroupMinMaxRule(need_groups(), m, params, validate=validate)
    if kind == "pfbr":
        ballots = {_subset(k): _lottery(v, m) for k, v in _need(obj, "ballots", "rule").items()}
        return SubsetBallotRule(need_n(), m, ballots)
    if kind == "minmax":
        params = {_subset(k): _alt(v, m) for k, v in _need(obj, "params", "rule").items()}
        return MinMaxRule(need_n(), m, params, validate=validate)
    if kind == "median":
        params = [_alt(v, m) for v in _need(obj, "params", "rule")]
        return MedianRule(m, params, validate=validate)
    if kind == "dictatorship":
        return Dictatorship(need_n(), m, _need(obj, "agent", "rule"))
    if kind == "random":
        comps = []
        for c in _need(obj, "components", "rule"):
            inner = parse_rule(_need(c, "rule", "component"), m, groups, n)
            if not isinstance(inner, DeterministicRule):
                raise ParseError("random components must be deterministic rules")
            comps.append((parse_rational(_need(c, "weight", "component")), inner))
        return RandomRule(comps)
    raise ParseError(f"unknown rule kind {kind!r}")


def _subset_key(s: frozenset[int]) -> str:
    return _key(sorted(s))


def rule_to_json(rule) -> dict[str, Any]:
    if isinstance(rule, BallotFamily):
        return {
            "kind": "pfgbr",
            "ballots": {_key(g): [format_rational(p) for p in rule.ballots[g].probs] for g in rule.gammas},
        }
    if isinstance(rule, GroupMinMaxRule):
        return {"kind": "gmmr", "params": {_key(g): alt_name(rule.params[g]) for g in rule.gammas}}
    if isinstance(rule, SubsetBallotRule):
        return {
            "kind": "pfbr",
            "n": rule.n,
            "ballots": {
                _subset_key(s): [format_rational(p) for p in b.probs] for s, b in rule.ballots.items()
            },
        }
    if isinstance(rule, MinMaxRule):
        return {
            "kind": "minmax",
            "n": rule.n,
            "params": {_subset_key(s): alt_name(a) for s, a in rule.params.items()},
        }
    if isinstance(rule, MedianRule):
        return {"kind": "median", "params": [alt_name(a) for a in rule.params]}
    if isinstance(rule, Dictatorship):
        return {"kind": "dictatorship", "n": rule.n, "agent": rule.agent}
    if isinstance(rule, RandomRule):
        return {
            "kind": "random",
            "components": [
                {"weight": format_rational(w), "rule": rule_to_json(r)} for w, r in rule.components
            ],
        }
    raise InputError(f"cannot serialize {type(rule).__name__}")


# -- instances -------------------------------------------------------------


@dataclass
class Instance:
    m: int
    groups: GroupStructure | None = None
    rule: Any = None
    profiles: list[tuple[Preference, ...]] = field(default_factory=list)

    @property
    def n(self) -> int | None:
        if self.groups is not None:
            return self.groups.n
        return getattr(self.rule, "n", None)


def parse_instance(obj: Any) -> Instance:
    if not isinstance(obj, dict):
        raise ParseError("instance must be a JSON object")
    m = _need(obj, "m", "instance")
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise ParseError(f"m must be a positive integer, got {m!r}")
    groups = parse_groups(obj["groups"], m) if "groups" in obj else None
    if groups is not None:
        groups.check_m(m)
    rule = parse_rule(obj["rule"], m, groups) if "rule" in obj else None
    texts = []
    if "profile" in obj:
        texts.append(obj["profile"])
    texts.extend(obj.get("profiles", []))
    profiles = []
    for t in texts:
        if not isinstance(t, str):
            raise ParseError(f"profiles are strings like \"a1>a2>a3;a3>a2>a1\", got {t!r}")
        profiles.append(parse_profile(t, m))
    inst = Instance(m, groups, rule, profiles)
    n = inst.n
    for p in profiles:
        if n is not None and len(p) != n:
            raise ParseError(f"profile {format_profile(p)} has {len(p)} agents, expected {n}")
    if rule is not None and groups is not None and rule.n != groups.n:
        raise ParseError(f"rule has n={rule.n} but groups cover {groups.n} agents")
    return inst


def instance_to_json(inst: Instance) -> dict[str, Any]:
    out: dict[str, Any] = {"m": inst.m}
    if inst.groups is not None:
        out["groups"] = groups_to_json(inst.groups)
    if inst.rule is not None:
        out["rule"] = rule_to_json(inst.rule)
    if inst.profiles:
        out["profiles"] = [format_profile(p) for p in inst.profiles]
    return out


def load_instance(path: str) -> Instance:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    return parse_instance(obj)


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2)
