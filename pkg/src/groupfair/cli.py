"""Command-line front end.

Exit codes: 0 success or verdict true, 1 verdict false or invalid rule,
2 input error, 3 size guard exceeded, 4 audit routes disagree.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .audit.axioms import check_group_anonymity, check_strategy_proofness, check_unanimity
from .audit.dual import MODES, audit_agents, audit_group
from .audit.special import subset_ballots
from .constructors import ConstructionRequest, construct
from .domain import SizeGuard, alt_name, enumerate_single_peaked, parse_profile
from .errors import DualModeDisagreement, InputError, SizeGuardExceeded
from .instances import Instance, instance_to_json, load_instance
from .rules import (
    BallotFamily,
    RandomRule,
    SubsetBallotRule,
    decompose_pfgbr,
    evaluate,
    pfbr_to_minmax_mixture,
    pfgbr_from_random,
)

EXIT_OK, EXIT_FALSE, EXIT_INPUT, EXIT_GUARD, EXIT_DISAGREE = 0, 1, 2, 3, 4
CASE_NAMES = {"1": "I", "2": "II", "3": "III", "I": "I", "II": "II", "III": "III"}


def _guard(args) -> SizeGuard:
    base = SizeGuard()
    return SizeGuard(
        max_m=args.guard_m if args.guard_m is not None else base.max_m,
        max_n=args.guard_n if args.guard_n is not None else base.max_n,
    )


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def _require_rule(inst: Instance):
    if inst.rule is None:
        raise InputError("instance has no rule")
    return inst.rule


def _profiles(args, inst: Instance):
    if getattr(args, "profile", None):
        return [parse_profile(p, inst.m) for p in args.profile]
    return inst.profiles


def _format_lottery(lot) -> str:
    return " ".join(f"{alt_name(a)}={p}" for a, p in enumerate(lot.probs, 1) if p)


# -- commands --------------------------------------------------------------


def _validation_reports(rule) -> list[tuple[str, object]]:
    if isinstance(rule, RandomRule):
        out = []
        for k, (_, c) in enumerate(rule.components, 1):
            if hasattr(c, "validate"):
                out.append((f"component {k} ({c.kind})", c.validate()))
        return out
    if hasattr(rule, "validate"):
        return [(rule.kind, rule.validate())]
    return []


def cmd_validate(args) -> int:
    inst = load_instance(args.file)
    rule = _require_rule(inst)
    reports = _validation_reports(rule)
    valid = all(bool(r) for _, r in reports)
    if args.json:
        _emit({
            "valid": valid,
            "violations": [
                {"where": where, **v.as_dict()} for where, r in reports for v in r.violations
            ],
        })
    else:
        for where, r in reports:
            for v in r.violations:
                print(f"{where}: " + " ".join(f"{k}={val}" for k, val in v.as_dict().items()))
        print("valid" if valid else "invalid")
    return EXIT_OK if valid else EXIT_FALSE


def cmd_eval(args) -> int:
    inst = load_instance(args.file)
    rule = _require_rule(inst)
    profiles = _profiles(args, inst)
    if not profiles:
        raise InputError("no profile: pass --profile or list one in the instance")
    lotteries = [evaluate(rule, p) for p in profiles]
    if args.json:
        _emit([{alt_name(a): str(p) for a, p in enumerate(lot.probs, 1)} for lot in lotteries])
    else:
        for lot in lotteries:
            print(_format_lottery(lot))
    return EXIT_OK


def _axiom_reports(rule, inst: Instance, guard: SizeGuard):
    m, n = inst.m, rule.n
    out = [check_unanimity(rule, m, n, guard), check_strategy_proofness(rule, m, n, guard)]
    if inst.groups is not None:
        out.append(check_group_anonymity(rule, inst.groups, m, guard))
    return out


def cmd_audit(args) -> int:
    inst = load_instance(args.file)
    rule = _require_rule(inst)
    guard = _guard(args)
    groups = inst.groups
    if groups is None or groups.kappa is None or groups.eta is None:
        raise InputError("audit needs groups with kappa and eta")
    profiles = None if args.full_domain else (_profiles(args, inst) or None)
    if groups.psi is not None:
        reports = audit_group(rule, groups, args.notion, args.mode, guard, profiles)
    elif groups.is_singletons:
        reports = audit_agents(rule, groups.kappa, groups.eta, args.notion, args.mode, guard, profiles)
    else:
        raise InputError("groups need psi unless every group is a single agent")
    if args.axioms:
        reports = reports + _axiom_reports(rule, inst, guard)
    verdict = all(r.verdict for r in reports)
    if args.json:
        _emit({
            "verdict": verdict,
            "domain": "full" if profiles is None else "profiles",
            "reports": [r.to_json() for r in reports],
        })
    else:
        scope = "full domain" if profiles is None else f"{len(profiles)} profile(s)"
        for r in reports:
            line = f"{r.notion} {r.mode}: {str(r.verdict).lower()} (checked {r.checked}, {scope})"
            if r.levels is not None:
                line += " levels " + " ".join(str(x) for x in r.levels)
            print(line)
            for w in r.to_json()["witnesses"][: args.witnesses]:
                print("  witness " + json.dumps(w))
    return EXIT_OK if verdict else EXIT_FALSE


def cmd_decompose(args) -> int:
    inst = load_instance(args.file)
    rule = _require_rule(inst)
    if isinstance(rule, BallotFamily):
        mixture = decompose_pfgbr(rule)
        same = pfgbr_from_random(mixture, rule.groups) == rule
    elif isinstance(rule, SubsetBallotRule):
        mixture = pfbr_to_minmax_mixture(rule)
        same = subset_ballots(mixture).ballots == rule.ballots
    else:
        raise InputError(f"decompose expects a pfgbr or pfbr rule, got {rule.kind}")
    if not same:
        raise DualModeDisagreement("decomposition does not re-aggregate to the input rule")
    _emit(instance_to_json(Instance(inst.m, inst.groups, mixture)))
    return EXIT_OK


def cmd_construct(args) -> int:
    inst = load_instance(args.file)
    if inst.groups is None:
        raise InputError("construct needs groups")
    options = {}
    if args.ladder is not None:
        options["ladder"] = args.ladder
    if args.d is not None:
        options["d"] = args.d
    req = ConstructionRequest(inst.groups, inst.m, CASE_NAMES[args.case], options)
    built = construct(req, _guard(args))
    out = instance_to_json(Instance(inst.m, inst.groups, built.rule, inst.profiles))
    out["construction"] = built.metadata
    _emit(out)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    prefs = enumerate_single_peaked(args.m, _guard(args))
    if args.json:
        _emit([str(p) for p in prefs])
    else:
        for p in prefs:
            print(p)
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--guard-m", type=int, help="largest m for exhaustive work")
    common.add_argument("--guard-n", type=int, help="largest n for exhaustive work")
    common.add_argument("--json", action="store_true", help="structured output")

    parser = argparse.ArgumentParser(
        prog="groupfair",
        description="Group-fair random voting rules over single-peaked preferences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check rule invariants")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("eval", parents=[common], help="lottery at a profile")
    p.add_argument("file")
    p.add_argument("--profile", action="append", help="e.g. a1>a2>a3;a3>a2>a1 (repeatable)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("audit", parents=[common], help="weak or strong group fairness")
    p.add_argument("file")
    p.add_argument("--notion", choices=("weak", "strong"), default="strong")
    p.add_argument("--mode", choices=MODES, default="all")
    p.add_argument("--profile", action="append", help="restrict to these profiles (repeatable)")
    p.add_argument("--full-domain", action="store_true", help="ignore profiles listed in the instance")
    p.add_argument("--axioms", action="store_true", help="also check unanimity, SP and group anonymity")
    p.add_argument("--witnesses", type=int, default=3, help="witnesses shown per report")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("decompose", parents=[common], help="ballot rule to min-max mixture")
    p.add_argument("file")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("construct", parents=[common], help="build a strong-fair rule")
    p.add_argument("file")
    p.add_argument("--case", required=True, choices=sorted(CASE_NAMES))
    p.add_argument("--ladder", choices=("constant", "descending"))
    p.add_argument("--d", type=int, help="offset for case II")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("enumerate", parents=[common], help="list single-peaked preferences")
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_enumerate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SizeGuardExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except DualModeDisagreement as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DISAGREE
    except (InputError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
