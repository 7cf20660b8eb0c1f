"""Command-line frontend.

Commands: ``lts`` (export a transition system), ``check`` (decide
fast-slow or slow bisimilarity, verify a supplied relation, or run the
slow-check shortcut), ``classify`` (conserved/slow/fast variables),
``congruence`` (side condition plus component and composed verdicts) and
``extend`` (apply the species extension operator and print model text).

Exit codes: 0 success or equivalent, 1 not equivalent, 2 input error,
3 state cap exceeded, 4 relation supplied but not a bisimulation,
5 shortcut or classification preconditions unmet.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import classification, equivalence, parser, semantics
from .model import EquivConfig, ModelError, SystemDef, extend_species
from .semantics import StateSpaceLimitError

EXIT_OK = 0
EXIT_NOT_EQUIVALENT = 1
EXIT_INPUT = 2
EXIT_STATE_CAP = 3
EXIT_BAD_RELATION = 4
EXIT_PRECONDITION = 5


class _InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _InputError(f"{path}: {exc.strerror or exc}") from None


def _load_model(path: str) -> SystemDef:
    text = _read(path)
    try:
        return parser.parse_model(text)
    except parser.ParseError as exc:
        lines = [f"{path}:{d}" for d in exc.diagnostics]
        raise _InputError("\n".join(lines)) from None


def _load_config(path: str) -> EquivConfig:
    text = _read(path)
    try:
        return parser.parse_config(text)
    except parser.ParseError as exc:
        lines = [f"{path}:{d}" for d in exc.diagnostics]
        raise _InputError("\n".join(lines)) from None


def _load_relation(path: str):
    text = _read(path)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _InputError(f"{path}: {exc}") from None
    if not isinstance(obj, list):
        raise _InputError(f"{path}: relation file must hold a JSON array of pairs")
    return obj


def _digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _report(args, **fields) -> dict:
    report = {"command": args.command, "inputs": {}}
    for path in getattr(args, "_input_paths", []):
        report["inputs"][path] = _digest(path)
    report.update(fields)
    if not args.deterministic:
        report["timing_ms"] = round((time.monotonic() - args._started) * 1000.0, 3)
    return report


def _emit(args, report: dict, human: list[str]) -> None:
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        for line in human:
            print(line)


def _check_config(cfg: EquivConfig, a: semantics.Lts, b: semantics.Lts) -> None:
    problems = equivalence.config_problems(cfg, a, b)
    if problems:
        raise _InputError("\n".join(problems))


# commands ---------------------------------------------------------------


def cmd_lts(args) -> int:
    sys_def = _load_model(args.model)
    lts = semantics.build_lts(sys_def, max_states=args.max_states)
    cfg = _load_config(args.config) if args.config else None
    if args.format == "dot":
        document = semantics.lts_to_dot(lts, cfg)
    else:
        document = json.dumps(semantics.lts_to_dict(lts), indent=2) + "\n"
    counts = f"{lts.n_states} states, {lts.n_transitions} transitions"
    if args.out:
        Path(args.out).write_text(document)
        print(counts)
    else:
        sys.stdout.write(document)
        print(counts, file=sys.stderr)
    return EXIT_OK


def _verdict_exit(outcome: equivalence.CheckOutcome, relation_supplied: bool) -> int:
    if outcome.verdict == "equivalent":
        return EXIT_OK
    if outcome.verdict == "relation-not-a-bisimulation":
        return EXIT_BAD_RELATION if relation_supplied else EXIT_NOT_EQUIVALENT
    return EXIT_NOT_EQUIVALENT


def cmd_check(args) -> int:
    sys_a = _load_model(args.model_a)
    sys_b = _load_model(args.model_b)
    cfg = _load_config(args.config)

    if args.mode == "shortcut":
        if not args.relation:
            raise _InputError("mode shortcut needs --relation (transformed coordinates)")
        obj = _load_relation(args.relation)
        try:
            pairs = [
                (tuple(int(x) for x in va), tuple(int(x) for x in vb))
                for va, vb in obj
            ]
        except (TypeError, ValueError):
            raise _InputError(
                f"{args.relation}: entries must be [first-coordinates, second-coordinates] pairs"
            ) from None
        result = classification.shortcut_check(sys_a, sys_b, cfg, pairs)
        outcome = result.outcome
        report = _report(
            args,
            mode=args.mode,
            applicable=result.sufficiency.applicable,
            slowVerdict=result.slow_outcome.verdict,
            fastSlowVerdict=result.fastslow_outcome.verdict,
            verdict=outcome.verdict,
            witness=outcome.witness.describe() if outcome.witness else None,
        )
        _emit(args, report, [f"verdict: {outcome.describe()}"])
        return _verdict_exit(outcome, relation_supplied=True)

    lts_a = semantics.build_lts(sys_a, max_states=args.max_states)
    lts_b = semantics.build_lts(sys_b, max_states=args.max_states)
    _check_config(cfg, lts_a, lts_b)
    check = (
        equivalence.check_fast_slow_relation
        if args.mode == "fast-slow"
        else equivalence.check_slow_relation
    )
    largest = (
        equivalence.largest_fast_slow
        if args.mode == "fast-slow"
        else equivalence.largest_slow
    )

    if args.relation:
        rel = equivalence.resolve_relation(_load_relation(args.relation), lts_a, lts_b)
        outcome = check(rel, lts_a, lts_b, cfg)
        if outcome.equivalent and (lts_a.initial, lts_b.initial) not in rel:
            report = _report(
                args,
                mode=args.mode,
                verdict="relation-valid-but-initial-states-unrelated",
                witness=None,
            )
            _emit(
                args,
                report,
                ["the relation is a bisimulation but does not relate the initial states"],
            )
            return EXIT_NOT_EQUIVALENT
    else:
        rel, outcome = largest(lts_a, lts_b, cfg)
        if args.emit_relation:
            obj = equivalence.relation_to_obj(rel, lts_a, lts_b)
            Path(args.emit_relation).write_text(json.dumps(obj, indent=2) + "\n")

    report = _report(
        args,
        mode=args.mode,
        states={"left": lts_a.n_states, "right": lts_b.n_states},
        transitions={"left": lts_a.n_transitions, "right": lts_b.n_transitions},
        relationSize=len(rel),
        verdict=outcome.verdict,
        witness=outcome.witness.describe() if outcome.witness else None,
    )
    human = [f"verdict: {outcome.verdict}"]
    if outcome.witness is not None:
        human.append(outcome.witness.describe())
    _emit(args, report, human)
    return _verdict_exit(outcome, relation_supplied=bool(args.relation))


def cmd_classify(args) -> int:
    sys_def = _load_model(args.model)
    cfg = _load_config(args.config)
    for action in sorted(sys_def.actions()):
        if action not in cfg.fast and action not in cfg.slow:
            raise _InputError(f"unpartitioned-action({action})")
    cls = classification.classify(sys_def, cfg)
    report_doc = classification.classification_report(sys_def, cfg, cls)
    report = _report(args, classification=report_doc)
    human = []
    for kind in ("conserved", "slow", "fast"):
        for entry in report_doc[kind]:
            constant = f" = {entry['constant']}" if "constant" in entry else ""
            human.append(f"{kind}: {entry['name']}{constant}")
        if not report_doc[kind]:
            human.append(f"{kind}: (none)")
    human.append(f"block shape verified: {report_doc['blockShapeVerified']}")
    for warning in report_doc["warnings"]:
        human.append(f"warning: {warning}")
    _emit(args, report, human)
    if cls.n_s == 0:
        print("no slow variables: the slow-check shortcut cannot be used", file=sys.stderr)
        return EXIT_PRECONDITION
    return EXIT_OK


def cmd_congruence(args) -> int:
    p1 = _load_model(args.model_p1)
    p2 = _load_model(args.model_p2)
    q = _load_model(args.model_q)
    cfg = _load_config(args.config)
    probe = equivalence.congruence_probe(p1, p2, q, cfg)
    report = _report(
        args,
        sharedFastWithP1=sorted(probe.shared_with_p1),
        sharedFastWithP2=sorted(probe.shared_with_p2),
        sideConditionHolds=probe.side_condition_ok,
        componentVerdict=probe.component.verdict,
        composedVerdict=probe.composed.verdict,
        witness=probe.composed.witness.describe() if probe.composed.witness else None,
    )
    human = [
        "shared fast actions with context: "
        + (", ".join(sorted(probe.shared_with_p1 | probe.shared_with_p2)) or "(none)"),
        f"side condition holds: {probe.side_condition_ok}",
        f"component verdict: {probe.component.verdict}",
        f"composed verdict: {probe.composed.verdict}",
    ]
    if probe.composed.witness is not None:
        human.append(probe.composed.witness.describe())
    _emit(args, report, human)
    ok = probe.side_condition_ok and probe.composed.equivalent
    return EXIT_OK if ok else EXIT_NOT_EQUIVALENT


def cmd_extend(args) -> int:
    sys_def = _load_model(args.model)
    try:
        base = sys_def.species_def(args.base)
        extension = sys_def.species_def(args.extension)
    except KeyError as exc:
        raise _InputError(f"unknown species {exc.args[0]}") from None
    extended = extend_species(base, extension)
    print(f"max {extended.name} = {extended.max_count};")
    print(parser.render_species(extended))
    return EXIT_OK


# argument plumbing -------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--json", action="store_true", help="machine-readable report")
    sub.add_argument(
        "--deterministic",
        action="store_true",
        help="suppress timing fields so identical inputs give identical output",
    )


def build_arg_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="fastslow",
        description="Bio-PEPA with levels: transition systems, fast-slow and "
        "slow bisimilarity, stoichiometric variable classification.",
    )
    subs = top.add_subparsers(dest="command", required=True)

    p = subs.add_parser("lts", help="build and export a transition system")
    p.add_argument("model")
    p.add_argument("--format", choices=("dot", "json"), default="json")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--max-states", type=int, default=semantics.DEFAULT_STATE_CAP)
    p.add_argument("--config", help="annotate edges with filtered labels")
    p.set_defaults(func=cmd_lts)

    p = subs.add_parser("check", help="decide or verify bisimilarity of two models")
    p.add_argument("model_a")
    p.add_argument("model_b")
    p.add_argument("--config", required=True)
    p.add_argument("--relation", help="verify this relation file instead of computing")
    p.add_argument(
        "--mode", choices=("fast-slow", "slow", "shortcut"), default="fast-slow"
    )
    p.add_argument("--emit-relation", help="write the computed largest relation here")
    p.add_argument("--max-states", type=int, default=semantics.DEFAULT_STATE_CAP)
    _add_common(p)
    p.set_defaults(func=cmd_check)

    p = subs.add_parser("classify", help="conserved, slow and fast variables")
    p.add_argument("model")
    p.add_argument("--config", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = subs.add_parser(
        "congruence", help="side condition and verdicts for composition with a context"
    )
    p.add_argument("model_p1")
    p.add_argument("model_p2")
    p.add_argument("model_q")
    p.add_argument("--config", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_congruence)

    p = subs.add_parser("extend", help="extend one species by another, print model text")
    p.add_argument("model")
    p.add_argument("base")
    p.add_argument("extension")
    p.set_defaults(func=cmd_extend)

    return top


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    args._started = time.monotonic()
    paths = [
        getattr(args, name)
        for name in ("model", "model_a", "model_b", "model_p1", "model_p2", "model_q", "config", "relation")
        if getattr(args, name, None)
    ]
    args._input_paths = paths
    if not hasattr(args, "json"):
        args.json = False
    if not hasattr(args, "deterministic"):
        args.deterministic = False
    try:
        return args.func(args)
    except _InputError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT
    except ModelError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT
    except StateSpaceLimitError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_STATE_CAP
    except classification.ShortcutPreconditionError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_PRECONDITION
    except classification.ShortcutLiftError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_PRECONDITION
    except (
        equivalence.EquivalenceError,
        semantics.UnpartitionedActionError,
        classification.ClassificationError,
    ) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
