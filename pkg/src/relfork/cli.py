"""Command line interface.

Subcommands:

* ``check``: run an axiom suite, either against a finite model
  (``cr_tarski`` / ``cr_equational``, exhaustive or sampled assignments)
  or against a built pairing function (``cfa`` / ``cfau``, random
  finitely supported relations plus scan windows).
* ``eval``: evaluate one formula; exact over a finite model, compared
  on a window over a pairing function.
* ``fix``: enumerate the controlled fixpoints of a built pairing on a
  scan window and compare them with the layout's candidates.
* ``build``: build a pairing function and print its layout report,
  together with a digest of the canonical configuration.
* ``export``: write a finite model to JSON.

All randomness is seeded; stdout for a fixed seed is byte-stable.  The
elapsed wall time goes to stderr so it never disturbs captured output.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from typing import Dict, Optional, Tuple

from . import constructions, forkmodel, relcore, terms
from .btree import TreeSyntaxError
from .seqs import SeqSyntaxError

FIX_WINDOW_CAP = 1 << 20


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Target resolution


def _parse_members(text: Optional[str]) -> Tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError as exc:
        raise UsageError(f"bad member list {text!r}: {exc}") from None


def _resolve_model(spec: str) -> relcore.AlgebraModel:
    if spec.startswith("full:"):
        try:
            n = int(spec.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad model spec {spec!r}; expected full:N or a path") from None
        return relcore.full_pra(n)
    return relcore.load_model(spec)


def _star_config(args) -> Dict:
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as handle:
            config = json.load(handle)
        if not isinstance(config, dict):
            raise UsageError("config file must hold a JSON object")
        return config
    if not getattr(args, "star", None):
        raise UsageError("need --star KIND (or --config FILE)")
    config: Dict = {"kind": args.star, "S": list(_parse_members(args.members))}
    if args.star == "tree":
        if not args.tree:
            raise UsageError("kind tree needs --t TREE")
        config["control"] = args.tree
    elif args.star == "seq":
        if not args.seq:
            raise UsageError("kind seq needs --s SEQ")
        config["control"] = args.seq
    return config


def _canonical_config(config: Dict) -> str:
    return json.dumps(config, sort_keys=True, separators=(",", ":"))


def _resolve_star(args) -> Tuple[forkmodel.PairingFunction, Dict, str]:
    config = _star_config(args)
    pf = constructions.build_from_config(config)
    canonical = _canonical_config(config)
    digest = hashlib.sha256(canonical.encode("utf-8")).hexdigest()
    return pf, config, digest


def _target_name(args) -> str:
    if getattr(args, "model", None):
        return f"model:{args.model}"
    config = _star_config(args)
    control = config.get("control")
    suffix = f" control={control}" if control is not None else ""
    return f"star:{config.get('kind')} S={config.get('S')}{suffix}"


# ---------------------------------------------------------------------------
# Bindings and formula evaluation


def _load_bindings(path: Optional[str]) -> Dict[str, list]:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    if not isinstance(data, dict):
        raise UsageError("bindings file must hold a JSON object of pair lists")
    out = {}
    for name, pairs in data.items():
        out[name] = [(int(a), int(b)) for a, b in pairs]
    return out


def _window_formula(f, backend, env, n: int) -> bool:
    if isinstance(f, terms.Eq):
        lhs = forkmodel.window(terms.eval_term(f.left, env, backend), n)
        rhs = forkmodel.window(terms.eval_term(f.right, env, backend), n)
        return lhs == rhs
    if isinstance(f, terms.Leq):
        lhs = forkmodel.window(terms.eval_term(f.left, env, backend), n)
        rhs = forkmodel.window(terms.eval_term(f.right, env, backend), n)
        return lhs.is_subset(rhs)
    if isinstance(f, terms.Not):
        return not _window_formula(f.arg, backend, env, n)
    if isinstance(f, terms.And):
        return _window_formula(f.left, backend, env, n) and _window_formula(
            f.right, backend, env, n
        )
    if isinstance(f, terms.Or):
        return _window_formula(f.left, backend, env, n) or _window_formula(
            f.right, backend, env, n
        )
    if isinstance(f, terms.Implies):
        return (not _window_formula(f.left, backend, env, n)) or _window_formula(
            f.right, backend, env, n
        )
    raise UsageError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_check(args) -> Tuple[Dict, int]:
    suite = args.suite
    strategy = ("sampled", args.sampled) if args.sampled is not None else "exhaustive"
    if args.model:
        if suite not in ("cr_tarski", "cr_equational"):
            raise UsageError(
                f"suite {suite!r} needs a pairing function target; use --star"
            )
        model = _resolve_model(args.model)
        results = []
        all_valid = True
        for text in terms.AXIOM_TEXTS[suite]:
            report = terms.check_formula(
                terms.parse_formula(text), model, strategy=strategy, seed=args.seed
            )
            all_valid &= report.valid
            results.append(
                {
                    "axiom": text,
                    "valid": report.valid,
                    "checked": report.checked,
                    "counterexample": report.counterexample_text(),
                }
            )
        payload = {
            "target": _target_name(args),
            "suite": suite,
            "strategy": str(strategy),
            "seed": args.seed,
            "results": results,
            "all_valid": all_valid,
        }
        return payload, 0 if all_valid else 1

    if suite not in ("cfa", "cfau"):
        raise UsageError(f"suite {suite!r} needs a finite model target; use --model")
    pf, config, digest = _resolve_star(args)
    report = forkmodel.cfa_axiom_check(
        pf,
        support_bound=args.support_bound,
        trials=args.trials,
        seed=args.seed,
        urelement_bound=args.urelement_bound,
        include_urelement_axiom=(suite == "cfau"),
    )
    payload = {
        "target": _target_name(args),
        "suite": suite,
        "config_sha256": digest,
        "seed": args.seed,
        "trials": args.trials,
        "support_bound": args.support_bound,
        "urelement_bound": args.urelement_bound,
        "results": [
            {
                "name": r.name,
                "description": r.description,
                "passed": r.passed,
                "detail": r.detail,
                "witness": r.witness,
            }
            for r in report.results
        ],
        "all_valid": report.all_passed,
    }
    return payload, 0 if report.all_passed else 1


def _cmd_eval(args) -> Tuple[Dict, int]:
    formula = terms.parse_formula(args.formula)
    bindings = _load_bindings(args.bind)
    if args.model:
        model = _resolve_model(args.model)
        env = {
            name: relcore.FiniteRelation.from_pairs(model.base_size, pairs)
            for name, pairs in bindings.items()
        }
        value = terms.eval_formula(formula, env, model)
        mode = "exact"
    else:
        pf, _, _ = _resolve_star(args)
        backend = forkmodel.ForkBackend(pf)
        env = {
            name: forkmodel.LazyRelation.from_support(pairs)
            for name, pairs in bindings.items()
        }
        value = _window_formula(formula, backend, env, args.window)
        mode = f"window[0,{args.window})"
    payload = {
        "formula": terms.pretty_formula(formula),
        "target": _target_name(args),
        "mode": mode,
        "value": value,
    }
    return payload, 0 if value else 1


def _cmd_fix(args) -> Tuple[Dict, int]:
    pf, config, digest = _resolve_star(args)
    if args.window > FIX_WINDOW_CAP:
        raise UsageError(f"--window {args.window} exceeds cap {FIX_WINDOW_CAP}")
    region = range(args.window)
    kind = config["kind"]
    if kind == "basic":
        fixpoints = forkmodel.fix_members(pf, region)
    elif kind == "tree":
        fixpoints = forkmodel.fix_tree_members(
            constructions.parse_tree(config["control"]), pf, region
        )
    elif kind in ("pi", "rho"):
        fixpoints = forkmodel.fix_proj_members(pf, region, which=kind)
    elif kind == "seq":
        fixpoints = forkmodel.fix_seq_members(
            constructions.parse_seq(config["control"]), pf, region
        )
    else:
        raise UsageError(f"unknown construction kind {kind!r}")
    candidates = pf.meta.fix_candidates()
    expected = tuple(u for u in candidates if u < args.window)
    payload = {
        "target": _target_name(args),
        "config_sha256": digest,
        "window": args.window,
        "fixpoints": list(fixpoints),
        "candidates": list(candidates),
        "matches_candidates": tuple(fixpoints) == expected,
    }
    return payload, 0


def _cmd_build(args) -> Tuple[Dict, int]:
    pf, config, digest = _resolve_star(args)
    payload = constructions.layout_report(pf)
    payload["config"] = config
    payload["config_sha256"] = digest
    return payload, 0


def _cmd_export(args) -> Tuple[Dict, int]:
    model = _resolve_model(args.model)
    payload = relcore.model_to_dict(model)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2, sort_keys=True)
            handle.write("\n")
        return {"written": args.out, "base_size": model.base_size}, 0
    return payload, 0


# ---------------------------------------------------------------------------
# Rendering and argument wiring


def _render_text(payload: Dict) -> str:
    lines = []
    if "results" in payload:
        lines.append(f"{payload['suite']} on {payload['target']}")
        for entry in payload["results"]:
            mark = "ok  " if entry.get("valid", entry.get("passed")) else "FAIL"
            label = entry.get("axiom", entry.get("description", ""))
            lines.append(f"  {mark} {label}")
            counterexample = entry.get("counterexample") or entry.get("witness")
            if counterexample is not None and not entry.get(
                "valid", entry.get("passed")
            ):
                lines.append(f"       counterexample: {counterexample}")
        verdict = "pass" if payload["all_valid"] else "FAIL"
        lines.append(f"result: {verdict}")
    elif "value" in payload:
        lines.append(f"{payload['formula']}  [{payload['mode']}]")
        lines.append("true" if payload["value"] else "false")
    elif "fixpoints" in payload:
        lines.append(f"{payload['target']} window [0,{payload['window']})")
        lines.append(f"fixpoints:  {payload['fixpoints']}")
        lines.append(f"candidates: {payload['candidates']}")
        lines.append(
            "agreement:  yes" if payload["matches_candidates"] else "agreement:  NO"
        )
    elif "star_grid" in payload:
        lines.append(f"kind {payload['kind']}, members {payload['members']}")
        if payload.get("control"):
            lines.append(f"control: {payload['control']}")
        lines.append(f"reserved: {payload['reserved']}")
        for block in payload["blocks"]:
            lines.append(
                f"block {block['index']} ({block['name']}): {block['first_elements']} ..."
            )
        lines.append(f"pinned cells: {len(payload['table'])}")
        lines.append(f"config sha256: {payload['config_sha256']}")
    else:
        lines.append(json.dumps(payload, indent=2, sort_keys=True))
    return "\n".join(lines)


def _emit(payload: Dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(_render_text(payload))


def _add_target_args(parser: argparse.ArgumentParser, with_model: bool = True) -> None:
    if with_model:
        parser.add_argument("--model", help="finite model: full:N or a JSON file path")
    parser.add_argument(
        "--star",
        choices=("basic", "tree", "pi", "rho", "seq"),
        help="construction kind for a pairing-function target",
    )
    parser.add_argument("--S", dest="members", default="", help="members, e.g. 1,2")
    parser.add_argument("--t", dest="tree", help="control tree, e.g. 'bin (bin nil nil) nil'")
    parser.add_argument("--s", dest="seq", help="control sequence, e.g. pi.rho")
    parser.add_argument("--config", help="JSON config file {kind, S, control}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relfork",
        description="Verification workbench for relation and fork algebras.",
    )
    parser.add_argument(
        "--format", choices=("text", "json"), default="text", help="output format"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="run an axiom suite")
    _add_target_args(p_check)
    p_check.add_argument(
        "--suite",
        required=True,
        choices=sorted(terms.AXIOM_TEXTS),
        help="axiom suite to run",
    )
    p_check.add_argument(
        "--exhaustive", action="store_true", help="check every assignment (default)"
    )
    p_check.add_argument(
        "--sampled", type=int, metavar="K", help="check K random assignments"
    )
    p_check.add_argument("--seed", type=int, default=0)
    p_check.add_argument("--support-bound", type=int, default=64, dest="support_bound")
    p_check.add_argument("--trials", type=int, default=200)
    p_check.add_argument(
        "--urelement-bound", type=int, default=1000, dest="urelement_bound"
    )
    p_check.set_defaults(func=_cmd_check)

    p_eval = sub.add_parser("eval", help="evaluate one formula")
    _add_target_args(p_eval)
    p_eval.add_argument("--formula", required=True)
    p_eval.add_argument("--bind", help="JSON file binding variables to pair lists")
    p_eval.add_argument("--window", type=int, default=200)
    p_eval.set_defaults(func=_cmd_eval)

    p_fix = sub.add_parser("fix", help="enumerate controlled fixpoints")
    _add_target_args(p_fix, with_model=False)
    p_fix.add_argument("--window", type=int, default=1000)
    p_fix.set_defaults(func=_cmd_fix)

    p_build = sub.add_parser("build", help="build a pairing and report its layout")
    _add_target_args(p_build, with_model=False)
    p_build.set_defaults(func=_cmd_build)

    p_export = sub.add_parser("export", help="write a finite model to JSON")
    p_export.add_argument("--model", required=True)
    p_export.add_argument("--out", help="output path (default stdout)")
    p_export.set_defaults(func=_cmd_export)

    return parser


_USAGE_ERRORS = (
    UsageError,
    constructions.ConstructionError,
    relcore.RelationError,
    terms.ParseError,
    terms.EvalError,
    forkmodel.UndecidableCompositionError,
    forkmodel.NoFiniteSupportError,
    forkmodel.NilControlError,
    TreeSyntaxError,
    SeqSyntaxError,
    FileNotFoundError,
    json.JSONDecodeError,
)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        payload, code = args.func(args)
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(payload, args.format)
    print(f"elapsed-seconds: {time.monotonic() - started:.3f}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
