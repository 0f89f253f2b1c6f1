"""Command-line front end: decide, check-proof, eval, oracle, gen, translate.

Exit codes: 0 yes/accepted/true, 1 no/rejected/false, 2 unknown, 3 fragment
error, 4 other input error, 64 parse error, 65 budget exceeded, 70 internal.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional

from . import bridge, corpus
from .deciders import (NO, UNKNOWN, YES, Verdict, check_verdict, certificate_from_json,
                       decide, verdict_from_json)
from .errors import BudgetError, FragmentError, InternalError, ParseError, RelsylError
from .proofs import RULESETS, check_proof, proof_from_json
from .semantics import Countermodel, model_from_json, model_to_json, oracle_consequence, satisfies
from .syntax import (Fragment, Theory, fragment_of, goal_comment, parse_sentence, parse_theory,
                     print_sentence, print_theory, vocabulary)

EXIT = {YES: 0, NO: 1, UNKNOWN: 2}
EXIT_FRAGMENT, EXIT_INPUT, EXIT_PARSE, EXIT_BUDGET, EXIT_INTERNAL = 3, 4, 64, 65, 70


@dataclass(frozen=True)
class RunConfig:
    fragment: Optional[str] = None
    oracle_max_size: int = 3
    branch_cap: int = 1 << 16
    depth: Optional[int] = None
    model_bound: int = 3
    probe: int = 0
    seed: int = 0
    output: Optional[str] = None
    emit_certificate: bool = False
    fmt: str = "json"

    def __post_init__(self):
        for name in ("oracle_max_size", "branch_cap", "model_bound"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.depth is not None and self.depth < 1:
            raise ValueError("depth must be positive")
        if self.fmt not in ("json", "text"):
            raise ValueError("format is json or text")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _load_problem(theory_path: str, goal_text: Optional[str]) -> tuple:
    text = _read(theory_path)
    theory = parse_theory(text, infer=True)
    goal_text = goal_text or goal_comment(text)
    if goal_text is None:
        raise ParseError("no goal given and no '# goal:' line in the theory file")
    goal = parse_sentence(goal_text)
    nouns, verbs = vocabulary([goal])
    clash = (nouns & theory.verbs) | (verbs & theory.nouns)
    if clash:
        raise ParseError(f"goal uses {sorted(clash)} in the other role than the theory")
    return Theory(theory.nouns | nouns, theory.verbs | verbs, theory.sentences), goal


def _decider_config(theory: Theory, goal, cfg: RunConfig) -> tuple:
    found = fragment_of(list(theory.sentences) + [goal])
    fragment = Fragment(cfg.fragment) if cfg.fragment else None
    target = fragment or found
    if target in (Fragment.L3, Fragment.L3Half):
        return fragment, {"branch_cap": cfg.branch_cap, "probe": cfg.probe}
    if target in (Fragment.L4, Fragment.L4Half, Fragment.L4Plus, Fragment.L4HalfPlus,
                  Fragment.L5, Fragment.L5Half):
        return fragment, {"D": cfg.depth, "m": cfg.model_bound}
    return fragment, {}


def _verdict_text(v: Verdict) -> str:
    lines = [f"answer: {v.answer}"]
    for k, val in sorted(v.stats.items()):
        lines.append(f"  {k}: {val}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# subcommands


def cmd_decide(args, cfg: RunConfig) -> int:
    theory, goal = _load_problem(args.theory, args.goal)
    fragment, config = _decider_config(theory, goal, cfg)
    v = decide(theory, goal, fragment, **config)
    report = check_verdict(theory, goal, v)
    if not report.accepted:
        raise InternalError(f"decider returned a certificate that fails its check: {report.reason}")
    data = v.to_json()
    if not cfg.emit_certificate:
        data.pop("certificate")
    if cfg.fmt == "json":
        _emit(json.dumps(data, indent=1, default=str), cfg)
    else:
        _emit(_verdict_text(v), cfg)
    if args.certificate:
        with open(args.certificate, "w") as fh:
            json.dump(v.to_json(), fh, indent=1, default=str)
    return EXIT[v.answer]


def cmd_check_proof(args, cfg: RunConfig) -> int:
    text = _read(args.theory)
    theory = parse_theory(text, infer=True)
    data = json.loads(_read(args.proof))
    if "answer" in data:
        goal_text = args.goal or goal_comment(text)
        if goal_text is None:
            raise ParseError("checking a verdict needs a goal")
        report = check_verdict(theory, parse_sentence(goal_text), verdict_from_json(data))
    else:
        rules = args.rules
        if "kind" in data:
            if data["kind"] != "proof":
                raise ValueError("only proof certificates are checked without a goal")
            rules = rules or data.get("rules")
            proof = certificate_from_json(data)
        else:
            proof = proof_from_json(data)
        report = check_proof(theory, proof, rules or "Base0")
        goal_text = args.goal or goal_comment(text)
        if report.accepted and goal_text is not None:
            goal = parse_sentence(goal_text)
            if proof.conclusion != goal:
                report = type(report)(False, f"proof concludes {print_sentence(proof.conclusion)}")
    if cfg.fmt == "json":
        _emit(json.dumps(report.to_json()), cfg)
    else:
        _emit("accepted" if report.accepted else f"rejected: {report.reason}", cfg)
    return 0 if report.accepted else 1


def cmd_eval(args, cfg: RunConfig) -> int:
    text = _read(args.theory)
    model = model_from_json(json.loads(_read(args.model)))
    if args.flat:
        sentences = bridge.parse_rstar_theory(text)
        rows = [(bridge.print_rstar_sentence(s), bridge.satisfies_rstar(model, s)) for s in sentences]
    else:
        theory = parse_theory(text, infer=True)
        rows = [(print_sentence(s), satisfies(model, s)) for s in theory.sentences]
    if cfg.fmt == "json":
        _emit(json.dumps([{"sentence": s, "true": ok} for s, ok in rows], indent=1), cfg)
    else:
        _emit("\n".join(f"{'T' if ok else 'F'}  {s}" for s, ok in rows), cfg)
    return 0 if all(ok for _, ok in rows) else 1


def cmd_oracle(args, cfg: RunConfig) -> int:
    theory, goal = _load_problem(args.theory, args.goal)
    res = oracle_consequence(theory, goal, cfg.oracle_max_size, min_size=args.min_size,
                             backend=args.backend)
    if isinstance(res, Countermodel):
        data = {"answer": NO, "model": model_to_json(res.model)}
    else:
        data = {"answer": UNKNOWN, "no_countermodel_up_to": res.max_size}
    if cfg.fmt == "json":
        _emit(json.dumps(data, indent=1, default=str), cfg)
    else:
        _emit(f"answer: {data['answer']}", cfg)
    return EXIT[data["answer"]]


def _parse_o3(text: str) -> corpus.OneInThreeInstance:
    clauses = [tuple(c.split(",")) for c in text.split(";") if c.strip()]
    clauses = [tuple(v.strip() for v in c) for c in clauses]
    variables = sorted({v for c in clauses for v in c})
    return corpus.OneInThreeInstance(tuple(variables), tuple(clauses))


def cmd_gen(args, cfg: RunConfig) -> int:
    fam = args.family
    p = args.params
    if fam == "gamma-n":
        theory, goal = corpus.gen_gamma_n(int(p[0])), parse_sentence("some a a")
    elif fam == "delta-ni":
        theory, goal = corpus.gen_delta_ni(int(p[0]), int(p[1])), parse_sentence("some a a")
    elif fam == "one-in-three":
        theory, goal = corpus.encode_one_in_three(_parse_o3(" ".join(p)))
    elif fam == "three-sat":
        theory, goal = corpus.encode_3sat(corpus.parse_dimacs(_read(p[0])))
    elif fam == "fixture":
        n, which = int(p[0]), p[1]
        kw = {}
        if which == "M3":
            kw["i"] = int(p[2])
        elif which == "M4":
            kw["svec"] = p[2].split(",")
            if len(p) > 3:
                kw["subcase"] = p[3]
        _emit(json.dumps(model_to_json(corpus.fixture_models(n, which, **kw)), indent=1), cfg)
        return 0
    else:
        raise ValueError(f"unknown family {fam!r}")
    _emit(f"# goal: {print_sentence(goal)}\n" + print_theory(theory), cfg)
    return 0


def cmd_translate(args, cfg: RunConfig) -> int:
    if args.direction == "star":
        text = _read(args.theory)
        flat = bridge.parse_rstar_theory(text)
        out = [bridge.star_translate(s) for s in flat]
        goal_text = args.goal or goal_comment(text)
        lines = []
        if goal_text:
            lines.append(f"# goal: {print_sentence(bridge.star_translate(bridge.parse_rstar_sentence(goal_text, allow_reserved=True)))}")
        lines.append(print_theory(Theory.of(out)).rstrip("\n"))
        _emit("\n".join(lines), cfg)
        return 0
    theory, goal = _load_problem(args.theory, args.goal)
    gamma_star, phi_star, names = bridge.flatten(theory, goal)
    if cfg.fmt == "json":
        data = {"theory": [bridge.print_rstar_sentence(s) for s in gamma_star],
                "goal": bridge.print_rstar_sentence(phi_star),
                "name_map": bridge.name_map_to_json(names)}
        _emit(json.dumps(data, indent=1), cfg)
    else:
        lines = [f"# goal: {bridge.print_rstar_sentence(phi_star)}"]
        lines += [bridge.print_rstar_sentence(s) for s in gamma_star]
        _emit("\n".join(lines), cfg)
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="fmt", choices=("json", "text"), default="json")
    common.add_argument("--output", "-o", help="write the result here instead of stdout")
    ap = argparse.ArgumentParser(prog="relsyl", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decide", parents=[common], help="decide whether the theory entails the goal")
    d.add_argument("theory")
    d.add_argument("goal", nargs="?", help="defaults to the '# goal:' line of the theory file")
    d.add_argument("--fragment", choices=[f.value for f in Fragment if f is not Fragment.RStarDagger])
    d.add_argument("--branch-cap", type=int, default=1 << 16)
    d.add_argument("--probe", type=int, default=0,
                   help="try SAT countermodels up to this size before case splitting")
    d.add_argument("--depth", type=int, help="clausal depth bound (default: input depth + 2)")
    d.add_argument("--model-bound", type=int, default=3)
    d.add_argument("--emit-certificate", action="store_true")
    d.add_argument("--certificate", help="write the full verdict with certificate to this file")

    c = sub.add_parser("check-proof", parents=[common], help="check a proof, certificate or verdict")
    c.add_argument("theory")
    c.add_argument("proof")
    c.add_argument("--rules", choices=sorted(RULESETS))
    c.add_argument("--goal")

    e = sub.add_parser("eval", parents=[common], help="truth value of each sentence in a model")
    e.add_argument("theory")
    e.add_argument("model")
    e.add_argument("--flat", action="store_true", help="the theory uses ~r verb literals")

    o = sub.add_parser("oracle", parents=[common], help="brute-force countermodel search")
    o.add_argument("theory")
    o.add_argument("goal", nargs="?")
    o.add_argument("--max-size", type=int, default=3)
    o.add_argument("--min-size", type=int, default=0)
    o.add_argument("--backend", choices=("enumerate", "sat", "auto"), default="auto")

    g = sub.add_parser("gen", parents=[common], help="generate instance families and fixture models")
    g.add_argument("family", choices=("gamma-n", "delta-ni", "one-in-three", "three-sat", "fixture"))
    g.add_argument("params", nargs="*")

    t = sub.add_parser("translate", parents=[common], help="star translation or flattening")
    t.add_argument("direction", choices=("star", "flatten"))
    t.add_argument("theory")
    t.add_argument("goal", nargs="?")
    return ap


COMMANDS = {"decide": cmd_decide, "check-proof": cmd_check_proof, "eval": cmd_eval,
            "oracle": cmd_oracle, "gen": cmd_gen, "translate": cmd_translate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(
            fragment=getattr(args, "fragment", None),
            oracle_max_size=getattr(args, "max_size", 3),
            branch_cap=getattr(args, "branch_cap", 1 << 16),
            depth=getattr(args, "depth", None),
            model_bound=getattr(args, "model_bound", 3),
            probe=getattr(args, "probe", 0),
            output=args.output,
            emit_certificate=getattr(args, "emit_certificate", False),
            fmt=args.fmt,
        )
        return COMMANDS[args.command](args, cfg)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except BudgetError as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except FragmentError as e:
        print(f"fragment error: {e}", file=sys.stderr)
        return EXIT_FRAGMENT
    except InternalError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except (RelsylError, ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
