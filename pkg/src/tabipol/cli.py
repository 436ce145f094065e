"""Command-line driver.

Exit codes: 0 success, 1 verification failure, 2 no proof found, 3 input error.
Results go to standard output, diagnostics to standard error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import Sequence

from .access import AccessOptions, access_interpolate, check_aci, make_aci_context, verify_access
from .clausify import (
    ClausificationTooLarge,
    NotRQFOError,
    clausify,
    definitional_clausify_rqfo,
    negate_rqfo,
    to_rqfo,
)
from .craig import InterpolationOptions, NoProofError, interpolate, interpolate_horn, verify_craig_lyndon
from .logic import Not, conj
from .provers import Exhausted, ProofBudget, prove_connection, prove_hyper
from .syntax import ParseError, TableauFormatError, parse_formula, parse_literal, parse_tableau, print_tableau
from .tableau import TableauError, render
from .transforms import (
    TransformError,
    TransformTrace,
    make_contiguous,
    make_leaf_only,
    negative_labels,
    remove_irregularities,
    remove_uneagerness,
    to_aci,
)

EXIT_OK, EXIT_VERIFY, EXIT_NO_PROOF, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    inputs: list = field(default_factory=list)
    budget: ProofBudget = field(default_factory=ProofBudget)
    grounding: str = "uniform"
    side_policy: str = "prefer-red"
    k_placement: str = "g"
    equality: bool = False
    verify: bool = False
    output: str = "text"


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from e


def _formulas(paths: Sequence[str]) -> list:
    arities: dict = {}
    out = []
    for p in paths:
        try:
            out.append(parse_formula(_read(p), arities))
        except ParseError as e:
            raise InputError(f"{p}: {e}") from e
    return out


def _tableau(path: str):
    try:
        return parse_tableau(_read(path))
    except TableauFormatError as e:
        raise InputError(f"{path}: {e}") from e


def _budget(a: argparse.Namespace) -> ProofBudget:
    try:
        return ProofBudget(a.max_depth, a.max_inferences, a.timeout_ms)
    except ValueError as e:
        raise InputError(str(e)) from e


def _config(a: argparse.Namespace) -> RunConfig:
    return RunConfig(
        a.command,
        list(getattr(a, "inputs", []) or []),
        _budget(a),
        getattr(a, "grounding", "uniform"),
        getattr(a, "side_policy", "prefer-red"),
        getattr(a, "k_placement", "g"),
        getattr(a, "equality", False),
        getattr(a, "verify", False),
        getattr(a, "format", "text"),
    )


def _emit_tableau(t, fmt: str) -> None:
    sys.stdout.write(print_tableau(t) if fmt == "tree" else render(t) + "\n")


def _report(rep) -> int:
    sys.stdout.write(str(rep) + "\n")
    sys.stdout.write(("PASS" if rep.ok else "FAIL") + "\n")
    return EXIT_OK if rep.ok else EXIT_VERIFY


# --------------------------------------------------------------------------
# subcommands


def cmd_prove(a, cfg: RunConfig) -> int:
    fs = _formulas(a.inputs)
    cf = clausify(conj(*fs))
    t = prove_hyper(cf, cfg.budget) if a.prover == "hyper" else prove_connection(cf, a.goal_policy, cfg.budget)
    _emit_tableau(t, cfg.output)
    return EXIT_OK


def cmd_clausify(a, cfg: RunConfig) -> int:
    (f,) = _formulas(a.inputs)
    if a.negate:
        f = negate_rqfo(to_rqfo(f)) if a.definitional else Not(f)
    if a.definitional:
        cf = definitional_clausify_rqfo(f, a.definitional)
    else:
        cf = clausify(f)
    sys.stdout.write(str(cf) + "\n")
    return EXIT_OK


def _ipol_options(a, cfg: RunConfig) -> InterpolationOptions:
    return InterpolationOptions(
        prover=a.prover,
        goal_policy=a.goal_policy,
        side_policy=cfg.side_policy,
        k_placement=cfg.k_placement,
        grounding=cfg.grounding,
        equality=cfg.equality,
        verify=cfg.verify,
        budget=cfg.budget,
    )


def _finish_ipol(res, cfg: RunConfig) -> int:
    sys.stdout.write(f"{res.interpolant}\n")
    if cfg.output == "tree":
        sys.stdout.write(print_tableau(res.tableau))
    if res.verification is not None:
        return _report(res.verification)
    return EXIT_OK


def cmd_interpolate(a, cfg: RunConfig) -> int:
    f, g = _formulas(a.inputs)
    return _finish_ipol(interpolate(f, g, _ipol_options(a, cfg)), cfg)


def cmd_interpolate_horn(a, cfg: RunConfig) -> int:
    f, g = _formulas(a.inputs)
    return _finish_ipol(interpolate_horn(f, g, _ipol_options(a, cfg)), cfg)


def cmd_access(a, cfg: RunConfig) -> int:
    f, g = _formulas(a.inputs)
    trace = TransformTrace()
    opts = AccessOptions(prover=a.prover, goal_policy=a.goal_policy, budget=cfg.budget, verify=cfg.verify)
    res = access_interpolate(f, g, opts, trace)
    if a.trace:
        sys.stderr.write(str(trace) + ("\n" if len(trace) else ""))
    return _finish_ipol(res, cfg)


def _lits(text: str) -> list:
    try:
        return [parse_literal(x.strip()) for x in text.split(";") if x.strip()]
    except ParseError as e:
        raise InputError(str(e)) from e


def _pairs(texts: Sequence[str]) -> list:
    out = []
    for text in texts:
        ls = _lits(text)
        if len(ls) != 2:
            raise InputError(f"a pair needs two literals separated by ';', got {text!r}")
        out.append(frozenset(ls))
    return out


def cmd_transform(a, cfg: RunConfig) -> int:
    t = _tableau(a.tableau)
    trace = TransformTrace()
    ctx = None
    if a.f or a.g:
        if not (a.f and a.g):
            raise InputError("--f and --g must be given together")
        f, g = _formulas([a.f, a.g])
        ctx = make_aci_context(f, g)
    if a.procedure == "eager":
        out = remove_uneagerness(t, trace)
    elif a.procedure == "regular":
        out = remove_irregularities(t, trace)
    elif a.procedure == "leaf-only":
        s = _lits(a.set) if a.set else negative_labels(t)
        out = make_leaf_only(t, s, a.rounds, trace)
    elif a.procedure == "contiguous":
        if a.pair:
            pairs = _pairs(a.pair)
        elif ctx is not None:
            pairs = ctx.contiguity_pairs(t)
        else:
            raise InputError("contiguous needs --pair or --f/--g")
        out = make_contiguous(t, pairs, regularize=not a.no_regularize, rounds=a.rounds, trace=trace)
    else:
        if ctx is None:
            raise InputError("to-aci needs --f and --g")
        out = to_aci(t, ctx, trace)
    _emit_tableau(out, cfg.output)
    if a.trace:
        sys.stderr.write(str(trace) + ("\n" if len(trace) else ""))
    if ctx is not None and a.procedure == "to-aci":
        sys.stderr.write(str(check_aci(out, ctx)) + "\n")
    return EXIT_OK


def cmd_verify(a, cfg: RunConfig) -> int:
    f, g, h = _formulas(a.inputs)
    if a.kind == "craig-lyndon":
        rep = verify_craig_lyndon(f, g, h, cfg.budget, equality=cfg.equality)
    else:
        rep = verify_access(f, g, h, cfg.budget)
    return _report(rep)


# --------------------------------------------------------------------------
# parser


def _budget_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-depth", type=int, default=12)
    p.add_argument("--max-inferences", type=int, default=1_000_000)
    p.add_argument("--timeout-ms", type=int, default=10_000)


def _ipol_flags(p: argparse.ArgumentParser, provers=("connection", "hyper"), default="connection") -> None:
    p.add_argument("inputs", nargs=2, metavar="FILE")
    p.add_argument("--prover", choices=provers, default=default)
    p.add_argument("--goal-policy", choices=("negative", "blue", "all"), default="negative")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--format", choices=("text", "tree"), default="text")
    _budget_flags(p)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tabipol", description="Interpolation with clausal tableaux.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", help="refute the conjunction of the given formulas")
    p.add_argument("inputs", nargs="+", metavar="FILE")
    p.add_argument("--prover", choices=("connection", "hyper"), default="connection")
    p.add_argument("--goal-policy", choices=("negative", "all"), default="negative")
    p.add_argument("--format", choices=("text", "tree"), default="text")
    _budget_flags(p)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("clausify", help="print a clause form")
    p.add_argument("inputs", nargs=1, metavar="FILE")
    p.add_argument("--definitional", choices=("L", "R"), help="definitional form for the given side")
    p.add_argument("--negate", action="store_true", help="clausify the negation")
    _budget_flags(p)
    p.set_defaults(func=cmd_clausify)

    for name, func in (("interpolate", cmd_interpolate), ("interpolate-horn", cmd_interpolate_horn)):
        p = sub.add_parser(name, help="Craig-Lyndon interpolant of F and G (F |= G)")
        _ipol_flags(p)
        p.add_argument("--side-policy", choices=("prefer-red", "prefer-blue"), default="prefer-red")
        p.add_argument("--k-placement", choices=("g", "f", "auto"), default="g")
        p.add_argument("--grounding", choices=("uniform",), default="uniform")
        p.add_argument("--equality", action="store_true", help="add equality axioms for eq")
        p.set_defaults(func=func)

    p = sub.add_parser("access-interpolate", help="access interpolant of RQFO sentences F and G")
    _ipol_flags(p, default="hyper")
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_access)

    p = sub.add_parser("transform", help="restructure a tableau")
    p.add_argument("procedure", choices=("eager", "regular", "leaf-only", "contiguous", "to-aci"))
    p.add_argument("tableau", metavar="TAB")
    p.add_argument("--set", help="leaf-only literal set, ';'-separated (default: negative labels)")
    p.add_argument("--pair", action="append", default=[], help="contiguity pair 'L1; L2' (repeatable)")
    p.add_argument("--f", help="formula file for F (derives contiguity pairs and the ACI check)")
    p.add_argument("--g", help="formula file for G")
    p.add_argument("--rounds", type=int)
    p.add_argument("--no-regularize", action="store_true")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--format", choices=("text", "tree"), default="tree")
    _budget_flags(p)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("verify", help="check an interpolant")
    p.add_argument("kind", choices=("craig-lyndon", "access"))
    p.add_argument("inputs", nargs=3, metavar="FILE", help="F G H")
    p.add_argument("--equality", action="store_true")
    _budget_flags(p)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT
    try:
        cfg = _config(a)
        return a.func(a, cfg)
    except (NoProofError, Exhausted) as e:
        sys.stderr.write(f"no proof: {e}\n")
        return EXIT_NO_PROOF
    except (InputError, NotRQFOError, TransformError, TableauError, ClausificationTooLarge, ValueError) as e:
        sys.stderr.write(f"input error: {e}\n")
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
