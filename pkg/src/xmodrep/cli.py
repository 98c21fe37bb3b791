"""Command-line front end: run the verification pipeline on fixtures.

    xmodrep run z2-triv --report text
    xmodrep run path/to/fixture.toml --field prime:5 --stage algebra
    xmodrep list

Exit codes: 0 pass, 1 check failure, 2 input error, 3 budget exceeded.
"""

import argparse
from dataclasses import dataclass
import sys
import time

from . import __version__, _accel
from .exactla import QQ, FieldError, parse_field
from .fixtures import FixtureError, bundled_names, resolve
from .gray import DEFAULT_BUDGET, cat2_kernel_check, delta_roundtrip_checks, hcomp_witness, theta, verify_gray
from .groups import OrderCapExceeded
from .grpalg import (WellDefinednessError, extract_chain_complex, family_contribution_check,
                     functoriality_checks, kernel_basis_lemma_check, quotient_cat2, relation_instance_checks)
from .regrep import (RepresentationError, ablation_checks, build_representation, degeneration_checks,
                     verify_representation)
from .report import FAIL, INFO, PASS, SKIP, Check, VerificationReport
from .xmod2 import truncation_checks, verify_2xm

STAGES = ("axioms", "gray", "algebra", "representation")
EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class Options:
    field: str = ""                 # "" means the fixture's own field, else rational
    budget: int = DEFAULT_BUDGET
    seed: int = 0
    stage: str = "representation"
    allow_modular: bool = False
    ablation: bool = False


def _field_for(spec, opts):
    text = opts.field or spec.field
    allow = opts.allow_modular or bool(spec.meta.get("allow_modular", False))
    F = parse_field(text, allow_modular=allow)
    if F is not QQ:
        F.check_orders(spec.module.orders())
    return F


def _guard(opts, visits, what):
    if visits > opts.budget:
        raise BudgetExceeded(f"{what} needs about {visits} tuple visits, budget is {opts.budget}")


def run_pipeline(spec, opts=None):
    """Run the stages up to ``opts.stage``; stages after a hard failure are skipped."""
    opts = opts or Options()
    if opts.stage not in STAGES:
        raise ValueError(f"unknown stage {opts.stage!r}; choose from {', '.join(STAGES)}")
    F = _field_for(spec, opts)
    X = spec.module
    last = STAGES.index(opts.stage)
    rep = VerificationReport(spec.name, meta={
        "field": F.name if F is not QQ else "rational", "seed": opts.seed, "budget": opts.budget,
        "stage": opts.stage, "orders": dict(zip("LMN", X.orders())), "expect": spec.meta.get("expect", "pass"),
        "kernels": "numba" if _accel.use_numba() else "numpy", "version": __version__})
    timings = {}

    def stage(name, body):
        sec = rep.section(name)
        if STAGES.index(name) > last:
            sec.status, sec.error = SKIP, ""
            return False
        blocked = next((s for s in rep.sections if s.name != name and s.status == "run" and not s.ok), None)
        if blocked is not None:
            sec.status = SKIP
            sec.data["reason"] = f"after failure in {blocked.name}"
            return False
        t0 = time.perf_counter()
        try:
            body(sec)
        except (WellDefinednessError, RepresentationError) as exc:
            sec.error = str(exc)
        timings[name] = round(time.perf_counter() - t0, 3)
        return True

    state = {}

    def axioms(sec):
        _guard(opts, X.M.order ** 3 + X.L.order ** 2, "axiom checks")
        sec.extend(verify_2xm(X))
        sec.extend(truncation_checks(X))

    def gray(sec):
        G = theta(X, check_axioms=False)
        state["G"] = G
        sec.extend(verify_gray(G, budget=opts.budget, seed=opts.seed))
        sec.extend(cat2_kernel_check(G))
        checks, _ = delta_roundtrip_checks(G)
        sec.extend(checks)
        w = hcomp_witness(G)
        sec.add(Check("hcomp-lower-upper", "Γ·Γ′ computed below versus above", INFO,
                      witness=w and {"Γ": w[0], "Γ′": w[1]},
                      detail="differ" if w else "agree on every pair"))
        rep.dims.update({"|C1|": G.C1.order, "|C2|": G.C2.order, "|C3|": G.C3.order})

    def algebra(sec):
        G = state["G"]
        _guard(opts, G.C3.order ** 2, "ideal closure")
        B = quotient_cat2(G, F)
        state["B"] = B
        sec.extend(B.checks)
        sec.extend(kernel_basis_lemma_check(B.pre))
        sec.extend(relation_instance_checks(B))
        sec.extend(functoriality_checks(B))
        sec.add(family_contribution_check(G, F, B.families))
        delta = extract_chain_complex(B)
        c2, c1, c0 = delta.dims
        rep.dims.update({"dim J2": B.J2.dim, "dim J1": B.J1.dim, "dim K̄3": B.Q3.dim, "dim K̄2": B.Q2.dim,
                         "dim K1": c0, "dim K2": c1, "dim K3": c2})

    def representation(sec):
        G, B = state["G"], state["B"]
        _guard(opts, G.C3.order ** 2 + G.C2.order ** 3, "representation checks")
        rho = build_representation(G, B)
        sec.extend(verify_representation(rho))
        if spec.l_trivial:
            sec.extend(degeneration_checks(X.truncation(), rho))
        if opts.ablation:
            sec.extend(ablation_checks(G, F))

    for name, body in zip(STAGES, (axioms, gray, algebra, representation)):
        stage(name, body)
    rep.meta["seconds"] = timings
    return rep


# ---------------------------------------------------------------------------
# output

def _text(rep):
    lines = [f"fixture {rep.fixture}: {'PASS' if rep.ok else 'FAIL'}"]
    meta = rep.meta
    lines.append(f"  field {meta.get('field')}  seed {meta.get('seed')}  budget {meta.get('budget')}  "
                 f"kernels {meta.get('kernels')}")
    if rep.dims:
        lines.append("  " + "  ".join(f"{k} = {v}" for k, v in rep.dims.items()))
    for s in rep.sections:
        if s.status == SKIP:
            why = s.data.get("reason", "not requested")
            lines.append(f"[{s.name}] skipped ({why})")
            continue
        counts = {r: sum(c.result == r for c in s.checks) for r in (PASS, FAIL, INFO)}
        lines.append(f"[{s.name}] {counts[PASS]} pass, {counts[FAIL]} fail, {counts[INFO]} info"
                     + (f", error: {s.error}" if s.error else ""))
        width = max((len(c.id) for c in s.checks), default=0)
        for c in s.checks:
            mark = {PASS: "ok  ", FAIL: "FAIL", INFO: "info", SKIP: "skip"}.get(c.result, c.result)
            extra = f"  {c.witness}" if c.witness is not None and c.result != PASS else ""
            note = f"  ({c.detail})" if c.detail else ""
            lines.append(f"  {mark} {c.id:<{width}}  {c.mode}{note}{extra}")
    first = rep.first_failure()
    if first:
        lines.append(f"first failure: {first}")
    return "\n".join(lines)


def emit_report(rep, fmt="json"):
    if fmt == "json":
        return rep.to_json(indent=2)
    if fmt == "text":
        return _text(rep)
    raise ValueError(f"unknown report format {fmt!r}")


def exit_code(rep):
    return EXIT_PASS if rep.ok else EXIT_FAIL


# ---------------------------------------------------------------------------

def _parser():
    p = argparse.ArgumentParser(prog="xmodrep", description="Verify 2-crossed modules and their regular representation.")
    p.add_argument("--version", action="version", version=f"xmodrep {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run the pipeline on fixtures (bundled names or TOML paths)")
    r.add_argument("fixtures", nargs="+", help="fixture names, paths, or 'all'")
    r.add_argument("--field", default="", help="rational | prime:<p> (default: the fixture's own, else rational)")
    r.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="tuple-visit budget")
    r.add_argument("--seed", type=int, default=0, help="seed for sampled checks (u64)")
    r.add_argument("--stage", choices=STAGES, default="representation", help="last stage to run")
    r.add_argument("--report", choices=("json", "text"), default="text")
    r.add_argument("--allow-modular", action="store_true",
                   help="permit a prime dividing a group order")
    r.add_argument("--ablation", action="store_true", help="add relation-family ablation diagnostics")
    sub.add_parser("list", help="list bundled fixtures")
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.cmd == "list":
        for n in bundled_names():
            print(n)
        return EXIT_PASS
    if not 0 <= args.seed < 2**64:
        print("error: seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_INPUT
    opts = Options(args.field, args.budget, args.seed, args.stage, args.allow_modular, args.ablation)
    names = bundled_names() if args.fixtures == ["all"] else args.fixtures
    worst = EXIT_PASS
    for name in names:
        try:
            spec = resolve(name)
            rep = run_pipeline(spec, opts)
        except (FixtureError, FieldError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            worst = max(worst, EXIT_INPUT)
            continue
        except (BudgetExceeded, OrderCapExceeded) as exc:
            print(f"budget exceeded: {exc}", file=sys.stderr)
            worst = max(worst, EXIT_BUDGET)
            continue
        print(emit_report(rep, args.report))
        code = exit_code(rep)
        if code:
            print(f"first failing check: {rep.first_failure()}", file=sys.stderr)
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
