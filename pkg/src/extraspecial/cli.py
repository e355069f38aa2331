"""Command-line entry point: ``extraspecial <subcommand> [flags]``.

Exit codes: 0 when the report status is pass, 1 for a failed check or an
unsatisfiable membership query, 2 for usage and configuration errors.
"""

from __future__ import annotations

import argparse
import re
import sys
import time
from contextlib import contextmanager

import numpy as np

from .config import ConfigError, DegreeCapError, GlobalConfig, config_load
from .dickson import check_v_expansion, dickson_Q, euler_product, mui_V
from .model import ExtraspecialModel, MultiIndex, enumerate_R
from .poly import (MultiPoly, ParseError, VariableContext, format_poly,
                   monomial_basis, parse_poly)
from .quotient import GradedQuotient
from .relations import (check_subgroup_restriction, solve_eta, solve_f,
                        verify_gamma_identities, verify_kappa_recursion)
from .report import RunReport, report_emit
from .steenrod import norm_dickson_check, norm_of_restriction, steenrod_operation
from .symplectic import enumerate_lagrangians

VERIFY_TARGETS = ("kappa-recursion", "additivity", "norm-identity",
                  "subgroup-restriction", "norm-dickson")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class Timer:
    def __init__(self):
        self.ms: dict[str, int] = {}

    @contextmanager
    def __call__(self, name: str):
        t0 = time.perf_counter()
        yield
        self.ms[name] = self.ms.get(name, 0) + round(1000 * (time.perf_counter() - t0))


# ------------------------------------------------------------------ helpers

def _context_for(text: str) -> VariableContext:
    """Variables named in the text, ordered by letter then index."""
    names = sorted(set(re.findall(r"[a-z][0-9]+", text)), key=lambda s: (s[0], int(s[1:])))
    return VariableContext(tuple(names), "mixed")


def _parse_input(args, p: int) -> MultiPoly:
    if args.poly is None:
        raise UsageError("--poly is required")
    return parse_poly(args.poly, _context_for(args.poly), p)


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _quotient(model, config):
    return GradedQuotient(model, cache_dir=config.cache_dir)


def _R_list(args, model, default):
    if args.R:
        return [MultiIndex.parse(s, model.p, model.n) for s in args.R]
    return [MultiIndex(r, model.p) for r in default]


# --------------------------------------------------------------- commands

def cmd_dickson(args, config, timer):
    p, m = config.p, args.m or config.n
    ss = [args.s] if args.s is not None else list(range(m))
    with timer("dickson"):
        polys = {f"Q_{m},{s}": format_poly(dickson_Q(p, m, s)) for s in ss}
        euler = euler_product(p, m)
    return "pass", {"m": m, "invariants": polys, "euler_product": format_poly(euler)}


def cmd_mui(args, config, timer):
    p, m = config.p, args.m or config.n
    with timer("mui"):
        V = mui_V(p, m + 1)
        rep = check_v_expansion(p, m)
    return _status(rep.holds), {"m": m, "V": format_poly(V), "expansion": rep.to_json()}


def cmd_steenrod(args, config, timer):
    f = _parse_input(args, config.p)
    if args.op is None:
        raise UsageError("--op is required")
    with timer("steenrod"):
        g = steenrod_operation(args.op, f)
    return "pass", {"op": args.op, "input": format_poly(f), "result": format_poly(g)}


def cmd_norm(args, config, timer):
    f = _parse_input(args, config.p)
    with timer("norm"):
        g = norm_of_restriction(f, normalization=args.normalization)
    return "pass", {"input": format_poly(f), "normalization": args.normalization,
                    "result": format_poly(g)}


def cmd_lagrangians(args, config, timer):
    model = ExtraspecialModel(config)
    with timer("enumerate"):
        Ls = enumerate_lagrangians(model.space)
    expected = model.space.expected_lagrangian_count()
    return _status(len(Ls) == expected), {
        "count": len(Ls), "expected": expected, "lagrangians": [L.to_json() for L in Ls]}


def cmd_zrel(args, config, timer):
    model = ExtraspecialModel(config)
    rs = [args.r] if args.r is not None else list(range(config.n + 1))
    rows = []
    with timer("zrel"):
        for r in rs:
            z = model.z_poly(r)
            vanishes = model.inflate(z).is_zero()
            rows.append({"r": r, "ydeg": z.homogeneous_degree, "vanishes": vanishes,
                         "z": format_poly(z)})
    ok = all(row["vanishes"] for row in rows if row["r"] < config.n)
    return _status(ok), {"relations": rows}


def cmd_solve_f(args, config, timer):
    model = ExtraspecialModel(config)
    with timer("solve"):
        sol = solve_f(model, _quotient(model, config))
    return _status(sol.passed), sol.to_json()


def cmd_solve_eta(args, config, timer):
    model = ExtraspecialModel(config)
    with timer("solve"):
        sol = solve_eta(model, _quotient(model, config))
    return _status(sol.passed), sol.to_json()


def _membership_one(model, R, mode):
    item = {"R": list(R.r), "ydeg": R.ydeg}
    status = "pass"
    if mode in ("criterion", "both"):
        item["criterion"] = R.lies_in_T
    if mode in ("oracle", "both"):
        tau = model.char_class_product(R)
        res = model.membership(tau)
        item["oracle"] = res.to_json()
        if not res.found:
            item["certificate_valid"] = model.check_certificate(tau, res)
            local = monomial_basis(model.n, res.degree)
            row = np.zeros(len(model.lagrangians) * len(local), dtype=np.int64)
            for c in res.certificate:
                row[c["lagrangian"] * len(local) + local.index(tuple(c["monomial"]))] = c["coefficient"]
            item["certificate_row"] = row.tolist()
    if mode == "both":
        item["agreement"] = item["criterion"] == (item["oracle"]["result"] == "IN_T")
        if not item["agreement"]:
            status = "fail"
    elif mode == "oracle" and item["oracle"]["result"] != "IN_T":
        status = "unsat"
    elif mode == "criterion" and not item["criterion"]:
        status = "unsat"
    return status, item


def cmd_membership(args, config, timer):
    model = ExtraspecialModel(config)
    mode = "oracle" if args.oracle else "criterion" if args.criterion else "both"
    if args.R:
        Rs = [MultiIndex.parse(s, config.p, config.n) for s in args.R]
    else:
        Rs = enumerate_R(config.p, config.n, args.dmax if args.dmax is not None else 10)
    items, statuses = [], []
    with timer("membership"):
        for R in Rs:
            st, item = _membership_one(model, R, mode)
            statuses.append(st)
            items.append(item)
    if "fail" in statuses:
        status = "fail"
    elif "unsat" in statuses:
        status = "unsat"
    else:
        status = "pass"
    return status, {"mode": mode, "results": items}


def cmd_verify(args, config, timer):
    model = ExtraspecialModel(config)
    target = args.target
    if target == "kappa-recursion":
        rs = [args.r] if args.r is not None else list(range(config.n))
        checks = []
        with timer("verify"):
            for r in rs:
                checks.append(verify_kappa_recursion(model, r).to_json())
        return _status(all(c["passed"] for c in checks)), {"target": target, "checks": checks}
    if target in ("additivity", "norm-identity"):
        rs = [] if target == "additivity" else ([args.r] if args.r is not None else None)
        with timer("verify"):
            rep = verify_gamma_identities(model, rs).to_json()
        if target == "additivity":
            ok = rep["additivity"]
            rep.pop("norm_identity")
        else:
            ok = all(item["passed"] for item in rep["norm_identity"])
            rep.pop("additivity")
        rep["passed"] = ok
        return _status(ok), {"target": target, "checks": [rep]}
    if target == "subgroup-restriction":
        Rs = _R_list(args, model, [(1, 0), (0, 1), (2, 0), (0, 3)] if config.n == 2
                     else [tuple(1 if j == 0 else 0 for j in range(config.n))])
        checks = []
        with timer("verify"):
            for R in Rs:
                checks.append(check_subgroup_restriction(model, R).to_json())
        return _status(all(c["passed"] for c in checks)), {"target": target, "checks": checks}
    if target == "norm-dickson":
        p = config.p
        with timer("verify"):
            ctx = VariableContext.local(1)
            t = MultiPoly.var(ctx, p, 0)
            N = norm_of_restriction(t)
            v = MultiPoly.var(N.ctx, p, N.ctx.names[-1])
            tt = t.embed(N.ctx)
            gen_ok = N == tt ** p - v ** (p - 1) * tt
            checks = [{"claim": "generator norm", "passed": gen_ok, "norm": format_poly(N)}]
            for r in range(config.n):
                rep = norm_dickson_check(p, config.n, r)
                checks.append({"claim": "dickson norm", "passed": rep.holds, **rep.to_json()})
        return _status(all(c["passed"] for c in checks)), {"target": target, "checks": checks}
    raise UsageError(f"unknown verify target {target!r}")


def cmd_hilbert(args, config, timer):
    model = ExtraspecialModel(config)
    Q = _quotient(model, config)
    dmax = args.dmax if args.dmax is not None else 8
    rows = []
    with timer("hilbert"):
        for d in range(dmax + 1):
            h = Q.hilbert_dimension(d)
            rows.append({"d": d, "dim": h, "restriction_rank": model.restriction_rank(d)})
    ok = all(r["dim"] == r["restriction_rank"] for r in rows)
    return _status(ok), {"dimensions": rows}


def cmd_presentation(args, config, timer):
    model = ExtraspecialModel(config)
    dmax = args.dmax if args.dmax is not None else 8
    with timer("presentation"):
        rep = _quotient(model, config).presentation_check(dmax)
    return _status(rep.passed), rep.to_json()


def cmd_invariants(args, config, timer):
    model = ExtraspecialModel(config)
    dmax = args.dmax if args.dmax is not None else 8
    with timer("invariants"):
        rep = _quotient(model, config).verify_invariant_basis(dmax)
    return _status(rep.passed), rep.to_json()


def cmd_enumerate_r(args, config, timer):
    dmax = args.dmax if args.dmax is not None else 10
    Rs = enumerate_R(config.p, config.n, dmax, args.filter)
    return "pass", {"filter": args.filter, "d_max": dmax, "sequences": [R.to_json() for R in Rs]}


COMMANDS = {
    "dickson": cmd_dickson, "mui": cmd_mui, "steenrod": cmd_steenrod, "norm": cmd_norm,
    "lagrangians": cmd_lagrangians, "zrel": cmd_zrel, "solve-f": cmd_solve_f,
    "solve-eta": cmd_solve_eta, "membership": cmd_membership, "verify": cmd_verify,
    "hilbert": cmd_hilbert, "presentation-check": cmd_presentation,
    "invariants": cmd_invariants, "enumerate-r": cmd_enumerate_r,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--p", type=int)
    common.add_argument("--n", type=int)
    common.add_argument("--degree-cap", type=int, dest="degree_cap")
    common.add_argument("--threads", type=int)
    common.add_argument("--cache-dir", dest="cache_dir")
    common.add_argument("--json", action="store_true")

    parser = _Parser(prog="extraspecial", description="Exact checks for mod-p cohomology "
                     "of extraspecial p-groups modulo nilpotents.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name in ("dickson", "mui"):
            sp.add_argument("--m", type=int)
        if name == "dickson":
            sp.add_argument("--s", type=int)
        if name in ("steenrod", "norm"):
            sp.add_argument("--poly")
        if name == "steenrod":
            sp.add_argument("--op", type=int)
        if name == "norm":
            sp.add_argument("--normalization", choices=("generator", "literal"), default="generator")
        if name in ("zrel", "verify"):
            sp.add_argument("--r", type=int)
        if name in ("membership", "verify"):
            sp.add_argument("--R", action="append")
        if name in ("membership", "hilbert", "presentation-check", "invariants", "enumerate-r"):
            sp.add_argument("--dmax", type=int)
        if name == "membership":
            g = sp.add_mutually_exclusive_group()
            g.add_argument("--oracle", action="store_true")
            g.add_argument("--criterion", action="store_true")
            g.add_argument("--both", action="store_true")
        if name == "verify":
            sp.add_argument("target", choices=VERIFY_TARGETS)
        if name == "enumerate-r":
            sp.add_argument("--filter", choices=("all", "prime", "free"), default="all")
    return parser


def _config_echo(config: GlobalConfig | None, args=None) -> dict:
    if config is None:
        raw = vars(args) if args is not None else {}
        return {"p": raw.get("p"), "n": raw.get("n"), "degree_cap": raw.get("degree_cap"),
                "threads": raw.get("threads"), "cache_dir": raw.get("cache_dir")}
    return {"p": config.p, "n": config.n, "degree_cap": config.degree_cap,
            "threads": config.threads,
            "cache_dir": str(config.cache_dir) if config.cache_dir else None}


def run_command(argv: list[str], env: dict | None = None) -> RunReport:
    """Parse, configure and dispatch; never raises for usage or configuration errors."""
    command = argv[0] if argv else ""
    config = args = None
    timer = Timer()
    try:
        args = build_parser().parse_args(argv)
        command = args.command
        config = config_load(vars(args), env)
        status, payload = COMMANDS[command](args, config, timer)
        return RunReport(command, _config_echo(config), status, payload, timer.ms)
    except (UsageError, ConfigError, DegreeCapError, ParseError, ValueError) as exc:
        return RunReport(command, _config_echo(config, args), "error", {}, timer.ms,
                         error=str(exc))


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        report = run_command(argv)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    report_emit(report, "json" if "--json" in argv else "text", sys.stdout)
    if report.error:
        print(f"extraspecial: {report.error}", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
