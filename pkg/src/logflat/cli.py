"""Command-line front end.

Machine-readable JSON goes to stdout (one document per invocation, with a
top-level schema_version); a human-readable rendering goes to stderr when
--pretty is given.  Exit codes: 0 success, 2 parse error, 3 invalid
mathematical input, 4 unsupported scope, 5 internal consistency failure.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from .curves import parse_curve, parse_point
from .divisors import (
    MarkedBase,
    fractional_class_part,
    log_pic_class,
    order_of_class,
    parse_divisor,
    torsor_group_fppf,
    torsor_group_log,
)
from .errors import LogflatError, ParseError
from .pairings import (
    bad_primes,
    log_class_pairing,
    monodromy_profile,
    reduction_data,
)
from .rings import (
    class_group,
    is_prime,
    parse_prime,
    parse_ring,
    pic_of_open,
    render_prime,
)

SCHEMA_VERSION = 1


def parse_marked_set(ring, text: str):
    """Comma- or whitespace-separated prime literals; empty means none."""
    s = text.strip()
    if not s:
        return []
    parts = re.findall(r"\([^()]*\)", s)
    rest = re.sub(r"\([^()]*\)", "", s).replace(",", "").strip()
    if not parts or rest:
        raise ParseError("marked set must be a list of prime literals", text, 0)
    return [parse_prime(ring, p) for p in parts]


def _report(command: str, args: dict, result: dict, checks: list) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "arguments": args,
        "result": result,
        "checks": checks,
    }


def cmd_logpic(ring_spec: str, d_spec: str, div_spec: str | None) -> dict:
    ring = parse_ring(ring_spec)
    D = parse_marked_set(ring, d_spec)
    base = MarkedBase(ring, tuple(D))
    cl = class_group(ring)
    pic_u = pic_of_open(ring, D)
    result = {
        "ring": str(ring),
        "marked": [render_prime(P) for P in base.marked],
        "pic": {
            "invariant_factors": list(cl.invariant_factors),
            "order": cl.order,
            "generators": [str(g) for g in cl.generators],
        },
        "pic_punctured": {
            "invariant_factors": list(pic_u.invariant_factors),
            "order": pic_u.order,
        },
        "frac_target": [f"Q/Z at {render_prime(P)}" for P in base.marked],
    }
    checks: list = []
    if div_spec is not None:
        d = parse_divisor(base, div_spec)
        c = log_pic_class(d)
        nu = fractional_class_part(c)
        result["divisor"] = str(d)
        result["class"] = {
            "representative": str(c.representative()),
            "order": order_of_class(c),
            "fractional_part": {
                render_prime(P): str(q)
                for P, q in zip(base.marked, nu.coeffs)
            },
            "pic_coordinates": list(c.pic_coords),
            "trivial": c.is_trivial(),
        }
    return _report(
        "logpic",
        {"ring": ring_spec, "D": d_spec, "div": div_spec},
        result,
        checks,
    )


def cmd_mun(ring_spec: str, d_spec: str, n: int) -> dict:
    ring = parse_ring(ring_spec)
    D = parse_marked_set(ring, d_spec)
    base = MarkedBase(ring, tuple(D))
    # torsor_group_log enforces the two-presentation equality internally
    g = torsor_group_log(base, n)
    punctured = torsor_group_fppf(ring, base.marked, n)
    result = {
        "ring": str(ring),
        "marked": [render_prime(P) for P in base.marked],
        "n": n,
        "order_marked_base": g.order,
        "order_punctured_base": punctured.order,
        "fppf_order_unmarked": g.fppf_order,
        "kernel_order": g.kernel_order,
        "kernel_generators": [
            {"element": str(w), "order": o} for w, o in g.kernel_generators
        ],
        "punctured_unit_factors": list(punctured.unit_factors),
        "punctured_pic_torsion": list(punctured.pic_torsion_factors),
    }
    checks = [
        {
            "name": "two-presentation equality",
            "verdict": "ok" if g.order == punctured.order else "FAIL",
        }
    ]
    return _report("mun", {"ring": ring_spec, "D": d_spec, "n": n}, result, checks)


def _prime_from_spec(ring, spec: str):
    s = spec.strip()
    if re.fullmatch(r"\d+", s):
        p = int(s)
        if not is_prime(p):
            raise ParseError(f"{p} is not prime", spec, 0)
        return parse_prime(ring, f"({p})")
    return parse_prime(ring, s)


def _reduction_report(rd) -> dict:
    G = rd.component_group
    table = {}
    for a in range(G.order):
        for b in range(G.order):
            table[f"{a},{b}"] = str(G.form(a, b))
    return {
        "prime": render_prime(rd.prime),
        "kodaira": rd.kodaira.symbol,
        "split": rd.kodaira.split,
        "component_group": list(G.invariant_factors),
        "component_order": G.order,
        "tamagawa": rd.tamagawa,
        "pairing_table": table,
        "minimal_model": [str(a) for a in rd.minimal_model.a_invariants()],
    }


def cmd_curve(ring_spec: str, curve_spec: str, p_spec: str | None) -> dict:
    ring = parse_ring(ring_spec)
    E = parse_curve(ring, curve_spec)
    result: dict = {"ring": str(ring), "curve": curve_spec.replace(" ", "")}
    if p_spec is not None:
        P = _prime_from_spec(ring, p_spec)
        result["reduction"] = [_reduction_report(reduction_data(E, P))]
    else:
        result["reduction"] = [
            _reduction_report(reduction_data(E, P)) for P in bad_primes(E)
        ]
    return _report(
        "curve", {"ring": ring_spec, "E": curve_spec, "p": p_spec}, result, []
    )


def cmd_pair(ring_spec: str, curve_spec: str, x_spec: str, y_spec: str) -> dict:
    ring = parse_ring(ring_spec)
    E = parse_curve(ring, curve_spec)
    x = parse_point(E, x_spec)
    y = parse_point(E, y_spec)
    base = MarkedBase(ring, bad_primes(E))
    cls = log_class_pairing(E, x, y, base)
    nu = fractional_class_part(cls)
    prof = monodromy_profile(E, x, y, base)
    n = y.order()
    annihilated = cls.scale(n).is_trivial()
    agree = nu == prof.as_frac_divisor()
    result = {
        "ring": str(ring),
        "curve": curve_spec.replace(" ", ""),
        "x": str(x),
        "y": str(y),
        "y_order": n,
        "marked": [render_prime(P) for P in base.marked],
        "class": {
            "representative": str(cls.representative()),
            "pic_coordinates": list(cls.pic_coords),
            "trivial": cls.is_trivial(),
        },
        "fractional_part": {
            render_prime(P): str(q) for P, q in zip(base.marked, nu.coeffs)
        },
        "monodromy_profile": {
            render_prime(P): str(v) for P, v in prof.values
        },
    }
    checks = [
        {
            "name": "fractional part equals monodromy profile",
            "verdict": "ok" if agree else "FAIL",
        },
        {
            "name": "torsion annihilation",
            "verdict": "ok" if annihilated else "FAIL",
        },
    ]
    return _report(
        "pair",
        {"ring": ring_spec, "E": curve_spec, "x": x_spec, "y": y_spec},
        result,
        checks,
    )


def _render_pretty(report: dict, stream):
    print(f"command: {report['command']}", file=stream)
    def walk(obj, indent=2):
        pad = " " * indent
        if isinstance(obj, dict):
            for k, v in obj.items():
                if isinstance(v, (dict, list)):
                    print(f"{pad}{k}:", file=stream)
                    walk(v, indent + 2)
                else:
                    print(f"{pad}{k}: {v}", file=stream)
        elif isinstance(obj, list):
            for v in obj:
                if isinstance(v, (dict, list)):
                    walk(v, indent + 2)
                else:
                    print(f"{pad}- {v}", file=stream)
    walk(report["result"])
    for chk in report["checks"]:
        print(f"  check {chk['name']}: {chk['verdict']}", file=stream)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="logflat",
        description=(
            "Logarithmic Picard groups of number rings with marked primes, "
            "mu_n torsor counts for the Kummer log flat topology, reduction "
            "data of elliptic curves, and class pairings on points."
        ),
    )
    ap.add_argument("--pretty", action="store_true", help="render a human-readable report to stderr")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p1 = sub.add_parser("logpic", help="log Picard class of a divisor")
    p1.add_argument("--ring", required=True)
    p1.add_argument("--D", default="", help="marked primes, e.g. '(2,1+w)' or '(5),(7)'")
    p1.add_argument("--div", default=None, help="divisor literal, e.g. '1/2*(5)'")

    p2 = sub.add_parser("mun", help="mu_n torsor group orders (two presentations)")
    p2.add_argument("--ring", required=True)
    p2.add_argument("--D", default="")
    p2.add_argument("--n", type=int, required=True)

    p3 = sub.add_parser("curve", help="reduction data of an elliptic curve")
    p3.add_argument("--ring", default="Z")
    p3.add_argument("--E", required=True, help="curve literal [a1,a2,a3,a4,a6]")
    p3.add_argument("--p", default=None, help="prime (default: all bad primes)")

    p4 = sub.add_parser("pair", help="logarithmic class pairing of two points")
    p4.add_argument("--ring", default="Z")
    p4.add_argument("--E", required=True)
    p4.add_argument("--x", required=True, help="point literal '(x, y)' or 'O'")
    p4.add_argument("--y", required=True, help="torsion point literal")
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        if ns.subcommand == "logpic":
            report = cmd_logpic(ns.ring, ns.D, ns.div)
        elif ns.subcommand == "mun":
            if ns.n < 1:
                raise ParseError("n must be >= 1", str(ns.n), 0)
            report = cmd_mun(ns.ring, ns.D, ns.n)
        elif ns.subcommand == "curve":
            report = cmd_curve(ns.ring, ns.E, ns.p)
        else:
            report = cmd_pair(ns.ring, ns.E, ns.x, ns.y)
    except LogflatError as exc:
        err = {
            "schema_version": SCHEMA_VERSION,
            "error": type(exc).__name__,
            "message": str(exc),
        }
        print(json.dumps(err), file=sys.stdout)
        if ns.pretty:
            print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    print(json.dumps(report))
    if ns.pretty:
        _render_pretty(report, sys.stderr)
    if any(chk["verdict"] != "ok" for chk in report["checks"]):
        return 5
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
