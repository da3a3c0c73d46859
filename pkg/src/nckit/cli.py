"""Command-line access to the toolkit.

Subcommands map one-to-one onto the library surface: `validate`, `edmonds`,
`det` and `paths` inspect a network, `min-field` and `solve` construct
schemes, `bounds`, `exact` and `simulate` quantify random coding.  Every
command accepts either a path to a fixture file or the name of a bundled
one, renders deterministically, and exits 0 on success, 1 on domain errors
and 2 on usage errors.

Probabilities print as truncated 3-place decimals next to their exact
fractions; `--json` swaps the tables for one machine-readable object per
run that always carries the same top-level keys.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable

from nckit.det import det_bareiss, enumerate_path_systems, path_system_to_monomial
from nckit.errors import NckitError
from nckit.fieldsize import (
    DEFAULT_TERM_CAP,
    _prime_power,
    find_coding_scheme,
    min_field_size,
)
from nckit.gf import FieldSpec, field
from nckit.network import (
    Network,
    VariableRegistry,
    available_fixtures,
    build_edmonds,
    load_fixture,
    min_cut,
    parse_network,
)
from nckit.poly import Monomial, MonomialOrder, render_poly
from nckit.prob import (
    ORDER_SEARCH_LIMIT,
    Fixing,
    all_random_fixing,
    bound_report,
    default_fixing,
    exact_probability,
    monte_carlo,
    parse_fixing,
)

Namer = Callable[[int], str]


def dec3(value: Fraction) -> str:
    """Truncated 3-place decimal, the rendering used by the report tables."""
    n, d = value.numerator, value.denominator
    sign = "-" if n < 0 else ""
    scaled = abs(n) * 1000 // d
    return f"{sign}{scaled // 1000}.{scaled % 1000:03d}"


def _frac(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _frac_json(value: Fraction | None) -> dict | None:
    if value is None:
        return None
    return {
        "num": value.numerator,
        "den": value.denominator,
        "decimal": dec3(value),
    }


def _field_name(spec: FieldSpec) -> str:
    return f"GF({spec.p}^{spec.k})" if spec.k > 1 else f"GF({spec.p})"


def load_network(ref: str) -> Network:
    path = Path(ref)
    if path.is_file():
        return parse_network(path.read_text())
    name = ref[:-3] if ref.endswith(".nc") else ref
    if name in available_fixtures():
        return load_fixture(name)
    raise NckitError(f"no such file or bundled fixture: {ref}")


def parse_field_arg(text: str) -> FieldSpec:
    """Field orders arrive as plain integers or in p^k form."""
    try:
        if "^" in text:
            base, _, exp = text.partition("^")
            p, k = int(base), int(exp)
        else:
            p, k = _prime_power(int(text))
    except ValueError:
        raise NckitError(f"cannot read field order {text!r}; use q or p^k") from None
    return field(p, k)


def alias_namer(net: Network, registry: VariableRegistry) -> Namer:
    letters = {registry.id_of(key): name for name, key in net.aliases.items()}
    return lambda v: letters.get(v, registry.name_of(v))


def render_monomial(mono: Monomial, namer: Namer) -> str:
    if not mono.exps:
        return "1"
    return "*".join(
        namer(v) + (f"^{e}" if e > 1 else "") for v, e in mono.exps
    )


def resolve_fixing(net: Network, registry: VariableRegistry, arg: str) -> Fixing:
    if arg == "default":
        return default_fixing(net, registry)
    if arg == "none":
        return all_random_fixing(registry)
    path = Path(arg)
    if not path.is_file():
        raise NckitError(
            f"--fix expects 'default', 'none' or a fixing file; {arg!r} is none of those"
        )
    return parse_fixing(net, registry, path.read_text())


def resolve_order(
    text: str, net: Network, registry: VariableRegistry, fixing: Fixing
) -> MonomialOrder:
    if text in ("grlex", "grevlex"):
        return MonomialOrder(text, fixing.random_vars)
    if not text.startswith("lex:"):
        raise NckitError(
            "--order must be grlex, grevlex, or lex:<comma-separated names, "
            "least significant first>"
        )
    by_name = {registry.name_of(v): v for v in registry.af_ids()}
    for name, key in net.aliases.items():
        by_name[name] = registry.id_of(key)
    ids = []
    for token in text[4:].split(","):
        token = token.strip()
        if token not in by_name:
            raise NckitError(f"unknown coefficient name {token!r} in --order")
        ids.append(by_name[token])
    if sorted(ids) != sorted(fixing.random_vars):
        raise NckitError(
            "--order must list every random coefficient exactly once; "
            f"the current fixing has {fixing.mu} of them"
        )
    return MonomialOrder("lex", tuple(ids))


def render_order(order: MonomialOrder, namer: Namer) -> str:
    if order.kind != "lex":
        return order.kind
    return "lex:" + ",".join(namer(v) for v in order.priority)


def _report_skeleton(**filled) -> dict:
    report = {
        "q": None,
        "mu": None,
        "eta": None,
        "bound_lm": None,
        "bound_support_min": None,
        "bound_ho": None,
        "exact": None,
        "estimate": None,
        "stderr": None,
        "seed": None,
    }
    report.update(filled)
    return report


def _emit_json(obj: dict) -> None:
    print(json.dumps(obj, indent=2))


def _field_header(net: Network, spec: FieldSpec) -> dict:
    return {
        "network": net.name,
        "q": spec.order,
        "p": spec.p,
        "k": spec.k,
        "modulus": list(spec.modulus),
    }


def _eta(registry: VariableRegistry, fixing: Fixing) -> int:
    return len({registry.key_of(v)[2] for v in fixing.random_vars})


def cmd_validate(args: argparse.Namespace) -> int:
    net = load_network(args.network)
    cuts = {t: min_cut(net, t) for t in net.sinks}
    if args.json:
        _emit_json(
            {
                "network": net.name,
                "nodes": len(net.nodes),
                "edges": len(net.edges),
                "symbols": net.h,
                "sinks": {t: c for t, c in cuts.items()},
                "deficient": [t for t, c in cuts.items() if c < net.h],
            }
        )
        return 0
    print(
        f"network {net.name}: {len(net.nodes)} nodes, {len(net.edges)} edges, "
        f"{net.h} symbols, {len(net.sinks)} sinks"
    )
    for t, c in cuts.items():
        note = "" if c >= net.h else f"  (below the {net.h} symbols; infeasible)"
        print(f"sink {t}: min-cut {c}{note}")
    print("ok")
    return 0


def _selected_sinks(net: Network, sink: str | None) -> list[str]:
    if sink is None:
        return list(net.sinks)
    if sink not in net.sinks:
        raise NckitError(f"{sink!r} is not a sink of {net.name}")
    return [sink]


def cmd_edmonds(args: argparse.Namespace) -> int:
    net = load_network(args.network)
    registry = VariableRegistry(net)
    spec = parse_field_arg(args.q)
    namer = alias_namer(net, registry)
    out = []
    for t in _selected_sinks(net, args.sink):
        m = build_edmonds(net, t, registry, spec)
        cells = [
            [
                "." if m.entry(r, c) is None else render_poly(m.entry(r, c), namer)
                for c in range(m.cols)
            ]
            for r in range(m.rows)
        ]
        if args.json:
            out.append(
                {
                    "sink": t,
                    "rows": m.rows,
                    "cols": m.cols,
                    "entries": [
                        {"row": r, "col": c, "poly": render_poly(p, namer)}
                        for (r, c), p in sorted(m.entries.items())
                    ],
                }
            )
            continue
        widths = [
            max(len(cells[r][c]) for r in range(m.rows)) for c in range(m.cols)
        ]
        print(f"sink {t}: {m.rows} x {m.cols} over {_field_name(spec)}")
        for row in cells:
            print("  " + "  ".join(s.rjust(w) for s, w in zip(row, widths)))
    if args.json:
        _emit_json({"network": net.name, "matrices": out})
    return 0


def cmd_det(args: argparse.Namespace) -> int:
    net = load_network(args.network)
    registry = VariableRegistry(net)
    spec = parse_field_arg(args.q)
    namer = alias_namer(net, registry)
    out = []
    for t in _selected_sinks(net, args.sink):
        d = det_bareiss(build_edmonds(net, t, registry, spec))
        rendered = render_poly(d, namer) if args.print_poly else None
        if args.json:
            out.append({"sink": t, "terms": len(d.terms), "poly": rendered})
            continue
        print(f"sink {t}: determinant has {len(d.terms)} terms")
        if rendered is not None:
            print(f"  {rendered}")
    if args.json:
        _emit_json({"network": net.name, "determinants": out})
    return 0


def cmd_paths(args: argparse.Namespace) -> int:
    net = load_network(args.network)
    registry = VariableRegistry(net)
    namer = alias_namer(net, registry)
    out = []
    for t in _selected_sinks(net, args.sink):
        systems = enumerate_path_systems(net, t)
        if args.json:
            out.append(
                {
                    "sink": t,
                    "systems": [
                        {
                            "paths": [
                                {"symbol": u, "edges": list(es), "decoded_as": w}
                                for u, es, w in ps.paths
                            ],
                            "monomial": render_monomial(
                                path_system_to_monomial(ps, registry), namer
                            ),
                        }
                        for ps in systems
                    ],
                }
            )
            continue
        print(f"sink {t}: {len(systems)} path systems")
        for ps in systems:
            legs = []
            for u, es, w in ps.paths:
                hops = " -> ".join(str(e) for e in es)
                tag = f"symbol {u}" if u == w else f"symbol {u} as {w}"
                legs.append(f"{tag}: {hops}")
            mono = render_monomial(path_system_to_monomial(ps, registry), namer)
            print("  " + " | ".join(legs) + f" ({mono})")
    if args.json:
        _emit_json({"network": net.name, "sinks": out})
    return 0


def cmd_min_field(args: argparse.Namespace) -> int:
    net = load_network(args.network)
    registry = VariableRegistry(net)
    namer = alias_namer(net, registry)
    cap = args.max_terms if args.max_terms is not None else DEFAULT_TERM_CAP
    res = min_field_size(net, args.char, max_terms=cap)
    mono, coeff = res.certificate
    cert = render_monomial(mono, namer)
    if coeff != 1:
        cert = f"{coeff}*{cert}"
    if args.json:
        _emit_json(
            {
                "network": net.name,
                "char": args.char,
                "trials": [{"q": q, "feasible": ok} for q, ok in res.trials],
                "q": res.q,
                "certificate": cert,
                "extra_trial": res.extra_trial,
            }
        )
        return 0
    print(f"network {net.name}, characteristic {args.char}")
    for q, ok in res.trials:
        print(f"trial q = {q}: {'feasible' if ok else 'infeasible'}")
    print(f"certificate: {cert}")
    print(f"q = {res.q}")
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    net = load_network(args.network)
    registry = VariableRegistry(net)
    spec = parse_field_arg(args.q)
    scheme = find_coding_scheme(net, spec.order, max_terms=args.max_terms or DEFAULT_TERM_CAP)
    coding = []
    decoding = []
    for vid in registry.af_ids():
        kind, i, j = registry.key_of(vid)
        coding.append((kind, i, j, scheme[vid].code))
    for vid in registry.b_ids():
        decoding.append((registry.name_of(vid), scheme[vid].code))
    if args.json:
        _emit_json(
            {
                "network": net.name,
                "q": spec.order,
                "fix": [
                    {"kind": k, "i": i, "j": j, "value": v}
                    for k, i, j, v in coding
                ],
                "decode": [{"name": n, "value": v} for n, v in decoding],
            }
        )
        return 0
    print(f"# scheme for {net.name} over {_field_name(spec)}")
    for kind, i, j, v in coding:
        print(f"fix {kind} {i} {j} {v}")
    print("# decoding matrices (informational; not fix syntax):")
    for name, v in decoding:
        print(f"# {name} = {v}")
    return 0


def _prob_setup(
    args: argparse.Namespace,
) -> tuple[Network, VariableRegistry, Fixing, FieldSpec]:
    net = load_network(args.network)
    registry = VariableRegistry(net)
    spec = parse_field_arg(args.q)
    fixing = resolve_fixing(net, registry, args.fix)
    return net, registry, fixing, spec


def cmd_bounds(args: argparse.Namespace) -> int:
    net, registry, fixing, spec = _prob_setup(args)
    namer = alias_namer(net, registry)
    order = (
        resolve_order(args.order, net, registry, fixing) if args.order else None
    )
    report = bound_report(
        net,
        registry,
        fixing,
        spec,
        order=order,
        search=args.search_orders,
        limit=ORDER_SEARCH_LIMIT,
    )
    if args.json:
        payload = _field_header(net, spec) | _report_skeleton(
            q=report.q,
            mu=report.mu,
            eta=report.eta,
            bound_lm=_frac_json(report.bound_lm),
            bound_support_min=_frac_json(report.bound_support_min),
            bound_ho=_frac_json(report.bound_ho),
        )
        payload["order"] = render_order(report.order, namer)
        if report.best is not None:
            value, best_order = report.best
            payload["best"] = _frac_json(value)
            payload["best_order"] = render_order(best_order, namer)
        _emit_json(payload)
        return 0
    print(f"network {net.name}, {_field_name(spec)}, q = {spec.order}")
    print(f"fixing {args.fix}: mu = {report.mu}, eta = {report.eta}")
    print(f"order {render_order(report.order, namer)}")
    rows = [
        ("bound_lm", report.bound_lm),
        ("bound_support_min", report.bound_support_min),
        ("bound_ho", report.bound_ho),
    ]
    for label, value in rows:
        if value is None:
            print(f"  {label:<18} n/a (needs q > {len(net.sinks)} sinks)")
        else:
            print(f"  {label:<18} {dec3(value)}  ({_frac(value)})")
    if report.best is not None:
        value, best_order = report.best
        print(
            f"  {'best_ordering':<18} {dec3(value)}  ({_frac(value)})"
            f"  via {render_order(best_order, namer)}"
        )
    return 0


def cmd_exact(args: argparse.Namespace) -> int:
    net, registry, fixing, spec = _prob_setup(args)
    res = exact_probability(net, registry, fixing, spec)
    if args.json:
        payload = _field_header(net, spec) | _report_skeleton(
            q=spec.order,
            mu=fixing.mu,
            eta=_eta(registry, fixing),
            exact=_frac_json(res.value),
        )
        payload["successes"] = res.successes
        payload["points"] = res.trials
        _emit_json(payload)
        return 0
    print(f"network {net.name}, {_field_name(spec)}, q = {spec.order}")
    print(f"fixing {args.fix}: mu = {fixing.mu}")
    print(
        f"exact = {dec3(res.value)}  ({_frac(res.value)})"
        f"  [{res.successes} of {res.trials} points]"
    )
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    net, registry, fixing, spec = _prob_setup(args)
    res = monte_carlo(
        net,
        registry,
        fixing,
        spec,
        trials=args.trials,
        seed=args.seed,
        trial_offset=args.trial_offset,
    )
    if args.json:
        payload = _field_header(net, spec) | _report_skeleton(
            q=spec.order,
            mu=fixing.mu,
            eta=_eta(registry, fixing),
            estimate=float(res.estimate),
            stderr=res.stderr,
            seed=res.seed,
        )
        payload["successes"] = res.successes
        payload["trials"] = res.trials
        _emit_json(payload)
        return 0
    print(f"network {net.name}, {_field_name(spec)}, q = {spec.order}")
    print(f"fixing {args.fix}: mu = {fixing.mu}")
    print(
        f"estimate = {float(res.estimate):.6f}, stderr = {res.stderr:.6f}"
        f"  [{res.successes} of {res.trials} trials, seed {args.seed}]"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nckit",
        description="linear network coding feasibility, field sizes and "
        "success probabilities on acyclic multicast networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument(
            "network", help="fixture file path or bundled fixture name"
        )
        p.add_argument(
            "--json", action="store_true", help="machine-readable output"
        )
        p.set_defaults(handler=handler)
        return p

    add("validate", cmd_validate, "parse a network and report its shape")

    p = add("edmonds", cmd_edmonds, "print the per-sink transfer matrices")
    p.add_argument("--sink", help="restrict to one sink")
    p.add_argument("--q", default="2", help="coefficient field (default 2)")

    p = add("det", cmd_det, "print transfer determinant sizes")
    p.add_argument("--sink", help="restrict to one sink")
    p.add_argument("--q", default="2", help="coefficient field (default 2)")
    p.add_argument(
        "--print-poly", action="store_true", help="render the full polynomial"
    )

    p = add("paths", cmd_paths, "enumerate disjoint path systems per sink")
    p.add_argument("--sink", help="restrict to one sink")

    p = add("min-field", cmd_min_field, "smallest usable field of a characteristic")
    p.add_argument("--char", type=int, required=True, help="field characteristic")
    p.add_argument("--max-terms", type=int, help="term cap for the product")

    p = add("solve", cmd_solve, "output an explicit scheme in fix syntax")
    p.add_argument("--q", required=True, help="field order, q or p^k")
    p.add_argument("--max-terms", type=int, help="term cap for the product")

    def add_prob(name, handler, help_text):
        p = add(name, handler, help_text)
        p.add_argument("--q", required=True, help="field order, q or p^k")
        p.add_argument(
            "--fix",
            default="default",
            help="'default', 'none', or a fixing file (default: default)",
        )
        return p

    p = add_prob("bounds", cmd_bounds, "success probability lower bounds")
    p.add_argument(
        "--order",
        help="monomial order: grlex, grevlex, or lex:<names least significant first>",
    )
    p.add_argument(
        "--search-orders",
        action="store_true",
        help="also search lex orders for the best leading-monomial bound",
    )

    add_prob("exact", cmd_exact, "exact success probability by enumeration")

    p = add_prob("simulate", cmd_simulate, "Monte Carlo success estimate")
    p.add_argument("--trials", type=int, required=True, help="sample count")
    p.add_argument("--seed", type=int, required=True, help="generator seed")
    p.add_argument(
        "--trial-offset",
        type=int,
        default=0,
        help="start at this trial index (for sharding)",
    )

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except NckitError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
