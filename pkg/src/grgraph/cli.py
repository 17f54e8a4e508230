"""Command line front end: ring-info, build, params, classify, verify, census.

Exit codes: 0 success, 1 usage or input error, 2 budget exceeded,
3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import galois_ring as gr
from .errors import (
    BudgetExceeded,
    FallbackExhausted,
    GRGraphError,
    InternalWitnessFailure,
    InvariantViolation,
)
from .orthograph import (
    build_graph,
    degree,
    edge_list_header,
    formula_vertex_count,
    omega_sizes_formula,
    write_edge_list,
    write_vertex_table,
)
from .parameters import DEFAULT_SEED, PAIR_BUDGET, empirical_params, formula_block, proposition_count_check
from .ring_linalg import FormSpace, make_space, parse_vector, render_entry, render_vector
from .suborbits import classify, coincidence_check, label_key, move_to_e1, orbit_census

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_VERIFY = 0, 1, 2, 3

DESK_SPACES = [
    (3, 2, 1, 1, 0, "1"),
    (3, 2, 1, 1, 1, "1"),
    (3, 2, 1, 1, 1, "z"),
    (3, 2, 1, 1, 2, "1"),
    (3, 2, 1, 2, 0, "1"),
    (3, 2, 1, 2, 1, "1"),
    (3, 2, 1, 2, 1, "z"),
    (3, 2, 1, 2, 2, "1"),
    (5, 2, 1, 1, 1, "1"),
    (3, 2, 2, 1, 1, "1"),
]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class CliConfig:
    command: str
    p: int | None = None
    s: int | None = None
    m: int | None = None
    h: tuple[int, ...] | None = None
    nu: int | None = None
    delta: int | None = None
    variant: str = "1"
    out: str | None = None
    format: str = "edges"
    budget: int = gr.DEFAULT_BUDGET
    pair_budget: int = PAIR_BUDGET
    seed: int = DEFAULT_SEED
    jobs: int = 1

    def ring(self) -> gr.GaloisRing:
        return gr.make_ring(self.p, self.s, self.m, self.h)

    def space(self) -> FormSpace:
        if self.nu is None or self.delta is None:
            raise UsageError("--nu and --delta are required")
        if self.nu < 1 or self.delta not in (0, 1, 2):
            raise UsageError("need nu >= 1 and delta in {0, 1, 2}")
        return make_space(self.ring(), self.nu, self.delta, self.variant)


def _default_budget() -> int:
    env = os.environ.get("OG_BUDGET")
    if env is None:
        return gr.DEFAULT_BUDGET
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"OG_BUDGET={env!r} is not an integer")


def _parse_h(text: str | None, m: int | None) -> tuple[int, ...] | None:
    if text is None:
        return None
    try:
        coeffs = [int(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"malformed --h {text!r}")
    if m is not None and len(coeffs) == m:
        coeffs.append(1)
    return tuple(coeffs)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="grgraph", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def ring_flags(sp, required=True):
        sp.add_argument("--p", type=int, required=required)
        sp.add_argument("--s", type=int, required=required)
        sp.add_argument("--m", type=int, required=required)
        sp.add_argument("--h", help='modulus coefficients "c0,c1,...", least degree first')
        sp.add_argument("--budget", type=int, default=None)
        sp.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--out")

    def space_flags(sp, required=True):
        sp.add_argument("--nu", type=int, required=required)
        sp.add_argument("--delta", type=int, required=required)
        sp.add_argument("--variant", choices=("1", "z"), default="1")
        sp.add_argument("--pair-budget", type=int, default=PAIR_BUDGET)

    sp = sub.add_parser("ring-info", help="ring facts: xi, z, unit count, digits")
    ring_flags(sp)
    sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = sub.add_parser("build", help="write edge list / vertex table")
    ring_flags(sp)
    space_flags(sp)
    sp.add_argument("--format", choices=("edges", "vertices", "json"), default="edges")

    sp = sub.add_parser("params", help="formula vs empirical parameters as JSON")
    ring_flags(sp)
    space_flags(sp)
    sp.add_argument("--formula-only", action="store_true")

    sp = sub.add_parser("classify", help="label and witness for one vertex")
    ring_flags(sp)
    space_flags(sp)
    sp.add_argument("--vertex", required=True)

    sp = sub.add_parser("verify", help="run certified suites")
    ring_flags(sp)
    space_flags(sp)
    sp.add_argument("--suborbits", action="store_true")
    sp.add_argument("--proposition", action="store_true")
    sp.add_argument("--all", action="store_true")

    sp = sub.add_parser("census", help="reports over a list of spaces")
    sp.add_argument(
        "--spaces",
        help='";"-separated "p,s,m,nu,delta[,variant]" entries (default: desk set)',
    )
    sp.add_argument("--budget", type=int, default=None)
    sp.add_argument("--pair-budget", type=int, default=PAIR_BUDGET)
    sp.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--out", help="directory for one JSON report per space")
    sp.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def _config(args: argparse.Namespace) -> CliConfig:
    budget = args.budget if args.budget is not None else _default_budget()
    if budget <= 0:
        raise UsageError("--budget must be positive")
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    m = getattr(args, "m", None)
    return CliConfig(
        command=args.command,
        p=getattr(args, "p", None),
        s=getattr(args, "s", None),
        m=m,
        h=_parse_h(getattr(args, "h", None), m),
        nu=getattr(args, "nu", None),
        delta=getattr(args, "delta", None),
        variant=getattr(args, "variant", "1"),
        out=args.out,
        format=getattr(args, "format", "edges"),
        budget=budget,
        pair_budget=getattr(args, "pair_budget", PAIR_BUDGET),
        seed=args.seed,
        jobs=args.jobs,
    )


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


# -- commands ---------------------------------------------------------------------


def ring_info(ring: gr.GaloisRing) -> dict:
    xi = ring.teich.xi
    z = gr.nonsquare_z(ring)
    samples = {}
    for code in range(min(ring.size, 8)):
        a = ring.elem(code)
        samples[render_entry(ring, code)] = [render_entry(ring, d.code) for d in gr.padic_digits(a)]
    return {
        "ring": str(ring),
        "p": ring.p,
        "s": ring.s,
        "m": ring.m,
        "h": list(ring.h),
        "size": ring.size,
        "xi": ring.render(xi.code),
        "z": ring.render(z.code),
        "units": ring.unit_count,
        "residue_field": ring.residue_size,
        "digits": samples,
    }


def cmd_ring_info(cfg: CliConfig) -> int:
    info = ring_info(cfg.ring())
    if cfg.format == "json":
        _emit(json.dumps(info, indent=2, sort_keys=True), cfg.out)
        return EXIT_OK
    lines = [
        info["ring"],
        f"xi={info['xi']}",
        f"z={info['z']}",
        f"units={info['units']}",
        f"residue_field={info['residue_field']}",
    ]
    lines += [f"digits({a}) = {' '.join(d)}" for a, d in info["digits"].items()]
    _emit("\n".join(lines), cfg.out)
    return EXIT_OK


def cmd_build(cfg: CliConfig) -> int:
    space = cfg.space()
    g = build_graph(space, cfg.budget)
    if cfg.format == "json":
        doc = {
            "header": edge_list_header(g),
            "n": g.n,
            "k": degree(g, 0) if g.n else 0,
            "vertices": [render_vector(space.ring, row) for row in g.coords],
            "edges": [list(e) for e in g.edges()],
        }
        _emit(json.dumps(doc, sort_keys=True), cfg.out)
        return EXIT_OK
    write = write_edge_list if cfg.format == "edges" else write_vertex_table
    if cfg.out:
        with open(cfg.out, "w") as fh:
            write(g, fh)
    else:
        write(g, sys.stdout)
    return EXIT_OK


def cmd_params(cfg: CliConfig, formula_only: bool) -> int:
    space = cfg.space()
    if formula_only:
        _emit(json.dumps(formula_block(space), indent=2, sort_keys=True), cfg.out)
        return EXIT_OK
    g = build_graph(space, cfg.budget)
    rep = empirical_params(g, cfg.pair_budget, cfg.seed, cfg.jobs)
    _emit(rep.dumps(), cfg.out)
    return EXIT_OK if rep.all_match else EXIT_VERIFY


def cmd_classify(cfg: CliConfig, vertex: str) -> int:
    space = cfg.space()
    try:
        v = parse_vector(space.ring, vertex)
    except (ValueError, GRGraphError) as exc:
        raise UsageError(f"cannot parse vertex {vertex!r}: {exc}")
    if len(v) != space.dim:
        raise UsageError(f"vertex needs {space.dim} coordinates, got {len(v)}")
    label, w = classify(space, v)
    doc = {"label": str(label), "witness": w.to_json(space)}
    _emit(json.dumps(doc, indent=2, sort_keys=True), cfg.out)
    return EXIT_OK


def _check(results: dict, name: str, fn) -> None:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
        results[name] = {"status": "pass" if ok else "fail", "detail": detail}
    except BudgetExceeded as exc:
        results[name] = {"status": "skipped", "detail": f"budget: {exc}"}
    except (InternalWitnessFailure, InvariantViolation, FallbackExhausted) as exc:
        results[name] = {"status": "fail", "detail": f"{type(exc).__name__}: {exc}"}
    results[name]["seconds"] = round(time.perf_counter() - t0, 3)


def verify_space(cfg: CliConfig, suborbits: bool, proposition: bool, params: bool) -> dict:
    space = cfg.space()
    ring = space.ring
    results: dict[str, dict] = {}
    graph_cache = {}

    def graph():
        if "g" not in graph_cache:
            graph_cache["g"] = build_graph(space, cfg.budget)
        return graph_cache["g"]

    if proposition:
        def prop():
            obs, exp = proposition_count_check(ring, cfg.budget)
            return obs == exp, {"observed": obs, "expected": exp}

        _check(results, "proposition", prop)

    if params or suborbits:
        def counts():
            g = graph()
            degs = sorted(set(g.degrees().tolist()))
            n_ok = g.n == formula_vertex_count(space)
            omega_ok = list(g.omega_sizes) == omega_sizes_formula(space)
            return n_ok and omega_ok, {"n": g.n, "degrees": degs, "omega_sizes": list(g.omega_sizes)}

        _check(results, "vertex_count", counts)

    if params:
        def par():
            rep = empirical_params(graph(), cfg.pair_budget, cfg.seed, cfg.jobs)
            return rep.all_match, rep.to_json()

        _check(results, "parameters", par)

    if suborbits:
        def transitivity():
            g = graph()
            for row in g.coords:
                move_to_e1(space, row)
            return True, {"certified": g.n}

        def census():
            c = orbit_census(space, graph())
            return True, {str(k): v for k, v in c.items()}

        _check(results, "move_to_e1", transitivity)
        _check(results, "census", census)
        if (space.nu, space.delta) == (1, 2):
            def coincidence():
                found = coincidence_check(space)
                return True, [f"{a} -> {b}" for a, b, _ in found] or "-1 is a square"

            _check(results, "coincidence", coincidence)
    return {"space": space.describe(), "checks": results}


def cmd_verify(cfg: CliConfig, args: argparse.Namespace) -> int:
    everything = args.all or not (args.suborbits or args.proposition)
    doc = verify_space(
        cfg,
        suborbits=args.suborbits or everything,
        proposition=args.proposition or everything,
        params=everything,
    )
    statuses = [c["status"] for c in doc["checks"].values()]
    doc["partial"] = "skipped" in statuses
    _emit(json.dumps(doc, indent=2, sort_keys=True, default=str), cfg.out)
    if "fail" in statuses:
        return EXIT_VERIFY
    if statuses and all(s == "skipped" for s in statuses):
        return EXIT_BUDGET
    return EXIT_OK


def parse_spaces(text: str | None) -> list[tuple[int, int, int, int, int, str]]:
    if text is None:
        return list(DESK_SPACES)
    out = []
    for entry in text.replace("\n", ";").split(";"):
        entry = entry.strip()
        if not entry:
            continue
        parts = [t.strip() for t in entry.split(",")]
        if len(parts) not in (5, 6):
            raise UsageError(f"space {entry!r} needs p,s,m,nu,delta[,variant]")
        try:
            p, s, m, nu, delta = (int(t) for t in parts[:5])
        except ValueError:
            raise UsageError(f"space {entry!r} has a non-integer field")
        variant = parts[5] if len(parts) == 6 else "1"
        if variant not in ("1", "z"):
            raise UsageError(f"variant must be 1 or z in {entry!r}")
        if delta != 1:
            variant = "1"
        key = (p, s, m, nu, delta, variant)
        if key not in out:
            out.append(key)
    if not out:
        raise UsageError("empty space list")
    return out


def census_report(space: FormSpace, budget: int, pair_budget: int, seed: int, jobs: int) -> dict:
    g = build_graph(space, budget)
    rep = empirical_params(g, pair_budget, seed, jobs)
    labels = orbit_census(space, g)
    doc = rep.to_json()
    doc["census"] = {str(k): v for k, v in sorted(labels.items(), key=lambda kv: label_key(kv[0]))}
    return doc


def cmd_census(cfg: CliConfig, spaces_text: str | None) -> int:
    spaces = parse_spaces(spaces_text)
    reports = []
    for p, s, m, nu, delta, variant in spaces:
        space = make_space(gr.make_ring(p, s, m), nu, delta, variant)
        reports.append(census_report(space, cfg.budget, cfg.pair_budget, cfg.seed, cfg.jobs))
    if cfg.out:
        outdir = Path(cfg.out)
        outdir.mkdir(parents=True, exist_ok=True)
        for key, doc in zip(spaces, reports):
            name = "_".join(str(x) for x in key) + ".json"
            (outdir / name).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    if cfg.format == "json":
        print(json.dumps(reports, indent=2, sort_keys=True))
    else:
        print(f"{'space':<22}{'n':>7}{'k':>7}  {'adjacent':<10}{'non-adjacent':<16}{'labels':>7}  ok")
        for key, doc in zip(spaces, reports):
            emp = doc["empirical"]
            ok = all(doc["matches"].values())
            print(
                f"{','.join(str(x) for x in key):<22}{emp['n']:>7}{doc['formula']['k']:>7}  "
                f"{str(emp['adjacent_values']):<10}{str(emp['nonadjacent_values']):<16}"
                f"{len(doc['census']):>7}  {'yes' if ok else 'NO'}"
            )
    return EXIT_OK if all(all(d["matches"].values()) for d in reports) else EXIT_VERIFY


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = _config(args)
    if cfg.command == "ring-info":
        return cmd_ring_info(cfg)
    if cfg.command == "build":
        return cmd_build(cfg)
    if cfg.command == "params":
        return cmd_params(cfg, args.formula_only)
    if cfg.command == "classify":
        return cmd_classify(cfg, args.vertex)
    if cfg.command == "verify":
        return cmd_verify(cfg, args)
    return cmd_census(cfg, args.spaces)


def main(argv: list[str] | None = None) -> int:
    try:
        return run(argv)
    except UsageError as exc:
        print(f"grgraph: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"grgraph: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InternalWitnessFailure, InvariantViolation, FallbackExhausted) as exc:
        print(f"grgraph: verification failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except GRGraphError as exc:
        print(f"grgraph: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
