"""Command-line entry point: ``subgraph-polytopes <command> ...``.

Every command writes a JSON document (or CSV / OFF / graph6 where asked)
and exits with 0 when all checked instances pass, 1 on a violation and 2
on bad input.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from datetime import datetime, timezone
from fractions import Fraction
from importlib import metadata
from pathlib import Path

from . import polytope as polymod
from .certificates import certify_nonneg, parse_polynomial
from .exceptions import CapacityError, DegenerateError, HypothesisError, PatternParseError
from .geometry.io import dumps, polytope_to_dict, to_off
from .graphs import DENSITY, KINDS, GraphVector
from .limits import (
    TailSpec,
    chop_analysis,
    check_limit_inclusions,
    check_tail_cyclic,
    conjecture_gap,
    nested_volumes,
)
from .polytope import (
    build_polytope,
    check_ehrhart_scaling,
    check_inclusion_chain,
    check_nonneg_facets,
    report,
)
from .spine import SpineSpec, check_spine_containment, volume_oracles
from .zonotope import (
    StepKernel,
    check_zonotope_in_polytope,
    full_dimensional_witness,
    p_eval,
    zonotope_hull_volume,
    zonotope_sample,
)

CHECKS = ("inclusion", "ehrhart", "nonneg-facets", "spine", "zonotope", "limits", "tail-cyclic", "volume-oracles")


def tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def manifest(args: argparse.Namespace, inputs: list | None = None) -> dict:
    """Run manifest; the timestamp is included only on request so reports stay reproducible."""
    params = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in ("func", "timestamp", "output", "off", "threads", "quiet") and v is not None
    }
    doc = {
        "command": params.pop("command", None),
        "parameters": params,
        "seed": getattr(args, "seed", None),
        "tool_version": tool_version(),
        "input_hashes": {str(p): _sha256(p) for p in (inputs or [])},
    }
    if getattr(args, "timestamp", False):
        doc["timestamp"] = datetime.now(timezone.utc).isoformat()
    return doc


def _emit(args, text: str) -> None:
    out = getattr(args, "output", None)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_report(args, rep: dict, inputs: list | None = None) -> int:
    doc = {"manifest": manifest(args, inputs), "report": rep}
    _emit(args, dumps(doc))
    return 0 if rep.get("status") == "pass" else 1


# commands ---------------------------------------------------------------------


def cmd_polytope(args) -> int:
    fs = GraphVector.parse(args.F)
    poly = build_polytope(fs, args.n, args.kind)
    if poly.dim <= 3:
        poly.facets()
    summary = poly.summary()
    if args.format == "graph6":
        lines = []
        for i, v in enumerate(poly.vertices):
            for w in poly.witnesses(i):
                lines.append(f"{w} {' '.join(str(x) for x in v)}")
        _emit(args, "\n".join(lines) + "\n")
    else:
        doc = polytope_to_dict(poly.hull, {"vector": str(fs), "n": args.n, "kind": args.kind})
        if args.output:
            Path(args.output).write_text(dumps(doc))
        else:
            sys.stdout.write(dumps(doc))
    off_path = args.off
    if off_path is None and args.output and poly.dim == 3 and args.format == "json":
        off_path = str(Path(args.output).with_suffix(".off"))
    if off_path and poly.dim == 3:
        Path(off_path).write_text(to_off(poly.hull))
    if args.output:
        print(json.dumps(summary, sort_keys=True))
    return 0


def cmd_check(args) -> int:
    name = args.check
    inputs = []
    if name == "inclusion":
        rep = check_inclusion_chain(GraphVector.parse(args.F), args.n_max)
    elif name == "ehrhart":
        fs = GraphVector.parse(args.F)
        n_mid = args.n_mid if args.n_mid is not None else args.n
        rep = check_ehrhart_scaling(fs, args.n, n_mid, args.n2)
    elif name == "nonneg-facets":
        rep = check_nonneg_facets(GraphVector.parse(args.F), args.n)
    elif name == "spine":
        rep = check_spine_containment(GraphVector.parse(args.F), args.n, args.grid)
    elif name == "zonotope":
        fs = GraphVector.parse(args.F)
        instances, certs = [], []
        for size in args.kernel_size:
            r = check_zonotope_in_polytope(fs, size, args.n, args.count, args.seed)
            instances += r["instances"]
            certs += r["certificates"]
        w = full_dimensional_witness(fs, 2, args.count, args.seed)
        instances.append(w)
        rep = report("curvy zonotope points lie in P_{F;n}; samples are full dimensional", instances, certs)
    elif name == "limits":
        rep = check_limit_inclusions(GraphVector.parse(args.F), args.n_max, args.K)
    elif name == "tail-cyclic":
        rep = check_tail_cyclic(TailSpec.parse(args.spec), range(1, args.k_max + 1))
    elif name == "volume-oracles":
        specs = [SpineSpec.parse(args.spec)] if args.spec else _all_specs(args.max_dim, args.max_entry)
        rows = []
        for spec in specs:
            row = volume_oracles(spec, args.gale_n, quadrature=True)
            row["ok"] = (
                row["gale_below_closed_form"]
                and row["gale_gap_estimate"] <= row["gale_bound_estimate"]
                and row.get("quadrature_gap_estimate", 0.0) <= 1e-9
            )
            rows.append(row)
        rep = report("Gale sum, Pfaffian product and quadrature agree", rows)
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown check {name!r}")
    return _emit_report(args, rep, inputs)


def _all_specs(max_dim: int, max_entry: int) -> list[SpineSpec]:
    from itertools import combinations

    out = []
    for d in range(1, max_dim + 1):
        for combo in combinations(range(max_entry, 0, -1), d):
            out.append(SpineSpec(combo))
    return out


def cmd_certify(args) -> int:
    q = parse_polynomial(args.polynomial)
    poly = build_polytope(GraphVector.parse(args.F), args.n, DENSITY)
    cert = certify_nonneg(q, poly, args.grid)
    doc = {"manifest": manifest(args), "certificate": cert.to_dict()}
    _emit(args, dumps(doc))
    return 0 if cert.certified else 1


def cmd_spine_volume(args) -> int:
    specs = [SpineSpec.parse(s) for s in args.spec] if args.spec else _all_specs(args.max_dim, args.max_entry)
    rows = [volume_oracles(s, args.gale_n, quadrature=not args.no_quadrature) for s in specs]
    if args.format == "csv":
        keys = sorted({k for r in rows for k in r})
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        _emit(args, buf.getvalue())
    else:
        _emit(args, dumps({"manifest": manifest(args), "rows": rows}))
    return 0


def cmd_zonotope(args) -> int:
    fs = GraphVector.parse(args.F)
    inputs = []
    if args.kernel:
        inputs.append(args.kernel)
        kern = StepKernel.read(args.kernel)
        vals = [p_eval(f, kern) for f in fs]
        doc = {"manifest": manifest(args, inputs), "kernel": kern.to_dict(), "point": [f"{v.numerator}/{v.denominator}" for v in vals]}
        _emit(args, dumps(doc))
        return 0
    if args.hull_volume:
        res = zonotope_hull_volume(fs, args.kernel_size, args.count, args.seed, host_n=args.host_n)
        _emit(args, dumps({"manifest": manifest(args), "result": res}))
        return 0
    sample = zonotope_sample(fs, args.kernel_size, args.count, args.seed)
    if args.format == "csv":
        _emit(args, sample.to_csv())
    else:
        doc = {
            "manifest": manifest(args),
            "vector": str(fs),
            "kernel_size": args.kernel_size,
            "points": [[f"{x.numerator}/{x.denominator}" for x in p] for p in sample.points],
            "kernels": [k.to_dict() for k in sample.kernels],
            "witness": full_dimensional_witness(fs, args.kernel_size, args.count, args.seed),
        }
        _emit(args, dumps(doc))
    return 0


def cmd_limits(args) -> int:
    inputs = []
    cfg = {}
    if args.config:
        inputs.append(args.config)
        cfg = json.loads(Path(args.config).read_text())
    spec_text = cfg.get("spec", args.spec)
    if spec_text is None and "vector" in cfg:
        spec = TailSpec.of(GraphVector.parse(cfg["vector"]))
    else:
        spec = TailSpec.parse(str(spec_text) if not isinstance(spec_text, list) else ",".join(map(str, spec_text)))
    hosts = cfg.get("host_sizes", [args.host_n])
    K = int(cfg.get("K", args.K))
    samples = int(cfg.get("samples", args.samples))
    seed = int(cfg.get("seed", args.seed))
    kernel_sizes = tuple(cfg.get("kernel_sizes", (2, 3, 4)))
    instances, flagged = [], []
    for h in hosts:
        r = conjecture_gap(spec, int(h), K, samples, seed, kernel_sizes)
        instances += r["instances"]
        flagged += r["certificates"]
    rep = report("conv(1, tail points) against finite polytopes and graphon samples", instances, flagged)
    if spec.orders == (2, 3) and args.chop:
        rep["chop"] = chop_analysis([Fraction(d) for d in args.chop])
    if spec.dim <= 3:
        rep["nested_volumes"] = nested_volumes(spec.vector(), max(int(h) for h in hosts))["instances"][0]
    return _emit_report(args, rep, inputs)


def cmd_export(args) -> int:
    fs = GraphVector.parse(args.F)
    poly = build_polytope(fs, args.n, args.kind)
    if args.format == "off":
        _emit(args, to_off(poly.hull))
    elif args.format == "graph6":
        lines = [w for i in range(len(poly.vertices)) for w in poly.witnesses(i)]
        _emit(args, "\n".join(lines) + "\n")
    elif args.format == "csv":
        lines = ["index," + ",".join(fs.labels())]
        lines += [f"{i}," + ",".join(f"{x.numerator}/{x.denominator}" for x in v) for i, v in enumerate(poly.vertices)]
        _emit(args, "\n".join(lines) + "\n")
    else:
        if poly.dim <= 3:
            poly.facets()
        _emit(args, dumps(polytope_to_dict(poly.hull, {"vector": str(fs), "n": args.n, "kind": args.kind})))
    return 0


# parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="subgraph-polytopes", description="Polytopes from subgraph statistics.")
    p.add_argument("--threads", type=int, default=None, help="data-parallel width (default: all cores)")
    p.add_argument("--timestamp", action="store_true", help="record the wall-clock time in the manifest")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=False):
        sp.add_argument("-o", "--output", help="write to this file instead of standard output")
        if seed:
            sp.add_argument("--seed", type=int, default=0, help="master seed")

    sp = sub.add_parser("polytope", help="build P_{F;n} from all labeled graphs")
    sp.add_argument("-F", required=True, help="pattern vector, e.g. K3,C4,K4-e")
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--kind", choices=KINDS, default=DENSITY)
    sp.add_argument("--format", choices=("json", "graph6"), default="json")
    sp.add_argument("--off", help="OFF mesh path (3D only; defaults next to --output)")
    common(sp)
    sp.set_defaults(func=cmd_polytope)

    sp = sub.add_parser("check", help="run one of the consistency checks")
    sp.add_argument("check", choices=CHECKS)
    sp.add_argument("-F", default="K3,C4,K4-e")
    sp.add_argument("-n", "--n", type=int, default=6)
    sp.add_argument("--n2", type=int, default=5, help="larger host size for the Ehrhart comparison")
    sp.add_argument("--n-mid", type=int, default=None)
    sp.add_argument("--n-max", type=int, default=7)
    sp.add_argument("--grid", type=int, default=100)
    sp.add_argument("--kernel-size", type=int, nargs="+", default=[2, 3])
    sp.add_argument("--count", type=int, default=200)
    sp.add_argument("-K", type=int, default=10)
    sp.add_argument("--spec", default=None, help="exponents (volume-oracles) or clique orders (tail-cyclic)")
    sp.add_argument("--k-max", type=int, default=7)
    sp.add_argument("--gale-n", type=int, default=2000)
    sp.add_argument("--max-dim", type=int, default=5)
    sp.add_argument("--max-entry", type=int, default=6)
    common(sp, seed=True)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("certify", help="certify 1 + sum c_i x^e_i >= 0 on [0,1] from a polytope")
    sp.add_argument("polynomial")
    sp.add_argument("-F", required=True)
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--grid", type=int, default=1000, help="grid for the refutation search")
    common(sp)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("spine-volume", help="spine hull volume: Gale sum, product formula, quadrature")
    sp.add_argument("--spec", nargs="*", help="exponent lists such as 5,4,3 (default: all with d<=5, entries<=6)")
    sp.add_argument("--gale-n", type=int, default=2000)
    sp.add_argument("--max-dim", type=int, default=5)
    sp.add_argument("--max-entry", type=int, default=6)
    sp.add_argument("--no-quadrature", action="store_true")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    common(sp)
    sp.set_defaults(func=cmd_spine_volume)

    sp = sub.add_parser("zonotope", help="sample curvy-zonotope points or evaluate a kernel")
    sp.add_argument("-F", required=True)
    sp.add_argument("--kernel-size", type=int, default=2)
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--kernel", help="kernel JSON file to evaluate instead of sampling")
    sp.add_argument("--hull-volume", action="store_true", help="report the volume of the sample hull")
    sp.add_argument("--host-n", type=int, default=None)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    common(sp, seed=True)
    sp.set_defaults(func=cmd_zonotope)

    sp = sub.add_parser("limits", help="limit-object harness for clique vectors")
    sp.add_argument("--config", help="JSON {spec|vector, host_sizes, K, kernel_sizes, samples, seed}")
    sp.add_argument("--spec", default="2,3", help="clique orders")
    sp.add_argument("--host-n", type=int, default=7)
    sp.add_argument("-K", type=int, default=7)
    sp.add_argument("--samples", type=int, default=0)
    sp.add_argument("--chop", nargs="*", help="chop depths for the edge-triangle body")
    common(sp, seed=True)
    sp.set_defaults(func=cmd_limits)

    sp = sub.add_parser("export", help="export a polytope as JSON, OFF, CSV or graph6 witnesses")
    sp.add_argument("-F", required=True)
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--kind", choices=KINDS, default=DENSITY)
    sp.add_argument("--format", choices=("json", "off", "csv", "graph6"), default="json")
    common(sp)
    sp.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    polymod.set_threads(args.threads if args.threads else (os.cpu_count() or 1))
    try:
        return args.func(args)
    except PatternParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
    except (HypothesisError, DegenerateError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
