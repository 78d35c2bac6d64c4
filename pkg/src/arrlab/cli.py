"""``arrlab`` command line interface."""

from __future__ import annotations

import argparse
import json
import sys


from . import cones as cn
from .arrangement import essentialize
from .errors import ArrangementError, BadSpec
from .generators import GeneratorSpec, generate
from .io import dump_arrangement, load_arrangement, load_cone, rational_str
from .lattice import build_lattice, characteristic_polynomial, region_count_check
from .verify import emit_report, verify_main_theorem
from .zonotope import angle_sums_dual, angle_sums_perles_shephard, f_vector_zaslavsky, vertex_lemma_check


def _load_target(target: str):
    if target.startswith("gen:"):
        spec = GeneratorSpec.parse(target)
        return generate(spec), str(spec)
    return load_arrangement(target), target


def analyze_dict(arr, zonotope: bool = False) -> dict:
    lat = build_lattice(arr)
    out = {
        "dim": arr.dimension,
        "rank": arr.rank,
        "regions": region_count_check(lat),
        "flats": [
            {"id": f.id, "hyperplanes": sorted(f.hyperplanes), "dim": f.dim, "mobius": lat.mu(f)}
            for f in lat.flats
        ],
        "covers": [list(c) for c in lat.covers()],
        "charpoly": characteristic_polynomial(lat).high_first(),
    }
    if zonotope:
        ess = essentialize(arr)
        lat_v = build_lattice(ess.arrangement)
        a0, mu = vertex_lemma_check(lat_v)
        out["zonotope"] = {
            "essentialized": ess.index_shift > 0,
            "f_vector": f_vector_zaslavsky(lat_v),
            "alpha_perles_shephard": [rational_str(a) for a in angle_sums_perles_shephard(lat_v)],
            "alpha_dual": [rational_str(a) for a in angle_sums_dual(lat_v)],
            "vertex_lemma": [rational_str(a0), rational_str(mu)],
        }
    return out


def analyze_text(info: dict) -> str:
    lines = [f"dim={info['dim']} rank={info['rank']} regions={info['regions']}", f"charpoly: {info['charpoly']}", ""]
    lines.append(f"{'id':>3}  {'hyperplanes':<16} {'dim':>3} {'mu':>5}")
    for f in info["flats"]:
        hs = "{" + ",".join(map(str, f["hyperplanes"])) + "}"
        lines.append(f"{f['id']:>3}  {hs:<16} {f['dim']:>3} {f['mobius']:>5}")
    z = info.get("zonotope")
    if z:
        lines += ["", f"{'k':>3} {'f_k':>6} {'alpha (PS)':>11} {'alpha (dual)':>13}"]
        for k, (f, a, b) in enumerate(zip(z["f_vector"], z["alpha_perles_shephard"], z["alpha_dual"])):
            lines.append(f"{k:>3} {f:>6} {a:>11} {b:>13}")
        lines.append(f"alpha_0 = {z['vertex_lemma'][0]}, |mu(0,1)| = {z['vertex_lemma'][1]}")
    return "\n".join(lines) + "\n"


def cmd_analyze(args) -> int:
    arr, _ = _load_target(args.file)
    info = analyze_dict(arr, args.zonotope)
    if args.format == "json":
        print(json.dumps(info, indent=2))
    else:
        sys.stdout.write(analyze_text(info))
    return 0


def cmd_verify(args) -> int:
    arr, name = _load_target(args.target)
    report = verify_main_theorem(
        arr,
        samples=args.samples,
        seed=args.seed,
        tol=args.tol,
        zmax=args.zmax,
        method=args.method,
        flats=args.flats,
        arrangement_id=name,
    )
    if args.out:
        emit_report(report, "json", args.out, timings=args.timings)
    sys.stdout.write(emit_report(report, "text"))
    return 0 if report.passed else 1


def cmd_gen(args) -> int:
    arr = generate(GeneratorSpec(args.family, tuple(args.params)))
    text = dump_arrangement(arr, args.out)
    if not args.out:
        sys.stdout.write(text)
    return 0


def _parse_point(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def cmd_project(args) -> int:
    cone = load_cone(args.cone)
    z = _parse_point(args.point)
    if len(z) != cone.dim:
        raise ArrangementError(f"point has {len(z)} coordinates, cone lives in R^{cone.dim}")
    res = cn.project_point(cone, z, args.tol)
    print(json.dumps({"point": res.point.tolist(), "tight_set": sorted(res.tight_set), "k": res.face_dim}))
    return 0


def cmd_estimate(args) -> int:
    cone = load_cone(args.cone)
    est = cn.estimate_volumes_mc(cone, args.samples, args.seed, tol=args.tol)
    print(json.dumps({"nu": est.nu, "stderr": est.stderr, "counts": est.counts, "samples": est.samples, "seed": est.seed}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arrlab", description="Central hyperplane arrangements: lattices, zonotope angles, projection volumes.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="intersection lattice, Moebius values, characteristic polynomial")
    a.add_argument("file", help="arrangement JSON or gen:SPEC")
    a.add_argument("--zonotope", action="store_true", help="add f-vector and angle sums")
    a.add_argument("--format", choices=("json", "text"), default="json")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="check summed projection volumes against |chi| coefficients")
    v.add_argument("target", help="arrangement JSON or gen:SPEC, e.g. gen:braid:3")
    v.add_argument("--samples", type=int, default=10**6, help="samples per region")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=cn.DEFAULT_TOL)
    v.add_argument("--zmax", type=float, default=4.0)
    v.add_argument("--method", choices=("auto", "exact", "mc"), default="auto")
    v.add_argument("--flats", action="store_true", help="also check the per-flat identity")
    v.add_argument("--timings", action="store_true", help="include wall-clock timings in the JSON")
    v.add_argument("--out", help="write the JSON report here")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gen", help="write a named arrangement as JSON")
    g.add_argument("family", choices=("boolean", "braid", "threelines", "random"))
    g.add_argument("params", type=int, nargs="*", help="boolean D | braid N | random M D SEED RANGE")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    pr = sub.add_parser("project", help="project a point onto a cone")
    pr.add_argument("--cone", required=True)
    pr.add_argument("--point", required=True, help="comma separated coordinates")
    pr.add_argument("--tol", type=float, default=cn.DEFAULT_TOL)
    pr.set_defaults(func=cmd_project)

    e = sub.add_parser("estimate", help="Monte Carlo projection volumes of a cone")
    e.add_argument("--cone", required=True)
    e.add_argument("--samples", type=int, default=10**6)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--tol", type=float, default=cn.DEFAULT_TOL)
    e.set_defaults(func=cmd_estimate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ArrangementError, BadSpec, OSError, json.JSONDecodeError) as exc:
        print(f"arrlab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
