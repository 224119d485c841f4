"""Command line interface: ``gausspaths <command> [options]``.

Exit codes: 0 on success, 1 when a computation would exceed its budget,
2 for invalid configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import defaultdict
from pathlib import Path

import numpy as np

from . import __version__
from .arith import EpsilonSignature, enumerate_family, eps_signature
from .atlas import DEFAULT_TOL, atlas, gsharp_grid, local_slope_probe
from .emit import fmt, write_json, write_path, write_text
from .expsums import BudgetExceeded, cusp_constants, find_cusp_points
from .moments import MomentOrder, empirical_moment, limit_moment
from .paths import family_grids, path_grid
from .random_model import estimate_deviation_prob, sample_limit_path, sample_multiplicative


class ConfigError(ValueError):
    pass


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(float(x)) for x in text.split(",") if x.strip()]


def _signature(args, required: bool = True) -> EpsilonSignature | None:
    if getattr(args, "signature_file", None):
        return EpsilonSignature.from_json(Path(args.signature_file).read_text())
    if getattr(args, "eps", None):
        return EpsilonSignature.from_list(_ints(args.eps))
    if required:
        raise ConfigError("a signature is required (--signature-file or --eps)")
    return None


def _add_signature(p: argparse.ArgumentParser) -> None:
    p.add_argument("--signature-file", help='JSON file {"Z": 5, "eps": {"2": 1, "3": 1, "5": -1}}')
    p.add_argument("--eps", help="comma separated eps_p for the primes 2, 3, 5, ... in order")


# ---------------------------------------------------------------- commands


def cmd_path(args, out: Path) -> dict:
    sample = path_grid(args.c, args.grid)
    csv_path, svg_path = write_path(out, f"path_c{args.c}", sample)
    return {"files": [csv_path.name, svg_path.name]}


def cmd_atlas(args, out: Path) -> dict:
    index = []
    for sig, sample in atlas(args.Z, args.grid, args.tolerance):
        stem = sig.label()
        write_path(out, stem, sample)
        index.append(
            {
                "signature": {str(p): e for p, e in sig.values},
                "stem": stem,
                "cutoff": sample.meta["cutoff"],
                "terms": sample.meta["terms"],
                "tail_bound": sample.meta["tail_bound"],
            }
        )
    write_json(out / "atlas_index.json", {"Z": args.Z, "grid": args.grid, "tolerance": args.tolerance, "shapes": index})
    return {"shapes": len(index)}


def cmd_cusp(args, out: Path) -> dict:
    sig = _signature(args)
    reports = []
    if args.q is not None:
        targets = [(args.q, [args.a] if args.a is not None else range(1, args.q))]
    else:
        targets = [(q, range(1, q)) for q, _ in find_cusp_points(sig, args.qmax)]
    for q, avals in targets:
        for a in avals:
            reports.append(cusp_constants(a, q, sig).to_dict())
    write_json(out / "cusps.json", reports)
    return {"reports": len(reports)}


def cmd_probe(args, out: Path) -> dict:
    sig = _signature(args)
    offsets = _floats(args.offsets)
    quot = local_slope_probe(sig, args.a, args.q, offsets, args.tolerance)
    lines = ["offset,quotient_re,quotient_im"]
    lines += [f"{fmt(h)},{fmt(z.real)},{fmt(z.imag)}" for h, z in zip(offsets, quot)]
    name = f"probe_q{args.q}_a{args.a}.csv"
    write_text(out / name, "\n".join(lines) + "\n")
    return {"files": [name]}


def cmd_moments(args, out: Path) -> dict:
    sig = _signature(args, required=False)
    order = MomentOrder(tuple(_floats(args.t)), tuple(_ints(args.m)), tuple(_ints(args.n)))
    lim = limit_moment(order, args.Hmax, sig, args.budget)
    lines = ["Q,re_emp,im_emp,re_lim,im_lim,abs_diff"]
    for Q in _ints(args.Q):
        emp = empirical_moment(order, Q, sig)
        lines.append(
            ",".join(fmt(x) for x in (Q, emp.real, emp.imag, lim.value.real, lim.value.imag, abs(emp - lim.value)))
        )
    write_text(out / "moments.csv", "\n".join(lines) + "\n")
    return {"limit_error_bound": lim.error_bound, "terms": lim.terms, "Hmax": lim.Hmax}


def cmd_sample(args, out: Path) -> dict:
    sig = _signature(args, required=False)
    if args.delta is not None:
        if sig is None:
            raise ConfigError("the deviation estimate needs a signature")
        rep = estimate_deviation_prob(sig, args.delta, args.trials, args.N, args.grid, args.seed, args.tolerance)
        write_json(out / "deviation.json", rep.to_dict())
        return {"estimate": rep.estimate, "stderr": rep.stderr}
    sample = sample_multiplicative(args.N + 1, sig, args.seed)
    path = sample_limit_path(sample, args.N, args.grid)
    stem = f"sample_seed{args.seed}"
    write_path(out, stem, path)
    return {"files": [stem + ".csv", stem + ".svg"]}


def cmd_classify(args, out: Path) -> dict:
    cs = enumerate_family(args.Q)
    groups: dict[EpsilonSignature, list[int]] = defaultdict(list)
    for c in cs:
        groups[eps_signature(int(c), args.Z)].append(int(c))
    lines = ["signature,count,mean_sup_distance"]
    for sig in sorted(groups, key=lambda s: s.eps):
        members = np.array(groups[sig], dtype=np.int64)
        target = gsharp_grid(sig, args.grid, args.tolerance).values
        grids = family_grids(members, args.grid)
        dist = np.max(np.abs(grids - target[None, :]), axis=1)
        lines.append(f"{sig.label()},{members.size},{fmt(dist.mean())}")
    write_text(out / "classify.csv", "\n".join(lines) + "\n")
    return {"groups": len(groups), "moduli": int(cs.size)}


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gausspaths", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--output-dir", default="out")
        p.set_defaults(func=func)
        return p

    p = add("path", cmd_path, "sample the polygonal path of one modulus")
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--grid", type=int, default=1024)

    p = add("atlas", cmd_atlas, "limit path for every signature at level Z")
    p.add_argument("--Z", type=int, required=True)
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOL)

    p = add("cusp", cmd_cusp, "local constants at candidate cusp points")
    _add_signature(p)
    p.add_argument("--qmax", type=int, default=100)
    p.add_argument("--q", type=int)
    p.add_argument("--a", type=int)

    p = add("probe", cmd_probe, "one-sided difference quotients of the limit path")
    _add_signature(p)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--offsets", default="1e-4,-1e-4,1e-6,-1e-6,1e-8,-1e-8")
    p.add_argument("--tolerance", type=float, default=1e-7)

    p = add("moments", cmd_moments, "empirical moments against their limits")
    _add_signature(p)
    p.add_argument("--t", default="0.5")
    p.add_argument("--m", default="0")
    p.add_argument("--n", default="1")
    p.add_argument("--Q", default="1000,10000")
    p.add_argument("--Hmax", type=int)
    p.add_argument("--budget", type=int, default=100_000_000)

    p = add("sample", cmd_sample, "random model: one path, or a deviation estimate with --delta")
    _add_signature(p)
    p.add_argument("--N", type=int, default=100_000)
    p.add_argument("--grid", type=int, default=1024)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta", type=float)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOL)

    p = add("classify", cmd_classify, "group the family by signature and measure distances")
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--Z", type=int, default=5)
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOL)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Path(args.output_dir)
    config = {k: v for k, v in vars(args).items() if k != "func"}
    try:
        summary = args.func(args, out)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    write_json(out / "run_manifest.json", {"version": __version__, "config": config, "summary": summary})
    return 0


if __name__ == "__main__":
    sys.exit(main())
