"""Batch front door: parse a system (gallery name or JSON file), run the
requested detectors at a given resolution, and emit a machine-readable
report plus a human-readable summary.

Reports are JSON with sorted keys so identical analyses produce identical
bytes regardless of worker-thread count; wall-clock timings go to stdout
(and into the report only with --timing).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np

from . import __version__
from .detectors import (DEFAULT_RESOLUTION, NotApplicable, Resolution,
                        almost_periodic_verdict, cofinite_sensitivity_verdict,
                        max_cyclic_gap, minimality_verdict,
                        s_transitivity_verdict, sensitivity_estimate,
                        sensitivity_witness_from_nonminimality,
                        strong_transitivity_verdict,
                        topological_transitivity_verdict)
from .gallery import GALLERY_NAMES, UnknownExample, build_example
from .generators import (Expanding, Flip, Generator, NonInvertible, NorthSouth,
                         NotDifferentiable, PiecewiseLinear, Rotation,
                         fixed_points)
from .semigroup import IfsSystem, periodic_points
from .smooth import NotLocallyExpanding, expanding_verdict, local_expanding_cover

SCHEMA = "ifs-lab/1"

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_MALFORMED = 2
EXIT_UNSUPPORTED = 3


class MalformedInput(Exception):
    """Input file or flags failed validation; message carries the field."""


# ---------------------------------------------------------------------------
# system (de)serialization


def _as_real(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise MalformedInput(f"{where}: expected a number or decimal string")
    try:
        return float(value)
    except ValueError:
        raise MalformedInput(f"{where}: cannot parse {value!r} as a real number")


def _check_fields(cfg: dict, allowed: set, where: str) -> None:
    extra = set(cfg) - allowed
    if extra:
        raise MalformedInput(f"{where}: unknown fields {sorted(extra)}")


def generator_from_config(cfg: dict, where: str) -> Generator:
    if not isinstance(cfg, dict) or "type" not in cfg:
        raise MalformedInput(f"{where}: each generator needs a 'type' field")
    kind = cfg["type"]
    if kind == "rotation":
        _check_fields(cfg, {"type", "alpha"}, where)
        return Rotation(_as_real(cfg.get("alpha", 0.0), where + ".alpha"))
    if kind == "flip":
        _check_fields(cfg, {"type"}, where)
        return Flip()
    if kind == "north_south":
        _check_fields(cfg, {"type", "q", "lambda"}, where)
        if "lambda" not in cfg:
            raise MalformedInput(f"{where}: north_south needs 'lambda'")
        return NorthSouth(_as_real(cfg.get("q", 0.0), where + ".q"),
                          _as_real(cfg["lambda"], where + ".lambda"))
    if kind == "piecewise_linear":
        _check_fields(cfg, {"type", "breakpoints"}, where)
        bps = cfg.get("breakpoints")
        if not isinstance(bps, list) or len(bps) < 2:
            raise MalformedInput(f"{where}: breakpoints must be a list of [x, y] pairs")
        pairs = []
        for i, bp in enumerate(bps):
            if not isinstance(bp, (list, tuple)) or len(bp) != 2:
                raise MalformedInput(f"{where}.breakpoints[{i}]: expected [x, y]")
            pairs.append((_as_real(bp[0], f"{where}.breakpoints[{i}].x"),
                          _as_real(bp[1], f"{where}.breakpoints[{i}].y")))
        try:
            return PiecewiseLinear(tuple(pairs))
        except ValueError as exc:
            raise MalformedInput(f"{where}: {exc}")
    if kind == "expanding":
        _check_fields(cfg, {"type", "m"}, where)
        m = cfg.get("m")
        if not isinstance(m, int) or isinstance(m, bool):
            raise MalformedInput(f"{where}.m: expected an integer >= 2")
        try:
            return Expanding(m)
        except ValueError as exc:
            raise MalformedInput(f"{where}: {exc}")
    raise MalformedInput(f"{where}: unknown generator type {kind!r}")


def generator_to_config(g: Generator) -> dict:
    if isinstance(g, Rotation):
        return {"type": "rotation", "alpha": g.alpha}
    if isinstance(g, Flip):
        return {"type": "flip"}
    if isinstance(g, NorthSouth):
        return {"type": "north_south", "q": g.q, "lambda": g.lam}
    if isinstance(g, PiecewiseLinear):
        return {"type": "piecewise_linear",
                "breakpoints": [[x, y] for x, y in g.breakpoints]}
    if isinstance(g, Expanding):
        return {"type": "expanding", "m": g.m}
    raise TypeError(f"cannot serialize generator {g!r}")


def system_from_config(doc: dict, where: str = "system") -> IfsSystem:
    if not isinstance(doc, dict):
        raise MalformedInput(f"{where}: expected a JSON object")
    _check_fields(doc, {"schema", "generators"}, where)
    if "schema" in doc and doc["schema"] != SCHEMA:
        raise MalformedInput(f"{where}.schema: expected {SCHEMA!r}, got {doc['schema']!r}")
    gens = doc.get("generators")
    if not isinstance(gens, list) or not gens:
        raise MalformedInput(f"{where}.generators: expected a non-empty list")
    return IfsSystem(generator_from_config(cfg, f"{where}.generators[{i}]")
                     for i, cfg in enumerate(gens))


def load_system_file(path: str) -> IfsSystem:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}")
    return system_from_config(doc, where=path)


# ---------------------------------------------------------------------------
# property dispatch

PROPERTY_NAMES = (
    "minimality",
    "transitivity",
    "strong_transitivity",
    "s_transitivity",
    "sensitivity",
    "cofinite_sensitivity",
    "almost_periodic",
    "expanding",
    "local_expanding",
    "dense_periodic",
    "repelling_fixed_point",
    "witness_pipeline",
)


def evaluate_property(ifs: IfsSystem, prop: str, res: Resolution,
                      params: Optional[dict] = None) -> dict:
    """Run one detector and return its JSON-ready result."""
    params = params or {}
    if prop == "minimality":
        return minimality_verdict(ifs, res).to_dict()
    if prop == "transitivity":
        return topological_transitivity_verdict(ifs, res).to_dict()
    if prop == "strong_transitivity":
        return strong_transitivity_verdict(ifs, res).to_dict()
    if prop == "s_transitivity":
        return s_transitivity_verdict(ifs, res).to_dict()
    if prop == "sensitivity":
        report, verdict = sensitivity_estimate(ifs, res)
        out = verdict.to_dict()
        out["report"] = report.to_dict()
        return out
    if prop == "cofinite_sensitivity":
        delta = float(params.get("delta", 0.2))
        window = int(params.get("window", 100))
        return cofinite_sensitivity_verdict(ifs, delta, res, window).to_dict()
    if prop == "almost_periodic":
        x = float(params.get("x", 0.0))
        return almost_periodic_verdict(ifs, x, res).to_dict()
    if prop == "expanding":
        holds, eta = expanding_verdict(ifs, grid=max(res.net_size, 2))
        return {"property": "expanding", "holds": holds,
                "resolution": res.to_dict(),
                "witnesses": {"eta": eta}, "caveat": "checked on a finite grid"}
    if prop == "local_expanding":
        try:
            cover = local_expanding_cover(ifs, res)
            return {"property": "local_expanding", "holds": True,
                    "resolution": res.to_dict(),
                    "witnesses": cover.to_dict(), "caveat": ""}
        except NotLocallyExpanding as exc:
            return {"property": "local_expanding", "holds": False,
                    "resolution": res.to_dict(),
                    "witnesses": {"stuck_point": exc.point},
                    "caveat": "no expanding word found within bounds"}
    if prop == "dense_periodic":
        max_len = int(params.get("max_len", 2))
        pts = periodic_points(ifs, max_len)
        values = [p.value for p, _ in pts]
        gap, _mid = max_cyclic_gap(np.array(values)) if values else (1.0, 0.0)
        holds = bool(values) and gap <= 2.0 * res.eps
        example = [list(pts[0][1])] if pts else []
        return {"property": "dense_periodic", "holds": holds,
                "resolution": res.to_dict(),
                "witnesses": {"count": len(values), "max_gap": gap,
                              "max_word_length": max_len,
                              "example_words": example},
                "caveat": "density measured at resolution eps"}
    if prop == "repelling_fixed_point":
        for letter, g in enumerate(ifs.generators, start=1):
            for rec in fixed_points(g, identity_samples=16):
                if rec.classification == "repelling":
                    return {"property": "repelling_fixed_point", "holds": True,
                            "resolution": res.to_dict(),
                            "witnesses": {"generator": letter,
                                          "location": rec.location.value,
                                          "multipliers": list(rec.one_sided_multipliers)},
                            "caveat": ""}
        return {"property": "repelling_fixed_point", "holds": False,
                "resolution": res.to_dict(), "witnesses": {},
                "caveat": "no generator has a repelling fixed point"}
    if prop == "witness_pipeline":
        try:
            delta_candidate, verdict = sensitivity_witness_from_nonminimality(ifs, res)
            out = verdict.to_dict()
            out["delta_candidate"] = delta_candidate
            return out
        except NotApplicable as exc:
            return {"property": "sensitivity_witness_from_nonminimality",
                    "holds": False, "resolution": res.to_dict(),
                    "witnesses": {"not_applicable": True},
                    "caveat": str(exc)}
    raise MalformedInput(f"unknown property {prop!r}; choose from {PROPERTY_NAMES}")


# ---------------------------------------------------------------------------
# analyze / verify drivers


def _resolution_from_args(args) -> Resolution:
    res = DEFAULT_RESOLUTION
    overrides = {}
    for name, attr in (("eps", "eps"), ("r", "r"), ("depth", "depth"),
                       ("net", "net_size"), ("budget", "budget")):
        v = getattr(args, name, None)
        if v is not None:
            overrides[attr] = v
    return res.replaced(**overrides) if overrides else res


def _params_from_args(args) -> dict:
    params = {}
    for name in ("delta", "window", "x", "max_len"):
        v = getattr(args, name, None)
        if v is not None:
            params[name] = v
    return params


def run_analyze(ifs: IfsSystem, source: dict, props: List[str], res: Resolution,
                params: dict, threads: int = 1, include_timing: bool = False,
                out_path: Optional[str] = None, echo=print) -> dict:
    """Run the requested detectors and assemble the report document."""
    for p in props:
        if p not in PROPERTY_NAMES:
            raise MalformedInput(f"unknown property {p!r}; choose from {PROPERTY_NAMES}")

    def job(prop: str) -> Tuple[dict, float]:
        t0 = time.perf_counter()
        result = evaluate_property(ifs, prop, res, params)
        return result, time.perf_counter() - t0

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, props))
    else:
        results = [job(p) for p in props]

    report = {
        "schema": SCHEMA,
        "tool": {"name": "ifs-lab", "version": __version__},
        "source": source,
        "system": {"generators": [generator_to_config(g) for g in ifs.generators]},
        "resolution": res.to_dict(),
        "params": params,
        "properties": {p: r for p, (r, _) in zip(props, results)},
    }
    if include_timing:
        report["timing_s"] = {p: t for p, (_, t) in zip(props, results)}
    for p, (r, t) in zip(props, results):
        echo(f"  {p:<24s} holds={str(r['holds']):<5s}  [{t:.2f}s]")
    if out_path:
        write_report(report, out_path)
        echo(f"report written to {out_path}")
    return report


def write_report(report: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_report(report))


def render_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def run_verify(name: str, res: Resolution, threads: int = 1, echo=print) -> int:
    """Check a gallery entry's expected manifest; exit status semantics."""
    entry = build_example(name)
    echo(f"verify {name}: {entry.description}")

    def job(exp) -> Tuple[dict, float]:
        t0 = time.perf_counter()
        result = evaluate_property(entry.system, exp.name, res, exp.params)
        return result, time.perf_counter() - t0

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, entry.expected))
    else:
        results = [job(e) for e in entry.expected]

    failures = 0
    for exp, (result, t) in zip(entry.expected, results):
        ok = result["holds"] == exp.holds
        if not ok:
            failures += 1
        tag = "PASS" if ok else "FAIL"
        detail = f" params={exp.params}" if exp.params else ""
        echo(f"  {tag} {exp.name}{detail}: expected holds={exp.holds}, "
             f"got {result['holds']}  [{t:.2f}s]")
        if not ok:
            echo(f"       witnesses: {json.dumps(result['witnesses'], sort_keys=True)[:400]}")
    return EXIT_OK if failures == 0 else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ifs-lab",
        description="Analyze dynamical properties of circle-map iterated function systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--eps", type=float, help="density/covering tolerance")
        p.add_argument("--r", type=float, help="test-ball radius")
        p.add_argument("--depth", type=int, help="maximum word length")
        p.add_argument("--net", type=int, help="net size on the circle")
        p.add_argument("--budget", type=int, help="search budget per quantified instance")
        p.add_argument("--threads", type=int, default=1, help="worker threads")

    pa = sub.add_parser("analyze", help="run selected detectors on a system")
    src = pa.add_mutually_exclusive_group(required=True)
    src.add_argument("--gallery", choices=GALLERY_NAMES, help="named example system")
    src.add_argument("--system", metavar="PATH", help="JSON system definition file")
    pa.add_argument("--props", required=True,
                    help="comma-separated list from: " + ",".join(PROPERTY_NAMES))
    add_common(pa)
    pa.add_argument("--delta", type=float, help="separation threshold (cofinite sensitivity)")
    pa.add_argument("--window", type=int, help="separation window length")
    pa.add_argument("--x", type=float, help="base point (almost_periodic)")
    pa.add_argument("--max-len", dest="max_len", type=int,
                    help="maximum word length (dense_periodic)")
    pa.add_argument("--out", default="ifs_report.json", help="report output path")
    pa.add_argument("--timing", action="store_true",
                    help="include wall-clock timings in the report file")

    pv = sub.add_parser("verify", help="check a gallery entry's expected manifest")
    pv.add_argument("--gallery", required=True, help="gallery name")
    add_common(pv)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        res = _resolution_from_args(args)
        if args.command == "analyze":
            if args.gallery:
                ifs = build_example(args.gallery).system
                source = {"kind": "gallery", "name": args.gallery}
            else:
                ifs = load_system_file(args.system)
                source = {"kind": "file", "path": args.system}
            props = [p.strip() for p in args.props.split(",") if p.strip()]
            if not props:
                raise MalformedInput("--props must name at least one property")
            print(f"analyze {source}: props={','.join(props)}")
            run_analyze(ifs, source, props, res, _params_from_args(args),
                        threads=args.threads, include_timing=args.timing,
                        out_path=args.out)
            return EXIT_OK
        if args.command == "verify":
            if args.gallery not in GALLERY_NAMES:
                raise MalformedInput(
                    f"unknown gallery name {args.gallery!r}; choose from {GALLERY_NAMES}")
            return run_verify(args.gallery, res, threads=args.threads)
        raise MalformedInput(f"unknown command {args.command!r}")
    except (MalformedInput, UnknownExample, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except (NonInvertible, NotDifferentiable) as exc:
        print(f"unsupported for this system: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED


if __name__ == "__main__":
    sys.exit(main())
