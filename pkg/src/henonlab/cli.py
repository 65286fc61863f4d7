"""Command line interface.

Subcommands: census, classify, sample-mu, green, lyapunov, equidist,
run (full pipeline), fixtures (pathological graph ratios).  Exit codes:
0 success, 2 config error, 3 numerical non-certification, 4 internal
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .census import census
from .config import canonical_json, parse_config
from .errors import ConfigError, HenonLabError, NonCertifying
from .escape import green
from .lyapunov import finite_time_exponents
from .maps import parse_map_json
from .measures import EmpiricalMeasure, convergence_report, pathological_graph_mass_ratio
from .pipeline import (census_payload, record_from_dict, report_csv,
                       run_equidistribution_experiment)
from .sampler import random_line, sample_mu
from .escape import filtration_radius
from .spectral import classify_records
from .errors import OrbitEscaped


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def _write(path: str, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text)


def _load_points(path: str):
    obj = json.loads(_read(path))
    if isinstance(obj, dict):
        obj = obj.get("points")
    if not isinstance(obj, list):
        raise ConfigError("points file must be a list (or {'points': [...]}) "
                          "of [xr, xi, yr, yi] rows")
    return [(complex(p[0], p[1]), complex(p[2], p[3])) for p in obj]


def cmd_census(args) -> int:
    hmap = parse_map_json(_read(args.map))
    res = census(hmap, args.period, args.seeds, args.rng_seed, tol=args.tol,
                 threads=args.threads)
    payload = census_payload("", json.loads(_read(args.map)), args.period,
                             res.records, res.diagnostics)
    del payload["config_hash"]
    _write(args.out, canonical_json(payload))
    return 0


def cmd_classify(args) -> int:
    obj = json.loads(_read(args.infile))
    from .maps import map_from_dict

    hmap = map_from_dict(obj["map"])
    records = [record_from_dict(r) for r in obj["records"]]
    recs = classify_records(hmap, records, args.eps)
    from .spectral import tangency_statistic

    stats = tangency_statistic(recs, args.eta, hmap.d)
    obj["records"] = [r for r in map(_rec_dict, recs)]
    obj["eps"] = args.eps
    obj["eta"] = args.eta
    obj["tangency"] = {"count_near_tangent": stats.count_near_tangent,
                       "fraction": stats.fraction}
    _write(args.out, canonical_json(obj))
    return 0


def _rec_dict(rec):
    from .pipeline import _record_to_dict

    return _record_to_dict(rec)


def cmd_sample_mu(args) -> int:
    hmap = parse_map_json(_read(args.map))
    scale = filtration_radius(hmap)
    lplus = random_line(args.rng_seed * 2 + 1, scale)
    lminus = random_line(args.rng_seed * 2 + 2, scale)
    import warnings as _w

    with _w.catch_warnings():
        _w.simplefilter("ignore")
        m = sample_mu(hmap, args.n, (lplus, lminus), args.budget, args.rng_seed)
    _write(args.out, canonical_json(m.to_dict()))
    deficit = m.provenance["root_deficit"] / m.provenance["expected_roots"]
    if deficit > 0.05:
        print(f"root deficit {deficit:.1%} exceeds 5%: non-certifying",
              file=sys.stderr)
        return 3
    return 0


def cmd_green(args) -> int:
    hmap = parse_map_json(_read(args.map))
    records = []
    for z in _load_points(args.points):
        gv = green(hmap, z, args.direction, tol=args.tol)
        records.append({"value": gv.value, "depth": gv.depth,
                        "error_bound": gv.error_bound})
    _write(args.out, "\n".join(json.dumps(r, sort_keys=True) for r in records) + "\n")
    return 0


def cmd_lyapunov(args) -> int:
    hmap = parse_map_json(_read(args.map))
    out = []
    for z in _load_points(args.points):
        try:
            est = finite_time_exponents(hmap, z, args.horizon)
            out.append({"start": [z[0].real, z[0].imag, z[1].real, z[1].imag],
                        "lambda1": est.lambda1, "lambda2": est.lambda2,
                        "horizon": est.horizon})
        except OrbitEscaped as exc:
            out.append({"start": [z[0].real, z[0].imag, z[1].real, z[1].imag],
                        "error": "orbit_escaped", "escaped_at": exc.escaped_at})
    _write(args.out, canonical_json({"records": out}))
    return 0


def cmd_equidist(args) -> int:
    series = []
    for path in args.series.split(","):
        m = EmpiricalMeasure.from_dict(json.loads(_read(path)))
        n = m.provenance.get("n", len(series) + 1)
        series.append((int(n), m))
    reference = EmpiricalMeasure.from_dict(json.loads(_read(args.reference)))
    rep = convergence_report(series, reference, args.moments, args.slices,
                             args.rng_seed)
    _write(args.out, canonical_json(rep))
    csv_path = str(Path(args.out).with_suffix(".csv"))
    _write(csv_path, report_csv(rep["entries"]))
    return 0


def cmd_run(args) -> int:
    cfg = parse_config(_read(args.config))
    if args.out:
        cfg = parse_config(canonical_json({**cfg.effective, "output_dir": args.out}))
    import warnings as _w

    with _w.catch_warnings():
        _w.simplefilter("ignore")
        manifest = run_equidistribution_experiment(cfg, threads=args.threads)
    print(json.dumps(manifest, sort_keys=True))
    return 0


def cmd_fixtures(args) -> int:
    powers = [int(p) for p in args.d_powers.split(",")]
    ratios = {str(p): pathological_graph_mass_ratio(p, args.delta) for p in powers}
    _write(args.out, canonical_json({"delta": args.delta, "ratios": ratios}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="henonlab",
                                 description="numerical laboratory for complex "
                                             "Henon automorphisms of C^2")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("--rng-seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out", required=True)

    p = sub.add_parser("census", help="enumerate solutions of f^n(z) = z")
    p.add_argument("--map", required=True)
    p.add_argument("--period", type=int, required=True)
    p.add_argument("--seeds", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    common(p)
    p.set_defaults(fn=cmd_census)

    p = sub.add_parser("classify", help="fill spectral data and classes on a census")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--eta", type=float, default=0.05)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("sample-mu", help="sample the equilibrium measure by "
                                         "line intersections")
    p.add_argument("--map", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--budget", type=int, required=True)
    common(p)
    p.set_defaults(fn=cmd_sample_mu)

    p = sub.add_parser("green", help="escape-rate Green function values")
    p.add_argument("--map", required=True)
    p.add_argument("--points", required=True)
    p.add_argument("--direction", choices=["plus", "minus"], default="plus")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_green)

    p = sub.add_parser("lyapunov", help="finite-time exponents along orbits")
    p.add_argument("--map", required=True)
    p.add_argument("--points", required=True)
    p.add_argument("--horizon", type=int, default=200)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_lyapunov)

    p = sub.add_parser("equidist", help="measure-distance report for a series")
    p.add_argument("--series", required=True, help="comma-separated measure files")
    p.add_argument("--reference", required=True)
    p.add_argument("--moments", type=int, default=3)
    p.add_argument("--slices", type=int, default=64)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_equidist)

    p = sub.add_parser("run", help="full equidistribution pipeline from a config")
    p.add_argument("--config", required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None, help="override output_dir")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("fixtures", help="pathological graph mass ratios")
    p.add_argument("--d-powers", default="2,4,16,256,65536")
    p.add_argument("--delta", type=float, default=0.2)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_fixtures)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NonCertifying as exc:
        print(f"non-certifying: {exc}", file=sys.stderr)
        return 3
    except HenonLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
