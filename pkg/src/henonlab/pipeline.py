"""End-to-end equidistribution experiment.

census over periods -> classification -> selector measures -> line
sampler reference -> convergence report, tangency statistic and a
Lyapunov summary, all persisted as canonical JSON under a directory
named by the config hash.  A rerun with the same config is bit
identical: every stochastic choice derives from the config seed and no
output embeds wall-clock state.
"""

from __future__ import annotations

import csv
import io
import json
import traceback
from pathlib import Path

from . import __version__
from .census import census
from .config import ExperimentConfig, canonical_json
from .errors import NonCertifying
from .lyapunov import finite_time_exponents
from .maps import evaluate
from .measures import EmpiricalMeasure, convergence_report, from_census, noise_floor
from .sampler import random_line, sample_mu
from .escape import filtration_radius
from .spectral import classify_records, tangency_statistic
from .census import Classification, newton_orbit_refine


def _record_to_dict(rec) -> dict:
    out = {
        "point": [rec.point[0].real, rec.point[0].imag,
                  rec.point[1].real, rec.point[1].imag],
        "n": rec.n,
        "exact_period": rec.exact_period,
        "residual": rec.residual,
        "multiplicity_flag": rec.multiplicity_flag,
    }
    if rec.eigen_log_moduli is not None:
        out["eigen_log_moduli"] = list(rec.eigen_log_moduli)
        out["eigen_args"] = list(rec.eigen_args)
        out["classification"] = rec.classification.value
        out["dist_to_one"] = rec.dist_to_one
        out["angle_us"] = rec.angle_us
    elif rec.classification is not None:
        out["classification"] = rec.classification.value
    return out


def record_from_dict(obj: dict):
    from .census import PeriodicRecord

    cls = obj.get("classification")
    return PeriodicRecord(
        point=(complex(obj["point"][0], obj["point"][1]),
               complex(obj["point"][2], obj["point"][3])),
        n=obj["n"],
        exact_period=obj["exact_period"],
        residual=obj["residual"],
        multiplicity_flag=obj.get("multiplicity_flag", False),
        eigen_log_moduli=tuple(obj["eigen_log_moduli"]) if "eigen_log_moduli" in obj else None,
        eigen_args=tuple(obj["eigen_args"]) if "eigen_args" in obj else None,
        classification=Classification(cls) if cls else None,
        dist_to_one=obj.get("dist_to_one"),
        angle_us=obj.get("angle_us"),
    )


def census_payload(cfg_hash: str, hmap_dict: dict, n: int, records, diagnostics) -> dict:
    return {
        "config_hash": cfg_hash,
        "version": __version__,
        "map": hmap_dict,
        "period": n,
        "records": [_record_to_dict(r) for r in records],
        "diagnostics": diagnostics,
    }


def report_csv(entries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "raw_mass", "moment_dist", "sw1", "sw1_successive"])
    for e in entries:
        w.writerow([e["n"], repr(e["raw_mass"]), repr(e["moment_dist"]),
                    repr(e["sw1_ref"]),
                    "" if e["sw1_successive"] is None else repr(e["sw1_successive"])])
    return buf.getvalue()


def run_equidistribution_experiment(cfg: ExperimentConfig, threads: int = 1) -> dict:
    """Run the full pipeline; returns a manifest with paths and status."""
    h = cfg.hash()
    outdir = Path(cfg.output_dir) / h
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "effective_config.json").write_text(canonical_json(cfg.effective))
    manifest = {"config_hash": h, "version": __version__, "files": {}, "status": "ok"}
    hmap = cfg.hmap
    hmap_dict = cfg.effective["map"]

    def save(name: str, payload: dict) -> None:
        (outdir / name).write_text(canonical_json(payload))
        manifest["files"][name] = name

    try:
        classified = {}
        for n in cfg.periods:
            seeds = cfg.budgets["seeds_per_point"] * hmap.d ** n
            res = census(hmap, n, seeds, cfg.rng_seed, tol=cfg.tolerances["census"],
                         threads=threads)
            recs = classify_records(hmap, res.records, cfg.eps)
            classified[n] = recs
            save(f"census_n{n}.json",
                 census_payload(h, hmap_dict, n, recs, res.diagnostics))

        series = []
        masses = {}
        for n in cfg.periods:
            m = from_census(classified[n], "SP_n_eps", n, hmap.d)
            series.append((n, m))
            masses[n] = {sel: from_census(classified[n], sel, n, hmap.d)
                         .provenance["raw_mass"]
                         for sel in ("P_n", "SP_n", "SP_n_eps")}

        lplus = random_line(cfg.rng_seed * 2 + 1, scale=filtration_radius(hmap))
        lminus = random_line(cfg.rng_seed * 2 + 2, scale=filtration_radius(hmap))
        reference = sample_mu(hmap, cfg.sampler_n, (lplus, lminus),
                              cfg.budgets["root_budget"], cfg.rng_seed,
                              green_tol=cfg.tolerances["sample_green"])
        save("mu_reference.json",
             {"config_hash": h, "version": __version__, **reference.to_dict()})
        deficit_frac = (reference.provenance["root_deficit"]
                        / reference.provenance["expected_roots"])

        report = convergence_report(series, reference, cfg.budgets["moments"],
                                    cfg.budgets["slices"], cfg.rng_seed)
        report["raw_masses"] = {str(n): masses[n] for n in cfg.periods}
        report["tangency"] = {
            str(n): {
                "count_near_tangent": tangency_statistic(classified[n], cfg.eta, hmap.d)
                .count_near_tangent,
                "fraction": tangency_statistic(classified[n], cfg.eta, hmap.d).fraction,
            }
            for n in cfg.periods
        }
        report["sampler_root_deficit_fraction"] = deficit_frac

        lyap = _lyapunov_summary(hmap, classified[max(cfg.periods)],
                                 cfg.budgets["horizon"])
        report["lyapunov"] = lyap
        save("report.json", {"config_hash": h, "version": __version__, **report})
        (outdir / "report.csv").write_text(report_csv(report["entries"]))
        manifest["files"]["report.csv"] = "report.csv"

        if deficit_frac > 0.05:
            manifest["status"] = "non-certifying"
        save("manifest.json", manifest)
        if manifest["status"] == "non-certifying":
            raise NonCertifying(
                f"sampler root deficit {deficit_frac:.1%} exceeds 5%")
        return manifest
    except NonCertifying:
        raise
    except Exception as exc:
        failure = {"config_hash": h, "version": __version__,
                   "error": repr(exc), "trace": traceback.format_exc()}
        (outdir / "failure_manifest.json").write_text(canonical_json(failure))
        raise


def _lyapunov_summary(hmap, records, horizon: int) -> dict:
    """Exponents at the saddle census points, cycling each verified orbit."""
    l1s = []
    l2s = []
    sum_err = 0.0
    import math

    logdet = math.log(abs(hmap.jac_det))
    for rec in records:
        if rec.classification not in (Classification.SADDLE, Classification.SADDLE_EPS):
            continue
        orbit = [rec.point]
        cur = rec.point
        for _ in range(rec.n - 1):
            cur = evaluate(hmap, cur)
            orbit.append(cur)
        ref = newton_orbit_refine(hmap, tuple(orbit))
        est = finite_time_exponents(hmap, ref.orbit[0], horizon, cycle=ref.orbit)
        l1s.append(est.lambda1)
        l2s.append(est.lambda2)
        sum_err = max(sum_err, abs(est.lambda1 + est.lambda2 - logdet))
    if not l1s:
        return {"count": 0}
    return {
        "count": len(l1s),
        "lambda1_mean": sum(l1s) / len(l1s),
        "lambda2_mean": sum(l2s) / len(l2s),
        "lambda1_min": min(l1s),
        "lambda2_max": max(l2s),
        "max_sum_law_error": sum_err,
        "horizon": horizon,
    }
