"""Scenario dispatch and report emission."""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import distrib as ds
from . import forces as fm
from . import smallalg as sa
from .config import ClosureConfig, ScenarioConfig, build_cloud, build_forces
from .dynamics import (ClosureSpec, ClosureState, closure_integrate, energy_drift,
                       isotropic_solution, simulate_nbody)
from .histogram import histogram
from .pointsys import affine_fit, aggregates, energy_tensor_from_fit, rigid_fit
from .special import solve_bose_fermi

PRINTED_ROOTS = (-0.814651, 1.405050)


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""


@dataclass
class RunReport:
    mode: str
    checks: list = field(default_factory=list)
    files: list = field(default_factory=list)
    duration: float = 0.0
    results: dict = field(default_factory=dict)

    def check(self, name, value, tol, detail="", upper=True):
        value = float(value)
        ok = value < tol if upper else value >= tol
        self.checks.append(Check(name, bool(ok and math.isfinite(value)), value, tol, detail))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "passed": self.passed,
            "checks": [c.__dict__ for c in self.checks],
            "files": list(self.files),
            "duration_s": self.duration,
            "results": self.results,
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)  # minimal quoting per RFC 4180
        w.writerow(header)
        w.writerows(rows)


def emit_report(report: RunReport, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "report.json"
    report.files.append(str(path.name))
    write_json(path, report.to_dict())
    return path


def _fit_summary(fit, agg):
    d = {"kind": fit.kind, "H": fit.H, "H_star": fit.H_star,
         "energy": {"translational": fit.energy.translational, "entrainment": fit.energy.entrainment,
                    "agitation": fit.energy.agitation, "cross": fit.energy.cross, "kappa": agg.kappa}}
    if fit.q is not None:
        d["q"] = fit.q
        d["axis"] = fit.axis
    else:
        d["B"] = fit.B
    return d


def _run_fit(cfg, out, rep):
    cloud = build_cloud(cfg)
    agg = aggregates(cloud)
    G = cfg.fit.get("G")
    rigid, affine = rigid_fit(cloud), affine_fit(cloud, G)
    scale = max(agg.kappa, 1e-300)
    rep.check("affine_mixed_tensor", sa.rel_norm(affine.mixed, affine.H, agg.W), 1e-12)
    rep.check("affine_cross_term", abs(affine.energy.cross) / scale, 1e-12)
    rep.check("rigid_cross_term", abs(rigid.energy.cross) / scale, 1e-12)
    rep.check("energy_tensor", sa.rel_norm(energy_tensor_from_fit(agg, affine) - agg.W, agg.W), 1e-12)
    rep.check("energy_split_total", abs(affine.energy.total - agg.kappa) / scale, 1e-12)
    for fit in (rigid, affine):
        s = cloud.masses @ fit.spatial_shuffle_rates
        ref = cloud.masses @ np.abs(cloud.velocities)
        rep.check(f"{fit.kind}_shuffle_sum", sa.rel_norm(s, ref), 1e-12)
    summary = {"aggregates": {"mu": agg.mu, "x": agg.x, "v": agg.v, "Y": agg.Y, "J": agg.J, "k": agg.k,
                              "K": agg.K, "kappa": agg.kappa, "W": agg.W},
               "rigid": _fit_summary(rigid, agg), "affine": _fit_summary(affine, agg)}
    write_json(out / "fit.json", summary)
    rep.files.append("fit.json")
    rep.results = {"kappa": agg.kappa, "agitation_affine": affine.energy.agitation,
                   "agitation_rigid": rigid.energy.agitation}


def _run_simulate(cfg, out, rep):
    cloud = build_cloud(cfg)
    models = build_forces(cfg)
    it = cfg.integration
    rec = simulate_nbody(cloud, models, it.dt, it.steps, seed=cfg.seed, with_balances=True)
    rec.to_csv(out / "trajectory.csv")
    rep.files.append("trajectory.csv")
    rep.check("balance_residuals", np.max(rec.columns["residual_max"]), 1e-10)
    rep.check("inertia_rate", np.max(rec.columns["residual_inertia_rate"]), 1e-12)
    if fm.is_conservative(models):
        rep.check("energy_drift", energy_drift(rec), 1e-6)
    else:
        e = rec.columns["energy"]
        rise = float(np.max(np.diff(e))) / max(abs(e[0]), 1e-300)
        rep.check("energy_nonincreasing", max(rise, 0.0), 1e-12, "largest relative step increase")
    final = rep.checks[0].value
    rep.results = {"steps": it.steps, "dt": it.dt, "max_residual": final,
                   "final_energy": float(rec.columns["energy"][-1])}


def _closure_init(cc):
    init = cc.init
    eye = np.eye(3)

    def t(name, default):
        val = np.asarray(init.get(name, default), dtype=float)
        return val * eye if val.ndim == 0 else val.reshape(3, 3)

    return ClosureState(np.asarray(init.get("x", [0, 0, 0]), dtype=float),
                        np.asarray(init.get("v", [0, 0, 0]), dtype=float),
                        t("G", 1.0), t("B", 0.0), t("Y", 1.0), t("H", 0.0))


def _run_closure(cfg, out, rep):
    cc = cfg.closure or ClosureConfig()
    init = _closure_init(cc)
    if cc.model == "isotropic":
        spec = ClosureSpec.isotropic(cc.mu, cc.pseudo_rigid)
    else:
        spec = ClosureSpec(mu=cc.mu, pseudo_rigid=cc.pseudo_rigid)
    it = cfg.integration
    rec = closure_integrate(spec, init, it.dt, it.steps)
    rec.to_csv(out / "closure.csv")
    rep.files.append("closure.csv")
    H = rec.columns["H"]
    rep.check("H_symmetric", np.max(rec.columns["H_asym"]) / max(np.max(np.abs(H)), 1e-300), 1e-12)
    rep.check("H_psd", np.min(rec.columns["H_min_eig"]), -1e-10, "smallest eigenvalue", upper=False)
    iso = all(np.allclose(m, m[0, 0] * np.eye(3), rtol=0, atol=0) for m in (init.B, init.Y, init.H))
    if cc.model == "isotropic" and iso:
        b, y, h = isotropic_solution(rec.times, init.B[0, 0], init.Y[0, 0], init.H[0, 0])
        if cc.pseudo_rigid:
            h = np.zeros_like(h)
        err = max(np.max(np.abs(rec.columns["B"] - b[:, None, None] * np.eye(3))),
                  np.max(np.abs(rec.columns["Y"] - y[:, None, None] * np.eye(3))),
                  np.max(np.abs(H - h[:, None, None] * np.eye(3))))
        rep.check("isotropic_closed_form", err, 1e-6)
    rep.results = {"steps": it.steps, "dt": it.dt}


def _run_dist(cfg, out, rep):
    dists = []
    for entry in cfg.distributions:
        d = ds.make(entry["name"], **entry.get("params", {}))
        dists.append((entry, d))
        lo, hi = d.support()
        top = hi if math.isfinite(hi) else 10.0
        grid = np.linspace(0.0, top, int(entry.get("table", 101)))
        name = f"dist_{len(dists) - 1:02d}_{d.name}.csv"
        write_csv(out / name, ["xi", "gamma", "theta"], [[repr(x) for x in r] for r in ds.table(d, grid)])
        rep.files.append(name)
    summaries = []
    for entry, d in dists:
        s = ds.summary(d)
        summaries.append(s)
        rep.check(f"moments[{d.name}]", max(abs(s["moments"][0] - 1), abs(s["moments"][1] - 1)), 1e-8)
    result = {"distributions": summaries}
    if cfg.roots:
        bose, fermi = solve_bose_fermi()
        result["roots"] = {"bose": bose, "fermi": fermi, "printed": list(PRINTED_ROOTS)}
        rep.check("root_bose", abs(bose - PRINTED_ROOTS[0]), 1e-5)
        rep.check("root_fermi", abs(fermi - PRINTED_ROOTS[1]), 1e-5)
    if cfg.histogram is not None:
        hc = cfg.histogram
        delta = float(hc["delta"])
        if "energies" in hc:
            h = histogram(hc["energies"], delta, masses=hc.get("masses"))
        else:
            cloud = build_cloud(cfg)
            if cloud is None:
                raise ValueError("histogram needs a cloud or an energy list")
            h = histogram(cloud, delta, G=cfg.fit.get("G"))
        write_csv(out / "histogram.csv", ["xi_lo", "xi_hi", "gamma", "count"],
                  [[repr(float(a)), repr(float(b)), repr(float(g)), int(c)]
                   for a, b, g, c in zip(h.edges()[:-1], h.edges()[1:], h.values, h.counts)])
        rep.files.append("histogram.csv")
        rep.check("histogram_mass", abs(h.mass - 1.0), 1e-12)
        rep.check("histogram_first_moment", abs(h.first_moment - 1.0), delta / 2 + 1e-12)
        rep.check("histogram_share_top_bin", h.share_top_bin - 1 - 1.0 / delta, 1e-9)
        result["histogram"] = {"delta": delta, "top_bin": h.top_bin, "share_top_bin": h.share_top_bin,
                               "mass": h.mass, "first_moment": h.first_moment, "n": h.n}
    write_json(out / "summary.json", result)
    rep.files.append("summary.json")
    rep.results = {"n_distributions": len(dists)}


RUNNERS = {"fit": _run_fit, "simulate": _run_simulate, "closure": _run_closure, "dist": _run_dist}


def run_scenario(cfg: ScenarioConfig, out_dir) -> RunReport:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rep = RunReport(cfg.mode)
    t0 = time.perf_counter()
    RUNNERS[cfg.mode](cfg, out, rep)
    rep.duration = time.perf_counter() - t0
    return rep
