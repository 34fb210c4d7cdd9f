"""Pinned simulation pipelines with in-run qualitative checks.

Each pipeline draws its data from the generators in :mod:`crossmi.simgen`
using parameters from ``figure_configs.json`` (shipped with the package and
versioned), runs the estimators and tests, and returns plot-ready tables
together with a list of pass/fail checks.

Seeds are derived as ``[seed, ...]`` sequences so that every draw inside a
pipeline is independent and reproducible on its own.
"""

from __future__ import annotations

import copy
import dataclasses
import functools
import json
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import stats

from .dataset import (EstimatorConfig, PairedSeries, write_columns_csv,
                      write_results_json)
from .estimators import cross_ksg_mi, ksg_mi
from .significance import (BlockSpec, ShuffleTarget, support_diagnostic,
                           test_cross_mi_nonzero, test_mi_difference,
                           test_mi_nonzero)
from .simgen import (ConditionSpec, StateSwitchingSpec, gen_ar1_pair,
                     gen_state_switching, scaling_experiment)

FIGURE_IDS = ("fig1", "fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig4", "fig6")


class UnknownFigureError(ValueError):
    pass


def load_figure_configs(path=None) -> dict:
    """The pinned configuration document (or one read from ``path``)."""
    if path is None:
        text = resources.files("crossmi").joinpath("figure_configs.json").read_text()
    else:
        text = Path(path).read_text(encoding="utf-8")
    return json.loads(text)


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def resolve_config(figure_id: str, override: Optional[dict] = None) -> dict:
    """Pinned settings for ``figure_id`` with ``override`` merged on top.

    ``override`` may carry an ``"estimator"`` entry and/or the figure's own
    keys (either at top level or under ``"figures": {figure_id: ...}``).
    """
    if figure_id not in FIGURE_IDS:
        raise UnknownFigureError(
            f"unknown figure id {figure_id!r}; choose from {', '.join(FIGURE_IDS)}")
    doc = load_figure_configs()
    resolved = {"version": doc["version"], "estimator": doc["estimator"],
                "figure": doc["figures"][figure_id]}
    override = dict(override or {})
    if "estimator" in override:
        resolved["estimator"] = _merge(resolved["estimator"], override.pop("estimator"))
    figures = override.pop("figures", {})
    override.pop("version", None)
    if figure_id in figures:
        resolved["figure"] = _merge(resolved["figure"], figures[figure_id])
    resolved["figure"] = _merge(resolved["figure"], override)
    return resolved


def estimator_config(resolved: dict) -> EstimatorConfig:
    return EstimatorConfig(**resolved["estimator"])


@dataclasses.dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "detail": self.detail}


@dataclasses.dataclass
class FigureRun:
    """Outcome of one pipeline run."""

    figure_id: str
    seed: int
    config: dict
    summary: dict
    checks: list
    tables: dict  # file stem -> {column: values}

    kind = "FigureRun"

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"figure_id": self.figure_id, "seed": self.seed,
                "summary": self.summary,
                "checks": [c.to_dict() for c in self.checks],
                "passed": self.passed}

    def write(self, outdir, bits: bool = False) -> list:
        """Write every table as CSV plus ``results.json``; returns the paths."""
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        paths = []
        for stem, columns in self.tables.items():
            path = outdir / f"{stem}.csv"
            write_columns_csv(path, columns)
            paths.append(path)
        path = outdir / "results.json"
        write_results_json(path, self, config=self.config, bits=bits)
        paths.append(path)
        return paths


def _sub(seed, *keys) -> list:
    base = list(seed) if isinstance(seed, (list, tuple)) else [int(seed)]
    return base + list(keys)


# -- measures shared by the pipelines and the acceptance suite ---------------


def paired_measures(fig: dict, seed, cfg: EstimatorConfig,
                    test_key: str = "test") -> dict:
    """Draw reference and test from ``fig`` and estimate I_p, I_q and CI_pq."""
    reference = ConditionSpec.from_dict(fig["reference"]).sample(
        fig["n_reference"], _sub(seed, 0))
    test = ConditionSpec.from_dict(fig[test_key]).sample(fig["n_test"], _sub(seed, 1))
    cross = cross_ksg_mi(test, reference, cfg)
    return {"reference": reference, "test": test, "cross": cross,
            "I_p": ksg_mi(test, cfg).mean, "I_q": ksg_mi(reference, cfg).mean,
            "CI_pq": cross.mean}


def probe_local_cross_mi(fig: dict, seed, cfg: EstimatorConfig) -> dict:
    """Local cross MI of the probe point under each condition and the pool."""
    spec = StateSwitchingSpec(tuple(fig["conditions"]),
                              fig["samples_per_condition"], seed)
    data = gen_state_switching(spec)
    probe = PairedSeries([fig["probe"][0]], [fig["probe"][1]])
    per_condition = [float(cross_ksg_mi(probe, part, cfg).locals[0])
                     for part in data.split().values()]
    pooled = float(cross_ksg_mi(probe, data.samples, cfg).locals[0])
    return {"data": data, "probe": probe, "per_condition": per_condition,
            "pooled": pooled}


def fig1_outcomes(per_condition, band: float) -> list:
    """The four expected probe outcomes as booleans, in condition order."""
    c1, c2, c3, c4 = per_condition
    return [c1 > band, abs(c2) < band, abs(c3) < band, c4 < -band]


def scaling_tables(fig: dict, seed, cfg: EstimatorConfig) -> dict:
    ref_spec = ConditionSpec.from_dict(fig["reference"])
    test_spec = ConditionSpec.from_dict(fig["test"])
    return {flag: scaling_experiment(ref_spec, test_spec, fig["test_sizes"], flag,
                                     cfg, seed, fig["n_reference"])
            for flag in (True, False)}


def scaling_statistics(rows) -> dict:
    sizes = np.array([r.n_test for r in rows], dtype=float)
    ci = np.array([r.CI_pq for r in rows])
    rho = stats.spearmanr(sizes, ci)[0]
    fit = stats.linregress(np.log(sizes), ci)
    return {"spearman_rho": float(rho), "slope_per_log_n": float(fit.slope),
            "slope_p_value": float(fit.pvalue)}


# -- pipelines -----------------------------------------------------------------


def _xy(series: PairedSeries, **extra) -> dict:
    return {"x": series.x, "y": series.y, **extra}


def _paired_tables(m: dict) -> dict:
    return {"reference": _xy(m["reference"]),
            "test": _xy(m["test"], local_cross_mi_nats=m["cross"].locals)}


def _paired_summary(m: dict) -> dict:
    return {"I_p_nats": m["I_p"], "I_q_nats": m["I_q"], "CI_pq_nats": m["CI_pq"],
            "support_ratio": support_diagnostic(m["test"], m["reference"])}


def _fmt(m: dict) -> str:
    return f"CI_pq={m['CI_pq']:.4f}, I_p={m['I_p']:.4f}, I_q={m['I_q']:.4f}"


def _run_fig2(figure_id: str, fig: dict, seed, cfg) -> tuple:
    m = paired_measures(fig, seed, cfg)
    if figure_id == "fig2a":
        check = Check("CI_pq < I_p (independent reference)", m["CI_pq"] < m["I_p"], _fmt(m))
    elif figure_id == "fig2b":
        check = Check("0 < CI_pq < I_p (wider-noise matched reference)",
                      0 < m["CI_pq"] < m["I_p"], _fmt(m))
    else:
        check = Check("CI_pq > I_p (test on a sub-range of the reference)",
                      m["CI_pq"] > m["I_p"], _fmt(m))
    return _paired_summary(m), [check], _paired_tables(m)


def _run_fig3a(fig: dict, seed, cfg) -> tuple:
    m = paired_measures(fig, seed, cfg)
    out_ci, in_ci = [], []
    for r in range(fig["n_draws"]):
        out_ci.append(paired_measures(fig, _sub(seed, r), cfg)["CI_pq"])
        in_ci.append(paired_measures(fig, _sub(seed, r), cfg,
                                     test_key="in_support_test")["CI_pq"])
    out_std = float(np.std(out_ci, ddof=1))
    in_std = float(np.std(in_ci, ddof=1))
    ratio = out_std / in_std
    in_support = paired_measures(fig, seed, cfg, test_key="in_support_test")
    summary = _paired_summary(m)
    summary.update({
        "draw_std_CI_pq_nats": out_std,
        "draw_std_CI_pq_in_support_nats": in_std,
        "draw_std_ratio": ratio,
        "published_std_nats": fig["published_std_nats"],
        "support_ratio_in_support": support_diagnostic(in_support["test"],
                                                       in_support["reference"]),
    })
    checks = [
        Check("CI_pq > I_q (extrapolated test)", m["CI_pq"] > m["I_q"], _fmt(m)),
        Check(f"draw std ratio >= {fig['min_std_ratio']}",
              ratio >= fig["min_std_ratio"],
              f"std {out_std:.4f} vs in-support {in_std:.4f} (ratio {ratio:.2f}); "
              f"published value {fig['published_std_nats']} is informational"),
    ]
    tables = _paired_tables(m)
    tables["draws"] = {"draw": list(range(fig["n_draws"])),
                       "CI_pq_extrapolated_nats": out_ci,
                       "CI_pq_in_support_nats": in_ci}
    return summary, checks, tables


def _run_fig3b(fig: dict, seed, cfg) -> tuple:
    m = paired_measures(fig, seed, cfg)
    check = Check("CI_pq < 0 (sinusoidal test, linear reference)", m["CI_pq"] < 0, _fmt(m))
    return _paired_summary(m), [check], _paired_tables(m)


def _run_fig1(fig: dict, seed, cfg) -> tuple:
    band = fig["noise_band_nats"]
    res = probe_local_cross_mi(fig, seed, cfg)
    c = res["per_condition"]
    ok = fig1_outcomes(c, band)
    pooled_cfg = fig["pooled_test"]
    sig = test_cross_mi_nonzero(
        res["probe"], res["data"].samples, ShuffleTarget.REFERENCE, cfg,
        BlockSpec(pooled_cfg["block_len"], pooled_cfg["n_permutations"],
                  _seed_int(seed)))
    checks = [
        Check("condition 1: probe local cross MI > band", ok[0], f"{c[0]:.4f}"),
        Check("condition 2: probe local cross MI within band", ok[1], f"{c[1]:.4f}"),
        Check("condition 3: probe local cross MI within band", ok[2], f"{c[2]:.4f}"),
        Check("condition 4: probe local cross MI < -band", ok[3], f"{c[3]:.4f}"),
        Check("pooled reference: not significant",
              sig.p_value > fig["alpha"],
              f"local={res['pooled']:.4f}, p={sig.p_value:.4f}"),
    ]
    summary = {"probe": fig["probe"], "noise_band_nats": band,
               "per_condition_local_cross_mi_nats": c,
               "pooled_local_cross_mi_nats": res["pooled"],
               "pooled_p_value": sig.p_value}
    data = res["data"]
    tables = {
        "data": _xy(data.samples, condition=list(data.labels)),
        "probe": {"reference": ["condition 1", "condition 2", "condition 3",
                                "condition 4", "pooled"],
                  "local_cross_mi_nats": c + [res["pooled"]]},
        "null": {"null_local_cross_mi_nats": sig.null_samples},
    }
    return summary, checks, tables


def _seed_int(seed) -> int:
    return int(seed[0]) if isinstance(seed, (list, tuple)) else int(seed)


def _run_fig4(fig: dict, seed, cfg) -> tuple:
    reference = gen_ar1_pair(fig["n"], fig["ar_coeff"], fig["coupling"],
                             fig["noise_std"], _sub(seed, 0))
    test = gen_ar1_pair(fig["n"], fig["ar_coeff"], fig["coupling"],
                        fig["noise_std"], _sub(seed, 1))
    spec = BlockSpec(fig["block_len"], fig["n_permutations"], _seed_int(seed))
    res_q = test_mi_nonzero(reference, cfg, spec)
    res_p = test_mi_nonzero(test, cfg, spec)
    res_cross = test_cross_mi_nonzero(test, reference, ShuffleTarget.TEST, cfg, spec)
    res_diff = test_mi_difference(test, reference, cfg, spec)
    results = {"I_q": res_q, "I_p": res_p, "CI_pq": res_cross, "I_p_minus_I_q": res_diff}
    alpha = fig["alpha"]
    summary = {f"{name}_nats": r.observed for name, r in results.items()}
    summary.update({f"{name}_p_value": r.p_value for name, r in results.items()})
    summary["block_len"] = fig["block_len"]
    finite = all(np.isfinite(r.observed) and np.all(np.isfinite(r.null_samples))
                 for r in results.values())
    checks = [
        Check("all measures and null distributions computed", finite),
        Check("reference MI significant", res_q.p_value <= alpha,
              f"I_q={res_q.observed:.4f}, p={res_q.p_value:.4f}"),
        Check("cross MI significant", res_cross.p_value <= alpha,
              f"CI_pq={res_cross.observed:.4f}, p={res_cross.p_value:.4f}"),
    ]
    tables = {"reference": _xy(reference), "test": _xy(test),
              "nulls": {f"{name}_null_nats": r.null_samples
                        for name, r in results.items()}}
    return summary, checks, tables


def _run_fig6(fig: dict, seed, cfg) -> tuple:
    tables_by_flag = scaling_tables(fig, seed, cfg)
    with_test = scaling_statistics(tables_by_flag[True])
    without = scaling_statistics(tables_by_flag[False])
    checks = [
        Check("pooled reference: CI_pq monotone in n_test",
              abs(with_test["spearman_rho"]) > fig["min_abs_spearman"],
              f"Spearman rho={with_test['spearman_rho']:.3f}"),
        Check("separate reference: no trend in CI_pq",
              without["slope_p_value"] > fig["alpha"],
              f"slope p={without['slope_p_value']:.3f}"),
    ]
    rows = [(flag, r) for flag in (True, False) for r in tables_by_flag[flag]]
    table = {"include_test_in_reference": [int(f) for f, _ in rows],
             "n_test": [r.n_test for _, r in rows],
             "I_p_nats": [r.I_p for _, r in rows],
             "I_q_nats": [r.I_q for _, r in rows],
             "CI_pq_nats": [r.CI_pq for _, r in rows]}
    summary = {"include_test_in_reference": with_test,
               "separate_reference": without}
    return summary, checks, {"scaling": table}


_PIPELINES: dict = {
    "fig1": _run_fig1,
    "fig2a": functools.partial(_run_fig2, "fig2a"),
    "fig2b": functools.partial(_run_fig2, "fig2b"),
    "fig2c": functools.partial(_run_fig2, "fig2c"),
    "fig3a": _run_fig3a,
    "fig3b": _run_fig3b,
    "fig4": _run_fig4,
    "fig6": _run_fig6,
}


def run_figure(figure_id: str, seed: int = 0, override: Optional[dict] = None) -> FigureRun:
    """Run one pipeline with its pinned (optionally overridden) settings."""
    resolved = resolve_config(figure_id, override)
    cfg = estimator_config(resolved)
    summary, checks, tables = _PIPELINES[figure_id](resolved["figure"], int(seed), cfg)
    return FigureRun(figure_id, int(seed), resolved, summary, checks, tables)
