"""Experiment harness: degree-1 deficit, model/naive error grid, model overlay
and shifted-versus-naive error curves on power-law suites ``N * k**-beta``.

Every suite returns an :class:`ExperimentResult` whose tables are written as
CSV next to an SVG plot and the resolved ``config.json``.  Trial streams are
keyed by grid cell, so output is identical for identical configs.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import plotting
from .distributions import DegreeDistribution, power_law_distribution, proportional_l1_error
from .exact_inverse import PrecisionContext, forward, round_int, shift_input
from .generator import Sampler, average_over_trials
from .transfer import build_transfer_matrix, predict_output

SUITES = ("deficit", "heatmap", "overlay", "shifted")


@dataclass(frozen=True)
class ExperimentConfig:
    suite: str
    n_values: tuple = (1000.0,)
    beta_values: tuple = (1.0, 2.0)
    m: int = 40
    trials: int = 20
    seed: int = 0
    digits: int | None = None
    sampler: str = Sampler.SKIP.value
    out_dir: str | None = None
    targets: int = 25  # shifted suite only: number of t values

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ValueError(f"unknown suite {self.suite!r}; choose from {SUITES}")
        if not self.n_values or not self.beta_values:
            raise ValueError("n_values and beta_values must be non-empty")
        if self.trials < 1 or self.m < 1 or self.targets < 1:
            raise ValueError("trials, m and targets must be positive")

    @property
    def precision(self) -> PrecisionContext:
        return PrecisionContext(self.digits) if self.digits else PrecisionContext.for_m(self.m)

    def resolved(self) -> dict:
        d = dataclasses.asdict(self)
        d["digits"] = self.precision.digits
        d["n_values"] = list(self.n_values)
        d["beta_values"] = list(self.beta_values)
        return d


def default_config(suite: str, full: bool = False, seed: int = 0, out_dir: str | None = None) -> ExperimentConfig:
    """Desk-scale defaults; ``full=True`` restores the published scale."""
    if suite == "deficit":
        return ExperimentConfig(suite, (1000.0,), (1.0, 2.0), 40, 20, seed, out_dir=out_dir)
    if suite == "overlay":
        return ExperimentConfig(suite, (1000.0,), (1.0, 2.0), 40, 20, seed, out_dir=out_dir)
    if suite == "heatmap":
        betas = tuple(round(1.0 + 0.2 * i, 10) for i in range(26))
        if full:
            return ExperimentConfig(suite, tuple(np.geomspace(1e3, 1e5, 75).tolist()), betas, 100, 20,
                                    seed, out_dir=out_dir)
        return ExperimentConfig(suite, tuple(np.geomspace(1e3, 1e5, 5).tolist()), betas, 40, 5,
                                seed, out_dir=out_dir)
    if suite == "shifted":
        targets = 100 if full else 25
        betas = tuple(6.0 * t / targets for t in range(1, targets + 1))
        return ExperimentConfig(suite, (1000.0,), betas, 40, 30 if full else 5, seed,
                                out_dir=out_dir, targets=targets)
    raise ValueError(f"unknown suite {suite!r}")


@dataclass(frozen=True)
class ErrorRecord:
    N: float
    beta: float
    err_model: float | None = None
    err_naive: float | None = None
    err_shifted: float | None = None
    ratio: float | None = None
    t: int | None = None

    def __post_init__(self):
        for name in ("err_model", "err_naive", "err_shifted"):
            v = getattr(self, name)
            if v is not None and not v >= 0:
                raise ValueError(f"{name} must be non-negative, got {v}")


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list
    counts: list = field(default_factory=list)
    svg: str = ""

    def table_csv(self) -> str:
        return _csv(self.rows)

    def counts_csv(self) -> str:
        return _csv(self.counts)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _csv(rows: list) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = list(rows[0].keys())
    w.writerow(cols)
    for r in rows:
        w.writerow([_cell(r[c]) for c in cols])
    return buf.getvalue()


def _records_rows(records: list[ErrorRecord]) -> list[dict]:
    return [dataclasses.asdict(r) for r in records]


# -- suites ----------------------------------------------------------------------

def run_deficit(cfg: ExperimentConfig) -> ExperimentResult:
    rows = []
    series = []
    for bi, beta in enumerate(cfg.beta_values):
        for ni, N in enumerate(cfg.n_values):
            d = power_law_distribution(N, beta, cfg.m)
            stats = average_over_trials(d, cfg.trials, cfg.sampler, cfg.seed, key=(ni, bi))
            realized = stats.mean_counts
            for k in range(1, cfg.m + 1):
                target = d.counts[k - 1]
                rows.append({
                    "N": float(N), "beta": float(beta), "degree": k, "target": target,
                    "realized": realized[k - 1],
                    "ratio": realized[k - 1] / target if target else None,
                })
            ks = list(range(1, min(cfg.m, 9) + 1))
            series.append({"label": f"target b={beta:g}", "x": ks, "y": [d.counts[k - 1] for k in ks],
                           "style": "marker"})
            series.append({"label": f"realized b={beta:g}", "x": ks, "y": [realized[k - 1] for k in ks]})
    svg = plotting.line_chart(series, "Target vs realized, degrees 1-9", "degree", "nodes", logy=True)
    return ExperimentResult(cfg, rows, svg=svg)


def run_heatmap(cfg: ExperimentConfig) -> ExperimentResult:
    T = build_transfer_matrix(cfg.m)
    records, counts = [], []
    for ni, N in enumerate(cfg.n_values):
        for bi, beta in enumerate(cfg.beta_values):
            d = power_law_distribution(N, beta, cfg.m)
            predicted = predict_output(T, d)
            realized = average_over_trials(d, cfg.trials, cfg.sampler, cfg.seed, key=(ni, bi)).as_array()
            err_model = proportional_l1_error(realized, predicted)
            err_naive = proportional_l1_error(d, realized)
            records.append(ErrorRecord(float(N), float(beta), err_model=err_model, err_naive=err_naive,
                                       ratio=err_model / err_naive if err_naive else None))
            for k in range(cfg.m):
                counts.append({"N": float(N), "beta": float(beta), "degree": k + 1,
                               "target": d.counts[k], "predicted": float(predicted[k]),
                               "realized": float(realized[k])})
    nb = len(cfg.beta_values)
    grid = lambda attr: [[getattr(records[ni * nb + bi], attr) for bi in range(nb)]  # noqa: E731
                         for ni in range(len(cfg.n_values))]
    svg = plotting.heatmap(grid("ratio"), cfg.beta_values, cfg.n_values,
                           "err_model / err_naive", "beta", "N")
    return ExperimentResult(cfg, _records_rows(records), counts, svg)


def run_overlay(cfg: ExperimentConfig) -> ExperimentResult:
    T = build_transfer_matrix(cfg.m)
    rows, series = [], []
    for bi, beta in enumerate(cfg.beta_values):
        for ni, N in enumerate(cfg.n_values):
            d = power_law_distribution(N, beta, cfg.m)
            model = predict_output(T, d)
            realized = average_over_trials(d, cfg.trials, cfg.sampler, cfg.seed, key=(ni, bi)).mean_counts
            for k in range(1, cfg.m + 1):
                rows.append({"N": float(N), "beta": float(beta), "degree": k, "input": d.counts[k - 1],
                             "model": float(model[k - 1]), "realized": realized[k - 1]})
            ks = list(range(1, cfg.m + 1))
            series.append({"label": f"model b={beta:g}", "x": ks, "y": model.tolist(), "style": "marker"})
            series.append({"label": f"realized b={beta:g}", "x": ks, "y": list(realized)})
    svg = plotting.line_chart(series, "Model prediction vs realized", "degree", "nodes", logy=True)
    return ExperimentResult(cfg, rows, svg=svg)


def shifted_betas(targets: int) -> list[float]:
    return [6.0 * t / targets for t in range(1, targets + 1)]


def run_shifted(cfg: ExperimentConfig) -> ExperimentResult:
    """Targets ``y_t = P x_t`` for power laws ``x_t``; compare inputs ``round(y_t)``
    (naive) and ``Int(P^-1 y_t)`` (shifted) against ``y_t``."""
    ctx = cfg.precision
    N = cfg.n_values[0]
    records, counts = [], []
    for t, beta in enumerate(cfg.beta_values, start=1):
        x_t = power_law_distribution(N, beta, cfg.m)
        y_t = forward(x_t, ctx)
        target = np.array([float(v) for v in y_t])
        shift = shift_input(y_t, ctx)
        shifted_in = shift.rounded_distribution()
        naive_in = DegreeDistribution(tuple(max(v, 0) for v in round_int(y_t)))
        naive = average_over_trials(naive_in, cfg.trials, cfg.sampler, cfg.seed, key=(t, 0)).as_array()
        shifted = average_over_trials(shifted_in, cfg.trials, cfg.sampler, cfg.seed, key=(t, 1)).as_array()
        err_naive = proportional_l1_error(target, naive)
        err_shifted = proportional_l1_error(target, shifted)
        records.append(ErrorRecord(float(N), float(beta), err_naive=err_naive, err_shifted=err_shifted,
                                   ratio=err_shifted / err_naive if err_naive else None, t=t))
        for k in range(cfg.m):
            counts.append({"t": t, "beta": float(beta), "degree": k + 1, "target": float(target[k]),
                           "naive_input": naive_in.counts[k], "shifted_input": shifted_in.counts[k],
                           "power_law": x_t.counts[k], "realized_naive": float(naive[k]),
                           "realized_shifted": float(shifted[k])})
    ts = [r.t for r in records]
    svg = plotting.line_chart(
        [{"label": "naive input", "x": ts, "y": [r.err_naive for r in records]},
         {"label": "shifted input", "x": ts, "y": [r.err_shifted for r in records], "dashed": True}],
        "Proportional L1 error vs target", "t (beta = 6t/T)", "error")
    return ExperimentResult(cfg, _records_rows(records), counts, svg)


RUNNERS = {"deficit": run_deficit, "heatmap": run_heatmap, "overlay": run_overlay, "shifted": run_shifted}


def run(cfg: ExperimentConfig) -> ExperimentResult:
    return RUNNERS[cfg.suite](cfg)


def write_outputs(result: ExperimentResult, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    suite = result.config.suite
    written = [out / f"{suite}.csv", out / f"{suite}.svg", out / "config.json"]
    written[0].write_text(result.table_csv(), encoding="utf-8")
    written[1].write_text(result.svg, encoding="utf-8")
    written[2].write_text(json.dumps(result.config.resolved(), indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")
    if result.counts:
        path = out / f"{suite}_counts.csv"
        path.write_text(result.counts_csv(), encoding="utf-8")
        written.append(path)
    return written


def summarize(result: ExperimentResult) -> dict:
    """A few headline numbers per suite, for the CLI."""
    rows = result.rows
    suite = result.config.suite
    if suite == "deficit":
        return {f"beta={r['beta']:g}": r["ratio"] for r in rows if r["degree"] == 1}
    if suite == "heatmap":
        return {
            "cells": len(rows),
            "model_beats_naive": sum(r["err_model"] < r["err_naive"] for r in rows),
            "max_err_naive": max(r["err_naive"] for r in rows),
            "max_err_model": max(r["err_model"] for r in rows),
        }
    if suite == "shifted":
        return {
            "targets": len(rows),
            "shifted_beats_naive": sum(r["err_shifted"] < r["err_naive"] for r in rows),
            "mean_err_naive": float(np.mean([r["err_naive"] for r in rows])),
            "mean_err_shifted": float(np.mean([r["err_shifted"] for r in rows])),
        }
    big = [r for r in rows if r["model"] >= 20]
    return {"max_rel_gap_model_ge_20": max(abs(r["model"] - r["realized"]) / max(r["realized"], 1)
                                            for r in big) if big else math.nan}
