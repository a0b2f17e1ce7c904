"""Experiment matrix: run scenario x split grids, aggregate over seeds and
render the results table."""

from __future__ import annotations

import dataclasses
import logging
import os

import numpy as np

from ..config import ExperimentConfig, MatrixConfig, config_hash
from ..manifest import DatasetManifest, write_json
from ..metrics import delta_percent
from .evaluate import evaluate, predictor_from_params
from .splits import make_split
from .train_seg import train_segmentor

log = logging.getLogger(__name__)

PROVIDER_LABEL = {
    "oracle_noisy": "oracle",
    "trained_mono": "mono",
    "external": "external",
}


def _fmt(value, width=10):
    if value is None:
        return "-".rjust(width)
    return f"{value:.2f}".rjust(width)


def render_table(rows: list) -> str:
    """Aligned text table, one line per aggregated configuration."""
    header = (f"{'depth origin':<14}{'RGB':^5}{'D':^5}{'k':>3}"
              f"{'IoU_seen':>10}{'IoU_unseen':>12}{'delta%':>10}  {'status'}")
    lines = [header, "-" * len(header)]
    for row in rows:
        if row.get("status") == "failed":
            lines.append(f"{row['label']:<14}{'':^5}{'':^5}{row['split_k']:>3}"
                         f"{'-':>10}{'-':>12}{'-':>10}  failed: {row['error']}")
            continue
        uses_rgb = row["scenario"] in ("rgb_only", "rgb_d", "rgb_rgb_control")
        uses_depth = row["scenario"] in ("depth_only", "rgb_d")
        seen = row["iou_seen"] * 100 if row["iou_seen"] is not None else None
        unseen = row["iou_unseen"] * 100 if row["iou_unseen"] is not None else None
        lines.append(
            f"{row['label']:<14}{'x' if uses_rgb else '':^5}{'x' if uses_depth else '':^5}"
            f"{row['split_k']:>3}{_fmt(seen)}{_fmt(unseen, 12)}{_fmt(row['delta_percent'])}"
            f"  ok")
    return "\n".join(lines) + "\n"


def scenario_label(cfg: ExperimentConfig) -> str:
    if cfg.scenario == "rgb_only":
        return "-"
    if cfg.scenario == "rgb_rgb_control":
        return "rgb-control"
    return PROVIDER_LABEL.get(cfg.provider.kind, cfg.provider.kind)


def run_matrix(matrix: MatrixConfig, manifest: DatasetManifest, root: str,
               out_dir: str | None = None) -> dict:
    """Run every experiment over the matrix seeds; aggregate per experiment.

    Sub-run failures mark the row failed and the matrix continues. The
    machine-readable report and the rendered table are deterministic for a
    fixed (config, seed) in single-threaded mode.
    """
    rows = []
    per_seed_reports = []
    for exp in matrix.experiments:
        label = scenario_label(exp)
        try:
            split = make_split(manifest.pixel_counts["train"], exp.split_k)
            seed_reports = []
            for seed in matrix.seeds:
                run_cfg = dataclasses.replace(exp, seed=seed)
                log.info("matrix run: %s k=%d seed=%d", exp.scenario, exp.split_k, seed)
                trained = train_segmentor(run_cfg, manifest, root, split)
                predictor = predictor_from_params(run_cfg, trained.net_cfg,
                                                  trained.params)
                report = evaluate(predictor, run_cfg, manifest, root, split)
                seed_reports.append(report)
                per_seed_reports.append(report.to_dict())
            seen_vals = [r.iou_seen for r in seed_reports if r.iou_seen is not None]
            unseen_vals = [r.iou_unseen for r in seed_reports if r.iou_unseen is not None]
            iou_seen = float(np.mean(seen_vals)) if seen_vals else None
            iou_unseen = float(np.mean(unseen_vals)) if unseen_vals else None
            delta = None
            if iou_seen and iou_unseen is not None:
                delta = delta_percent(iou_seen, iou_unseen)
            rows.append({
                "status": "ok",
                "label": label,
                "scenario": exp.scenario,
                "provider": exp.provider.kind,
                "split_k": exp.split_k,
                "click_mode": exp.click_mode,
                "seeds": list(matrix.seeds),
                "iou_seen": iou_seen,
                "iou_unseen": iou_unseen,
                "delta_percent": delta,
                "config_hash": config_hash(exp.to_dict()),
            })
        except Exception as exc:  # matrix keeps going; row carries the error
            log.warning("matrix row failed: %s", exc)
            rows.append({
                "status": "failed",
                "label": label,
                "scenario": exp.scenario,
                "provider": exp.provider.kind,
                "split_k": exp.split_k,
                "error": f"{type(exc).__name__}: {exc}",
            })
    table = render_table(rows)
    result = {
        "rows": rows,
        "per_seed": per_seed_reports,
        "seeds": list(matrix.seeds),
        "table": table,
    }
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        write_json(os.path.join(out_dir, "matrix_report.json"), result)
        from ..formats import atomic_write_bytes
        atomic_write_bytes(os.path.join(out_dir, "matrix_table.txt"), table.encode())
    return result
