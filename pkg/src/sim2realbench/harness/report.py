"""Metric reports and table emission.

A report holds per-image and aggregate values for one validation set;
`emit_report` lays several sets out side by side, one row per metric,
flagging the best value per row according to each metric's direction
(replacing the colour convention of the source tables with explicit
markers that survive plain text).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

METRIC_DIRECTION = {  # True = higher is better
    "psnr": True, "ssim": True, "ms_ssim": True, "cw_ssim": True, "fsim": True,
    "lpips": False, "brisque": False, "niqe": False, "fid": False,
    "miou": True, "pq": True, "sq": True, "rq": True, "ap": True,
}
METRIC_ORDER = ["psnr", "ssim", "ms_ssim", "lpips", "cw_ssim", "fsim",
                "niqe", "brisque", "fid", "pq", "sq", "rq", "miou", "ap"]


class ReportError(Exception):
    pass


@dataclass
class MetricReport:
    dataset_role: str
    label: str = ""
    resolution: tuple[int, int] = (1024, 512)
    per_image: dict[str, dict[str, float]] = field(default_factory=dict)
    aggregate: dict[str, dict[str, float]] = field(default_factory=dict)
    config_echo: dict = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)

    def record(self, entry_id: str, metric: str, value: float) -> None:
        self.per_image.setdefault(entry_id, {})[metric] = float(value)

    def record_failure(self, entry_id: str, reason: str) -> None:
        self.failures.append({"entry_id": entry_id, "reason": reason})

    def set_aggregate(self, metric: str, values: list[float] | None = None,
                      value: float | None = None) -> None:
        if values is not None:
            arr = np.asarray(values, dtype=np.float64)
            self.aggregate[metric] = {
                "mean": float(arr.mean()),
                "std": float(arr.std(ddof=0)),
                "n": int(arr.size),
            }
        else:
            self.aggregate[metric] = {"mean": float(value), "std": 0.0, "n": 1}

    def finalize_aggregates(self) -> None:
        """(Re)compute aggregates for every per-image metric."""
        by_metric: dict[str, list[float]] = {}
        for entry_id in sorted(self.per_image):
            for metric, value in self.per_image[entry_id].items():
                by_metric.setdefault(metric, []).append(value)
        for metric, values in by_metric.items():
            self.set_aggregate(metric, values=values)

    def to_dict(self) -> dict:
        return {
            "dataset_role": self.dataset_role,
            "label": self.label,
            "resolution": list(self.resolution),
            "per_image": self.per_image,
            "aggregate": self.aggregate,
            "config_echo": self.config_echo,
            "failures": self.failures,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MetricReport":
        return cls(
            dataset_role=doc["dataset_role"],
            label=doc.get("label", ""),
            resolution=tuple(doc.get("resolution", (1024, 512))),
            per_image=doc.get("per_image", {}),
            aggregate=doc.get("aggregate", {}),
            config_echo=doc.get("config_echo", {}),
            failures=doc.get("failures", []),
        )


def _column_name(r: MetricReport) -> str:
    return f"{r.dataset_role} ({r.label})" if r.label else r.dataset_role


def _ordered_metrics(reports: list[MetricReport]) -> list[str]:
    present = {m for r in reports for m in r.aggregate}
    ordered = [m for m in METRIC_ORDER if m in present]
    ordered += sorted(present - set(ordered))
    return ordered


def _format_value(v: float) -> str:
    return f"{v:.3f}"


def emit_report(reports: list[MetricReport], fmt: str = "markdown",
                allow_mixed_resolution: bool = False) -> str:
    if not reports:
        raise ReportError("no reports to emit")
    if fmt not in ("json", "csv", "markdown"):
        raise ReportError(f"unknown report format {fmt!r}")
    resolutions = {tuple(r.resolution) for r in reports}
    if len(resolutions) > 1 and not allow_mixed_resolution:
        raise ReportError(
            f"reports mix resolutions {sorted(resolutions)}; pass an explicit override"
        )
    metrics = _ordered_metrics(reports)
    flag_best = len(reports) > 1

    if fmt == "json":
        doc = {
            "columns": [_column_name(r) for r in reports],
            "rows": [
                {
                    "metric": m,
                    "higher_better": METRIC_DIRECTION.get(m, True),
                    "values": [
                        r.aggregate.get(m, {}).get("mean") for r in reports
                    ],
                }
                for m in metrics
            ],
            "reports": [r.to_dict() for r in reports],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    # shared tabular core for csv/markdown
    rows = []
    for m in metrics:
        vals = [r.aggregate.get(m, {}).get("mean") for r in reports]
        present = [v for v in vals if v is not None]
        best = None
        if flag_best and len(present) > 1:
            best = max(present) if METRIC_DIRECTION.get(m, True) else min(present)
        arrow = "^" if METRIC_DIRECTION.get(m, True) else "v"
        cells = []
        for v in vals:
            if v is None:
                cells.append("")
            elif best is not None and v == best:
                cells.append(f"**{_format_value(v)}**" if fmt == "markdown" else f"{_format_value(v)} [best]")
            else:
                cells.append(_format_value(v))
        rows.append([f"{m}{arrow}"] + cells)

    header = ["metric"] + [_column_name(r) for r in reports]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()

    lines = ["| " + " | ".join(header) + " |",
             "|" + "|".join(["---"] * len(header)) + "|"]
    for row in rows:
        lines.append("| " + " | ".join(row) + " |")
    lines.append("")
    for r in reports:
        if r.config_echo:
            lines.append(f"config {_column_name(r)}: "
                         + json.dumps(r.config_echo, sort_keys=True))
    return "\n".join(lines).rstrip("\n") + "\n"
