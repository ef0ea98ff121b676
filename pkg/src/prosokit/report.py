"""Per-pair outcomes, grouped aggregation, and table rendering.

Group rows carry arithmetic means of the defined per-pair values; pairs with
an undefined GPE stay out of the GPE mean but are counted, and errored pairs
are skipped entirely with their count reported.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Optional

from .metrics import MetricsReport

METRIC_COLUMNS = ("mcd", "gpe", "vde", "ffe")


@dataclass(frozen=True)
class PairOutcome:
    pair_id: str
    speaker_id: str
    shots: int
    status: str  # "ok" | "error"
    group: Optional[str] = None
    error: Optional[str] = None
    metrics: Optional[MetricsReport] = None

    def to_json_dict(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "speaker_id": self.speaker_id,
            "shots": self.shots,
            "group": self.group,
            "status": self.status,
            "error": self.error,
            "metrics": self.metrics.to_json_dict() if self.metrics else None,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "PairOutcome":
        metrics = d.get("metrics")
        return cls(
            pair_id=d["pair_id"],
            speaker_id=d.get("speaker_id", ""),
            shots=d.get("shots", 0),
            group=d.get("group"),
            status=d.get("status", "ok"),
            error=d.get("error"),
            metrics=MetricsReport.from_json_dict(metrics) if metrics else None,
        )


@dataclass(frozen=True)
class GroupRow:
    label: str
    mcd: Optional[float]
    gpe: Optional[float]
    vde: Optional[float]
    ffe: Optional[float]
    n_pairs: int
    n_errors: int
    gpe_undefined: int


@dataclass(frozen=True)
class ReportTable:
    group_field: str  # "shots" | "group"
    rows: tuple[GroupRow, ...]
    pairs: tuple[PairOutcome, ...]

    def to_json_dict(self) -> dict:
        return {
            "group_field": self.group_field,
            "rows": [vars(r) for r in self.rows],
            "pairs": [p.to_json_dict() for p in self.pairs],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ReportTable":
        return cls(
            group_field=d["group_field"],
            rows=tuple(GroupRow(**r) for r in d["rows"]),
            pairs=tuple(PairOutcome.from_json_dict(p) for p in d["pairs"]),
        )


def _mean(values) -> Optional[float]:
    values = list(values)
    if not values:
        return None
    return sum(values) / len(values)


def build_report(outcomes, group_field: str = "shots") -> ReportTable:
    """Aggregate outcomes (sorted by pair_id) under shots or group labels."""
    if group_field not in ("shots", "group"):
        raise ValueError("group_field must be 'shots' or 'group'")
    outcomes = tuple(sorted(outcomes, key=lambda o: o.pair_id))

    def label_of(o: PairOutcome) -> str:
        if group_field == "group":
            return o.group or f"{o.shots}-shot"
        return f"{o.shots}-shot"

    groups: dict[str, list[PairOutcome]] = {}
    for o in outcomes:
        groups.setdefault(label_of(o), []).append(o)

    rows = []
    for label in sorted(groups):
        members = groups[label]
        ok = [o.metrics for o in members if o.status == "ok" and o.metrics is not None]
        gpe_values = [m.gpe for m in ok if m.gpe is not None]
        rows.append(
            GroupRow(
                label=label,
                mcd=_mean(m.mcd for m in ok),
                gpe=_mean(gpe_values),
                vde=_mean(m.vde for m in ok),
                ffe=_mean(m.ffe for m in ok),
                n_pairs=len(members),
                n_errors=sum(1 for o in members if o.status != "ok"),
                gpe_undefined=sum(1 for m in ok if m.gpe is None),
            )
        )
    return ReportTable(group_field=group_field, rows=tuple(rows), pairs=outcomes)


def _cell(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.2f}"


def render_table(report: ReportTable, fmt: str) -> str:
    """Render the grouped table as markdown, csv, or json (full fidelity)."""
    if fmt == "json":
        return json.dumps(report.to_json_dict(), indent=2)

    group_header = "Shots" if report.group_field == "shots" else "Group"
    if fmt == "markdown":
        lines = [
            f"| {group_header} | MCD↓ | GPE↓ | VDE↓ | FFE↓ |",
            "| --- | --- | --- | --- | --- |",
        ]
        for r in report.rows:
            cells = " | ".join(_cell(getattr(r, m)) for m in METRIC_COLUMNS)
            lines.append(f"| {r.label} | {cells} |")
        return "\n".join(lines) + "\n"

    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(
            [group_header.lower(), *METRIC_COLUMNS, "pairs", "errors", "gpe_undefined"]
        )
        for r in report.rows:
            writer.writerow(
                [r.label]
                + ["" if getattr(r, m) is None else repr(getattr(r, m)) for m in METRIC_COLUMNS]
                + [r.n_pairs, r.n_errors, r.gpe_undefined]
            )
        return buf.getvalue()

    raise ValueError(f"unknown format {fmt!r} (expected markdown, csv, or json)")


def parse_report_json(text: str) -> ReportTable:
    return ReportTable.from_json_dict(json.loads(text))
