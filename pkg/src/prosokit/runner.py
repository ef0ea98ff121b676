"""Manifest-driven batch evaluation over a worker pool.

Workers run only pure functions, so any parallelism level produces the same
numbers; results are ordered by pair_id before aggregation. A failing pair
becomes an error row instead of aborting the batch.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

from .audio import load_wav
from .config import EvalConfig
from .manifest import ManifestRow
from .metrics import evaluate_pair
from .report import PairOutcome, ReportTable, build_report


def evaluate_row(row: ManifestRow, cfg: EvalConfig) -> PairOutcome:
    try:
        ref = load_wav(row.ref_path)
        pred = load_wav(row.pred_path)
        metrics = evaluate_pair(ref, pred, cfg)
    except Exception as exc:  # per-row isolation; aggregates skip error rows
        return PairOutcome(
            pair_id=row.pair_id,
            speaker_id=row.speaker_id,
            shots=row.shots,
            group=row.group,
            status="error",
            error=str(exc),
        )
    return PairOutcome(
        pair_id=row.pair_id,
        speaker_id=row.speaker_id,
        shots=row.shots,
        group=row.group,
        status="ok",
        metrics=metrics,
    )


def run_eval(rows, cfg: EvalConfig = EvalConfig(), jobs: int = 1) -> ReportTable:
    """Evaluate every manifest row and aggregate into a report table."""
    rows = list(rows)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(lambda r: evaluate_row(r, cfg), rows))
    else:
        outcomes = [evaluate_row(r, cfg) for r in rows]
    group_field = "group" if any(r.group for r in rows) else "shots"
    return build_report(outcomes, group_field=group_field)
