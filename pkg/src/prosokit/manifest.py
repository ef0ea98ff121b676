"""Batch-evaluation manifest: CSV rows of reference/predicted pairs."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

REQUIRED_COLUMNS = ("pair_id", "speaker_id", "shots", "ref_path", "pred_path")


class ManifestError(Exception):
    """Manifest file is missing, empty, or malformed."""


@dataclass(frozen=True)
class ManifestRow:
    pair_id: str
    speaker_id: str
    shots: int
    ref_path: Path
    pred_path: Path
    group: Optional[str] = None


def read_manifest(path: str | Path) -> list[ManifestRow]:
    """Parse and validate a manifest CSV.

    Relative audio paths resolve against the manifest's directory. An
    optional free-form `group` column overrides shots-based grouping.
    """
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            fieldnames = reader.fieldnames or []
            missing = [c for c in REQUIRED_COLUMNS if c not in fieldnames]
            if missing:
                raise ManifestError(f"{path}: missing columns {missing}")
            raw_rows = list(reader)
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc

    if not raw_rows:
        raise ManifestError(f"{path}: manifest has zero rows")

    base = path.parent
    rows = []
    seen = set()
    for i, raw in enumerate(raw_rows, start=2):
        pair_id = (raw["pair_id"] or "").strip()
        if not pair_id:
            raise ManifestError(f"{path}: line {i}: empty pair_id")
        if pair_id in seen:
            raise ManifestError(f"{path}: duplicate pair_id {pair_id!r}")
        seen.add(pair_id)
        try:
            shots = int(raw["shots"])
        except (TypeError, ValueError):
            raise ManifestError(f"{path}: line {i}: shots must be an integer") from None
        if not 0 <= shots <= 5:
            raise ManifestError(f"{path}: line {i}: shots must be in 0..5, got {shots}")

        def resolve(p: str) -> Path:
            p = Path(p)
            return p if p.is_absolute() else base / p

        group = (raw.get("group") or "").strip() or None
        rows.append(
            ManifestRow(
                pair_id=pair_id,
                speaker_id=(raw["speaker_id"] or "").strip(),
                shots=shots,
                ref_path=resolve(raw["ref_path"]),
                pred_path=resolve(raw["pred_path"]),
                group=group,
            )
        )
    return rows
