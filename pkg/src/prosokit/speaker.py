"""Speaker-embedding similarity analysis and Gaussian naive Bayes classification.

Embeddings are externally produced 256-dim vectors; this module compares
generated vs actual utterances by cosine similarity and fits a diagonal
Gaussian classifier over speakers.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

EMBED_DIM = 256
VARIANCE_FLOOR = 1e-9
SOURCES = ("actual", "generated")


@dataclass(frozen=True)
class Embedding:
    vector: np.ndarray  # (EMBED_DIM,)
    speaker_id: str
    utterance_id: str
    source: str  # "actual" | "generated"

    def __post_init__(self):
        if self.vector.shape != (EMBED_DIM,):
            raise ValueError(f"embedding must have {EMBED_DIM} dimensions")
        if not np.all(np.isfinite(self.vector)):
            raise ValueError("embedding contains non-finite values")
        if self.source not in SOURCES:
            raise ValueError(f"source must be one of {SOURCES}")


@dataclass(frozen=True)
class SimilarityMatrix:
    """Rows are generated utterances, columns actual ones, entries cosines."""

    values: np.ndarray  # (G, A)
    row_ids: tuple[str, ...]
    col_ids: tuple[str, ...]
    row_speakers: tuple[str, ...]
    col_speakers: tuple[str, ...]


def _vec(x) -> np.ndarray:
    return np.asarray(getattr(x, "vector", x), dtype=np.float64)


def cosine(a, b) -> float:
    """Cosine similarity of two embeddings (or raw vectors)."""
    va, vb = _vec(a), _vec(b)
    na, nb = np.linalg.norm(va), np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine similarity is undefined for zero-norm vectors")
    return float(va @ vb / (na * nb))


def _sorted(embeddings) -> list[Embedding]:
    return sorted(embeddings, key=lambda e: (e.speaker_id, e.utterance_id))


def cross_similarity(generated, actual) -> SimilarityMatrix:
    """Full pairwise cosine matrix, both axes grouped by speaker then utterance."""
    generated = _sorted(generated)
    actual = _sorted(actual)
    if not generated or not actual:
        raise ValueError("both embedding sets must be nonempty")
    g = np.stack([e.vector for e in generated]).astype(np.float64)
    a = np.stack([e.vector for e in actual]).astype(np.float64)
    g_norm = np.linalg.norm(g, axis=1)
    a_norm = np.linalg.norm(a, axis=1)
    if np.any(g_norm == 0) or np.any(a_norm == 0):
        raise ValueError("cosine similarity is undefined for zero-norm vectors")
    values = (g / g_norm[:, None]) @ (a / a_norm[:, None]).T
    return SimilarityMatrix(
        values=values,
        row_ids=tuple(e.utterance_id for e in generated),
        col_ids=tuple(e.utterance_id for e in actual),
        row_speakers=tuple(e.speaker_id for e in generated),
        col_speakers=tuple(e.speaker_id for e in actual),
    )


def similarity_summary(m: SimilarityMatrix) -> dict:
    """Median/mean/count of entries, split by same- vs different-speaker pairs.

    An empty partition reports None statistics with count 0.
    """
    rows = np.asarray(m.row_speakers)
    cols = np.asarray(m.col_speakers)
    same_mask = rows[:, None] == cols[None, :]

    def stats(mask):
        entries = m.values[mask]
        if entries.size == 0:
            return {"median": None, "mean": None, "count": 0}
        return {
            "median": float(np.median(entries)),
            "mean": float(entries.mean()),
            "count": int(entries.size),
        }

    return {"same_speaker": stats(same_mask), "different_speaker": stats(~same_mask)}


@dataclass(frozen=True)
class GnbModel:
    """Diagonal Gaussian naive Bayes over speaker classes."""

    classes: tuple[str, ...]
    means: np.ndarray  # (n_classes, D)
    variances: np.ndarray  # (n_classes, D), floored
    priors: np.ndarray  # (n_classes,)


def gnb_fit(train) -> GnbModel:
    """Per-class Gaussian MLE with a variance floor and empirical priors."""
    train = list(train)
    labels = sorted({e.speaker_id for e in train})
    if len(labels) < 2:
        raise ValueError("need at least two speaker classes to fit")
    vectors = np.stack([e.vector for e in train]).astype(np.float64)
    speaker_ids = np.asarray([e.speaker_id for e in train])

    means, variances, priors = [], [], []
    for label in labels:
        members = vectors[speaker_ids == label]
        means.append(members.mean(axis=0))
        variances.append(np.maximum(members.var(axis=0), VARIANCE_FLOOR))
        priors.append(len(members) / len(train))
    return GnbModel(
        classes=tuple(labels),
        means=np.stack(means),
        variances=np.stack(variances),
        priors=np.asarray(priors),
    )


def gnb_predict(model: GnbModel, e) -> np.ndarray:
    """Posterior probability per class (aligned with model.classes), summing to 1."""
    x = _vec(e)
    log_lik = (
        -0.5 * np.log(2.0 * np.pi * model.variances)
        - (x[None, :] - model.means) ** 2 / (2.0 * model.variances)
    ).sum(axis=1)
    log_post = log_lik + np.log(model.priors)
    log_post -= log_post.max()
    post = np.exp(log_post)
    return post / post.sum()


def gnb_classify(model: GnbModel, e) -> str:
    probs = gnb_predict(model, e)
    return model.classes[int(np.argmax(probs))]


def write_embeddings_csv(path: str | Path, embeddings) -> None:
    """One row per utterance: speaker_id, utterance_id, source, 256 floats."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["speaker_id", "utterance_id", "source"] + [f"e{i}" for i in range(EMBED_DIM)]
        )
        for e in embeddings:
            writer.writerow(
                [e.speaker_id, e.utterance_id, e.source] + [repr(v) for v in e.vector]
            )


def read_embeddings_csv(path: str | Path) -> list[Embedding]:
    path = Path(path)
    out = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row:
                continue
            if i == 0 and row[0] == "speaker_id":
                continue
            if len(row) != 3 + EMBED_DIM:
                raise ValueError(
                    f"{path}: row {i + 1} has {len(row)} columns, expected {3 + EMBED_DIM}"
                )
            out.append(
                Embedding(
                    vector=np.asarray([float(v) for v in row[3:]]),
                    speaker_id=row[0],
                    utterance_id=row[1],
                    source=row[2],
                )
            )
    if not out:
        raise ValueError(f"{path}: no embeddings found")
    return out


def write_similarity_csv(path: str | Path, m: SimilarityMatrix) -> None:
    """Matrix CSV with labeled header row and first column (speaker/utterance)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [""] + [f"{spk}/{utt}" for spk, utt in zip(m.col_speakers, m.col_ids)]
        )
        for i, (spk, utt) in enumerate(zip(m.row_speakers, m.row_ids)):
            writer.writerow([f"{spk}/{utt}"] + [repr(v) for v in m.values[i]])
