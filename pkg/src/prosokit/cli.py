"""Command-line interface: batch evaluation, feature dumps, and self-checks.

Exit codes: 0 success, 1 validation error, 2 partial failure (some manifest
rows errored but the batch completed).
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import config as config_mod
from .audio import AudioReadError, load_wav
from .dsp import frame_energy, mel_log_spectrogram, mfcc, stft_magnitude
from .kernels.adaptive import scale_tracks
from .kernels.checks import run_kernel_checks
from .manifest import ManifestError, read_manifest
from .report import render_table
from .runner import run_eval
from .speaker import (
    cross_similarity,
    gnb_fit,
    gnb_predict,
    read_embeddings_csv,
    similarity_summary,
    write_similarity_csv,
)
from .yin import yin_track


class CliError(Exception):
    """Validation failure reported as a one-line diagnostic, exit code 1."""


def _load_config(path: str | None) -> config_mod.EvalConfig:
    if path is None:
        return config_mod.EvalConfig()
    try:
        return config_mod.read_config(path)
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}") from exc
    except ValueError as exc:
        raise CliError(f"bad config {path}: {exc}") from exc


def _load_audio(path: str):
    try:
        return load_wav(path)
    except AudioReadError as exc:
        raise CliError(str(exc)) from exc


def _cmd_eval(args) -> int:
    cfg = _load_config(args.config)
    try:
        rows = read_manifest(args.manifest)
    except ManifestError as exc:
        raise CliError(str(exc)) from exc

    table = run_eval(rows, cfg, jobs=args.jobs)

    out_dir = Path(args.out)
    pairs_dir = out_dir / "pairs"
    pairs_dir.mkdir(parents=True, exist_ok=True)
    for outcome in table.pairs:
        (pairs_dir / f"{outcome.pair_id}.json").write_text(
            json.dumps(outcome.to_json_dict(), indent=2)
        )
    for fmt, name in (("markdown", "report.md"), ("csv", "report.csv"), ("json", "report.json")):
        (out_dir / name).write_text(render_table(table, fmt))

    print(render_table(table, "markdown"), end="")
    n_errors = sum(1 for o in table.pairs if o.status != "ok")
    if n_errors:
        print(f"{n_errors} of {len(table.pairs)} pairs failed; see per-pair JSON", file=sys.stderr)
        return 2
    return 0


def _cmd_pitch(args) -> int:
    cfg = _load_config(args.config)
    wave = _load_audio(args.infile)
    if wave.sample_rate != cfg.sample_rate:
        raise CliError(
            f"{args.infile} is {wave.sample_rate} Hz, config expects {cfg.sample_rate} Hz"
        )
    track = yin_track(wave, cfg.yin)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame_index", "time_sec", "f0_hz", "voiced", "aperiodicity"])
        for t in range(len(track)):
            writer.writerow(
                [t, repr(track.times[t]), repr(track.f0[t]), int(track.voiced[t]),
                 repr(track.aperiodicity[t])]
            )
    return 0


def _cmd_features(args) -> int:
    cfg = _load_config(args.config)
    wave = _load_audio(args.infile)
    if wave.sample_rate != cfg.sample_rate:
        raise CliError(
            f"{args.infile} is {wave.sample_rate} Hz, config expects {cfg.sample_rate} Hz"
        )
    spec = stft_magnitude(wave, cfg.frame_size, cfg.hop)
    if args.energy:
        header = ["frame_index", "energy"]
        rows = [[t, repr(v)] for t, v in enumerate(frame_energy(spec).values)]
    elif args.mel:
        logmel = mel_log_spectrogram(spec, cfg.n_mels)
        header = ["frame_index"] + [f"mel_{m}" for m in range(cfg.n_mels)]
        rows = [[t] + [repr(v) for v in frame] for t, frame in enumerate(logmel.frames)]
    else:
        n_coeffs = args.mfcc if args.mfcc is not None else cfg.mfcc_coeffs
        ceps = mfcc(mel_log_spectrogram(spec, cfg.n_mels), n_coeffs)
        header = ["frame_index"] + [f"mfcc_{k}" for k in range(1, n_coeffs + 1)]
        rows = [[t] + [repr(v) for v in frame] for t, frame in enumerate(ceps.frames)]
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return 0


def _cmd_simcheck(args) -> int:
    try:
        generated = read_embeddings_csv(args.generated)
        actual = read_embeddings_csv(args.actual)
    except OSError as exc:
        raise CliError(str(exc)) from exc
    except ValueError as exc:
        raise CliError(str(exc)) from exc

    matrix = cross_similarity(generated, actual)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_similarity_csv(out_dir / "similarity_matrix.csv", matrix)
    (out_dir / "summary.json").write_text(json.dumps(similarity_summary(matrix), indent=2))

    if args.gnb:
        try:
            model = gnb_fit(actual)
        except ValueError as exc:
            raise CliError(f"cannot fit classifier: {exc}") from exc
        with open(out_dir / "gnb_posteriors.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["utterance_id", "true_speaker", "predicted_speaker"]
                + [f"p_{c}" for c in model.classes]
            )
            hits = 0
            for e in generated:
                probs = gnb_predict(model, e)
                predicted = model.classes[int(np.argmax(probs))]
                hits += predicted == e.speaker_id
                writer.writerow(
                    [e.utterance_id, e.speaker_id, predicted] + [repr(p) for p in probs]
                )
        print(f"gnb accuracy on generated set: {hits}/{len(generated)}")
    return 0


def _cmd_kernel_check(args) -> int:
    results = run_kernel_checks(seed=args.seed)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {status}  {r.detail}")
    return 0 if all(r.passed for r in results) else 1


def _read_track_csv(path: str, column: str) -> np.ndarray:
    """Read one track column; falls back to the last column of headerless files."""
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except OSError as exc:
        raise CliError(f"cannot read track {path}: {exc}") from exc
    if not rows:
        raise CliError(f"{path}: empty track file")
    if column in rows[0]:
        idx, data = rows[0].index(column), rows[1:]
    else:
        idx, data = -1, rows
        try:
            float(rows[0][-1])
        except ValueError:
            data = rows[1:]
    if not data:
        raise CliError(f"{path}: no data rows")
    try:
        return np.asarray([float(r[idx]) for r in data])
    except (ValueError, IndexError) as exc:
        raise CliError(f"{path}: cannot parse track values: {exc}") from exc


def _cmd_morph_tracks(args) -> int:
    pitch = _read_track_csv(args.pitch, "f0_hz")
    energy = _read_track_csv(args.energy, "energy")
    if len(pitch) != len(energy):
        raise CliError(
            f"track lengths differ: {len(pitch)} pitch vs {len(energy)} energy frames"
        )
    try:
        pitch2, energy2 = scale_tracks(pitch, energy, args.alpha_f0, args.alpha_e)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["frame_index", "f0_hz", "energy"])
        for t, (p, e) in enumerate(zip(pitch2, energy2)):
            writer.writerow([t, repr(p), repr(e)])
    finally:
        if args.out:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prosokit",
        description="Prosody evaluation metrics, pitch tracking, and kernel checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="batch-evaluate a manifest of audio pairs")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("pitch", help="dump a YIN pitch track as CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    p.set_defaults(func=_cmd_pitch)

    p = sub.add_parser("features", help="dump mel / MFCC / energy features as CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--mel", action="store_true")
    mode.add_argument("--mfcc", type=int, default=None, metavar="K")
    mode.add_argument("--energy", action="store_true")
    p.set_defaults(func=_cmd_features)

    p = sub.add_parser("simcheck", help="speaker-embedding similarity analysis")
    p.add_argument("--generated", required=True)
    p.add_argument("--actual", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--gnb", action="store_true", help="also fit/apply the classifier")
    p.set_defaults(func=_cmd_simcheck)

    p = sub.add_parser("kernel-check", help="run the kernel invariant and gradient suite")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_kernel_check)

    p = sub.add_parser("morph-tracks", help="scale pitch/energy tracks")
    p.add_argument("--pitch", required=True)
    p.add_argument("--energy", required=True)
    p.add_argument("--alpha-f0", type=float, required=True)
    p.add_argument("--alpha-e", type=float, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_morph_tracks)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
