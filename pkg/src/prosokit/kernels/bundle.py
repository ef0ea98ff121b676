"""Flat binary serialization for kernel weight bundles.

Layout: magic "KWB1", uint32 version, uint32 tensor count, then per tensor a
uint32 ndim followed by uint64 dims; after the header, row-major float64
data in declaration order. A CSV manifest (name, shape) accompanies the
binary so bundles stay self-describing.
"""
from __future__ import annotations

import csv
import dataclasses
import struct
from collections import OrderedDict
from pathlib import Path

import numpy as np

MAGIC = b"KWB1"
VERSION = 1


class BundleFormatError(Exception):
    """Binary bundle or its manifest is malformed or inconsistent."""


def manifest_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".manifest.csv")


def flatten_weights(obj, prefix: str = "") -> "OrderedDict[str, np.ndarray]":
    """Walk a weights dataclass into (dotted-name, array) pairs in field order.

    Scalar fields (e.g. mixing weights) become 0-d arrays.
    """
    out: OrderedDict[str, np.ndarray] = OrderedDict()
    if dataclasses.is_dataclass(obj):
        for f in dataclasses.fields(obj):
            name = f"{prefix}{f.name}" if not prefix else f"{prefix}.{f.name}"
            out.update(flatten_weights(getattr(obj, f.name), name))
        return out
    if isinstance(obj, np.ndarray):
        out[prefix] = obj.astype(np.float64)
    elif isinstance(obj, (int, float)):
        out[prefix] = np.asarray(float(obj))
    else:
        raise TypeError(f"cannot serialize field {prefix!r} of type {type(obj).__name__}")
    return out


def save_weight_bundle(path: str | Path, tensors: "OrderedDict[str, np.ndarray] | dict") -> None:
    path = Path(path)
    items = [(name, np.ascontiguousarray(t, dtype=np.float64)) for name, t in tensors.items()]

    header = bytearray()
    header += MAGIC
    header += struct.pack("<II", VERSION, len(items))
    for _, tensor in items:
        header += struct.pack("<I", tensor.ndim)
        header += struct.pack(f"<{tensor.ndim}Q", *tensor.shape)
    with open(path, "wb") as fh:
        fh.write(bytes(header))
        for _, tensor in items:
            fh.write(tensor.tobytes(order="C"))

    with open(manifest_path(path), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "name", "shape"])
        for i, (name, tensor) in enumerate(items):
            writer.writerow([i, name, "x".join(str(d) for d in tensor.shape)])


def load_weight_bundle(path: str | Path) -> "OrderedDict[str, np.ndarray]":
    path = Path(path)
    raw = path.read_bytes()
    if raw[:4] != MAGIC:
        raise BundleFormatError(f"{path}: bad magic {raw[:4]!r}")
    version, count = struct.unpack_from("<II", raw, 4)
    if version != VERSION:
        raise BundleFormatError(f"{path}: unsupported version {version}")

    offset = 12
    shapes = []
    for _ in range(count):
        (ndim,) = struct.unpack_from("<I", raw, offset)
        offset += 4
        dims = struct.unpack_from(f"<{ndim}Q", raw, offset)
        offset += 8 * ndim
        shapes.append(tuple(int(d) for d in dims))

    names = _read_manifest(manifest_path(path), count)
    out: OrderedDict[str, np.ndarray] = OrderedDict()
    for name, shape in zip(names, shapes):
        n_values = int(np.prod(shape)) if shape else 1
        data = np.frombuffer(raw, dtype="<f8", count=n_values, offset=offset)
        offset += 8 * n_values
        out[name] = data.reshape(shape).copy()
    if offset != len(raw):
        raise BundleFormatError(f"{path}: {len(raw) - offset} trailing bytes")
    return out


def _read_manifest(path: Path, expected: int) -> list[str]:
    if not path.exists():
        raise BundleFormatError(f"missing manifest {path}")
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if len(rows) != expected:
        raise BundleFormatError(
            f"{path}: manifest lists {len(rows)} tensors, binary holds {expected}"
        )
    return [row["name"] for row in rows]
