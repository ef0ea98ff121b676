"""Evaluation configuration and its flat key=value file format."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from .yin import YinConfig

MCD_SCALINGS = ("none", "db")
ATTENTION_DIVISORS = ("sqrt_dk", "dk")


@dataclass(frozen=True)
class EvalConfig:
    sample_rate: int = 22050
    frame_size: int = 1024
    hop: int = 256
    n_mels: int = 80
    mfcc_coeffs: int = 13
    gpe_threshold: float = 0.2
    mcd_scaling: str = "none"
    attention_divisor: str = "sqrt_dk"
    yin: YinConfig = field(default_factory=YinConfig)

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if self.frame_size < 1 or self.hop < 1:
            raise ValueError("frame_size and hop must be >= 1")
        if not 1 <= self.mfcc_coeffs <= self.n_mels - 1:
            raise ValueError("mfcc_coeffs must be in [1, n_mels - 1]")
        if not 0 < self.gpe_threshold:
            raise ValueError("gpe_threshold must be positive")
        if self.mcd_scaling not in MCD_SCALINGS:
            raise ValueError(f"mcd_scaling must be one of {MCD_SCALINGS}")
        if self.attention_divisor not in ATTENTION_DIVISORS:
            raise ValueError(f"attention_divisor must be one of {ATTENTION_DIVISORS}")


# (key, type) pairs in serialization order; yin.* keys address the nested config.
_FIELDS = [
    ("sample_rate", int),
    ("frame_size", int),
    ("hop", int),
    ("n_mels", int),
    ("mfcc_coeffs", int),
    ("gpe_threshold", float),
    ("mcd_scaling", str),
    ("attention_divisor", str),
    ("yin.frame_size", int),
    ("yin.hop", int),
    ("yin.f_min", float),
    ("yin.f_max", float),
    ("yin.threshold", float),
]


def _get(cfg: EvalConfig, key: str):
    if key.startswith("yin."):
        return getattr(cfg.yin, key[4:])
    return getattr(cfg, key)


def dumps(cfg: EvalConfig) -> str:
    lines = []
    for key, typ in _FIELDS:
        value = _get(cfg, key)
        text = value if typ is str else repr(value)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> EvalConfig:
    """Parse the flat key = value format; unknown keys are an error."""
    types = dict(_FIELDS)
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in types:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        raw[key] = value.strip()

    cfg = EvalConfig()
    yin_kwargs = {}
    top_kwargs = {}
    for key, value in raw.items():
        typ = types[key]
        parsed = value if typ is str else typ(value)
        if key.startswith("yin."):
            yin_kwargs[key[4:]] = parsed
        else:
            top_kwargs[key] = parsed
    if yin_kwargs:
        top_kwargs["yin"] = replace(cfg.yin, **yin_kwargs)
    return replace(cfg, **top_kwargs)


def read_config(path: str | Path) -> EvalConfig:
    return loads(Path(path).read_text())


def write_config(cfg: EvalConfig, path: str | Path) -> None:
    Path(path).write_text(dumps(cfg))
