"""Self-check suite for the normalization kernels: invariants plus gradients.

Backs the `kernel-check` CLI subcommand. Every check is seeded and returns a
pass/fail row; the gradient check compares the analytic backward against
central finite differences.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .adaptive import attention_adaptive_norm, clamp_rho, conv_adaptive_norm
from .blocks import fft_block_forward
from .grad import adaptive_norm_forward, backward_adaptive_norm
from .ops import instance_norm, layer_norm, scaled_attention, softmax_rows
from .weights import (
    AffinePair,
    AttentionNormWeights,
    ConvNormWeights,
    ConvWeights,
    FftBlockConfig,
    FftBlockWeights,
    NormKernelConfig,
    SelfAttentionWeights,
    SpeakerAffineWeights,
    init_fft_block_weights,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _norm_statistics(rng, kind: str) -> CheckResult:
    worst_mean = 0.0
    worst_var = 0.0
    for _ in range(100):
        shape = (int(rng.integers(8, 24)), int(rng.integers(8, 24)), int(rng.integers(1, 4)))
        x = rng.normal(size=shape)
        if kind == "layer":
            normed = layer_norm(x)
            axis = 1
        else:
            normed = instance_norm(x)
            axis = 0
        worst_mean = max(worst_mean, float(np.abs(normed.mean(axis=axis)).max()))
        worst_var = max(worst_var, float(np.abs(normed.var(axis=axis) - 1.0).max()))
    ok = worst_mean < 1e-9 and worst_var < 1e-6
    return CheckResult(
        f"{kind}-norm statistics",
        ok,
        f"max |mean| {worst_mean:.2e}, max |var-1| {worst_var:.2e}",
    )


def _blend_convexity(rng) -> CheckResult:
    worst = 0.0
    for rho in (0.0, 0.5, 0.7, 1.0):
        x = rng.normal(size=(12, 6, 2))
        ln = AffinePair(gamma=rng.normal(size=6), beta=rng.normal(size=6))
        se = AffinePair(gamma=rng.normal(size=6), beta=rng.normal(size=6))
        out = conv_adaptive_norm(x, ln, se, rho)
        b_ln = ln.gamma[None, :, None] * layer_norm(x) + ln.beta[None, :, None]
        b_in = se.gamma[None, :, None] * instance_norm(x) + se.beta[None, :, None]
        worst = max(worst, float(np.abs(out - (rho * b_ln + (1 - rho) * b_in)).max()))
        lo = np.minimum(b_ln, b_in) - 1e-12
        hi = np.maximum(b_ln, b_in) + 1e-12
        if not (np.all(out >= lo) and np.all(out <= hi)):
            return CheckResult("blend endpoints/convexity", False, "output escaped branch bounds")
    return CheckResult("blend endpoints/convexity", worst <= 1e-12, f"max deviation {worst:.2e}")


def _clamp_bounds(rng) -> CheckResult:
    raw = rng.uniform(-5, 5, size=1000)
    clamped = np.array([clamp_rho(v) for v in raw])
    inside = np.all((clamped >= 0.0) & (clamped <= 1.0))
    identity = np.all(clamped[(raw >= 0) & (raw <= 1)] == raw[(raw >= 0) & (raw <= 1)])
    return CheckResult("rho clamp bounds", bool(inside and identity), "1000 raw values")


def _attention_properties(rng) -> CheckResult:
    for divisor in (np.sqrt(7.0), 7.0):
        q = rng.normal(size=(5, 7))
        k = rng.normal(size=(9, 7))
        v = rng.normal(size=(9, 3))
        weights = softmax_rows((q @ k.T) / divisor)
        if float(np.abs(weights.sum(axis=1) - 1.0).max()) > 1e-9:
            return CheckResult("attention properties", False, "softmax rows not normalized")
        out = scaled_attention(q, k, v, divisor)
        lo = v.min(axis=0) - 1e-12
        hi = v.max(axis=0) + 1e-12
        if not (np.all(out >= lo) and np.all(out <= hi)):
            return CheckResult("attention properties", False, "output escaped value bounds")
        single = scaled_attention(q, k[:1], v[:1], divisor)
        if not np.array_equal(single, np.repeat(v[:1], len(q), axis=0)):
            return CheckResult("attention properties", False, "single-key form not exact")
        uniform = scaled_attention(np.zeros((4, 7)), np.zeros((8, 7)), v[:8], divisor)
        if float(np.abs(uniform - v[:8].mean(axis=0)).max()) > 1e-12:
            return CheckResult("attention properties", False, "uniform-logit form off")
    return CheckResult("attention properties", True, "both divisor conventions")


def _zero_fft_weights(rng, channels: int, conv_filter: int, kernel: int) -> FftBlockWeights:
    """All multiplicative weights and biases zero; layer-norm betas random."""
    zeros_cw = lambda o, i: ConvWeights(np.zeros((o, i, kernel)), np.zeros(o))  # noqa: E731
    attn = SelfAttentionWeights(
        *(np.zeros((channels, channels)) for _ in range(4)),
        *(np.zeros(channels) for _ in range(4)),
    )
    speaker = SpeakerAffineWeights(
        initial=zeros_cw(channels * 2, channels),
        gamma_head=zeros_cw(channels, channels * 2),
        beta_head=zeros_cw(channels, channels * 2),
    )
    make_norm = lambda: ConvNormWeights(  # noqa: E731
        ln=AffinePair(gamma=np.zeros(channels), beta=rng.normal(size=channels)),
        speaker=speaker,
        rho=1.0,
    )
    return FftBlockWeights(
        attn=attn,
        norm1=make_norm(),
        conv1=zeros_cw(conv_filter, channels),
        conv2=zeros_cw(channels, conv_filter),
        norm2=make_norm(),
    )


def _fft_block_checks(rng) -> CheckResult:
    channels, conv_filter = 16, 32
    for seed_trial in range(10):
        x = rng.normal(size=(6, channels, 2))
        se = rng.normal(size=channels)
        weights = _zero_fft_weights(rng, channels, conv_filter, kernel=9)
        out = fft_block_forward(x, se, np.zeros(6), np.zeros(6), weights)
        if out.shape != x.shape:
            return CheckResult("fft block", False, "shape not preserved")
        expected = np.broadcast_to(weights.norm2.ln.beta[None, :, None], out.shape)
        if not np.array_equal(out, expected):
            return CheckResult("fft block", False, f"zero-weight form off at trial {seed_trial}")
    return CheckResult("fft block", True, "shape + zero-weight closed form, 10 trials")


def _gradient_check(rng, trials: int = 100, h: float = 1e-5) -> CheckResult:
    worst = 0.0
    for _ in range(trials):
        shape = (7, 5, 2)
        params = {
            "x": rng.normal(size=shape),
            "ln_gamma": rng.normal(size=5),
            "ln_beta": rng.normal(size=5),
            "se_gamma": rng.normal(size=5),
            "se_beta": rng.normal(size=5),
            "pitch_gamma": rng.normal(size=(7, 5)),
            "pitch_beta": rng.normal(size=(7, 5)),
            "energy_gamma": rng.normal(size=(7, 5)),
            "energy_beta": rng.normal(size=(7, 5)),
            "rho": np.asarray(rng.uniform(0.1, 0.9)),
        }
        upstream = rng.normal(size=shape)

        def loss(p):
            out, _ = adaptive_norm_forward(
                p["x"],
                AffinePair(p["ln_gamma"], p["ln_beta"]),
                AffinePair(p["se_gamma"], p["se_beta"]),
                AffinePair(p["pitch_gamma"], p["pitch_beta"]),
                AffinePair(p["energy_gamma"], p["energy_beta"]),
                float(p["rho"]),
            )
            return float((out * upstream).sum())

        _, cache = adaptive_norm_forward(
            params["x"],
            AffinePair(params["ln_gamma"], params["ln_beta"]),
            AffinePair(params["se_gamma"], params["se_beta"]),
            AffinePair(params["pitch_gamma"], params["pitch_beta"]),
            AffinePair(params["energy_gamma"], params["energy_beta"]),
            float(params["rho"]),
        )
        grads = backward_adaptive_norm(upstream, cache)

        for name, value in params.items():
            analytic = np.asarray(getattr(grads, name), dtype=np.float64)
            flat = value.reshape(-1)
            fd = np.empty(flat.shape)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + h
                up = loss(params)
                flat[i] = orig - h
                down = loss(params)
                flat[i] = orig
                fd[i] = (up - down) / (2 * h)
            fd = fd.reshape(value.shape)
            err = np.abs(analytic - fd) / np.maximum(
                np.maximum(np.abs(analytic), np.abs(fd)), 1.0
            )
            worst = max(worst, float(err.max()))
    return CheckResult(
        "gradient vs finite differences",
        worst < 1e-5,
        f"max relative error {worst:.2e} over {trials} trials",
    )


def _determinism(seed: int) -> CheckResult:
    outs = []
    for _ in range(2):
        rng = np.random.default_rng(seed)
        cfg = NormKernelConfig(
            channels=12, initial_filter=24, affine_filter=12, attn_heads=6,
            speaker_dim=10, concat_dim=12,
        )
        weights = init_fft_block_weights(
            rng, FftBlockConfig(hidden=12, heads=2, conv_filter=24), cfg, norm="attention"
        )
        x = rng.normal(size=(5, 12, 2))
        se = rng.normal(size=10)
        outs.append(
            fft_block_forward(x, se, rng.normal(size=5), rng.normal(size=5), weights)
        )
    ok = np.array_equal(outs[0], outs[1])
    return CheckResult("seeded determinism", ok, "two runs bit-identical")


def run_kernel_checks(seed: int = 0) -> list[CheckResult]:
    """Run every invariant and gradient check; each row is independent."""
    rng = np.random.default_rng(seed)
    results = [
        _norm_statistics(rng, "layer"),
        _norm_statistics(rng, "instance"),
        _blend_convexity(rng),
        _clamp_bounds(rng),
        _attention_properties(rng),
        _fft_block_checks(rng),
        _gradient_check(rng),
        _determinism(seed),
    ]
    return results
