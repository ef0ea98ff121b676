import numpy as np
import pytest

from prosokit.kernels.ops import (
    attention_divisor,
    conv1d,
    instance_norm,
    layer_norm,
    relu,
    scaled_attention,
    softmax_rows,
)
from prosokit.kernels.weights import AffinePair, ConvWeights


def test_layer_norm_constant_channels_is_zero():
    x = np.full((4, 8, 2), 0.7)
    out = layer_norm(x)
    np.testing.assert_allclose(out, 0.0, atol=1e-9)


def test_layer_norm_statistics():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(10, 32, 3))
    out = layer_norm(x)
    assert np.abs(out.mean(axis=1)).max() < 1e-9
    assert np.abs(out.var(axis=1) - 1.0).max() < 1e-6


def test_layer_norm_affine():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(5, 6, 2))
    beta = rng.normal(size=6)
    out = layer_norm(x, AffinePair(gamma=np.zeros(6), beta=beta))
    np.testing.assert_array_equal(out, np.broadcast_to(beta[None, :, None], out.shape))
    with pytest.raises(ValueError):
        layer_norm(x, AffinePair(gamma=np.zeros(5), beta=np.zeros(5)))


def test_instance_norm_single_frame_is_zero():
    rng = np.random.default_rng(2)
    out = instance_norm(rng.normal(size=(1, 6, 2)))
    np.testing.assert_allclose(out, 0.0, atol=1e-3)


def test_instance_norm_statistics():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(64, 5, 2))
    out = instance_norm(x)
    assert np.abs(out.mean(axis=0)).max() < 1e-9
    assert np.abs(out.var(axis=0) - 1.0).max() < 1e-6


def test_instance_norm_affine_input_invariance():
    rng = np.random.default_rng(4)
    x = rng.normal(size=(32, 4, 2))
    a = 2.5
    b = rng.normal(size=(1, 4, 2))  # per-(channel, batch) shift
    np.testing.assert_allclose(instance_norm(a * x + b), instance_norm(x), atol=1e-9)


def test_tensor_rank_checked():
    with pytest.raises(ValueError):
        layer_norm(np.zeros((3, 4)))
    with pytest.raises(ValueError):
        instance_norm(np.zeros(5))


def test_conv1d_identity_kernel():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(10, 1, 2))
    kernel = np.zeros((1, 1, 9))
    kernel[0, 0, 4] = 1.0
    out = conv1d(x, ConvWeights(kernel=kernel, bias=np.zeros(1)))
    np.testing.assert_allclose(out, x, atol=1e-15)


def test_conv1d_tap_counts():
    x = np.ones((16, 1, 1))
    w = ConvWeights(kernel=np.ones((1, 1, 9)), bias=np.zeros(1))
    out = conv1d(x, w)[:, 0, 0]
    np.testing.assert_array_equal(out[4:-4], 9.0)
    np.testing.assert_array_equal(out[:5], [5.0, 6.0, 7.0, 8.0, 9.0])
    np.testing.assert_array_equal(out[-5:], [9.0, 8.0, 7.0, 6.0, 5.0])


def test_conv1d_linearity():
    rng = np.random.default_rng(6)
    w = ConvWeights(kernel=rng.normal(size=(3, 4, 5)), bias=np.zeros(3))
    x = rng.normal(size=(12, 4, 2))
    y = rng.normal(size=(12, 4, 2))
    a, b = 1.3, -0.7
    lhs = conv1d(a * x + b * y, w)
    rhs = a * conv1d(x, w) + b * conv1d(y, w)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_conv1d_shape_checks():
    x = np.zeros((4, 3, 1))
    with pytest.raises(ValueError):
        conv1d(x, ConvWeights(kernel=np.zeros((2, 5, 9)), bias=np.zeros(2)))
    with pytest.raises(ValueError):
        conv1d(x, ConvWeights(kernel=np.zeros((2, 3, 4)), bias=np.zeros(2)))


def test_relu():
    rng = np.random.default_rng(7)
    x = rng.normal(size=(6, 3, 2))
    out = relu(x)
    assert out.min() >= 0.0
    np.testing.assert_array_equal(out[x > 0], x[x > 0])


def test_softmax_rows_sum_to_one():
    rng = np.random.default_rng(8)
    w = softmax_rows(rng.normal(size=(40, 17)) * 30)
    np.testing.assert_allclose(w.sum(axis=1), 1.0, atol=1e-9)
    assert np.all(w >= 0)


def test_attention_single_key_exact():
    rng = np.random.default_rng(9)
    q = rng.normal(size=(6, 4))
    k = rng.normal(size=(1, 4))
    v = rng.normal(size=(1, 3))
    for divisor in (2.0, 4.0):
        out = scaled_attention(q, k, v, divisor)
        np.testing.assert_array_equal(out, np.repeat(v, 6, axis=0))


def test_attention_uniform_logits_exact_on_integer_values():
    # 8 keys and integer-valued V make every float op exact, so the
    # uniform-softmax output equals the row mean bit for bit
    rng = np.random.default_rng(10)
    v = rng.integers(-8, 9, size=(8, 5)).astype(np.float64)
    out = scaled_attention(np.zeros((3, 4)), np.zeros((8, 4)), v, np.sqrt(4.0))
    np.testing.assert_array_equal(out, np.broadcast_to(v.mean(axis=0), (3, 5)))


def test_attention_uniform_logits_float_case():
    rng = np.random.default_rng(11)
    v = rng.normal(size=(9, 5))
    q = rng.normal(size=(3, 4))
    k = np.zeros((9, 4))  # all logits equal regardless of q
    out = scaled_attention(q, k, v, 2.0)
    np.testing.assert_allclose(out, np.broadcast_to(v.mean(axis=0), (3, 5)), atol=1e-12)


def test_attention_outputs_within_value_bounds():
    rng = np.random.default_rng(12)
    for divisor in (np.sqrt(6.0), 6.0):
        q = rng.normal(size=(10, 6)) * 3
        k = rng.normal(size=(14, 6)) * 3
        v = rng.normal(size=(14, 4))
        out = scaled_attention(q, k, v, divisor)
        assert np.all(out >= v.min(axis=0) - 1e-12)
        assert np.all(out <= v.max(axis=0) + 1e-12)


def test_attention_validation():
    with pytest.raises(ValueError):
        scaled_attention(np.zeros((2, 3)), np.zeros((2, 4)), np.zeros((2, 2)), 1.0)
    with pytest.raises(ValueError):
        scaled_attention(np.zeros((2, 3)), np.zeros((4, 3)), np.zeros((2, 2)), 1.0)
    with pytest.raises(ValueError):
        scaled_attention(np.zeros((2, 3)), np.zeros((2, 3)), np.zeros((2, 2)), 0.0)


def test_attention_divisor_modes():
    assert attention_divisor(43, "sqrt_dk") == pytest.approx(np.sqrt(43))
    assert attention_divisor(43, "dk") == 43.0
    with pytest.raises(ValueError):
        attention_divisor(43, "cube")
