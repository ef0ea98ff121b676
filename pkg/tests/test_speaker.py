import math

import numpy as np
import pytest

from prosokit.speaker import (
    EMBED_DIM,
    VARIANCE_FLOOR,
    Embedding,
    cosine,
    cross_similarity,
    gnb_classify,
    gnb_fit,
    gnb_predict,
    read_embeddings_csv,
    similarity_summary,
    write_embeddings_csv,
    write_similarity_csv,
)


def embed(vector, speaker="s1", utt="u1", source="actual"):
    v = np.zeros(EMBED_DIM)
    v[: len(vector)] = vector
    return Embedding(vector=v, speaker_id=speaker, utterance_id=utt, source=source)


def random_embedding(rng, speaker, utt, source="actual", center=None):
    v = rng.normal(size=EMBED_DIM)
    if center is not None:
        v = v + center
    return Embedding(vector=v, speaker_id=speaker, utterance_id=utt, source=source)


# ---------------------------------------------------------------------------
# cosine
# ---------------------------------------------------------------------------

def test_cosine_identical():
    e = embed([1.0, 2.0, 3.0])
    assert cosine(e, e) == pytest.approx(1.0, abs=1e-12)


def test_cosine_orthogonal():
    assert cosine(embed([1.0, 0.0]), embed([0.0, 1.0])) == pytest.approx(0.0, abs=1e-12)


def test_cosine_opposed():
    e = embed([0.5, -1.5, 2.0])
    flipped = Embedding(
        vector=-e.vector, speaker_id="s2", utterance_id="u2", source="generated"
    )
    assert cosine(e, flipped) == pytest.approx(-1.0, abs=1e-12)


def test_cosine_zero_norm_rejected():
    with pytest.raises(ValueError):
        cosine(embed([0.0]), embed([1.0]))


def test_cosine_scale_invariance():
    rng = np.random.default_rng(0)
    a = rng.normal(size=EMBED_DIM)
    b = rng.normal(size=EMBED_DIM)
    base = cosine(a, b)
    for alpha, beta in ((0.001, 7.0), (123.0, 0.5)):
        assert cosine(alpha * a, beta * b) == pytest.approx(base, abs=1e-12)
    assert -1.0 - 1e-12 <= base <= 1.0 + 1e-12


# ---------------------------------------------------------------------------
# cross similarity
# ---------------------------------------------------------------------------

def test_cross_similarity_self_diagonal():
    rng = np.random.default_rng(1)
    embeddings = [random_embedding(rng, f"s{i}", f"u{i}") for i in range(4)]
    matrix = cross_similarity(embeddings, embeddings)
    np.testing.assert_allclose(np.diag(matrix.values), 1.0, atol=1e-12)


def test_cross_similarity_shape_and_order():
    rng = np.random.default_rng(2)
    generated = [
        random_embedding(rng, "s2", "g1", "generated"),
        random_embedding(rng, "s1", "g2", "generated"),
    ]
    actual = [random_embedding(rng, s, u) for s, u in (("s2", "a1"), ("s1", "a2"), ("s1", "a3"))]
    matrix = cross_similarity(generated, actual)
    assert matrix.values.shape == (2, 3)
    assert matrix.row_speakers == ("s1", "s2")  # sorted by speaker then utterance
    assert matrix.col_ids == ("a2", "a3", "a1")


def test_cross_similarity_matches_pairwise_oracle():
    rng = np.random.default_rng(3)
    generated = [random_embedding(rng, f"s{i%2}", f"g{i}", "generated") for i in range(3)]
    actual = [random_embedding(rng, f"s{i%2}", f"a{i}") for i in range(4)]
    matrix = cross_similarity(generated, actual)
    gen_sorted = sorted(generated, key=lambda e: (e.speaker_id, e.utterance_id))
    act_sorted = sorted(actual, key=lambda e: (e.speaker_id, e.utterance_id))
    for i, ge in enumerate(gen_sorted):
        for j, ae in enumerate(act_sorted):
            assert matrix.values[i, j] == pytest.approx(cosine(ge, ae), abs=1e-12)


def test_cross_similarity_empty_rejected():
    rng = np.random.default_rng(4)
    with pytest.raises(ValueError):
        cross_similarity([], [random_embedding(rng, "s", "u")])


# ---------------------------------------------------------------------------
# summary
# ---------------------------------------------------------------------------

def test_summary_hand_example():
    rng = np.random.default_rng(5)
    generated = [
        random_embedding(rng, "a", "g1", "generated"),
        random_embedding(rng, "b", "g2", "generated"),
    ]
    actual = [random_embedding(rng, "a", "a1"), random_embedding(rng, "b", "a2")]
    matrix = cross_similarity(generated, actual)
    # overwrite values so the partitions are known exactly
    values = np.array([[0.8, 0.1], [0.3, 0.9]])
    matrix = type(matrix)(
        values=values,
        row_ids=matrix.row_ids,
        col_ids=matrix.col_ids,
        row_speakers=matrix.row_speakers,
        col_speakers=matrix.col_speakers,
    )
    summary = similarity_summary(matrix)
    assert summary["same_speaker"]["median"] == pytest.approx(0.85)
    assert summary["same_speaker"]["count"] == 2
    assert summary["different_speaker"]["median"] == pytest.approx(0.2)
    assert summary["different_speaker"]["mean"] == pytest.approx(0.2)


def test_summary_empty_partition():
    rng = np.random.default_rng(6)
    generated = [random_embedding(rng, "a", "g1", "generated")]
    actual = [random_embedding(rng, "a", "a1")]
    summary = similarity_summary(cross_similarity(generated, actual))
    assert summary["different_speaker"] == {"median": None, "mean": None, "count": 0}
    assert summary["same_speaker"]["count"] == 1


def test_summary_transpose_invariance():
    rng = np.random.default_rng(7)
    generated = [random_embedding(rng, f"s{i%3}", f"g{i}", "generated") for i in range(5)]
    actual = [random_embedding(rng, f"s{i%3}", f"a{i}") for i in range(4)]
    matrix = cross_similarity(generated, actual)
    flipped = type(matrix)(
        values=matrix.values.T,
        row_ids=matrix.col_ids,
        col_ids=matrix.row_ids,
        row_speakers=matrix.col_speakers,
        col_speakers=matrix.row_speakers,
    )
    assert similarity_summary(matrix) == similarity_summary(flipped)


# ---------------------------------------------------------------------------
# Gaussian naive Bayes
# ---------------------------------------------------------------------------

def test_gnb_identical_points_hit_variance_floor():
    a = embed([1.0, 2.0], speaker="a")
    b = embed([5.0, 6.0], speaker="b")
    model = gnb_fit([a, a, b, b])
    np.testing.assert_array_equal(model.means[0], a.vector)
    np.testing.assert_array_equal(model.variances[0], VARIANCE_FLOOR)


def test_gnb_priors():
    rng = np.random.default_rng(8)
    train = [random_embedding(rng, "a", f"u{i}") for i in range(3)]
    train.append(random_embedding(rng, "b", "u3"))
    model = gnb_fit(train)
    np.testing.assert_allclose(model.priors, [0.75, 0.25])
    assert abs(model.priors.sum() - 1.0) < 1e-12


def test_gnb_means_match_oracle():
    rng = np.random.default_rng(9)
    train = [random_embedding(rng, f"s{i % 2}", f"u{i}") for i in range(6)]
    model = gnb_fit(train)
    for ci, label in enumerate(model.classes):
        members = np.stack([e.vector for e in train if e.speaker_id == label])
        np.testing.assert_allclose(model.means[ci], members.mean(axis=0), atol=1e-12)


def test_gnb_needs_two_classes():
    rng = np.random.default_rng(10)
    with pytest.raises(ValueError):
        gnb_fit([random_embedding(rng, "only", "u1")])


def test_gnb_posterior_sums_to_one():
    rng = np.random.default_rng(11)
    train = [random_embedding(rng, f"s{i % 4}", f"u{i}") for i in range(16)]
    model = gnb_fit(train)
    for _ in range(10):
        probs = gnb_predict(model, rng.normal(size=EMBED_DIM))
        assert abs(probs.sum() - 1.0) < 1e-12
        assert np.all(probs >= 0)


def test_gnb_matches_density_oracle_two_class():
    # 2 informative dimensions, everything else identical across classes
    rng = np.random.default_rng(12)
    mean_a, var_a = np.array([0.0, 1.0]), np.array([0.5, 2.0])
    mean_b, var_b = np.array([3.0, -1.0]), np.array([1.5, 0.25])

    def sample(mean, var, speaker, n):
        out = []
        for i in range(n):
            v = np.zeros(EMBED_DIM)
            v[:2] = mean + rng.normal(size=2) * np.sqrt(var)
            out.append(Embedding(v, speaker, f"{speaker}{i}", "actual"))
        return out

    train = sample(mean_a, var_a, "a", 400) + sample(mean_b, var_b, "b", 400)
    model = gnb_fit(train)

    def density(x, mean, var):
        return math.exp(
            sum(
                -0.5 * math.log(2 * math.pi * v) - (xi - m) ** 2 / (2 * v)
                for xi, m, v in zip(x, mean, var)
            )
        )

    x = np.zeros(EMBED_DIM)
    x[:2] = [1.0, 0.5]
    probs = gnb_predict(model, x)
    pa = density(x, model.means[0], model.variances[0]) * model.priors[0]
    pb = density(x, model.means[1], model.variances[1]) * model.priors[1]
    np.testing.assert_allclose(probs, [pa / (pa + pb), pb / (pa + pb)], atol=1e-9)


def test_gnb_point_at_class_mean_wins():
    rng = np.random.default_rng(13)
    centers = {"a": 0.0, "b": 30.0, "c": -30.0}
    train = []
    for speaker, shift in centers.items():
        for i in range(5):
            train.append(random_embedding(rng, speaker, f"{speaker}{i}", center=shift))
    model = gnb_fit(train)
    probs = gnb_predict(model, model.means[model.classes.index("b")])
    assert model.classes[int(np.argmax(probs))] == "b"


def test_gnb_separated_clusters_perfect():
    rng = np.random.default_rng(14)
    train, test = [], []
    for c in range(10):
        center = np.zeros(EMBED_DIM)
        center[c] = 10.0  # 10 sigma apart at unit noise
        for i in range(8):
            e = Embedding(center + rng.normal(size=EMBED_DIM) * 0.5, f"spk{c}", f"t{c}_{i}", "actual")
            (train if i < 5 else test).append(e)
    model = gnb_fit(train)
    assert all(gnb_classify(model, e) == e.speaker_id for e in test)


def test_gnb_shift_invariance():
    rng = np.random.default_rng(15)
    train = [random_embedding(rng, f"s{i % 3}", f"u{i}") for i in range(12)]
    query = rng.normal(size=EMBED_DIM)
    base = gnb_predict(gnb_fit(train), query)
    shift = rng.normal(size=EMBED_DIM)
    shifted_train = [
        Embedding(e.vector + shift, e.speaker_id, e.utterance_id, e.source) for e in train
    ]
    shifted = gnb_predict(gnb_fit(shifted_train), query + shift)
    np.testing.assert_allclose(shifted, base, atol=1e-9)


# ---------------------------------------------------------------------------
# CSV formats
# ---------------------------------------------------------------------------

def test_embedding_csv_round_trip(tmp_path):
    rng = np.random.default_rng(16)
    embeddings = [random_embedding(rng, f"s{i}", f"u{i}", "generated") for i in range(3)]
    path = tmp_path / "emb.csv"
    write_embeddings_csv(path, embeddings)
    loaded = read_embeddings_csv(path)
    assert len(loaded) == 3
    for orig, back in zip(embeddings, loaded):
        assert back.speaker_id == orig.speaker_id
        assert back.utterance_id == orig.utterance_id
        assert back.source == orig.source
        np.testing.assert_array_equal(back.vector, orig.vector)


def test_embedding_csv_rejects_bad_width(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("s1,u1,actual,0.5,0.5\n")
    with pytest.raises(ValueError):
        read_embeddings_csv(path)


def test_similarity_csv_labels(tmp_path):
    rng = np.random.default_rng(17)
    generated = [random_embedding(rng, "a", "g1", "generated")]
    actual = [random_embedding(rng, "a", "a1"), random_embedding(rng, "b", "a2")]
    matrix = cross_similarity(generated, actual)
    path = tmp_path / "sim.csv"
    write_similarity_csv(path, matrix)
    lines = path.read_text().splitlines()
    assert lines[0] == ",a/a1,b/a2"
    assert lines[1].startswith("a/g1,")


def test_embedding_validation():
    with pytest.raises(ValueError):
        Embedding(np.zeros(10), "s", "u", "actual")
    with pytest.raises(ValueError):
        Embedding(np.zeros(EMBED_DIM), "s", "u", "synthetic")
