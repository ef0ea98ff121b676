import pytest

from prosokit.config import EvalConfig, dumps, loads, read_config, write_config
from prosokit.manifest import ManifestError, read_manifest
from prosokit.yin import YinConfig


def test_defaults_match_pipeline_settings():
    cfg = EvalConfig()
    assert cfg.sample_rate == 22050
    assert cfg.frame_size == 1024
    assert cfg.hop == 256
    assert cfg.n_mels == 80
    assert cfg.mfcc_coeffs == 13
    assert cfg.gpe_threshold == 0.2
    assert cfg.mcd_scaling == "none"
    assert cfg.attention_divisor == "sqrt_dk"
    assert cfg.yin == YinConfig(frame_size=1024, hop=256, f_min=50.0, f_max=600.0, threshold=0.15)


def test_round_trip_is_fixed_point():
    cfg = EvalConfig(mfcc_coeffs=20, gpe_threshold=0.25, yin=YinConfig(threshold=0.12))
    text = dumps(cfg)
    assert loads(text) == cfg
    assert dumps(loads(text)) == text


def test_file_round_trip(tmp_path):
    cfg = EvalConfig(mcd_scaling="db")
    path = tmp_path / "eval.cfg"
    write_config(cfg, path)
    assert read_config(path) == cfg


def test_comments_and_blanks_ignored():
    text = "# comment\n\nsample_rate = 22050\n"
    assert loads(text) == EvalConfig()


def test_unknown_key_rejected():
    with pytest.raises(ValueError):
        loads("windowing = hann\n")


def test_malformed_line_rejected():
    with pytest.raises(ValueError):
        loads("sample_rate 22050\n")


def test_invalid_values_rejected():
    with pytest.raises(ValueError):
        EvalConfig(mcd_scaling="log")
    with pytest.raises(ValueError):
        EvalConfig(attention_divisor="dk2")
    with pytest.raises(ValueError):
        EvalConfig(mfcc_coeffs=80)
    with pytest.raises(ValueError):
        loads("hop = 0\n")


# ---------------------------------------------------------------------------
# manifest
# ---------------------------------------------------------------------------

HEADER = "pair_id,speaker_id,shots,ref_path,pred_path\n"


def write_manifest(tmp_path, body, header=HEADER, name="pairs.csv"):
    path = tmp_path / name
    path.write_text(header + body)
    return path


def test_manifest_parses_and_resolves_paths(tmp_path):
    path = write_manifest(tmp_path, "p1,229,1,audio/ref.wav,/abs/pred.wav\n")
    rows = read_manifest(path)
    assert len(rows) == 1
    row = rows[0]
    assert row.pair_id == "p1"
    assert row.speaker_id == "229"
    assert row.shots == 1
    assert row.ref_path == tmp_path / "audio/ref.wav"
    assert str(row.pred_path) == "/abs/pred.wav"
    assert row.group is None


def test_manifest_group_column(tmp_path):
    header = "pair_id,speaker_id,shots,ref_path,pred_path,group\n"
    path = write_manifest(tmp_path, "p1,229,0,r.wav,p.wav,ratio-0.8-1.3\n", header)
    assert read_manifest(path)[0].group == "ratio-0.8-1.3"


def test_manifest_missing_column(tmp_path):
    path = write_manifest(tmp_path, "p1,229,1,r.wav\n", "pair_id,speaker_id,shots,ref_path\n")
    with pytest.raises(ManifestError):
        read_manifest(path)


def test_manifest_duplicate_pair_id(tmp_path):
    path = write_manifest(tmp_path, "p1,229,1,r.wav,p.wav\np1,229,2,r.wav,p.wav\n")
    with pytest.raises(ManifestError):
        read_manifest(path)


def test_manifest_shots_range(tmp_path):
    path = write_manifest(tmp_path, "p1,229,7,r.wav,p.wav\n")
    with pytest.raises(ManifestError):
        read_manifest(path)
    path = write_manifest(tmp_path, "p2,229,x,r.wav,p.wav\n", name="pairs2.csv")
    with pytest.raises(ManifestError):
        read_manifest(path)


def test_manifest_zero_rows(tmp_path):
    path = write_manifest(tmp_path, "")
    with pytest.raises(ManifestError):
        read_manifest(path)


def test_manifest_missing_file(tmp_path):
    with pytest.raises(ManifestError):
        read_manifest(tmp_path / "nope.csv")
