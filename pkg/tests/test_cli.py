import csv
import io

import numpy as np
import pytest

from conftest import center_freq, tone
from synviz.audio import HOP_SIZE
from synviz.cli import (
    DEFAULTS_BLOCK,
    ConfigError,
    EngineConfig,
    _build_arg_parser,
    _merge_flags,
    load_config,
    run,
    serialize_config,
)
from synviz.wire import read_frames


def test_defaults_dump_prints_canonical_block(capsys):
    assert run(["--defaults-dump"]) == 0
    out = capsys.readouterr().out
    assert out.strip() == DEFAULTS_BLOCK
    assert "trigger-val = 70" in out
    assert "num-points-to-average = 4" in out
    assert "range_max = 0.3" in out


def test_defaults_match_engine_defaults():
    cfg = EngineConfig()
    assert cfg.analysis.n_avg == 4
    assert cfg.analysis.n_vol == 8
    assert cfg.analysis.trigger_val == 70.0
    assert cfg.analysis.max_average == 0.3
    assert cfg.analysis.max_trigger == 0.15
    assert cfg.analysis.range_max == 0.3
    assert cfg.build_preset().color_sensitivity == 2.0
    assert cfg.sim.n_particles == 100_000
    assert cfg.port == 7878


# -- config files -----------------------------------------------------------------

def test_load_config_round_trips(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("""\
# engine tuning
trigger-val = 55
num-points-to-average = 6
max-average = 0.4
window = hann
seed = 3
particles = 4800
preset = oceanic
color-sensitivity = 1.5
bin-color-2 = #abcdef
mode = headless
resample = true
""")
    cfg = load_config(path)
    assert cfg.analysis.trigger_val == 55.0
    assert cfg.analysis.n_avg == 6
    assert cfg.analysis.window == "hann"
    assert cfg.sim.seed == 3 and cfg.sim.n_particles == 4800
    assert cfg.preset == "oceanic"
    assert cfg.color_sensitivity == 1.5
    assert cfg.bin_colors == ((2, "#abcdef"),)
    assert cfg.resample is True

    again_path = tmp_path / "again.cfg"
    again_path.write_text(serialize_config(cfg))
    assert load_config(again_path) == cfg


def test_serialize_default_config_round_trips(tmp_path):
    cfg = EngineConfig()
    path = tmp_path / "d.cfg"
    path.write_text(serialize_config(cfg))
    assert load_config(path) == cfg


def test_unknown_key_errors_with_line(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("trigger-val = 50\nwarp = 9\n")
    with pytest.raises(ConfigError, match=r"bad\.cfg:2.*warp"):
        load_config(path)


def test_bad_value_errors_name_key_and_line(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("\n\ntrigger-val = -5\n")
    with pytest.raises(ConfigError, match=r":3: trigger-val"):
        load_config(path)


def test_malformed_line_rejected(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("just some words\n")
    with pytest.raises(ConfigError, match="key = value"):
        load_config(path)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "ghost.cfg")


def test_flags_override_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("trigger-val = 50\nparticles = 600\n")
    args = _build_arg_parser().parse_args(
        ["--config", str(path), "--trigger-val", "60"])
    cfg = _merge_flags(load_config(args.config), args)
    assert cfg.analysis.trigger_val == 60.0
    assert cfg.sim.n_particles == 600   # untouched by flags


def test_build_preset_applies_overrides():
    cfg = EngineConfig(color_sensitivity=3.0, bin_colors=((0, "#ffffff"),))
    preset = cfg.build_preset()
    assert preset.color_sensitivity == 3.0
    assert preset.base_colors[0].to_hex() == "#ffffff"


# -- headless runs ------------------------------------------------------------------

def test_headless_writes_frames_and_csv(tmp_path, make_wav, capsys):
    wav = make_wav(tone(center_freq(3), 12 * HOP_SIZE, 0.2))
    frames_path = tmp_path / "out.synframes"
    csv_path = tmp_path / "out.csv"
    code = run(["--headless", "--input", str(wav),
                "--frames-out", str(frames_path),
                "--csv-out", str(csv_path),
                "--particles", "120"])
    assert code == 0
    assert capsys.readouterr().out.strip() == "12 frames written"

    packets = read_frames(frames_path)
    assert len(packets) == 12
    assert packets[0].n_particles == 120
    assert packets[-1].frame_index == 11

    with open(csv_path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 13          # header + 12 frames
    header = rows[0]
    assert header[0] == "hop_index"
    assert header[-1] == "dynamics"
    assert len(header) == 1 + 5 * 12 + 1
    assert float(rows[1][1 + 3]) == pytest.approx(2 / 3, abs=1e-3)


def test_headless_without_input_fails(capsys):
    assert run(["--headless"]) == 1
    assert "--input" in capsys.readouterr().err


def test_missing_input_file_fails_with_diagnostic(tmp_path, capsys):
    assert run(["--headless", "--input", str(tmp_path / "gone.wav"),
                "--frames-out", str(tmp_path / "x.synframes")]) == 1
    err = capsys.readouterr().err
    assert "gone.wav" in err


def test_garbage_input_fails(tmp_path, capsys):
    bad = tmp_path / "bad.wav"
    bad.write_bytes(b"not audio")
    assert run(["--headless", "--input", str(bad),
                "--frames-out", str(tmp_path / "x.synframes")]) == 1


def test_bad_flag_value_fails(tmp_path, make_wav, capsys):
    wav = make_wav(tone(440.0, HOP_SIZE))
    assert run(["--headless", "--input", str(wav), "--trigger-val", "999",
                "--frames-out", str(tmp_path / "x.synframes")]) == 1
    assert "trigger-val" in capsys.readouterr().err


def test_unknown_flag_exits_with_usage_error(capsys):
    assert run(["--warp", "9"]) == 2


def test_stdin_pcm_headless(tmp_path, capsys, monkeypatch):
    samples = tone(center_freq(2), 5 * HOP_SIZE, 0.3).astype("<f4")

    class FakeStdin:
        buffer = io.BytesIO(samples.tobytes())

    monkeypatch.setattr("sys.stdin", FakeStdin())
    frames_path = tmp_path / "pcm.synframes"
    code = run(["--headless", "--stdin-pcm", "1",
                "--frames-out", str(frames_path), "--particles", "120"])
    assert code == 0
    assert capsys.readouterr().out.strip() == "5 frames written"
    assert len(read_frames(frames_path)) == 5


def test_seeded_runs_are_identical(tmp_path, make_wav):
    wav = make_wav(tone(center_freq(5), 20 * HOP_SIZE, 0.4))
    out_a = tmp_path / "a.synframes"
    out_b = tmp_path / "b.synframes"
    for out in (out_a, out_b):
        assert run(["--headless", "--input", str(wav), "--seed", "0",
                    "--frames-out", str(out), "--particles", "600"]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()


def test_different_seeds_differ(tmp_path, make_wav):
    wav = make_wav(tone(center_freq(5), 6 * HOP_SIZE, 0.4))
    out_a = tmp_path / "a.synframes"
    out_b = tmp_path / "b.synframes"
    run(["--headless", "--input", str(wav), "--seed", "1",
         "--frames-out", str(out_a), "--particles", "120"])
    run(["--headless", "--input", str(wav), "--seed", "2",
         "--frames-out", str(out_b), "--particles", "120"])
    assert out_a.read_bytes() != out_b.read_bytes()


def test_preset_flag_changes_colors(tmp_path, make_wav):
    wav = make_wav(tone(center_freq(5), 2 * HOP_SIZE, 0.4))
    out = tmp_path / "s.synframes"
    assert run(["--headless", "--input", str(wav), "--preset", "scriabin",
                "--frames-out", str(out), "--particles", "120"]) == 0
    packet = read_frames(out)[0]
    # scriabin bin 0 is dark red 0x8b0000
    np.testing.assert_allclose(packet.group_params[0, :3],
                               [0x8b / 255, 0.0, 0.0], atol=1e-6)
