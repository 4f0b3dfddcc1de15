import math

import numpy as np
import pytest

from penningryd import cli
from penningryd.cli import (
    EXIT_CONFIG,
    EXIT_NONCONVERGENCE,
    EXIT_OK,
    EXIT_PHYSICS,
    ConfigError,
    main,
    parse_frequency,
    parse_grid,
)
from penningryd.radial import ConvergenceError


def test_parse_frequency_forms():
    assert parse_frequency("440kHz") == pytest.approx(2.0 * math.pi * 440e3)
    assert parse_frequency("2pi*440kHz") == pytest.approx(2.0 * math.pi * 440e3)
    assert parse_frequency("1.5MHz") == pytest.approx(2.0 * math.pi * 1.5e6)
    assert parse_frequency("2e6rad/s") == pytest.approx(2e6)
    assert parse_frequency(" 10 Hz ") == pytest.approx(2.0 * math.pi * 10.0)


def test_parse_frequency_errors():
    with pytest.raises(ConfigError):
        parse_frequency("440")
    with pytest.raises(ConfigError):
        parse_frequency("2pi*1e6rad/s")
    with pytest.raises(ConfigError):
        parse_frequency("fastish")


def test_parse_grid():
    g = parse_grid("0.5:2.0:4")
    assert np.allclose(g, [0.5, 1.0, 1.5, 2.0])
    assert len(parse_grid("1:1:1")) == 1
    for bad in ("1:2", "2:1:5", "a:b:c", "1:2:0"):
        with pytest.raises(ConfigError):
            parse_grid(bad)


def _read(path):
    return path.read_text().strip().split("\n")


def test_trap_command(tmp_path):
    out = tmp_path / "trap.csv"
    rc = main(["trap", "--B", "2.0", "--beta", "7e5", "--output", str(out)])
    assert rc == EXIT_OK
    lines = _read(out)
    assert lines[0].startswith("# penningryd ")
    assert lines[1].startswith("# config sha256:")
    assert lines[2].startswith("# schema:")
    assert any("omega_z" in line for line in lines[3:])


def test_trap_unstable_exit_code(tmp_path):
    out = tmp_path / "trap.csv"
    rc = main(["trap", "--B", "0.05", "--beta", "7e5", "--output", str(out)])
    assert rc == EXIT_PHYSICS


def test_bad_flags_exit_code():
    assert main(["trap", "--B", "2.0"]) == EXIT_CONFIG
    assert main(["no-such-command"]) == EXIT_CONFIG
    assert main(["trap", "--B", "2.0", "--beta", "7e5", "--species", "nope"]) == EXIT_CONFIG


def test_limits_command(tmp_path):
    out = tmp_path / "limits.csv"
    rc = main(["limits", "--n", "50", "--B", "2.0", "--beta", "1e7", "--output", str(out)])
    assert rc == EXIT_OK
    body = out.read_text()
    assert "ionization_gradient" in body
    assert "landau_threshold_n,53," in body
    assert "ionization_n,228," in body


def test_spin_command_requires_coupling(tmp_path):
    out = tmp_path / "spin.csv"
    assert main(["spin", "--output", str(out)]) == EXIT_CONFIG
    rc = main(
        ["spin", "--facilitation", "--Omega-sweep", "0:0.5:6", "--output", str(out)]
    )
    assert rc == EXIT_OK
    lines = _read(out)
    assert lines[3] == "Omega_over_Delta,level_index,energy_over_Delta,symmetry_label"
    assert len(lines) == 4 + 6 * 8


def test_spin_command_uniform_coupling(tmp_path):
    out = tmp_path / "spin.csv"
    rc = main(
        ["spin", "--V0", "0.5", "--Omega-sweep", "0:0.2:2", "--output", str(out)]
    )
    assert rc == EXIT_OK


def test_modes_command(tmp_path):
    out = tmp_path / "modes.csv"
    rc = main(
        ["modes", "--N", "3", "--wr", "2pi*222.7kHz", "--wz", "2pi*445.4kHz",
         "--output", str(out)]
    )
    assert rc == EXIT_OK
    body = out.read_text()
    assert "rotation" in body and "breathing" in body


def test_modes_nonplanar_exit_code(tmp_path):
    out = tmp_path / "modes.csv"
    rc = main(
        ["modes", "--N", "3", "--wr", "2pi*222.7kHz", "--wz", "2pi*300kHz",
         "--output", str(out)]
    )
    assert rc == EXIT_PHYSICS


def test_v0_rejects_nonplanar_ratio(tmp_path):
    out = tmp_path / "v0.csv"
    rc = main(
        ["v0", "--n", "45", "--B", "1.5:2.0:2", "--ratio", "1.5", "--output", str(out)]
    )
    assert rc == EXIT_PHYSICS


def test_spectrum_command_and_reproducibility(tmp_path):
    args = ["spectrum", "--n", "30", "--lmax", "2", "--B", "0.5:2.0:4"]
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--output", str(out1)]) == EXIT_OK
    assert main(args + ["--output", str(out2)]) == EXIT_OK
    assert out1.read_bytes() == out2.read_bytes()
    lines = _read(out1)
    assert lines[3] == "B_tesla,block_mj,track_label,energy_GHz,overlap_prev"
    assert len(lines) > 4 + 18


def test_spectrum_block_filter(tmp_path):
    out = tmp_path / "mj.csv"
    rc = main(
        ["spectrum", "--n", "30", "--lmax", "2", "--B", "0.5:2.0:4",
         "--block-mj", "2.5", "--output", str(out)]
    )
    assert rc == EXIT_OK
    lines = _read(out)
    data = [line for line in lines if not line.startswith("#") and "," in line][1:]
    assert data
    assert all(line.split(",")[1] == "2.5" for line in data)


def test_config_file_defaults_and_override(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('[trap]\nB = 2.0\nbeta = 7e5\n')
    out1 = tmp_path / "c1.csv"
    rc = main(["trap", "--config", str(cfg), "--output", str(out1)])
    assert rc == EXIT_OK
    # explicit flag wins over the config value
    out2 = tmp_path / "c2.csv"
    rc = main(["trap", "--config", str(cfg), "--B", "1.85", "--output", str(out2)])
    assert rc == EXIT_OK
    assert out1.read_text() != out2.read_text()


def test_config_file_errors(tmp_path):
    assert main(["trap", "--config", str(tmp_path / "nope.toml")]) == EXIT_CONFIG
    bad = tmp_path / "bad.toml"
    bad.write_text("not toml ===")
    assert main(["trap", "--config", str(bad), "--B", "2", "--beta", "7e5"]) == EXIT_CONFIG


def test_nonconvergence_exit_code(monkeypatch):
    def boom(args):
        raise ConvergenceError("no bracket")

    # build_parser resolves command handlers from module globals at call
    # time, so the patched handler is picked up by main()
    monkeypatch.setattr(cli, "cmd_trap", boom)
    rc = main(["trap", "--B", "2.0", "--beta", "7e5"])
    assert rc == EXIT_NONCONVERGENCE
