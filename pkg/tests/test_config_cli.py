import json
from pathlib import Path

import pytest

from nillab.cli import main
from nillab.config import load_config, parse_config, standard_config

def test_standard_config_round_trip():
    cfg = standard_config()
    assert parse_config(cfg.to_ini()) == cfg
    assert parse_config(cfg.to_ini()).config_hash() == cfg.config_hash()


def test_shipped_standard_config_matches_builder():
    path = Path(__file__).resolve().parents[1] / "configs" / "standard.ini"
    assert load_config(path) == standard_config()


def test_round_trip_with_custom_fields(tmp_path):
    cfg = standard_config(
        checkpoints=(10, 100), sieve_bound=1000, workers=3,
        weyl_freqs=((2, -1, 0), (0, 0, 1)), out_dir="elsewhere",
    )
    text = cfg.to_ini()
    (tmp_path / "c.ini").write_text(text)
    assert load_config(tmp_path / "c.ini") == cfg


def test_validation_errors():
    with pytest.raises(ValueError):
        standard_config(p=4)
    with pytest.raises(ValueError):
        standard_config(checkpoints=(100, 50))
    with pytest.raises(ValueError):
        standard_config(checkpoints=(10**8,))  # beyond sieve bound
    with pytest.raises(ValueError):
        standard_config(segment_size=1000)
    with pytest.raises(ValueError):
        standard_config(workers=0)
    with pytest.raises(ValueError):
        standard_config(experiments=("nonsense",))
    with pytest.raises(ValueError):
        standard_config(xi=1, bump_radius=0.5)


def test_parse_error_reports_field():
    with pytest.raises(ValueError, match="missing"):
        parse_config("[system]\nalpha = 0.1\n")
    with pytest.raises(ValueError, match="parse error"):
        parse_config("not an ini at all [")


def test_alpha_beta_snap_exact():
    cfg = standard_config()
    assert cfg.alpha.is_q64 and cfg.beta.is_q64
    assert 0 < float(cfg.alpha) < 1 and 0 < float(cfg.beta) < 1


# -- CLI ---------------------------------------------------------------------------


def small_cfg_text(out_dir: str) -> str:
    cfg = standard_config(
        checkpoints=(200, 500),
        sieve_bound=500,
        segment_size=128,
        workers=2,
        out_dir=out_dir,
        weyl_freqs=((1, 0, 0), (0, 0, 1)),
        coboundary_cutoff=8,
    )
    return cfg.to_ini()


def test_cli_verify_passes(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 8 and "[FAIL]" not in out


def test_cli_verify_fault_injection(capsys):
    assert main(["verify", "--inject-fault", "twist"]) == 1
    assert "[FAIL] group-laws" in capsys.readouterr().out


def test_cli_verify_repeatable(capsys):
    assert main(["verify"]) == 0
    first = capsys.readouterr().out
    assert main(["verify"]) == 0
    assert capsys.readouterr().out == first


def test_cli_run_manifest_complete(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.ini"
    cfg_path.write_text(small_cfg_text(str(tmp_path / "out")))
    assert main(["run", "--config", str(cfg_path)]) == 0
    out = tmp_path / "out"
    manifest = json.loads((out / "manifest.json").read_text())
    listed = {f["name"] for f in manifest["files"]}
    for name in ("correlation.csv", "bilinear.csv", "davenport.csv", "weyl.csv",
                 "constants.json", "coboundary.json"):
        assert name in listed
        assert (out / name).exists()
    for entry in manifest["files"]:
        assert (out / entry["name"]).stat().st_size == entry["bytes"]
    assert manifest["config_hash"] == parse_config(cfg_path.read_text()).config_hash()
    assert "soft_thresholds" in manifest


def test_cli_run_byte_identical(tmp_path):
    cfg_path = tmp_path / "cfg.ini"
    cfg_path.write_text(small_cfg_text(str(tmp_path / "a")))
    assert main(["run", "--config", str(cfg_path)]) == 0
    assert main(["run", "--config", str(cfg_path), "--out", str(tmp_path / "b")]) == 0
    for name in ("correlation.csv", "bilinear.csv", "davenport.csv", "weyl.csv",
                 "constants.json", "coboundary.json", "correlation.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_cli_rejects_checkpoint_beyond_sieve(tmp_path, capsys):
    text = small_cfg_text(str(tmp_path / "o")).replace(
        "sieve_bound = 500", "sieve_bound = 100"
    )
    cfg_path = tmp_path / "bad.ini"
    cfg_path.write_text(text)
    with pytest.raises(ValueError, match="sieve bound"):
        main(["run", "--config", str(cfg_path)])


def test_cli_workers_env_default(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("LAB_WORKERS", "3")
    cfg_path = tmp_path / "cfg.ini"
    cfg_path.write_text(small_cfg_text(str(tmp_path / "out")))
    assert main(["constants", "--config", str(cfg_path)]) == 0
    assert (tmp_path / "out" / "constants.json").exists()


def test_cli_winding_and_constants(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.ini"
    cfg_path.write_text(small_cfg_text(str(tmp_path / "out")))
    assert main(["winding", "--config", str(cfg_path), "--n", "4"]) == 0
    assert "winding of H_4" in capsys.readouterr().out
    assert main(["constants", "--config", str(cfg_path)]) == 0
    payload = json.loads((tmp_path / "out" / "constants.json").read_text())
    assert payload["delta1"] > 0


def test_cli_reduce_joining(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.ini"
    cfg_path.write_text(small_cfg_text(str(tmp_path / "out")))
    assert main(["reduce-joining", "--config", str(cfg_path)]) == 0
    out = capsys.readouterr().out
    assert "twist p^2-q^2   : 5" in out


def test_cli_orbit_and_sieve(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.ini"
    cfg_path.write_text(small_cfg_text(str(tmp_path / "out")))
    assert main(["orbit", "--config", str(cfg_path), "--n", "16"]) == 0
    orbit = (tmp_path / "out" / "orbit.csv").read_text().splitlines()
    assert orbit[0] == "n,x,y,z" and len(orbit) == 17
    assert main(["sieve", "--config", str(cfg_path), "--bound", "2000"]) == 0
    assert "M(1000) = " in capsys.readouterr().out
