from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
import pytest

from ringqed.cli import main
from ringqed.runio import load_coupled_npz


@pytest.fixture(scope="module")
def clibase(tmp_path_factory):
    return tmp_path_factory.mktemp("cli")


def _overrides(clibase, name, **extra):
    base = {
        "nx": 21, "ny": 21, "dx": 0.45,
        "count": 8, "cutoff": 2, "lam": 0.05, "k": 4,
        "warm_n_max": 7,
        "outdir": str(clibase / f"out_{name}"),
        "cache_dir": str(clibase / "cache"),
    }
    base.update(extra)
    return [f"--set={k}={v}" for k, v in base.items()]


@pytest.fixture(scope="module")
def warmed(clibase):
    code = main(["electronic", *_overrides(clibase, "electronic")])
    assert code == 0
    return clibase


def test_electronic_outputs(warmed, capsys):
    out = warmed / "out_electronic"
    assert (out / "electronic.csv").exists()
    with open(out / "electronic.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) >= 8
    energies = [float(r["energy"]) for r in rows]
    assert energies == sorted(energies)
    record = json.loads((out / "electronic_manifest.json").read_text())
    assert "energies" in record["outputs"]
    assert main(["verify-manifest", str(out / "electronic_manifest.json")]) == 0


def test_electronic_cache_hit_and_echo(warmed, capsys):
    code = main(["electronic", *_overrides(warmed, "electronic")])
    assert code == 0
    text = capsys.readouterr().out
    assert "cache hit" in text
    assert "gap E_1 - E_0" in text
    resolved = (warmed / "out_electronic" / "resolved.cfg").read_text()
    assert "nx = 21" in resolved


def test_exact_both_forms(warmed, capsys):
    code = main([
        "exact", "--save-density",
        *_overrides(warmed, "exact", form="both", tol=1e-8),
    ])
    assert code == 0
    out = warmed / "out_exact"
    with open(out / "exact.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["form"] for r in rows] == ["length", "momentum"]
    # the two forms approach each other only as the Fock cutoff grows, so at
    # cutoff 2 the spectra agree at truncation level rather than solver level
    assert float(rows[0]["dE01"]) == pytest.approx(float(rows[1]["dE01"]), abs=1e-3)
    for form in ("length", "momentum"):
        art = out / f"coupled_{form}.npz"
        summary = load_coupled_npz(art)
        assert summary.converged.all()
        assert summary.meta["form"] == form
        raw = np.fromfile(out / f"density_{form}.raw", dtype="<f8")
        assert raw.shape == (21 * 21,)
        assert raw.sum() * 0.45**2 == pytest.approx(1.0, abs=1e-8)
    assert main(["verify-manifest", str(out / "exact_manifest.json")]) == 0


def test_exact_memory_refusal(warmed, capsys):
    code = main([
        "exact",
        *_overrides(warmed, "refuse", cutoff=999, memory_budget_gb=0.1),
    ])
    assert code == 3
    err = capsys.readouterr().err
    assert "refusing" in err and "GiB" in err


def test_scan_custom_rows_and_compare(warmed, capsys):
    code = main([
        "polariton-scan", "--compare",
        *_overrides(warmed, "scan", scan="1:2:0.005;2:4:0.1"),
    ])
    assert code == 0
    out = warmed / "out_scan"
    with open(out / "scan.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2
    assert rows[0]["l_max"] == "1" and rows[1]["n_max"] == "4"
    text = capsys.readouterr().out
    assert "comparison against reference" in text
    assert "no reference row" in text  # (2, 4, 0.1) is not a tabulated point


def test_scan_empty_list_header_only(warmed):
    code = main(["polariton-scan", *_overrides(warmed, "scan_none", scan="none")])
    assert code == 0
    lines = (warmed / "out_scan_none" / "scan.csv").read_text().splitlines()
    assert lines == ["l_max,n_max,lambda,dE01,dE13,occupation"]


def test_scan_insufficient_states(warmed, capsys):
    code = main(["polariton-scan", *_overrides(warmed, "scan_small", scan="paper")])
    assert code == 3
    assert "count=39 or higher" in capsys.readouterr().err


def test_scan_bad_spec_is_config_error(warmed, capsys):
    code = main(["polariton-scan", *_overrides(warmed, "scan_bad", scan="1:2")])
    assert code == 3
    assert "config error" in capsys.readouterr().err


def test_density_polariton_ground(warmed, capsys):
    code = main([
        "density", "--which", "polariton-ground",
        *_overrides(warmed, "dens"),
    ])
    assert code == 0
    out = warmed / "out_dens"
    text = capsys.readouterr().out
    assert "anisotropy along polarization:" in text
    raw = np.fromfile(out / "delta_n_polariton-ground.raw", dtype="<f8")
    assert raw.shape == (21 * 21,)
    assert raw.sum() * 0.45**2 == pytest.approx(0.0, abs=1e-8)
    record = json.loads((out / "density_manifest.json").read_text())
    assert "anisotropy" in record["diagnostics"]


def test_density_reuses_exact_artifact(warmed, capsys):
    art = warmed / "out_exact" / "coupled_length.npz"
    code = main([
        "density", "--which", "exact-ground", "--exact-artifact", str(art),
        *_overrides(warmed, "dens_reuse"),
    ])
    assert code == 0
    assert "reusing exact artifact" in capsys.readouterr().out


def test_spp_sweep(warmed):
    code = main([
        "spp", "--ne", "1,100", "--lam", "0.005,0.1", "--delta", "0,-0.01",
        *_overrides(warmed, "spp"),
    ])
    assert code == 0
    with open(warmed / "out_spp" / "spp.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 8
    for r in rows:
        levels = [float(r["e_ground"]), float(r["e_lower"]),
                  float(r["e_upper"]), float(r["e_double"])]
        assert levels == sorted(levels)
        assert float(r["gap_lower"]) > 0.0


def test_verify_manifest_detects_tampering(warmed):
    out = warmed / "out_exact"
    manifest = out / "exact_manifest.json"
    target = out / "exact.csv"
    original = target.read_bytes()
    try:
        target.write_bytes(original + b"# tampered\n")
        assert main(["verify-manifest", str(manifest)]) == 2
    finally:
        target.write_bytes(original)
    assert main(["verify-manifest", str(manifest)]) == 0


def test_unknown_config_key_is_rejected(warmed, capsys):
    code = main(["electronic", *_overrides(warmed, "bad"), "--set=mystery=1"])
    assert code == 3
    assert "unknown config keys" in capsys.readouterr().err


def test_config_file_plus_overrides(warmed, tmp_path, capsys):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("nx = 21\nny = 21\ndx = 0.45\ncount = 8\n")
    code = main([
        "electronic", "--config", str(cfgfile),
        f"--set=outdir={warmed / 'out_cfgfile'}",
        f"--set=cache_dir={warmed / 'cache'}",
    ])
    assert code == 0
    assert "cache hit" in capsys.readouterr().out


def test_version_flag():
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
