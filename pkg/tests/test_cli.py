import json
import os

import numpy as np
import pytest

from rydfac.cli import main, parse_grid


def run_cli(tmp_path, *args):
    return main(["--output-dir", str(tmp_path), *args])


def read_lines(path):
    with open(path) as f:
        return f.read().splitlines()


def test_parse_grid_forms():
    assert np.allclose(parse_grid("log:1e-2:1:3"), [1e-2, 1e-1, 1.0])
    assert np.allclose(parse_grid("lin:0:1:3"), [0.0, 0.5, 1.0])
    assert np.allclose(parse_grid("1,2.5,4"), [1.0, 2.5, 4.0])


def test_bands_artifacts(tmp_path):
    assert run_cli(tmp_path, "bands", "--lattice", "honeycomb",
                   "--kpoints", "64", "--grid-points", "24") == 0
    lines = read_lines(tmp_path / "bands.csv")
    header = lines[0].split(",")
    assert header[:2] == ["k1 (1/R0)", "k2 (1/R0)"]
    assert sum(c.startswith("eps") for c in header) == 5
    assert len(lines) == 65
    summary = json.loads((tmp_path / "bands_summary.json").read_text())
    assert summary["flat_band_count"] == 1
    assert (tmp_path / "bands.png").exists()
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["subcommand"] == "bands"
    assert "bands.csv" in manifest["outputs"]


def test_bands_custom_lattice(tmp_path):
    from rydfac.lattice import build_real_lattice
    lattice_file = tmp_path / "lat.json"
    lattice_file.write_text(build_real_lattice("triangular").to_json())
    assert run_cli(tmp_path, "--no-plot", "bands", "--lattice", "custom",
                   "--lattice-file", str(lattice_file),
                   "--kpoints", "16", "--grid-points", "12") == 0
    summary = json.loads((tmp_path / "bands_summary.json").read_text())
    assert summary["flat_band_count"] == 2


def test_disorder_artifacts(tmp_path):
    assert run_cli(tmp_path, "--no-plot", "disorder", "--s", "0.05",
                   "--samples", "50000", "--bins", "50") == 0
    lines = read_lines(tmp_path / "disorder_histogram.csv")
    assert lines[0] == "delta_v (V0),empirical_density,analytic_density"
    assert len(lines) == 51
    summary = json.loads((tmp_path / "disorder_summary.json").read_text())
    assert summary["ks_pvalue"] > 0.01
    assert summary["tail_estimate_valid"] is True


def test_localization_determinism_across_workers(tmp_path):
    for sub, workers in (("a", "1"), ("b", "3")):
        os.makedirs(tmp_path / sub)
        assert main(["--output-dir", str(tmp_path / sub), "--workers", workers,
                     "--no-plot", "localization", "--energy", "1.8,2.0",
                     "--s-grid", "log:1e-5:1e-4:3", "--steps", "2000"]) == 0
    a = (tmp_path / "a" / "localization.csv").read_bytes()
    b = (tmp_path / "b" / "localization.csv").read_bytes()
    assert a == b
    header = read_lines(tmp_path / "a" / "localization.csv")[0]
    assert header.startswith("energy (Omega),disorder (s or W),xi1 (cells)")


def test_localization_flat_mode(tmp_path):
    assert run_cli(tmp_path, "--no-plot", "localization", "--energy", "1.8",
                   "--mode", "flat_pair_only", "--w-grid", "log:0.1:1:3",
                   "--steps", "2000") == 0
    lines = read_lines(tmp_path / "localization.csv")
    assert len(lines) == 4


def test_scaling_outputs_fit_table(tmp_path):
    assert run_cli(tmp_path, "--no-plot", "scaling", "--energy", "2.0",
                   "--s-grid", "log:5e-6:5e-4:6", "--steps", "20000") == 0
    lines = read_lines(tmp_path / "scaling.csv")
    assert lines[0].startswith("energy (Omega),nu1,nu2")
    assert len(lines) == 2
    nu1 = float(lines[1].split(",")[1])
    assert 0.0 < nu1 < 3.0


def test_dynamics_outputs(tmp_path):
    assert run_cli(tmp_path, "--no-plot", "dynamics", "--L", "6",
                   "--s-grid", "1e-3", "--times", "5,15",
                   "--realizations", "4") == 0
    summary = read_lines(tmp_path / "dx_summary.csv")
    profiles = read_lines(tmp_path / "profiles.csv")
    assert len(summary) == 3            # header + 2 times
    assert len(profiles) == 1 + 2 * 6   # header + L rungs per time
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["seed_derivations"][0]["label"] == "dynamics"


def test_prepare_reports_unit_fidelity(tmp_path):
    assert run_cli(tmp_path, "--no-plot", "prepare", "--L", "2",
                   "--rung", "1") == 0
    summary = json.loads((tmp_path / "preparation_summary.json").read_text())
    assert summary["final_fidelity"] == pytest.approx(1.0, abs=1e-12)
    lines = read_lines(tmp_path / "preparation.csv")
    assert len(lines) == 7


def test_compare_summary_ratio(tmp_path):
    assert run_cli(tmp_path, "--no-plot", "compare", "--L", "4",
                   "--s-grid", "1e-3,1e-2", "--v0-over-omega", "20,200",
                   "--realizations", "5") == 0
    summary = json.loads((tmp_path / "compare_summary.json").read_text())
    assert summary["discrepancy_ratio"] > 1.0
    lines = read_lines(tmp_path / "compare.csv")
    assert len(lines) == 5


def test_reproduce_fig2(tmp_path):
    assert run_cli(tmp_path, "--no-plot", "reproduce", "--figure", "fig2") == 0
    report = json.loads((tmp_path / "fig2_report.json").read_text())
    assert report["passed"] == report["total"]
    assert (tmp_path / "fig2_ladder_bands.csv").exists()
    assert (tmp_path / "fig2_transfer_eigenvalues.csv").exists()


def test_json_format_option(tmp_path):
    assert run_cli(tmp_path, "--format", "json", "--no-plot", "prepare",
                   "--L", "2", "--rung", "1") == 0
    records = json.loads((tmp_path / "preparation.json").read_text())
    assert len(records) == 6
    assert records[-1]["fidelity_to_target"] == pytest.approx(1.0, abs=1e-12)


def test_config_file_defaults_and_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"s": 0.11, "samples": 2000, "bins": 10}))
    assert run_cli(tmp_path, "--no-plot", "--config", str(cfg), "disorder") == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["config"]["s"] == 0.11
    assert run_cli(tmp_path, "--no-plot", "--config", str(cfg), "disorder",
                   "--s", "0.07") == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["config"]["s"] == 0.07


def test_csv_number_format_17_digits(tmp_path):
    assert run_cli(tmp_path, "--no-plot", "bands", "--lattice", "chain",
                   "--kpoints", "8", "--grid-points", "16") == 0
    row = read_lines(tmp_path / "bands.csv")[1].split(",")
    assert row[0] == format(-np.pi, ".17g")


def test_invalid_flag_exits_2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["--format", "xml", "bands"])      # argparse-level rejection
    assert exc.value.code == 2
    # runtime validation failures return the same code
    assert run_cli(tmp_path, "--no-plot", "localization",
                   "--energy", "not-a-number") == 2


def test_invalid_subcommand_config_exits_2(tmp_path):
    assert run_cli(tmp_path, "--no-plot", "bands", "--lattice", "custom") == 2


def test_numerical_failure_exits_3(tmp_path):
    code = run_cli(tmp_path, "--no-plot", "localization", "--energy", "0.0",
                   "--mode", "flat_pair_only", "--w-grid", "0,0,0,0",
                   "--steps", "2000")
    assert code == 3


def test_missing_config_file_exits_2(tmp_path):
    assert main(["--config", str(tmp_path / "nope.json"), "bands"]) == 2
