"""
Integration tests - scenario files, pipeline outputs and the jcm-sim entry point
"""

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import pytest

from jcm_entanglement.exceptions import ScenarioConfigError
from jcm_entanglement.runner import cli
from jcm_entanglement.runner.cli import EXIT_CONFIG, EXIT_OK, EXIT_TRUNCATION, main, parse_sweep
from jcm_entanglement.runner.config_file import apply_override, build_scenario, load_raw, load_scenario, parse_scalar

BASE_SCENARIO = """\
[scenario]
name = smoke

[model]
lambda = 1
omega = 10
nu = 20

[atoms]
kind = bell
theta = pi/4

[field]
nbar_c = 1
nbar_s = 0
nbar_th = 0
phi = 0

[truncation]
n_max = 12

[grid]
t_max = 2
steps = 20
"""


def write_scenario(tmp_path: Path, text: str = BASE_SCENARIO, name: str = "scenario.ini") -> Path:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def read_csv(path: Path):
    with path.open(encoding="utf-8") as handle:
        return list(csv.reader(handle))


@pytest.fixture
def scenario_file(tmp_path):
    return write_scenario(tmp_path)


class TestParseScalar:
    """Test pi-fraction resolution"""

    @pytest.mark.parametrize(
        "text,expected",
        [("pi/4", math.pi / 4), ("-pi", -math.pi), ("3*pi/2", 1.5 * math.pi), ("2pi", 2 * math.pi), ("PI", math.pi)],
    )
    def test_pi_expressions(self, text, expected):
        assert parse_scalar(text) == pytest.approx(expected)

    def test_plain_text_passes_through(self):
        assert parse_scalar(" 0.5 ") == "0.5"
        assert parse_scalar("bell") == "bell"
        assert parse_scalar(3) == 3


class TestScenarioLoading:
    """Test INI parsing, overrides and validation"""

    def test_load(self, scenario_file):
        scenario = load_scenario(scenario_file)
        assert scenario.name == "smoke"
        assert scenario.atoms.theta == pytest.approx(math.pi / 4)
        assert scenario.model.policy.n_max == 12
        assert scenario.model.delta == -10
        assert list(scenario.fields) == ["main"]
        assert len(scenario.grid) == 21

    def test_field_variants(self, tmp_path):
        text = BASE_SCENARIO.replace("[field]", "[field.coherent]") + "\n[field.thermal]\nnbar_c = 1\nnbar_th = 1\n"
        scenario = load_scenario(write_scenario(tmp_path, text))
        assert list(scenario.fields) == ["coherent", "thermal"]
        assert scenario.fields["thermal"].nbar_th == 1

    def test_bare_override_applies_to_every_field(self, tmp_path):
        text = BASE_SCENARIO + "\n[field.hot]\nnbar_c = 2\n"
        raw = apply_override(load_raw(write_scenario(tmp_path, text)), "nbar_th", "0.5")
        scenario = build_scenario(raw)
        assert all(params.nbar_th == 0.5 for params in scenario.fields.values())

    def test_sectioned_override(self, scenario_file):
        scenario = load_scenario(scenario_file, ["model.jz=0.5", "atoms.theta=pi/8"])
        assert scenario.model.jz == 0.5
        assert scenario.atoms.theta == pytest.approx(math.pi / 8)

    def test_override_without_section(self, scenario_file):
        with pytest.raises(ScenarioConfigError):
            load_scenario(scenario_file, ["not_a_parameter=1"])

    def test_unknown_section(self, tmp_path):
        with pytest.raises(ScenarioConfigError):
            load_raw(write_scenario(tmp_path, BASE_SCENARIO + "\n[plots]\ncolor = red\n"))

    def test_bell_with_eta_rejected(self, tmp_path):
        with pytest.raises(ScenarioConfigError):
            load_scenario(write_scenario(tmp_path, BASE_SCENARIO.replace("theta = pi/4", "theta = pi/4\neta = 0.5")))

    def test_wigner_time_outside_grid(self, tmp_path):
        with pytest.raises(ScenarioConfigError):
            load_scenario(write_scenario(tmp_path, BASE_SCENARIO + "\n[outputs]\nwigner_times = 5\n"))

    def test_parse_sweep(self):
        assert parse_sweep("nbar_th=0, 1,2.5") == ("nbar_th", [0.0, 1.0, 2.5])
        with pytest.raises(ScenarioConfigError):
            parse_sweep("nbar_th")


class TestCommandLine:
    """Test jcm-sim runs end to end"""

    def test_default_run(self, scenario_file, tmp_path):
        out = tmp_path / "out"
        assert main(["--config", str(scenario_file), "--out", str(out)]) == EXIT_OK
        rows = read_csv(out / "series_main.csv")
        assert rows[0] == ["lambda_t", "concurrence", "negativity"]
        assert len(rows) == 22
        assert float(rows[1][1]) == pytest.approx(1.0)
        assert float(rows[1][2]) == pytest.approx(0.0, abs=1e-12)
        for row in rows[1:]:
            assert 0.0 <= float(row[1]) <= 1.0
        manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["derived"]["effective_detuning"] == 0.0
        assert manifest["resolved"]["main"]["invariants"]["passed"] is True
        assert (out / "diagnostics_main.json").is_file()

    def test_runs_are_byte_identical(self, scenario_file, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        assert main(["--config", str(scenario_file), "--out", str(first)]) == EXIT_OK
        assert main(["--config", str(scenario_file), "--out", str(second)]) == EXIT_OK
        for name in ("series_main.csv", "manifest.json"):
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_manifest_reproduces_run(self, scenario_file, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        assert main(["--config", str(scenario_file), "--out", str(first)]) == EXIT_OK
        assert main(["--config", str(first / "manifest.json"), "--out", str(second)]) == EXIT_OK
        assert (first / "series_main.csv").read_bytes() == (second / "series_main.csv").read_bytes()

    def test_concurrence_only_run_matches_full_state_run(self, tmp_path):
        reduced_cfg = write_scenario(tmp_path, BASE_SCENARIO + "\n[outputs]\nchannels = concurrence\n", "reduced.ini")
        full_cfg = write_scenario(tmp_path, BASE_SCENARIO, "full.ini")
        assert main(["--config", str(reduced_cfg), "--out", str(tmp_path / "reduced")]) == EXIT_OK
        assert main(["--config", str(full_cfg), "--out", str(tmp_path / "full")]) == EXIT_OK
        reduced = read_csv(tmp_path / "reduced" / "series_main.csv")
        full = read_csv(tmp_path / "full" / "series_main.csv")
        assert reduced[0] == ["lambda_t", "concurrence"]
        for left, right in zip(reduced[1:], full[1:]):
            assert float(left[1]) == pytest.approx(float(right[1]), abs=1e-10)
        manifest = json.loads((tmp_path / "reduced" / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["resolved"]["main"]["invariants"]["samples"] == 3

    def test_malformed_config(self, tmp_path):
        config_path = write_scenario(tmp_path, BASE_SCENARIO.replace("kind = bell", "kind = ghz"))
        out = tmp_path / "out"
        assert main(["--config", str(config_path), "--out", str(out)]) == EXIT_CONFIG
        assert not out.exists()

    def test_missing_config(self, tmp_path):
        assert main(["--config", str(tmp_path / "absent.ini"), "--out", str(tmp_path / "out")]) == EXIT_CONFIG

    def test_empty_outputs_write_manifest_only(self, tmp_path):
        config_path = write_scenario(tmp_path, BASE_SCENARIO + "\n[outputs]\nchannels =\ndiagnostics = false\n")
        out = tmp_path / "out"
        assert main(["--config", str(config_path), "--out", str(out)]) == EXIT_OK
        assert sorted(path.name for path in out.iterdir()) == ["manifest.json"]

    def test_truncation_failure(self, tmp_path):
        text = BASE_SCENARIO.replace("nbar_c = 1", "nbar_c = 30").replace("n_max = 12", "n_max = 12\nn_max_ceiling = 12")
        assert main(["--config", str(write_scenario(tmp_path, text)), "--out", str(tmp_path / "out")]) == EXIT_TRUNCATION

    def test_override_flag(self, scenario_file, tmp_path):
        out = tmp_path / "out"
        assert main(["--config", str(scenario_file), "--out", str(out), "--override", "field.nbar_th=1"]) == EXIT_OK
        manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["scenario"]["fields"]["main"]["nbar_th"] == 1.0

    def test_sweep(self, scenario_file, tmp_path):
        out = tmp_path / "sweep"
        assert main(["--config", str(scenario_file), "--out", str(out), "--sweep", "nbar_th=0,1"]) == EXIT_OK
        assert (out / "nbar_th=0" / "series_main.csv").is_file()
        assert (out / "nbar_th=1" / "series_main.csv").is_file()
        rows = read_csv(out / "sweep_nbar_th.csv")
        assert rows[0] == ["value", "series", "lambda_t", "concurrence", "negativity"]
        assert len(rows) == 1 + 2 * 21
        manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["points"] == ["nbar_th=0", "nbar_th=1"]

    def test_threads_reach_config_sweep(self, tmp_path, monkeypatch):
        seen = []

        class RecordingExecutor(ThreadPoolExecutor):
            def __init__(self, max_workers=None, *args, **kwargs):
                seen.append(max_workers)
                super().__init__(max_workers, *args, **kwargs)

        monkeypatch.setattr(cli, "ThreadPoolExecutor", RecordingExecutor)
        text = BASE_SCENARIO + "\n[sweep]\nparameter = nbar_th\nvalues = 0, 1\n"
        out = tmp_path / "sweep"
        assert main(["--config", str(write_scenario(tmp_path, text)), "--out", str(out), "--threads", "4"]) == EXIT_OK
        assert seen == [4]
        assert (out / "nbar_th=1" / "series_main.csv").is_file()

    def test_sweep_of_unknown_parameter(self, scenario_file, tmp_path):
        out = tmp_path / "sweep"
        assert main(["--config", str(scenario_file), "--out", str(out), "--sweep", "color=1,2"]) == EXIT_CONFIG
        assert not out.exists()


class TestOptionalOutputs:
    """Test Wigner, PCD, ESD and factorised-comparator files"""

    @pytest.fixture
    def full_run(self, tmp_path):
        text = BASE_SCENARIO + (
            "\n[outputs]\n"
            "channels = concurrence, negativity, inversion\n"
            "negativity_cuts = atoms_vs_field, atomA_vs_rest\n"
            "inversion_atoms = A, B\n"
            "wigner_times = 0, 1\n"
            "wigner_extent = 2\n"
            "wigner_points = 11\n"
            "pcd = true\n"
            "esd = true\n"
            "factorized = true\n"
        )
        out = tmp_path / "out"
        assert main(["--config", str(write_scenario(tmp_path, text)), "--out", str(out)]) == EXIT_OK
        return out

    def test_series_columns(self, full_run):
        header = read_csv(full_run / "series_main.csv")[0]
        assert header == [
            "lambda_t",
            "concurrence",
            "negativity",
            "negativity_atomA_vs_rest",
            "inversion_A",
            "inversion_B",
        ]

    def test_wigner_snapshots(self, full_run):
        for stamp in ("t0", "t1"):
            rows = read_csv(full_run / f"wigner_main_{stamp}.csv")
            assert rows[0] == ["x", "p", "w"]
            assert len(rows) == 1 + 11 * 11
            sidecar = json.loads((full_run / f"wigner_main_{stamp}.json").read_text(encoding="utf-8"))
            assert sidecar["nx"] == 11

    def test_pcd_table(self, full_run):
        rows = read_csv(full_run / "pcd_main.csv")
        assert rows[0] == ["l", "analytic", "matrix", "abs_diff"]
        assert max(float(row[3]) for row in rows[1:]) <= 1e-6

    def test_esd_report(self, full_run):
        report = json.loads((full_run / "esd_main.json").read_text(encoding="utf-8"))
        assert set(report) == {"concurrence", "negativity", "negativity_atomA_vs_rest"}
        assert report["concurrence"]["threshold"] == pytest.approx(1e-6)

    def test_factorized_comparison(self, full_run):
        rows = read_csv(full_run / "factorized_main.csv")
        assert rows[0] == ["lambda_t", "concurrence_exact", "concurrence_factorized", "abs_diff"]
        assert float(rows[1][3]) <= 1e-6
        manifest = json.loads((full_run / "manifest.json").read_text(encoding="utf-8"))
        assert "factorized_max_concurrence_discrepancy" in manifest["resolved"]["main"]


SCENARIO_DIR = Path(__file__).resolve().parents[1] / "data" / "scenarios"


class TestShippedScenarios:
    """Test that every bundled scenario file validates"""

    @pytest.mark.parametrize("path", sorted(SCENARIO_DIR.glob("*.ini")), ids=lambda path: path.stem)
    def test_loads(self, path):
        scenario = load_scenario(path)
        assert scenario.name == path.stem
        assert len(scenario.grid) == 2001

    def test_sweeps_name_sweepable_parameters(self):
        sweeps = [load_scenario(path).sweep for path in SCENARIO_DIR.glob("*_sweep.ini")]
        assert sweeps and all(sweep is not None for sweep in sweeps)

    def test_detuned_scenarios_use_effective_form(self):
        scenario = load_scenario(SCENARIO_DIR / "bell_detuning_sweep.ini")
        assert scenario.model.detuned_form
        assert scenario.model.delta == 2
