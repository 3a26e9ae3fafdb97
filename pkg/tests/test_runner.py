import os
from pathlib import Path

import numpy as np
import pytest

from irisbench.cli import main as cli_main
from irisbench.runner import (
    ExperimentConfig,
    load_config,
    parse_config,
    report_from_artifacts,
    run_experiment,
    write_results_csv,
)
from irisbench.scenario import PoolExhaustedError
from irisbench.synth import PopulationParams
from irisbench.templates import RotationPolicy, read_irtb

TINY_POP = dict(
    degrees_of_freedom=48,
    genuine_flip_prob=0.06,
    max_rotation_offset=2,
    occlusion_fraction_range=(0.0, 0.2),
    geometry=(4, 24, 1),
    flip_tail_fraction=0.1,
    flip_tail_max=0.45,
)

TINY_CFG_TEXT = """
# tiny sweep for tests
seed = 99
output_dir = {out}
gallery_sizes = 8,12
set_types = closed,open
strategies = one_to_n,one_to_first
rotation_policies = 2:4
accuracy_targets = 1e-2,1e-1
n_permutations = 2
emit_transaction_log = true
dof = 48
geometry = 4x24x1
genuine_flip_prob = 0.06
flip_tail_fraction = 0.1
flip_tail_max = 0.45
max_rotation_offset = 2
occlusion_range = 0:0.2
n_subjects = 40
samples_per_subject = 3
probe_cap_factor = 4
"""


def tiny_config(out_dir, **overrides) -> ExperimentConfig:
    seed = overrides.pop("seed", 99)
    base = dict(
        population=PopulationParams(seed=seed, **TINY_POP),
        n_subjects=40,
        samples_per_subject=3,
        gallery_sizes=(8, 12),
        set_types=("closed", "open"),
        strategies=("one_to_n", "one_to_first"),
        rotation_policies=(RotationPolicy(2, 4, True),),
        accuracy_targets=(1e-2, 1e-1),
        n_permutations=2,
        probe_cap_factor=4,
        seed=seed,
        output_dir=Path(out_dir),
        emit_transaction_log=False,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestConfigParsing:
    def test_round_trip_of_tiny_config(self, tmp_path):
        config = parse_config(TINY_CFG_TEXT.format(out=tmp_path / "o"))
        assert config.gallery_sizes == (8, 12)
        assert config.rotation_policies == (RotationPolicy(2, 4, True),)
        assert config.accuracy_targets == (0.01, 0.1)
        assert config.emit_transaction_log is True
        assert config.population.geometry == (4, 24, 1)

    def test_defaults_fill_in(self):
        config = parse_config("gallery_sizes = 100,200\noutput_dir = x")
        assert config.set_types == ("closed", "open")
        assert config.accuracy_targets == (1e-6, 1e-5, 1e-4, 1e-3, 1e-2)
        assert config.n_permutations == 5
        assert config.population.degrees_of_freedom == 250

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match="unknown config key"):
            parse_config("gallery_sizes = 10\nbogus = 1")

    def test_missing_required_key(self):
        with pytest.raises(ValueError, match="gallery_sizes"):
            parse_config("seed = 1")

    def test_malformed_line(self):
        with pytest.raises(ValueError, match="line 2"):
            parse_config("seed = 1\nnot a pair\n")

    def test_validation_errors(self, tmp_path):
        with pytest.raises(ValueError, match="ascending"):
            tiny_config(tmp_path, gallery_sizes=(12, 8))
        with pytest.raises(ValueError, match="set_types"):
            tiny_config(tmp_path, set_types=("sideways",))
        with pytest.raises(ValueError, match="n_permutations"):
            tiny_config(tmp_path, n_permutations=0)

    def test_desk_default_matches_spec_scale(self):
        config = ExperimentConfig.desk_default()
        assert config.gallery_sizes == tuple(range(100, 2001, 100))
        assert config.accuracy_targets == (1e-6, 1e-5, 1e-4, 1e-3, 1e-2)
        assert config.n_permutations == 5
        assert config.population.degrees_of_freedom == 250
        assert config.population.geometry == (20, 240, 2)
        assert config.rotation_policies[0] == RotationPolicy(7, 21, True)


class TestRunExperiment:
    @pytest.fixture(scope="class")
    def run(self, tmp_path_factory):
        out = tmp_path_factory.mktemp("sweep")
        config = tiny_config(out, emit_transaction_log=True)
        rows = run_experiment(config)
        return config, rows

    def test_row_count_covers_product(self, run):
        config, rows = run
        expected = (
            len(config.gallery_sizes)
            * len(config.set_types)
            * len(config.strategies)
            * len(config.accuracy_targets)
            * len(config.rotation_policies)
            * config.n_permutations
        )
        assert len(rows) == expected

    def test_single_cell_row_count(self, tmp_path):
        config = tiny_config(
            tmp_path,
            gallery_sizes=(8,),
            set_types=("closed",),
            accuracy_targets=(1e-1,),
            n_permutations=1,
        )
        rows = run_experiment(config)
        assert len(rows) == 2  # one per strategy

    def test_artifacts_exist(self, run):
        config, _ = run
        out = config.output_dir
        for name in (
            "results.csv",
            "calibration.csv",
            "scenarios.csv",
            "distributions.csv",
            "population.csv",
        ):
            assert (out / name).is_file(), name
        assert (out / "transactions").is_dir()
        assert len(list((out / "transactions").glob("*.csv"))) == len(_)

    def test_population_files_round_trip(self, run):
        config, _ = run
        out = config.output_dir
        import csv

        with open(out / "population.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == config.n_subjects * config.samples_per_subject
        sample = rows[0]
        template = read_irtb(out / sample["path"])
        assert template.geometry == config.population.geometry

    def test_report_reproduces_results_exactly(self, run):
        config, _ = run
        out = config.output_dir
        rows = report_from_artifacts(out)
        write_results_csv(out / "results_rebuilt.csv", rows)
        assert (out / "results_rebuilt.csv").read_bytes() == (out / "results.csv").read_bytes()

    def test_one_to_n_rows_normalize_to_exactly_one(self, run):
        _, rows = run
        for row in rows:
            if row["strategy"] == "one_to_n":
                assert row["mean_normalized_comparisons"] == 1.0
                assert row["mean_normalized_rotations"] == 1.0

    def test_pool_exhausted_names_cell(self, tmp_path):
        config = tiny_config(tmp_path, gallery_sizes=(8, 36), n_subjects=40)
        with pytest.raises(PoolExhaustedError, match=r"size=36"):
            run_experiment(config)


class TestDeterminism:
    def test_byte_identical_across_runs_and_jobs(self, tmp_path):
        outs = []
        for name, jobs in (("a", 1), ("b", 4), ("c", None)):
            config = tiny_config(tmp_path / name)
            run_experiment(config, jobs=jobs)
            outs.append((tmp_path / name / "results.csv").read_bytes())
        assert outs[0] == outs[1] == outs[2]

    def test_seed_changes_results(self, tmp_path):
        run_experiment(tiny_config(tmp_path / "a"))
        run_experiment(tiny_config(tmp_path / "b", seed=100))
        a = (tmp_path / "a" / "results.csv").read_bytes()
        b = (tmp_path / "b" / "results.csv").read_bytes()
        assert a != b


class TestCli:
    def test_missing_config_is_usage_error(self, capsys):
        assert cli_main(["run"]) == 2
        capsys.readouterr()

    def test_unknown_subcommand(self, capsys):
        assert cli_main(["frobnicate"]) == 2
        capsys.readouterr()

    def test_bad_config_path(self, capsys):
        assert cli_main(["run", "--config", "/nonexistent.cfg"]) == 1
        assert "error:" in capsys.readouterr().err

    def test_run_and_report_round_trip(self, tmp_path, capsys):
        cfg = tmp_path / "tiny.cfg"
        cfg.write_text(TINY_CFG_TEXT.format(out=tmp_path / "out"))
        assert cli_main(["run", "--config", str(cfg)]) == 0
        results = tmp_path / "out" / "results.csv"
        assert results.is_file()
        before = results.read_bytes()
        assert cli_main(["report", "--config", str(cfg)]) == 0
        assert results.read_bytes() == before
        capsys.readouterr()

    def test_generate_subcommand(self, tmp_path, capsys):
        cfg = tmp_path / "tiny.cfg"
        cfg.write_text(TINY_CFG_TEXT.format(out=tmp_path / "out"))
        assert cli_main(["generate", "--config", str(cfg)]) == 0
        assert (tmp_path / "out" / "population.csv").is_file()
        capsys.readouterr()

    def test_calibrate_subcommand(self, tmp_path, capsys):
        cfg = tmp_path / "tiny.cfg"
        cfg.write_text(TINY_CFG_TEXT.format(out=tmp_path / "out"))
        assert cli_main(["calibrate", "--config", str(cfg)]) == 0
        assert (tmp_path / "out" / "calibration.csv").is_file()
        capsys.readouterr()

    def test_seed_env_override(self, tmp_path, capsys, monkeypatch):
        cfg = tmp_path / "tiny.cfg"
        cfg.write_text(TINY_CFG_TEXT.format(out=tmp_path / "out1"))
        assert cli_main(["run", "--config", str(cfg)]) == 0
        cfg2 = tmp_path / "tiny2.cfg"
        cfg2.write_text(TINY_CFG_TEXT.format(out=tmp_path / "out2"))
        monkeypatch.setenv("ISB_SEED", "12345")
        assert cli_main(["run", "--config", str(cfg2)]) == 0
        a = (tmp_path / "out1" / "results.csv").read_bytes()
        b = (tmp_path / "out2" / "results.csv").read_bytes()
        assert a != b
        capsys.readouterr()
