"""Config validation, the experiment runner, and the command-line entry."""

import csv
import json
import math

import numpy as np
import pytest

from oseledets.cli import (
    ConfigError,
    ExperimentConfig,
    list_presets,
    main,
    run,
)


def _spectrum_config(**analysis):
    a = {"task": "spectrum", "n": 60}
    a.update(analysis)
    return {
        "seed": 0,
        "driver": {"kind": "finite_cycle", "period": 1},
        "generator": {"kind": "constant", "matrix": [[2.0, 0.0], [0.0, 0.5]]},
        "analysis": a,
    }


def _write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


class TestConfigValidation:
    def test_accepts_minimal_spectrum(self):
        cfg = ExperimentConfig(_spectrum_config())
        assert cfg.task == "spectrum"
        assert cfg.analysis["n"] == 60

    def test_rejects_non_object(self):
        with pytest.raises(ConfigError):
            ExperimentConfig([1, 2])

    def test_rejects_bad_seed(self):
        raw = _spectrum_config()
        raw["seed"] = -1
        with pytest.raises(ConfigError, match="seed"):
            ExperimentConfig(raw)
        raw["seed"] = True
        with pytest.raises(ConfigError, match="seed"):
            ExperimentConfig(raw)

    def test_rejects_missing_analysis(self):
        raw = _spectrum_config()
        del raw["analysis"]
        with pytest.raises(ConfigError, match="analysis"):
            ExperimentConfig(raw)

    def test_rejects_unknown_task(self):
        with pytest.raises(ConfigError, match="analysis.task"):
            ExperimentConfig(_spectrum_config(task="eigen"))

    def test_rejects_missing_driver(self):
        raw = _spectrum_config()
        del raw["driver"]
        with pytest.raises(ConfigError, match="driver"):
            ExperimentConfig(raw)

    def test_rejects_unknown_driver_kind(self):
        raw = _spectrum_config()
        raw["driver"] = {"kind": "quasiperiodic"}
        with pytest.raises(ConfigError, match="driver.kind"):
            ExperimentConfig(raw)

    def test_rejects_unknown_generator_kind(self):
        raw = _spectrum_config()
        raw["generator"] = {"kind": "random"}
        with pytest.raises(ConfigError, match="generator.kind"):
            ExperimentConfig(raw)

    def test_rejects_small_ulam_grid(self):
        raw = _spectrum_config()
        raw["generator"] = {"kind": "ulam", "n_bins": 1,
                            "maps": [{"kind": "doubling"}]}
        with pytest.raises(ConfigError, match="generator.n_bins"):
            ExperimentConfig(raw)

    def test_diagnose_requires_p_above_one(self):
        raw = {
            "seed": 0,
            "driver": {"kind": "finite_cycle", "period": 1},
            "generator": {"kind": "ulam", "n_bins": 16,
                          "maps": [{"kind": "doubling"}]},
            "analysis": {"task": "diagnose", "p": 1, "t": 0.25},
        }
        with pytest.raises(ConfigError, match="analysis.p"):
            ExperimentConfig(raw)

    def test_diagnose_requires_matching_t(self):
        raw = {
            "seed": 0,
            "driver": {"kind": "finite_cycle", "period": 1},
            "generator": {"kind": "ulam", "n_bins": 16,
                          "maps": [{"kind": "doubling"}]},
            "analysis": {"task": "diagnose", "p": 2, "t": 0.6},
        }
        with pytest.raises(ConfigError, match="analysis.t"):
            ExperimentConfig(raw)

    def test_diagnose_rejects_ulam_free_generator(self):
        raw = _spectrum_config(task="diagnose", p=2, t=0.25)
        del raw["analysis"]["n"]
        with pytest.raises(ConfigError, match="generator.kind"):
            ExperimentConfig(raw)

    def test_diagnose_caps_composition_length(self):
        raw = {
            "seed": 0,
            "driver": {"kind": "finite_cycle", "period": 1},
            "generator": {"kind": "ulam", "n_bins": 16,
                          "maps": [{"kind": "doubling"}]},
            "analysis": {"task": "diagnose", "p": 2, "t": 0.25, "n": 40},
        }
        with pytest.raises(ConfigError, match="analysis.n"):
            ExperimentConfig(raw)

    def test_rational_strings_accepted(self):
        raw = {
            "seed": 0,
            "driver": {"kind": "finite_cycle", "period": 1},
            "generator": {"kind": "ulam", "n_bins": 16,
                          "maps": [{"kind": "affine_full_branch",
                                    "breakpoints": ["0", "3/10", "1"]}]},
            "analysis": {"task": "diagnose", "p": 2, "t": "1/4"},
        }
        cfg = ExperimentConfig(raw)
        assert cfg.analysis["t"] == 0.25

    def test_rejects_unparseable_rational(self):
        raw = _spectrum_config()
        raw["generator"] = {"kind": "ulam", "n_bins": 16,
                            "maps": [{"kind": "affine_full_branch",
                                      "breakpoints": ["0", "a/b", "1"]}]}
        with pytest.raises(ConfigError, match="breakpoints"):
            ExperimentConfig(raw)

    def test_rejects_boolean_number(self):
        raw = {
            "seed": 0,
            "driver": {"kind": "finite_cycle", "period": 1},
            "generator": {"kind": "ulam", "n_bins": 16,
                          "maps": [{"kind": "doubling"}]},
            "analysis": {"task": "diagnose", "p": True, "t": 0.25},
        }
        with pytest.raises(ConfigError, match="analysis.p"):
            ExperimentConfig(raw)

    def test_splitting_levels_validation(self):
        raw = _spectrum_config(task="splitting", levels=2)
        del raw["analysis"]["n"]
        assert ExperimentConfig(raw).analysis["levels"] == 2
        raw["analysis"]["levels"] = 0
        with pytest.raises(ConfigError, match="analysis.levels"):
            ExperimentConfig(raw)

    def test_sobolev_grid_power_of_two(self):
        raw = {"seed": 0, "analysis": {"task": "sobolev", "p": 2, "t": 0.5,
                                       "grid": 100}}
        with pytest.raises(ConfigError, match="analysis.grid"):
            ExperimentConfig(raw)

    def test_sobolev_needs_no_driver(self):
        raw = {"seed": 0, "analysis": {"task": "sobolev", "p": 2, "t": 0.5}}
        cfg = ExperimentConfig(raw)
        assert cfg.task == "sobolev"
        assert cfg.analysis["grid"] == 256


class TestPresets:
    def test_catalogue_contents(self):
        cat = list_presets()
        assert "buzzi_swap" in cat
        assert len(cat) == 7
        for entry in cat.values():
            assert entry["description"]

    def test_every_preset_validates(self):
        for name, entry in list_presets().items():
            cfg = ExperimentConfig(entry["config"])
            assert cfg.task == entry["config"]["analysis"]["task"], name


class TestRun:
    def test_spectrum_run_and_outputs(self, tmp_path):
        cfg = ExperimentConfig(_spectrum_config())
        report = run(cfg, tmp_path)
        assert report["passed"]
        assert (tmp_path / "report.json").is_file()
        assert (tmp_path / "trace_spectrum.csv").is_file()
        top = report["results"]["spectrum"]["exponents"][0]
        assert top == pytest.approx(math.log(2), abs=1e-9)

    def test_report_json_matches_returned_report(self, tmp_path):
        cfg = ExperimentConfig(_spectrum_config())
        report = run(cfg, tmp_path)
        with open(tmp_path / "report.json", encoding="utf-8") as fh:
            on_disk = json.load(fh)
        for key in ("config", "task", "results", "checks", "passed"):
            assert on_disk[key] == report[key]

    def test_deterministic_given_seed(self, tmp_path):
        raw = {
            "seed": 3,
            "driver": {"kind": "bernoulli", "probs": [0.5, 0.5]},
            "generator": {"kind": "ulam", "n_bins": 16,
                          "maps": [{"kind": "doubling"},
                                   {"kind": "tripling"}]},
            "analysis": {"task": "spectrum", "n": 80, "norm": "l1"},
        }
        a, b = tmp_path / "a", tmp_path / "b"
        run(ExperimentConfig(raw), a)
        run(ExperimentConfig(raw), b)
        ra = json.loads((a / "report.json").read_text())
        rb = json.loads((b / "report.json").read_text())
        ra.pop("timings"), rb.pop("timings")
        assert ra == rb
        assert (a / "trace_spectrum.csv").read_bytes() == \
            (b / "trace_spectrum.csv").read_bytes()

    def test_failing_check_reported_not_raised(self, tmp_path):
        # unresolved gap at a tiny step budget: converged=False is a
        # reported verdict, not an exception
        raw = {
            "seed": 0,
            "driver": {"kind": "finite_cycle", "period": 1},
            "generator": {"kind": "constant",
                          "matrix": [[math.exp(0.06), 0.0], [0.0, 1.0]]},
            "analysis": {"task": "splitting", "n_max": 8, "n": 32,
                         "tol": 1e-9},
        }
        report = run(ExperimentConfig(raw), tmp_path)
        assert not report["passed"]
        names = {c["name"]: c for c in report["checks"]}
        assert not names["splitting_converged"]["passed"]


class TestSplittingTrace:
    def test_verdict_recomputable_from_trace(self, tmp_path):
        rc = main(["splitting", "--preset", "constant-2x2-eigen",
                   "--out", str(tmp_path)])
        assert rc == 0
        report = json.loads((tmp_path / "report.json").read_text())
        with open(tmp_path / "trace_splitting.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert rows
        lvl1 = [r for r in rows if r["level"] == "1"]
        # the stored rate is the least-squares slope of the logged distances
        ns = np.array([float(r["n"]) for r in lvl1])
        ds = np.array([float(r["distance"]) for r in lvl1])
        keep = ds > 1e-13
        slope = np.polyfit(ns[keep], np.log(ds[keep]), 1)[0]
        cauchy = [c for c in report["checks"] if c["name"] == "cauchy_rate"]
        assert cauchy and cauchy[0]["passed"]
        assert -slope == pytest.approx(cauchy[0]["value"], rel=1e-9)
        assert float(lvl1[-1]["alpha_fit"]) == cauchy[0]["value"]
        # the convergence verdict matches the final logged distance
        tol = report["config"]["analysis"]["tol"]
        assert (ds[-1] <= tol) == bool(
            [c for c in report["checks"]
             if c["name"] == "splitting_converged"][0]["passed"])


class TestMain:
    def test_presets_listing(self, capsys):
        assert main(["presets"]) == 0
        out = capsys.readouterr().out
        assert "buzzi_swap" in out
        assert len(out.strip().splitlines()) == 7

    def test_exit_zero_and_check_lines(self, tmp_path, capsys):
        path = _write(tmp_path, "cfg.json", _spectrum_config())
        rc = main(["spectrum", "--config", path,
                   "--out", str(tmp_path / "out")])
        assert rc == 0
        assert "[ok]" in capsys.readouterr().out

    def test_exit_one_on_failing_check(self, tmp_path, capsys):
        raw = {
            "seed": 0,
            "driver": {"kind": "finite_cycle", "period": 1},
            "generator": {"kind": "constant",
                          "matrix": [[math.exp(0.06), 0.0], [0.0, 1.0]]},
            "analysis": {"task": "splitting", "n_max": 8, "n": 32,
                         "tol": 1e-9},
        }
        path = _write(tmp_path, "cfg.json", raw)
        rc = main(["splitting", "--config", path,
                   "--out", str(tmp_path / "out")])
        assert rc == 1
        assert "[FAIL]" in capsys.readouterr().out

    def test_exit_two_on_config_error(self, tmp_path, capsys):
        raw = {
            "seed": 0,
            "driver": {"kind": "finite_cycle", "period": 1},
            "generator": {"kind": "ulam", "n_bins": 16,
                          "maps": [{"kind": "doubling"}]},
            "analysis": {"task": "diagnose", "p": 1, "t": 0.25},
        }
        path = _write(tmp_path, "cfg.json", raw)
        rc = main(["diagnose", "--config", path,
                   "--out", str(tmp_path / "out")])
        assert rc == 2
        assert "analysis.p" in capsys.readouterr().err

    def test_exit_two_on_task_mismatch(self, tmp_path, capsys):
        path = _write(tmp_path, "cfg.json", _spectrum_config())
        rc = main(["splitting", "--config", path,
                   "--out", str(tmp_path / "out")])
        assert rc == 2
        assert "does not match" in capsys.readouterr().err

    def test_exit_two_on_unknown_preset(self, tmp_path, capsys):
        rc = main(["spectrum", "--preset", "nope", "--out", str(tmp_path)])
        assert rc == 2
        assert "unknown preset" in capsys.readouterr().err

    def test_exit_two_without_config_or_preset(self, tmp_path, capsys):
        assert main(["spectrum", "--out", str(tmp_path)]) == 2
        capsys.readouterr()

    def test_exit_two_on_invalid_json(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        rc = main(["spectrum", "--config", str(path),
                   "--out", str(tmp_path / "out")])
        assert rc == 2
        capsys.readouterr()

    def test_seed_override_echoed(self, tmp_path, capsys):
        path = _write(tmp_path, "cfg.json", _spectrum_config())
        rc = main(["spectrum", "--config", path, "--seed", "5",
                   "--out", str(tmp_path / "out")])
        assert rc == 0
        capsys.readouterr()
        report = json.loads((tmp_path / "out" / "report.json").read_text())
        assert report["config"]["seed"] == 5

    def test_ulam_task_writes_matrix_trace(self, tmp_path, capsys):
        raw = {
            "seed": 0,
            "driver": {"kind": "finite_cycle", "period": 1},
            "generator": {"kind": "ulam", "n_bins": 16,
                          "maps": [{"kind": "doubling"}]},
            "analysis": {"task": "ulam"},
        }
        path = _write(tmp_path, "cfg.json", raw)
        rc = main(["ulam", "--config", path, "--out", str(tmp_path / "out")])
        assert rc == 0
        capsys.readouterr()
        trace = tmp_path / "out" / "trace_ulam_matrix_0.csv"
        with open(trace, newline="") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 17       # header + one row per bin
        assert rows[0][:2] == ["row", "col_0"]
        body = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
        assert np.allclose(body.sum(axis=1), 1.0, atol=1e-15)

    def test_diagnose_preset_certifies_doubling(self, tmp_path, capsys):
        rc = main(["diagnose", "--preset", "doubling-diagnose",
                   "--out", str(tmp_path)])
        assert rc == 0
        capsys.readouterr()
        report = json.loads((tmp_path / "report.json").read_text())
        ks = report["results"]["kappa_star"]
        assert ks["certified"] is True
        assert ks["bound"] == -0.25 * math.log(2)
        assert (tmp_path / "trace_diagnose.csv").is_file()

    def test_sobolev_preset_trace(self, tmp_path, capsys):
        rc = main(["sobolev", "--preset", "sobolev-probe",
                   "--out", str(tmp_path)])
        assert rc == 0
        capsys.readouterr()
        with open(tmp_path / "trace_sobolev.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 10
        norms = [float(r["norm"]) for r in rows]
        assert all(a > b for a, b in zip(norms, norms[1:]))

    def test_batch_runs_numbered_experiments(self, tmp_path, capsys):
        batch = {"experiments": [
            _spectrum_config(),
            {
                "seed": 0,
                "driver": {"kind": "finite_cycle", "period": 1},
                "generator": {"kind": "ulam", "n_bins": 8,
                              "maps": [{"kind": "doubling"}]},
                "analysis": {"task": "ulam"},
            },
        ]}
        path = _write(tmp_path, "batch.json", batch)
        rc = main(["batch", "--config", path, "--out", str(tmp_path / "out")])
        assert rc == 0
        out = capsys.readouterr().out
        assert "exp_000 [spectrum] passed=True" in out
        assert "exp_001 [ulam] passed=True" in out
        assert (tmp_path / "out" / "exp_000" / "report.json").is_file()
        assert (tmp_path / "out" / "exp_001" / "report.json").is_file()

    def test_batch_requires_config(self, capsys):
        assert main(["batch", "--out", "unused"]) == 2
        capsys.readouterr()

    def test_batch_rejects_empty_list(self, tmp_path, capsys):
        path = _write(tmp_path, "batch.json", {"experiments": []})
        assert main(["batch", "--config", path,
                     "--out", str(tmp_path / "out")]) == 2
        capsys.readouterr()
