import json
from pathlib import Path

import pytest

import phoneline
from phoneline.cli import main
from phoneline.config import ScenarioConfig
from phoneline.jsonio import dumps_stable

GOLDEN_DIR = Path(phoneline.__file__).parent / "data" / "golden"


def small_scenario(tmp_path, name="scenario.json", **overrides) -> Path:
    doc = ScenarioConfig().to_dict()
    doc["lot_size"] = 16
    for key, value in overrides.items():
        section, _, field = key.partition(".")
        if field:
            doc[section][field] = value
        else:
            doc[section] = value
    path = tmp_path / name
    path.write_text(dumps_stable(doc, float_mode="exact"))
    return path


class TestSimulate:
    def test_default_scenario_meets_throughput(self, tmp_path, capsys):
        out = tmp_path / "o"
        assert main(["simulate", "--out", str(out), "--json"]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["mean_steady_state_throughput_phph"] >= 120.0
        assert (out / "sim_report_rep000.json").exists()
        assert (out / "aggregate.json").exists()

    def test_fixed_seed_reps_reproducible_across_invocations(self, tmp_path):
        scenario = small_scenario(tmp_path)
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        assert main(["simulate", str(scenario), "--reps", "3", "--seed", "7",
                     "--out", str(out1)]) == 0
        assert main(["simulate", str(scenario), "--reps", "3", "--seed", "7",
                     "--out", str(out2)]) == 0
        assert (out1 / "aggregate.json").read_bytes() == (out2 / "aggregate.json").read_bytes()
        for r in range(3):
            name = f"sim_report_rep{r:03d}.json"
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_replications_produce_one_report_each(self, tmp_path):
        scenario = small_scenario(tmp_path, **{"perception.confusion": "default"})
        out = tmp_path / "o"
        assert main(["simulate", str(scenario), "--reps", "4", "--out", str(out)]) == 0
        assert len(list(out.glob("sim_report_rep*.json"))) == 4

    def test_missing_scenario_exits_2(self, tmp_path):
        assert main(["simulate", str(tmp_path / "absent.json"),
                     "--out", str(tmp_path / "o")]) == 2

    def test_unknown_scenario_key_exits_2_and_warn_flag_accepts(self, tmp_path):
        doc = ScenarioConfig().to_dict()
        doc["lot_size"] = 4
        doc["mystery"] = 1
        path = tmp_path / "s.json"
        path.write_text(dumps_stable(doc, float_mode="exact"))
        assert main(["simulate", str(path), "--out", str(tmp_path / "a")]) == 2
        with pytest.warns(UserWarning):
            assert main(["simulate", str(path), "--warn-unknown",
                         "--out", str(tmp_path / "b")]) == 0

    def test_trace_emitted_on_request(self, tmp_path):
        scenario = small_scenario(tmp_path)
        out = tmp_path / "o"
        assert main(["simulate", str(scenario), "--trace", "--out", str(out)]) == 0
        trace = (out / "trace_rep000.csv").read_text().splitlines()
        assert trace[0] == "time,seq,kind,uid,station"
        assert len(trace) > 16

    def test_hazard_csv_written_per_replication(self, tmp_path):
        scenario = small_scenario(tmp_path, **{"perception.confusion": "default"},
                                  lot_size=400)
        out = tmp_path / "o"
        assert main(["simulate", str(scenario), "--seed", "5", "--out", str(out)]) == 0
        rows = (out / "hazards_rep000.csv").read_text().splitlines()
        assert rows[0] == "time_s,uid,description"
        assert len(rows) > 1  # 400 default-matrix phones yield some hazards

    def test_manifest_hash_tracks_scenario_bytes(self, tmp_path):
        s1 = small_scenario(tmp_path, name="a.json")
        s2 = small_scenario(tmp_path, name="b.json")
        s2.write_text(s2.read_text() + "\n")  # same config, different bytes
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        main(["simulate", str(s1), "--out", str(out1)])
        main(["simulate", str(s2), "--out", str(out2)])
        m1 = json.loads((out1 / "run_manifest.json").read_text())
        m2 = json.loads((out2 / "run_manifest.json").read_text())
        assert m1["scenario_sha256"] != m2["scenario_sha256"]
        assert m1["tool_version"] == phoneline.__version__

    def test_out_dir_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PHONELINE_OUT", str(tmp_path / "envout"))
        scenario = small_scenario(tmp_path)
        assert main(["simulate", str(scenario)]) == 0
        assert (tmp_path / "envout" / "aggregate.json").exists()


class TestTea:
    def test_golden_compare_clean(self, tmp_path):
        out = tmp_path / "o"
        assert main(["tea", "--out", str(out), "--compare", str(GOLDEN_DIR)]) == 0
        assert (out / "tea_report.json").exists()
        for name in ("subtable1.csv", "subtable2.csv", "subtable3.csv"):
            assert (out / name).exists()

    def test_tampered_rate_fails_compare_with_cells(self, tmp_path, capsys):
        scenario = small_scenario(tmp_path, **{"economics.electricity_rate": 0.2})
        out = tmp_path / "o"
        assert main(["tea", str(scenario), "--out", str(out),
                     "--compare", str(GOLDEN_DIR)]) == 3
        err = capsys.readouterr().err
        assert "energy" in err and "subtable1" in err

    def test_zero_electricity_rate_zeroes_energy_column(self, tmp_path):
        scenario = small_scenario(tmp_path, **{"economics.electricity_rate": 0.0})
        out = tmp_path / "o"
        assert main(["tea", str(scenario), "--out", str(out)]) == 0
        table = (out / "subtable1.csv").read_text().splitlines()[1:]
        assert all(row.split(",")[3] == "0.00" for row in table)

    def test_unsupervised_profit_in_subtable(self, tmp_path):
        out = tmp_path / "o"
        assert main(["tea", "--out", str(out)]) == 0
        last_col = [row.split(",")[-1]
                    for row in (out / "subtable3.csv").read_text().splitlines()]
        assert last_col[1] == "1.35"

    def test_byte_identical_reports(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(["tea", "--out", str(out1)])
        main(["tea", "--out", str(out2)])
        assert (out1 / "tea_report.json").read_bytes() == (out2 / "tea_report.json").read_bytes()


class TestMetrics:
    @staticmethod
    def _write_jsonl(path, records):
        path.write_text("\n".join(json.dumps(r) for r in records) + "\n")

    def _fixture(self, tmp_path):
        truths = [{"image_id": "i", "class": "screen", "bbox": [0, 0, 10, 10]},
                  {"image_id": "i", "class": "film", "bbox": [20, 0, 10, 10]}]
        preds = [{"image_id": "i", "class": "screen", "confidence": 0.95,
                  "bbox": [0, 0, 10, 10]},
                 {"image_id": "i", "class": "film", "confidence": 0.9,
                  "bbox": [20, 0, 10, 10]}]
        p, t = tmp_path / "preds.jsonl", tmp_path / "truths.jsonl"
        self._write_jsonl(p, preds)
        self._write_jsonl(t, truths)
        return p, t

    def test_identical_files_score_one(self, tmp_path, capsys):
        p, t = self._fixture(tmp_path)
        assert main(["metrics", str(p), str(t), "--out", str(tmp_path / "o"),
                     "--json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["per_class"]["screen"]["f1"] == 1.0
        assert report["map_50_95"] == 1.0

    def test_staircase_fixture_ap(self, tmp_path, capsys):
        truths = [{"image_id": "i", "class": "screen", "bbox": [0, 0, 10, 10]},
                  {"image_id": "i", "class": "screen", "bbox": [50, 50, 10, 10]}]
        preds = [{"image_id": "i", "class": "screen", "confidence": 0.9,
                  "bbox": [0, 0, 10, 10]},
                 {"image_id": "i", "class": "screen", "confidence": 0.8,
                  "bbox": [100, 100, 10, 10]},
                 {"image_id": "i", "class": "screen", "confidence": 0.7,
                  "bbox": [50, 50, 10, 10]}]
        p, t = tmp_path / "p.jsonl", tmp_path / "t.jsonl"
        self._write_jsonl(p, preds)
        self._write_jsonl(t, truths)
        assert main(["metrics", str(p), str(t), "--out", str(tmp_path / "o"),
                     "--json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["per_class"]["screen"]["ap"] == pytest.approx(0.8333, abs=1e-4)

    def test_extreme_confidence_threshold_zeroes_recall(self, tmp_path, capsys):
        p, t = self._fixture(tmp_path)
        assert main(["metrics", str(p), str(t), "--conf", "1.01",
                     "--out", str(tmp_path / "o"), "--json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["per_class"]["screen"]["recall"] == 0.0

    def test_malformed_line_exits_2_with_line_number(self, tmp_path, capsys):
        p, t = self._fixture(tmp_path)
        p.write_text(p.read_text() + "{broken\n")
        assert main(["metrics", str(p), str(t), "--out", str(tmp_path / "o")]) == 2
        assert ":3:" in capsys.readouterr().err


class TestSweep:
    def test_labor_axis_grid(self, tmp_path):
        out = tmp_path / "o"
        scenario = small_scenario(tmp_path)
        assert main(["sweep", str(scenario), "--axis", "labor_rate=0,35",
                     "--out", str(out)]) == 0
        rows = (out / "sweep.csv").read_text().strip().splitlines()
        assert len(rows) == 3  # header + 2 rows
        assert rows[1].split(",")[1] == "1.30"
        assert rows[2].split(",")[1] == "0.52"
        assert (out / "plot_data.csv").exists()

    def test_pick_time_axis_runs_simulation_monotone(self, tmp_path):
        out = tmp_path / "o"
        scenario = small_scenario(tmp_path)
        assert main(["sweep", str(scenario), "--axis", "pick_time=5,7,9",
                     "--out", str(out)]) == 0
        rows = (out / "sweep.csv").read_text().strip().splitlines()
        header = rows[0].split(",")
        col = header.index("steady_state_throughput_phph")
        values = [float(r.split(",")[col]) for r in rows[1:]]
        assert values == sorted(values, reverse=True)  # non-increasing in pick_time

    def test_unknown_axis_exits_2(self, tmp_path):
        scenario = small_scenario(tmp_path)
        assert main(["sweep", str(scenario), "--axis", "warp_factor=9",
                     "--out", str(tmp_path / "o")]) == 2

    def test_no_axes_exits_2(self, tmp_path):
        scenario = small_scenario(tmp_path)
        assert main(["sweep", str(scenario), "--out", str(tmp_path / "o")]) == 2


class TestValidate:
    def test_fresh_checkout_passes(self, tmp_path, capsys):
        assert main(["validate", "--out", str(tmp_path / "o")]) == 0
        out = capsys.readouterr().out
        assert out.count("PASS") == 10
        assert "FAIL" not in out

    def test_json_summary(self, tmp_path, capsys):
        assert main(["validate", "--json", "--out", str(tmp_path / "o")]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["passed"] is True
        assert len(doc["criteria"]) == 10

    def test_tampered_electricity_rate_fails_criterion_1(self, tmp_path, capsys):
        scenario = small_scenario(tmp_path, **{"economics.electricity_rate": 0.3})
        assert main(["validate", "--scenario", str(scenario), "--json",
                     "--out", str(tmp_path / "o")]) == 3
        doc = json.loads(capsys.readouterr().out)
        failed = [c["criterion"] for c in doc["criteria"] if not c["passed"]]
        assert 1 in failed
