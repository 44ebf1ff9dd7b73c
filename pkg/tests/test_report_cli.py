"""Record persistence, leaderboards, CD-diagram data, figures, and the CLI."""

import csv
import json

import numpy as np
import pytest

from tsadbench.cli import _resolve_threads, build_parser, load_grid, main
from tsadbench.core import MetricReport, RunRecord
from tsadbench.detectors import DETECTOR_KINDS
from tsadbench.errors import MalformedFile, SchemaMismatch, UnknownKind
from tsadbench.figures import render_cd_diagram, render_leaderboard
from tsadbench.metrics import METRIC_NAMES
from tsadbench.report import (
    CSV_COLUMNS,
    Leaderboard,
    cd_diagram_data,
    leaderboard,
    load_records,
    record_from_json,
    record_to_json,
    save_records,
)
from tsadbench.stats import rank_table
from tsadbench.synthesis import BaseSignalSpec, gen_suite


def fake_report(value):
    return MetricReport(
        entries={name: float(value) for name in METRIC_NAMES},
        best_thresholds={"F1": 1.0},
        threshold_used=1.0,
    )


def fake_record(detector, series, dataset, value=0.5, tags=None, status="ok"):
    ok = status == "ok"
    return RunRecord(
        run_id=f"{detector}.{series}",
        detector_id=detector,
        kind="zscore",
        hyperparams={"q": 3},
        window=16,
        strategy="full",
        series_name=series,
        dataset=dataset,
        tags=tags or {},
        seed=7,
        train_seconds=0.25,
        infer_seconds=1 / 3,
        peak_memory_bytes=None,
        report=fake_report(value) if ok else None,
        per_threshold={0.1: {"F1": float(value)}} if ok else None,
        status=status,
        error=None if ok else "Boom: synthetic failure",
    )


class TestPersistence:
    def test_save_writes_csv_rows_and_provenance_files(self, tmp_path):
        records = [fake_record("det", f"s{i}", "global", value=0.5 + i / 10) for i in range(3)]
        csv_path = save_records(records, tmp_path)
        with open(csv_path, newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == list(CSV_COLUMNS)
        assert len(rows) == 4
        f1_col = rows[0].index("F1")
        assert rows[1][f1_col] == repr(0.5)
        assert rows[3][rows[0].index("status")] == "ok"
        run_files = sorted(p.name for p in (tmp_path / "runs").iterdir())
        assert run_files == ["det.s0.json", "det.s1.json", "det.s2.json"]

    def test_load_inverts_save(self, tmp_path):
        records = [
            fake_record("a", "s0", "global", value=1 / 3, tags={"anomaly_type": "global"}),
            fake_record("b", "s0", "global", value=0.123456789012345),
            fake_record("c", "s1", "trend", status="failed"),
        ]
        save_records(records, tmp_path)
        assert load_records(tmp_path) == records

    def test_append_accumulates(self, tmp_path):
        records = [fake_record("det", "s0", "global")]
        save_records(records, tmp_path)
        save_records(records, tmp_path)
        loaded = load_records(tmp_path)
        assert loaded == records * 2
        assert len(list((tmp_path / "runs").iterdir())) == 1  # JSON overwritten

    def test_foreign_csv_header_blocks_append(self, tmp_path):
        (tmp_path / "records.csv").write_text("foo,bar\n1,2\n")
        with pytest.raises(SchemaMismatch, match="foreign header"):
            save_records([fake_record("det", "s0", "global")], tmp_path)

    def test_load_rejects_missing_columns(self, tmp_path):
        save_records([fake_record("det", "s0", "global")], tmp_path)
        rows = (tmp_path / "records.csv").read_text().splitlines()
        (tmp_path / "records.csv").write_text(
            "\n".join([rows[0].replace("F1,", "fun,", 1)] + rows[1:]) + "\n"
        )
        with pytest.raises(SchemaMismatch, match="missing columns \\['F1'\\]"):
            load_records(tmp_path)

    def test_load_rejects_missing_pieces(self, tmp_path):
        with pytest.raises(SchemaMismatch, match="not found"):
            load_records(tmp_path)
        save_records([fake_record("det", "s0", "global")], tmp_path)
        (tmp_path / "runs" / "det.s0.json").unlink()
        with pytest.raises(SchemaMismatch, match="no provenance"):
            load_records(tmp_path)
        (tmp_path / "records.csv").write_text("")
        with pytest.raises(SchemaMismatch, match="empty"):
            load_records(tmp_path)

    def test_json_round_trip_and_missing_keys(self):
        record = fake_record("det", "s0", "global", tags={"characteristics": ["trend"]})
        payload = record_to_json(record)
        assert payload["versions"]["tsadbench"]
        assert record_from_json(payload) == record
        payload.pop("seed")
        payload.pop("report")
        with pytest.raises(SchemaMismatch, match="missing keys.*report.*seed|missing keys.*seed"):
            record_from_json(payload, source="here")


class TestLeaderboard:
    def two_method_records(self):
        # a beats b on every series in both datasets
        records = []
        for dataset, series, hi, lo in [
            ("global", "s0", 0.9, 0.4),
            ("global", "s1", 0.8, 0.5),
            ("trend", "s2", 0.7, 0.2),
        ]:
            records.append(fake_record("a", series, dataset, value=hi))
            records.append(fake_record("b", series, dataset, value=lo))
        return records

    def test_groups_by_dataset_with_means(self):
        board = leaderboard(self.two_method_records(), "F1")
        assert board.methods == ("a", "b")
        assert board.groups == ("global", "trend")
        assert board.cells[0].tolist() == pytest.approx([0.85, 0.7])
        assert board.cells[1].tolist() == pytest.approx([0.45, 0.2])
        assert board.ranking.mean_ranks == {"a": 1.0, "b": 2.0}

    def test_row_order_agrees_with_rank_table(self):
        rng = np.random.default_rng(5)
        records = []
        for method in ("m0", "m1", "m2"):
            for dataset in ("d0", "d1", "d2", "d3"):
                records.append(
                    fake_record(method, f"s-{dataset}", dataset, value=rng.uniform())
                )
        board = leaderboard(records, "V-PR")
        methods = sorted({r.detector_id for r in records})
        cells = np.array(
            [
                [
                    next(
                        r.report["V-PR"]
                        for r in records
                        if r.detector_id == m and r.dataset == d
                    )
                    for d in board.groups
                ]
                for m in methods
            ]
        )
        want = rank_table(cells, methods, higher_better=True)
        assert board.methods == want.methods
        assert board.ranking.mean_ranks == want.mean_ranks
        for i, method in enumerate(board.methods):
            assert board.cells[i].tolist() == cells[methods.index(method)].tolist()

    def test_failed_runs_are_excluded(self):
        records = self.two_method_records()
        records.append(fake_record("a", "s3", "global", status="failed"))
        board = leaderboard(records, "F1")
        assert board.cells[0][0] == pytest.approx(0.85)
        with pytest.raises(ValueError, match="no successful records"):
            leaderboard([fake_record("a", "s0", "global", status="failed")], "F1")

    def test_single_method_has_no_ranking(self):
        records = [fake_record("only", f"s{i}", "global", value=0.5) for i in range(3)]
        board = leaderboard(records, "F1")
        assert board.ranking is None
        rows = board.rows()
        assert rows[0] == ["method", "global", "mean_rank"]
        assert rows[1] == ["only", "0.500000", "1.0000"]

    def test_empty_cell_ranks_worst(self):
        records = [
            fake_record("a", "s0", "d0", value=0.9),
            fake_record("a", "s1", "d1", value=0.9),
            fake_record("b", "s0", "d0", value=0.8),
            fake_record("c", "s0", "d0", value=0.1),
            fake_record("c", "s1", "d1", value=0.5),
        ]
        board = leaderboard(records, "F1")
        i_b = board.methods.index("b")
        j_d1 = board.groups.index("d1")
        assert np.isnan(board.cells[i_b, j_d1])
        # d0 ranks a=1 b=2 c=3; d1 ranks a=1 c=2 and the hole last
        assert board.ranking.mean_ranks == {"a": 1.0, "b": 2.5, "c": 2.5}
        assert board.rows()[i_b + 1][j_d1 + 1] == ""

    def test_groups_by_anomaly_type_tag(self):
        records = [
            fake_record("a", "s0", "x", value=0.9, tags={"anomaly_type": "global"}),
            fake_record("a", "s1", "x", value=0.7, tags={"anomaly_type": "trend"}),
            fake_record("a", "s2", "x", value=0.5),  # untagged
        ]
        board = leaderboard(records, "F1", group_by="anomaly_type")
        assert board.groups == ("global", "trend", "unknown")

    def test_groups_by_characteristic_fanout(self):
        records = [
            fake_record(
                "a", "s0", "x", value=0.6, tags={"characteristics": ["trend", "seasonality"]}
            ),
            fake_record("a", "s1", "x", value=0.4, tags={"characteristics": []}),
        ]
        board = leaderboard(records, "F1", group_by="characteristic")
        assert board.groups == ("none", "seasonality", "trend")
        # one record feeds both of its characteristic columns
        row = board.cells[0]
        assert row[board.groups.index("trend")] == pytest.approx(0.6)
        assert row[board.groups.index("seasonality")] == pytest.approx(0.6)
        assert row[board.groups.index("none")] == pytest.approx(0.4)

    def test_validation(self):
        records = self.two_method_records()
        with pytest.raises(ValueError, match="unknown metric"):
            leaderboard(records, "F2")
        with pytest.raises(ValueError, match="group_by"):
            leaderboard(records, "F1", group_by="series")


class TestCdDiagramData:
    def separated_ranking(self):
        base = np.arange(3, 0, -1, dtype=np.float64)[:, None]
        values = base + 0.01 * np.arange(60)[None, :]
        return rank_table(values, ["a", "b", "c"])

    def test_positions_sorted_best_first(self):
        data = cd_diagram_data(self.separated_ranking())
        ranks = [p["rank"] for p in data["positions"]]
        assert ranks == sorted(ranks)
        assert [p["method"] for p in data["positions"]] == ["a", "b", "c"]
        assert data["connections"] == []  # 60 datasets separate everything

    def test_connections_only_for_real_groups(self):
        values = np.array([[3.0, 3.0], [2.0, 2.0], [1.0, 1.0]])
        ranking = rank_table(values, ["a", "b", "c"])  # cd = 2.34 > spread
        data = cd_diagram_data(ranking)
        assert len(data["connections"]) == 1
        seg = data["connections"][0]
        assert seg["methods"] == ["a", "b", "c"]
        assert (seg["lo"], seg["hi"]) == (1.0, 3.0)
        assert data["cd"] == pytest.approx(ranking.cd)


class TestFigures:
    def test_renders_non_empty_pngs(self, tmp_path):
        records = [
            fake_record("a", "s0", "d0", value=0.9),
            fake_record("b", "s0", "d0", value=0.4),
            fake_record("b", "s1", "d1", value=0.5),  # leaves a NaN cell for a
        ]
        board = leaderboard(records, "F1")
        lb_path = render_leaderboard(board, tmp_path / "lb.png")
        cd_path = render_cd_diagram(cd_diagram_data(board.ranking), tmp_path / "cd.png")
        for path in (lb_path, cd_path):
            data = path.read_bytes()
            assert data[:8] == b"\x89PNG\r\n\x1a\n"
            assert len(data) > 1000


class TestLoadGrid:
    def test_default_grid_covers_every_kind(self):
        specs = load_grid(None)
        assert len(specs) == 13
        assert {spec.kind for spec in specs} == set(DETECTOR_KINDS)
        assert all(spec.window == 32 for spec in specs)

    def test_window_override(self, tmp_path):
        assert all(spec.window == 16 for spec in load_grid(None, window=16))
        path = tmp_path / "grid.json"
        path.write_text(json.dumps({"configs": [{"kind": "zscore", "window": 8}]}))
        assert load_grid(path)[0].window == 8
        assert load_grid(path, window=64)[0].window == 64

    def test_malformed_grids(self, tmp_path):
        path = tmp_path / "grid.json"
        path.write_text("{nope")
        with pytest.raises(MalformedFile, match="not valid JSON"):
            load_grid(path)
        path.write_text(json.dumps([{"kind": "zscore"}]))
        with pytest.raises(MalformedFile, match="configs"):
            load_grid(path)
        path.write_text(json.dumps({"configs": []}))
        with pytest.raises(MalformedFile, match="non-empty"):
            load_grid(path)
        path.write_text(json.dumps({"configs": [{"name": "x"}]}))
        with pytest.raises(MalformedFile, match="'kind'"):
            load_grid(path)
        path.write_text(json.dumps({"configs": [{"kind": "transformer"}]}))
        with pytest.raises(UnknownKind):
            load_grid(path)


def write_corpus(tmp_path, n=2, seed=5):
    corpus_dir = tmp_path / "corpus"
    gen_suite(
        "global",
        n,
        seed=seed,
        base=BaseSignalSpec(length=400, period=16.0),
        out_dir=corpus_dir,
    )
    return corpus_dir


def small_grid(tmp_path):
    path = tmp_path / "grid.json"
    path.write_text(
        json.dumps(
            {
                "configs": [
                    {"name": "zscore", "kind": "zscore"},
                    {"name": "sr", "kind": "spectral_residual", "hyperparams": {"q": 3}},
                ]
            }
        )
    )
    return path


class TestCliPlumbing:
    def test_help_and_usage_exit_codes(self, capsys):
        assert main(["--help"]) == 0
        assert "inject" in capsys.readouterr().out
        assert main([]) == 1
        assert main(["frobnicate"]) == 1
        assert main(["bench"]) == 1  # missing required arguments
        assert "error" in capsys.readouterr().err

    def test_data_errors_exit_two(self, tmp_path, capsys):
        code = main(
            ["bench", "--corpus", str(tmp_path / "nope.json"), "--out", str(tmp_path)]
        )
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_seed_parses_before_or_after_the_command(self):
        parser = build_parser()
        assert parser.parse_args(["--seed", "5", "validate", "--corpus", "x"]).seed == 5
        assert parser.parse_args(["validate", "--seed", "7", "--corpus", "x"]).seed == 7
        assert parser.parse_args(["validate", "--corpus", "x"]).seed == 0

    def test_thread_resolution(self, monkeypatch, capsys):
        assert _resolve_threads(2) == 2
        monkeypatch.setenv("TSADBENCH_THREADS", "4")
        assert _resolve_threads(None) == 4
        assert _resolve_threads(6) == 6  # explicit flag beats the environment
        monkeypatch.setenv("TSADBENCH_THREADS", "many")
        assert _resolve_threads(None) == 1
        assert "TSADBENCH_THREADS" in capsys.readouterr().err
        monkeypatch.setenv("TSADBENCH_THREADS", "0")
        assert _resolve_threads(None) == 1


class TestCliCommands:
    def test_inject_then_validate(self, tmp_path, capsys):
        out = tmp_path / "suite"
        assert main(["inject", "--out", str(out), "--kind", "global", "--n", "2"]) == 0
        assert (out / "manifest.json").exists()
        assert len(list(out.glob("*.csv"))) == 2
        assert main(["validate", "--corpus", str(out / "manifest.json")]) == 0
        assert "ok: 2 series" in capsys.readouterr().out

    def test_validate_names_the_offender(self, tmp_path, capsys):
        corpus = write_corpus(tmp_path)
        victim = sorted(corpus.glob("*.csv"))[0]
        victim.unlink()
        assert main(["validate", "--corpus", str(corpus / "manifest.json")]) == 2
        assert victim.stem in capsys.readouterr().err

    def test_analyze_series_and_corpus(self, tmp_path, capsys):
        corpus = write_corpus(tmp_path)
        series_csv = sorted(corpus.glob("*.csv"))[0]
        assert main(["analyze", "--series", str(series_csv)]) == 0
        out = capsys.readouterr().out
        assert out.startswith("name,trend_score")
        assert len(out.strip().splitlines()) == 2

        table = tmp_path / "profiles.csv"
        code = main(
            ["analyze", "--corpus", str(corpus / "manifest.json"), "--out", str(table)]
        )
        assert code == 0
        with open(table, newline="") as handle:
            rows = list(csv.reader(handle))
        assert len(rows) == 3
        assert rows[0][0] == "name"

    def run_bench(self, tmp_path):
        corpus = write_corpus(tmp_path)
        out = tmp_path / "bench"
        code = main(
            [
                "bench",
                "--corpus",
                str(corpus / "manifest.json"),
                "--grid",
                str(small_grid(tmp_path)),
                "--window",
                "16",
                "--out",
                str(out),
                "--seed",
                "3",
            ]
        )
        assert code == 0
        return out

    def test_bench_writes_records_and_summary(self, tmp_path, capsys):
        out = self.run_bench(tmp_path)
        assert "4 runs (0 failed)" in capsys.readouterr().out
        with open(out / "records.csv", newline="") as handle:
            rows = list(csv.reader(handle))
        assert len(rows) == 5
        assert len(list((out / "runs").glob("*.json"))) == 4
        summary = json.loads((out / "summary.json").read_text())
        assert summary["synthetic_global"]["count"] == 4
        assert summary["synthetic_global"]["failures"] == 0
        assert set(summary["synthetic_global"]["metrics"]) == set(METRIC_NAMES)

    def test_report_renders_tables_and_figures(self, tmp_path):
        records_dir = self.run_bench(tmp_path)
        out = tmp_path / "report"
        code = main(
            [
                "report",
                "--records",
                str(records_dir),
                "--metric",
                "F1",
                "--group-by",
                "anomaly_type",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        with open(out / "leaderboard.csv", newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["method", "global", "mean_rank"]
        assert len(rows) == 3
        data = json.loads((out / "cd_diagram.json").read_text())
        assert len(data["positions"]) == 2
        for name in ("leaderboard.png", "cd_diagram.png"):
            blob = (out / name).read_bytes()
            assert blob[:8] == b"\x89PNG\r\n\x1a\n"
            assert len(blob) > 1000

    def test_report_single_method_skips_the_diagram(self, tmp_path, capsys):
        records_dir = tmp_path / "records"
        save_records(
            [fake_record("only", f"s{i}", "global", value=0.5 + i / 10) for i in range(3)],
            records_dir,
        )
        out = tmp_path / "report"
        assert main(["report", "--records", str(records_dir), "--out", str(out)]) == 0
        assert (out / "leaderboard.csv").exists()
        assert (out / "leaderboard.png").exists()
        assert not (out / "cd_diagram.json").exists()
        assert not (out / "cd_diagram.png").exists()
