import csv
import io
import json
from datetime import datetime
from decimal import Decimal

from click.testing import CliRunner
from PIL import Image

from photoyear.cli import main
from photoyear.storage import GameMode, GamePlay, Repository, ScryptParams

from conftest import build_catalog

FAST_SCRYPT = ScryptParams(n=256, r=8, p=1)


def write_meta(path, rows):
    with open(path, "w", encoding="utf-8") as fp:
        fp.write("img_id,gt_year,date_taken,date_granularity,url,title\n")
        for row in rows:
            fp.write(",".join(str(f) for f in row) + "\n")


def full_coverage_rows(url_for=None):
    rows = []
    for i, year in enumerate(range(1930, 2000)):
        url = url_for(i) if url_for else f"https://images.example/{i}.jpg"
        rows.append([f"img-{i:03d}", year, f"{year}-01-01", 0, url, f"Scene {i}"])
    return rows


class TestIngest:
    def test_clean_catalog_exits_zero(self, tmp_path):
        meta = tmp_path / "meta.csv"
        write_meta(meta, full_coverage_rows())
        report = tmp_path / "report.txt"
        result = CliRunner().invoke(main, [
            "ingest", "--meta", str(meta), "--dest", str(tmp_path / "assets"),
            "--report", str(report),
        ])
        assert result.exit_code == 0, result.output
        assert "accepted 70/70" in result.output
        assert "total_rows=70 accepted=70" in report.read_text()

    def test_rejections_exit_two_and_land_in_report(self, tmp_path):
        meta = tmp_path / "meta.csv"
        rows = full_coverage_rows()
        rows[3][1] = "19x4"          # NonIntegerYear; 1933 now missing too
        write_meta(meta, rows)
        report = tmp_path / "report.txt"
        result = CliRunner().invoke(main, [
            "ingest", "--meta", str(meta), "--dest", str(tmp_path / "assets"),
            "--report", str(report),
        ])
        assert result.exit_code == 2
        text = report.read_text()
        assert "NonIntegerYear" in text
        assert "missing_years=1933" in text

    def test_partial_years_waived_by_flag(self, tmp_path):
        meta = tmp_path / "meta.csv"
        write_meta(meta, [["only", 1950, "", 0, "https://x.example/a.jpg", ""]])
        result = CliRunner().invoke(main, [
            "ingest", "--meta", str(meta), "--dest", str(tmp_path / "assets"),
            "--report", str(tmp_path / "report.txt"), "--allow-partial-years",
        ])
        assert result.exit_code == 0, result.output

    def test_unreadable_input_exits_one(self, tmp_path):
        result = CliRunner().invoke(main, [
            "ingest", "--meta", str(tmp_path / "missing.csv"),
            "--dest", str(tmp_path), "--report", str(tmp_path / "report.txt"),
        ])
        assert result.exit_code == 1

    def test_fetch_writes_resized_assets(self, tmp_path):
        src = tmp_path / "src"
        src.mkdir()
        for i in range(3):
            Image.new("RGB", (1600, 1200), (i * 10, 0, 0)).save(src / f"{i}.png")
        meta = tmp_path / "meta.csv"
        rows = [
            [f"pic-{i}", 1940 + i, "", 0, f"file://{src}/{i}.png", f"P{i}"]
            for i in range(3)
        ]
        rows.append(["pic-dead", 1950, "", 0, f"file://{src}/missing.png", ""])
        write_meta(meta, rows)
        dest = tmp_path / "assets"
        report = tmp_path / "report.txt"
        result = CliRunner().invoke(main, [
            "ingest", "--meta", str(meta), "--dest", str(dest), "--fetch",
            "--workers", "2", "--allow-partial-years", "--report", str(report),
        ])
        assert result.exit_code == 2   # one dead URL
        for i in range(3):
            with Image.open(dest / f"pic-{i}.jpg") as img:
                assert img.size == (800, 600)
        assert "pic-dead" in report.read_text()


class TestStats:
    def seed_db(self, db_path):
        repo = Repository(db_path, scrypt_params=FAST_SCRYPT)
        catalog = build_catalog([1935, 1943, 1955, 1955, 1968])
        repo.sync_catalog(catalog)
        user = repo.create_user("ari", "correct-horse-9")
        records = catalog.records

        def play(mode, image_ids, correct, at, user_id=user.user_id, guess=None, choice=None):
            repo.record_play(GamePlay(
                mode=mode, user_id=user_id, session_id="s", image_ids=image_ids,
                guess=guess, choice=choice, correct=correct, static_points=10 if correct else 0,
                dynamic_points=Decimal("10.00") if correct else Decimal("0.00"),
                played_at=at,
            ))

        play(GameMode.GUESS_YEAR, (records[0].img_id,), True,
             datetime(2025, 2, 1), guess=1935)
        play(GameMode.GUESS_YEAR, (records[1].img_id,), False,
             datetime(2025, 2, 20), guess=1990)
        play(GameMode.TIMELINE, (records[0].img_id, records[2].img_id), True,
             datetime(2025, 3, 1), choice="left")
        play(GameMode.GUESS_YEAR, (records[4].img_id,), True,
             datetime(2025, 3, 5), guess=1968, user_id=None)   # demo
        repo.close()

    def run_stats(self, db, *args):
        result = CliRunner().invoke(main, ["stats", "--db", str(db), *args])
        assert result.exit_code == 0, result.output
        return result.output

    def test_csv_output(self, tmp_path):
        db = tmp_path / "game.db"
        self.seed_db(db)
        output = self.run_stats(db, "--format", "csv")
        rows = list(csv.DictReader(io.StringIO(output)))
        by_label = {(r["row_type"], r["label"]): r for r in rows}
        assert by_label[("decade", "1930s")]["total_guesses"] == "2"
        assert by_label[("decade", "1930s")]["correct_pct"] == "100.0"
        assert by_label[("decade", "1940s")]["correct_pct"] == "0.0"
        assert by_label[("decade", "1950s")]["total_guesses"] == "1"
        assert by_label[("mode", "guess_year")]["total_guesses"] == "2"
        assert by_label[("mode", "timeline")]["correct_pct"] == "100.00"

    def test_include_demo_flag(self, tmp_path):
        db = tmp_path / "game.db"
        self.seed_db(db)
        without = list(csv.DictReader(io.StringIO(self.run_stats(db, "--format", "csv"))))
        with_demo = list(csv.DictReader(io.StringIO(
            self.run_stats(db, "--format", "csv", "--include-demo")
        )))
        def guesses(rows, label):
            return int([r for r in rows if r["label"] == label][0]["total_guesses"])
        assert guesses(with_demo, "1960s") == guesses(without, "1960s") + 1

    def test_date_window(self, tmp_path):
        db = tmp_path / "game.db"
        self.seed_db(db)
        output = self.run_stats(db, "--format", "csv", "--from", "2025-02-15",
                                "--to", "2025-03-02")
        rows = list(csv.DictReader(io.StringIO(output)))
        total = sum(int(r["total_guesses"]) for r in rows if r["row_type"] == "decade")
        assert total == 3   # one wrong year guess + one timeline play (2 events)

    def test_table_output_mentions_modes(self, tmp_path):
        db = tmp_path / "game.db"
        self.seed_db(db)
        output = self.run_stats(db)
        assert "guess_year" in output and "timeline" in output
        assert "1930s" in output


class TestMigrate:
    def test_apply_then_noop(self, tmp_path):
        db = tmp_path / "fresh.db"
        first = CliRunner().invoke(main, ["migrate", "--db", str(db)])
        assert first.exit_code == 0
        assert "schema" in first.output
        second = CliRunner().invoke(main, ["migrate", "--db", str(db)])
        assert "already at 1" in second.output


class TestServe:
    def test_missing_catalog_fails_loudly(self, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({
            "catalog_path": str(tmp_path / "nope.csv"),
            "image_dir": str(tmp_path),
            "storage_url": str(tmp_path / "game.db"),
        }))
        result = CliRunner().invoke(main, ["serve", "--config", str(config)])
        assert result.exit_code == 1
        combined = result.output + str(result.stderr or "")
        assert "nope.csv" in combined

    def test_unknown_config_key_rejected(self, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"listen_port": 9}))
        result = CliRunner().invoke(main, ["serve", "--config", str(config)])
        assert result.exit_code == 1
