"""Acceptance suite: one test per release criterion.

Each test's docstring first line is the criterion label; the terminal summary
prints a PASS/FAIL line per criterion. Expected values come from independent
oracles (exact rational arithmetic, naive recounts), never from the code
under test.
"""

import io
import json
import random
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timedelta
from decimal import Decimal
from fractions import Fraction

from PIL import Image

from photoyear import analytics
from photoyear.catalog import (
    RejectReason,
    dumps_catalog,
    fetch_and_resize,
    load_catalog,
)
from photoyear.engine import GameEngine, RoundAlreadyAnsweredError
from photoyear.scoring import (
    TimelineChoice,
    score_timeline,
    score_year_dynamic,
    score_year_static,
    timeline_bonus,
    year_dynamic_for_error,
)
from photoyear.storage import (
    AGE_BRACKETS,
    GameMode,
    PointKind,
    Repository,
    ScryptParams,
)

from conftest import build_catalog, make_record
from test_catalog import png_bytes, twenty_row_fixture

FAST_SCRYPT = ScryptParams(n=256, r=8, p=1)


def half_up_cents(value: Fraction) -> int:
    scaled = value * 100
    floor = scaled.numerator // scaled.denominator
    return floor + (1 if scaled - floor >= Fraction(1, 2) else 0)


def as_cents(points: Decimal) -> int:
    assert points == points.quantize(Decimal("0.01"))
    return int(points * 100)


def ticking_clock(start=datetime(2025, 1, 1, 9, 0, 0)):
    state = {"now": start}

    def clock():
        state["now"] += timedelta(seconds=1)
        return state["now"]

    return clock


def test_formula_fidelity():
    """Formula fidelity: exhaustive scoring check against brute-force oracles (< 1 s)"""
    started = time.perf_counter()

    for gap in range(1, 70):
        if gap <= 10:
            factor = Fraction(1)
        elif gap <= 50:
            factor = 1 - Fraction(gap - 10, 40)
        else:
            factor = Fraction(1, 10)
        assert as_cents(timeline_bonus(gap)) == half_up_cents(5 * factor)

    for guess in range(1930, 2000):
        for actual in range(1930, 2000):
            oracle = half_up_cents(10 * (1 - Fraction(min(abs(guess - actual), 100), 100)))
            assert as_cents(score_year_dynamic(guess, actual)) == oracle

    assert time.perf_counter() - started < 1.0


def test_published_scale_aggregates():
    """Aggregate accuracy: production-scale correctness ratios reproduce from raw counts"""
    timeline = analytics.accuracy(8708, 13221)
    assert abs(timeline - Decimal("65.86")) <= Decimal("0.05")
    assert timeline == Decimal("65.86")
    assert analytics.format_pct(timeline, 1) == "65.9"

    year_mode = analytics.accuracy(577, 2252)
    assert abs(year_mode - Decimal("25.62")) <= Decimal("0.005")
    assert year_mode == Decimal("25.62")


# ---------------------------------------------------------------------------
# Seeded end-to-end simulation

SIM_SEED = 20250

def run_simulation(seed: int):
    repo = Repository(":memory:", scrypt_params=FAST_SCRYPT)
    catalog = build_catalog(range(1930, 2000))
    repo.sync_catalog(catalog)
    clock = ticking_clock()
    users = [
        repo.create_user(
            f"player-{i:02d}", "correct-horse-9",
            (AGE_BRACKETS + (None,))[i % 5],
            created_at=clock(),
        )
        for i in range(10)
    ]
    engine = GameEngine(repo, catalog, rng=random.Random(seed), clock=clock)
    sessions = [engine.create_session(u.user_id) for u in users]
    behavior = random.Random(seed + 1)
    for _ in range(1_000):
        session = sessions[behavior.randrange(len(sessions))]
        if behavior.random() < 0.5:
            view = engine.next_year_round(session.session_id)
            engine.submit_year_guess(
                session.session_id, view.round_id, behavior.randrange(1930, 2000)
            )
        else:
            view = engine.next_timeline_round(session.session_id)
            engine.submit_timeline_choice(
                session.session_id, view.round_id,
                behavior.choice([TimelineChoice.LEFT, TimelineChoice.RIGHT]),
            )
    return repo, catalog


def naive_decade_recount(plays, catalog):
    recount = {}
    for decade in analytics.DECADES:
        guessed = correct = 0
        for play in plays:
            for img_id in play.image_ids:
                if (catalog.get(img_id).gt_year // 10) * 10 == decade:
                    guessed += 1
                    correct += 1 if play.correct else 0
        recount[decade] = (guessed, correct)
    return recount


def test_seeded_end_to_end_simulation():
    """Seeded simulation: leaderboard sums exact, decade stats match recount, replay identical (< 30 s)"""
    started = time.perf_counter()
    repo, catalog = run_simulation(SIM_SEED)
    plays = repo.list_plays()
    assert len(plays) == 1_000

    # (a) leaderboard totals equal exact per-play sums, both point kinds
    username_of = {u.user_id: u.username for u in repo.list_users()}
    static_sums, dynamic_sums = {}, {}
    for play in plays:
        name = username_of[play.user_id]
        static_sums[name] = static_sums.get(name, 0) + play.static_points
        dynamic_sums[name] = dynamic_sums.get(name, Decimal("0.00")) + play.dynamic_points
    static_board = repo.leaderboard(PointKind.STATIC, limit=10)
    dynamic_board = repo.leaderboard(PointKind.DYNAMIC, limit=10)
    assert len(static_board) == len(dynamic_board) == 10
    for entry in static_board:
        assert entry.total_static == static_sums.get(entry.username, 0)
    for entry in dynamic_board:
        assert entry.total_dynamic == dynamic_sums.get(entry.username, Decimal("0.00"))
    assert [e.total_static for e in static_board] == sorted(
        (e.total_static for e in static_board), reverse=True
    )

    # (b) decade stats equal the naive recount oracle
    stats = analytics.decade_stats(plays, catalog)
    for decade, (guessed, correct) in naive_decade_recount(plays, catalog).items():
        assert stats[decade].total_guesses == guessed
        assert stats[decade].total_images_shown == guessed
        if guessed:
            expected = Fraction(100 * correct, guessed)
            assert abs(Fraction(str(stats[decade].correct_pct)) - expected) <= Fraction(1, 20)

    # (c) replaying the same seed persists identical fields everywhere
    def dump(r):
        rows = r._conn.execute("SELECT * FROM game_plays ORDER BY play_id").fetchall()
        return [tuple(row) for row in rows]

    replay_repo, _ = run_simulation(SIM_SEED)
    assert dump(replay_repo) == dump(repo)
    replay_repo.close()
    repo.close()
    assert time.perf_counter() - started < 30.0


def test_scoring_invariants_random_cases():
    """Scoring invariants: bounds, monotonicity, swap symmetry, zero-on-wrong (10,000 cases each)"""
    rng = random.Random(99)

    for _ in range(10_000):
        guess, actual = rng.randrange(1930, 2000), rng.randrange(1930, 2000)
        dynamic = score_year_dynamic(guess, actual)
        assert Decimal("0.00") <= dynamic <= Decimal("10.00")
        assert (dynamic == Decimal("10.00")) == (guess == actual)
        assert (score_year_static(guess, actual) == 10) == (abs(guess - actual) <= 5)

    for _ in range(10_000):
        e1, e2 = rng.randrange(0, 70), rng.randrange(0, 70)
        lo, hi = sorted((e1, e2))
        assert year_dynamic_for_error(lo) >= year_dynamic_for_error(hi)

    for _ in range(10_000):
        left, right = rng.randrange(1930, 2000), rng.randrange(1930, 2000)
        if left == right:
            continue
        side = rng.choice([TimelineChoice.LEFT, TimelineChoice.RIGHT])
        mirror = TimelineChoice.RIGHT if side is TimelineChoice.LEFT else TimelineChoice.LEFT
        a = score_timeline(side, left, right)
        swapped = score_timeline(mirror, right, left)
        assert a.correct == swapped.correct
        assert a.points == swapped.points
        wrong = a if not a.correct else score_timeline(mirror, left, right)
        assert not wrong.correct
        assert wrong.points.static_points == 0
        assert wrong.points.dynamic_points == Decimal("0.00")


def test_answer_hiding():
    """Answer hiding: 1,000 seeded pending-round payloads never contain a ground-truth year"""
    catalog = build_catalog(range(1930, 2000))
    repo = Repository(":memory:", scrypt_params=FAST_SCRYPT)
    repo.sync_catalog(catalog)
    engine = GameEngine(repo, catalog, rng=random.Random(4040), clock=ticking_clock())
    session = engine.create_session()
    for i in range(1_000):
        if i % 2 == 0:
            view = engine.next_year_round(session.session_id)
            payload = json.dumps(
                {"round_id": view.round_id, "image_url": f"/images/{view.img_id}"}
            )
            hidden = [catalog.get(view.img_id).gt_year]
        else:
            view = engine.next_timeline_round(session.session_id)
            payload = json.dumps({
                "round_id": view.round_id,
                "left_image_url": f"/images/{view.left_img_id}",
                "right_image_url": f"/images/{view.right_img_id}",
            })
            hidden = [
                catalog.get(view.left_img_id).gt_year,
                catalog.get(view.right_img_id).gt_year,
            ]
        for year in hidden:
            assert str(year) not in payload
    repo.close()


def test_ingestion_fixtures():
    """Ingestion: 17+3 row accounting, round-trip identity, exact 800x600 resize"""
    catalog, report = load_catalog(twenty_row_fixture(), allow_partial_years=True)
    assert report.total_rows == 20
    assert report.accepted == 17
    assert len(catalog) == 17
    assert len(report.rejected) == 3
    assert {r.reason for r in report.rejected} == {
        RejectReason.NON_INTEGER_YEAR,
        RejectReason.YEAR_OUT_OF_RANGE,
        RejectReason.MISSING_FIELD,
    }

    reloaded, _ = load_catalog(io.StringIO(dumps_catalog(catalog)), allow_partial_years=True)
    assert reloaded == catalog

    import tempfile
    with tempfile.TemporaryDirectory() as dest:
        resized = fetch_and_resize(
            make_record(0, 1950), dest, fetcher=lambda url: png_bytes(1600, 1200)
        )
        assert (resized.width, resized.height) == (800, 600)
        with Image.open(resized.asset_path) as img:
            assert img.size == (800, 600)


def test_concurrent_submissions():
    """Concurrency: 100 parallel distinct submissions persist 100 plays; 100 duplicates persist 1"""
    catalog = build_catalog(range(1930, 2000))
    repo = Repository(":memory:", scrypt_params=FAST_SCRYPT)
    repo.sync_catalog(catalog)
    engine = GameEngine(repo, catalog)

    sessions = [engine.create_session() for _ in range(100)]
    rounds = [engine.next_year_round(s.session_id) for s in sessions]

    def submit(pair):
        session, view = pair
        return engine.submit_year_guess(session.session_id, view.round_id, 1960)

    with ThreadPoolExecutor(max_workers=32) as pool:
        results = list(pool.map(submit, zip(sessions, rounds)))
    assert len(results) == 100
    assert repo.play_count() == 100

    dup_session = engine.create_session()
    dup_round = engine.next_year_round(dup_session.session_id)

    def submit_duplicate(_):
        try:
            engine.submit_year_guess(dup_session.session_id, dup_round.round_id, 1960)
            return "scored"
        except RoundAlreadyAnsweredError:
            return "rejected"

    with ThreadPoolExecutor(max_workers=32) as pool:
        outcomes = list(pool.map(submit_duplicate, range(100)))
    assert outcomes.count("scored") == 1
    assert outcomes.count("rejected") == 99
    assert repo.play_count() == 101
    repo.close()


def test_orientation_fairness():
    """Orientation fairness: older image on the left in 48-52% of 10,000 seeded timeline rounds"""
    catalog = build_catalog(range(1930, 2000))
    repo = Repository(":memory:", scrypt_params=FAST_SCRYPT)
    repo.sync_catalog(catalog)
    engine = GameEngine(repo, catalog, rng=random.Random(60606), clock=ticking_clock())
    session = engine.create_session()
    n = 10_000
    older_left = 0
    for _ in range(n):
        view = engine.next_timeline_round(session.session_id)
        left = catalog.get(view.left_img_id).gt_year
        right = catalog.get(view.right_img_id).gt_year
        older_left += left < right
    assert 0.48 <= older_left / n <= 0.52
    repo.close()
