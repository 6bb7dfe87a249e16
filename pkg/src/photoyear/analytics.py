"""Aggregate gameplay logs into decade, mode, age-group, and engagement stats.

Everything here is a pure function of the plays/users/catalog snapshots it is
given; insertion order never matters. Timeline plays are attributed to both
of their images' decades with the play's shared correctness flag, and the
attribution rule lives in one place (_image_events) so alternatives stay a
one-line swap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_UP
from typing import Iterable, Optional, Sequence

from .catalog import Catalog
from .storage import GameMode, GamePlay, UserAccount

DECADES = tuple(range(1930, 2000, 10))

UNSPECIFIED_BRACKET = "unspecified"

_PCT_2 = Decimal("0.01")
_PCT_1 = Decimal("0.1")


class AnalyticsError(Exception):
    pass


class CorrectExceedsTotalError(AnalyticsError):
    pass


class UnknownImageError(AnalyticsError):
    pass


@dataclass(frozen=True)
class DecadeStats:
    decade: int                      # 1930 for "1930s"
    total_guesses: int
    total_images_shown: int
    correct_pct: Optional[Decimal]   # 1 decimal; None when nothing was guessed


@dataclass(frozen=True)
class EngagementSummary:
    active_user_count: int
    top_decile_user_count: int
    top_decile_play_share: Optional[Decimal]   # percent of all plays, 2 decimals
    avg_plays_top_decile: Optional[Decimal]    # 1 decimal


def accuracy(correct: int, total: int) -> Optional[Decimal]:
    """Percentage of correct answers, to 2 decimals; None for an empty total."""
    if correct < 0 or total < 0 or correct > total:
        raise CorrectExceedsTotalError(f"invalid counts: {correct}/{total}")
    if total == 0:
        return None
    return (Decimal(100 * correct) / total).quantize(_PCT_2, rounding=ROUND_HALF_UP)


def format_pct(value: Optional[Decimal], places: int = 1) -> str:
    """Display form of a percentage, e.g. Decimal('65.86') -> '65.9'."""
    if value is None:
        return "-"
    quantum = Decimal(1).scaleb(-places) if places else Decimal(1)
    return str(value.quantize(quantum, rounding=ROUND_HALF_UP))


def decade_of(year: int) -> int:
    return (year // 10) * 10


def decade_label(decade: int) -> str:
    return f"{decade}s"


def _image_events(play: GamePlay) -> list[tuple[str, bool]]:
    """(img_id, counted_correct) guess events for one play.

    A year play yields one event; a timeline play yields one per image, both
    sharing the play's correctness flag.
    """
    return [(img_id, play.correct) for img_id in play.image_ids]


def decade_stats(
    plays: Iterable[GamePlay],
    catalog: Catalog,
    *,
    include_demo: bool = True,
    extra_shown: Iterable[str] = (),
) -> dict[int, DecadeStats]:
    """Per-decade totals for both game modes combined.

    extra_shown lists img_ids of rounds that were served but never answered;
    they count toward total_images_shown only.
    """
    guesses = {d: 0 for d in DECADES}
    shown = {d: 0 for d in DECADES}
    correct = {d: 0 for d in DECADES}

    def decade_for(img_id: str) -> int:
        record = catalog.get(img_id)
        if record is None:
            raise UnknownImageError(f"play references unknown image {img_id!r}")
        return decade_of(record.gt_year)

    for play in plays:
        if not include_demo and play.user_id is None:
            continue
        for img_id, was_correct in _image_events(play):
            decade = decade_for(img_id)
            shown[decade] += 1
            guesses[decade] += 1
            correct[decade] += int(was_correct)
    for img_id in extra_shown:
        shown[decade_for(img_id)] += 1

    stats = {}
    for decade in DECADES:
        if guesses[decade]:
            pct = (Decimal(100 * correct[decade]) / guesses[decade]).quantize(
                _PCT_1, rounding=ROUND_HALF_UP
            )
        else:
            pct = None
        stats[decade] = DecadeStats(
            decade=decade,
            total_guesses=guesses[decade],
            total_images_shown=shown[decade],
            correct_pct=pct,
        )
    return stats


def mode_accuracy(
    plays: Iterable[GamePlay], *, include_demo: bool = True
) -> dict[GameMode, Optional[Decimal]]:
    """Accuracy per game mode; a year guess counts as correct within the
    static five-year window, a timeline play when the older image was picked."""
    totals = {mode: 0 for mode in GameMode}
    corrects = {mode: 0 for mode in GameMode}
    for play in plays:
        if not include_demo and play.user_id is None:
            continue
        totals[play.mode] += 1
        corrects[play.mode] += int(play.correct)
    return {mode: accuracy(corrects[mode], totals[mode]) for mode in GameMode}


def age_group_accuracy(
    plays: Iterable[GamePlay], users: Sequence[UserAccount]
) -> dict[str, dict[GameMode, Optional[Decimal]]]:
    """Per-bracket, per-mode accuracy over registered plays only.

    Users without a stated bracket land in an "unspecified" row; brackets
    with no plays are omitted.
    """
    bracket_of = {u.user_id: (u.age_bracket or UNSPECIFIED_BRACKET) for u in users}
    totals: dict[str, dict[GameMode, int]] = {}
    corrects: dict[str, dict[GameMode, int]] = {}
    for play in plays:
        if play.user_id is None:
            continue
        bracket = bracket_of.get(play.user_id, UNSPECIFIED_BRACKET)
        totals.setdefault(bracket, {mode: 0 for mode in GameMode})
        corrects.setdefault(bracket, {mode: 0 for mode in GameMode})
        totals[bracket][play.mode] += 1
        corrects[bracket][play.mode] += int(play.correct)
    return {
        bracket: {
            mode: accuracy(corrects[bracket][mode], totals[bracket][mode])
            for mode in GameMode
        }
        for bracket in totals
    }


def engagement(
    plays: Sequence[GamePlay], users: Sequence[UserAccount]
) -> EngagementSummary:
    """Concentration of play volume in the most active users.

    The top decile is the ceil(10%) most-played registered users among those
    with at least one play; its share is measured against every play passed
    in (include demo plays or not by pre-filtering).
    """
    counts: dict[int, int] = {}
    for play in plays:
        if play.user_id is not None:
            counts[play.user_id] = counts.get(play.user_id, 0) + 1
    if not counts or not plays:
        return EngagementSummary(
            active_user_count=len(counts),
            top_decile_user_count=0,
            top_decile_play_share=None,
            avg_plays_top_decile=None,
        )
    username_of = {u.user_id: u.username for u in users}
    decile_size = math.ceil(len(counts) / 10)
    ranked = sorted(
        counts.items(),
        key=lambda item: (-item[1], username_of.get(item[0], ""), item[0]),
    )
    top = ranked[:decile_size]
    top_plays = sum(count for _, count in top)
    share = (Decimal(100 * top_plays) / len(plays)).quantize(_PCT_2, ROUND_HALF_UP)
    avg = (Decimal(top_plays) / decile_size).quantize(_PCT_1, ROUND_HALF_UP)
    return EngagementSummary(
        active_user_count=len(counts),
        top_decile_user_count=decile_size,
        top_decile_play_share=share,
        avg_plays_top_decile=avg,
    )


def retention_rate(plays: Iterable[GamePlay], *, min_weeks: int = 2) -> Optional[Decimal]:
    """Share of registered players active in at least min_weeks distinct ISO
    weeks. A window-sensitive stand-in for "kept coming back"; not comparable
    to any externally reported retention figure."""
    weeks: dict[int, set[tuple[int, int]]] = {}
    for play in plays:
        if play.user_id is None:
            continue
        iso = play.played_at.isocalendar()
        weeks.setdefault(play.user_id, set()).add((iso[0], iso[1]))
    if not weeks:
        return None
    retained = sum(1 for seen in weeks.values() if len(seen) >= min_weeks)
    return (Decimal(100 * retained) / len(weeks)).quantize(_PCT_2, ROUND_HALF_UP)
