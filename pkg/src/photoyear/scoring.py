"""Scoring rules for both game modes.

Everything here is pure and stateless: same inputs, same outputs, safe from
any thread. Dynamic point values are fixed-point decimals with exactly two
fraction digits (half-up rounding), never binary floats, so stored totals
accumulate without drift.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_UP
from enum import Enum

YEAR_MIN = 1930
YEAR_MAX = 1999

# "Guess the Year" rules
STATIC_AWARD = 10          # points for a correct answer in either mode
STATIC_WINDOW = 5          # |guess - actual| <= 5 counts as correct
DYNAMIC_ERROR_CAP = 100    # error is capped before scaling

# "Timeline" gap-bonus breakpoints
BONUS_FULL_GAP = 10        # gap <= 10 earns the full bonus
BONUS_TAPER_GAP = 50       # gap in (10, 50] tapers linearly
BONUS_MAX = Decimal(5)
BONUS_FLOOR_FACTOR = Decimal("0.1")   # gap > 50 earns 10% of the max

_CENT = Decimal("0.01")

TIMELINE_FEEDBACK_TEMPLATE = (
    "Left image is from year {left} and the Right image is from year {right}"
)


class ScoringError(ValueError):
    """Base class for scoring precondition violations."""


class YearOutOfRangeError(ScoringError):
    """A year or guess falls outside the playable range."""


class EqualYearsError(ScoringError):
    """A timeline pair has equal years; 'older' is undefined."""


class ZeroGapError(ScoringError):
    """A timeline bonus was requested for a zero year gap."""


class TimelineChoice(Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class Points:
    static_points: int
    dynamic_points: Decimal


@dataclass(frozen=True)
class TimelineOutcome:
    correct: bool
    points: Points
    feedback: str


def _require_year(value: int, what: str) -> None:
    if not YEAR_MIN <= value <= YEAR_MAX:
        raise YearOutOfRangeError(
            f"{what} {value} outside [{YEAR_MIN}, {YEAR_MAX}]"
        )


def _round2(value: Decimal) -> Decimal:
    return value.quantize(_CENT, rounding=ROUND_HALF_UP)


def score_year_static(guess: int, actual: int) -> int:
    """Static award for a single-image year guess: all or nothing."""
    _require_year(guess, "guess")
    _require_year(actual, "actual year")
    return STATIC_AWARD if abs(guess - actual) <= STATIC_WINDOW else 0


def year_dynamic_for_error(error: int) -> Decimal:
    """Dynamic points for an absolute year error, with the error cap applied.

    The cap can never trigger for in-range years (max error is 69); it exists
    so the scoring curve stays defined for arbitrary errors.
    """
    if error < 0:
        raise ValueError(f"error must be non-negative, got {error}")
    capped = min(error, DYNAMIC_ERROR_CAP)
    raw = Decimal(STATIC_AWARD) * (1 - Decimal(capped) / DYNAMIC_ERROR_CAP)
    return _round2(raw)


def score_year_dynamic(guess: int, actual: int) -> Decimal:
    """Dynamic points for a single-image year guess.

    Scales linearly from 10.00 at an exact guess down to 0.00 at 100 years
    off; integer-year inputs always land on exact hundredths.
    """
    _require_year(guess, "guess")
    _require_year(actual, "actual year")
    return year_dynamic_for_error(abs(guess - actual))


def timeline_correct(choice: TimelineChoice, left: int, right: int) -> bool:
    """Whether the chosen side is the strictly older image."""
    _require_year(left, "left year")
    _require_year(right, "right year")
    if left == right:
        raise EqualYearsError(f"timeline years must differ, both are {left}")
    if choice is TimelineChoice.LEFT:
        return left < right
    return right < left


def timeline_bonus(gap: int) -> Decimal:
    """Gap bonus for a correct timeline answer.

    Full 5.00 for close pairs (gap <= 10), tapering linearly to 0.00 at a
    50-year gap, then a flat 0.50 beyond. The jump between gap 50 (0.00) and
    gap 51 (0.50) is deliberate: the taper owns its upper boundary.
    """
    if gap == 0:
        raise ZeroGapError("timeline year gap must be at least 1")
    if gap < 0:
        raise ValueError(f"gap must be non-negative, got {gap}")
    if gap <= BONUS_FULL_GAP:
        factor = Decimal(1)
    elif gap <= BONUS_TAPER_GAP:
        factor = 1 - (Decimal(gap) - BONUS_FULL_GAP) / (BONUS_TAPER_GAP - BONUS_FULL_GAP)
    else:
        factor = BONUS_FLOOR_FACTOR
    return _round2(BONUS_MAX * factor)


def feedback_timeline(left: int, right: int) -> str:
    """Reveal text for a timeline round; the template is part of the API contract."""
    return TIMELINE_FEEDBACK_TEMPLATE.format(left=left, right=right)


def feedback_year(actual: int, title: str, img_id: str = "") -> str:
    """Reveal text for a year round; falls back to the image id when untitled."""
    label = title.strip() if title else ""
    if not label:
        label = img_id
    if label:
        return f"This image was taken in {actual}: {label}"
    return f"This image was taken in {actual}"


def score_timeline(choice: TimelineChoice, left: int, right: int) -> TimelineOutcome:
    """Full outcome for a timeline answer.

    A correct pick earns the static award plus the gap bonus; a wrong pick
    earns nothing. Feedback text is the same either way.
    """
    correct = timeline_correct(choice, left, right)
    feedback = feedback_timeline(left, right)
    if correct:
        points = Points(STATIC_AWARD, timeline_bonus(abs(left - right)))
    else:
        points = Points(0, Decimal("0.00"))
    return TimelineOutcome(correct=correct, points=points, feedback=feedback)
