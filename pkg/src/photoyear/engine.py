"""Session lifecycle and round flow for both game modes.

Rounds are generated with the ground-truth years kept server-side: the view
types handed to the transport layer carry image references only, so a
serialized pending round can never leak an answer. Each session serializes
its own submissions (check-and-consume under a per-session lock), which makes
a round scoreable exactly once even under concurrent duplicate submissions.
"""

from __future__ import annotations

import random
import secrets
import threading
from collections import deque
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from decimal import Decimal
from typing import Callable, Optional, Union

from .catalog import Catalog, ImageRecord
from .scoring import (
    YEAR_MAX,
    YEAR_MIN,
    TimelineChoice,
    feedback_year,
    score_timeline,
    score_year_dynamic,
    score_year_static,
)
from .storage import GameMode, GamePlay, Repository, SessionRecord

DEFAULT_EXCLUSION_WINDOW = 50
DEFAULT_SESSION_TTL = timedelta(hours=24)


class EngineError(Exception):
    pass


class UnknownUserError(EngineError):
    pass


class UnknownSessionError(EngineError):
    pass


class UnknownRoundError(EngineError):
    pass


class RoundAlreadyAnsweredError(EngineError):
    pass


class GuessOutOfRangeError(EngineError):
    pass


class EmptyCatalogError(EngineError):
    pass


class NoDistinctYearsError(EngineError):
    pass


@dataclass(frozen=True)
class YearRoundView:
    """Client-facing year round: no answer material, by construction."""

    round_id: str
    img_id: str


@dataclass(frozen=True)
class TimelineRoundView:
    """Client-facing timeline round: image references only."""

    round_id: str
    left_img_id: str
    right_img_id: str


@dataclass(frozen=True)
class YearGuessResult:
    correct: bool
    correct_year: int
    title: str
    static_points: int
    dynamic_points: Decimal
    feedback: str
    img_id: str


@dataclass(frozen=True)
class TimelineResult:
    correct: bool
    left_year: int
    right_year: int
    static_points: int
    dynamic_points: Decimal
    feedback: str
    left_img_id: str
    right_img_id: str


@dataclass(frozen=True)
class _PendingYear:
    img_id: str
    answer_year: int
    title: str


@dataclass(frozen=True)
class _PendingTimeline:
    left_img_id: str
    right_img_id: str
    left_year: int
    right_year: int


@dataclass
class GameSession:
    session_id: str
    user_id: Optional[int]
    username: Optional[str]
    created_at: datetime
    last_seen: datetime
    pending: dict[str, Union[_PendingYear, _PendingTimeline]] = field(default_factory=dict)
    answered: set[str] = field(default_factory=set)
    recent_rounds: deque = field(default_factory=deque)   # tuples of img_ids per round
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def is_demo(self) -> bool:
        return self.user_id is None


def _secret_token(nbytes: int = 24) -> str:
    # 24 random bytes = 192 bits, comfortably past the 128-bit floor
    return secrets.token_urlsafe(nbytes)


class GameEngine:
    """Round generation, scoring, and persistence wiring.

    A seeded rng/clock pair makes full gameplay sequences reproducible for
    tests; production leaves both at their defaults.
    """

    def __init__(
        self,
        repo: Repository,
        catalog: Catalog,
        *,
        exclusion_window: int = DEFAULT_EXCLUSION_WINDOW,
        session_ttl: timedelta = DEFAULT_SESSION_TTL,
        rng: Optional[random.Random] = None,
        clock: Optional[Callable[[], datetime]] = None,
    ):
        self._repo = repo
        self._catalog = catalog
        self._window = max(0, exclusion_window)
        self._ttl = session_ttl
        # An injected rng marks a reproducible test setup: tokens then come
        # from the seeded stream too, so whole runs replay identically.
        # Production (rng=None) always uses unguessable secrets-based tokens.
        self._deterministic = rng is not None
        self._rng = rng or random.Random()
        self._clock = clock or datetime.now
        self._sessions: dict[str, GameSession] = {}
        self._registry_lock = threading.Lock()

    def _token(self, nbytes: int = 24) -> str:
        if self._deterministic:
            return self._rng.getrandbits(nbytes * 8).to_bytes(nbytes, "big").hex()
        return _secret_token(nbytes)

    # -- sessions -------------------------------------------------------------

    def create_session(self, user_id: Optional[int] = None) -> GameSession:
        """Open a session for a registered user, or a demo session when user_id
        is None."""
        username = None
        if user_id is not None:
            user = self._repo.get_user(user_id)
            if user is None:
                raise UnknownUserError(f"no account with id {user_id}")
            username = user.username
        now = self._clock()
        session = GameSession(
            session_id=self._token(),
            user_id=user_id,
            username=username,
            created_at=now,
            last_seen=now,
        )
        with self._registry_lock:
            self._sessions[session.session_id] = session
        self._repo.save_session(SessionRecord(
            session.session_id, user_id, session.is_demo, now, now,
        ))
        self.purge_idle_sessions(now)
        return session

    def get_session(self, session_id: str) -> GameSession:
        """Find a live session; tokens that survive a restart are rehydrated
        (without their pending rounds) from storage."""
        now = self._clock()
        with self._registry_lock:
            session = self._sessions.get(session_id)
        if session is None:
            stored = self._repo.get_session(session_id)
            if stored is None or stored.last_seen + self._ttl < now:
                raise UnknownSessionError("unknown or expired session")
            session = GameSession(
                session_id=stored.session_id,
                user_id=stored.user_id,
                username=None,
                created_at=stored.created_at,
                last_seen=stored.last_seen,
            )
            if stored.user_id is not None:
                user = self._repo.get_user(stored.user_id)
                session.username = user.username if user else None
            with self._registry_lock:
                session = self._sessions.setdefault(session_id, session)
        if session.last_seen + self._ttl < now:
            self._drop_session(session_id)
            raise UnknownSessionError("unknown or expired session")
        session.last_seen = now
        self._repo.touch_session(session_id, now)
        return session

    def purge_idle_sessions(self, now: Optional[datetime] = None) -> int:
        now = now or self._clock()
        cutoff = now - self._ttl
        with self._registry_lock:
            stale = [sid for sid, s in self._sessions.items() if s.last_seen < cutoff]
            for sid in stale:
                del self._sessions[sid]
        self._repo.purge_sessions(idle_before=cutoff)
        return len(stale)

    def _drop_session(self, session_id: str) -> None:
        with self._registry_lock:
            self._sessions.pop(session_id, None)

    # -- round generation -----------------------------------------------------

    def next_year_round(self, session_id: str) -> YearRoundView:
        """Serve a uniformly random image, avoiding this session's recent ones."""
        session = self.get_session(session_id)
        records = self._catalog.records
        if not records:
            raise EmptyCatalogError("catalog has no images")
        with session.lock:
            pool = self._eligible(records, session)
            record = self._rng.choice(pool)
            round_id = self._token(16)
            session.pending[round_id] = _PendingYear(
                img_id=record.img_id,
                answer_year=record.gt_year,
                title=record.title,
            )
            self._remember_served(session, (record.img_id,))
        return YearRoundView(round_id=round_id, img_id=record.img_id)

    def next_timeline_round(self, session_id: str) -> TimelineRoundView:
        """Serve two images with distinct years in a random left/right order."""
        session = self.get_session(session_id)
        records = self._catalog.records
        if not records:
            raise EmptyCatalogError("catalog has no images")
        if self._catalog.distinct_years() < 2:
            raise NoDistinctYearsError("catalog needs at least two distinct years")
        with session.lock:
            while True:
                first = self._rng.choice(records)
                second = self._rng.choice(records)
                if first.gt_year != second.gt_year:
                    break
            if self._rng.random() < 0.5:
                left, right = first, second
            else:
                left, right = second, first
            round_id = self._token(16)
            session.pending[round_id] = _PendingTimeline(
                left_img_id=left.img_id,
                right_img_id=right.img_id,
                left_year=left.gt_year,
                right_year=right.gt_year,
            )
            self._remember_served(session, (left.img_id, right.img_id))
        return TimelineRoundView(
            round_id=round_id,
            left_img_id=left.img_id,
            right_img_id=right.img_id,
        )

    def _eligible(self, records: list[ImageRecord], session: GameSession) -> list[ImageRecord]:
        if self._window == 0:
            return records
        recent = {img for round_imgs in session.recent_rounds for img in round_imgs}
        pool = [r for r in records if r.img_id not in recent]
        if not pool:
            # window covers the whole catalog: reset rather than starve
            session.recent_rounds.clear()
            return records
        return pool

    def _remember_served(self, session: GameSession, img_ids: tuple[str, ...]) -> None:
        if self._window == 0:
            return
        session.recent_rounds.append(img_ids)
        while len(session.recent_rounds) > self._window:
            session.recent_rounds.popleft()

    # -- submissions ------------------------------------------------------------

    def submit_year_guess(self, session_id: str, round_id: str, guess: int) -> YearGuessResult:
        session = self.get_session(session_id)
        with session.lock:
            pending = self._take_round(session, round_id, _PendingYear, consume=False)
            if not YEAR_MIN <= guess <= YEAR_MAX:
                raise GuessOutOfRangeError(
                    f"guess {guess} outside [{YEAR_MIN}, {YEAR_MAX}]"
                )
            self._consume_round(session, round_id)
            static = score_year_static(guess, pending.answer_year)
            dynamic = score_year_dynamic(guess, pending.answer_year)
            correct = static > 0
            result = YearGuessResult(
                correct=correct,
                correct_year=pending.answer_year,
                title=pending.title,
                static_points=static,
                dynamic_points=dynamic,
                feedback=feedback_year(pending.answer_year, pending.title, pending.img_id),
                img_id=pending.img_id,
            )
            self._repo.record_play(GamePlay(
                mode=GameMode.GUESS_YEAR,
                user_id=session.user_id,
                session_id=session.session_id,
                image_ids=(pending.img_id,),
                guess=guess,
                choice=None,
                correct=correct,
                static_points=static,
                dynamic_points=dynamic,
                played_at=self._clock(),
            ))
        return result

    def submit_timeline_choice(
        self, session_id: str, round_id: str, choice: TimelineChoice
    ) -> TimelineResult:
        session = self.get_session(session_id)
        with session.lock:
            pending = self._take_round(session, round_id, _PendingTimeline, consume=True)
            outcome = score_timeline(choice, pending.left_year, pending.right_year)
            result = TimelineResult(
                correct=outcome.correct,
                left_year=pending.left_year,
                right_year=pending.right_year,
                static_points=outcome.points.static_points,
                dynamic_points=outcome.points.dynamic_points,
                feedback=outcome.feedback,
                left_img_id=pending.left_img_id,
                right_img_id=pending.right_img_id,
            )
            self._repo.record_play(GamePlay(
                mode=GameMode.TIMELINE,
                user_id=session.user_id,
                session_id=session.session_id,
                image_ids=(pending.left_img_id, pending.right_img_id),
                guess=None,
                choice=choice.value,
                correct=outcome.correct,
                static_points=outcome.points.static_points,
                dynamic_points=outcome.points.dynamic_points,
                played_at=self._clock(),
            ))
        return result

    def _take_round(self, session: GameSession, round_id: str, kind, *, consume: bool):
        # caller holds session.lock
        if round_id in session.answered:
            raise RoundAlreadyAnsweredError(f"round {round_id} was already scored")
        pending = session.pending.get(round_id)
        if pending is None or not isinstance(pending, kind):
            raise UnknownRoundError(f"no pending round {round_id}")
        if consume:
            self._consume_round(session, round_id)
        return pending

    @staticmethod
    def _consume_round(session: GameSession, round_id: str) -> None:
        session.pending.pop(round_id, None)
        session.answered.add(round_id)
