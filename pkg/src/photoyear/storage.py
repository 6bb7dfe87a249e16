"""Durable storage: users, images, sessions, and gameplay logs.

Backed by embedded SQLite so the suite and small deployments need no server;
the schema is applied through versioned migrations. Dynamic point totals are
kept in integer hundredths end to end, so sums shown on leaderboards are
exact. Credentials are stored as salted scrypt hashes in a self-describing
format, letting cost parameters rise without a migration.
"""

from __future__ import annotations

import hashlib
import hmac
import secrets
import sqlite3
import threading
from dataclasses import dataclass, field
from datetime import datetime
from decimal import Decimal
from enum import Enum
from pathlib import Path
from typing import Optional

AGE_BRACKETS = ("14-18", "19-25", "26-40", "41+")

MIN_PASSWORD_LENGTH = 8
MAX_USERNAME_LENGTH = 64


class StorageError(Exception):
    pass


class UsernameTakenError(StorageError):
    pass


class WeakPasswordError(StorageError):
    pass


class InvalidUsernameError(StorageError):
    pass


class InvalidAgeBracketError(StorageError):
    pass


class AuthFailedError(StorageError):
    """Single failure mode for login; unknown user and bad password look alike."""


class UnknownUserError(StorageError):
    pass


class ForeignKeyViolationError(StorageError):
    pass


class GameMode(Enum):
    GUESS_YEAR = "guess_year"
    TIMELINE = "timeline"


class PointKind(Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"


@dataclass(frozen=True)
class UserAccount:
    user_id: int
    username: str
    credential_hash: str = field(repr=False)
    age_bracket: Optional[str]
    created_at: datetime


@dataclass(frozen=True)
class GamePlay:
    mode: GameMode
    user_id: Optional[int]          # None marks a demo play
    session_id: str
    image_ids: tuple[str, ...]      # one image for year mode, two for timeline
    guess: Optional[int]
    choice: Optional[str]           # "left" | "right"
    correct: bool
    static_points: int
    dynamic_points: Decimal
    played_at: datetime
    play_id: Optional[int] = None

    def __post_init__(self):
        expected = 1 if self.mode is GameMode.GUESS_YEAR else 2
        if len(self.image_ids) != expected:
            raise ValueError(
                f"{self.mode.value} play must reference {expected} image(s), "
                f"got {len(self.image_ids)}"
            )


@dataclass(frozen=True)
class LeaderboardEntry:
    rank: int
    username: str
    total_static: int
    total_dynamic: Decimal


@dataclass(frozen=True)
class SessionRecord:
    session_id: str
    user_id: Optional[int]
    is_demo: bool
    created_at: datetime
    last_seen: datetime


# ---------------------------------------------------------------------------
# Password hashing (scrypt, encoded as scrypt$n$r$p$salt$hash)

@dataclass(frozen=True)
class ScryptParams:
    n: int = 2**14
    r: int = 8
    p: int = 1


DEFAULT_SCRYPT = ScryptParams()
_DKLEN = 32


def hash_password(password: str, params: ScryptParams = DEFAULT_SCRYPT) -> str:
    salt = secrets.token_bytes(16)
    digest = hashlib.scrypt(
        password.encode("utf-8"), salt=salt, n=params.n, r=params.r, p=params.p, dklen=_DKLEN
    )
    return f"scrypt${params.n}${params.r}${params.p}${salt.hex()}${digest.hex()}"


def verify_password(password: str, encoded: str) -> bool:
    try:
        scheme, n, r, p, salt_hex, digest_hex = encoded.split("$")
        if scheme != "scrypt":
            return False
        expected = bytes.fromhex(digest_hex)
        candidate = hashlib.scrypt(
            password.encode("utf-8"),
            salt=bytes.fromhex(salt_hex),
            n=int(n), r=int(r), p=int(p),
            dklen=len(expected),
        )
    except (ValueError, TypeError):
        return False
    return hmac.compare_digest(candidate, expected)


# ---------------------------------------------------------------------------
# Schema migrations

MIGRATIONS: list[tuple[int, str]] = [
    (
        1,
        """
        CREATE TABLE users (
            user_id         INTEGER PRIMARY KEY AUTOINCREMENT,
            username        TEXT NOT NULL,
            credential_hash TEXT NOT NULL,
            age_bracket     TEXT,
            created_at      TEXT NOT NULL
        );
        CREATE UNIQUE INDEX users_username_ci ON users (lower(username));

        CREATE TABLE images (
            img_id           TEXT PRIMARY KEY,
            gt_year          INTEGER NOT NULL,
            date_taken       TEXT NOT NULL DEFAULT '',
            date_granularity INTEGER NOT NULL DEFAULT 0,
            url              TEXT NOT NULL DEFAULT '',
            title            TEXT NOT NULL DEFAULT '',
            needs_review     INTEGER NOT NULL DEFAULT 0,
            asset_path       TEXT,
            width            INTEGER,
            height           INTEGER
        );

        CREATE TABLE sessions (
            session_id TEXT PRIMARY KEY,
            user_id    INTEGER REFERENCES users(user_id),
            is_demo    INTEGER NOT NULL,
            created_at TEXT NOT NULL,
            last_seen  TEXT NOT NULL
        );

        CREATE TABLE game_plays (
            play_id          INTEGER PRIMARY KEY AUTOINCREMENT,
            mode             TEXT NOT NULL CHECK (mode IN ('guess_year', 'timeline')),
            user_id          INTEGER REFERENCES users(user_id),
            session_id       TEXT NOT NULL,
            image_id         TEXT NOT NULL REFERENCES images(img_id),
            image_id_2       TEXT REFERENCES images(img_id),
            guess            INTEGER,
            choice           TEXT CHECK (choice IN ('left', 'right') OR choice IS NULL),
            correct          INTEGER NOT NULL,
            static_points    INTEGER NOT NULL,
            dynamic_points_h INTEGER NOT NULL,
            played_at        TEXT NOT NULL
        );
        CREATE INDEX game_plays_user ON game_plays (user_id);
        CREATE INDEX game_plays_played_at ON game_plays (played_at);
        """,
    ),
]


def _cents(points: Decimal) -> int:
    quantized = points.quantize(Decimal("0.01"))
    if quantized != points:
        raise ValueError(f"dynamic points {points} are not a clean hundredth")
    return int(quantized * 100)


def _from_cents(hundredths: int) -> Decimal:
    return (Decimal(hundredths) / 100).quantize(Decimal("0.01"))


class Repository:
    """Single-file (or in-memory) store; all mutations are transactional.

    A process-wide lock serializes access to the shared connection, which is
    enough for the service's worker threads; readers always observe committed
    snapshots.
    """

    def __init__(self, db_path: str | Path = ":memory:", *,
                 scrypt_params: ScryptParams = DEFAULT_SCRYPT):
        self._lock = threading.RLock()
        self._scrypt = scrypt_params
        self._dummy_hash = hash_password("photoyear-timing-pad", scrypt_params)
        self._conn = sqlite3.connect(str(db_path), check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        self._conn.execute("PRAGMA foreign_keys = ON")
        if str(db_path) != ":memory:":
            self._conn.execute("PRAGMA journal_mode = WAL")
        self.migrate()

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    # -- migrations ---------------------------------------------------------

    def migrate(self) -> list[int]:
        """Apply any pending schema migrations; returns applied versions."""
        applied = []
        with self._lock, self._conn:
            self._conn.execute(
                "CREATE TABLE IF NOT EXISTS schema_migrations ("
                " version INTEGER PRIMARY KEY, applied_at TEXT NOT NULL)"
            )
            done = {
                row[0]
                for row in self._conn.execute("SELECT version FROM schema_migrations")
            }
            for version, script in MIGRATIONS:
                if version in done:
                    continue
                self._conn.executescript(script)
                self._conn.execute(
                    "INSERT INTO schema_migrations (version, applied_at) VALUES (?, ?)",
                    (version, datetime.now().isoformat()),
                )
                applied.append(version)
        return applied

    @property
    def schema_version(self) -> int:
        with self._lock:
            row = self._conn.execute("SELECT MAX(version) FROM schema_migrations").fetchone()
        return row[0] or 0

    # -- users --------------------------------------------------------------

    def create_user(self, username: str, password: str,
                    age_bracket: Optional[str] = None, *,
                    created_at: Optional[datetime] = None) -> UserAccount:
        username = username.strip()
        if not username or len(username) > MAX_USERNAME_LENGTH:
            raise InvalidUsernameError(
                f"username must be 1-{MAX_USERNAME_LENGTH} characters"
            )
        if len(password) < MIN_PASSWORD_LENGTH:
            raise WeakPasswordError(f"password must be at least {MIN_PASSWORD_LENGTH} characters")
        if age_bracket is not None and age_bracket not in AGE_BRACKETS:
            raise InvalidAgeBracketError(f"age_bracket must be one of {AGE_BRACKETS}")
        encoded = hash_password(password, self._scrypt)
        created = created_at or datetime.now()
        with self._lock:
            try:
                with self._conn:
                    cursor = self._conn.execute(
                        "INSERT INTO users (username, credential_hash, age_bracket, created_at)"
                        " VALUES (?, ?, ?, ?)",
                        (username, encoded, age_bracket, created.isoformat()),
                    )
            except sqlite3.IntegrityError:
                raise UsernameTakenError(f"username {username!r} is taken")
            user_id = cursor.lastrowid
        return UserAccount(user_id, username, encoded, age_bracket, created)

    def authenticate(self, username: str, password: str) -> UserAccount:
        """Verify credentials; unknown users burn the same hashing time as a
        wrong password so the two failures are indistinguishable."""
        user = self.get_user_by_name(username)
        if user is None:
            verify_password(password, self._dummy_hash)
            raise AuthFailedError("invalid username or password")
        if not verify_password(password, user.credential_hash):
            raise AuthFailedError("invalid username or password")
        return user

    def get_user(self, user_id: int) -> Optional[UserAccount]:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM users WHERE user_id = ?", (user_id,)
            ).fetchone()
        return self._user_from_row(row)

    def get_user_by_name(self, username: str) -> Optional[UserAccount]:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM users WHERE lower(username) = lower(?)", (username.strip(),)
            ).fetchone()
        return self._user_from_row(row)

    def list_users(self) -> list[UserAccount]:
        with self._lock:
            rows = self._conn.execute("SELECT * FROM users ORDER BY user_id").fetchall()
        return [self._user_from_row(row) for row in rows]

    @staticmethod
    def _user_from_row(row) -> Optional[UserAccount]:
        if row is None:
            return None
        return UserAccount(
            user_id=row["user_id"],
            username=row["username"],
            credential_hash=row["credential_hash"],
            age_bracket=row["age_bracket"],
            created_at=datetime.fromisoformat(row["created_at"]),
        )

    # -- images -------------------------------------------------------------

    def sync_catalog(self, records) -> int:
        """Upsert catalog records into the images table; returns the count."""
        count = 0
        with self._lock, self._conn:
            for r in records:
                self._conn.execute(
                    "INSERT INTO images (img_id, gt_year, date_taken, date_granularity,"
                    " url, title, needs_review, asset_path, width, height)"
                    " VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)"
                    " ON CONFLICT(img_id) DO UPDATE SET"
                    " gt_year=excluded.gt_year, date_taken=excluded.date_taken,"
                    " date_granularity=excluded.date_granularity, url=excluded.url,"
                    " title=excluded.title, needs_review=excluded.needs_review,"
                    " asset_path=excluded.asset_path, width=excluded.width,"
                    " height=excluded.height",
                    (r.img_id, r.gt_year, r.date_taken, r.date_granularity, r.url,
                     r.title, int(r.needs_review), r.asset_path, r.width, r.height),
                )
                count += 1
        return count

    def image_year(self, img_id: str) -> Optional[int]:
        with self._lock:
            row = self._conn.execute(
                "SELECT gt_year FROM images WHERE img_id = ?", (img_id,)
            ).fetchone()
        return row[0] if row else None

    def list_images(self) -> list["ImageRecord"]:
        from .catalog import ImageRecord

        with self._lock:
            rows = self._conn.execute("SELECT * FROM images ORDER BY img_id").fetchall()
        return [
            ImageRecord(
                img_id=row["img_id"],
                gt_year=row["gt_year"],
                date_taken=row["date_taken"],
                date_granularity=row["date_granularity"],
                url=row["url"],
                title=row["title"],
                needs_review=bool(row["needs_review"]),
                asset_path=row["asset_path"],
                width=row["width"],
                height=row["height"],
            )
            for row in rows
        ]

    # -- sessions -----------------------------------------------------------

    def save_session(self, record: SessionRecord) -> None:
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT OR REPLACE INTO sessions (session_id, user_id, is_demo,"
                " created_at, last_seen) VALUES (?, ?, ?, ?, ?)",
                (record.session_id, record.user_id, int(record.is_demo),
                 record.created_at.isoformat(), record.last_seen.isoformat()),
            )

    def get_session(self, session_id: str) -> Optional[SessionRecord]:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM sessions WHERE session_id = ?", (session_id,)
            ).fetchone()
        if row is None:
            return None
        return SessionRecord(
            session_id=row["session_id"],
            user_id=row["user_id"],
            is_demo=bool(row["is_demo"]),
            created_at=datetime.fromisoformat(row["created_at"]),
            last_seen=datetime.fromisoformat(row["last_seen"]),
        )

    def touch_session(self, session_id: str, last_seen: datetime) -> None:
        with self._lock, self._conn:
            self._conn.execute(
                "UPDATE sessions SET last_seen = ? WHERE session_id = ?",
                (last_seen.isoformat(), session_id),
            )

    def purge_sessions(self, idle_before: datetime) -> int:
        with self._lock, self._conn:
            cursor = self._conn.execute(
                "DELETE FROM sessions WHERE last_seen < ?", (idle_before.isoformat(),)
            )
        return cursor.rowcount

    # -- gameplay log -------------------------------------------------------

    def record_play(self, play: GamePlay) -> int:
        image_id_2 = play.image_ids[1] if len(play.image_ids) == 2 else None
        with self._lock:
            try:
                with self._conn:
                    cursor = self._conn.execute(
                        "INSERT INTO game_plays (mode, user_id, session_id, image_id,"
                        " image_id_2, guess, choice, correct, static_points,"
                        " dynamic_points_h, played_at)"
                        " VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
                        (play.mode.value, play.user_id, play.session_id,
                         play.image_ids[0], image_id_2, play.guess, play.choice,
                         int(play.correct), play.static_points,
                         _cents(play.dynamic_points), play.played_at.isoformat()),
                    )
            except sqlite3.IntegrityError as err:
                raise ForeignKeyViolationError(str(err))
        return cursor.lastrowid

    def get_play(self, play_id: int) -> Optional[GamePlay]:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM game_plays WHERE play_id = ?", (play_id,)
            ).fetchone()
        return self._play_from_row(row) if row else None

    def list_plays(self, *,
                   include_demo: bool = True,
                   user_id: Optional[int] = None,
                   session_id: Optional[str] = None,
                   since: Optional[datetime] = None,
                   until: Optional[datetime] = None) -> list[GamePlay]:
        clauses, args = [], []
        if not include_demo:
            clauses.append("user_id IS NOT NULL")
        if user_id is not None:
            clauses.append("user_id = ?")
            args.append(user_id)
        if session_id is not None:
            clauses.append("session_id = ?")
            args.append(session_id)
        if since is not None:
            clauses.append("played_at >= ?")
            args.append(since.isoformat())
        if until is not None:
            clauses.append("played_at < ?")
            args.append(until.isoformat())
        where = f" WHERE {' AND '.join(clauses)}" if clauses else ""
        with self._lock:
            rows = self._conn.execute(
                f"SELECT * FROM game_plays{where} ORDER BY play_id", args
            ).fetchall()
        return [self._play_from_row(row) for row in rows]

    def play_count(self) -> int:
        with self._lock:
            return self._conn.execute("SELECT COUNT(*) FROM game_plays").fetchone()[0]

    @staticmethod
    def _play_from_row(row) -> GamePlay:
        image_ids = (row["image_id"],) if row["image_id_2"] is None else (
            row["image_id"], row["image_id_2"]
        )
        return GamePlay(
            mode=GameMode(row["mode"]),
            user_id=row["user_id"],
            session_id=row["session_id"],
            image_ids=image_ids,
            guess=row["guess"],
            choice=row["choice"],
            correct=bool(row["correct"]),
            static_points=row["static_points"],
            dynamic_points=_from_cents(row["dynamic_points_h"]),
            played_at=datetime.fromisoformat(row["played_at"]),
            play_id=row["play_id"],
        )

    # -- leaderboards ---------------------------------------------------------

    def leaderboard(self, kind: PointKind, limit: int = 10) -> list[LeaderboardEntry]:
        """Registered users ranked by exact point totals.

        Users with no plays appear with zero totals. Ties order by earliest
        first play, then username; ranks are consecutive from 1.
        """
        if limit < 1:
            raise ValueError("limit must be >= 1")
        with self._lock:
            rows = self._conn.execute(
                "SELECT u.username,"
                "       COALESCE(SUM(p.static_points), 0) AS total_static,"
                "       COALESCE(SUM(p.dynamic_points_h), 0) AS total_dynamic_h,"
                "       MIN(p.played_at) AS first_play"
                " FROM users u LEFT JOIN game_plays p ON p.user_id = u.user_id"
                " GROUP BY u.user_id"
            ).fetchall()
        key_total = (
            (lambda r: r["total_static"]) if kind is PointKind.STATIC
            else (lambda r: r["total_dynamic_h"])
        )
        ordered = sorted(
            rows,
            key=lambda r: (-key_total(r), r["first_play"] or "~", r["username"].lower()),
        )
        return [
            LeaderboardEntry(
                rank=i + 1,
                username=row["username"],
                total_static=row["total_static"],
                total_dynamic=_from_cents(row["total_dynamic_h"]),
            )
            for i, row in enumerate(ordered[:limit])
        ]
