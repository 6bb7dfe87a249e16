"""Catalog ingestion: meta.csv parsing, year resolution, and image assets.

The catalog file is a UTF-8 CSV with header
``img_id,gt_year,date_taken,date_granularity,url[,title]``. Parsing is
row-tolerant: bad rows become typed rejections in the ingest report, never
abort the file. Image assets are fetched and rescaled to fit within 800x600
while preserving aspect ratio (sources smaller than the box are kept as-is).
"""

from __future__ import annotations

import csv
import io
import re
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Callable, IO, Iterable, Optional, Sequence
from urllib.parse import urlparse
from urllib.request import url2pathname

from PIL import Image

from .scoring import YEAR_MAX, YEAR_MIN

MAX_ASSET_WIDTH = 800
MAX_ASSET_HEIGHT = 600

META_COLUMNS = ("img_id", "gt_year", "date_taken", "date_granularity", "url", "title")

_YEAR_IN_TEXT = re.compile(r"(?<!\d)(\d{4})(?!\d)")
_UNSAFE_ID_CHARS = re.compile(r"[^A-Za-z0-9._-]")

Fetcher = Callable[[str], bytes]


class RejectReason(Enum):
    MISSING_FIELD = "MissingField"
    NON_INTEGER_YEAR = "NonIntegerYear"
    YEAR_OUT_OF_RANGE = "YearOutOfRange"
    BAD_URL = "BadUrl"
    DUPLICATE_ID = "DuplicateId"
    UNRESOLVABLE_YEAR = "UnresolvableYear"


class RowError(ValueError):
    """A single metadata row failed validation."""

    def __init__(self, reason: RejectReason, detail: str):
        super().__init__(f"{reason.value}: {detail}")
        self.reason = reason
        self.detail = detail


class UnreadableStreamError(Exception):
    """The metadata source could not be opened or decoded at all."""


class AssetError(Exception):
    """Base class for per-image asset pipeline failures."""


class FetchFailedError(AssetError):
    pass


class DecodeFailedError(AssetError):
    pass


class WriteFailedError(AssetError):
    pass


@dataclass(frozen=True)
class ImageRecord:
    img_id: str
    gt_year: int
    date_taken: str
    date_granularity: int
    url: str
    title: str = ""
    needs_review: bool = False
    asset_path: Optional[str] = None
    width: Optional[int] = None
    height: Optional[int] = None


@dataclass(frozen=True)
class RowRejection:
    row: int          # file line number in the source CSV
    reason: RejectReason
    detail: str


@dataclass
class IngestReport:
    total_rows: int = 0
    accepted: int = 0
    rejected: list[RowRejection] = field(default_factory=list)
    missing_years: list[int] = field(default_factory=list)
    fetch_failures: list[tuple[str, str]] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.rejected and not self.fetch_failures and not self.missing_years


@dataclass
class CoverageReport:
    per_year_counts: dict[int, int]
    missing_years: list[int]
    mean_per_year: float
    imbalanced_years: list[tuple[int, int]]   # (year, count) far from the mean


class Catalog:
    """An accepted set of image records, unique by img_id."""

    def __init__(self, records: Iterable[ImageRecord] = ()):
        self._records: list[ImageRecord] = []
        self._by_id: dict[str, ImageRecord] = {}
        for record in records:
            self.add(record)

    def add(self, record: ImageRecord) -> None:
        if record.img_id in self._by_id:
            raise RowError(RejectReason.DUPLICATE_ID, f"img_id {record.img_id!r} already present")
        self._by_id[record.img_id] = record
        self._records.append(record)

    def replace(self, record: ImageRecord) -> None:
        """Swap in an updated record (same img_id), e.g. after an asset fetch."""
        old = self._by_id[record.img_id]
        self._records[self._records.index(old)] = record
        self._by_id[record.img_id] = record

    def get(self, img_id: str) -> Optional[ImageRecord]:
        return self._by_id.get(img_id)

    @property
    def records(self) -> list[ImageRecord]:
        return list(self._records)

    @property
    def per_year_counts(self) -> dict[int, int]:
        return dict(Counter(r.gt_year for r in self._records))

    def distinct_years(self) -> int:
        return len({r.gt_year for r in self._records})

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Catalog):
            return NotImplemented
        return self._records == other._records

    def __repr__(self) -> str:
        return f"Catalog({len(self._records)} records)"


def resolve_year(gt_year_raw: str, date_taken: str) -> tuple[int, bool]:
    """Resolve the authoritative year for a row.

    Prefers gt_year; an empty gt_year falls back to a 4-digit in-range year
    found in date_taken, flagged needs_review for operator follow-up.
    Returns (year, needs_review).
    """
    gt_year_raw = gt_year_raw.strip()
    if gt_year_raw:
        try:
            year = int(gt_year_raw)
        except ValueError:
            raise RowError(RejectReason.NON_INTEGER_YEAR, f"gt_year {gt_year_raw!r} is not an integer")
        if not YEAR_MIN <= year <= YEAR_MAX:
            raise RowError(
                RejectReason.YEAR_OUT_OF_RANGE,
                f"gt_year {year} outside [{YEAR_MIN}, {YEAR_MAX}]",
            )
        return year, False
    for match in _YEAR_IN_TEXT.finditer(date_taken):
        candidate = int(match.group(1))
        if YEAR_MIN <= candidate <= YEAR_MAX:
            return candidate, True
    raise RowError(
        RejectReason.UNRESOLVABLE_YEAR,
        f"no gt_year and no usable year in date_taken {date_taken!r}",
    )


def _validate_url(url: str) -> None:
    parsed = urlparse(url)
    if parsed.scheme in ("http", "https"):
        if not parsed.netloc:
            raise RowError(RejectReason.BAD_URL, f"url {url!r} has no host")
    elif parsed.scheme == "file":
        if not (parsed.path or parsed.netloc):
            raise RowError(RejectReason.BAD_URL, f"url {url!r} has no path")
    else:
        raise RowError(RejectReason.BAD_URL, f"url {url!r} has unsupported scheme {parsed.scheme!r}")


def parse_meta_row(fields: Sequence[str]) -> ImageRecord:
    """Validate one CSV data row into an ImageRecord, or raise RowError."""
    if len(fields) < 5:
        raise RowError(RejectReason.MISSING_FIELD, f"expected at least 5 fields, got {len(fields)}")
    img_id = fields[0].strip()
    gt_year_raw = fields[1]
    date_taken = fields[2].strip()
    granularity_raw = fields[3].strip()
    url = fields[4].strip()
    title = fields[5].strip() if len(fields) > 5 else ""

    if not img_id:
        raise RowError(RejectReason.MISSING_FIELD, "img_id is empty")
    if not url:
        raise RowError(RejectReason.MISSING_FIELD, "url is empty")
    _validate_url(url)

    try:
        gt_year, needs_review = resolve_year(gt_year_raw, date_taken)
    except RowError as err:
        if err.reason is RejectReason.UNRESOLVABLE_YEAR:
            # At row level an unresolvable year reads as an empty mandatory field.
            raise RowError(RejectReason.MISSING_FIELD, "gt_year is empty and date_taken is unusable")
        raise

    if granularity_raw:
        try:
            granularity = int(granularity_raw)
        except ValueError:
            raise RowError(
                RejectReason.MISSING_FIELD,
                f"date_granularity {granularity_raw!r} is not an integer",
            )
        if granularity < 0:
            raise RowError(RejectReason.MISSING_FIELD, f"date_granularity {granularity} is negative")
    else:
        granularity = 0

    return ImageRecord(
        img_id=img_id,
        gt_year=gt_year,
        date_taken=date_taken,
        date_granularity=granularity,
        url=url,
        title=title,
        needs_review=needs_review,
    )


def load_catalog(
    source: str | Path | IO[str],
    *,
    allow_partial_years: bool = False,
) -> tuple[Catalog, IngestReport]:
    """Load a meta.csv stream into a Catalog plus a row-accounting report.

    Row-level problems are collected as rejections; only an unopenable or
    undecodable source raises. Duplicate img_ids keep the first occurrence.
    With allow_partial_years=False, years from the playable range with no
    images are listed in report.missing_years.
    """
    owned = False
    if isinstance(source, (str, Path)):
        try:
            fp: IO[str] = open(source, "r", encoding="utf-8", newline="")
        except OSError as err:
            raise UnreadableStreamError(f"cannot open {source}: {err}") from err
        owned = True
    else:
        fp = source
    try:
        return _load_from_file(fp, allow_partial_years=allow_partial_years)
    except UnicodeDecodeError as err:
        raise UnreadableStreamError(f"metadata is not valid UTF-8: {err}") from err
    finally:
        if owned:
            fp.close()


def _load_from_file(fp: IO[str], *, allow_partial_years: bool) -> tuple[Catalog, IngestReport]:
    reader = csv.reader(fp)
    catalog = Catalog()
    report = IngestReport()
    try:
        next(reader)  # header
    except StopIteration:
        raise UnreadableStreamError("metadata stream is empty (no header row)")
    for fields in reader:
        if not fields:
            continue
        report.total_rows += 1
        line = reader.line_num
        try:
            record = parse_meta_row(fields)
            catalog.add(record)
        except RowError as err:
            report.rejected.append(RowRejection(row=line, reason=err.reason, detail=err.detail))
            continue
        report.accepted += 1
    if not allow_partial_years:
        counts = catalog.per_year_counts
        report.missing_years = [y for y in range(YEAR_MIN, YEAR_MAX + 1) if y not in counts]
    return catalog, report


def serialize_catalog(catalog: Catalog, fp: IO[str]) -> None:
    """Write a catalog back out in the meta.csv format.

    Records whose year came from date_taken (needs_review) are written with
    an empty gt_year so a reload resolves them identically.
    """
    writer = csv.writer(fp)
    writer.writerow(META_COLUMNS)
    for r in catalog:
        gt_year = "" if r.needs_review else str(r.gt_year)
        writer.writerow([r.img_id, gt_year, r.date_taken, r.date_granularity, r.url, r.title])


def dumps_catalog(catalog: Catalog) -> str:
    buf = io.StringIO()
    serialize_catalog(catalog, buf)
    return buf.getvalue()


def validate_catalog(catalog: Catalog, *, imbalance_factor: float = 3.0) -> CoverageReport:
    """Per-year coverage summary with gap and imbalance flags.

    A year is flagged imbalanced when its count is more than imbalance_factor
    away from the catalog mean in either direction.
    """
    counts = catalog.per_year_counts
    missing = [y for y in range(YEAR_MIN, YEAR_MAX + 1) if y not in counts]
    mean = (len(catalog) / len(counts)) if counts else 0.0
    imbalanced = []
    for year in sorted(counts):
        count = counts[year]
        if count * imbalance_factor < mean or count > mean * imbalance_factor:
            imbalanced.append((year, count))
    return CoverageReport(
        per_year_counts=counts,
        missing_years=missing,
        mean_per_year=mean,
        imbalanced_years=imbalanced,
    )


def sanitize_img_id(img_id: str) -> str:
    """Filesystem-safe asset name for an img_id (slashes etc. become '_')."""
    return _UNSAFE_ID_CHARS.sub("_", img_id)


def asset_filename(img_id: str) -> str:
    return f"{sanitize_img_id(img_id)}.jpg"


def default_fetcher(url: str, timeout: float = 30.0) -> bytes:
    """Fetch source bytes over http(s), or read file:// URLs and bare paths."""
    parsed = urlparse(url)
    if parsed.scheme in ("http", "https"):
        import requests

        response = requests.get(url, timeout=timeout)
        response.raise_for_status()
        return response.content
    if parsed.scheme == "file":
        path = url2pathname(parsed.path)
        return Path(path).read_bytes()
    return Path(url).read_bytes()


def fetch_and_resize(
    record: ImageRecord,
    dest_dir: str | Path,
    *,
    max_w: int = MAX_ASSET_WIDTH,
    max_h: int = MAX_ASSET_HEIGHT,
    fetcher: Optional[Fetcher] = None,
) -> ImageRecord:
    """Download one source image, rescale it to fit the box, store it as JPEG.

    Aspect ratio is preserved and images are never upscaled. Returns the
    record with asset_path/width/height filled in. Raises FetchFailedError,
    DecodeFailedError, or WriteFailedError.
    """
    fetch = fetcher or default_fetcher
    try:
        data = fetch(record.url)
    except Exception as err:
        raise FetchFailedError(f"{record.img_id}: fetch of {record.url!r} failed: {err}") from err

    try:
        img = Image.open(io.BytesIO(data))
        img.load()
    except Exception as err:
        raise DecodeFailedError(f"{record.img_id}: cannot decode image data: {err}") from err

    scale = min(max_w / img.width, max_h / img.height, 1.0)
    if scale < 1.0:
        new_size = (max(1, round(img.width * scale)), max(1, round(img.height * scale)))
        img = img.resize(new_size, Image.LANCZOS)
    if img.mode not in ("RGB", "L"):
        img = img.convert("RGB")

    dest_dir = Path(dest_dir)
    dest_path = dest_dir / asset_filename(record.img_id)
    try:
        dest_dir.mkdir(parents=True, exist_ok=True)
        img.save(dest_path, "JPEG", quality=88)
    except OSError as err:
        raise WriteFailedError(f"{record.img_id}: cannot write {dest_path}: {err}") from err

    return replace(record, asset_path=str(dest_path), width=img.width, height=img.height)


def fetch_all(
    catalog: Catalog,
    dest_dir: str | Path,
    *,
    workers: int = 4,
    max_w: int = MAX_ASSET_WIDTH,
    max_h: int = MAX_ASSET_HEIGHT,
    fetcher: Optional[Fetcher] = None,
) -> list[tuple[str, str]]:
    """Fetch assets for every record with bounded parallelism.

    Successful records are swapped into the catalog in place; failures are
    returned as (img_id, cause) pairs ordered by catalog position regardless
    of completion order.
    """
    records = catalog.records
    failures: list[tuple[str, str]] = []
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = [
            pool.submit(fetch_and_resize, r, dest_dir, max_w=max_w, max_h=max_h, fetcher=fetcher)
            for r in records
        ]
        for record, future in zip(records, futures):
            try:
                catalog.replace(future.result())
            except AssetError as err:
                failures.append((record.img_id, str(err)))
    return failures
