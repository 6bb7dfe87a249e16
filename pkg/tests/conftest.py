import io

import pytest

from photoyear.catalog import Catalog, ImageRecord

_acceptance_results = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and item.fspath.basename == "test_acceptance.py":
        label = (item.function.__doc__ or item.name).strip().splitlines()[0]
        _acceptance_results.append((label, report.passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for label, passed in _acceptance_results:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {label}")


def make_record(i: int, year: int, title: str = "") -> ImageRecord:
    # ids avoid 4-digit runs so answer-hiding scans can't false-positive
    return ImageRecord(
        img_id=f"img-{i:03d}",
        gt_year=year,
        date_taken=f"{year}-06-15",
        date_granularity=0,
        url=f"file:///fixtures/img-{i:03d}.jpg",
        title=title or f"Fixture scene {i}",
    )


def build_catalog(years) -> Catalog:
    return Catalog(make_record(i, year) for i, year in enumerate(years))


def meta_csv(rows, header="img_id,gt_year,date_taken,date_granularity,url,title") -> io.StringIO:
    lines = [header] + [",".join(str(f) for f in row) for row in rows]
    return io.StringIO("\n".join(lines) + "\n")


@pytest.fixture
def balanced_catalog() -> Catalog:
    """One image per playable year, 70 records total."""
    return build_catalog(range(1930, 2000))


@pytest.fixture
def small_catalog() -> Catalog:
    return build_catalog([1930, 1933, 1944, 1951, 1957, 1963, 1971, 1980, 1992, 1999])
