import contextlib
import os
from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"

_results: list[tuple[str, str, str]] = []


def air_quality_csv() -> Path | None:
    """The real UCI file, if one was supplied (it is not vendored)."""
    env = os.environ.get("REPAD2_AIRQUALITY_CSV")
    for candidate in (env, DATA_DIR / "AirQualityUCI.csv"):
        if candidate and Path(candidate).is_file():
            return Path(candidate)
    return None


@contextlib.contextmanager
def criterion(cid: str, description: str):
    """Record PASS/FAIL/BLOCKED for one acceptance line."""
    note = {"detail": ""}
    try:
        yield note
    except pytest.skip.Exception as exc:
        _record(cid, "BLOCKED", f"{description} -- {exc.msg}")
        raise
    except BaseException:
        _record(cid, "FAIL", f"{description} {note['detail']}".rstrip())
        raise
    _record(cid, "PASS", f"{description} {note['detail']}".rstrip())


def info(cid: str, detail: str) -> None:
    _record(cid, "INFO", detail)


def _record(cid, status, detail):
    line = (cid, status, detail)
    _results.append(line)
    print(f"ACCEPTANCE {cid:<6} {status:<7} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for cid, status, detail in _results:
        terminalreporter.write_line(f"[{cid:<6}] {status:<7} {detail}")
