from pathlib import Path

import pytest

from frodoproc.params import params_for

LEVELS = (640, 976, 1344)
KAT_DIR = Path(__file__).parent / "data" / "kat"


def kat_path(level: int) -> Path:
    return KAT_DIR / f"PQCkemKAT_frodo{level}shake.rsp.gz"


@pytest.fixture(params=LEVELS, ids=lambda n: f"frodo{n}")
def p(request):
    return params_for(request.param)


# acceptance criteria report: one line per criterion at the end of the session
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def record(number: int, title: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE[number] = (title, passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[number]
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {title}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
