from collections import defaultdict

import pytest

# criterion number -> list of (passed, detail) from individual cells
_ACCEPTANCE = defaultdict(list)


@pytest.fixture
def acceptance():
    def record(criterion: int, passed: bool, detail: str = "") -> None:
        _ACCEPTANCE[criterion].append((bool(passed), detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_ACCEPTANCE):
        cells = _ACCEPTANCE[criterion]
        ok = sum(p for p, _ in cells)
        status = "PASS" if ok == len(cells) else "FAIL"
        failed = "; ".join(d for p, d in cells if not p)
        line = f"criterion {criterion:2d}: {status} ({ok}/{len(cells)} cells)"
        if failed:
            line += f"  failing: {failed}"
        terminalreporter.write_line(line)
