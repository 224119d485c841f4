import warnings

import pytest

ACCEPTANCE: list[str] = []

warnings.filterwarnings("ignore", message=".*TBB.*")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance():
    def report(tag: str, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  {tag}: {detail}"
        print(line)
        ACCEPTANCE.append(line)
        return ok

    return report
