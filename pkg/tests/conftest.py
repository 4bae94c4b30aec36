import pytest


@pytest.fixture
def write_config(tmp_path):
    def _write(text: str, name: str = "run.cfg"):
        path = tmp_path / name
        path.write_text(text)
        return path

    return _write


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    def _record(number: int, passed: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}")
        print(ACCEPTANCE_LINES[-1])
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
