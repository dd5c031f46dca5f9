import pytest

ACCEPTANCE: dict[str, str] = {}


@pytest.fixture
def report():
    """Record one acceptance line: ``report(criterion, passed, detail)``."""
    def record(criterion: str, passed: bool, detail: str) -> None:
        ACCEPTANCE[criterion] = f"{criterion}: {'PASS' if passed else 'FAIL'} - {detail}"
        print(ACCEPTANCE[criterion])
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: [int(x) if x.isdigit() else x for x in k.replace(".", " ").split()]):
        terminalreporter.write_line(ACCEPTANCE[key])
