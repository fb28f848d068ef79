import pytest

# criterion number -> (status, detail); filled in by test_acceptance
ACCEPTANCE: dict[int, tuple[str, str]] = {}


@pytest.fixture
def criterion():
    def record(number: int, status: str, detail: str = "") -> None:
        ACCEPTANCE[number] = (status, detail)
        print(f"criterion {number}: {status} {detail}".rstrip())

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {status} {detail}".rstrip())
