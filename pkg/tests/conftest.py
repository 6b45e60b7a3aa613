import pytest

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def criterion():
    """Record and print one pass/fail line for an acceptance criterion."""
    import time

    class Recorder:
        def __init__(self):
            self.start = time.perf_counter()

        def report(self, number: int, title: str, ok: bool, budget_s: float | None, detail: str = "") -> None:
            elapsed = time.perf_counter() - self.start
            in_time = budget_s is None or elapsed < budget_s
            status = "PASS" if ok and in_time else "FAIL"
            budget = f" (budget {budget_s:g}s)" if budget_s is not None else ""
            line = f"{status} criterion {number:2d}: {title}: {detail} [{elapsed:.2f}s{budget}]"
            ACCEPTANCE_LINES.append(line)
            print(line)
            assert ok, line
            assert in_time, line

    return Recorder()
