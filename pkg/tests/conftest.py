import pytest

ACCEPTANCE_LINES: list[tuple[int, str]] = []


@pytest.fixture
def criterion():
    """Record one criterion outcome, then assert it."""

    def record(number: int, title: str, checks):
        # checks: iterable of (label, metric, bound); pass means metric < bound for every item
        checks = list(checks)
        ok = all(metric < bound for _, metric, bound in checks)
        detail = "; ".join(f"{label}={metric:.4g} (< {bound:.4g})" for label, metric, bound in checks)
        ACCEPTANCE_LINES.append((number, f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"))
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
