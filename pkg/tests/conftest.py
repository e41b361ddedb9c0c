import pytest

# criterion number -> (passed, summary); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def acceptance():
    def record(number: int, title: str, checks):
        """Record sub-checks ``(label, ok, detail)``, print one line, assert all."""
        ok = all(c[1] for c in checks)
        detail = "; ".join(f"{label}: {'ok' if good else 'FAILED'} ({info})" for label, good, info in checks)
        line = f"criterion {number} {title}: {'PASS' if ok else 'FAIL'} | {detail}"
        ACCEPTANCE[number] = (ok, line)
        print(line)
        failed = [c[0] for c in checks if not c[1]]
        assert ok, f"failed sub-checks: {failed}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number][1])
    passed = sum(ok for ok, _ in ACCEPTANCE.values())
    terminalreporter.write_line(f"{passed}/{len(ACCEPTANCE)} criteria pass")
