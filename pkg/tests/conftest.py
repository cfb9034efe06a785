import pytest

_ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion; the outcome is printed in the summary."""

    def record(number: int, title: str):
        _ACCEPTANCE[number] = (title, False, "")
        request.node._criterion = number

        def note(detail: str):
            request.node._criterion_detail = detail

        return note

    return record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    number = getattr(item, "_criterion", None)
    if number is None or rep.when != "call":
        return
    title, _, _ = _ACCEPTANCE[number]
    detail = getattr(item, "_criterion_detail", "")
    _ACCEPTANCE[number] = (title, rep.passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok, detail = _ACCEPTANCE[number]
        status = "PASS" if ok else "FAIL"
        line = f"[{status}] criterion {number:>2}: {title}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
