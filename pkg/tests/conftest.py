import pytest

_RESULTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion(request):
    """Record a pass/fail line for an acceptance criterion."""

    class Recorder:
        def __init__(self):
            self.number = None
            self.detail = ""

        def __call__(self, number: int, detail: str = ""):
            self.number = number
            self.detail = detail

    rec = Recorder()
    yield rec
    if rec.number is not None:
        failed = request.node.stash.get(_FAILED, False)
        prev_ok, prev_detail = _RESULTS.get(rec.number, (True, ""))
        detail = "; ".join(d for d in (prev_detail, rec.detail) if d)
        _RESULTS[rec.number] = (prev_ok and not failed, detail)


_FAILED = pytest.StashKey[bool]()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and rep.failed:
        item.stash[_FAILED] = True


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        ok, detail = _RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
