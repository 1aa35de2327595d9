import pytest

from wreathembed.specfile import named_group


@pytest.fixture(scope="session")
def catalogue():
    """Group data by name, built once per session."""
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = named_group(name)
        return cache[name]

    return get


# -- acceptance summary ------------------------------------------------------
# Tests marked ``criterion(n, text)`` get one PASS/FAIL line each at the end
# of the run, in criterion order.

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    n, text = mark.args
    entry = _CRITERIA.setdefault(n, {"text": text, "passed": True, "reasons": []})
    if rep.failed:
        entry["passed"] = False
        msg = str(rep.longrepr.reprcrash.message) if hasattr(rep.longrepr, "reprcrash") else str(rep.longrepr)
        entry["reasons"].append(f"{item.name}: {msg.splitlines()[0][:160]}")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        tr.write_line(f"{'PASS' if e['passed'] else 'FAIL'}  criterion {n:2d}: {e['text']}")
        for r in e["reasons"]:
            tr.write_line(f"          {r}")
