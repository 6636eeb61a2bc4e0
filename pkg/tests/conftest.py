import pytest

_outcomes: dict[int, tuple[str, list[str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    n, title = mark.args
    _, results = _outcomes.setdefault(n, (title, []))
    results.append("pass" if rep.passed else "fail")


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_outcomes):
        title, results = _outcomes[n]
        ok = results and all(r == "pass" for r in results)
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {n}: {title}"
                      f"  ({results.count('pass')}/{len(results)} checks)")
