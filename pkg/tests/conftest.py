import pytest

_RESULTS = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion, "
                                       "reported in the terminal summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        if hasattr(rep, "wasxfail"):
            status = "FAIL (known, see decisions ledger)" if rep.skipped else "XPASS"
        else:
            status = "PASS" if rep.passed else "FAIL"
        detail = "; ".join(f"{k}={v}" for k, v in item.user_properties)
        _RESULTS.append((mark.args[0], status, detail))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for label, status, detail in _RESULTS:
        terminalreporter.write_line(f"{label}: {status}" + (f"  [{detail}]" if detail else ""))
