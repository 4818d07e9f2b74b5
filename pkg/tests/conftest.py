import re

_results = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    key = int(m.group(1))
    if key in _results and not _results[key][0]:
        return
    if report.when == "call" or report.failed:
        detail = "; ".join(f"{k}={v}" for k, v in report.user_properties)
        _results[key] = (report.passed, report.nodeid.split("::")[-1], detail)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_results):
        ok, name, detail = _results[key]
        line = f"criterion {key}: {'PASS' if ok else 'FAIL'}  {name}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
