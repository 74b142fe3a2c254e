import re

_ACCEPTANCE = {}
_NAME = re.compile(r"test_criterion_(\d+)")


def pytest_runtest_logreport(report):
    m = _NAME.search(report.nodeid)
    if not m or "test_acceptance" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        n = int(m.group(1))
        detail = dict(report.user_properties).get("detail", "")
        ok = report.outcome == "passed"
        prev = _ACCEPTANCE.get(n)
        # a criterion split over several tests passes only if all of them do
        if prev is not None:
            ok = ok and prev[0]
            detail = "; ".join(d for d in (prev[1], detail) if d)
        _ACCEPTANCE[n] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
