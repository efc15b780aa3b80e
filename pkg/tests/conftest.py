import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")

_TITLES = {
    1: "weighted shift ratio closed forms and verdicts",
    2: "dilation shift ratio lower bounds",
    3: "position/momentum window commutators",
    4: "block diagonal plus small split at N=2048",
    5: "spectral sweep on 50 seeded matrices",
    6: "sparse family ratios at rank 1024",
    7: "compression moments against symbol moments",
    8: "exact growth witness for p, q, pq",
    9: "window representation multiplicativity",
    10: "constant shift: flat norm, vanishing ratios",
}

_results: dict[int, str] = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    m = _CRITERION.search(report.nodeid)
    if m:
        _results[int(m.group(1))] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.write_sep("-", "acceptance scorecard")
    for k in sorted(_results):
        terminalreporter.write_line(f"[criterion {k:2d}] {_results[k]}  {_TITLES.get(k, '')}")
