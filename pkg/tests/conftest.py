"""Shared pytest plumbing: collect acceptance-criterion verdicts and print
them as a summary block at the end of the run."""

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def record_criterion(label: str, passed: bool, detail: str) -> bool:
    verdict = "PASS" if passed else "FAIL"
    line = f"CRITERION {label}: {verdict} - {detail}"
    print(line)
    ACCEPTANCE_RESULTS.append((label, passed, detail))
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for label, passed, detail in sorted(
        ACCEPTANCE_RESULTS, key=lambda r: ([int(p) for p in r[0].split(".")],)
    ):
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {label}: {verdict} - {detail}")
