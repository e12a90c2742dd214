import sys
from pathlib import Path

# Make sibling test helpers (synthkit, oracles) importable regardless of
# how pytest was invoked.
sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_FILE = "test_acceptance.py"


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    results = {}
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if ACCEPTANCE_FILE not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            outcome = "PASS" if status == "passed" else "FAIL"
            # setup/teardown failures override a passing call phase
            if results.get(name) != "FAIL":
                results[name] = outcome
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(results):
        terminalreporter.write_line(f"{results[name]:4s}  {name}")
