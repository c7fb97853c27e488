import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))


def pytest_terminal_summary(terminalreporter):
    from acceptance_results import RESULTS, TITLES
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(TITLES):
        status = RESULTS.get(k)
        if status is None:
            continue
        ok, detail = status
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {TITLES[k]}  ({detail})")
