import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: (int(s.split()[1].rstrip(":*")), "*" in s.split()[1])):
            terminalreporter.write_line(line)
