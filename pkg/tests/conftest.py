import sys
from pathlib import Path

from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if acceptance_log.RESULTS:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in acceptance_log.lines():
            terminalreporter.write_line(line)
