import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def sl2():
    from direntropy.chamber import Direction

    return Direction.sl(1, -1)


@pytest.fixture
def sl3():
    from direntropy.chamber import Direction

    return Direction.sl(1, 0, -1)


@pytest.fixture
def sp4():
    from direntropy.chamber import Direction

    return Direction.sp(2, 1)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
