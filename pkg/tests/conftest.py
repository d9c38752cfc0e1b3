import pytest
from hypothesis import HealthCheck, settings

from veriroot import interval as ia
from veriroot.rounding import available_backends

# the backend fixture only selects a rounding mode, so sharing it across
# generated inputs is fine
settings.register_profile(
    "default",
    max_examples=200,
    deadline=None,
    suppress_health_check=[HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")


@pytest.fixture(params=available_backends())
def backend(request):
    """Run a test once per rounding backend available on this machine."""
    with ia.rounding_backend(request.param):
        yield request.param


def pytest_terminal_summary(terminalreporter):
    from _acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES):
            terminalreporter.write_line(line)
