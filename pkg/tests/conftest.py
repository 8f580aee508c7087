import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", settings.get_profile("repo"), max_examples=400)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))

# Lines collected by test_acceptance, echoed once at the end of the run.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


@pytest.fixture(scope="session")
def monodromy_lambda0():
    from riccati_holonomy.projective import explicit_monodromy

    return explicit_monodromy(0j)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
