import pytest

from rfuwoc.presets import load_preset, load_water

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def water():
    return load_water()


@pytest.fixture(scope="session")
def presets():
    return {name: load_preset(name) for name in ("fig1", "fig2", "fig3", "fig4")}


def scenarios_of(preset):
    return [(label, preset.scenario(doc)) for label, doc in preset.series()]


@pytest.fixture(scope="session")
def fig1_scenarios(presets):
    return scenarios_of(presets["fig1"])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
