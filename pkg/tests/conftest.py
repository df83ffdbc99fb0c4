from pathlib import Path

import pytest

from modgames import formats, library

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def sample():
    return formats.parse_rgg((DATA / "sample.rgg").read_text())


@pytest.fixture
def gf_pc():
    return library.infinitely_often("p_c", library.SAMPLE_AP)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
