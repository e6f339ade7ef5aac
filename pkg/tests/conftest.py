import numpy as np
import pytest

from trsecure.model import RngStream, SystemParams, gen_rayleigh_channel, gen_spreading_code
from trsecure.model import SUB_CHANNEL_EVE


@pytest.fixture
def small_params():
    return SystemParams.from_bor(32, 4, alpha=0.7)


@pytest.fixture
def link(small_params):
    """(params, code, h_b, h_e, stream) for one small realization."""
    stream = RngStream(1234, 0)
    code = gen_spreading_code(small_params, stream)
    h_b = gen_rayleigh_channel(small_params.q_subcarriers, stream)
    h_e = gen_rayleigh_channel(small_params.q_subcarriers, stream, substream=SUB_CHANNEL_EVE)
    return small_params, code, h_b, h_e, stream


def cn(gen, shape):
    return (gen.standard_normal(shape) + 1j * gen.standard_normal(shape)) / np.sqrt(2)


_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record one acceptance line, then assert it."""

    def record(number, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        _CRITERIA[number] = line
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[k])
