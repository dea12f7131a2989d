import numpy as np
import pytest

from swfourier.ingest import SpaceTimeMatrix
from swfourier.ovf import Component


def make_matrix(data, dt=1e-12, dx=1.5e-9, sel_shape=None, xbase=None):
    data = np.asarray(data, dtype=np.float64)
    if sel_shape is None:
        sel_shape = (data.shape[0], 1, 1)
    xbase = 0.5 * dx if xbase is None else xbase
    return SpaceTimeMatrix(
        data=data,
        dt=dt,
        dx=dx,
        sel_shape=tuple(sel_shape),
        component=Component.Z,
        x_positions=xbase + np.arange(sel_shape[0]) * dx,
    )


@pytest.fixture
def matrix_factory():
    return make_matrix


_acceptance = []


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        _acceptance.append((props["criterion"], status))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _acceptance:
        terminalreporter.write_line(f"{status:4}  {name}")
