import numpy as np
import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20140117)


@pytest.fixture
def report():
    """Collect one PASS/FAIL line per acceptance criterion."""

    def add(number, name, ok, detail=""):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {name}  {detail}")
        return ok

    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)


# Default-config experiments shared by the harness and acceptance modules.


@pytest.fixture(scope="session")
def default_n3():
    from qhlab.harness import RunConfig, run_qhl_experiment

    return run_qhl_experiment(RunConfig(n_qubits=3), workers=_workers())


@pytest.fixture(scope="session")
def default_n5():
    from qhlab.harness import RunConfig, run_qhl_experiment

    return run_qhl_experiment(RunConfig(n_qubits=5), workers=_workers())


@pytest.fixture(scope="session")
def line_n5():
    from qhlab.harness import RunConfig, run_qhl_experiment

    return run_qhl_experiment(RunConfig(n_qubits=5, graph="line"), workers=_workers())


def _workers():
    import os

    return max(1, min(4, os.cpu_count() or 1))
