import numpy as np
import pytest

from isac_hwi import (RappParams, SystemConfig, apply_pa_frame,
                      estimate_bussgang, generate_frame)

ACCEPTANCE_LINES = []


def record_criterion(name: str, ok: bool, detail: str):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def criterion():
    return record_criterion


@pytest.fixture(scope="session")
def ref_cfg():
    return SystemConfig()


@pytest.fixture(scope="session")
def ref_frame(ref_cfg):
    return generate_frame(ref_cfg, seed=0)


@pytest.fixture(scope="session")
def qpsk_cfg():
    return SystemConfig(qam_order=4)


@pytest.fixture(scope="session")
def qpsk_frame(qpsk_cfg):
    return generate_frame(qpsk_cfg, seed=0)


@pytest.fixture(scope="session")
def pa_outputs(ref_frame):
    return {ibo: apply_pa_frame(ref_frame, RappParams(float(ibo)))
            for ibo in (3, 5, 7)}


@pytest.fixture(scope="session")
def bussgang_table():
    return {ibo: estimate_bussgang(RappParams(float(ibo)), n_samples=1_000_000, seed=1)
            for ibo in (3, 5, 7)}


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
