"""
Pytest configuration and shared fixtures for HyperBit tests.
Provides test isolation, reference generators and small deterministic bitstreams.
"""

import os
import shutil
import tempfile
from pathlib import Path

import numpy as np
import pytest

from core.bitgen import BitGenerator
from core.chaos import BackendKind, InitialCondition, SolverConfig
from core.fxp import OverflowPolicy
from core.randtest import counter_mode_bits


@pytest.fixture
def temp_dir():
    """Create temporary directory for test isolation"""
    temp_dir = tempfile.mkdtemp()
    old_cwd = os.getcwd()
    os.chdir(temp_dir)
    yield Path(temp_dir)
    os.chdir(old_cwd)
    shutil.rmtree(temp_dir)


@pytest.fixture
def clean_env(monkeypatch):
    """Drop HyperBit environment variables and reset global CLI flags"""
    for var in ("HYPERBIT_OUTPUT_DIR", "NO_COLOR"):
        monkeypatch.delenv(var, raising=False)

    import cli

    monkeypatch.setattr(cli.app_state, "verbose", False)
    monkeypatch.setattr(cli.app_state, "quiet", False)
    monkeypatch.setattr(cli.app_state, "no_color", False)
    monkeypatch.setattr(cli.app_state, "config_path", None)
    yield


@pytest.fixture
def reference_ic():
    """The reference initial condition (0.0002, 0.0005, 0.00005, 0.001, 0)"""
    return InitialCondition.reference()


@pytest.fixture
def fixed_config():
    return SolverConfig(h=0.01, backend=BackendKind.FIXED, overflow=OverflowPolicy.WRAP)


@pytest.fixture
def trap_config():
    return SolverConfig(h=0.01, backend=BackendKind.FIXED, overflow=OverflowPolicy.TRAP)


@pytest.fixture
def double_config():
    return SolverConfig(h=0.01, backend=BackendKind.DOUBLE)


@pytest.fixture
def reference_bits():
    """Factory for counter-mode reference bits"""

    def _bits(n_bits: int, seed: int = 2024) -> np.ndarray:
        return counter_mode_bits(n_bits, seed)

    return _bits


@pytest.fixture(scope="session")
def generator_streams():
    """B1..B5 of 24_000 bits each from the reference initial condition (short transient)"""
    generator = BitGenerator(InitialCondition.reference(), SolverConfig(), discard=100)
    return generator.generate(24_000)


@pytest.fixture
def performance_monitor():
    """Report test wall time"""
    import time

    start_time = time.time()
    yield
    print(f"\nTest execution time: {time.time() - start_time:.3f}s")
