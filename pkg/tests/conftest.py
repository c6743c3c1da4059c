import pytest

from ncdft import NcEngine, NoteScaleConfig, plan_bank
from ncdft import oracle


@pytest.fixture(scope="session")
def config():
    return NoteScaleConfig()


@pytest.fixture(scope="session")
def plans(config):
    return plan_bank(config)


@pytest.fixture(scope="session")
def calibrations(config, plans):
    # Computed once; building engines against these skips the per-engine
    # calibration pass and keeps the suite fast.
    return [oracle.calibrate(p, config.sample_rate) for p in plans]


@pytest.fixture
def bank_engine(config, plans, calibrations):
    return NcEngine(plans, config.sample_rate, calibrations=calibrations)
