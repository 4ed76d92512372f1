from __future__ import annotations

import pytest

from amr.learner import ParameterVector
from amr.presets import balanced_config, bank_dominated_config, synthetic_target
from amr.rng import substream


@pytest.fixture(scope="session")
def cfg_a():
    """Bank-dominated asset distribution (one type holds ~80% of assets)."""
    return bank_dominated_config(master_seed=2008)


@pytest.fixture(scope="session")
def cfg_b():
    """Balanced distribution (two types with comparable investment capacity)."""
    return balanced_config(master_seed=2009)


@pytest.fixture(scope="session")
def target_a(cfg_a):
    return synthetic_target(cfg_a, seed=substream(cfg_a.master_seed, 0), n_days=390)


@pytest.fixture(scope="session")
def target_b(cfg_b):
    return synthetic_target(cfg_b, seed=substream(cfg_b.master_seed, 0), n_days=390)


@pytest.fixture(scope="session")
def params_a(cfg_a):
    """Generator parameters double as the trained vector for fixture markets."""
    return ParameterVector.from_config(cfg_a)


@pytest.fixture(scope="session")
def params_b(cfg_b):
    return ParameterVector.from_config(cfg_b)
