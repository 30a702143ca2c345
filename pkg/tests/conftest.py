"""Shared fixtures. The expensive sweeps and oracle tables are session-scoped
so the unit tests and the acceptance suite reuse the same objects."""
import numpy as np
import pytest

from qfrelay import (
    LambdaGrid,
    RateTable,
    build_bpsk_mac,
    fixture_channel,
    sweep_grid,
)


@pytest.fixture(scope="session")
def fx():
    """Tiny 2x2x3 noisy-sum channel used by the oracle suite."""
    return fixture_channel()


@pytest.fixture(scope="session")
def bpsk():
    """BPSK two-user MAC at uplink SNRs 1.5 / 4.5 dB, 128 bins."""
    return build_bpsk_mac(1.5, 4.5)


@pytest.fixture(scope="session")
def bpsk_surface(bpsk):
    """Default 12x12 lambda sweep of the BPSK channel at L=32."""
    return sweep_grid(bpsk, 32, restarts=4, seed=0)


@pytest.fixture(scope="session")
def fx_surface_dense(fx):
    """Dense 40x40 lambda sweep of the fixture at L=2.

    The default 12-point axis leaves visible envelope gaps on this tiny
    channel (achieved (c1, c2) jumps between adjacent lambdas), so the
    envelope-vs-oracle comparisons use a denser grid.
    """
    grid = LambdaGrid.log_spaced(1e-3, 10.0, 40)
    return sweep_grid(fx, 2, grid=grid, restarts=4, seed=0)


@pytest.fixture(scope="session")
def fx_table_l2(fx):
    """Brute-force rate table, L=2, step 0.02 (21^3 columns -> 9261 cells)."""
    return RateTable(fx, 2, grid_step=0.02)


@pytest.fixture(scope="session")
def fx_table_l2_coarse(fx):
    return RateTable(fx, 2, grid_step=0.05)


@pytest.fixture(scope="session")
def fx_table_l3(fx):
    """L=3 table at step 1/14: 120^3 = 1.728e6 cells, still under budget."""
    return RateTable(fx, 3, grid_step=1.0 / 14.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260817)
