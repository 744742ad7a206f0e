"""Shared helpers: reproducible parameter draws and link pairs."""

import numpy as np
import pytest

from fbsec import FBParams


def draw_params(rng, case2: bool = False, snr_db_range=(0.0, 20.0)) -> FBParams:
    """One random parameter set; log-uniform spreads mirror the fading ranges."""
    if case2:
        mu = float(rng.choice([2.0, 4.0, 6.0]))
        m = float(rng.choice([1.0, 2.0, 3.0]))
    else:
        mu = float(np.exp(rng.uniform(np.log(0.5), np.log(8.0))))
        m = float(np.exp(rng.uniform(np.log(0.5), np.log(10.0))))
    kappa = float(np.exp(rng.uniform(np.log(1e-2), np.log(10.0))))
    eta = float(np.exp(rng.uniform(np.log(0.1), np.log(10.0))))
    rho2 = float(np.exp(rng.uniform(np.log(1e-2), np.log(10.0))))
    snr_db = float(rng.uniform(*snr_db_range))
    return FBParams(mu=mu, m=m, kappa=kappa, eta=eta, rho2=rho2, avg_snr=10 ** (snr_db / 10.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


# Eavesdropper and main-link parameter sets quoted throughout the tests
EVE_REFERENCE = FBParams(mu=1.5, m=1.5, kappa=1.0, eta=0.1, rho2=0.1, avg_snr=10**0.5)
BOB_REFERENCE = FBParams(mu=3.5, m=2.5, kappa=1.0, eta=0.1, rho2=0.1, avg_snr=10**2.0)
