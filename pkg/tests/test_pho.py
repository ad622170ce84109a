import math

import numpy as np
import pytest

from phonlcs import pho
from phonlcs.errors import InvalidGrid, ParameterOutOfDomain
from phonlcs.pho import OscillatorConfig


def test_mu_of_alpha_examples():
    assert pho.mu_of_alpha(2.0) == 2.5
    assert pho.mu_of_alpha(0.75) == 2.0
    assert pho.mu_of_alpha(1e-12) == pytest.approx(1.5, abs=1e-11)
    with pytest.raises(ParameterOutOfDomain):
        pho.mu_of_alpha(0.0)


def test_alpha_mu_round_trip():
    for mu in (1.6, 2.0, 2.5, 7.3):
        assert pho.mu_of_alpha(pho.alpha_of_mu(mu)) == pytest.approx(mu, rel=1e-14)


def test_from_molecular():
    cfg = OscillatorConfig.from_molecular(1.0, 1.0)
    assert (cfg.alpha, cfg.beta) == (1.0, 1.0)
    cfg = OscillatorConfig.from_molecular(4.0, 2.0)
    assert (cfg.alpha, cfg.beta) == (16.0, 1.0)


def test_molecular_potential_offset():
    rho, k0 = 3.0, 1.7
    cfg = OscillatorConfig.from_molecular(rho, k0)
    xi = np.linspace(0.2, 6.0, 50)
    v = pho.molecular_potential(rho, k0, xi)
    assert np.allclose(cfg.beta**2 * xi**2 + cfg.alpha / xi**2 - v, 2 * rho, rtol=0, atol=1e-12)


def test_para_bose():
    cfg = OscillatorConfig.para_bose(5.0)
    assert cfg.alpha == 2.0 and cfg.beta == 1.0 and cfg.mu == 2.5


def test_config_validation():
    with pytest.raises(ParameterOutOfDomain):
        OscillatorConfig(1.0, 0.0)
    with pytest.raises(ParameterOutOfDomain):
        OscillatorConfig.from_mu(1.5)


def test_eigenvalue_examples():
    cfg = OscillatorConfig(0.75, 1.0)
    assert pho.eigenvalue(cfg, 0) == 2 * cfg.mu
    assert pho.eigenvalue(cfg, 2) == pytest.approx(12.0)
    cfg = OscillatorConfig.from_mu(3.1, 0.4)
    gaps = np.diff([pho.eigenvalue(cfg, n) for n in range(21)])
    assert np.allclose(gaps, 4 * 0.4, rtol=1e-14)


def test_ground_state_closed_form():
    cfg = OscillatorConfig.from_mu(2.5, 0.8)
    xi = np.array([0.1, 1.0, 2.5])
    mu, b = 2.5, 0.8
    exact = math.sqrt(2 * b**mu / math.gamma(mu)) * xi ** (mu - 0.5) * np.exp(-b * xi**2 / 2)
    assert np.allclose(pho.eigenfunction(cfg, 0, xi), exact, rtol=1e-14)


def test_eigenfunction_dirichlet_and_far_tail():
    cfg = OscillatorConfig.from_mu(2.5)
    assert abs(pho.eigenfunction(cfg, 3, 1e-8)) < 1e-14
    assert pho.eigenfunction(cfg, 3, 1e5) == 0.0
    with pytest.raises(ParameterOutOfDomain):
        pho.eigenfunction(cfg, 0, 0.0)


def test_eigenfunction_large_n_log_space():
    cfg = OscillatorConfig.from_mu(2.5)
    val = pho.eigenfunction(cfg, 50, 3.0)
    assert math.isfinite(val)


@pytest.mark.parametrize("mu, beta", [(2.5, 1.0), (4.0, 0.5)])
def test_gram_matrix_identity(mu, beta):
    g = pho.gram_matrix(OscillatorConfig.from_mu(mu, beta), 12)
    assert np.max(np.abs(g - np.eye(13))) <= 1e-8


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
def test_norm_independent_of_beta(beta):
    g = pho.gram_matrix(OscillatorConfig.from_mu(2.5, beta), 4)
    assert np.allclose(np.diag(g), 1.0, atol=1e-10)


def test_hamiltonian_residual_examples():
    cfg = OscillatorConfig.from_mu(2.5)
    xi = np.arange(0.01, 8.0 + 5e-4, 1e-3)
    assert pho.hamiltonian_residual(cfg, 0, xi) <= 1e-4
    assert pho.hamiltonian_residual(cfg, 3, xi) <= 1e-3


def test_hamiltonian_residual_second_order():
    cfg = OscillatorConfig.from_mu(2.5)
    fine = pho.hamiltonian_residual(cfg, 2, np.arange(1, 8001) * 1e-3)
    coarse = pho.hamiltonian_residual(cfg, 2, np.arange(1, 4001) * 2e-3)
    assert coarse / fine == pytest.approx(4.0, rel=0.05)


@pytest.mark.parametrize(
    "grid",
    [
        np.array([0.1, 0.2]),
        np.array([0.3, 0.2, 0.1]),
        np.array([0.0, 0.1, 0.2, 0.3]),
        np.array([0.1, 0.2, 0.35, 0.4]),
    ],
)
def test_invalid_grids(grid):
    with pytest.raises(InvalidGrid):
        pho.hamiltonian_residual(OscillatorConfig.from_mu(2.5), 0, grid)


def test_uniform_grid():
    g = pho.uniform_grid(0.1, 1.0, 10)
    assert g.size == 10 and g[0] == 0.1 and g[-1] == 1.0
    with pytest.raises(InvalidGrid):
        pho.uniform_grid(1.0, 0.5, 10)
