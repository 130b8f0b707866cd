import math

import numpy as np
import pytest
from scipy import special as sps
from scipy.integrate import quad

from fockdarboux.dispersion import p2_fdd
from fockdarboux.entropy import entropic_moment_fd_closed
from fockdarboux.momentum import (CoverageError, default_p_grid, fdd_momentum_density_table,
                                  fdd_momentum_wavefunction, hankel_values, momentum_entropic_moment,
                                  momentum_nodes, momentum_shannon)
from fockdarboux.params import QuantumNumbers, SystemParams
from fockdarboux.states import fd_momentum_density, fdd_radial_wavefunction


def test_hankel_ground_state_oracle():
    # mpmath quadrature of int R(r) J_0(r) r dr
    res = fdd_momentum_wavefunction(QuantumNumbers(0, 0), SystemParams(1, 0, 0.1), 1.0)
    assert res.value == pytest.approx(0.851183520269171424, abs=1e-10)


def test_hankel_against_scipy_quad_excited():
    qn, sp = QuantumNumbers(1, 2), SystemParams(1, 1, 0.5)
    for p in (0.3, 1.7):
        ref = quad(lambda r: fdd_radial_wavefunction(qn, sp, r) * sps.jv(2, p * r) * r, 0, 60, limit=500,
                   epsabs=1e-13)[0]
        assert fdd_momentum_wavefunction(qn, sp, p).value == pytest.approx(abs(ref), abs=1e-10)


def test_flat_table_matches_analytic_density():
    qn, sp = QuantumNumbers(1, 1), SystemParams(1, 1, 0)
    tab = fdd_momentum_density_table(qn, sp)
    assert np.allclose(tab.gamma, fd_momentum_density(qn, sp, tab.p_grid), atol=1e-13)
    assert tab.norm_residual < 1e-8


@pytest.mark.parametrize("n,l,lam,wc", [(0, 0, 1, 0), (1, 2, 0.1, 2), (2, 1, 1, 2)])
def test_table_norm_and_p2(n, l, lam, wc):
    qn, sp = QuantumNumbers(n, l), SystemParams(1, wc, lam)
    tab = fdd_momentum_density_table(qn, sp)
    assert tab.norm_residual < 1e-6
    p2 = p2_fdd(qn, sp).total
    assert tab.moment(2) == pytest.approx(p2, rel=1e-5)
    assert np.allclose(tab.psi_tilde_magnitude ** 2, tab.gamma)


def test_default_grid_shape():
    g = default_p_grid(QuantumNumbers(0, 0), SystemParams(1, 0, 1), p_max=13.5)
    assert g[0] == 0 and np.all(np.diff(g) > 0) and g[-1] == pytest.approx(13.5)
    assert len(g) == 2048


def test_explicit_short_grid_raises_coverage_error():
    with pytest.raises(CoverageError) as info:
        fdd_momentum_density_table(QuantumNumbers(0, 0), SystemParams(1, 0, 1), np.linspace(0, 3, 200))
    assert info.value.suggested_p_max > 3


def test_node_of_curved_ground_state():
    qn, sp = QuantumNumbers(0, 0), SystemParams(1, 0, 1)
    nodes = momentum_nodes(qn, sp, 10.0)
    # mpmath root of the Hankel integral
    assert nodes[0] == pytest.approx(1.2935121934843827558, abs=1e-12)
    F, _ = hankel_values(qn, sp, nodes)
    assert np.max(np.abs(F)) < 1e-9


def test_momentum_shannon_flat_ground_state():
    res = momentum_shannon(QuantumNumbers(0, 0), SystemParams(1, 0, 0))
    assert res.value == pytest.approx(1 + math.log(math.pi), abs=1e-8)


def test_momentum_functional_matches_flat_closed_form():
    qn, sp = QuantumNumbers(1, 1), SystemParams(1, 2, 0)
    res = momentum_entropic_moment(qn, sp, 2.0)
    assert res.value == pytest.approx(entropic_moment_fd_closed(qn, sp, 2, "momentum"), rel=1e-9)


def test_curved_ground_state_momentum_oracles():
    g = QuantumNumbers(0, 0)
    # mpmath: F(p) by quadrature over r, then int gamma^2 2 pi p dp
    assert momentum_entropic_moment(g, SystemParams(1, 0, 0.5), 2.0).value == \
        pytest.approx(0.35386863237654903753, rel=1e-10)
    # scipy: F(p) from quad of R J_0(pr) r, then quad of -gamma log gamma split at the zero of F
    assert momentum_shannon(g, SystemParams(1, 0, 1)).value == pytest.approx(0.850868797561924, abs=1e-10)
