import itertools
import math

import numpy as np
import pytest
from scipy.integrate import quad

from fockdarboux.params import ParameterError, QuantumNumbers, SystemParams, WrongSystemError
from fockdarboux.spectra import effective_frequency
from fockdarboux.states import (DensityProfile, fd_momentum_density, fd_momentum_wavefunction,
                                fd_position_density, fd_radial_wavefunction, fdd_density_profile,
                                fdd_position_density, fdd_radial_derivative, fdd_radial_wavefunction,
                                radial_breakpoints)


def _norm(f, qn, om):
    pts = [0.0] + radial_breakpoints(qn, om) + [40 / math.sqrt(om)]
    return sum(quad(lambda r: f(r) * 2 * math.pi * r, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
               for a, b in zip(pts[:-1], pts[1:]))


@pytest.mark.parametrize("n,l,lam,wc", list(itertools.product(range(4), range(3), (0, 0.1, 1), (0, 2))))
def test_position_density_normalised(n, l, lam, wc):
    qn, sp = QuantumNumbers(n, l), SystemParams(1, wc, lam)
    om = effective_frequency(qn, sp)
    assert _norm(lambda r: fdd_position_density(qn, sp, r), qn, om) == pytest.approx(1, abs=1e-10)


@pytest.mark.parametrize("n,l,wc", [(0, 0, 0), (1, 2, 1), (3, 1, 5)])
def test_fd_momentum_density_normalised(n, l, wc):
    qn, sp = QuantumNumbers(n, l), SystemParams(1, wc, 0)
    norm = _norm(lambda p: fd_momentum_density(qn, sp, p), qn, 1 / sp.omega_t)
    assert norm == pytest.approx(1, abs=1e-10)
    p = np.linspace(0, 3, 7)
    assert np.allclose(fd_momentum_wavefunction(qn, sp, p) ** 2 / (2 * math.pi),
                       fd_momentum_density(qn, sp, p), rtol=1e-12, atol=1e-300)


def test_ground_state_gaussian():
    qn, sp = QuantumNumbers(0, 0), SystemParams()
    r = np.linspace(0, 4, 9)
    assert np.allclose(fd_position_density(qn, sp, r), np.exp(-r * r) / math.pi, rtol=1e-14)


def test_fdd_flat_limit():
    qn = QuantumNumbers(2, -1)
    r = np.linspace(0, 5, 11)
    flat = fd_radial_wavefunction(qn, SystemParams(1, 0.5, 0), r)
    curved = fdd_radial_wavefunction(qn, SystemParams(1, 0.5, 1e-10), r)
    assert np.allclose(flat, curved, atol=1e-8)


def test_radial_derivative_against_finite_difference():
    qn, sp = QuantumNumbers(2, 1), SystemParams(1, 1, 0.3)
    r = np.linspace(0.1, 5, 30)
    h = 1e-5
    fd = (fdd_radial_wavefunction(qn, sp, r + h) - fdd_radial_wavefunction(qn, sp, r - h)) / (2 * h)
    assert np.allclose(fdd_radial_derivative(qn, sp, r), fd, atol=1e-8)


def test_density_profile_validation():
    prof = fdd_density_profile(QuantumNumbers(1, 0), SystemParams(1, 0, 0.2))
    assert prof.norm() == pytest.approx(1, abs=1e-4)
    with pytest.raises(ParameterError):
        DensityProfile("elsewhere", "FDD", prof.qn, prof.sp, prof.grid, prof.values)
    with pytest.raises(ParameterError):
        DensityProfile("position", "FDD", prof.qn, prof.sp, prof.grid[::-1], prof.values)


def test_flat_only_routines_refuse_curvature():
    with pytest.raises(WrongSystemError):
        fd_momentum_density(QuantumNumbers(0, 0), SystemParams(1, 0, 0.1), 1.0)


def test_negative_radius_rejected():
    with pytest.raises(ParameterError):
        fdd_position_density(QuantumNumbers(0, 0), SystemParams(), -1.0)
