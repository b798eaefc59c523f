import numpy as np
import pytest

from wqed.core import EmitterArray, Grid, PulseSpec
from wqed.scatter.single import (
    GridLeakageError,
    scatter_one,
    transmission_single,
    transmission_single_lossy,
)

SQRT2 = np.sqrt(2.0)


def test_resonant_pi_phase():
    assert transmission_single(0.0) == pytest.approx(-1.0)


def test_large_k_limit():
    assert transmission_single(1e8) == pytest.approx(1.0, abs=1e-7)
    assert transmission_single(-1e8) == pytest.approx(1.0, abs=1e-7)


def test_unimodular():
    assert abs(abs(transmission_single(0.37)) - 1.0) < 1e-14


def test_identity_at_n0():
    pulse = PulseSpec(sigma=3 * SQRT2)
    grid = Grid(-40.0, 40.0, 1024)
    wf = scatter_one(pulse, EmitterArray(0), grid)
    from wqed.core import gaussian_mode
    assert np.max(np.abs(wf.psi - gaussian_mode(pulse, grid))) < 1e-13


def test_narrowband_wigner_delay():
    # N=20, sigma*Gamma = 10: centroid at -4N/Gamma within 5%
    N = 20
    pulse = PulseSpec(sigma=10.0)
    grid = Grid(-8 * 10 - 6 * N, 8 * 10, 4096)
    wf = scatter_one(pulse, EmitterArray(N), grid)
    assert wf.centroid() == pytest.approx(-4.0 * N, rel=0.05)
    assert abs(wf.norm2() - 1.0) < 1e-10


def test_lossy_norm_drop():
    # |t|^2N integrated against the pulse spectrum
    N = 5
    arr = EmitterArray(N, gamma_0=0.25)
    pulse = PulseSpec(sigma=4.0)
    grid = Grid(-150.0, 40.0, 4096)
    wf = scatter_one(pulse, arr, grid)
    tk = transmission_single_lossy(grid.k, 1.0, 0.25)
    from wqed.core import gaussian_mode
    spec = grid.fwd(gaussian_mode(pulse, grid))
    expected = np.sum(np.abs(tk) ** (2 * N) * np.abs(spec) ** 2) * grid.dk / (2 * np.pi)
    assert wf.norm2() == pytest.approx(expected, rel=1e-10)
    assert wf.norm2() < 1.0


def test_grid_leakage_error():
    pulse = PulseSpec(sigma=3.0)
    grid = Grid(-30.0, 30.0, 512)   # too small for N=20 delays
    with pytest.raises(GridLeakageError):
        scatter_one(pulse, EmitterArray(20), grid)
