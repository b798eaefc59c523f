import numpy as np
import pytest

from wqed.core import EmitterArray, Grid, PulseSpec
from wqed.scatter import (
    coherent_output,
    fock_observables,
    observables,
    scatter_one,
    scatter_three,
    scatter_two,
    window_statistics,
)

SIG = 3 * np.sqrt(2)


@pytest.fixture(scope="module")
def n0_outputs():
    """Unscattered (N=0) outputs on a small grid."""
    grid = Grid(-8 * SIG, 8 * SIG, 256)
    arr = EmitterArray(0)
    pulse = PulseSpec(sigma=SIG)
    wf1 = scatter_one(pulse, arr, grid)
    wf2 = scatter_two(pulse, arr, grid)
    wf3 = scatter_three(pulse, arr, grid)
    return grid, wf1, wf2, wf3


def test_vacuum_alpha_zero(n0_outputs):
    grid, wf1, wf2, wf3 = n0_outputs
    obs = observables(coherent_output(0.0, wf1, wf2, wf3))
    assert np.all(obs.P == 0) and np.all(obs.G2 == 0) and np.all(obs.G3 == 0)


def test_single_photon_has_zero_g2(n0_outputs):
    grid, wf1, _, _ = n0_outputs
    obs = fock_observables(wf1)
    assert np.all(obs.G2 == 0)


def test_fock2_photon_counting(n0_outputs):
    grid, _, wf2, _ = n0_outputs
    obs = fock_observables(wf2)
    assert np.sum(obs.P) * grid.dx == pytest.approx(2.0, rel=1e-8)


def test_coherent_flux_equals_mean_n(n0_outputs):
    grid, wf1, wf2, wf3 = n0_outputs
    state = coherent_output(np.sqrt(0.5), wf1, wf2, wf3)
    obs = observables(state)
    assert obs.meta["photon_flux"] == pytest.approx(0.5, rel=1e-6)
    # reduction consistency: iint G2 = <N(N-1)> = nbar^2
    assert obs.meta["second_factorial_moment"] == pytest.approx(0.25, rel=1e-5)


def test_observables_nonnegative(n0_outputs):
    grid, wf1, wf2, wf3 = n0_outputs
    obs = observables(coherent_output(np.sqrt(0.5), wf1, wf2, wf3))
    obs.validate_positive()


def test_n0_power_matches_input_mode(n0_outputs):
    grid, wf1, wf2, wf3 = n0_outputs
    state = coherent_output(np.sqrt(0.5), wf1, wf2, wf3)
    obs = observables(state)
    from wqed.core import gaussian_mode
    expect = 0.5 * np.abs(gaussian_mode(PulseSpec(sigma=SIG), grid)) ** 2
    assert np.max(np.abs(obs.P - expect)) < 1e-6 * expect.max()


def test_truncation_warning():
    grid = Grid(-8 * SIG, 8 * SIG, 128)
    arr = EmitterArray(0)
    wf1 = scatter_one(PulseSpec(sigma=SIG), arr, grid)
    state = coherent_output(np.sqrt(4.0), wf1)  # nbar = 4: heavy truncation
    assert "warning" in state.meta


def test_window_covering_everything_fock2(n0_outputs):
    grid, _, wf2, _ = n0_outputs
    st = window_statistics(wf2, x0=0.0, width=(grid.x_max - grid.x_min) * 0.98)
    assert st["P2"] == pytest.approx(1.0, abs=1e-6)
    assert st["P1"] < 1e-8 and st["P0"] < 1e-8


def test_window_poisson_for_full_coverage(n0_outputs):
    grid, wf1, wf2, wf3 = n0_outputs
    state = coherent_output(np.sqrt(0.5), wf1, wf2, wf3)
    st = window_statistics(state, x0=0.0, width=(grid.x_max - grid.x_min) * 0.98)
    nbar = 0.5
    assert st["P2"] == pytest.approx(np.exp(-nbar) * nbar ** 2 / 2, abs=2e-4)
    p13 = np.exp(-nbar) * (nbar + nbar ** 3 / 6)
    assert st["P1"] + st["P3"] == pytest.approx(p13, abs=5e-4)


def test_window_outside_grid_raises(n0_outputs):
    grid, wf1, _, _ = n0_outputs
    with pytest.raises(Exception):
        window_statistics(wf1, x0=grid.x_max, width=10.0)
