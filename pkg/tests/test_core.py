import numpy as np
import pytest

from wqed.core import (
    ConfigError,
    EmitterArray,
    Grid,
    PulseSpec,
    ValidationError,
    default_grid,
    gaussian_mode,
    mode_amplitudes,
    parse_config,
    serialize_config,
)

SQRT2 = np.sqrt(2.0)


def test_parse_minimal_roundtrip_values():
    text = """
engine: scatter
emitters:
  n_emitters: 20
  gamma_r: 1.0
pulse:
  shape: gaussian
  sigma: 4.242640687119285
  n: 1
"""
    cfg = parse_config(text)
    assert cfg.emitters.n_emitters == 20
    assert cfg.emitters.gamma_r == 1.0
    assert cfg.pulse.sigma == pytest.approx(3 * SQRT2)


def test_parse_rejects_zero_gamma_r():
    with pytest.raises(ValidationError, match="gamma_r"):
        parse_config("emitters: {n_emitters: 2, gamma_r: 0.0}")


def test_parse_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="unknown"):
        parse_config("emitters: {n_emitters: 2, gamma_R: 1.0}")


def test_parse_error_carries_line_info():
    with pytest.raises(ConfigError, match="line"):
        parse_config("emitters: {n_emitters: 2\npulse: [")


def test_grid_defaulting_is_observable():
    cfg = parse_config("emitters: {n_emitters: 20}\npulse: {sigma: 3.0}")
    g = cfg.grid
    assert g.x_min == pytest.approx(-8 * 3.0 - 6 * 20)
    assert g.x_max == pytest.approx(24.0)
    assert g.dx <= min(3.0, 1.0) / 16 + 1e-12
    # defaults echoed in the serialized form
    echoed = cfg.to_dict()["grid"]
    assert echoed["x_min"] == pytest.approx(g.x_min)
    assert echoed["n_points"] == g.n_points


def test_config_roundtrip_identity():
    text = """
engine: mps-master
emitters: {n_emitters: 3, gamma_r: 1.0, gamma_l: 0.1, gamma_0: 0.05,
           spacing_phase: 1.5707963267948966, inhomogeneous_sigma: 0.1,
           disorder_seed: 7}
pulse: {shape: sech, sigma: 2.0, detuning: 0.0, amplitude_kind: coherent, n: 0.5}
grid: {x_min: -50.0, x_max: 20.0, n_points: 512}
run: {truncation_order: 2, seed: 11, n_trajectories: 64, d_max: 40,
      truncation_tol: 1.0e-06, output_dir: artifacts}
"""
    cfg = parse_config(text)
    again = parse_config(serialize_config(cfg))
    assert again == cfg


def test_grid_conjugacy_roundtrip():
    g = Grid(-30.0, 10.0, 256)
    assert g.dk * g.dx * g.n_points == pytest.approx(2 * np.pi, rel=1e-14)
    rng = np.random.default_rng(3)
    f = rng.standard_normal(256) + 1j * rng.standard_normal(256)
    back = g.inv(g.fwd(f))
    assert np.max(np.abs(back - f)) < 1e-12


def test_fwd_matches_analytic_gaussian_transform():
    # FT of exp(-x^2/(2 s^2)) is s sqrt(2 pi) exp(-k^2 s^2 / 2)
    g = Grid(-40.0, 40.0, 1024)
    s = 2.0
    f = np.exp(-g.x ** 2 / (2 * s ** 2))
    F = g.fwd(f)
    expected = s * np.sqrt(2 * np.pi) * np.exp(-g.k ** 2 * s ** 2 / 2)
    assert np.max(np.abs(F - expected)) < 1e-10


def test_gaussian_mode_peak_and_norm():
    sig = 3 * SQRT2
    grid = Grid(-8 * sig, 8 * sig, 1024)
    pulse = PulseSpec(shape="gaussian", sigma=sig)
    amp = gaussian_mode(pulse, grid)
    i0 = np.argmin(np.abs(grid.x))
    assert amp[i0].imag == pytest.approx(0.0, abs=1e-12)
    assert amp[i0].real == pytest.approx(1 / (np.sqrt(sig) * np.pi ** 0.25), rel=1e-6)
    assert np.sum(np.abs(amp) ** 2) * grid.dx == pytest.approx(1.0, abs=1e-10)


def test_gaussian_mode_detuning_is_pure_phase():
    sig = 2.0
    grid = Grid(-16 * sig, 16 * sig, 2048)
    base = gaussian_mode(PulseSpec(sigma=sig), grid)
    mod = gaussian_mode(PulseSpec(sigma=sig, detuning=1.0), grid)
    assert np.allclose(np.abs(mod), np.abs(base), atol=1e-14)
    assert np.allclose(mod, base * np.exp(1j * grid.x), atol=1e-12)


def test_gaussian_mode_rejects_narrow_grid():
    pulse = PulseSpec(sigma=5.0)
    with pytest.raises(ValidationError, match="grid too narrow"):
        gaussian_mode(pulse, Grid(-6.0, 6.0, 64))


def test_sech_mode_norm():
    pulse = PulseSpec(shape="sech", sigma=1.0, n=8, amplitude_kind="coherent")
    grid = Grid(-10.0, 10.0, 2048)
    amp = mode_amplitudes(pulse, grid)
    assert np.sum(np.abs(amp) ** 2) * grid.dx == pytest.approx(1.0, abs=1e-8)


def test_disorder_determinism():
    a = EmitterArray(5, inhomogeneous_sigma=0.1, disorder_seed=42)
    b = EmitterArray(5, inhomogeneous_sigma=0.1, disorder_seed=42)
    c = EmitterArray(5, inhomogeneous_sigma=0.1, disorder_seed=43)
    assert np.array_equal(a.detunings(), b.detunings())
    assert not np.array_equal(a.detunings(), c.detunings())


def test_beta_range():
    arr = EmitterArray(2, gamma_r=1.0, gamma_0=0.25)
    assert arr.beta == pytest.approx(0.8)
    with pytest.raises(ValidationError):
        EmitterArray(2, gamma_r=-1.0)


def test_default_grid_resolution():
    g = default_grid(sigma=3 * SQRT2, n_emitters=20)
    assert g.dx <= 1.0 / 16
    assert g.n_points & (g.n_points - 1) == 0  # power of two
