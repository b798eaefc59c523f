"""Shared domain types: emitter arrays, pulses, grids, config parsing.

Everything is dimensionless in units of the chiral decay rate Gamma and
the group velocity (v_g = 1), so lengths and times are interchangeable.
All types are immutable after construction and safe to share between
workers.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np
import yaml


class ConfigError(ValueError):
    """Malformed config document (syntax or structure)."""


class ValidationError(ValueError):
    """A domain invariant is violated; the message names the invariant."""


# ---------------------------------------------------------------------------
# Emitters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EmitterArray:
    """N two-level emitters coupled to the waveguide.

    Rates are in units of Gamma of the chiral (right-propagating) channel.
    ``spacing_phase`` is k0*d per neighbour pair and only influences the
    dynamics when ``gamma_l > 0``; ``inhomogeneous_sigma`` is the standard
    deviation of the normally distributed emitter detunings, fixed per run
    by ``disorder_seed``.
    """

    n_emitters: int
    gamma_r: float = 1.0
    gamma_l: float = 0.0
    gamma_0: float = 0.0
    spacing_phase: float = 0.0
    inhomogeneous_sigma: float = 0.0
    disorder_seed: int = 0

    def __post_init__(self):
        if self.n_emitters < 0:
            raise ValidationError("n_emitters >= 0 violated")
        if self.gamma_r <= 0:
            raise ValidationError("gamma_r > 0 violated")
        if self.gamma_l < 0 or self.gamma_0 < 0:
            raise ValidationError("all rates >= 0 violated")
        if self.inhomogeneous_sigma < 0:
            raise ValidationError("inhomogeneous_sigma >= 0 violated")

    @property
    def beta(self) -> float:
        """Fraction of emission into the chiral channel, Gamma_R/(Gamma_R+Gamma_0)."""
        return self.gamma_r / (self.gamma_r + self.gamma_0)

    @property
    def gamma_tot(self) -> float:
        return self.gamma_r + self.gamma_l + self.gamma_0

    def detunings(self) -> np.ndarray:
        """Per-emitter detunings, deterministic in disorder_seed."""
        rng = np.random.Generator(np.random.PCG64(self.disorder_seed))
        return self.inhomogeneous_sigma * rng.standard_normal(self.n_emitters)

    def positions(self) -> np.ndarray:
        """Emitter positions in units where k0*d = spacing_phase (k0 := 1)."""
        return self.spacing_phase * np.arange(self.n_emitters)


# ---------------------------------------------------------------------------
# Pulses
# ---------------------------------------------------------------------------

PULSE_SHAPES = ("gaussian", "sech", "custom")
AMPLITUDE_KINDS = ("fock", "coherent")


@dataclass(frozen=True)
class PulseSpec:
    """Input field: shape, width sigma (v_g = 1 so length = time), carrier
    detuning k0, and photon content.

    ``fock`` pulses carry exactly ``n`` photons in the normalized mode;
    ``coherent`` pulses have amplitude alpha = sqrt(mean_n).
    """

    shape: str = "gaussian"
    sigma: float = 1.0
    detuning: float = 0.0
    amplitude_kind: str = "fock"
    n: float = 1.0
    custom_samples: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.shape not in PULSE_SHAPES:
            raise ValidationError(f"shape in {PULSE_SHAPES} violated (got {self.shape!r})")
        if self.amplitude_kind not in AMPLITUDE_KINDS:
            raise ValidationError(f"amplitude_kind in {AMPLITUDE_KINDS} violated")
        if self.sigma <= 0:
            raise ValidationError("sigma > 0 violated")
        if self.n < 0:
            raise ValidationError("photon number >= 0 violated")
        if self.shape == "custom" and self.custom_samples is None:
            raise ValidationError("custom shape requires custom_samples")

    @property
    def mean_n(self) -> float:
        return self.n

    @property
    def alpha(self) -> float:
        if self.amplitude_kind != "coherent":
            raise ValidationError("alpha defined only for coherent pulses")
        return float(np.sqrt(self.n))


# ---------------------------------------------------------------------------
# Spatial grid and its conjugate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Grid:
    """Uniform grid on [x_min, x_max) with the conjugate FFT wavenumber grid.

    dk * dx * n_points = 2*pi exactly.  ``k`` is kept in FFT (unshifted)
    order so multiplication in k-space composes directly with fft/ifft.
    """

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if self.x_max <= self.x_min:
            raise ValidationError("x_max > x_min violated")
        if self.n_points < 2:
            raise ValidationError("n_points >= 2 violated")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def k(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)

    @property
    def dk(self) -> float:
        return 2.0 * np.pi / (self.n_points * self.dx)

    # -- continuum Fourier transform pairs on the grid ---------------------
    # fwd(f)(k) ~ integral f(x) exp(-i k x) dx
    # inv(F)(x) ~ (1/2pi) integral F(k) exp(+i k x) dk
    # inv(fwd(f)) == f to machine precision.

    def fwd(self, f: np.ndarray, axis: int = -1) -> np.ndarray:
        phase = np.exp(-1j * self.k * self.x_min)
        out = np.fft.fft(f, axis=axis) * self.dx
        return out * _along(phase, f.ndim, axis)

    def inv(self, F: np.ndarray, axis: int = -1, x_shift: float = 0.0) -> np.ndarray:
        """Inverse transform; x_shift evaluates the result at x + x_shift."""
        phase = np.exp(1j * self.k * (self.x_min + x_shift))
        return np.fft.ifft(F * _along(phase, F.ndim, axis), axis=axis) / self.dx


def _along(vec: np.ndarray, ndim: int, axis: int) -> np.ndarray:
    """Reshape a 1D vector for broadcasting along `axis` of an ndim array."""
    shape = [1] * ndim
    shape[axis % ndim] = vec.size
    return vec.reshape(shape)


def default_grid(sigma: float, n_emitters: int, gamma: float = 1.0,
                 points_cap: int = 1 << 14) -> Grid:
    """Default grid: x in [-8 sigma - 6 N/Gamma, +8 sigma], dx <= min(sigma, 1/Gamma)/16.

    Delays push pulses to negative x in the comoving frame, hence the
    asymmetric extent.  n_points rounds up to a power of two (capped).
    """
    x_min = -8.0 * sigma - 6.0 * n_emitters / gamma
    x_max = 8.0 * sigma
    dx_target = min(sigma, 1.0 / gamma) / 16.0
    n = 1 << int(np.ceil(np.log2((x_max - x_min) / dx_target)))
    n = min(max(n, 2), points_cap)
    return Grid(x_min, x_max, n)


# ---------------------------------------------------------------------------
# Mode functions
# ---------------------------------------------------------------------------

def gaussian_mode(pulse: PulseSpec, grid: Grid, center: float = 0.0,
                  leak_tol: float = 1e-8) -> np.ndarray:
    """Discretized Gaussian mode E(x) = exp(i k0 x - (x-c)^2/(2 sigma^2)) / (sqrt(sigma) pi^(1/4)).

    Normalized so sum |E|^2 dx = 1 within 1e-10.  Raises if more than
    ``leak_tol`` of the mode mass lies outside the grid.
    """
    if pulse.shape != "gaussian":
        raise ValidationError("gaussian_mode requires shape == 'gaussian'")
    x = grid.x
    sig = pulse.sigma
    amp = np.exp(1j * pulse.detuning * x - (x - center) ** 2 / (2.0 * sig ** 2))
    amp = amp / (np.sqrt(sig) * np.pi ** 0.25)
    mass = np.sum(np.abs(amp) ** 2) * grid.dx
    if abs(mass - 1.0) > leak_tol:
        raise ValidationError(
            f"grid too narrow for mode: captured mass {mass:.12f} (tol {leak_tol:g})")
    return amp


def sech_mode(pulse: PulseSpec, grid: Grid, center: float = 0.0,
              gamma: float = 1.0) -> np.ndarray:
    """Solitonic mode: unit-norm sech envelope of the SIT fundamental soliton.

    The physical drive (n_bar sqrt(Gamma)/2) sech(n_bar Gamma x / 2) equals
    sqrt(n_bar) times this mode.
    """
    if pulse.shape != "sech":
        raise ValidationError("sech_mode requires shape == 'sech'")
    nbar = pulse.n
    c = nbar * gamma / 2.0
    x = grid.x
    amp = np.sqrt(c / 2.0) / np.cosh(c * (x - center)) * np.exp(1j * pulse.detuning * x)
    return amp


def mode_amplitudes(pulse: PulseSpec, grid: Grid, center: float = 0.0) -> np.ndarray:
    """Unit-norm single-photon mode for any supported pulse shape."""
    if pulse.shape == "gaussian":
        return gaussian_mode(pulse, grid, center=center)
    if pulse.shape == "sech":
        return sech_mode(pulse, grid, center=center)
    samples = np.asarray(pulse.custom_samples, dtype=complex)
    if samples.shape != grid.x.shape:
        raise ValidationError("custom_samples must match grid.n_points")
    norm = np.sqrt(np.sum(np.abs(samples) ** 2) * grid.dx)
    if norm == 0:
        raise ValidationError("custom_samples must not be all zero")
    return samples / norm


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------

ENGINES = ("scatter", "mps-master", "mps-trajectories", "meanfield", "boundstates")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run description (all defaults made explicit)."""

    engine: str
    emitters: EmitterArray
    pulse: PulseSpec
    grid: Grid
    truncation_order: int = 3
    seed: int = 0
    n_trajectories: int = 200
    d_max: int = 150
    truncation_tol: float = 1e-7
    dt: Optional[float] = None
    output_dir: str = "out"

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ValidationError(f"engine in {ENGINES} violated (got {self.engine!r})")
        if not 1 <= self.truncation_order <= 3:
            raise ValidationError("truncation_order in [1, 3] violated")
        if self.d_max < 1:
            raise ValidationError("d_max >= 1 violated")
        if self.n_trajectories < 1:
            raise ValidationError("n_trajectories >= 1 violated")

    def to_dict(self) -> dict:
        d = {
            "engine": self.engine,
            "emitters": asdict(self.emitters),
            "pulse": {k: v for k, v in asdict(self.pulse).items()
                      if k != "custom_samples"},
            "grid": asdict(self.grid),
            "run": {
                "truncation_order": self.truncation_order,
                "seed": self.seed,
                "n_trajectories": self.n_trajectories,
                "d_max": self.d_max,
                "truncation_tol": self.truncation_tol,
                "dt": self.dt,
                "output_dir": self.output_dir,
            },
        }
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def parse_config(text: str) -> RunConfig:
    """Parse a YAML config document into a validated RunConfig.

    Unknown keys raise; missing sections are filled with defaults that
    are echoed back by serialize_config / RunConfig.to_json.
    """
    try:
        raw = yaml.safe_load(io.StringIO(text))
    except yaml.YAMLError as exc:  # surface line/column info
        mark = getattr(exc, "problem_mark", None)
        loc = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError(f"config parse error{loc}: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")

    known = {"engine", "emitters", "pulse", "grid", "run"}
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"unknown top-level config keys: {sorted(extra)}")

    def section(name):
        sec = raw.get(name, {}) or {}
        if not isinstance(sec, dict):
            raise ConfigError(f"section {name!r} must be a mapping")
        return dict(sec)

    em = section("emitters")
    _check_keys("emitters", em, {"n_emitters", "gamma_r", "gamma_l", "gamma_0",
                                 "spacing_phase", "inhomogeneous_sigma", "disorder_seed"})
    emitters = EmitterArray(
        n_emitters=int(em.get("n_emitters", 1)),
        gamma_r=float(em.get("gamma_r", 1.0)),
        gamma_l=float(em.get("gamma_l", 0.0)),
        gamma_0=float(em.get("gamma_0", 0.0)),
        spacing_phase=float(em.get("spacing_phase", 0.0)),
        inhomogeneous_sigma=float(em.get("inhomogeneous_sigma", 0.0)),
        disorder_seed=int(em.get("disorder_seed", 0)),
    )

    pu = section("pulse")
    _check_keys("pulse", pu, {"shape", "sigma", "detuning", "amplitude_kind", "n", "mean_n"})
    if "n" in pu and "mean_n" in pu:
        raise ConfigError("pulse: give exactly one of n / mean_n")
    nval = pu.get("n", pu.get("mean_n", 1.0))
    pulse = PulseSpec(
        shape=str(pu.get("shape", "gaussian")),
        sigma=float(pu.get("sigma", 1.0)),
        detuning=float(pu.get("detuning", 0.0)),
        amplitude_kind=str(pu.get("amplitude_kind",
                                  "coherent" if "mean_n" in pu else "fock")),
        n=float(nval),
    )

    gr = section("grid")
    _check_keys("grid", gr, {"x_min", "x_max", "n_points"})
    if gr:
        if not {"x_min", "x_max", "n_points"} <= set(gr):
            raise ConfigError("grid section requires x_min, x_max and n_points")
        grid = Grid(float(gr["x_min"]), float(gr["x_max"]), int(gr["n_points"]))
    else:
        grid = default_grid(pulse.sigma, emitters.n_emitters, emitters.gamma_r)

    ru = section("run")
    _check_keys("run", ru, {"truncation_order", "seed", "n_trajectories", "d_max",
                            "truncation_tol", "dt", "output_dir"})
    return RunConfig(
        engine=str(raw.get("engine", "scatter")),
        emitters=emitters,
        pulse=pulse,
        grid=grid,
        truncation_order=int(ru.get("truncation_order", 3)),
        seed=int(ru.get("seed", 0)),
        n_trajectories=int(ru.get("n_trajectories", 200)),
        d_max=int(ru.get("d_max", 150)),
        truncation_tol=float(ru.get("truncation_tol", 1e-7)),
        dt=None if ru.get("dt") is None else float(ru["dt"]),
        output_dir=str(ru.get("output_dir", "out")),
    )


def _check_keys(name: str, sec: dict, allowed: set):
    extra = set(sec) - allowed
    if extra:
        raise ConfigError(f"unknown keys in section {name!r}: {sorted(extra)}")


def serialize_config(cfg: RunConfig) -> str:
    """YAML round-trip partner of parse_config (identity on all fields)."""
    return yaml.safe_dump(cfg.to_dict(), sort_keys=True)
