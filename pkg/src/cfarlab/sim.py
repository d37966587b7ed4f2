"""Multi-channel FMCW frame synthesis: point targets in circular complex Gaussian noise.

The simulator works directly in the sampled baseband domain.  Each target
contributes a 2D complex exponential whose fast-time frequency is the beat
frequency plus the Doppler shift, whose slow-time frequency is the Doppler
shift alone, and whose per-channel phase ramp follows the uniform linear
array steering vector.  Fast-time phase advances by 1/f_s per sample (the
sample period), so target range maps onto DFT bins the way the chirp
parameters imply.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

C_LIGHT = 299_792_458.0

# Mean noiseless power assumed for an empty scene, so that snr_db remains
# well-defined when there are no targets to measure against.
EMPTY_SCENE_REFERENCE_POWER = 1.0

# SeedSequence domain tags keep the noise stream, the per-target phase
# streams and the scenario-drawing stream disjoint for a single user seed.
_NOISE_STREAM = 0x6E6F6973
_PHASE_STREAM = 0x70686173
_SCENARIO_STREAM = 0x7363656E


@dataclass(frozen=True)
class RadarParams:
    """Chirp, sampling and array geometry of one radar configuration.

    Attributes
    ----------
    f_c : float
        Chirp start frequency in Hz.
    k_slope : float
        Frequency sweep slope in Hz/s.
    b : float
        Sweep bandwidth in Hz; must equal ``k_slope * t_c``.
    f_s : float
        ADC sampling rate in samples/s.
    n, m : int
        Samples per chirp and chirps per frame.
    t_c : float
        Chirp duration in seconds.
    t_pri : float
        Chirp repetition interval in seconds (``t_pri >= t_c``).
    n_rx : int
        Number of receive channels.
    d : float
        Element spacing of the uniform linear array in metres.
    """

    f_c: float
    k_slope: float
    b: float
    f_s: float
    n: int
    m: int
    t_c: float
    t_pri: float
    n_rx: int
    d: float

    def __post_init__(self):
        if self.n < 4 or self.m < 4:
            raise ConfigurationError("need at least 4 samples per chirp and 4 chirps")
        if self.n_rx < 1:
            raise ConfigurationError("need at least one receive channel")
        if abs(self.b - self.k_slope * self.t_c) > 1e-6 * abs(self.b):
            raise ConfigurationError(
                f"bandwidth {self.b:g} inconsistent with k_slope*t_c = "
                f"{self.k_slope * self.t_c:g}"
            )
        if self.t_pri < self.t_c:
            raise ConfigurationError("t_pri must be at least the chirp duration")
        if self.f_c <= 0 or self.f_s <= 0 or self.k_slope <= 0:
            raise ConfigurationError("f_c, f_s and k_slope must be positive")

    @property
    def wavelength(self):
        return C_LIGHT / self.f_c

    @property
    def range_per_bin(self):
        """Range extent of one fast-time DFT bin, metres."""
        return C_LIGHT * self.f_s / (2.0 * self.k_slope * self.n)

    @property
    def velocity_per_bin(self):
        """Radial velocity extent of one Doppler bin, m/s."""
        return self.wavelength / (2.0 * self.m * self.t_pri)

    @property
    def max_range(self):
        """Upper end of the valid target range interval (half the beat-aliasing limit)."""
        return 0.5 * self.f_s * C_LIGHT / (2.0 * self.k_slope)

    @property
    def max_velocity(self):
        """Magnitude bound of unambiguous radial velocity, m/s."""
        return self.wavelength / (4.0 * self.t_pri)

    def beat_frequency(self, range_m):
        return 2.0 * self.k_slope * range_m / C_LIGHT

    def doppler_frequency(self, velocity_mps):
        return 2.0 * velocity_mps * self.f_c / C_LIGHT


def table1_params(n_rx=4, t_pri=30e-6):
    """Radar configuration used throughout the simulation experiments.

    77 GHz start frequency, 120.023 MHz/us slope, 3.413 GHz bandwidth,
    9 Msps sampling, 256 samples per chirp and 128 chirps per frame.  The
    repetition interval is not part of the published set; 30 us leaves a
    small idle gap after the 28.4 us chirp.
    """
    f_c = 77e9
    k_slope = 120.023e12
    b = 3.413e9
    return RadarParams(
        f_c=f_c,
        k_slope=k_slope,
        b=b,
        f_s=9e6,
        n=256,
        m=128,
        t_c=b / k_slope,
        t_pri=t_pri,
        n_rx=n_rx,
        d=0.5 * C_LIGHT / f_c,
    )


@dataclass(frozen=True)
class TargetTruth:
    """Ground-truth description of one point target."""

    range_m: float
    velocity_mps: float
    angle_rad: float
    amplitude: float = 1.0

    def validate(self, params):
        if not 0.0 < self.range_m < params.max_range:
            raise ConfigurationError(
                f"target range {self.range_m:g} m outside (0, {params.max_range:g})"
            )
        if abs(self.velocity_mps) >= params.max_velocity:
            raise ConfigurationError(
                f"target velocity {self.velocity_mps:g} m/s outside "
                f"+-{params.max_velocity:g}"
            )
        if abs(self.angle_rad) >= math.pi / 2:
            raise ConfigurationError("target angle must lie strictly inside +-pi/2")


@dataclass(frozen=True)
class Scenario:
    """A radar frame specification: parameters, targets, noise level, seed."""

    params: RadarParams
    targets: tuple = ()
    noise_var: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        if self.noise_var < 0:
            raise ConfigurationError("noise variance must be nonnegative")
        for tgt in self.targets:
            tgt.validate(self.params)


@dataclass
class DataCube:
    """Complex baseband samples, shaped (n, m, n_rx) = fast x slow x channel."""

    data: np.ndarray
    params: RadarParams


def _target_phase(seed, target):
    """Initial phase of one target, derived from the seed and the target itself.

    Tying the phase to the target's own parameters (rather than its position
    in the target list) makes noiseless scenes compose linearly: the same
    target synthesized in different scenarios with the same seed contributes
    an identical waveform.
    """
    bits = np.array(
        [target.range_m, target.velocity_mps, target.angle_rad, target.amplitude],
        dtype=np.float64,
    ).view(np.uint64)
    ss = np.random.SeedSequence([int(seed), _PHASE_STREAM, *map(int, bits)])
    return np.random.default_rng(ss).uniform(0.0, 2.0 * math.pi)


def synthesize_cube(scenario):
    """Generate one radar frame for the given scenario.

    Returns a :class:`DataCube` whose element ``[n, m, l]`` is the sum over
    targets of

    ``A_k * exp(j*2*pi*((f_b + f_d)*n/f_s + f_d*m*t_pri) + j*phi_k)
         * exp(-j*2*pi*l*d*sin(theta_k)/wavelength)``

    plus i.i.d. circular complex Gaussian noise of variance ``noise_var``.
    Bit-identical output for a fixed scenario and seed.
    """
    p = scenario.params
    n_idx = np.arange(p.n)
    m_idx = np.arange(p.m)
    l_idx = np.arange(p.n_rx)

    cube = np.zeros((p.n, p.m, p.n_rx), dtype=np.complex128)
    for tgt in scenario.targets:
        f_b = p.beat_frequency(tgt.range_m)
        f_d = p.doppler_frequency(tgt.velocity_mps)
        phi = _target_phase(scenario.seed, tgt)
        fast = np.exp(2j * math.pi * (f_b + f_d) * n_idx / p.f_s)
        slow = np.exp(2j * math.pi * f_d * p.t_pri * m_idx)
        steer = np.exp(-2j * math.pi * l_idx * p.d * math.sin(tgt.angle_rad) / p.wavelength)
        cube += (tgt.amplitude * np.exp(1j * phi)) * np.einsum(
            "n,m,l->nml", fast, slow, steer
        )

    if scenario.noise_var > 0:
        rng = np.random.default_rng(np.random.SeedSequence([int(scenario.seed), _NOISE_STREAM]))
        sigma = math.sqrt(scenario.noise_var / 2.0)
        noise = rng.standard_normal(cube.shape) + 1j * rng.standard_normal(cube.shape)
        cube += sigma * noise

    return DataCube(cube, p)


def random_scenario(params, n_targets, snr_db, stationary_fraction_max=0.5, seed=0):
    """Draw a random multi-target scene and set the noise power from the SNR.

    Targets are uniform over the valid range, velocity and angle intervals
    with unit amplitude, redrawn as needed so every target occupies its own
    range-Doppler cell (coincident point targets are unresolvable, and the
    cell capacity bound below assumes distinct cells).  A uniformly drawn
    number of targets, up to ``floor(stationary_fraction_max * n_targets)``,
    is forced to zero velocity.  The noise variance is chosen so that the
    mean noiseless sample power of the synthesized frame divided by
    ``noise_var`` equals the linear SNR; an empty scene falls back to the
    unit reference power.
    """
    if n_targets < 0:
        raise ConfigurationError("n_targets must be nonnegative")
    if not 0.0 <= stationary_fraction_max <= 1.0:
        raise ConfigurationError("stationary_fraction_max must lie in [0, 1]")
    if n_targets > params.n * params.m:
        raise ConfigurationError(
            f"{n_targets} targets exceed the {params.n * params.m} distinct cells"
        )

    rng = np.random.default_rng(np.random.SeedSequence([int(seed), _SCENARIO_STREAM]))
    tiny = 1e-9

    max_stationary = int(math.floor(stationary_fraction_max * n_targets))
    n_stationary = int(rng.integers(0, max_stationary + 1)) if max_stationary > 0 else 0
    stationary = (
        set(map(int, rng.choice(n_targets, size=n_stationary, replace=False)))
        if n_stationary > 0
        else set()
    )

    taken = set()
    targets = []
    for k in range(n_targets):
        for _ in range(10_000):
            range_m = float(rng.uniform(tiny * params.max_range, (1.0 - tiny) * params.max_range))
            if k in stationary:
                velocity = 0.0
            else:
                velocity = float(
                    rng.uniform(
                        -(1.0 - tiny) * params.max_velocity, (1.0 - tiny) * params.max_velocity
                    )
                )
            angle = float(rng.uniform(-(1.0 - tiny) * math.pi / 2, (1.0 - tiny) * math.pi / 2))
            cell = (
                int(round(range_m / params.range_per_bin)) % params.n,
                int(round(velocity / params.velocity_per_bin)) % params.m,
            )
            if cell not in taken:
                break
        else:
            raise ConfigurationError("could not place all targets in distinct cells")
        taken.add(cell)
        targets.append(TargetTruth(range_m=range_m, velocity_mps=velocity, angle_rad=angle))
    targets = tuple(targets)

    if targets:
        clean = synthesize_cube(Scenario(params, targets, noise_var=0.0, seed=seed))
        mean_power = float(np.mean(np.abs(clean.data) ** 2))
    else:
        mean_power = EMPTY_SCENE_REFERENCE_POWER
    noise_var = mean_power / 10.0 ** (snr_db / 10.0)

    return Scenario(params=params, targets=targets, noise_var=noise_var, seed=seed)
