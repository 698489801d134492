"""Statistical OFDMA channel generation.

Multipath taps are drawn per user, turned into per-subcarrier frequency
responses, scaled by distance path loss, and normalized by the thermal
noise power of one subchannel.  All randomness flows through an explicit
numpy Generator, so realizations are reproducible and safe to draw
concurrently from independent trials.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError

#: Thermal noise floor, -174 dBm/Hz expressed in W/Hz.
THERMAL_NOISE_DENSITY_W_HZ = 10.0 ** (-174.0 / 10.0) * 1e-3

#: Minimum user distance from the base station in meters.  Uniform-in-disc
#: placement otherwise allows d -> 0 and unbounded gain.
MIN_USER_DISTANCE_M = 10.0

TAP_PROFILES = ("equal", "exponential")


@dataclass(frozen=True)
class TapSet:
    """One multipath channel impulse response: L delayed complex taps."""

    amplitudes: np.ndarray  # complex, shape (L,)
    delays: np.ndarray      # seconds, sorted ascending, shape (L,)
    powers: np.ndarray      # per-tap variances, sum to 1, shape (L,)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        delays = np.asarray(self.delays, dtype=float)
        powers = np.asarray(self.powers, dtype=float)
        if not (amps.shape == delays.shape == powers.shape) or amps.ndim != 1:
            raise InvalidParameterError("amplitudes, delays and powers must share one shape (L,)")
        if amps.size < 1:
            raise InvalidParameterError("a TapSet needs at least one tap")
        if np.any(delays < 0):
            raise InvalidParameterError("tap delays must be nonnegative")
        if np.any(powers < 0):
            raise InvalidParameterError("tap powers must be nonnegative")
        if abs(powers.sum() - 1.0) > 1e-9:
            raise InvalidParameterError("tap powers must sum to 1 within 1e-9")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "delays", delays)
        object.__setattr__(self, "powers", powers)

    @property
    def num_taps(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True)
class SystemParams:
    """Cell- and carrier-level configuration of one OFDMA downlink."""

    n_subcarriers: int
    n_users: int
    total_bandwidth: float          # Hz
    noise_density: float = THERMAL_NOISE_DENSITY_W_HZ  # W/Hz
    cell_radius: float = 1000.0     # m
    pathloss_exponent: float = 4.0
    tau_max: float = 2.5e-6         # s
    num_taps: int = 10
    min_distance: float = MIN_USER_DISTANCE_M

    def __post_init__(self):
        if self.n_users < 1 or self.n_subcarriers < self.n_users:
            raise InvalidParameterError("need n_subcarriers >= n_users >= 1")
        if self.n_subcarriers % self.n_users != 0:
            raise InvalidParameterError("n_users must divide n_subcarriers")
        if self.total_bandwidth <= 0:
            raise InvalidParameterError("total_bandwidth must be positive")
        if self.noise_density <= 0:
            raise InvalidParameterError("noise_density must be positive")

    @property
    def subchannel_bandwidth(self) -> float:
        """Bandwidth of one subchannel, B = total_bandwidth / N."""
        return self.total_bandwidth / self.n_subcarriers

    @property
    def block_size(self) -> int:
        """Subcarriers per user, M = N / K."""
        return self.n_subcarriers // self.n_users


@dataclass(frozen=True)
class ChannelRealization:
    """One drawn channel: coefficients and normalized gains per user block."""

    coefficients: np.ndarray        # complex, shape (K, M)
    gains: np.ndarray               # delta = |h|^2 / (N0 B), shape (K, M)
    user_distances: np.ndarray      # m, shape (K,)
    assignment: np.ndarray          # subcarrier index -> user index, shape (N,)
    taps: tuple[TapSet, ...] = field(default=(), repr=False)
    params: SystemParams | None = field(default=None, repr=False)


def draw_taps(rng: np.random.Generator, num_taps: int, tau_max: float,
              profile: str = "equal") -> TapSet:
    """Draw one multipath tap set.

    Delays are i.i.d. uniform on [0, tau_max] and sorted ascending.  Tap
    powers follow the selected power-delay profile, normalized to sum to 1,
    and amplitudes are zero-mean circularly-symmetric complex Gaussian with
    the per-tap variance.
    """
    if num_taps < 1:
        raise InvalidParameterError("num_taps must be >= 1")
    if tau_max <= 0:
        raise InvalidParameterError("tau_max must be positive")
    if profile not in TAP_PROFILES:
        raise InvalidParameterError(f"unknown power-delay profile {profile!r}")

    delays = np.sort(rng.uniform(0.0, tau_max, size=num_taps))
    if profile == "equal":
        powers = np.full(num_taps, 1.0 / num_taps)
    else:
        # Exponential decay over the delay axis with rms spread tau_max/3.
        powers = np.exp(-3.0 * delays / tau_max)
        powers = powers / powers.sum()
    sigma = np.sqrt(powers / 2.0)
    amps = sigma * rng.standard_normal(num_taps) + 1j * sigma * rng.standard_normal(num_taps)
    return TapSet(amplitudes=amps, delays=delays, powers=powers)


def freq_response(taps: TapSet, frequencies) -> np.ndarray:
    """Channel coefficient at each frequency: R(f) = sum_i a_i exp(-j 2 pi f tau_i)."""
    f = np.atleast_1d(np.asarray(frequencies, dtype=float))
    if f.size == 0:
        raise InvalidParameterError("frequencies must be nonempty")
    phases = np.exp(-2j * np.pi * np.outer(f, taps.delays))
    return phases @ taps.amplitudes


def subchannel_correlation(powers, delays, freq_gap: float) -> complex:
    """Correlation between two subchannels separated by freq_gap.

    rho = sum_i sigma_i^2 exp(j 2 pi tau_i freq_gap), assuming uncorrelated
    taps and normalized powers; |rho| <= 1 with rho(0) = 1.
    """
    powers = np.asarray(powers, dtype=float)
    delays = np.asarray(delays, dtype=float)
    return complex(np.sum(powers * np.exp(2j * np.pi * delays * freq_gap)))


def correlation_magnitudes(powers, delays, freq_gaps) -> np.ndarray:
    """|rho| evaluated for a vector of frequency separations."""
    powers = np.asarray(powers, dtype=float)
    delays = np.asarray(delays, dtype=float)
    gaps = np.atleast_1d(np.asarray(freq_gaps, dtype=float))
    return np.abs(np.exp(2j * np.pi * np.outer(gaps, delays)) @ powers)


def assign_subcarriers(n_subcarriers: int, n_users: int) -> np.ndarray:
    """Fixed contiguous-block assignment: user k owns [k*M, (k+1)*M)."""
    if n_users < 1 or n_subcarriers < 1:
        raise InvalidParameterError("counts must be positive")
    if n_subcarriers % n_users != 0:
        raise InvalidParameterError("n_users must divide n_subcarriers")
    return np.repeat(np.arange(n_users), n_subcarriers // n_users)


def _draw_distance(rng: np.random.Generator, radius: float, d_min: float) -> float:
    # Uniform over the disc (pdf ~ d), rejecting the guard region d < d_min.
    while True:
        d = radius * np.sqrt(rng.uniform())
        if d >= d_min:
            return float(d)


def subcarrier_frequencies(params: SystemParams) -> np.ndarray:
    """Baseband center frequency of every subcarrier: f_n = n * B."""
    return np.arange(params.n_subcarriers) * params.subchannel_bandwidth


def realize_channel(params: SystemParams, rng: np.random.Generator,
                    profile: str = "equal") -> ChannelRealization:
    """Draw one full channel realization for every user.

    Per user: a fresh tap set, a position uniform over the cell disc
    (d >= min_distance), path loss d^-xi applied to |h|^2, and the
    normalized gain delta = |h|^2 / (N0 B) over that user's contiguous
    subcarrier block.
    """
    K, M = params.n_users, params.block_size
    bw = params.subchannel_bandwidth
    freqs = subcarrier_frequencies(params)
    assignment = assign_subcarriers(params.n_subcarriers, params.n_users)

    coeffs = np.empty((K, M), dtype=complex)
    gains = np.empty((K, M), dtype=float)
    distances = np.empty(K, dtype=float)
    tap_sets = []
    noise_power = params.noise_density * bw
    for k in range(K):
        while True:
            taps = draw_taps(rng, params.num_taps, params.tau_max, profile)
            d = _draw_distance(rng, params.cell_radius, params.min_distance)
            h = freq_response(taps, freqs[k * M:(k + 1) * M])
            h = h * d ** (-params.pathloss_exponent / 2.0)
            g = np.abs(h) ** 2 / noise_power
            if np.all(g > 0):
                break
        coeffs[k] = h
        gains[k] = g
        distances[k] = d
        tap_sets.append(taps)
    return ChannelRealization(coefficients=coeffs, gains=gains,
                              user_distances=distances, assignment=assignment,
                              taps=tuple(tap_sets), params=params)
