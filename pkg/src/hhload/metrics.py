"""Summary statistics and the analytic complexity predictor."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import TapSet, correlation_magnitudes
from .errors import DegenerateRangeError, InvalidParameterError
from .grouping import GroupPartition


@dataclass
class MetricsSummary:
    """Averaged results for one (algorithm, parameter, sweep-point) cell."""

    scenario_id: str
    algorithm: str
    param: float | int | None
    n_subcarriers: int
    tau_max_us: float
    trials: int
    avg_capacity_bps_hz: float | None = None
    std_capacity: float | None = None
    avg_iterations: float | None = None
    std_iterations: float | None = None
    avg_groups: float | None = None
    avg_group_corr: float | None = None
    zeta: float | None = None


@dataclass(frozen=True)
class TradeoffInputs:
    """One (capacity, iterations) cell plus the grid-wide extrema."""

    capacity: float
    iterations: float
    c_min: float
    c_max: float
    i_min: float
    i_max: float

    def __post_init__(self):
        if not (self.c_min <= self.capacity <= self.c_max):
            raise InvalidParameterError("capacity must lie inside [c_min, c_max]")
        if not (self.i_min <= self.iterations <= self.i_max):
            raise InvalidParameterError("iterations must lie inside [i_min, i_max]")


def spectral_efficiency(total_bits: float, n_subcarriers: int) -> float:
    """Bits loaded in one OFDMA symbol divided by the subchannel count."""
    if n_subcarriers < 1:
        raise InvalidParameterError("n_subcarriers must be >= 1")
    return total_bits / n_subcarriers


def tradeoff_factor(inputs: TradeoffInputs) -> float:
    """50/50 blend of normalized capacity gain and iteration reduction.

    zeta = (1 + (C - Cmin)/(Cmax - Cmin) - (I - Imin)/(Imax - Imin)) / 2,
    so 1 is the best balance and 0 the worst.
    """
    c_span = inputs.c_max - inputs.c_min
    i_span = inputs.i_max - inputs.i_min
    if c_span <= 0 or i_span <= 0:
        raise DegenerateRangeError("capacity or iteration range is degenerate")
    c_norm = (inputs.capacity - inputs.c_min) / c_span
    i_norm = (inputs.iterations - inputs.i_min) / i_span
    return 0.5 * (1.0 + c_norm - i_norm)


def predicted_runtime(n_subcarriers: int) -> float:
    """Closed-form running-time model N^2 log2 N + 2 N^2 + 5 N."""
    n = n_subcarriers
    if n < 1:
        raise InvalidParameterError("n_subcarriers must be >= 1")
    return n * n * np.log2(n) + 2.0 * n * n + 5.0 * n


def group_correlation(partition: GroupPartition, taps: TapSet, frequencies,
                      all_pairs: bool = False) -> float:
    """Average |rho| between grouped subcarriers, weighted by group size.

    Default pairs every member with its group leader (singletons contribute
    1); ``all_pairs`` averages over all unordered member pairs instead.
    """
    f = np.asarray(frequencies, dtype=float)
    if f.size != partition.total_members:
        raise InvalidParameterError("frequencies must cover every partition member")
    total = 0.0
    weight = 0
    for start, count in zip(partition.boundaries, partition.member_counts):
        members = f[start:start + count]
        if count == 1:
            mean = 1.0
        elif all_pairs:
            gaps = members[None, :] - members[:, None]
            mags = correlation_magnitudes(taps.powers, taps.delays, gaps.ravel())
            iu = np.triu_indices(count, k=1)
            mean = float(mags.reshape(count, count)[iu].mean())
        else:
            gaps = members - members[0]
            mean = float(correlation_magnitudes(taps.powers, taps.delays, gaps).mean())
        total += mean * count
        weight += count
    return total / weight
