"""Threshold-based contiguous subcarrier grouping and the grouped loader.

A single left-to-right pass opens a new group whenever a subcarrier's gain
in dB leaves the +-G_T window around the current group leader.  Each
group's working gain is the minimum over its members, so the grouped
allocator never overestimates a subchannel.  The greedy loop then treats
every group as one search entity: one group-level bit puts one bit on each
member at cost member_count * 2^b * Gamma / group_gain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .alloc import AllocationResult, GainVector, _greedy_fill, capacity
from .errors import InvalidParameterError


@dataclass(frozen=True)
class GroupPartition:
    """Contiguous cover of a gain vector with per-group minimum gains."""

    boundaries: np.ndarray     # start index of each group, strictly increasing
    group_gains: np.ndarray    # min member gain per group, linear scale
    member_counts: np.ndarray  # members per group

    def __post_init__(self):
        b = np.asarray(self.boundaries, dtype=np.int64)
        g = np.asarray(self.group_gains, dtype=float)
        c = np.asarray(self.member_counts, dtype=np.int64)
        if not (b.size == g.size == c.size) or b.size == 0:
            raise InvalidParameterError("partition arrays must be nonempty and equal length")
        if b[0] != 0 or np.any(np.diff(b) <= 0):
            raise InvalidParameterError("boundaries must start at 0 and strictly increase")
        if np.any(c < 1) or np.any(b[1:] != np.cumsum(c[:-1])):
            raise InvalidParameterError("member counts must tile the boundaries")
        object.__setattr__(self, "boundaries", b)
        object.__setattr__(self, "group_gains", g)
        object.__setattr__(self, "member_counts", c)

    @property
    def num_groups(self) -> int:
        return self.boundaries.size

    @property
    def total_members(self) -> int:
        return int(self.member_counts.sum())

    def expand(self, per_group: np.ndarray) -> np.ndarray:
        """Spread a per-group vector onto the member axis."""
        return np.repeat(np.asarray(per_group), self.member_counts)


@dataclass
class GroupedAllocation:
    """Grouped loader outcome: per-member result plus the partition used."""

    result: AllocationResult
    partition: GroupPartition
    group_bits: np.ndarray
    #: Rate at the pessimistic group gains the loader planned with (= total bits).
    planned_capacity: float
    #: Continuous rate of the charged powers evaluated at the true member gains.
    achieved_capacity: float


def group_subcarriers(gains, gain_threshold_db: float) -> GroupPartition:
    """Single-pass leader-anchored grouping on dB gains."""
    g = np.atleast_1d(np.asarray(gains, dtype=float))
    if g.size == 0:
        raise InvalidParameterError("gains must be nonempty")
    if gain_threshold_db <= 0:
        raise InvalidParameterError("gain_threshold_db must be positive")
    if np.any(g <= 0):
        raise InvalidParameterError("gains must be positive")

    # Amplitude-style dB of the normalized gain.  The admission window this
    # produces reproduces the reference group counts; a 10*log10 power-dB
    # window comes out twice as permissive and roughly halves the counts.
    gdb = 20.0 * np.log10(g)
    boundaries = [0]
    leader = gdb[0]
    for i in range(1, g.size):
        if abs(gdb[i] - leader) > gain_threshold_db:
            boundaries.append(i)
            leader = gdb[i]
    bounds = np.asarray(boundaries, dtype=np.int64)
    counts = np.diff(np.append(bounds, g.size))
    group_gains = np.array([g[s:s + c].min() for s, c in zip(bounds, counts)])
    return GroupPartition(boundaries=bounds, group_gains=group_gains,
                          member_counts=counts)


def hh_grp_allocate(gains: GainVector, gain_threshold_db: float,
                    kappa: int = 1) -> GroupedAllocation:
    """Greedy loading over groups instead of individual subcarriers."""
    if kappa < 1:
        raise InvalidParameterError("kappa must be >= 1")
    part = group_subcarriers(gains.gains, gain_threshold_db)
    # First-bit cost of a whole group: every member pays Gamma/group_gain.
    base = part.member_counts * gains.snr_gap / part.group_gains
    group_bits, _, iterations, ledger = _greedy_fill(
        base, gains.power_budget, kappa=kappa, init_mults_per_entry=2)

    member_bits = part.expand(group_bits)
    per_member_cost = (np.exp2(group_bits) - 1.0) * gains.snr_gap / part.group_gains
    powers = part.expand(per_member_cost)
    result = AllocationResult(bits=member_bits, powers=powers,
                              iterations=iterations, ledger=ledger)
    return GroupedAllocation(result=result, partition=part,
                             group_bits=group_bits,
                             planned_capacity=float(member_bits.sum()),
                             achieved_capacity=capacity(powers, gains))
