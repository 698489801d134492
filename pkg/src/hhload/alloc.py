"""Bit and power allocators over one user's gain vector.

The allocator family: uniform power (EQ), continuous water-filling (WF),
greedy discrete bit loading (HH), the water-filling warm start (HH-WF) and
the batched variant that loads one bit on each of the kappa cheapest
subchannels per pass (HH-K).  Every run carries an operation ledger with
a linear-scan cost model: scanning M candidates charges 2M
comparison-equivalent additions, and an allocation adds one accumulation
plus one multiply and one exponentiation for the cost update.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np

from .errors import InvalidParameterError


@dataclass
class OpLedger:
    """Tally of arithmetic operations executed by one allocator run."""

    additions: int = 0
    subtractions: int = 0
    multiplications: int = 0
    divisions: int = 0
    exponentiations: int = 0
    logarithms: int = 0
    comparisons_in_search: int = 0

    def __add__(self, other: "OpLedger") -> "OpLedger":
        return OpLedger(*(a + b for a, b in zip(self._astuple(), other._astuple())))

    def scaled(self, n: int) -> "OpLedger":
        return OpLedger(*(n * v for v in self._astuple()))

    def _astuple(self):
        return (self.additions, self.subtractions, self.multiplications,
                self.divisions, self.exponentiations, self.logarithms,
                self.comparisons_in_search)


@dataclass(frozen=True)
class GainVector:
    """Normalized gains plus the SNR gap and power budget they share."""

    gains: np.ndarray      # delta_i > 0, 1/W
    snr_gap: float         # Gamma >= 1
    power_budget: float    # P_max > 0, W

    def __post_init__(self):
        g = np.atleast_1d(np.asarray(self.gains, dtype=float))
        if g.size == 0:
            raise InvalidParameterError("gain vector must be nonempty")
        if np.any(g <= 0) or not np.all(np.isfinite(g)):
            raise InvalidParameterError("all gains must be positive and finite")
        if self.snr_gap < 1.0:
            raise InvalidParameterError("snr_gap must be >= 1")
        if self.power_budget <= 0:
            raise InvalidParameterError("power_budget must be positive")
        object.__setattr__(self, "gains", g)

    @property
    def size(self) -> int:
        return self.gains.size


@dataclass
class AllocationResult:
    """Outcome of one allocator run.

    Discrete loaders fill ``bits`` and charge ``powers`` as the accumulated
    incremental costs; the continuous bounds (EQ, WF) leave ``bits`` empty
    and report ``continuous_capacity`` instead.
    """

    bits: np.ndarray
    powers: np.ndarray
    iterations: int
    ledger: OpLedger = field(default_factory=OpLedger)
    continuous_capacity: float | None = None

    @property
    def total_bits(self) -> int:
        return int(self.bits.sum()) if self.bits.size else 0


@dataclass(frozen=True)
class PredictedOps:
    """Reference operation counts for a greedy run of a given length."""

    group1: OpLedger
    per_iteration: OpLedger
    iterations: int

    def totals(self) -> OpLedger:
        return self.group1 + self.per_iteration.scaled(self.iterations)


def snr_gap_from_ber(ber: float) -> float:
    """QAM SNR-gap approximation: Gamma = (1/3) [Qinv(BER/4)]^2."""
    if not 0 < ber < 1:
        raise InvalidParameterError("ber must lie in (0, 1)")
    q = -NormalDist().inv_cdf(ber / 4.0)
    return max(1.0, q * q / 3.0)


def capacity(powers, gains: GainVector) -> float:
    """Total rate in bits: sum log2(1 + p_i delta_i / Gamma)."""
    p = np.atleast_1d(np.asarray(powers, dtype=float))
    if p.shape != gains.gains.shape:
        raise InvalidParameterError("powers and gains must have equal length")
    if np.any(p < 0):
        raise InvalidParameterError("powers must be nonnegative")
    return float(np.sum(np.log2(1.0 + p * gains.gains / gains.snr_gap)))


def incremental_cost(current_bits: int, gain: float, gap: float) -> float:
    """Energy for the next bit on a subchannel holding ``current_bits``: 2^b Gamma/delta."""
    if current_bits < 0:
        raise InvalidParameterError("current_bits must be nonnegative")
    if gain <= 0:
        raise InvalidParameterError("gain must be positive")
    return (2.0 ** current_bits) * gap / gain


def equal_power(gains: GainVector) -> AllocationResult:
    """Uniform power split P_max / M; a continuous lower-bound curve."""
    m = gains.size
    powers = np.full(m, gains.power_budget / m)
    return AllocationResult(bits=np.zeros(0, dtype=np.int64), powers=powers,
                            iterations=0,
                            continuous_capacity=capacity(powers, gains))


def waterfill(gains: GainVector) -> AllocationResult:
    """Continuous optimum: p_i = level - Gamma/delta_i over the active set.

    Subchannels whose power would be negative are removed and the water
    level recomputed over the survivors until all active powers are
    nonnegative.  At least one subchannel always survives.
    """
    inv = gains.snr_gap / gains.gains
    active = np.ones(gains.size, dtype=bool)
    rounds = 0
    while True:
        rounds += 1
        level = (gains.power_budget + inv[active].sum()) / active.sum()
        p = level - inv
        drop = active & (p < 0)
        if not drop.any():
            break
        active &= ~drop
    powers = np.where(active, np.maximum(level - inv, 0.0), 0.0)
    return AllocationResult(bits=np.zeros(0, dtype=np.int64), powers=powers,
                            iterations=rounds,
                            continuous_capacity=capacity(powers, gains))


def wf_initial_bits(gains: GainVector) -> np.ndarray:
    """Warm-start bit vector: floor of the water-filling rates per subchannel."""
    wf = waterfill(gains)
    x = wf.powers * gains.gains / gains.snr_gap
    # 1e-9 guard absorbs float noise when log2(1+x) lands on an integer.
    bits = np.floor(np.log2(1.0 + x) + 1e-9).astype(np.int64)
    bits[wf.powers <= 0] = 0
    return np.maximum(bits, 0)


def _greedy_fill(base_costs: np.ndarray, power_budget: float, *,
                 kappa: int = 1, initial_bits: np.ndarray | None = None,
                 max_bits: int | None = None,
                 init_mults_per_entry: int = 1):
    """Shared greedy core over ``M`` search entities.

    ``base_costs[i]`` is the cost of the first bit on entity i; the cost of
    bit b+1 is base_costs[i] * 2^b.  Returns (bits, spent, iterations,
    ledger).  An infeasible warm start is repaired by removing the priciest
    already-allocated bits first; every while-loop pass, including removal
    and the terminating scan, counts as one iteration.
    """
    base = np.asarray(base_costs, dtype=float)
    m = base.size
    ledger = OpLedger()
    ledger.multiplications += init_mults_per_entry * m
    ledger.exponentiations += m

    if initial_bits is None:
        bits = np.zeros(m, dtype=np.int64)
    else:
        bits = np.asarray(initial_bits, dtype=np.int64).copy()
        if bits.shape != base.shape:
            raise InvalidParameterError("initial_bits length must match the gain vector")
        if np.any(bits < 0):
            raise InvalidParameterError("initial_bits must be nonnegative")

    spent = float(np.sum(base * (np.exp2(bits) - 1.0)))
    iterations = 0

    while spent > power_budget:
        iterations += 1
        ledger.additions += 2 * m
        ledger.comparisons_in_search += m - 1
        last = np.where(bits > 0, base * np.exp2(bits - 1), -np.inf)
        c = int(np.argmax(last))
        bits[c] -= 1
        spent -= last[c]
        ledger.additions += 1
        ledger.multiplications += 1
        ledger.exponentiations += 1

    costs = base * np.exp2(bits)
    if max_bits is not None:
        costs[bits >= max_bits] = np.inf

    if kappa == 1:
        # Scalar scan on plain lists: the per-pass work is genuinely Theta(M)
        # element comparisons, so measured run time tracks the op ledger.
        cost_list = costs.tolist()
        base_list = base.tolist()
        bit_list = bits.tolist()
        inf = float("inf")
        while spent < power_budget:
            iterations += 1
            ledger.additions += 2 * m
            ledger.comparisons_in_search += m - 1
            c = 0
            low = cost_list[0]
            for i in range(1, m):
                if cost_list[i] < low:
                    low = cost_list[i]
                    c = i
            if low == inf or spent + low > power_budget:
                break
            b = bit_list[c] + 1
            bit_list[c] = b
            spent += low
            ledger.additions += 1
            if max_bits is not None and b >= max_bits:
                cost_list[c] = inf
            else:
                cost_list[c] = base_list[c] * 2.0 ** b
            ledger.multiplications += 1
            ledger.exponentiations += 1
        bits = np.asarray(bit_list, dtype=np.int64)
        return bits, spent, iterations, ledger

    while spent < power_budget:
        iterations += 1
        ledger.additions += 2 * m
        ledger.comparisons_in_search += m - 1
        order = np.argsort(costs, kind="stable")[:kappa]
        batch_complete = True
        allocated = 0
        for c in order:
            c = int(c)
            if not np.isfinite(costs[c]) or spent + costs[c] > power_budget:
                batch_complete = False
                break
            bits[c] += 1
            spent += costs[c]
            allocated += 1
            ledger.additions += 1
            if max_bits is not None and bits[c] >= max_bits:
                costs[c] = np.inf
            else:
                costs[c] = base[c] * 2.0 ** bits[c]
            ledger.multiplications += 1
            ledger.exponentiations += 1
        if allocated == 0 or not batch_complete:
            break
    return bits, spent, iterations, ledger


def hh_allocate(gains: GainVector, initial_bits=None, kappa: int = 1,
                max_bits: int | None = None) -> AllocationResult:
    """Greedy bit loading: repeatedly fund the cheapest next bit.

    With no warm start and kappa=1 this is the classic one-bit-per-pass
    loop, which is optimal among integer bit vectors under the budget.
    kappa > 1 loads one bit on each of the kappa cheapest subchannels per
    pass (partial final batch admitted, then termination).  A warm start
    seeds bits and the spent power from the accumulated incremental costs.
    """
    if kappa < 1:
        raise InvalidParameterError("kappa must be >= 1")
    base = gains.snr_gap / gains.gains
    bits, _, iterations, ledger = _greedy_fill(
        base, gains.power_budget, kappa=kappa, initial_bits=initial_bits,
        max_bits=max_bits)
    powers = base * (np.exp2(bits) - 1.0)
    return AllocationResult(bits=bits, powers=powers, iterations=iterations,
                            ledger=ledger)


def ledger_predicted(n_subcarriers: int) -> PredictedOps:
    """Reference counts for a greedy run of N passes over N subchannels.

    One-time setup: N multiplications and N exponentiations for the initial
    cost table.  Each pass: 2N+1 additions, one multiplication and one
    exponentiation.
    """
    n = n_subcarriers
    if n < 0:
        raise InvalidParameterError("n_subcarriers must be nonnegative")
    if n == 0:
        return PredictedOps(OpLedger(), OpLedger(), 0)
    group1 = OpLedger(multiplications=n, exponentiations=n)
    per_it = OpLedger(additions=2 * n + 1, multiplications=1, exponentiations=1,
                      comparisons_in_search=n - 1)
    return PredictedOps(group1, per_it, n)
