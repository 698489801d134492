"""Greedy bit-loading and water-filling power allocation for OFDMA.

Library surface: statistical channel generation (:mod:`hhload.channel`),
the allocator family (:mod:`hhload.alloc`), subcarrier grouping
(:mod:`hhload.grouping`), summary metrics (:mod:`hhload.metrics`) and the
Monte Carlo harness (:mod:`hhload.harness`).  The ``hhload`` console
script drives reproducible experiments.
"""

from .alloc import (AllocationResult, GainVector, OpLedger, capacity,
                    equal_power, hh_allocate, incremental_cost,
                    ledger_predicted, snr_gap_from_ber, waterfill,
                    wf_initial_bits)
from .channel import (ChannelRealization, SystemParams, TapSet,
                      assign_subcarriers, draw_taps, freq_response,
                      realize_channel, subchannel_correlation)
from .errors import ConfigError, DegenerateRangeError, InvalidParameterError
from .grouping import (GroupPartition, GroupedAllocation, group_subcarriers,
                       hh_grp_allocate)
from .harness import (Scenario, dump_results, run_scenario, run_tradeoff_grid)
from .metrics import (MetricsSummary, TradeoffInputs, group_correlation,
                      predicted_runtime, spectral_efficiency, tradeoff_factor)

__version__ = "0.1.0"
