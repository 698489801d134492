import numpy as np
import pytest

from hhload.alloc import GainVector


def brute_force_total_bits(base_costs, power_budget, bit_cap=12):
    """Exhaustive search over integer bit vectors within the budget.

    ``base_costs[i]`` is Gamma/delta_i.  Depth-first enumeration with a
    sound optimistic bound; independent of the greedy code path.
    """
    base = np.sort(np.asarray(base_costs, dtype=float))
    m = base.size
    best = 0

    def upper_bound(i, budget):
        total = 0
        for j in range(i, m):
            if budget < base[j]:
                break
            total += int(np.floor(np.log2(1.0 + budget / base[j])))
        return total

    def dfs(i, budget, bits):
        nonlocal best
        if bits > best:
            best = bits
        if i == m or bits + upper_bound(i, budget) <= best:
            return
        b = 0
        while b <= bit_cap:
            cost = (2.0 ** b - 1.0) * base[i]
            if cost > budget:
                break
            dfs(i + 1, budget - cost, bits + b)
            b += 1

    dfs(0, float(power_budget), 0)
    return best


def random_small_instance(rng, max_channels=8, max_total_bits=12):
    """Random GainVector sized so the optimum stays enumerable."""
    m = int(rng.integers(2, max_channels + 1))
    base = rng.uniform(0.1, 10.0, m)  # Gamma/delta_i with Gamma = 1
    target = int(rng.integers(1, max_total_bits + 1))
    # Budget near the cost of the `target` globally cheapest increments.
    increments = np.sort((base[:, None] * 2.0 ** np.arange(13)[None, :]).ravel())
    pmax = float(increments[:target].sum()) * float(rng.uniform(0.8, 1.2)) + 1e-9
    return GainVector(1.0 / base, 1.0, pmax)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
