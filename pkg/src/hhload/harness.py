"""Monte Carlo experiment driver.

A Scenario bundles the system parameters, the allocator suite and the
trial plan.  Every trial derives its own generator from the master seed
via ``SeedSequence(master_seed, spawn_key=(trial,))``, draws one channel
realization, and runs every configured allocator on that same realization
(paired comparison).  Aggregation reduces trials in index order, so the
output is byte-identical regardless of how many worker processes ran.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .alloc import (GainVector, equal_power, hh_allocate, snr_gap_from_ber,
                    waterfill, wf_initial_bits)
from .channel import (SystemParams, realize_channel, subcarrier_frequencies,
                      THERMAL_NOISE_DENSITY_W_HZ)
from .errors import ConfigError, DegenerateRangeError, InvalidParameterError
from .grouping import hh_grp_allocate
from .metrics import MetricsSummary, TradeoffInputs, group_correlation, tradeoff_factor

ALGORITHMS = ("EQ", "WF", "HH", "HH-WF", "HH-K", "HH-GRP")

#: Noise density that lines up the water-filling capacity with the
#: reference level (~8.6 bits/s/Hz) at the N=1024 default scenario.  The
#: bare thermal floor puts every user ~60 dB above it; this value folds the
#: unstated receiver noise figure and margin into the one free constant.
CALIBRATED_NOISE_DENSITY_W_HZ = 2.5e-20

CSV_COLUMNS = ("scenario_id", "algorithm", "param", "n_subcarriers",
               "tau_max_us", "trials", "avg_capacity_bps_hz", "std_capacity",
               "avg_iterations", "std_iterations", "avg_groups",
               "avg_group_corr", "zeta")


@dataclass(frozen=True)
class Scenario:
    """Full experiment configuration; defaults follow the study scenario."""

    n_subcarriers: int = 1024
    n_users: int = 8
    bandwidth_hz: float = 2e6
    pmax_w: float = 10.0
    ber: float = 1e-12
    gamma: float | None = None
    pathloss_exp: float = 4.0
    cell_radius_m: float = 1000.0
    noise_density_w_hz: float = CALIBRATED_NOISE_DENSITY_W_HZ
    tau_max_s: float = 2.5e-6
    n_taps: int = 10
    trials: int = 10_000
    seed: int = 1
    algorithms: tuple[str, ...] = ALGORITHMS
    kappa_list: tuple[int, ...] = (2, 4, 8, 16)
    gt_db_list: tuple[float, ...] = (0.25, 0.5, 1.0, 5.0)
    sweep_n: tuple[int, ...] | None = None
    sweep_tau_max_s: tuple[float, ...] | None = None
    scenario_id: str = "scenario"

    def validate(self) -> None:
        bad = []
        if self.trials < 1:
            bad.append("trials")
        if self.n_users < 1 or self.n_subcarriers % self.n_users != 0:
            bad.append("n_subcarriers/n_users")
        if self.bandwidth_hz <= 0:
            bad.append("bandwidth_hz")
        if self.pmax_w <= 0:
            bad.append("pmax_w")
        if self.gamma is None and not (0 < self.ber < 1):
            bad.append("ber")
        if self.gamma is not None and self.gamma < 1:
            bad.append("gamma")
        if self.noise_density_w_hz <= 0:
            bad.append("noise_density_w_hz")
        if self.tau_max_s <= 0:
            bad.append("tau_max_s")
        if self.n_taps < 1:
            bad.append("n_taps")
        if any(a not in ALGORITHMS for a in self.algorithms) or not self.algorithms:
            bad.append("algorithms")
        if any(k < 2 for k in self.kappa_list):
            bad.append("kappa_list")
        if any(g <= 0 for g in self.gt_db_list):
            bad.append("gt_db_list")
        if self.sweep_n is not None and (len(self.sweep_n) == 0 or any(
                n < self.n_users or n % self.n_users for n in self.sweep_n)):
            bad.append("sweep_n")
        if self.sweep_tau_max_s is not None and (len(self.sweep_tau_max_s) == 0 or any(
                t <= 0 for t in self.sweep_tau_max_s)):
            bad.append("sweep_tau_max_s")
        if bad:
            raise ConfigError("invalid scenario fields: " + ", ".join(bad), fields=bad)

    def resolve_gamma(self) -> float:
        return self.gamma if self.gamma is not None else snr_gap_from_ber(self.ber)

    def system_params(self, n_subcarriers: int | None = None,
                      tau_max_s: float | None = None) -> SystemParams:
        return SystemParams(
            n_subcarriers=n_subcarriers or self.n_subcarriers,
            n_users=self.n_users,
            total_bandwidth=self.bandwidth_hz,
            noise_density=self.noise_density_w_hz,
            cell_radius=self.cell_radius_m,
            pathloss_exponent=self.pathloss_exp,
            tau_max=tau_max_s or self.tau_max_s,
            num_taps=self.n_taps,
        )

    def configs(self) -> list[tuple[str, float | int | None]]:
        out: list[tuple[str, float | int | None]] = []
        for alg in self.algorithms:
            if alg == "HH-K":
                out.extend(("HH-K", k) for k in self.kappa_list)
            elif alg == "HH-GRP":
                out.extend(("HH-GRP", g) for g in self.gt_db_list)
            else:
                out.append((alg, None))
        return out


def _parse_int_list(text):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _parse_float_list(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _parse_algorithms(text):
    return tuple(a.strip().upper() for a in text.split(",") if a.strip())


_FIELD_PARSERS = {
    "n_subcarriers": int,
    "n_users": int,
    "bandwidth_hz": float,
    "pmax_w": float,
    "ber": float,
    "gamma": lambda v: None if v.lower() in ("", "none") else float(v),
    "pathloss_exp": float,
    "cell_radius_m": float,
    "noise_density_w_hz": float,
    "tau_max_s": float,
    "n_taps": int,
    "trials": int,
    "seed": int,
    "algorithms": _parse_algorithms,
    "kappa_list": _parse_int_list,
    "gt_db_list": _parse_float_list,
    "sweep_n": _parse_int_list,
    "sweep_tau_max_s": _parse_float_list,
}


def apply_overrides(scenario: Scenario, overrides: dict[str, str]) -> Scenario:
    """Apply ``key=value`` string overrides; unknown keys are rejected."""
    changes = {}
    for key, raw in overrides.items():
        parser = _FIELD_PARSERS.get(key)
        if parser is None:
            raise ConfigError(f"unknown scenario key: {key}", fields=[key])
        try:
            changes[key] = parser(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {raw!r} ({exc})", fields=[key])
    return replace(scenario, **changes)


def parse_scenario(text: str, scenario_id: str = "scenario") -> Scenario:
    """Parse the flat ``key = value`` scenario format."""
    overrides = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'", fields=[])
        key, raw = (part.strip() for part in line.split("=", 1))
        overrides[key] = raw
    scenario = apply_overrides(Scenario(scenario_id=scenario_id), overrides)
    scenario.validate()
    return scenario


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        text = fh.read()
    stem = os.path.splitext(os.path.basename(str(path)))[0]
    return parse_scenario(text, scenario_id=stem)


@dataclass
class TrialStats:
    """Per-trial outcome of one allocator configuration."""

    capacity_bps_hz: float
    iterations: float
    groups: float | None = None
    group_corr: float | None = None


@dataclass
class TrialRecord:
    """Deterministic function of (master seed, trial index, scenario)."""

    trial: int
    stats: dict[tuple[str, float | int | None], TrialStats] = field(default_factory=dict)


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    """Counter-based per-trial generator: splittable and order independent."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(trial,)))


def run_trial(params: SystemParams, gamma: float, pmax: float,
              configs, master_seed: int, trial: int,
              tap_profile: str = "equal") -> TrialRecord:
    """One Monte Carlo realization: shared channel, every allocator on it."""
    rng = trial_rng(master_seed, trial)
    ch = realize_channel(params, rng, profile=tap_profile)
    n = params.n_subcarriers
    k = params.n_users
    freqs = subcarrier_frequencies(params)
    record = TrialRecord(trial=trial)

    gvs = [GainVector(ch.gains[u], gamma, pmax) for u in range(k)]
    warm = None
    for alg, param in configs:
        caps = np.empty(k)
        iters = np.empty(k)
        groups = None
        gcorr = None
        if alg == "EQ":
            for u, gv in enumerate(gvs):
                res = equal_power(gv)
                caps[u] = res.continuous_capacity
                iters[u] = res.iterations
        elif alg == "WF":
            for u, gv in enumerate(gvs):
                res = waterfill(gv)
                caps[u] = res.continuous_capacity
                iters[u] = res.iterations
        elif alg == "HH":
            for u, gv in enumerate(gvs):
                res = hh_allocate(gv)
                caps[u] = res.total_bits
                iters[u] = res.iterations
        elif alg == "HH-WF":
            if warm is None:
                warm = [wf_initial_bits(gv) for gv in gvs]
            for u, gv in enumerate(gvs):
                res = hh_allocate(gv, initial_bits=warm[u])
                caps[u] = res.total_bits
                iters[u] = res.iterations
        elif alg == "HH-K":
            for u, gv in enumerate(gvs):
                res = hh_allocate(gv, kappa=int(param))
                caps[u] = res.total_bits
                iters[u] = res.iterations
        elif alg == "HH-GRP":
            groups = 0.0
            gcorr = 0.0
            m = params.block_size
            for u, gv in enumerate(gvs):
                ga = hh_grp_allocate(gv, float(param))
                caps[u] = ga.result.total_bits
                iters[u] = ga.result.iterations
                groups += ga.partition.num_groups
                gcorr += group_correlation(ga.partition, ch.taps[u],
                                           freqs[u * m:(u + 1) * m])
            gcorr /= k
        else:
            raise InvalidParameterError(f"unknown algorithm {alg}")
        record.stats[(alg, param)] = TrialStats(
            capacity_bps_hz=float(caps.sum()) / n,
            iterations=float(iters.mean()),
            groups=groups, group_corr=gcorr)
    return record


def _trial_worker(args):
    return run_trial(*args)


def run_trials(scenario: Scenario, *, n_subcarriers: int | None = None,
               tau_max_s: float | None = None, configs=None,
               threads: int = 1, tap_profile: str = "equal") -> list[TrialRecord]:
    """Run every trial of one sweep point, in trial-index order."""
    scenario.validate()
    params = scenario.system_params(n_subcarriers, tau_max_s)
    gamma = scenario.resolve_gamma()
    configs = list(configs if configs is not None else scenario.configs())
    args = [(params, gamma, scenario.pmax_w, configs, scenario.seed, t, tap_profile)
            for t in range(scenario.trials)]
    if threads <= 1 or scenario.trials == 1:
        return [run_trial(*a) for a in args]
    chunk = max(1, scenario.trials // (threads * 8))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_trial_worker, args, chunksize=chunk))


def summarize(records: list[TrialRecord], scenario: Scenario,
              n_subcarriers: int, tau_max_s: float) -> list[MetricsSummary]:
    """Reduce trial records to per-configuration means in fixed order."""
    if not records:
        return []
    # Fixed-order reduction: trial index order, independent of arrival order.
    records = sorted(records, key=lambda r: r.trial)
    rows = []
    for cfg in records[0].stats:
        alg, param = cfg
        caps = np.array([r.stats[cfg].capacity_bps_hz for r in records])
        iters = np.array([r.stats[cfg].iterations for r in records])
        groups = [r.stats[cfg].groups for r in records]
        corr = [r.stats[cfg].group_corr for r in records]
        rows.append(MetricsSummary(
            scenario_id=scenario.scenario_id,
            algorithm=alg, param=param,
            n_subcarriers=n_subcarriers,
            tau_max_us=tau_max_s * 1e6,
            trials=len(records),
            avg_capacity_bps_hz=float(caps.mean()),
            std_capacity=float(caps.std()),
            avg_iterations=float(iters.mean()),
            std_iterations=float(iters.std()),
            avg_groups=float(np.mean(groups)) if groups[0] is not None else None,
            avg_group_corr=float(np.mean(corr)) if corr[0] is not None else None,
        ))
    return rows


def run_scenario(scenario: Scenario, threads: int = 1,
                 tap_profile: str = "equal",
                 keep_records: bool = False):
    """Run the scenario over its sweep axis (or single point).

    Returns the list of MetricsSummary rows; with ``keep_records`` also the
    per-point TrialRecord lists.
    """
    scenario.validate()
    if scenario.sweep_n and scenario.sweep_tau_max_s:
        raise ConfigError("use run_tradeoff_grid for a joint N x tau sweep",
                          fields=["sweep_n", "sweep_tau_max_s"])
    if scenario.sweep_n:
        points = [(n, scenario.tau_max_s) for n in scenario.sweep_n]
    elif scenario.sweep_tau_max_s:
        points = [(scenario.n_subcarriers, t) for t in scenario.sweep_tau_max_s]
    else:
        points = [(scenario.n_subcarriers, scenario.tau_max_s)]

    summaries: list[MetricsSummary] = []
    all_records: dict[tuple[int, float], list[TrialRecord]] = {}
    for n, tau in points:
        records = run_trials(scenario, n_subcarriers=n, tau_max_s=tau,
                             threads=threads, tap_profile=tap_profile)
        summaries.extend(summarize(records, scenario, n, tau))
        if keep_records:
            all_records[(n, tau)] = records
    if keep_records:
        return summaries, all_records
    return summaries


def run_tradeoff_grid(scenario: Scenario, threads: int = 1,
                      tap_profile: str = "equal"):
    """Run HH-GRP over the tau_max x G_T grid and attach the zeta surface.

    Extrema for the zeta normalization are taken over the whole grid.
    Returns (summaries, argmax) where ``argmax`` maps each tau row to the
    G_T attaining the row's best zeta.
    """
    scenario.validate()
    taus = scenario.sweep_tau_max_s
    gts = scenario.gt_db_list
    if not taus or len(taus) < 2 or len(gts) < 2:
        raise ConfigError("tradeoff grid needs >= 2 tau_max and >= 2 G_T values",
                          fields=["sweep_tau_max_s", "gt_db_list"])
    configs = [("HH-GRP", g) for g in gts]
    if "HH" in scenario.algorithms:
        configs = [("HH", None)] + configs

    summaries: list[MetricsSummary] = []
    cells: dict[tuple[float, float], MetricsSummary] = {}
    for tau in taus:
        records = run_trials(scenario, tau_max_s=tau, configs=configs,
                             threads=threads, tap_profile=tap_profile)
        for row in summarize(records, scenario, scenario.n_subcarriers, tau):
            summaries.append(row)
            if row.algorithm == "HH-GRP":
                cells[(tau, float(row.param))] = row

    caps = [row.avg_capacity_bps_hz for row in cells.values()]
    iters = [row.avg_iterations for row in cells.values()]
    c_min, c_max = min(caps), max(caps)
    i_min, i_max = min(iters), max(iters)
    if c_max == c_min or i_max == i_min:
        raise DegenerateRangeError("all grid cells are identical")
    for row in cells.values():
        row.zeta = tradeoff_factor(TradeoffInputs(
            row.avg_capacity_bps_hz, row.avg_iterations,
            c_min, c_max, i_min, i_max))
    argmax = {}
    for tau in taus:
        best = max(gts, key=lambda g: cells[(tau, float(g))].zeta)
        argmax[tau] = float(best)
    return summaries, argmax


def group_stats_trial(params: SystemParams, gt_list, master_seed: int,
                      trial: int, tap_profile: str = "equal") -> TrialRecord:
    """Grouping-only trial: partition sizes and correlations, no loading."""
    from .grouping import group_subcarriers

    rng = trial_rng(master_seed, trial)
    ch = realize_channel(params, rng, profile=tap_profile)
    freqs = subcarrier_frequencies(params)
    m = params.block_size
    record = TrialRecord(trial=trial)
    for gt in gt_list:
        groups = 0.0
        corr = 0.0
        for u in range(params.n_users):
            part = group_subcarriers(ch.gains[u], float(gt))
            groups += part.num_groups
            corr += group_correlation(part, ch.taps[u], freqs[u * m:(u + 1) * m])
        record.stats[("HH-GRP", float(gt))] = TrialStats(
            capacity_bps_hz=float("nan"), iterations=float("nan"),
            groups=groups, group_corr=corr / params.n_users)
    return record


def _group_stats_worker(args):
    return group_stats_trial(*args)


def run_group_stats(scenario: Scenario, threads: int = 1,
                    tap_profile: str = "equal") -> list[MetricsSummary]:
    """Average group counts and correlations over the tau sweep (or point)."""
    scenario.validate()
    taus = scenario.sweep_tau_max_s or (scenario.tau_max_s,)
    summaries = []
    for tau in taus:
        params = scenario.system_params(tau_max_s=tau)
        args = [(params, scenario.gt_db_list, scenario.seed, t, tap_profile)
                for t in range(scenario.trials)]
        if threads <= 1 or scenario.trials == 1:
            records = [group_stats_trial(*a) for a in args]
        else:
            chunk = max(1, scenario.trials // (threads * 8))
            with ProcessPoolExecutor(max_workers=threads) as pool:
                records = list(pool.map(_group_stats_worker, args, chunksize=chunk))
        for cfg in records[0].stats:
            groups = np.array([r.stats[cfg].groups for r in records])
            corr = np.array([r.stats[cfg].group_corr for r in records])
            summaries.append(MetricsSummary(
                scenario_id=scenario.scenario_id, algorithm=cfg[0], param=cfg[1],
                n_subcarriers=params.n_subcarriers, tau_max_us=tau * 1e6,
                trials=len(records), avg_groups=float(groups.mean()),
                avg_group_corr=float(corr.mean())))
    return summaries


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return f"{value:.6g}"
    return str(value)


def write_csv(summaries, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in summaries:
            writer.writerow([_fmt(getattr(row, col)) for col in CSV_COLUMNS])


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


_PLOT_TAGS = (("capacity", "avg_capacity_bps_hz"),
              ("iterations", "avg_iterations"),
              ("groups", "avg_groups"),
              ("groupcorr", "avg_group_corr"),
              ("zeta", "zeta"))


def _curve_key(row: MetricsSummary) -> tuple[str, str]:
    alg = row.algorithm.lower()
    param = "na" if row.param is None else f"{row.param:g}"
    return alg, param


def write_plot_data(summaries, outdir) -> list[str]:
    """One two-column (x, y) text file per curve: <tag>_<alg>_<param>.dat."""
    os.makedirs(outdir, exist_ok=True)
    written = []
    curves: dict[tuple[str, str, str], list[tuple[float, float]]] = {}
    for row in summaries:
        alg, param = _curve_key(row)
        for tag, attr in _PLOT_TAGS:
            y = getattr(row, attr)
            if y is None:
                continue
            curves.setdefault((tag, alg, param), []).append(
                (row.n_subcarriers, row.tau_max_us, y))
    for (tag, alg, param), pts in curves.items():
        ns = {p[0] for p in pts}
        # x axis: whichever sweep axis actually varies (N wins a tie).
        xi = 0 if len(ns) > 1 else 1
        path = os.path.join(outdir, f"{tag}_{alg}_{param}.dat")
        with open(path, "w") as fh:
            for p in sorted(pts):
                fh.write(f"{_fmt(float(p[xi]))} {_fmt(float(p[2]))}\n")
        written.append(path)
    return written


def dump_results(summaries, outdir, fmt: str = "csv",
                 scenario: Scenario | None = None, figures: bool = True) -> dict:
    """Persist summaries: CSV, plot-data files, figures, optional full dump."""
    try:
        os.makedirs(outdir, exist_ok=True)
        csv_path = os.path.join(outdir, "results.csv")
        write_csv(summaries, csv_path)
        paths = {"csv": csv_path, "plot_data": write_plot_data(summaries, outdir)}
        if fmt == "full":
            full_path = os.path.join(outdir, "results.json")
            payload = {
                "scenario": asdict(scenario) if scenario is not None else None,
                "summaries": [asdict(row) for row in summaries],
            }
            with open(full_path, "w") as fh:
                json.dump(payload, fh, indent=2)
            paths["full"] = full_path
        if figures:
            from .plots import render_figures
            paths["figures"] = render_figures(summaries, outdir)
        return paths
    except OSError as exc:
        raise OSError(f"failed writing results under {outdir!r}: {exc}") from exc


def scenario_fields() -> tuple[str, ...]:
    return tuple(_FIELD_PARSERS)


def scenario_to_text(scenario: Scenario) -> str:
    """Serialize a scenario back to the flat key = value format."""
    lines = []
    for f in fields(scenario):
        if f.name == "scenario_id":
            continue
        value = getattr(scenario, f.name)
        if value is None:
            continue
        if isinstance(value, tuple):
            value = ",".join(f"{v:g}" if isinstance(v, float) else str(v) for v in value)
        lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"
