"""Experiment configuration, Monte-Carlo sweeps and verification suites.

A sweep runs place -> anchors -> graph -> algorithm -> metrics for every
(detection pair, C, trial) cell, with the radio range R = C * (ln n /
n)^(1/d).  Every attempted trial appears in the output with a status;
disconnected connectivity-based trials are recorded as failed for the
relative-map algorithm rather than resampled.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import metrics
from .geometry import RANDOM_SUBSET, UNIT_SIMPLEX, Seed, make_anchors, place_uniform
from .hopterrain import SingularGeometryError, hop_terrain
from .mds import mds_map
from .network import CONNECTIVITY, RANGE, DetectionModel, build_graph, is_connected

MDS_MAP = "mds-map"
HOP_TERRAIN = "hop-terrain"

SWEEP_CSV_HEADER = ("algorithm,n,d,mode,alpha,beta,m_anchors,C,R,seed,connected,"
                    "localized_fraction,d_inv,transform_error,rmse,runtime_ms")
VERIFY_CSV_HEADER = "check_name,n,d,alpha,beta,R,seed,pass,value,bound"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    algorithm: str = MDS_MAP
    n: int = 200
    dim: int = 2
    mode: str = CONNECTIVITY
    alpha: float = 1.0
    beta: float = 0.0
    pairs: tuple = ()  # optional (alpha, beta) grid; empty = use alpha/beta
    anchors: str = "simplex"  # simplex | random | none
    m_anchors: int = 0
    c_grid: tuple = (1.0, 2.0, 3.0, 4.0)
    trials: int = 1
    master_seed: int = 0
    use_average_hop_distance: bool = False
    workers: int = 1

    @property
    def detection_pairs(self) -> tuple:
        return tuple(self.pairs) if self.pairs else ((self.alpha, self.beta),)

    def radio_range(self, c: float) -> float:
        return c * (math.log(self.n) / self.n) ** (1.0 / self.dim)

    def validate(self):
        if self.algorithm not in (MDS_MAP, HOP_TERRAIN):
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.mode not in (CONNECTIVITY, RANGE):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if self.dim not in (2, 3):
            raise ConfigError("dimension must be 2 or 3")
        if not self.c_grid or any(b <= a for a, b in zip(self.c_grid, self.c_grid[1:])):
            raise ConfigError("C grid must be non-empty and strictly increasing")
        for alpha, beta in self.detection_pairs:
            try:
                DetectionModel(self.radio_range(self.c_grid[0]), alpha, beta).validate(self.dim)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        if self.algorithm == HOP_TERRAIN:
            if self.anchors == "none":
                raise ConfigError("hop-terrain needs anchors")
            if self.anchors == "random" and self.m_anchors < self.dim + 1:
                raise ConfigError("random anchors need m >= d+1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")


@dataclass
class TrialRecord:
    algorithm: str
    n: int
    dim: int
    mode: str
    alpha: float
    beta: float
    m_anchors: int
    c: float
    radio_range: float
    seed: int
    connected: bool
    localized_fraction: float | None = None
    d_inv: float | None = None
    transform_error: float | None = None
    rmse: float | None = None
    runtime_ms: float = 0.0

    def csv_row(self) -> str:
        def num(v):
            return "" if v is None else repr(float(v))

        return ",".join([
            self.algorithm, str(self.n), str(self.dim), self.mode,
            repr(float(self.alpha)), repr(float(self.beta)), str(self.m_anchors),
            repr(float(self.c)), repr(float(self.radio_range)), str(self.seed),
            "true" if self.connected else "false",
            num(self.localized_fraction), num(self.d_inv),
            num(self.transform_error), num(self.rmse), num(self.runtime_ms),
        ])

    def as_dict(self) -> dict:
        return {
            "algorithm": self.algorithm, "n": self.n, "d": self.dim,
            "mode": self.mode, "alpha": self.alpha, "beta": self.beta,
            "m_anchors": self.m_anchors, "C": self.c, "R": self.radio_range,
            "seed": self.seed, "connected": self.connected,
            "localized_fraction": self.localized_fraction, "d_inv": self.d_inv,
            "transform_error": self.transform_error, "rmse": self.rmse,
        }


@dataclass
class SweepResult:
    config: ExperimentConfig
    records: list

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write(SWEEP_CSV_HEADER + "\n")
            for rec in self.records:
                fh.write(rec.csv_row() + "\n")

    def rows(self) -> list:
        return [rec.as_dict() for rec in self.records]


def _make_layout(cfg: ExperimentConfig, seed: Seed):
    if cfg.algorithm == MDS_MAP or cfg.anchors == "none":
        return None
    if cfg.anchors == "simplex":
        return make_anchors(UNIT_SIMPLEX, cfg.dim, cfg.n, seed)
    if cfg.anchors == "random":
        return make_anchors(RANDOM_SUBSET, cfg.dim, cfg.n, seed, m=cfg.m_anchors)
    raise ConfigError(f"unknown anchor spec {cfg.anchors!r}")


def run_trial(cfg: ExperimentConfig, alpha: float, beta: float, c: float, trial: int) -> TrialRecord:
    """One (detection pair, C, trial) cell; failures are recorded in-band."""
    started = time.perf_counter()
    seed = Seed(cfg.master_seed, trial)
    radio = cfg.radio_range(c)
    model = DetectionModel(radio, alpha, beta)
    positions = place_uniform(cfg.n, cfg.dim, seed)
    layout = _make_layout(cfg, seed)
    graph = build_graph(positions, model, cfg.mode, seed, anchors=layout)
    connected, _ = is_connected(graph)
    rec = TrialRecord(cfg.algorithm, cfg.n, cfg.dim, cfg.mode, alpha, beta,
                      0 if layout is None else layout.count, c, radio, trial, connected)
    if cfg.algorithm == MDS_MAP:
        if connected:
            estimate = mds_map(graph, cfg.dim)
            rec.d_inv = metrics.configuration_distance(positions, estimate)
            try:
                _, rec.transform_error = metrics.optimal_transform_error(positions, estimate)
            except metrics.DegenerateConfigurationError:
                pass
    else:
        try:
            result = hop_terrain(graph, layout,
                                 use_average_hop_distance=cfg.use_average_hop_distance)
            rec.localized_fraction = result.localized_fraction
            if result.localized.any():
                rec.rmse = metrics.rmse(positions, result.estimates, result.localized)
        except SingularGeometryError:
            pass
    rec.runtime_ms = (time.perf_counter() - started) * 1000.0
    return rec


def _sweep_cell(args):
    cfg, pair_index, c_index, trial = args
    alpha, beta = cfg.detection_pairs[pair_index]
    return (pair_index, c_index, trial), run_trial(cfg, alpha, beta, cfg.c_grid[c_index], trial)


def run_sweep(cfg: ExperimentConfig) -> SweepResult:
    """All (pair, C, trial) cells; record order is independent of workers."""
    cfg.validate()
    tasks = [(cfg, p, ci, t)
             for p in range(len(cfg.detection_pairs))
             for ci in range(len(cfg.c_grid))
             for t in range(cfg.trials)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_sweep_cell, tasks, chunksize=1))
    else:
        results = [_sweep_cell(t) for t in tasks]
    results.sort(key=lambda kv: kv[0])
    return SweepResult(cfg, [rec for _, rec in results])


# ---------------------------------------------------------------------------
# Verification suites


@dataclass
class VerificationRecord:
    check_name: str
    n: int
    dim: int
    alpha: float
    beta: float
    radio_range: float
    seed: int
    passed: bool
    value: float
    bound: float

    def csv_row(self) -> str:
        return ",".join([
            self.check_name, str(self.n), str(self.dim), repr(float(self.alpha)),
            repr(float(self.beta)), repr(float(self.radio_range)), str(self.seed),
            "true" if self.passed else "false", repr(float(self.value)),
            repr(float(self.bound)),
        ])


def write_verification_csv(path, records: list):
    with open(path, "w") as fh:
        fh.write(VERIFY_CSV_HEADER + "\n")
        for rec in records:
            fh.write(rec.csv_row() + "\n")


def hop_bound_suite(n: int = 2000, dim: int = 2, alpha: float = 1.0, beta: float = 0.0,
                    seeds: int = 100, master_seed: int = 0, margin: float = 1.05) -> list:
    """Hop-count bound at a radio range safely inside the admissible regime."""
    radii = metrics.bound_radii(n, dim, alpha)
    radio = margin * max(7.0, (1.0 / alpha) ** (1.0 / dim)) * radii.r_tilde
    model = DetectionModel(radio, alpha, beta)
    out = []
    for trial in range(seeds):
        seed = Seed(master_seed, trial)
        positions = place_uniform(n, dim, seed)
        graph = build_graph(positions, model, CONNECTIVITY, seed)
        connected, _ = is_connected(graph)
        if not connected:
            out.append(VerificationRecord("hop_bound", n, dim, alpha, beta, radio,
                                          trial, False, math.nan, 0.0))
            continue
        report = metrics.check_hop_bound(graph, positions)
        out.append(VerificationRecord("hop_bound", n, dim, alpha, beta, radio, trial,
                                      report.violations == 0, float(report.violations), 0.0))
    return out


def sigma_min_suite(n: int = 10_000, dim: int = 2, seeds: int = 100,
                    master_seed: int = 0) -> list:
    """Smallest singular value of the centered placement vs sqrt(n/6)."""
    bound = math.sqrt(n / 6.0)
    out = []
    for trial in range(seeds):
        positions = place_uniform(n, dim, Seed(master_seed, trial))
        value = metrics.min_singular_value_centered(positions)
        out.append(VerificationRecord("sigma_min", n, dim, 1.0, 0.0, 0.0, trial,
                                      value >= bound, value, bound))
    return out


def anchor_spectral_suite(m_random: int = 400, trials: int = 100,
                          master_seed: int = 0, dims=(2, 3)) -> list:
    """Operator-norm bound for fixed anchors; min-eigenvalue bound for random."""
    out = []
    for dim in dims:
        layout = make_anchors(UNIT_SIMPLEX, dim, dim + 1, Seed(master_seed, 0))
        value = metrics.lateration_operator_norm(layout.positions)
        out.append(VerificationRecord("anchor_spectral_det", dim + 1, dim, 1.0, 0.0,
                                      0.0, 0, value <= dim / 2.0, value, dim / 2.0))
        bound = (m_random - 1) / 3.0
        for trial in range(trials):
            rng = Seed(master_seed, trial).rng(f"anchor-spectral-{dim}")
            gram = metrics.lateration_gram(rng.random((m_random, dim)))
            lam_min = float(np.linalg.eigvalsh(gram)[0])
            out.append(VerificationRecord("anchor_spectral_rand", m_random, dim, 1.0,
                                          0.0, 0.0, trial, lam_min >= bound, lam_min, bound))
    return out


def concentration_suite(m_values=(100, 400), dims=(2, 3), trials: int = 100,
                        epsilon: float = 0.25, master_seed: int = 0) -> list:
    """Entry-wise concentration of the lateration Gram for random anchors."""
    out = []
    for dim in dims:
        for m in m_values:
            diag_bound = 4.0 * m ** (0.5 + epsilon)
            off_bound = 16.0 * m ** (0.5 + epsilon)
            target = 2.0 * (m - 1) / 3.0
            for trial in range(trials):
                rng = Seed(master_seed, trial).rng(f"concentration-{dim}-{m}")
                gram = metrics.lateration_gram(rng.random((m, dim)))
                diag_dev = float(np.max(np.abs(np.diag(gram) - target)))
                off = gram[~np.eye(dim, dtype=bool)]
                off_max = float(np.max(np.abs(off)))
                out.append(VerificationRecord("concentration_diag", m, dim, 1.0, 0.0,
                                              0.0, trial, diag_dev <= diag_bound,
                                              diag_dev, diag_bound))
                out.append(VerificationRecord("concentration_offdiag", m, dim, 1.0, 0.0,
                                              0.0, trial, off_max <= off_bound,
                                              off_max, off_bound))
    return out


_SUITES = {
    "hop-bound": lambda seeds, master: hop_bound_suite(seeds=seeds, master_seed=master),
    "sigma-min": lambda seeds, master: sigma_min_suite(seeds=seeds, master_seed=master),
    "anchor-spectral": lambda seeds, master: anchor_spectral_suite(trials=seeds, master_seed=master),
    "concentration": lambda seeds, master: concentration_suite(trials=seeds, master_seed=master),
}


def run_verification(suites=("hop-bound", "sigma-min", "anchor-spectral", "concentration"),
                     seeds: int = 100, master_seed: int = 0) -> list:
    records = []
    for name in suites:
        if name not in _SUITES:
            raise ConfigError(f"unknown verification suite {name!r}")
        records.extend(_SUITES[name](seeds, master_seed))
    return records


# ---------------------------------------------------------------------------
# Single-run entry point used by the CLI


@dataclass
class SimulationArtifacts:
    record: TrialRecord
    positions: np.ndarray
    layout: object
    graph: object
    estimates: np.ndarray | None
    localization: object


def simulate_once(cfg: ExperimentConfig, c: float | None = None, trial: int = 0,
                  flood_log=None) -> SimulationArtifacts:
    """One fully materialized run (positions, graph, estimates) for export."""
    cfg.validate()
    c = cfg.c_grid[0] if c is None else c
    seed = Seed(cfg.master_seed, trial)
    alpha, beta = cfg.detection_pairs[0]
    radio = cfg.radio_range(c)
    model = DetectionModel(radio, alpha, beta)
    positions = place_uniform(cfg.n, cfg.dim, seed)
    layout = _make_layout(cfg, seed)
    graph = build_graph(positions, model, cfg.mode, seed, anchors=layout)
    connected, _ = is_connected(graph)
    rec = TrialRecord(cfg.algorithm, cfg.n, cfg.dim, cfg.mode, alpha, beta,
                      0 if layout is None else layout.count, c, radio, trial, connected)
    estimates = None
    localization = None
    if cfg.algorithm == MDS_MAP:
        if connected:
            estimates = mds_map(graph, cfg.dim)
            rec.d_inv = metrics.configuration_distance(positions, estimates)
            try:
                _, rec.transform_error = metrics.optimal_transform_error(positions, estimates)
            except metrics.DegenerateConfigurationError:
                pass
    else:
        localization = hop_terrain(graph, layout, use_average_hop_distance=cfg.use_average_hop_distance,
                                   log=flood_log)
        estimates = localization.estimates
        rec.localized_fraction = localization.localized_fraction
        if localization.localized.any():
            rec.rmse = metrics.rmse(positions, localization.estimates, localization.localized)
    return SimulationArtifacts(rec, positions, layout, graph, estimates, localization)


# ---------------------------------------------------------------------------
# Flat key = value configuration files


_BOOL_VALUES = {"true": True, "false": False, "1": True, "0": False,
                "yes": True, "no": False}


def _parse_pairs(text: str) -> tuple:
    pairs = []
    for chunk in text.replace(";", ",").split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        a, b = chunk.split(":")
        pairs.append((float(a), float(b)))
    return tuple(pairs)


_PARSERS = {
    "algorithm": str, "n": int, "dim": int, "mode": str,
    "alpha": float, "beta": float, "pairs": _parse_pairs,
    "anchors": str, "m_anchors": int,
    "c_grid": lambda s: tuple(float(v) for v in s.split(",") if v.strip()),
    "trials": int, "master_seed": int,
    "use_average_hop_distance": lambda s: _BOOL_VALUES[s.strip().lower()],
    "workers": int,
}


def load_config_file(path) -> dict:
    """Flat ``key = value`` file; '#' starts a comment."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return values


def config_from_values(values: dict, base: ExperimentConfig | None = None) -> ExperimentConfig:
    cfg = base or ExperimentConfig()
    parsed = {}
    for key, raw in values.items():
        if key not in _PARSERS:
            raise ConfigError(f"unknown configuration key {key!r}")
        parsed[key] = _PARSERS[key](raw) if isinstance(raw, str) else raw
    cfg = replace(cfg, **parsed)
    cfg.validate()
    return cfg
