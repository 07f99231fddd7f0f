"""Experiment orchestration: configs, trajectory CSV files, sweeps, curves.

All output files are written atomically (temp file + rename) so a crashed
run never leaves a truncated CSV behind.  Data rows are reproducible byte
for byte given the same config and seed; wall-clock times live in their own
column and are excluded from that guarantee.
"""

from __future__ import annotations

import concurrent.futures
import csv
import hashlib
import io
import os
import time
from dataclasses import dataclass, fields, replace

import numpy as np

from .amplify import BudgetSpec, cbqs_run, classical_success, aa_success, simulate_qsearch
from .baselines import SAConfig, brute_force, gw_solve, simulated_annealing
from .costs import CostParams
from .instance import (
    GeneratorParams,
    MfkpInstance,
    OrderingKind,
    generate_instance,
    make_ordering,
    read_instance,
    reorder,
)
from .sampler import BiasSpec
from .trajectory import Trajectory, TrajectoryPoint

TRAJECTORY_COLUMNS = (
    "instance_id",
    "algorithm",
    "seed",
    "incumbent_value",
    "oracle_calls",
    "cycles",
    "modeled_seconds",
    "wall_seconds",
    "feasible",
)

SUMMARY_COLUMNS = (
    "instance_id",
    "algorithm",
    "bias_f",
    "lookahead_depth",
    "ordering",
    "seed",
    "best_value",
    "oracle_calls_to_best",
    "cycles_to_best",
    "modeled_seconds_to_best",
)

CURVES_COLUMNS = ("p", "T", "classical_success", "aa_success", "monte_carlo")

ALGORITHMS = ("cbqs", "sa", "gw", "brute")
ORDERINGS = ("none", "ratio_desc", "ratio_asc", "weight_asc", "profit_desc", "random")


class ConfigError(ValueError):
    """Raised for invalid or inconsistent run configuration."""


class SchemaError(ValueError):
    """Raised when a CSV file does not match the expected column schema."""


@dataclass(frozen=True)
class RunConfig:
    """One benchmark run: instance source, algorithm, knobs, budgets, output."""

    algorithm: str = "cbqs"
    instance_path: str | None = None
    gen_n: int | None = None
    gen_seed: int = 0
    gen_weight_range: int = 1000
    gen_capacity_fraction: float = 0.5
    gen_gap_fraction: float = 0.05
    bias_b: float | None = None  # None picks n/4
    bias_f: float = 0.0
    lookahead_depth: int = 0
    lookahead_biasing: bool = False
    lookahead_blend: float = 0.0
    ordering: str = "none"
    ordering_seed: int = 0
    mode: str = "sampling"
    max_oracle_calls: int | None = 10_000
    max_modeled_seconds: float | None = None
    max_wall_seconds: float | None = None
    cycle_time_seconds: float = 1e-8
    adder_depth_coefficient: float = 1.0
    comparison_depth_coefficient: float = 1.0
    sa_iters: int = 100_000
    sa_t0: float | None = None  # None scales to the penalty barrier
    sa_cooling: float = 0.9999
    gw_rank: int | None = None
    gw_sweeps: int = 200
    gw_trials: int = 10_000
    seed: int = 0
    output: str | None = None

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        sources = (self.instance_path is not None) + (self.gen_n is not None)
        if sources != 1:
            raise ConfigError("exactly one instance source required: instance_path or gen_n")
        if self.ordering not in ORDERINGS:
            raise ConfigError(f"ordering must be one of {ORDERINGS}, got {self.ordering!r}")
        if self.mode not in ("sampling", "exact"):
            raise ConfigError(f"mode must be 'sampling' or 'exact', got {self.mode!r}")
        for name in ("max_oracle_calls", "max_modeled_seconds", "max_wall_seconds"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ConfigError(f"{name} must be positive when set")
        if self.algorithm == "cbqs" and all(
            getattr(self, n) is None
            for n in ("max_oracle_calls", "max_modeled_seconds", "max_wall_seconds")
        ):
            raise ConfigError("cbqs runs need at least one budget cap")

    def budget(self) -> BudgetSpec:
        return BudgetSpec(
            max_oracle_calls=self.max_oracle_calls,
            max_modeled_seconds=self.max_modeled_seconds,
            max_wall_seconds=self.max_wall_seconds,
        )

    def cost_params(self) -> CostParams:
        return CostParams(
            cycle_time_seconds=self.cycle_time_seconds,
            adder_depth_coefficient=self.adder_depth_coefficient,
            comparison_depth_coefficient=self.comparison_depth_coefficient,
        )


# ---------------------------------------------------------------------------
# Config file format: `key value` lines, '#' comments, none for unset.
# ---------------------------------------------------------------------------

_BOOL_FIELDS = {"lookahead_biasing"}


def config_to_text(config: RunConfig) -> str:
    lines = []
    for f in fields(RunConfig):
        v = getattr(config, f.name)
        if v is None:
            rendered = "none"
        elif isinstance(v, bool):
            rendered = "true" if v else "false"
        elif isinstance(v, float):
            rendered = repr(v)
        else:
            rendered = str(v)
        lines.append(f"{f.name} {rendered}")
    return "\n".join(lines) + "\n"


def config_from_text(text: str, source: str = "<config>") -> RunConfig:
    known = {f.name: f for f in fields(RunConfig)}
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(maxsplit=1)
        if len(parts) != 2:
            raise ConfigError(f"{source}:{lineno}: expected 'key value'")
        key, token = parts
        if key not in known:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        values[key] = _parse_config_value(key, token, source, lineno)
    try:
        config = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return config


def _parse_config_value(key: str, token: str, source: str, lineno: int):
    if key in _BOOL_FIELDS:
        if token not in ("true", "false"):
            raise ConfigError(f"{source}:{lineno}: {key} must be true/false")
        return token == "true"
    for f in fields(RunConfig):
        if f.name != key:
            continue
        text_type = str(f.type)
        if token == "none" and "None" in text_type:
            return None
        try:
            if "int" in text_type and "float" not in text_type:
                return int(token)
            if "float" in text_type:
                return float(token)
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {token!r}") from None
        return token
    raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")


def read_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_text(fh.read(), source=str(path))


# ---------------------------------------------------------------------------
# Atomic file writes and the trajectory CSV schema
# ---------------------------------------------------------------------------


def atomic_write_text(path, text: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def instance_identifier(inst: MfkpInstance) -> str:
    """Stable short id derived from the instance contents."""
    canonical = (
        f"n {inst.n}\nc {inst.capacity}\nepsilon {inst.gap}\n"
        "p " + " ".join(map(str, inst.profits)) + "\n"
        "w " + " ".join(map(str, inst.weights)) + "\n"
    )
    return hashlib.sha256(canonical.encode()).hexdigest()[:12]


@dataclass(frozen=True)
class TrajectoryRow:
    instance_id: str
    algorithm: str
    seed: int
    incumbent_value: int
    oracle_calls: int
    cycles: int
    modeled_seconds: float
    wall_seconds: float
    feasible: bool


def rows_from_trajectory(
    trajectory: Trajectory, instance_id: str, algorithm: str, seed: int
) -> list[TrajectoryRow]:
    return [
        TrajectoryRow(
            instance_id,
            algorithm,
            seed,
            pt.incumbent_value,
            pt.oracle_calls,
            pt.cycles,
            pt.modeled_seconds,
            pt.wall_seconds,
            pt.feasible,
        )
        for pt in trajectory
    ]


def trajectory_csv_text(rows: list[TrajectoryRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRAJECTORY_COLUMNS)
    for r in rows:
        writer.writerow(
            [
                r.instance_id,
                r.algorithm,
                r.seed,
                r.incumbent_value,
                r.oracle_calls,
                r.cycles,
                repr(r.modeled_seconds),
                repr(r.wall_seconds),
                "true" if r.feasible else "false",
            ]
        )
    return buf.getvalue()


def write_trajectory_csv(path, rows: list[TrajectoryRow]) -> None:
    atomic_write_text(path, trajectory_csv_text(rows))


def read_trajectory_csv(path) -> list[TrajectoryRow]:
    """Read and validate a trajectory CSV (schema, types, monotonicity)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if tuple(header) != TRAJECTORY_COLUMNS:
            raise SchemaError(
                f"{path}: header {header!r} does not match {list(TRAJECTORY_COLUMNS)}"
            )
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(TRAJECTORY_COLUMNS):
                raise SchemaError(f"{path}:{lineno}: expected {len(TRAJECTORY_COLUMNS)} fields")
            try:
                rows.append(
                    TrajectoryRow(
                        instance_id=rec[0],
                        algorithm=rec[1],
                        seed=int(rec[2]),
                        incumbent_value=int(rec[3]),
                        oracle_calls=int(rec[4]),
                        cycles=int(rec[5]),
                        modeled_seconds=float(rec[6]),
                        wall_seconds=float(rec[7]),
                        feasible={"true": True, "false": False}[rec[8]],
                    )
                )
            except (ValueError, KeyError) as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from None
    _validate_rows(rows, path)
    return rows


def _validate_rows(rows: list[TrajectoryRow], path) -> None:
    last: dict = {}
    for r in rows:
        if not r.feasible:
            raise SchemaError(f"{path}: infeasible incumbent recorded for {r.instance_id}")
        key = (r.instance_id, r.algorithm, r.seed)
        prev = last.get(key)
        if prev is not None:
            for name in ("incumbent_value", "oracle_calls", "cycles", "modeled_seconds"):
                if getattr(r, name) < getattr(prev, name):
                    raise SchemaError(
                        f"{path}: {name} decreases within run {key}"
                    )
        last[key] = r


# ---------------------------------------------------------------------------
# Run dispatch
# ---------------------------------------------------------------------------


def load_instance(config: RunConfig) -> MfkpInstance:
    if config.instance_path is not None:
        return read_instance(config.instance_path)
    return generate_instance(
        config.gen_n,
        config.gen_seed,
        GeneratorParams(
            weight_range=config.gen_weight_range,
            capacity_fraction=config.gen_capacity_fraction,
            gap_fraction=config.gen_gap_fraction,
        ),
    )


def _apply_ordering(inst: MfkpInstance, config: RunConfig) -> MfkpInstance:
    if config.ordering == "none":
        return inst
    kind = OrderingKind(config.ordering)
    ordering = make_ordering(inst, kind, seed=config.ordering_seed)
    permuted, _ = reorder(inst, ordering)
    return permuted


def execute_run(config: RunConfig) -> list[TrajectoryRow]:
    """Run one algorithm and return trajectory rows (also writes the CSV if configured)."""
    config.validate()
    inst = load_instance(config)
    inst_id = instance_identifier(inst)
    working = _apply_ordering(inst, config)

    if config.algorithm == "brute":
        t0 = time.perf_counter()
        result = brute_force(working)
        trajectory = Trajectory()
        trajectory.append(
            TrajectoryPoint(result.optimum, 0, 0, 0.0, time.perf_counter() - t0, True)
        )
    elif config.algorithm == "sa":
        trajectory = simulated_annealing(
            working,
            SAConfig(
                iters=config.sa_iters,
                t0=config.sa_t0,
                cooling=config.sa_cooling,
                seed=config.seed,
            ),
        )
    elif config.algorithm == "gw":
        trajectory, _ = gw_solve(
            working,
            rank=config.gw_rank,
            sweeps=config.gw_sweeps,
            trials=config.gw_trials,
            seed=config.seed,
        )
    else:  # cbqs
        bias = BiasSpec.for_instance(
            working,
            reference=(0,) * working.n,
            strength=config.bias_b,
            mixing=config.bias_f,
            lookahead_depth=config.lookahead_depth,
            lookahead_biasing=config.lookahead_biasing,
            lookahead_blend=config.lookahead_blend,
        )
        trajectory = cbqs_run(
            working,
            bias,
            config.budget(),
            config.cost_params(),
            np.random.default_rng(config.seed),
            mode=config.mode,
        )

    rows = rows_from_trajectory(trajectory, inst_id, config.algorithm, config.seed)
    if config.output:
        write_trajectory_csv(config.output, rows)
    return rows


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


def _sweep_cell(args: tuple) -> tuple[RunConfig, list[TrajectoryRow]]:
    config = args[0]
    return config, execute_run(config)


def sweep(
    base: RunConfig,
    f_values: list[float],
    depths: list[int],
    orderings: list[str],
    out_dir,
    jobs: int = 1,
) -> str:
    """Cross product over mixing factor, look-ahead depth and ordering.

    Writes one trajectory CSV per cell plus summary.csv; returns the summary
    path.
    """
    os.makedirs(out_dir, exist_ok=True)
    cells = []
    for f in f_values:
        for d in depths:
            for ordering in orderings:
                name = f"f{f}_d{d}_{ordering}_seed{base.seed}.csv"
                config = replace(
                    base,
                    bias_f=f,
                    lookahead_depth=d,
                    ordering=ordering,
                    output=os.path.join(out_dir, name),
                )
                cells.append((config,))

    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_cell, cells))
    else:
        results = [_sweep_cell(c) for c in cells]

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_COLUMNS)
    for config, rows in results:
        if not rows:
            continue
        best = rows[-1]
        writer.writerow(
            [
                best.instance_id,
                config.algorithm,
                repr(config.bias_f),
                config.lookahead_depth,
                config.ordering,
                config.seed,
                best.incumbent_value,
                best.oracle_calls,
                best.cycles,
                repr(best.modeled_seconds),
            ]
        )
    summary_path = os.path.join(out_dir, "summary.csv")
    atomic_write_text(summary_path, buf.getvalue())
    return summary_path


# ---------------------------------------------------------------------------
# Success-probability curves
# ---------------------------------------------------------------------------


def curves_table(
    p_values: list[float],
    T_values: list[float],
    mc_trials: int = 100_000,
    seed: int = 0,
) -> list[tuple[float, float, float, float, float]]:
    """(p, T, classical, protocol formula, protocol Monte Carlo) rows."""
    rows = []
    for ip, p in enumerate(p_values):
        for it, T in enumerate(T_values):
            rng = np.random.default_rng([seed, ip, it])
            hits = sum(
                simulate_qsearch(p, T, rng).found for _ in range(mc_trials)
            )
            rows.append(
                (p, T, classical_success(p, T), aa_success(p, T), hits / mc_trials)
            )
    return rows


def write_curves_csv(path, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CURVES_COLUMNS)
    for p, T, classical, aa, mc in rows:
        writer.writerow([repr(p), repr(T), repr(classical), repr(aa), repr(mc)])
    atomic_write_text(path, buf.getvalue())


def read_curves_csv(path) -> list[tuple[float, float, float, float, float]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if tuple(header) != CURVES_COLUMNS:
            raise SchemaError(f"{path}: header {header!r} does not match {list(CURVES_COLUMNS)}")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(CURVES_COLUMNS):
                raise SchemaError(f"{path}:{lineno}: expected {len(CURVES_COLUMNS)} fields")
            try:
                rows.append(tuple(float(v) for v in rec))
            except ValueError as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from None
    return rows


# ---------------------------------------------------------------------------
# Comparison merge
# ---------------------------------------------------------------------------


def compare(paths: list, output) -> list[TrajectoryRow]:
    """Merge trajectory CSVs (including imported ones) into one aligned table.

    Rows keep their instance-id column so runs on different instances never
    mix silently; the merge sorts by instance, algorithm, seed and cost.
    """
    merged: list[TrajectoryRow] = []
    for p in paths:
        merged.extend(read_trajectory_csv(p))
    merged.sort(
        key=lambda r: (r.instance_id, r.algorithm, r.seed, r.oracle_calls, r.cycles, r.modeled_seconds)
    )
    write_trajectory_csv(output, merged)
    return merged
