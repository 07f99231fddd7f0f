"""Amplitude-amplification success mathematics and the search driver.

The randomized protocol emulated here repeatedly prepares the biased
constrained superposition, applies a uniformly drawn number of Grover
iterations from a doubling range, and measures; it stops at the first
measured string that beats the incumbent.  With good-state mass p and
iteration maximum T the protocol's success probability has a closed form
(``aa_success``) that is validated against direct Monte Carlo of the
protocol (``simulate_qsearch``).

Two benchmarking modes drive the incumbent loop without any statevector:

* sampling mode draws classically until an improving string appears after s
  draws and charges ceil(sqrt(s)) Grover iterations plus one measurement,
  the quadratic-speedup correspondence between T oracle calls and T**2
  classical samples;
* exact mode computes the improving mass p exactly from the path
  probabilities (small n only) and charges the expected protocol cost.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .costs import CostParams, CycleReport, stateprep_cycles
from .instance import LinearConstraint, MfkpInstance, mfkp_constraints
from .sampler import (
    BiasSpec,
    LookaheadTables,
    distribution,
    sample_multi_batch,
)
from .trajectory import Trajectory, TrajectoryPoint

EXACT_ENUMERATION_LIMIT = 25


class NoFeasibleStart(RuntimeError):
    """Raised when no feasible starting incumbent is found within the start budget."""


class ExactLimitExceeded(ValueError):
    """Raised when exact enumeration is requested above the configured size cap."""


# ---------------------------------------------------------------------------
# Success probabilities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AAParams:
    """Derived quantities for the protocol with good-state mass p and maximum T."""

    p_good: float
    iteration_max: float

    def __post_init__(self):
        if not 0.0 <= self.p_good <= 1.0:
            raise ValueError("p_good must lie in [0, 1]")
        if self.iteration_max < 1.0:
            raise ValueError("iteration_max must be >= 1")

    @property
    def m(self) -> int:
        return int(math.floor(math.log2(self.iteration_max)))

    @property
    def aa_frac(self) -> float:
        return math.log2(self.iteration_max) - self.m

    @property
    def theta(self) -> float:
        return math.asin(math.sqrt(self.p_good))


def classical_success(p: float, T: float) -> float:
    """Probability that at least one of T independent draws hits mass p: 1 - (1-p)**T."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if T < 0:
        raise ValueError("T must be nonnegative")
    if T == 0 or p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    return -math.expm1(T * math.log1p(-p))


def _round_failure(theta: float, k: int) -> float:
    """Mean failure probability of round k: average of cos^2((2j+1)theta) over j < 2**k.

    Closed form 1/2 + sin(2**(k+2) theta) / (2**(k+2) sin(2 theta)); the
    theta -> 0 and theta -> pi/2 limits are 1 and cos^2(theta)-like endpoints
    handled explicitly.
    """
    s2 = math.sin(2.0 * theta)
    if s2 == 0.0:
        # theta = 0 (p = 0, never succeeds) or theta = pi/2 (p = 1, always succeeds)
        return 1.0 if math.cos(theta) ** 2 > 0.5 else 0.0
    scale = 2.0 ** (k + 2)
    f = 0.5 + math.sin(scale * theta) / (scale * s2)
    return min(1.0, max(0.0, f))


def _failure_products(theta: float, rounds: int) -> list[float]:
    """F(r) = probability that rounds 0..r-1 all fail, for r = 0..rounds."""
    out = [1.0]
    for k in range(rounds):
        out.append(out[-1] * _round_failure(theta, k))
    return out


def aa_success(p: float, T: float) -> float:
    """Success probability of the randomized amplification protocol.

    The round count r is m or m+1 (m = floor(log2 T)) with weights
    (1 - frac, frac), frac = log2(T) - m; round k draws j uniformly from
    {0..2**k - 1} and fails with probability cos^2((2j+1) theta).  Success is
    the mixture of 1 minus the per-round failure products.
    """
    params = AAParams(p, T)
    F = _failure_products(params.theta, params.m + 1)
    return (1.0 - params.aa_frac) * (1.0 - F[params.m]) + params.aa_frac * (
        1.0 - F[params.m + 1]
    )


@dataclass(frozen=True)
class QSearchResult:
    found: bool
    grover_iterations: int
    measurements: int


def simulate_qsearch(p: float, T: float, rng: np.random.Generator) -> QSearchResult:
    """One run of the randomized amplification protocol.

    Draws the round count, then per round k picks j uniformly in
    {0..2**k - 1}, charges j Grover iterations and one measurement, and
    succeeds with probability sin^2((2j+1) theta).
    """
    params = AAParams(p, T)
    theta = params.theta
    r = params.m + (1 if rng.random() < params.aa_frac else 0)
    iterations = 0
    measurements = 0
    for k in range(r):
        j = int(rng.integers(0, 2**k))
        iterations += j
        measurements += 1
        if rng.random() < math.sin((2 * j + 1) * theta) ** 2:
            return QSearchResult(True, iterations, measurements)
    return QSearchResult(False, iterations, measurements)


def qsearch_invocation_costs(p: float, T: float) -> tuple[float, float, float]:
    """Expected (Grover iterations, measurements, success probability) of one
    protocol invocation with iteration maximum T.

    Rounds stop at the first success, so the expectations weight each round
    by the probability of reaching it.
    """
    if p <= 0.0:
        raise ValueError("p must be positive for guaranteed progress")
    params = AAParams(p, T)
    m, frac, theta = params.m, params.aa_frac, params.theta
    if m == 0 and frac == 0.0:
        raise ValueError("iteration maximum admits zero rounds; use T >= 2")
    F = _failure_products(theta, m + 1)

    def per_invocation(r: int) -> tuple[float, float]:
        iters = sum(F[k] * (2**k - 1) / 2.0 for k in range(r))
        meas = sum(F[k] for k in range(r))
        return iters, meas

    i_m, m_m = per_invocation(m)
    i_m1, m_m1 = per_invocation(m + 1)
    mean_iters = (1.0 - frac) * i_m + frac * i_m1
    mean_meas = (1.0 - frac) * m_m + frac * m_m1
    fail = (1.0 - frac) * F[m] + frac * F[m + 1]
    return mean_iters, mean_meas, 1.0 - fail


def qsearch_expected_costs(p: float, T: float) -> tuple[float, float]:
    """Expected (Grover iterations, measurements) of repeated protocol runs
    until the first success.

    Requires p > 0 and an iteration maximum giving at least one round.
    """
    mean_iters, mean_meas, success = qsearch_invocation_costs(p, T)
    if success <= 0.0:
        raise ValueError("protocol cannot succeed with the given parameters")
    return mean_iters / success, mean_meas / success


# ---------------------------------------------------------------------------
# Exact good-state mass
# ---------------------------------------------------------------------------


def _bit_column(indices: np.ndarray, i: int) -> np.ndarray:
    return ((indices >> i) & 1).astype(np.int64)


def enumerate_values(
    coeffs: np.ndarray, n: int, chunk: int = 1 << 20
) -> np.ndarray:
    """Dot products coeffs . x for every bit string x (LSB-first index encoding)."""
    total = 1 << n
    out = np.zeros(total, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        acc = np.zeros(len(idx), dtype=np.int64)
        for i in range(n):
            acc += int(coeffs[i]) * _bit_column(idx, i)
        out[start : start + len(idx)] = acc
    return out


def feasibility_mask(constraints: list[LinearConstraint]) -> np.ndarray:
    """Boolean mask over all 2**n strings satisfying every constraint."""
    n = constraints[0].n
    mask = np.ones(1 << n, dtype=bool)
    for c in constraints:
        values = enumerate_values(np.asarray(c.coeffs), n)
        mask &= values <= c.bound
    return mask


def exact_good_probability(
    constraints: list[LinearConstraint],
    bias: BiasSpec,
    profits,
    threshold: int,
    exact_limit: int = EXACT_ENUMERATION_LIMIT,
) -> float:
    """Total sampling probability of feasible strings with profit above the threshold.

    This is the good-state mass p fed to the success formulas when
    benchmarking exactly; enumeration is capped at ``exact_limit`` variables.
    """
    n = constraints[0].n
    if n > exact_limit:
        raise ExactLimitExceeded(
            f"exact enumeration over {n} variables exceeds the cap of {exact_limit}"
        )
    probs = distribution(constraints, bias)
    feasible = feasibility_mask(constraints)
    profit = enumerate_values(np.asarray(profits), n)
    return float(probs[feasible & (profit > threshold)].sum())


# ---------------------------------------------------------------------------
# Incumbent-improvement driver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BudgetSpec:
    """Stopping caps; at least one must be set."""

    max_oracle_calls: int | None = None
    max_modeled_seconds: float | None = None
    max_wall_seconds: float | None = None

    def __post_init__(self):
        caps = (self.max_oracle_calls, self.max_modeled_seconds, self.max_wall_seconds)
        if all(v is None for v in caps):
            raise ValueError("at least one budget cap must be set")
        for v in caps:
            if v is not None and v < 0:
                raise ValueError("budget caps must be nonnegative")


def greedy_incumbent(inst: MfkpInstance) -> tuple[int, ...] | None:
    """Greedy pack by descending efficiency, then pad with the lightest leftovers.

    Returns None when the pack misses the filling band.
    """
    n = inst.n
    bits = [0] * n
    total = 0
    efficiency_order = sorted(
        range(n), key=lambda j: (-(inst.profits[j] / inst.weights[j]), j)
    )
    for j in efficiency_order:
        if total + inst.weights[j] <= inst.capacity:
            bits[j] = 1
            total += inst.weights[j]
    if total >= inst.capacity - inst.gap:
        return tuple(bits)
    for j in sorted(range(n), key=lambda j: (inst.weights[j], j)):
        if not bits[j] and total + inst.weights[j] <= inst.capacity:
            bits[j] = 1
            total += inst.weights[j]
            if total >= inst.capacity - inst.gap:
                return tuple(bits)
    return None


def _find_feasible_start(
    inst: MfkpInstance,
    constraints: list[LinearConstraint],
    bias: BiasSpec,
    rng: np.random.Generator,
    tables: LookaheadTables | None,
    draw_limit: int,
) -> tuple[tuple[int, ...], int]:
    """(starting incumbent, classical draws spent); greedy first, sampling fallback."""
    greedy = greedy_incumbent(inst)
    if greedy is not None:
        return greedy, 0
    drawn = 0
    chunk = 2048
    while drawn < draw_limit:
        size = min(chunk, draw_limit - drawn)
        bits, feasible, _ = sample_multi_batch(constraints, bias, rng, size, tables)
        hits = np.flatnonzero(feasible)
        if hits.size:
            drawn += int(hits[0]) + 1
            return tuple(int(b) for b in bits[hits[0]]), drawn
        drawn += size
    raise NoFeasibleStart(f"no feasible string within {draw_limit} draws")


@dataclass
class _CostLedger:
    report: CycleReport
    params: CostParams
    oracle_calls: int = 0
    cycles: int = 0

    def charge(self, iterations: int, measurements: int) -> None:
        self.oracle_calls += iterations
        self.cycles += (
            iterations * self.report.grover_iteration_cycles
            + measurements * self.report.stateprep_cycles
        )

    @property
    def modeled_seconds(self) -> float:
        return self.cycles * self.params.cycle_time_seconds

    def affordable_iterations(self, budget: BudgetSpec) -> int:
        """Iterations that still fit every active cap, assuming one more measurement."""
        candidates = []
        if budget.max_oracle_calls is not None:
            candidates.append(budget.max_oracle_calls - self.oracle_calls)
        if budget.max_modeled_seconds is not None:
            cycle_room = (
                budget.max_modeled_seconds / self.params.cycle_time_seconds
                - self.cycles
                - self.report.stateprep_cycles
            )
            candidates.append(int(cycle_room // self.report.grover_iteration_cycles))
        return min(candidates) if candidates else 2**62


def cbqs_run(
    inst: MfkpInstance,
    bias: BiasSpec,
    budget: BudgetSpec,
    cost_params: CostParams,
    rng: np.random.Generator,
    mode: str = "sampling",
    known_optimum: int | None = None,
    start_draw_limit: int = 100_000,
    exact_limit: int = EXACT_ENUMERATION_LIMIT,
) -> Trajectory:
    """Run the biased-search incumbent loop and record its trajectory.

    Each improvement re-centers the bias on the incumbent and searches for a
    strictly better feasible string.  Sampling mode draws classically and
    charges ceil(sqrt(draws)) Grover iterations plus one measurement; exact
    mode computes the improving mass from the exact distribution and charges
    the expected protocol cost (self-certifying optimality when the mass
    vanishes).  Stops when a budget cap binds or the known optimum is reached.
    """
    if mode not in ("sampling", "exact"):
        raise ValueError(f"unknown mode {mode!r}")
    constraints = list(mfkp_constraints(inst))
    d = bias.lookahead_depth
    tables = LookaheadTables(constraints, d) if d >= 1 else None
    report = stateprep_cycles(inst, cost_params, d)
    ledger = _CostLedger(report, cost_params)
    t0 = time.perf_counter()

    incumbent, start_draws = _find_feasible_start(
        inst, constraints, bias, rng, tables, start_draw_limit
    )
    if start_draws:
        ledger.charge(math.isqrt(start_draws - 1) + 1, 1)
    value = inst.profit_of(incumbent)

    trajectory = Trajectory()

    def record():
        trajectory.append(
            TrajectoryPoint(
                incumbent_value=value,
                oracle_calls=ledger.oracle_calls,
                cycles=ledger.cycles,
                modeled_seconds=ledger.modeled_seconds,
                wall_seconds=time.perf_counter() - t0,
                feasible=True,
            )
        )

    def wall_exceeded() -> bool:
        return (
            budget.max_wall_seconds is not None
            and time.perf_counter() - t0 > budget.max_wall_seconds
        )

    record()

    if mode == "exact":
        n = inst.n
        if n > exact_limit:
            raise ExactLimitExceeded(
                f"exact mode needs n <= {exact_limit}, got {n}"
            )
        feasible_mask_all = feasibility_mask(constraints)
        profit_all = enumerate_values(np.asarray(inst.profits), n)

    while True:
        if known_optimum is not None and value >= known_optimum:
            break
        if wall_exceeded():
            break
        room = ledger.affordable_iterations(budget)
        if room < 1:
            break
        centered = bias.recentered(incumbent)

        if mode == "sampling":
            found = None
            draws = 0
            max_draws = min(room * room, 2**40)
            chunk = 4096
            while draws < max_draws and found is None:
                size = min(chunk, max_draws - draws)
                bits, feas, _ = sample_multi_batch(constraints, centered, rng, size, tables)
                profits = bits.astype(np.int64) @ np.asarray(inst.profits, dtype=np.int64)
                hits = np.flatnonzero(feas & (profits > value))
                if hits.size:
                    draws += int(hits[0]) + 1
                    found = tuple(int(b) for b in bits[hits[0]])
                else:
                    draws += size
                if wall_exceeded():
                    break
            if found is None:
                break
            ledger.charge(math.isqrt(draws - 1) + 1, 1)
            incumbent, value = found, inst.profit_of(found)
            record()
        else:
            probs = distribution(constraints, centered, tables)
            good = feasible_mask_all & (profit_all > value)
            p_good = float(probs[good].sum())
            if p_good <= 0.0:
                break  # incumbent certified optimal
            # iteration maximum from the draws ~ T**2 correspondence; charge is
            # the expected cost of one tuned protocol invocation
            T = max(2.0, math.sqrt(1.0 / p_good))
            exp_iters, exp_meas, _ = qsearch_invocation_costs(p_good, T)
            iters = int(exp_iters + 0.5)
            meas = max(1, int(exp_meas + 0.5))
            if iters > room:
                break
            good_idx = np.flatnonzero(good)
            weights = probs[good_idx]
            pick = int(rng.choice(good_idx, p=weights / weights.sum()))
            incumbent = tuple(int((pick >> i) & 1) for i in range(inst.n))
            value = inst.profit_of(incumbent)
            ledger.charge(iters, meas)
            record()

    return trajectory


# ---------------------------------------------------------------------------
# Constraint-count comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstraintComparison:
    """Feasible-sample rates with one vs both constraints in the state preparation."""

    p_feasible_single: float
    p_feasible_both: float
    oracle_to_first_single: int | None
    oracle_to_first_both: int | None
    curve: tuple[tuple[int, float, float], ...]  # (oracle calls, P_single, P_both)


def single_vs_both_constraints(
    inst: MfkpInstance,
    bias: BiasSpec,
    rng: np.random.Generator,
    samples: int = 20_000,
    curve_points: int = 12,
) -> ConstraintComparison:
    """Measure how much the filling constraint helps the state preparation.

    Draws with only the capacity constraint and with both constraints,
    scoring each sample against full feasibility.  The oracle curve converts
    the empirical rates into protocol success probabilities via the
    T oracle calls ~ T**2 draws correspondence.
    """
    upper, lower = mfkp_constraints(inst)
    results = {}
    for label, constraints in (("single", [upper]), ("both", [upper, lower])):
        tables = (
            LookaheadTables(constraints, bias.lookahead_depth)
            if bias.lookahead_depth >= 1
            else None
        )
        bits, _, _ = sample_multi_batch(constraints, bias, rng, samples, tables)
        weights = bits.astype(np.int64) @ np.asarray(inst.weights, dtype=np.int64)
        feasible = (weights <= inst.capacity) & (
            weights >= inst.capacity - inst.gap
        )
        rate = float(feasible.mean())
        hits = np.flatnonzero(feasible)
        first = math.isqrt(int(hits[0])) + 1 if hits.size else None
        results[label] = (rate, first)

    curve = []
    for e in range(curve_points + 1):
        T = 2**e
        row = [T]
        for label in ("single", "both"):
            rate = results[label][0]
            row.append(classical_success(rate, T * T))
        curve.append(tuple(row))
    return ConstraintComparison(
        p_feasible_single=results["single"][0],
        p_feasible_both=results["both"][0],
        oracle_to_first_single=results["single"][1],
        oracle_to_first_both=results["both"][1],
        curve=tuple(curve),
    )
