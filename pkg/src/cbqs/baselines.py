"""Classical reference solvers: brute force, simulated annealing, and a
semidefinite relaxation with hyperplane rounding.

Brute force is the ground truth for every small-instance check.  The SDP
route converts the two-sided weight band into an equality via binary slack
bits, lifts the ±1-encoded problem into a penalized quadratic form, solves
the diagonal-constrained relaxation by low-rank coordinate ascent on unit
vectors, and rounds Gram vectors with random hyperplanes followed by
feasibility post-selection.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .instance import MfkpInstance
from .trajectory import Trajectory, TrajectoryPoint

BRUTE_FORCE_LIMIT = 28


class NoFeasibleSolution(RuntimeError):
    """Raised when an instance has an empty feasible set."""


@dataclass(frozen=True)
class BruteForceResult:
    optimum: int
    argmax: tuple[int, ...]
    feasible_count: int


def brute_force(inst: MfkpInstance, chunk: int = 1 << 20) -> BruteForceResult:
    """Exhaustive scan of all 2**n strings; exact optimum of the gapped knapsack.

    The argmax is the feasible maximizer with the smallest index in LSB-first
    encoding, making the result deterministic.
    """
    n = inst.n
    if n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force capped at n <= {BRUTE_FORCE_LIMIT}")
    w = np.asarray(inst.weights, dtype=np.int64)
    p = np.asarray(inst.profits, dtype=np.int64)
    lo = inst.capacity - inst.gap
    best_value = -1
    best_index = -1
    feasible_count = 0
    total = 1 << n
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        weights = np.zeros(len(idx), dtype=np.int64)
        profits = np.zeros(len(idx), dtype=np.int64)
        for i in range(n):
            bit = (idx >> i) & 1
            weights += int(w[i]) * bit
            profits += int(p[i]) * bit
        feasible = (weights <= inst.capacity) & (weights >= lo)
        feasible_count += int(feasible.sum())
        if feasible.any():
            masked = np.where(feasible, profits, -1)
            local_best = int(masked.max())
            if local_best > best_value:
                best_value = local_best
                best_index = start + int(np.argmax(masked))
    if best_index < 0:
        raise NoFeasibleSolution("no bit string lies in the weight band")
    argmax = tuple(int((best_index >> i) & 1) for i in range(n))
    return BruteForceResult(best_value, argmax, feasible_count)


# ---------------------------------------------------------------------------
# Simulated annealing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SAConfig:
    """Annealing schedule; ``t0=None`` scales the start temperature to the
    penalty barrier (penalty weight times the largest item weight), without
    which single-bit flips cannot hop between feasible islands of the band."""

    iters: int = 100_000
    t0: float | None = None
    cooling: float = 0.9999
    seed: int = 0

    def __post_init__(self):
        if self.iters < 0:
            raise ValueError("iters must be nonnegative")
        if self.t0 is not None and self.t0 <= 0:
            raise ValueError("t0 must be positive")
        if not 0.0 < self.cooling <= 1.0:
            raise ValueError("cooling must lie in (0, 1]")


def simulated_annealing(inst: MfkpInstance, config: SAConfig) -> Trajectory:
    """Single-bit-flip annealing on profit minus a penalized band violation.

    The penalty weight 2*sum(p)+1 dominates any profit difference, so the
    penalized optimum coincides with the constrained one.  Only feasible
    incumbents are recorded; runs are deterministic per seed, with the
    iteration index stored in the oracle-calls column.
    """
    rng = np.random.default_rng(config.seed)
    n = inst.n
    w = inst.weights
    p = inst.profits
    lo = inst.capacity - inst.gap
    penalty = 2 * sum(p) + 1
    t0 = config.t0 if config.t0 is not None else float(penalty * max(w))

    def violation(total_weight: int) -> int:
        if total_weight > inst.capacity:
            return total_weight - inst.capacity
        if total_weight < lo:
            return lo - total_weight
        return 0

    bits = [0] * n
    weight = 0
    profit = 0
    score = profit - penalty * violation(weight)

    trajectory = Trajectory()
    t_start = time.perf_counter()
    best = -1
    if violation(weight) == 0:
        best = profit
        trajectory.append(
            TrajectoryPoint(profit, 0, 0, 0.0, time.perf_counter() - t_start, True)
        )

    temp = t0
    flips = rng.integers(0, n, size=config.iters) if config.iters else []
    accept_draws = rng.random(size=config.iters) if config.iters else []
    for it in range(config.iters):
        j = int(flips[it])
        delta_bit = -1 if bits[j] else 1
        new_weight = weight + delta_bit * w[j]
        new_profit = profit + delta_bit * p[j]
        new_score = new_profit - penalty * violation(new_weight)
        if new_score >= score or accept_draws[it] < math.exp(
            (new_score - score) / max(temp, 1e-12)
        ):
            bits[j] ^= 1
            weight, profit, score = new_weight, new_profit, new_score
            if violation(weight) == 0 and profit > best:
                best = profit
                trajectory.append(
                    TrajectoryPoint(
                        profit, it + 1, 0, 0.0, time.perf_counter() - t_start, True
                    )
                )
        temp *= config.cooling
    return trajectory


# ---------------------------------------------------------------------------
# Slack binarization and the penalized quadratic form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SlackEncoding:
    """Binary slack turning the weight band into the equality w.x + y = capacity.

    y is encoded in ``num_bits`` binary digits with coefficients 2**(j-1); the
    encoding can represent values up to 2**num_bits - 1, which may exceed the
    gap.  Over-range slack is eliminated later by feasibility post-selection.
    """

    num_bits: int
    coefficients: tuple[int, ...]
    target: int


def slack_binarize(inst: MfkpInstance) -> SlackEncoding:
    s = math.ceil(math.log2(inst.gap + 1)) if inst.gap > 0 else 0
    return SlackEncoding(
        num_bits=s,
        coefficients=tuple(2 ** (j - 1) for j in range(1, s + 1)),
        target=inst.capacity,
    )


@dataclass(frozen=True)
class QuadraticForm:
    """Homogenized ±1 form: F(z) = z^T matrix z + constant.

    Coordinates are (z_0, item variables, slack bits); decoding uses
    x_j = (1 + z_0 * z_j) / 2.  For every ±1 assignment the form value equals
    profit(x) - penalty_weight * (w.x + y - capacity)**2.
    """

    matrix: np.ndarray
    penalty_weight: float
    constant: float
    n_items: int
    slack_bits: int

    @property
    def size(self) -> int:
        return 1 + self.n_items + self.slack_bits

    def evaluate(self, z: np.ndarray) -> float:
        z = np.asarray(z, dtype=np.float64)
        return float(z @ self.matrix @ z + self.constant)

    def decode(self, z: np.ndarray) -> tuple[int, ...]:
        """Item bits from a ±1 assignment (slack bits dropped)."""
        z = np.asarray(z)
        flip = 1 if z[0] > 0 else -1
        return tuple(int((1 + flip * v) // 2) for v in z[1 : 1 + self.n_items])


def build_gw_qform(inst: MfkpInstance) -> QuadraticForm:
    """Lift the instance into the penalized ±1 quadratic form.

    With extended weights (items then slack coefficients), the band violation
    is V(z) = (z_0/2) * (w~ . z~) + kappa with kappa = sum(w~)/2 - capacity, and
    F(z) = profit(z) - rho * V(z)^2 expands into the returned matrix plus a
    constant; rho = 2*sum(p)+1 makes the penalty exact.
    """
    slack = slack_binarize(inst)
    w_ext = np.asarray(list(inst.weights) + list(slack.coefficients), dtype=np.float64)
    p = np.asarray(inst.profits, dtype=np.float64)
    n = inst.n
    s = slack.num_bits
    size = 1 + n + s
    rho = float(2 * sum(inst.profits) + 1)
    kappa = w_ext.sum() / 2.0 - inst.capacity

    Q = np.zeros((size, size))
    # profit: (z_0 / 2) * (p . z_items)
    Q[0, 1 : 1 + n] += p / 4.0
    Q[1 : 1 + n, 0] += p / 4.0
    # penalty cross term: -rho * kappa * z_0 * (w~ . z~)
    Q[0, 1:] += -rho * kappa * w_ext / 2.0
    Q[1:, 0] += -rho * kappa * w_ext / 2.0
    # penalty square term: -(rho / 4) * (w~ . z~)^2, diagonal kept in the matrix
    Q[1:, 1:] += -(rho / 4.0) * np.outer(w_ext, w_ext)
    constant = p.sum() / 2.0 - rho * kappa**2
    return QuadraticForm(
        matrix=Q, penalty_weight=rho, constant=constant, n_items=n, slack_bits=s
    )


# ---------------------------------------------------------------------------
# Low-rank SDP ascent and hyperplane rounding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GramFactor:
    """Unit-norm factor V of a feasible Gram matrix; objective = <Q, V V^T>.

    ``upper_bound`` is a certified relaxation bound obtained from the dual:
    with multipliers lambda_i = <v_i, (QV)_i> shifted so diag(lambda) - Q is
    positive semidefinite, sum(lambda) bounds <Q, X> over every feasible X.
    It is valid even when the ascent stalls short of the true optimum.
    """

    vectors: np.ndarray
    objective: float
    upper_bound: float
    upper_bound_valid: bool


def recommended_rank(size: int) -> int:
    return math.ceil(math.sqrt(2 * size))


def certified_upper_bound(matrix: np.ndarray, V: np.ndarray) -> float:
    """Dual bound on max{<Q, X> : diag(X) = 1, X PSD} from a candidate factor.

    Stationarity multipliers lambda_i = <v_i, (QV)_i>, shifted uniformly by
    the most negative eigenvalue of diag(lambda) - Q, are dual feasible, so
    their sum dominates every feasible primal value.  Tight when V solves the
    relaxation exactly.
    """
    lam = ((matrix @ V) * V).sum(axis=1)
    slack = np.diag(lam) - matrix
    mu = float(np.linalg.eigvalsh(slack)[0])
    return float(lam.sum() - matrix.shape[0] * min(0.0, mu))


def solve_sdp_lowrank(
    form: QuadraticForm,
    rank: int | None = None,
    sweeps: int = 200,
    seed: int = 0,
    tol: float = 1e-9,
) -> GramFactor:
    """Maximize <Q, V V^T> over unit-row factors V by coordinate ascent.

    Each row update replaces v_i with the normalized gradient of its linear
    term, which never decreases the objective; a zero gradient keeps the
    previous vector.  The dominant penalty block makes the landscape
    non-generic, so the ascent can stall below the true relaxation value;
    the returned factor therefore carries a certified dual upper bound in
    addition to its primal objective.
    """
    Q = form.matrix
    size = form.size
    if rank is None:
        rank = recommended_rank(size)
    if rank < 2:
        raise ValueError("rank must be >= 2")
    rng = np.random.default_rng(seed)
    V = rng.standard_normal((size, rank))
    V /= np.linalg.norm(V, axis=1, keepdims=True)

    def objective() -> float:
        return float(((Q @ V) * V).sum())

    prev = objective()
    for _ in range(sweeps):
        for i in range(size):
            g = Q[i] @ V - Q[i, i] * V[i]
            norm = np.linalg.norm(g)
            if norm > 0:
                V[i] = g / norm
            # zero gradient: keep the previous unit vector
        cur = objective()
        if abs(cur - prev) <= tol * max(1.0, abs(prev)):
            prev = cur
            break
        prev = cur
    return GramFactor(
        vectors=V,
        objective=prev,
        upper_bound=certified_upper_bound(Q, V),
        upper_bound_valid=rank >= recommended_rank(size),
    )


def gw_round(
    factor: GramFactor,
    inst: MfkpInstance,
    trials: int,
    seed: int = 0,
) -> Trajectory:
    """Random-hyperplane rounding with feasibility post-selection.

    Each trial signs every Gram vector by its projection onto a standard
    normal direction, flips the global sign so the homogenization coordinate
    is +1, decodes the item bits, and keeps the string only if it lies in the
    weight band.  Improving feasible values are logged with the trial index
    in the oracle-calls column.
    """
    rng = np.random.default_rng(seed)
    V = factor.vectors
    form_n = inst.n
    w = np.asarray(inst.weights, dtype=np.int64)
    p = np.asarray(inst.profits, dtype=np.int64)
    lo = inst.capacity - inst.gap

    trajectory = Trajectory()
    t_start = time.perf_counter()
    best = -1
    for t in range(trials):
        direction = rng.standard_normal(V.shape[1])
        z = np.where(V @ direction >= 0, 1, -1)
        if z[0] < 0:
            z = -z
        x = (1 + z[1 : 1 + form_n]) // 2
        weight = int(w @ x)
        if lo <= weight <= inst.capacity:
            profit = int(p @ x)
            if profit > best:
                best = profit
                trajectory.append(
                    TrajectoryPoint(
                        profit, t + 1, 0, 0.0, time.perf_counter() - t_start, True
                    )
                )
    return trajectory


def gw_solve(
    inst: MfkpInstance,
    rank: int | None = None,
    sweeps: int = 200,
    trials: int = 10_000,
    seed: int = 0,
) -> tuple[Trajectory, GramFactor]:
    """Full pipeline: lift, relax, round. Returns the trajectory and the factor."""
    form = build_gw_qform(inst)
    factor = solve_sdp_lowrank(form, rank=rank, sweeps=sweeps, seed=seed)
    return gw_round(factor, inst, trials, seed=seed + 1), factor
