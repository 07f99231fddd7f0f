"""Sequential constraint-aware sampling of bit strings.

The sampler assigns bits left to right while tracking, for every linear
constraint, the remaining budget ``P_k = bound_k - (value of the partial
assignment completed by the constraint's minimizing string)``.  A bit value
that would make some budget negative can never lead to a string satisfying
that constraint, so the step either samples freely (both values survive),
forces the surviving value, or hits a dead end (neither survives).

With a single constraint the procedure is exact: every emitted string
satisfies the constraint and every satisfying string has positive
probability.  With several constraints dead ends are possible; a dead-ended
string is completed deterministically with the first constraint's minimizing
bits and flagged infeasible, which keeps the output distribution normalized.

Free steps draw from per-item probabilities that blend a reference-string
bias of strength ``b`` (probability ``(b+1)/(b+2)`` of copying the reference
bit) with an instance-structure function g weighted by a mixing factor ``f``.
An optional look-ahead of depth d replaces the one-step branch test by an
exhaustive test over the next d+1 positions.

Scalar entry points return full per-step traces; ``*_batch`` variants
vectorize over samples and are used by the benchmark drivers.  All entry
points take an explicit ``numpy.random.Generator``; none mutate shared state.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .instance import LinearConstraint, MfkpInstance, minimizing_string


class UnsatisfiableConstraint(ValueError):
    """Raised when a constraint is violated even by its own minimizing string."""


class StepKind(enum.Enum):
    FREE = "free"
    FORCED0 = "forced-0"
    FORCED1 = "forced-1"
    DEAD_END = "dead-end"


@dataclass(frozen=True)
class SampleOutcome:
    """One sampled bit string with its per-step decision trace.

    ``dead_end_at`` is the first position where neither bit value could keep
    every constraint individually satisfiable; from there on the string is
    the first constraint's minimizing completion and ``feasible`` is False.
    """

    bits: tuple[int, ...]
    feasible: bool
    dead_end_at: int | None
    trace: tuple[StepKind, ...]


@dataclass(frozen=True)
class BiasSpec:
    """Per-item free-branch probabilities plus look-ahead configuration.

    ``strength`` is the reference bias b: at f=0 the reference bit is copied
    with probability (b+1)/(b+2).  ``mixing`` is the factor f weighting the
    structure function values ``g_values`` against the reference bias.
    ``lookahead_blend`` mixes the window survivor-count ratio into the free
    probability when ``lookahead_biasing`` is on (0 disables the blend, which
    is the default).
    """

    reference: tuple[int, ...]
    strength: float
    mixing: float = 0.0
    g_values: tuple[float, ...] | None = None
    lookahead_depth: int = 0
    lookahead_biasing: bool = False
    lookahead_blend: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "reference", tuple(int(b) for b in self.reference))
        if any(b not in (0, 1) for b in self.reference):
            raise ValueError("reference must be a bit string")
        if not (self.strength >= 0 and math.isfinite(self.strength)):
            raise ValueError("strength must be a finite nonnegative real")
        if self.mixing < 0:
            raise ValueError("mixing must be nonnegative")
        if self.lookahead_depth < 0:
            raise ValueError("lookahead_depth must be nonnegative")
        if not 0.0 <= self.lookahead_blend <= 1.0:
            raise ValueError("lookahead_blend must lie in [0, 1]")
        if self.g_values is not None:
            g = tuple(float(v) for v in self.g_values)
            if len(g) != len(self.reference):
                raise ValueError("g_values length must match reference length")
            if any(not 0.0 <= v <= 1.0 for v in g):
                raise ValueError("g_values must lie in [0, 1]")
            object.__setattr__(self, "g_values", g)

    @property
    def n(self) -> int:
        return len(self.reference)

    @classmethod
    def uniform(cls, n: int) -> "BiasSpec":
        """Unbiased spec: every free step draws 0/1 with probability 1/2."""
        return cls(reference=(0,) * n, strength=0.0)

    @classmethod
    def for_instance(
        cls,
        inst: MfkpInstance,
        reference: Sequence[int],
        strength: float | None = None,
        mixing: float = 0.0,
        lookahead_depth: int = 0,
        lookahead_biasing: bool = False,
        lookahead_blend: float = 0.0,
    ) -> "BiasSpec":
        """Build a spec with g computed from the instance; b defaults to n/4."""
        if strength is None:
            strength = inst.n / 4
        return cls(
            reference=tuple(reference),
            strength=strength,
            mixing=mixing,
            g_values=bias_g_values(inst),
            lookahead_depth=lookahead_depth,
            lookahead_biasing=lookahead_biasing,
            lookahead_blend=lookahead_blend,
        )

    def recentered(self, reference: Sequence[int]) -> "BiasSpec":
        """Same spec with a new reference string."""
        return BiasSpec(
            reference=tuple(reference),
            strength=self.strength,
            mixing=self.mixing,
            g_values=self.g_values,
            lookahead_depth=self.lookahead_depth,
            lookahead_biasing=self.lookahead_biasing,
            lookahead_blend=self.lookahead_blend,
        )

    def probabilities(self) -> np.ndarray:
        """(n, 2) array with row j = (q0(j), q1(j)); rows sum to exactly 1."""
        out = np.empty((self.n, 2))
        for j in range(self.n):
            out[j, 0], out[j, 1] = bias_probability(self, j)
        return out


def bias_probability(bias: BiasSpec, j: int) -> tuple[float, float]:
    """Free-branch probabilities (q0, q1) for item j.

    q1 = (1/(1+f)) * ((b*x_j + 1)/(b+2) + f*g(j)) with x the reference string;
    q0 is returned as 1 - q1 so the pair sums to 1 exactly.
    """
    b = bias.strength
    f = bias.mixing
    x = bias.reference[j]
    g = 0.5 if bias.g_values is None else bias.g_values[j]
    q1 = ((b * x + 1.0) / (b + 2.0) + f * g) / (1.0 + f)
    return 1.0 - q1, q1


def bias_g(inst: MfkpInstance, j: int) -> float:
    """Structure bias for item j: cost-relative interpolation for efficient items.

    Items with profit/weight > 1 get a value interpolated from 0.8 (cheapest
    relative to capacity) down to 0.2 (most expensive); all other items get
    0.2.  If every item has the same relative cost the 0.8 endpoint applies.
    """
    if inst.profits[j] <= inst.weights[j]:  # efficiency p/w <= 1
        return 0.2
    ratios = [w / inst.capacity for w in inst.weights]
    rmin, rmax = min(ratios), max(ratios)
    if rmax == rmin:
        return 0.8
    return (-0.6 / (rmax - rmin)) * (ratios[j] - rmin) + 0.8


def bias_g_values(inst: MfkpInstance) -> tuple[float, ...]:
    return tuple(bias_g(inst, j) for j in range(inst.n))


# ---------------------------------------------------------------------------
# Branch feasibility tests
# ---------------------------------------------------------------------------


def initial_budgets(constraints: Sequence[LinearConstraint]) -> list[int]:
    """Budgets ``bound_k - min over bit strings of (coeffs_k . x)``.

    Raises UnsatisfiableConstraint if any constraint cannot be met at all.
    """
    budgets = []
    for c in constraints:
        xw = minimizing_string(c.coeffs)
        p = c.bound - sum(w * b for w, b in zip(c.coeffs, xw))
        if p < 0:
            raise UnsatisfiableConstraint(
                f"constraint with bound {c.bound} unsatisfiable (minimum {c.bound - p})"
            )
        budgets.append(p)
    return budgets


def branch_flags(
    constraints: Sequence[LinearConstraint], budgets: Sequence[int], i: int
) -> tuple[bool, bool]:
    """One-step branch test at position i.

    ``b1`` is True when assigning bit 1 cannot by itself break any single
    constraint (all nonnegative coefficients fit their budgets); ``b0``
    symmetrically for bit 0 against negative coefficients.
    """
    b0 = True
    b1 = True
    for c, p in zip(constraints, budgets):
        w = c.coeffs[i]
        if w >= 0:
            b1 = b1 and p >= w
        else:
            b0 = b0 and p >= -w
    return b0, b1


class LookaheadTables:
    """Precomputed window consumption sums for look-ahead tests.

    For each start position i and each assignment of the window bits
    i..min(i+d, n-1) (LSB of the assignment index = position i), stores how
    much budget each constraint would consume over the whole window.  Budgets
    only ever decrease, so a window assignment keeps a constraint's step-wise
    criterion intact exactly when the current budget covers its total window
    consumption.
    """

    def __init__(self, constraints: Sequence[LinearConstraint], depth: int):
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        self.depth = depth
        self.n = constraints[0].n
        self.m = len(constraints)
        abs_w = [np.abs(np.asarray(c.coeffs, dtype=np.int64)) for c in constraints]
        xw = [np.asarray(minimizing_string(c.coeffs), dtype=np.int64) for c in constraints]
        self.consumption: list[np.ndarray] = []  # per i: (2**L_i, m) int64
        self.first_bit: list[np.ndarray] = []    # per i: (2**L_i,) values of bit at position i
        for i in range(self.n):
            length = min(depth + 1, self.n - i)
            assigns = np.arange(2**length)
            bits = (assigns[:, None] >> np.arange(length)[None, :]) & 1  # (A, L)
            cons = np.empty((2**length, self.m), dtype=np.int64)
            for k in range(self.m):
                mismatch = bits != xw[k][i : i + length][None, :]
                cons[:, k] = mismatch @ abs_w[k][i : i + length]
            self.consumption.append(cons)
            self.first_bit.append(bits[:, 0].astype(bool))

    def counts(self, budgets, i: int) -> tuple[int, int]:
        """Number of window assignments starting with bit 0 / bit 1 that fit all budgets."""
        p = np.asarray(budgets, dtype=np.int64)
        ok = (self.consumption[i] <= p[None, :]).all(axis=1)
        one = self.first_bit[i]
        return int(ok[~one].sum()), int(ok[one].sum())

    def counts_batch(self, budgets: np.ndarray, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized ``counts`` for a (S, m) budget matrix; returns (S,) count arrays."""
        cons = self.consumption[i]
        one = self.first_bit[i]
        n0 = np.zeros(budgets.shape[0], dtype=np.int64)
        n1 = np.zeros(budgets.shape[0], dtype=np.int64)
        for a in range(cons.shape[0]):
            ok = (budgets >= cons[a][None, :]).all(axis=1)
            if one[a]:
                n1 += ok
            else:
                n0 += ok
        return n0, n1


def lookahead_flags(
    constraints: Sequence[LinearConstraint],
    budgets: Sequence[int],
    i: int,
    d: int,
    tables: LookaheadTables | None = None,
) -> tuple[bool, bool]:
    """Depth-d branch test: a bit value survives when some assignment of the
    next d positions keeps every constraint's step criterion intact.

    d=0 coincides with ``branch_flags``.
    """
    if tables is None or tables.depth != d:
        tables = LookaheadTables(constraints, d)
    n0, n1 = tables.counts(budgets, i)
    return n0 > 0, n1 > 0


def lookahead_counts(
    constraints: Sequence[LinearConstraint],
    budgets: Sequence[int],
    i: int,
    d: int,
    tables: LookaheadTables | None = None,
) -> tuple[int, int]:
    """Survivor counts (n0, n1) over the depth-d window; n_v = 0 iff flag v is False."""
    if d < 1:
        raise ValueError("lookahead_counts needs d >= 1")
    if tables is None or tables.depth != d:
        tables = LookaheadTables(constraints, d)
    return tables.counts(budgets, i)


# ---------------------------------------------------------------------------
# Scalar sampling
# ---------------------------------------------------------------------------


def sample_single(
    constraint: LinearConstraint,
    probs: np.ndarray,
    rng: np.random.Generator,
) -> tuple[int, ...]:
    """Sample a bit string satisfying one constraint, guaranteed.

    ``probs`` is the (n, 2) free-branch probability table.  Positions whose
    budget cannot absorb the consuming bit value are forced to the
    constraint's minimizing bit.
    """
    xw = minimizing_string(constraint.coeffs)
    (budget,) = initial_budgets([constraint])
    bits = []
    for i, w in enumerate(constraint.coeffs):
        a = abs(w)
        if budget >= a:
            v = 1 if rng.random() < probs[i, 1] else 0
            if v != xw[i]:
                budget -= a
        else:
            v = xw[i]
        bits.append(v)
    return tuple(bits)


def _free_probs(
    bias: BiasSpec,
    probs: np.ndarray,
    i: int,
    budgets,
    tables: LookaheadTables | None,
) -> tuple[float, float]:
    """Free-branch (q0, q1) at step i, including the optional survivor-count blend."""
    q0, q1 = probs[i, 0], probs[i, 1]
    if bias.lookahead_biasing and bias.lookahead_depth >= 1 and bias.lookahead_blend > 0:
        n0, n1 = tables.counts(budgets, i)
        ratio = n1 / (n0 + n1)
        q1 = (1.0 - bias.lookahead_blend) * q1 + bias.lookahead_blend * ratio
        q0 = 1.0 - q1
    return float(q0), float(q1)


def sample_multi(
    constraints: Sequence[LinearConstraint],
    bias: BiasSpec,
    rng: np.random.Generator,
    tables: LookaheadTables | None = None,
    _force_lookahead: bool = False,
) -> SampleOutcome:
    """Sample a bit string trying to satisfy every constraint.

    Each step applies the four-outcome rule: sample freely when both bit
    values survive the branch test, force the single survivor, or record a
    dead end and complete with the first constraint's minimizing bits.
    Budgets are consumed exactly when the assigned bit differs from a
    constraint's minimizing bit.

    ``tables`` may carry precomputed look-ahead windows for reuse across
    samples; ``_force_lookahead`` routes flag evaluation through the depth-0
    look-ahead path even when depth is 0 (the two paths are equivalent).
    """
    n = constraints[0].n
    if bias.n != n:
        raise ValueError("bias length does not match constraint length")
    d = bias.lookahead_depth
    use_lookahead = d >= 1 or _force_lookahead
    if use_lookahead and (tables is None or tables.depth != d):
        tables = LookaheadTables(constraints, d)
    probs = bias.probabilities()
    xw = [minimizing_string(c.coeffs) for c in constraints]
    budgets = initial_budgets(constraints)

    bits: list[int] = []
    trace: list[StepKind] = []
    dead_end_at: int | None = None
    for i in range(n):
        if use_lookahead:
            n0, n1 = tables.counts(budgets, i)
            b0, b1 = n0 > 0, n1 > 0
        else:
            b0, b1 = branch_flags(constraints, budgets, i)
        if b0 and b1:
            q0, q1 = _free_probs(bias, probs, i, budgets, tables)
            v = 1 if rng.random() < q1 else 0
            trace.append(StepKind.FREE)
        elif b0:
            v = 0
            trace.append(StepKind.FORCED0)
        elif b1:
            v = 1
            trace.append(StepKind.FORCED1)
        else:
            dead_end_at = i
            bits.extend(xw[0][i:])
            trace.extend([StepKind.DEAD_END] * (n - i))
            break
        bits.append(v)
        for k, c in enumerate(constraints):
            if v != xw[k][i]:
                budgets[k] -= abs(c.coeffs[i])

    feasible = all(c.satisfied_by(bits) for c in constraints)
    return SampleOutcome(tuple(bits), feasible, dead_end_at, tuple(trace))


def path_probability(
    constraints: Sequence[LinearConstraint],
    bias: BiasSpec,
    y: Sequence[int],
    tables: LookaheadTables | None = None,
    _force_lookahead: bool = False,
) -> float:
    """Exact probability that ``sample_multi`` outputs the string y.

    Replays the deterministic flag logic along y's prefix, multiplying the
    free-branch probabilities; forced steps contribute factor 1, and any
    contradiction with a forced bit or a dead-end completion gives 0.
    Summed over all strings the result is a normalized distribution.
    """
    n = constraints[0].n
    y = tuple(int(b) for b in y)
    if len(y) != n:
        raise ValueError("string length does not match constraints")
    d = bias.lookahead_depth
    use_lookahead = d >= 1 or _force_lookahead
    if use_lookahead and (tables is None or tables.depth != d):
        tables = LookaheadTables(constraints, d)
    probs = bias.probabilities()
    xw = [minimizing_string(c.coeffs) for c in constraints]
    budgets = initial_budgets(constraints)

    prob = 1.0
    for i in range(n):
        if use_lookahead:
            n0, n1 = tables.counts(budgets, i)
            b0, b1 = n0 > 0, n1 > 0
        else:
            b0, b1 = branch_flags(constraints, budgets, i)
        if b0 and b1:
            q0, q1 = _free_probs(bias, probs, i, budgets, tables)
            prob *= q1 if y[i] == 1 else q0
        elif b0 or b1:
            forced = 0 if b0 else 1
            if y[i] != forced:
                return 0.0
        else:
            return prob if y[i:] == xw[0][i:] else 0.0
        for k, c in enumerate(constraints):
            if y[i] != xw[k][i]:
                budgets[k] -= abs(c.coeffs[i])
    return prob


# ---------------------------------------------------------------------------
# Vectorized sampling and exact distributions
# ---------------------------------------------------------------------------


def _bit_column(indices: np.ndarray, i: int) -> np.ndarray:
    return ((indices >> i) & 1).astype(np.int64)


def sample_single_batch(
    constraint: LinearConstraint,
    probs: np.ndarray,
    rng: np.random.Generator,
    size: int,
) -> np.ndarray:
    """Vectorized ``sample_single``; returns a (size, n) uint8 matrix."""
    n = constraint.n
    xw = np.asarray(minimizing_string(constraint.coeffs), dtype=np.uint8)
    (p0,) = initial_budgets([constraint])
    budget = np.full(size, p0, dtype=np.int64)
    out = np.empty((size, n), dtype=np.uint8)
    for i, w in enumerate(constraint.coeffs):
        a = abs(w)
        free = budget >= a
        draw = (rng.random(size) < probs[i, 1]).astype(np.uint8)
        bits = np.where(free, draw, xw[i])
        consumed = free & (bits != xw[i])
        budget -= a * consumed
        out[:, i] = bits
    return out


def sample_multi_batch(
    constraints: Sequence[LinearConstraint],
    bias: BiasSpec,
    rng: np.random.Generator,
    size: int,
    tables: LookaheadTables | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized ``sample_multi`` without per-step traces.

    Returns ``(bits, feasible, dead_end_at)`` with shapes (size, n), (size,),
    (size,); ``dead_end_at`` is -1 for samples that never dead-ended.
    """
    n = constraints[0].n
    m = len(constraints)
    d = bias.lookahead_depth
    use_lookahead = d >= 1
    if use_lookahead and (tables is None or tables.depth != d):
        tables = LookaheadTables(constraints, d)
    probs = bias.probabilities()
    xw = np.array([minimizing_string(c.coeffs) for c in constraints], dtype=np.int64)
    coeffs = np.array([c.coeffs for c in constraints], dtype=np.int64)
    budgets = np.tile(
        np.asarray(initial_budgets(constraints), dtype=np.int64), (size, 1)
    )  # (S, m)

    bits = np.empty((size, n), dtype=np.uint8)
    alive = np.ones(size, dtype=bool)
    dead_end_at = np.full(size, -1, dtype=np.int64)
    blend = bias.lookahead_blend if (bias.lookahead_biasing and use_lookahead) else 0.0
    for i in range(n):
        if use_lookahead:
            n0, n1 = tables.counts_batch(budgets, i)
            b0, b1 = n0 > 0, n1 > 0
        else:
            b0 = np.ones(size, dtype=bool)
            b1 = np.ones(size, dtype=bool)
            for k in range(m):
                w = int(coeffs[k, i])
                if w >= 0:
                    b1 &= budgets[:, k] >= w
                else:
                    b0 &= budgets[:, k] >= -w
        free = alive & b0 & b1
        forced0 = alive & b0 & ~b1
        forced1 = alive & b1 & ~b0
        dead = alive & ~b0 & ~b1

        q1 = np.full(size, probs[i, 1])
        if blend > 0.0:
            with np.errstate(invalid="ignore"):
                ratio = np.where(n0 + n1 > 0, n1 / np.maximum(n0 + n1, 1), 0.0)
            q1 = (1.0 - blend) * q1 + blend * ratio
        draw = (rng.random(size) < q1).astype(np.uint8)
        col = np.zeros(size, dtype=np.uint8)
        col[free] = draw[free]
        col[forced1] = 1
        # forced0 stays 0
        col[~alive] = xw[0, i]  # continue minimizing completion after a dead end
        col[dead] = xw[0, i]
        bits[:, i] = col
        dead_end_at[dead] = i
        alive &= ~dead

        live_col = col.astype(np.int64)
        for k in range(m):
            consumed = alive & (live_col != xw[k, i])
            budgets[:, k] -= np.abs(coeffs[k, i]) * consumed

    totals = bits.astype(np.int64) @ coeffs.T  # (S, m)
    bounds = np.array([c.bound for c in constraints], dtype=np.int64)
    feasible = (totals <= bounds[None, :]).all(axis=1)
    return bits, feasible, dead_end_at


_DEFAULT_CHUNK = 1 << 20


def distribution(
    constraints: Sequence[LinearConstraint],
    bias: BiasSpec,
    tables: LookaheadTables | None = None,
    chunk: int = _DEFAULT_CHUNK,
) -> np.ndarray:
    """Exact output distribution of ``sample_multi`` over all 2**n strings.

    Index encoding: bit i of the array index is the value of position i
    (LSB first).  The returned vector sums to 1.
    """
    n = constraints[0].n
    if n > 25:
        raise ValueError("exact distribution limited to n <= 25")
    total = 1 << n
    out = np.empty(total)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        out[start : start + len(idx)] = _distribution_chunk(
            constraints, bias, idx, tables
        )
    return out


def _distribution_chunk(
    constraints: Sequence[LinearConstraint],
    bias: BiasSpec,
    idx: np.ndarray,
    tables: LookaheadTables | None,
) -> np.ndarray:
    n = constraints[0].n
    m = len(constraints)
    d = bias.lookahead_depth
    use_lookahead = d >= 1
    if use_lookahead and (tables is None or tables.depth != d):
        tables = LookaheadTables(constraints, d)
    probs = bias.probabilities()
    xw = np.array([minimizing_string(c.coeffs) for c in constraints], dtype=np.int64)
    coeffs = np.array([c.coeffs for c in constraints], dtype=np.int64)
    size = len(idx)
    budgets = np.tile(np.asarray(initial_budgets(constraints), dtype=np.int64), (size, 1))
    blend = bias.lookahead_blend if (bias.lookahead_biasing and use_lookahead) else 0.0

    # suffix_match_from[s] = smallest position t such that bits t.. of string s
    # equal the first constraint's minimizing completion from t on.
    cum_ok = np.ones(size, dtype=bool)
    match_from = np.full(size, n, dtype=np.int64)
    for i in reversed(range(n)):
        cum_ok &= _bit_column(idx, i) == xw[0, i]
        match_from[cum_ok] = i

    prob = np.ones(size)
    active = np.ones(size, dtype=bool)  # still following the free/forced path
    for i in range(n):
        col = _bit_column(idx, i)
        if use_lookahead:
            n0, n1 = tables.counts_batch(budgets, i)
            b0, b1 = n0 > 0, n1 > 0
        else:
            b0 = np.ones(size, dtype=bool)
            b1 = np.ones(size, dtype=bool)
            for k in range(m):
                w = int(coeffs[k, i])
                if w >= 0:
                    b1 &= budgets[:, k] >= w
                else:
                    b0 &= budgets[:, k] >= -w
        q1 = np.full(size, probs[i, 1])
        if blend > 0.0:
            ratio = np.where(n0 + n1 > 0, n1 / np.maximum(n0 + n1, 1), 0.0)
            q1 = (1.0 - blend) * q1 + blend * ratio

        free = active & b0 & b1
        forced0 = active & b0 & ~b1
        forced1 = active & b1 & ~b0
        dead = active & ~b0 & ~b1

        prob[free] *= np.where(col[free] == 1, q1[free], 1.0 - q1[free])
        prob[forced0 & (col == 1)] = 0.0
        prob[forced1 & (col == 0)] = 0.0
        # dead end: the full prefix mass lands on the single minimizing completion
        prob[dead & (match_from > i)] = 0.0
        active &= ~dead
        active &= prob > 0.0

        consuming = active
        for k in range(m):
            consumed = consuming & (col != xw[k, i])
            budgets[:, k] -= np.abs(coeffs[k, i]) * consumed
    return prob
