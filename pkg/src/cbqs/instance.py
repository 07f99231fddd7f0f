"""Problem model: linear constraints over bit strings and gapped knapsack instances.

A linear constraint is a pair (coeffs, bound) meaning ``coeffs . x <= bound``
for bit strings x; coefficients may be negative.  A gapped knapsack instance
(profits, weights, capacity c, gap epsilon) asks to maximize profit subject to
``c - epsilon <= weights . x <= c``, which expands to two linear constraints.

All constraint arithmetic is exact 64-bit integer arithmetic; the generator
keeps magnitudes small enough that no running sum can overflow.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

# Headroom guard for the generator: n * weight_range must stay well below
# 2**63 so that sums of coefficients never overflow int64.
_GENERATOR_MAGNITUDE_CAP = 2**40


class ParseError(ValueError):
    """Raised when an instance file is structurally malformed."""


class ValidationError(ValueError):
    """Raised when parsed values violate the instance invariants."""


class InfeasibleGeneration(RuntimeError):
    """Raised when generated parameters admit no feasible string within the probe budget."""


@dataclass(frozen=True)
class LinearConstraint:
    """A constraint ``coeffs . x <= bound`` on bit strings x."""

    coeffs: tuple[int, ...]
    bound: int

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise ValidationError("constraint needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        object.__setattr__(self, "bound", int(self.bound))

    @property
    def n(self) -> int:
        return len(self.coeffs)

    def satisfied_by(self, bits: Sequence[int]) -> bool:
        return sum(c * int(b) for c, b in zip(self.coeffs, bits)) <= self.bound


@dataclass(frozen=True)
class MfkpInstance:
    """Knapsack instance with a minimum filling constraint.

    Feasible bit strings x satisfy ``capacity - gap <= weights . x <= capacity``;
    the objective is to maximize ``profits . x``.
    """

    profits: tuple[int, ...]
    weights: tuple[int, ...]
    capacity: int
    gap: int

    def __post_init__(self):
        object.__setattr__(self, "profits", tuple(int(p) for p in self.profits))
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        object.__setattr__(self, "capacity", int(self.capacity))
        object.__setattr__(self, "gap", int(self.gap))
        if len(self.profits) != len(self.weights):
            raise ValidationError("profits and weights must have equal length")
        if len(self.profits) < 1:
            raise ValidationError("instance needs at least one item")
        if any(p <= 0 for p in self.profits):
            raise ValidationError("profits must be positive")
        if any(w < 1 for w in self.weights):
            raise ValidationError("weights must be >= 1")
        if self.capacity <= 0:
            raise ValidationError("capacity must be positive")
        if not (0 <= self.gap <= self.capacity):
            raise ValidationError("gap must satisfy 0 <= gap <= capacity")

    @property
    def n(self) -> int:
        return len(self.profits)

    def profit_of(self, bits: Sequence[int]) -> int:
        return sum(p * int(b) for p, b in zip(self.profits, bits))

    def weight_of(self, bits: Sequence[int]) -> int:
        return sum(w * int(b) for w, b in zip(self.weights, bits))

    def is_feasible(self, bits: Sequence[int]) -> bool:
        total = self.weight_of(bits)
        return self.capacity - self.gap <= total <= self.capacity


class OrderingKind(enum.Enum):
    """Item evaluation orders for the sequential sampler."""

    RATIO_DESCENDING = "ratio_desc"      # profit/weight, most efficient first
    RATIO_ASCENDING = "ratio_asc"        # least efficient first
    WEIGHT_ASCENDING = "weight_asc"
    PROFIT_DESCENDING = "profit_desc"
    RANDOM = "random"


@dataclass(frozen=True)
class ItemOrdering:
    """A permutation of item positions; ``permutation[new_pos] = original index``."""

    kind: OrderingKind
    permutation: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.permutation) != list(range(len(self.permutation))):
            raise ValidationError("permutation must be a bijection on item indices")


def minimizing_string(coeffs: Sequence[int]) -> tuple[int, ...]:
    """Bit string minimizing ``coeffs . x``: 0 on nonnegative entries, 1 on negative ones.

    Zero coefficients take the 0 branch (fixed tie-break).
    """
    return tuple(0 if c >= 0 else 1 for c in coeffs)


def prefix_value(coeffs: Sequence[int], bits: Sequence[int], i: int) -> int:
    """Value of ``coeffs . x`` with the first i bits taken from ``bits`` and the
    rest from the minimizing completion.

    ``i = 0`` gives the minimum of the form; ``i = n`` gives the full dot product.
    """
    n = len(coeffs)
    if not 0 <= i <= n:
        raise ValueError(f"prefix index {i} outside 0..{n}")
    xw = minimizing_string(coeffs)
    head = sum(coeffs[k] * int(bits[k]) for k in range(i))
    tail = sum(coeffs[k] * xw[k] for k in range(i, n))
    return head + tail


def mfkp_constraints(inst: MfkpInstance) -> tuple[LinearConstraint, LinearConstraint]:
    """Expand an instance into its two linear constraints.

    Returns ``(w, c)`` and ``(-w, -(c - gap))``; a bit string is feasible for the
    instance iff it satisfies both.
    """
    upper = LinearConstraint(inst.weights, inst.capacity)
    lower = LinearConstraint(
        tuple(-w for w in inst.weights), -(inst.capacity - inst.gap)
    )
    return upper, lower


@dataclass(frozen=True)
class GeneratorParams:
    """Knobs for random instance generation."""

    weight_range: int = 1000
    capacity_fraction: float = 0.5
    gap_fraction: float = 0.05

    def __post_init__(self):
        if self.weight_range < 1:
            raise ValidationError("weight_range must be >= 1")
        for name in ("capacity_fraction", "gap_fraction"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValidationError(f"{name} must lie in (0, 1]")


_FEASIBILITY_PROBES = 100_000


def generate_instance(
    n: int, seed: int, params: GeneratorParams | None = None
) -> MfkpInstance:
    """Draw a random instance, deterministic in (n, seed, params).

    Weights and profits are independent uniform integers in [1, weight_range];
    capacity is ``floor(capacity_fraction * sum(weights))`` and the gap is
    ``max(1, floor(gap_fraction * capacity))`` clamped to the capacity.

    Raises InfeasibleGeneration if no feasible string is found after the probe
    budget (randomized greedy fills); tight gaps on coarse weights can make the
    filling band unreachable.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    params = params or GeneratorParams()
    if n * params.weight_range >= _GENERATOR_MAGNITUDE_CAP:
        raise ValidationError(
            f"n * weight_range must stay below 2^40, got {n * params.weight_range}"
        )
    rng = np.random.default_rng(seed)
    weights = rng.integers(1, params.weight_range + 1, size=n)
    profits = rng.integers(1, params.weight_range + 1, size=n)
    capacity = int(params.capacity_fraction * int(weights.sum()))
    capacity = max(capacity, 0)
    if capacity == 0:
        # Degenerate: only the empty string can fit, and it does.
        return MfkpInstance(tuple(profits), tuple(weights), 1, 1)
    gap = min(capacity, max(1, int(params.gap_fraction * capacity)))
    inst = MfkpInstance(tuple(profits), tuple(weights), capacity, gap)

    if gap == capacity:
        return inst  # all-zeros fills the band
    if not _probe_feasible(inst, rng):
        raise InfeasibleGeneration(
            f"no feasible string found in {_FEASIBILITY_PROBES} probes "
            f"(n={n}, capacity={capacity}, gap={gap})"
        )
    return inst


def _probe_feasible(inst: MfkpInstance, rng: np.random.Generator) -> bool:
    """Randomized greedy fill: permute items, pack while under capacity, test the band."""
    w = np.asarray(inst.weights)
    lo = inst.capacity - inst.gap
    for _ in range(_FEASIBILITY_PROBES):
        order = rng.permutation(inst.n)
        total = 0
        for j in order:
            wj = int(w[j])
            if total + wj <= inst.capacity:
                total += wj
                if total >= lo:
                    return True
        if lo <= total <= inst.capacity:
            return True
    return False


def make_ordering(
    inst: MfkpInstance, kind: OrderingKind, seed: int | None = None
) -> ItemOrdering:
    """Build the permutation realizing an ordering kind; ties keep original index order."""
    n = inst.n
    p = np.asarray(inst.profits, dtype=np.float64)
    w = np.asarray(inst.weights, dtype=np.float64)
    if kind is OrderingKind.RATIO_DESCENDING:
        keys = -(p / w)
    elif kind is OrderingKind.RATIO_ASCENDING:
        keys = p / w
    elif kind is OrderingKind.WEIGHT_ASCENDING:
        keys = w
    elif kind is OrderingKind.PROFIT_DESCENDING:
        keys = -p
    elif kind is OrderingKind.RANDOM:
        if seed is None:
            raise ValueError("RANDOM ordering needs a seed")
        perm = np.random.default_rng(seed).permutation(n)
        return ItemOrdering(kind, tuple(int(i) for i in perm))
    else:  # pragma: no cover
        raise ValueError(f"unknown ordering kind {kind}")
    perm = np.argsort(keys, kind="stable")
    return ItemOrdering(kind, tuple(int(i) for i in perm))


def reorder(
    inst: MfkpInstance, ordering: ItemOrdering
) -> tuple[MfkpInstance, tuple[int, ...]]:
    """Permute instance items; returns the new instance and the applied permutation.

    ``permutation[new_pos] = original index``, so a solution y in the permuted
    space maps back via ``x[permutation[j]] = y[j]``.
    """
    perm = ordering.permutation
    if len(perm) != inst.n:
        raise ValidationError("ordering length does not match instance size")
    permuted = MfkpInstance(
        tuple(inst.profits[i] for i in perm),
        tuple(inst.weights[i] for i in perm),
        inst.capacity,
        inst.gap,
    )
    return permuted, perm


def permute_solution_back(bits: Sequence[int], permutation: Sequence[int]) -> tuple[int, ...]:
    """Map a solution of the reordered instance back to original item positions."""
    out = [0] * len(permutation)
    for new_pos, orig in enumerate(permutation):
        out[orig] = int(bits[new_pos])
    return tuple(out)


# ---------------------------------------------------------------------------
# File format: keyed UTF-8 text, one key per line, '#' starts a comment.
#
#   n 3
#   c 5
#   epsilon 1
#   p 6 10 12
#   w 1 2 3
# ---------------------------------------------------------------------------

_REQUIRED_KEYS = ("n", "c", "epsilon", "p", "w")


def write_instance(inst: MfkpInstance, path) -> None:
    lines = [
        f"n {inst.n}",
        f"c {inst.capacity}",
        f"epsilon {inst.gap}",
        "p " + " ".join(str(v) for v in inst.profits),
        "w " + " ".join(str(v) for v in inst.weights),
    ]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_instance(path) -> MfkpInstance:
    """Parse an instance file; ParseError carries line/field diagnostics."""
    fields: dict[str, list[str]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            key, values = parts[0], parts[1:]
            if key not in _REQUIRED_KEYS:
                raise ParseError(f"{path}:{lineno}: unknown key {key!r}")
            if key in fields:
                raise ParseError(f"{path}:{lineno}: duplicate key {key!r}")
            if not values:
                raise ParseError(f"{path}:{lineno}: key {key!r} has no value")
            fields[key] = values

    for key in _REQUIRED_KEYS:
        if key not in fields:
            raise ParseError(f"{path}: missing field {key!r}")

    def as_int(key: str, token: str) -> int:
        try:
            return int(token)
        except ValueError:
            raise ParseError(f"{path}: field {key!r}: not an integer: {token!r}") from None

    n = as_int("n", fields["n"][0])
    capacity = as_int("c", fields["c"][0])
    gap = as_int("epsilon", fields["epsilon"][0])
    profits = [as_int("p", t) for t in fields["p"]]
    weights = [as_int("w", t) for t in fields["w"]]
    if len(profits) != n:
        raise ParseError(f"{path}: field 'p' has {len(profits)} entries, expected n={n}")
    if len(weights) != n:
        raise ParseError(f"{path}: field 'w' has {len(weights)} entries, expected n={n}")
    return MfkpInstance(tuple(profits), tuple(weights), capacity, gap)
