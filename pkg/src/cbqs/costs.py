"""Cycle and qubit model for the search circuits.

A cycle is one layer of gates on disjoint qubits; controlled single-qubit
unitaries and Toffolis cost one cycle each, and logical gates run at
``cycle_time_seconds`` (default 10 ns).  Concrete per-gadget depth formulas
are documented in docs/cost_model.md; the two depth coefficients let
sensitivity analyses rescale the adder and comparison gadgets.

Nothing here executes circuits; the model only counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .instance import MfkpInstance, mfkp_constraints
from .sampler import initial_budgets


@dataclass(frozen=True)
class CostParams:
    """Hardware and gadget-depth assumptions.

    ``register_bits`` optionally pins register widths: integer keys give the
    width of constraint register k, the key "objective" gives the objective
    register width.  Widths not pinned are derived from the instance so that
    worst-case running sums fit.
    """

    cycle_time_seconds: float = 1e-8
    adder_depth_coefficient: float = 1.0
    comparison_depth_coefficient: float = 1.0
    register_bits: dict | None = None

    def __post_init__(self):
        if self.cycle_time_seconds <= 0:
            raise ValueError("cycle_time_seconds must be positive")
        if self.adder_depth_coefficient <= 0:
            raise ValueError("adder_depth_coefficient must be positive")
        if self.comparison_depth_coefficient <= 0:
            raise ValueError("comparison_depth_coefficient must be positive")


@dataclass(frozen=True)
class CycleReport:
    """Cycle and qubit totals for one state-preparation/search configuration."""

    stateprep_cycles: int
    oracle_cycles: int
    diffusion_cycles: int
    grover_iteration_cycles: int
    lookahead_extra_cycles: int
    qubits_total: int
    qubits_ancilla_lookahead: int

    def __post_init__(self):
        expected = 2 * self.stateprep_cycles + self.oracle_cycles + self.diffusion_cycles
        if self.grover_iteration_cycles != expected:
            raise ValueError("grover_iteration_cycles must equal 2*stateprep + oracle + diffusion")
        for name in (
            "stateprep_cycles",
            "oracle_cycles",
            "diffusion_cycles",
            "lookahead_extra_cycles",
            "qubits_total",
            "qubits_ancilla_lookahead",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


def _value_bits(v: int) -> int:
    """Bits needed to hold the nonnegative integer v (at least 1)."""
    return max(1, int(v).bit_length())


def register_widths(inst: MfkpInstance, params: CostParams) -> tuple[list[int], int]:
    """(constraint register widths, objective register width).

    A constraint register holds the running budget plus a sign qubit; during
    the subtract-then-recheck step the value can briefly dip by the largest
    coefficient magnitude, so the width covers max(initial budget, max |w|).
    """
    constraints = mfkp_constraints(inst)
    budgets = initial_budgets(list(constraints))
    pinned = params.register_bits or {}
    widths = []
    for k, (c, p0) in enumerate(zip(constraints, budgets)):
        if k in pinned:
            widths.append(int(pinned[k]))
        else:
            max_abs = max(abs(w) for w in c.coeffs)
            widths.append(_value_bits(max(p0, max_abs)) + 1)
    if "objective" in pinned:
        objective = int(pinned["objective"])
    else:
        objective = _value_bits(sum(inst.profits))
    return widths, objective


def stateprep_cycles(inst: MfkpInstance, params: CostParams, d: int = 0) -> CycleReport:
    """Cycle and qubit totals for preparing the constrained superposition.

    Per variable and per constraint register: one subtraction of |w_i|, one
    controlled re-addition (depth ``adder_depth_coefficient * width`` each)
    and one sign-check/rotation/uncompute bundle (three unit gates scaled by
    ``comparison_depth_coefficient``); per variable one controlled addition
    onto the objective register.  A look-ahead of depth d >= 1 adds exactly
    4*n*d cycles and ``2**(d+1) * L_max`` ancilla qubits.
    """
    if d < 0:
        raise ValueError("look-ahead depth must be nonnegative")
    n = inst.n
    widths, obj_bits = register_widths(inst, params)
    a = params.adder_depth_coefficient
    c = params.comparison_depth_coefficient

    adder = lambda bits: math.ceil(a * bits)
    compare = math.ceil(3 * c)

    per_variable = sum(2 * adder(w) + compare for w in widths) + adder(obj_bits)
    lookahead_extra = 4 * n * d if d >= 1 else 0
    prep = n * per_variable + lookahead_extra

    oracle = compare  # objective-register threshold test
    main_qubits = n + sum(widths) + obj_bits
    diffusion = 2 * math.ceil(math.log2(main_qubits)) + 1

    ancilla = (2 ** (d + 1)) * max(widths) if d >= 1 else 0
    return CycleReport(
        stateprep_cycles=prep,
        oracle_cycles=oracle,
        diffusion_cycles=diffusion,
        grover_iteration_cycles=2 * prep + oracle + diffusion,
        lookahead_extra_cycles=lookahead_extra,
        qubits_total=main_qubits + ancilla,
        qubits_ancilla_lookahead=ancilla,
    )


def copy_cycles(m: int) -> int:
    """Cycles to fan an integer register out into m copies by doubling: ceil(log2 m)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return (m - 1).bit_length()


def lookahead_biasing_cycles(d: int) -> int:
    """Cycles to tally window survivor counts at depth d: ceil(d * log2 d)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return math.ceil(d * math.log2(d))


def lookahead_biasing_qubits(d: int) -> int:
    """Ancilla qubits for the survivor tally: 2**(d+1) * d."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return (2 ** (d + 1)) * d


def cycles_to_seconds(cycles: float, params: CostParams) -> float:
    if cycles < 0:
        raise ValueError("cycles must be nonnegative")
    return cycles * params.cycle_time_seconds
