"""Incumbent trajectories: time series of best-so-far objective values.

Quantum-style runs are measured in modeled seconds derived from the cycle
model; classical baselines are measured in wall seconds.  Both kinds of run
emit the same record shape so they can be merged into one comparison table.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class TrajectoryPoint:
    incumbent_value: int
    oracle_calls: int
    cycles: int
    modeled_seconds: float
    wall_seconds: float
    feasible: bool = True


@dataclass
class Trajectory:
    """Sequence of incumbent improvements with cumulative cost counters."""

    points: list[TrajectoryPoint] = field(default_factory=list)

    def append(self, point: TrajectoryPoint) -> None:
        if self.points:
            last = self.points[-1]
            if point.incumbent_value < last.incumbent_value:
                raise ValueError("incumbent value must be non-decreasing")
            for name in ("oracle_calls", "cycles", "modeled_seconds", "wall_seconds"):
                if getattr(point, name) < getattr(last, name):
                    raise ValueError(f"{name} must be non-decreasing")
        if not point.feasible:
            raise ValueError("trajectories record feasible incumbents only")
        self.points.append(point)

    def validate(self) -> None:
        """Re-check all invariants; raises ValueError on the first violation."""
        rebuilt = Trajectory()
        for p in self.points:
            rebuilt.append(p)

    @property
    def final_value(self) -> int | None:
        return self.points[-1].incumbent_value if self.points else None

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)
