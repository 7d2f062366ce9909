"""Equivalence levels and derivation traces.

Every rewrite step carries the strength of the identity it invokes.
Composing steps keeps the weakest level seen, so a trace's overall
level is the honest strength of the derived identity.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from opslab.calculus.expressions import SpaceExpr, pretty
from opslab.errors import InvalidParameter

__all__ = ["Level", "Step", "Trace"]


class Level(enum.IntEnum):
    """Totally ordered; higher value = stronger equivalence."""

    ISOMORPHIC = 1
    ISOMETRIC = 2
    COMPLETELY_ISOMETRIC = 3

    def __str__(self) -> str:
        return {
            Level.ISOMORPHIC: "isomorphic",
            Level.ISOMETRIC: "isometric",
            Level.COMPLETELY_ISOMETRIC: "completely-isometric",
        }[self]

    @staticmethod
    def combine(levels) -> "Level":
        levels = list(levels)
        if not levels:
            return Level.COMPLETELY_ISOMETRIC
        return min(levels)


@dataclass(frozen=True)
class Step:
    """One rewrite: rule id, whole-expression before/after, level, citation.

    The citation states the mathematical identity the step invokes, so a
    reader can check each link of the chain independently.
    """

    rule: str
    before: SpaceExpr
    after: SpaceExpr
    level: Level
    citation: str

    def __str__(self) -> str:
        return (
            f"[{self.rule}] {pretty(self.before)}  ->  {pretty(self.after)}"
            f"  ({self.level}; {self.citation})"
        )


@dataclass
class Trace:
    steps: list[Step] = field(default_factory=list)

    def append(self, step: Step):
        if self.steps and self.steps[-1].after != step.before:
            raise InvalidParameter("trace steps must chain: before != previous after")
        self.steps.append(step)

    def extend(self, other: "Trace"):
        for step in other.steps:
            self.append(step)

    @property
    def level(self) -> Level:
        return Level.combine(step.level for step in self.steps)

    @property
    def final(self) -> SpaceExpr | None:
        return self.steps[-1].after if self.steps else None

    def __iter__(self):
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)

    def render(self) -> str:
        if not self.steps:
            return "(no rewrite steps)"
        lines = [str(step) for step in self.steps]
        lines.append(f"overall level: {self.level}")
        return "\n".join(lines)
