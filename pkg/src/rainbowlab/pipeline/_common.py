from __future__ import annotations

import math
from dataclasses import dataclass, field

STAGES = ("partition", "long-path", "star-matching", "expander", "boosters", "done")


@dataclass(frozen=True)
class Failure:
    """A reported (not raised) failure of one construction step."""
    stage: str
    reason: str
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return False


def loglog(n: int) -> float:
    return math.log(math.log(n))


def edge_key(a: int, b: int):
    return (a, b) if a < b else (b, a)
