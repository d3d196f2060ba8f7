"""Duo-component edge weights: (violation, travel) with lexicographic order.

Violation always outranks travel, which realizes a dominance constant that
is "large enough" without picking a number. Unreachability is the single
canonical value INF in both components so that it compares above every
finite weight, violating or not.
"""

from __future__ import annotations

import math
from typing import NamedTuple

INF = math.inf


class Weight(NamedTuple):
    violation: int
    travel: int

    def __add__(self, other):  # componentwise, not tuple concatenation
        return Weight(self.violation + other.violation, self.travel + other.travel)

    def scale(self, factor: int) -> "Weight":
        return Weight(self.violation * factor, self.travel * factor)

    @property
    def finite(self) -> bool:
        return self.travel != INF


INF_WEIGHT = Weight(INF, INF)
ZERO_WEIGHT = Weight(0, 0)


def weight(violation, travel) -> Weight:
    """Canonicalize: a non-traversable edge is infinite in both components."""
    if travel == INF:
        return INF_WEIGHT
    return Weight(violation, travel)
