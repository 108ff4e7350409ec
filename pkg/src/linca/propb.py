"""The isolation property B(x,y,l,r) and its calculus.

B(x,y,l,r) holds for an automaton F when, for every configuration c, the
value F^y(c)_z seen as a function of c(0) is a bijection at z = x and a
constant for every other z in the window [x-l, x+r].  For linear CA this is
decided exactly on one Green row; for table CA the all-configurations
quantifier is realized by the enumerative oracle.

Also here: the composition law (a valid spec for (x,y) and another for
(x',y') combine into one for (x+x', y+y') when the second window fits inside
the first's margins) and the constructive word-coverage argument (a valid
spec lets one realize any output word of length max(l,r)+1 by adjusting one
input cell at a time).
"""

from __future__ import annotations

import itertools
import random

from .automata import Config, GeneralCA, LinearCA, iterate
from .green import CellClass, general_green_oracle, green_row

__all__ = [
    "BSpec",
    "NotApplicable",
    "NOT_APPLICABLE",
    "check_b",
    "compose_b",
    "word_coverage",
    "max_margins",
]


class BSpec:
    """Parameters of the isolation property: output position x at time y,
    with constancy margins l cells to the left and r to the right."""

    __slots__ = ("x", "y", "l", "r")

    def __init__(self, x, y, l, r):
        if y < 0 or l < 0 or r < 0:
            raise ValueError("y, l, r must be nonnegative")
        self.x = int(x)
        self.y = int(y)
        self.l = int(l)
        self.r = int(r)

    def __eq__(self, other):
        return (isinstance(other, BSpec) and (self.x, self.y, self.l, self.r)
                == (other.x, other.y, other.l, other.r))

    def __repr__(self):
        return f"B({self.x},{self.y},{self.l},{self.r})"


class NotApplicable:
    """Composition verdict: the window condition failed, nothing is claimed."""

    def __bool__(self):
        return False

    def __repr__(self):
        return "NotApplicable"


NOT_APPLICABLE = NotApplicable()


def check_b(a, s: BSpec, budget=1 << 24) -> bool:
    """Decide B(x,y,l,r) for a linear or table CA."""
    if isinstance(a, LinearCA):
        row = green_row(a, s.y)
        if row.classify_at(s.x) is not CellClass.BIJECTIVE:
            return False
        return all(row.classify_at(z) is CellClass.CONSTANT
                   for z in range(s.x - s.l, s.x + s.r + 1) if z != s.x)
    if general_green_oracle(a, s.x, s.y, budget) is not CellClass.BIJECTIVE:
        return False
    return all(
        general_green_oracle(a, z, s.y, budget) is CellClass.CONSTANT
        for z in range(s.x - s.l, s.x + s.r + 1) if z != s.x)


def _neighborhood_power(a, y):
    """Read offsets of the y-fold iterate."""
    base = a.neighborhood()
    acc = {0}
    for _ in range(y):
        acc = {v + o for v in acc for o in base}
    return acc


def compose_b(a, s1: BSpec, s2: BSpec):
    """Combine B(x,y,l,r) and B(x',y',l',r') into B(x+x', y+y', l', r').

    Valid when every cell the y'-fold iterate reads from the second window
    lands inside the first's protected window: [x'-l', x'+r'] + N^{y'}
    must be contained in [-l, r].  Returns NOT_APPLICABLE otherwise.
    """
    n = _neighborhood_power(a, s2.y)
    lo = s2.x - s2.l + min(n)
    hi = s2.x + s2.r + max(n)
    if lo < -s1.l or hi > s1.r:
        return NOT_APPLICABLE
    return BSpec(s1.x + s2.x, s1.y + s2.y, s2.l, s2.r)


def _state_space(a):
    if isinstance(a, LinearCA):
        return list(a.states()), a.zero_state()
    return list(range(a.q)), 0


def word_coverage(a, s: BSpec, trials=256, seed=0) -> bool:
    """Constructively realize output words of length max(l,r)+1 in the image
    of the y-fold iterate, given that B(x,y,l,r) holds.

    One input cell is adjusted per output position: position i is controlled
    by the input cell i - x, and the margins guarantee the adjustment never
    disturbs positions already fixed (process right-to-left when l <= r,
    left-to-right otherwise).  All words are tried when there are at most
    `trials` of them, a seeded random sample of `trials` words else.
    """
    if not check_b(a, s):
        raise ValueError("word_coverage requires the B-spec to hold")
    states, bg = _state_space(a)
    length = max(s.l, s.r) + 1
    positions = list(range(length))
    order = list(reversed(positions)) if s.l <= s.r else positions

    total = len(states) ** length
    if total <= trials:
        def words():
            return itertools.product(states, repeat=length)
    else:
        def words():
            rng = random.Random(seed)
            for _ in range(trials):
                yield tuple(rng.choice(states) for _ in range(length))

    for word in words():
        c = Config({}, bg)
        for i in order:
            target = word[i]
            hit = None
            for v in states:
                support = dict(c.support)
                if v == bg:
                    support.pop(i - s.x, None)
                else:
                    support[i - s.x] = v
                cand = Config(support, bg)
                out = iterate(a, cand, s.y)
                if out[i] == target:
                    hit = cand
                    break
            if hit is None:
                return False
            c = hit
        out = iterate(a, c, s.y)
        if any(out[i] != word[i] for i in positions):
            return False
    return True


def max_margins(a, x, y, budget=1 << 24):
    """Largest valid (l, r) for B(x,y,·,·), or None when the position is not
    bijective.  A side with no nonconstant cell beyond it at this time step
    is reported as None (unbounded: any finite margin works there)."""
    if isinstance(a, LinearCA):
        row = green_row(a, y)
        if row.classify_at(x) is not CellClass.BIJECTIVE:
            return None
        support = [z for z in row.support() if z != x]
        left = [z for z in support if z < x]
        right = [z for z in support if z > x]
        l = (x - max(left) - 1) if left else None
        r = (min(right) - x - 1) if right else None
        return (l, r)
    # table CA: scan outward over the dependency cone of the y-fold iterate
    if general_green_oracle(a, x, y, budget) is not CellClass.BIJECTIVE:
        return None
    n = _neighborhood_power(a, y)
    lo, hi = x + min(n), x + max(n)
    l = None
    for z in range(x - 1, lo - 1, -1):
        if general_green_oracle(a, z, y, budget) is not CellClass.CONSTANT:
            l = x - z - 1
            break
    r = None
    for z in range(x + 1, hi + 1):
        if general_green_oracle(a, z, y, budget) is not CellClass.CONSTANT:
            r = z - x - 1
            break
    return (l, r)
