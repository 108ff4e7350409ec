"""Finite-scale sampling of the scale-free characteristic set X_p.

A lattice sample at parameters (p, n, k) records every point (a, b) with
0 <= b <= y_max such that B(a, b, p^(n-k), p^(n-k)) holds, i.e. the Green
row at time b is bijective at a and constant on the 2*p^(n-k) surrounding
cells.  Normalized coordinates (a/p^n, b/p^n) approximate the limiting
scale-free characteristic set; all claims here are about the lattice sample
at the declared scale.

Also here: lattice-exact forms of the transformation laws (shift, packing,
product, sub-automaton, iteration) and the PGM / JSON / CSV emitters.
"""

from __future__ import annotations

import json

from .automata import (LinearCA, Rescaling, product, rescale,
                       verify_linear_embedding)
from .green import CellClass, green_rows

__all__ = [
    "XpSample",
    "sample_xp",
    "apply_lattice_shift_law",
    "lattice_pack_law_check",
    "product_intersection_check",
    "subautomaton_inclusion_check",
    "iteration_law_check",
    "render_spacetime",
    "render_sample",
    "sample_to_json",
    "sample_from_json",
    "sample_to_csv",
]


class XpSample:
    """Immutable point cloud: every (a, b) passed the isolation check with
    margins p^(n-k) on both sides."""

    __slots__ = ("p", "n", "k", "y_max", "points")

    def __init__(self, p, n, k, y_max, points):
        if not (1 <= k <= n):
            raise ValueError("need 1 <= k <= n")
        self.p = p
        self.n = n
        self.k = k
        self.y_max = y_max
        self.points = frozenset((int(a), int(b)) for a, b in points)

    def margin(self):
        return self.p ** (self.n - self.k)

    def scale(self):
        return self.p ** self.n

    def normalized(self):
        """Exact rational coordinates (a / p^n, b / p^n) as integer pairs
        over the common denominator."""
        from fractions import Fraction
        s = self.scale()
        return {(Fraction(a, s), Fraction(b, s)) for a, b in self.points}

    def __eq__(self, other):
        return (isinstance(other, XpSample)
                and (self.p, self.n, self.k, self.y_max)
                == (other.p, other.n, other.k, other.y_max)
                and self.points == other.points)

    def __repr__(self):
        return (f"XpSample(p={self.p}, n={self.n}, k={self.k}, "
                f"y_max={self.y_max}, |points|={len(self.points)})")


def _row_hits(row, margin):
    """Positions a of `row` that are bijective and isolated: no other
    nonconstant cell within Chebyshev distance `margin`."""
    support = row.support()
    hits = []
    for idx, a in enumerate(support):
        if row.classify_at(a) is not CellClass.BIJECTIVE:
            continue
        if idx > 0 and a - support[idx - 1] <= margin:
            continue
        if idx + 1 < len(support) and support[idx + 1] - a <= margin:
            continue
        hits.append(a)
    return hits


def sample_xp(f: LinearCA, p, n, k, y_max=None) -> XpSample:
    """Scan all rows b in [0, y_max] (default 2 * p^n) and record every
    isolated bijective position."""
    if f.p != p:
        raise ValueError("sample modulus must match the CA")
    if y_max is None:
        y_max = 2 * p ** n
    margin = p ** (n - k)
    pts = []
    for row in green_rows(f, y_max):
        for a in _row_hits(row, margin):
            pts.append((a, row.y))
    return XpSample(p, n, k, y_max, pts)


def apply_lattice_shift_law(s: XpSample, z) -> XpSample:
    """Composing with the shift sigma_z moves (a, b) to (a + z*b, b),
    exactly at lattice level."""
    return XpSample(s.p, s.n, s.k, s.y_max,
                    {(a + z * b, b) for a, b in s.points})


def lattice_pack_law_check(f: LinearCA, m, p, n, k, y_max=None) -> bool:
    """Packing biconditional: the m-cell packing G of F satisfies
    B(x, y, L, L) exactly when F satisfies B(m*x, y, m*L, m*L), checked for
    every scanned row and position."""
    if y_max is None:
        y_max = 2 * p ** n
    g = rescale(f, Rescaling(m, 1, 0))
    margin = p ** (n - k)
    for row_f, row_g in zip(green_rows(f, y_max), green_rows(g, y_max)):
        g_ok = set(_row_hits(row_g, margin))
        # F-side verdict at packed positions only: a = m*x, margins m*L
        f_ok = {a // m for a in _row_hits(row_f, m * margin) if a % m == 0}
        if g_ok != f_ok:
            return False
    return True


def product_intersection_check(f: LinearCA, g: LinearCA, p, n, k,
                               y_max=None) -> bool:
    """The sample of the direct product equals the intersection of the
    factor samples (the isolation property holds for a product exactly when
    it holds for both factors)."""
    if y_max is None:
        y_max = 2 * p ** n
    sp = sample_xp(product(f, g), p, n, k, y_max)
    sf = sample_xp(f, p, n, k, y_max)
    sg = sample_xp(g, p, n, k, y_max)
    return sp.points == (sf.points & sg.points)


def subautomaton_inclusion_check(a: LinearCA, g: LinearCA, phi, p, n, k,
                                 y_max=None) -> bool:
    """If g embeds in a via phi then the isolation property transfers from a
    to g, so sample(a) is a subset of sample(g) at identical parameters."""
    if not verify_linear_embedding(g, a, phi):
        raise ValueError("phi is not a valid embedding of g into a")
    if y_max is None:
        y_max = 2 * p ** n
    sa = sample_xp(a, p, n, k, y_max)
    sg = sample_xp(g, p, n, k, y_max)
    return sa.points <= sg.points


def iteration_law_check(f: LinearCA, t, p, n, k, y_max=None) -> bool:
    """Sample of the t-fold iterate equals the sample of f restricted to
    rows divisible by t, vertically rescaled."""
    if y_max is None:
        y_max = 2 * p ** n
    st = sample_xp(rescale(f, Rescaling(1, t, 0)), p, n, k, y_max // t)
    sf = sample_xp(f, p, n, k, y_max)
    shadow = {(a, b // t) for a, b in sf.points if b % t == 0
              and b // t <= st.y_max}
    return st.points == shadow


# ---------------------------------------------------------------------------
# rendering and serialization
# ---------------------------------------------------------------------------

def _write_pgm(path, grid):
    """grid: list of rows (top first) of 0/1 ints; 1 renders black."""
    h = len(grid)
    w = len(grid[0]) if h else 0
    body = bytearray()
    for row in grid:
        body.extend(0 if v else 255 for v in row)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode())
        fh.write(bytes(body))


def render_spacetime(f: LinearCA, rows, image_path, mirror=False):
    """Render the Green support from a single spike: one pixel per cell,
    time running bottom-to-top, nonzero cells black."""
    if rows < 1:
        raise ValueError("rows must be >= 1")
    supports = []
    lo, hi = 0, 0
    for row in green_rows(f, rows - 1):
        s = row.support()
        supports.append(s)
        if s:
            lo = min(lo, s[0])
            hi = max(hi, s[-1])
    w = hi - lo + 1
    grid = []
    for s in reversed(supports):  # top row = latest time
        line = [0] * w
        for x in s:
            col = (hi - x) if mirror else (x - lo)
            line[col] = 1
        grid.append(line)
    _write_pgm(image_path, grid)


def render_sample(s: XpSample, image_path, mirror=False):
    """Render sample points at lattice resolution, time bottom-to-top."""
    if s.points:
        xs = [a for a, _ in s.points]
        lo, hi = min(xs + [0]), max(xs + [0])
    else:
        lo, hi = 0, 0
    w = hi - lo + 1
    h = s.y_max + 1
    grid = [[0] * w for _ in range(h)]
    for a, b in s.points:
        col = (hi - a) if mirror else (a - lo)
        grid[h - 1 - b][col] = 1
    _write_pgm(image_path, grid)


def sample_to_json(s: XpSample) -> str:
    doc = {"p": s.p, "n": s.n, "k": s.k, "y_max": s.y_max,
           "points": sorted([a, b] for a, b in s.points)}
    return json.dumps(doc)


def sample_from_json(text: str) -> XpSample:
    doc = json.loads(text)
    return XpSample(doc["p"], doc["n"], doc["k"], doc["y_max"],
                    {tuple(pt) for pt in doc["points"]})


def sample_to_csv(s: XpSample) -> str:
    """Normalized coordinates as exact fraction strings over p^n."""
    denom = s.scale()
    lines = ["x,y"]
    for a, b in sorted(s.points, key=lambda pt: (pt[1], pt[0])):
        lines.append(f"{a}/{denom},{b}/{denom}")
    return "\n".join(lines) + "\n"
