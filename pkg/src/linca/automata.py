"""Cellular automata: linear CA given by symbols, general table CA, finite
configurations, one-step evolution, and the space-time transforms used by the
simulation preorder (packing/iterating/shifting, product, mirror, dual,
linear sub-automaton verification).

Evolution convention, inherited by every other module: a symbol coefficient
at exponent e reads the neighbor at offset +e, i.e.

    F(c)_x = sum_e M_e . c(x+e)

Under this convention the elementary xor CA has symbol 1 + 1/u and computes
F(c)_x = c(x) + c(x-1), and the shift sigma_z (sigma_z(c)_x = c_{x-z}) has
symbol u^(-z).
"""

from __future__ import annotations

import itertools
import re

import numpy as np

from .algebra import (LaurentMat, MatF, NotInvertible, lm_invert, lm_mul,
                      lm_pow, symbol_from_json)

__all__ = [
    "GeneralCA",
    "LinearCA",
    "Config",
    "Rescaling",
    "step",
    "iterate",
    "rescale",
    "product",
    "mirror",
    "invert",
    "dual",
    "verify_linear_embedding",
    "pack_config",
    "shift_config",
    "builtin",
    "builtin_names",
    "load_ca",
]


class LinearCA:
    """Linear CA over (Z_p)^d, represented by its symbol."""

    __slots__ = ("symbol",)

    def __init__(self, symbol: LaurentMat):
        self.symbol = symbol

    @property
    def p(self):
        return self.symbol.p

    @property
    def d(self):
        return self.symbol.d

    def zero_state(self):
        return (0,) * self.d

    def states(self):
        return itertools.product(range(self.p), repeat=self.d)

    def neighborhood(self):
        """Offsets read by the local rule (= exponent support; {0} if empty)."""
        sup = self.symbol.support()
        return sup if sup else [0]

    def to_general(self):
        """Induced table CA on the q = p^d states (for differential testing
        against the enumerative Green oracle)."""
        offsets = self.neighborhood()
        states = list(self.states())
        index = {s: i for i, s in enumerate(states)}
        mats = [self.symbol.coeff(e).a.astype(np.int64) for e in offsets]
        table = {}
        for word in itertools.product(range(len(states)), repeat=len(offsets)):
            out = np.zeros(self.d, dtype=np.int64)
            for m, s in zip(mats, word):
                out = out + m @ np.array(states[s], dtype=np.int64)
            table[word] = index[tuple(int(v) % self.p for v in out)]
        return GeneralCA(len(states), offsets, table)

    def __eq__(self, other):
        return isinstance(other, LinearCA) and self.symbol == other.symbol

    def __repr__(self):
        return f"LinearCA({self.symbol!r})"


class GeneralCA:
    """Table CA: q states, sorted neighborhood offsets, total rule table
    mapping neighborhood words (tuples of states) to states."""

    __slots__ = ("q", "neighborhood_offsets", "table")

    def __init__(self, q, neighborhood_offsets, table):
        offsets = list(neighborhood_offsets)
        if len(set(offsets)) != len(offsets):
            raise ValueError("neighborhood offsets must be distinct")
        if len(table) != q ** len(offsets):
            raise ValueError("rule table is not total")
        for word, s in table.items():
            if not (0 <= s < q) or any(not (0 <= w < q) for w in word):
                raise ValueError("state out of range in rule table")
        self.q = q
        self.neighborhood_offsets = sorted(offsets)
        # re-key on the sorted offset order
        order = sorted(range(len(offsets)), key=lambda i: offsets[i])
        self.table = {tuple(word[i] for i in order): s
                      for word, s in table.items()}

    def neighborhood(self):
        return list(self.neighborhood_offsets)

    def local(self, word):
        return self.table[tuple(word)]

    def is_quiescent(self, s):
        return self.table[(s,) * len(self.neighborhood_offsets)] == s

    def __repr__(self):
        return (f"GeneralCA(q={self.q}, "
                f"neighborhood={self.neighborhood_offsets})")


class Config:
    """Finitely supported configuration over a quiescent background.

    Cells holding the background value are never stored, so equality is
    structural.
    """

    __slots__ = ("background", "support")

    def __init__(self, support=None, background=0):
        self.background = background
        self.support = {int(x): s for x, s in (support or {}).items()
                        if s != background}

    def __getitem__(self, x):
        return self.support.get(x, self.background)

    def positions(self):
        return sorted(self.support)

    def __eq__(self, other):
        return (isinstance(other, Config)
                and self.background == other.background
                and self.support == other.support)

    def __repr__(self):
        return f"Config({self.support}, background={self.background})"


class Rescaling:
    """Space-time rescaling parameters: pack m cells, iterate t steps,
    compose with the shift by z."""

    __slots__ = ("m", "t", "z")

    def __init__(self, m=1, t=1, z=0):
        if m < 1 or t < 1:
            raise ValueError("need m >= 1 and t >= 1")
        self.m = m
        self.t = t
        self.z = z

    def __repr__(self):
        return f"Rescaling(m={self.m}, t={self.t}, z={self.z})"


# ---------------------------------------------------------------------------
# evolution
# ---------------------------------------------------------------------------

def step(a, c: Config) -> Config:
    """One global step.  The background must be quiescent for a."""
    if isinstance(a, LinearCA):
        return _step_linear(a, c)
    return _step_general(a, c)


def _step_linear(a: LinearCA, c: Config) -> Config:
    zero = a.zero_state()
    if c.background != zero:
        raise ValueError("background must be the zero vector for a linear CA")
    if not c.support:
        return Config({}, zero)
    offsets = a.symbol.support()
    mats = {e: a.symbol.coeffs[e].a.astype(np.int64) for e in offsets}
    out = {}
    for x, s in c.support.items():
        sv = np.array(s, dtype=np.int64)
        for e, m in mats.items():
            # cell x contributes to output position x - e (output at y reads y+e)
            y = x - e
            acc = out.get(y)
            contrib = m @ sv
            out[y] = contrib if acc is None else acc + contrib
    p = a.p
    return Config({x: tuple(int(v) % p for v in s) for x, s in out.items()},
                  zero)


def _step_general(a: GeneralCA, c: Config) -> Config:
    if not a.is_quiescent(c.background):
        raise ValueError("background state is not quiescent for this CA")
    if any(not (0 <= s < a.q) for s in c.support.values()):
        raise ValueError("state out of range")
    if not c.support:
        return Config({}, c.background)
    offsets = a.neighborhood_offsets
    lo = min(c.support) - max(offsets + [0])
    hi = max(c.support) - min(offsets + [0])
    out = {}
    for x in range(lo, hi + 1):
        word = tuple(c[x + o] for o in offsets)
        out[x] = a.local(word)
    return Config(out, c.background)


def iterate(a, c: Config, t: int) -> Config:
    for _ in range(t):
        c = step(a, c)
    return c


def pack_config(c: Config, m: int, zero_state) -> Config:
    """Block-packing bijection: packed cell X holds (c(mX), ..., c(mX+m-1)).

    States must be tuples; the packed background is the m-fold concatenation
    of the (quiescent) background.
    """
    packed = {}
    for x in c.support:
        packed.setdefault(x // m, None)
    out = {}
    for X in packed:
        cat = tuple(itertools.chain.from_iterable(
            c[m * X + i] for i in range(m)))
        out[X] = cat
    bg = tuple(itertools.chain.from_iterable([c.background] * m))
    _ = zero_state  # background derives from c; kept for call-site clarity
    return Config(out, bg)


def shift_config(c: Config, z: int) -> Config:
    """sigma_z: the cell value at x - z moves to x."""
    return Config({x + z: s for x, s in c.support.items()}, c.background)


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------

def rescale(a: LinearCA, r: Rescaling) -> LinearCA:
    """The linear CA on (Z_p^d)^m whose symbol realizes
    pack_m o sigma_z o F^t o unpack_m."""
    f = a.symbol
    h = lm_pow(f, r.t)
    if r.z:
        shift = LaurentMat({-r.z: MatF.identity(f.d, f.p)}, f.p, f.d)
        h = lm_mul(shift, h)
    m, d, p = r.m, f.d, f.p
    if m == 1:
        return LinearCA(h)
    blocks = {}
    for e, mat in h.coeffs.items():
        # packed output component I at block X reads H(c)_{mX+I}; the source
        # cell mX+I+e lives in block X+E, component J, with mE+J = I+e.
        for i_comp in range(m):
            pos = i_comp + e
            big_e, j_comp = divmod(pos, m)
            blk = blocks.setdefault(big_e,
                                    np.zeros((m * d, m * d), dtype=np.int64))
            blk[i_comp * d:(i_comp + 1) * d,
                j_comp * d:(j_comp + 1) * d] = mat.a
    return LinearCA(LaurentMat({e: MatF(b, p) for e, b in blocks.items()},
                               p, m * d))


def product(a: LinearCA, b: LinearCA) -> LinearCA:
    """Direct sum of symbols: block-diagonal CA on d_a + d_b components."""
    if a.p != b.p:
        raise ValueError("modulus mismatch")
    da, db, p = a.d, b.d, a.p
    exps = set(a.symbol.coeffs) | set(b.symbol.coeffs)
    coeffs = {}
    for e in exps:
        blk = np.zeros((da + db, da + db), dtype=np.int64)
        blk[:da, :da] = a.symbol.coeff(e).a
        blk[da:, da:] = b.symbol.coeff(e).a
        coeffs[e] = MatF(blk, p)
    return LinearCA(LaurentMat(coeffs, p, da + db))


def mirror(a: LinearCA) -> LinearCA:
    """Conjugation by the spatial mirror: u -> 1/u on the symbol."""
    f = a.symbol
    return LinearCA(LaurentMat({-e: m for e, m in f.coeffs.items()},
                               f.p, f.d))


def invert(a: LinearCA) -> LinearCA:
    return LinearCA(lm_invert(a.symbol))


def dual(a: LinearCA) -> LinearCA:
    """Dual of a reversible CA: mir o F^-1 o mir.

    On symbols this is inversion composed with the u -> 1/u automorphism
    (the two commute); any shift is a fixed point.
    """
    return mirror(invert(a))


def verify_linear_embedding(a: LinearCA, g: LinearCA, phi) -> bool:
    """Check a sub-automaton embedding of a into g given by the linear,
    injective state map phi (a d_g x d_a matrix over Z_p).

    For linear phi the intertwining condition reduces to the symbol identity
    phi . symbol(a) = symbol(g) . phi, which is checked exactly.
    """
    if a.p != g.p:
        raise ValueError("modulus mismatch")
    phi = np.asarray(phi, dtype=np.int64) % a.p
    if phi.shape != (g.d, a.d):
        raise ValueError(f"phi must be {g.d}x{a.d}")
    # injectivity = full column rank over Z_p
    square = np.zeros((max(phi.shape), max(phi.shape)), dtype=np.int64)
    square[:phi.shape[0], :phi.shape[1]] = phi
    if MatF(square, a.p).rank() < a.d:
        raise ValueError("phi is not injective (rank-deficient)")
    exps = set(a.symbol.coeffs) | set(g.symbol.coeffs)
    for e in exps:
        lhs = (phi @ a.symbol.coeff(e).a) % a.p
        rhs = (g.symbol.coeff(e).a @ phi) % a.p
        if not np.array_equal(lhs, rhs):
            return False
    return True


# ---------------------------------------------------------------------------
# builtin registry
# ---------------------------------------------------------------------------

def _sym(entries, p=2):
    """Build a symbol from a dict exponent -> matrix rows."""
    return LaurentMat({e: MatF(m, p) for e, m in entries.items()}, p)


def _theta():
    # [[0, 1], [1, 1/u + 1 + u]]
    return _sym({
        -1: [[0, 0], [0, 1]],
        0: [[0, 1], [1, 1]],
        1: [[0, 0], [0, 1]],
    })


def _theta_inv():
    # [[1/u + 1 + u, 1], [1, 0]]
    return _sym({
        -1: [[1, 0], [0, 0]],
        0: [[1, 1], [1, 0]],
        1: [[1, 0], [0, 0]],
    })


def _gamma():
    # [[0, 0, 1], [0, 1, u], [1, u, 0]]
    return _sym({
        0: [[0, 0, 1], [0, 1, 0], [1, 0, 0]],
        1: [[0, 0, 0], [0, 0, 1], [0, 1, 0]],
    })


def _gamma_inv():
    # [[u^2, u, 1], [u, 1, 0], [1, 0, 0]]
    return _sym({
        0: [[0, 0, 1], [0, 1, 0], [1, 0, 0]],
        1: [[0, 1, 0], [1, 0, 0], [0, 0, 0]],
        2: [[1, 0, 0], [0, 0, 0], [0, 0, 0]],
    })


def _xor():
    # 1 + 1/u: F(c)_x = c(x) + c(x-1)
    return _sym({0: [[1]], -1: [[1]]})


_PARAM_RE = re.compile(r"^([a-z_]+)\((-?\d+)\)$")


def builtin(name: str):
    """Builtin CA registry.

    Names: "theta", "theta_inv", "gamma", "gamma_inv", "xor", "nilpotent",
    "identity(d)", "shift(z)", and the general table CA "and".
    """
    simple = {
        "theta": _theta,
        "theta_inv": _theta_inv,
        "gamma": _gamma,
        "gamma_inv": _gamma_inv,
        "xor": _xor,
        # [[0, u], [0, 0]]: squares to zero
        "nilpotent": lambda: _sym({1: [[0, 1], [0, 0]]}),
    }
    if name in simple:
        return LinearCA(simple[name]())
    if name == "identity":
        return LinearCA(LaurentMat.identity(1))
    if name == "and":
        # f(a, b) = a AND b on neighborhood {0, 1}; not surjective
        table = {(x, y): x & y for x in (0, 1) for y in (0, 1)}
        return GeneralCA(2, [0, 1], table)
    m = _PARAM_RE.match(name)
    if m:
        kind, arg = m.group(1), int(m.group(2))
        if kind == "identity":
            if arg < 1:
                raise ValueError("identity dimension must be >= 1")
            return LinearCA(LaurentMat.identity(arg))
        if kind == "shift":
            return LinearCA(_sym({-arg: [[1]]}))
    raise KeyError(f"unknown builtin CA {name!r}")


def builtin_names():
    return ["theta", "theta_inv", "gamma", "gamma_inv", "xor", "nilpotent",
            "identity(d)", "shift(z)", "and"]


def load_ca(source: str):
    """Load a CA from a builtin name or a symbol JSON file path."""
    try:
        return builtin(source)
    except KeyError:
        pass
    with open(source) as fh:
        return LinearCA(symbol_from_json(fh.read()))
