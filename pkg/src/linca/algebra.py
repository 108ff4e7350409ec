"""Exact arithmetic over Z_p: matrices, scalar Laurent polynomials and
matrix-valued Laurent polynomials (the symbols of linear cellular automata).

All values are immutable after construction and every operation is a pure
function, so everything here can be shared freely across threads.

Conventions:
  * the scalar ring is Z_p with p prime (default 2);
  * coefficient maps are normalized -- a zero matrix (or zero scalar) is
    never stored, so equality is structural;
  * units of Z_p[u,1/u] are exactly the nonzero-scalar monomials c*u^e,
    which is what makes adjugate inversion of symbols decidable.
"""

from __future__ import annotations

import json

import numpy as np

__all__ = [
    "NotInvertible",
    "MatF",
    "ScalarLaurent",
    "LaurentMat",
    "MinPoly",
    "check_prime",
    "lm_mul",
    "lm_add",
    "lm_pow",
    "lm_det",
    "lm_invert",
    "annihilates",
    "symbol_to_json",
    "symbol_from_json",
]


class NotInvertible(Exception):
    """Raised when a symbol has no inverse in the Laurent matrix algebra."""


def check_prime(p):
    if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
        raise ValueError(f"modulus {p} is not prime")
    return p


# ---------------------------------------------------------------------------
# d x d matrices over Z_p
# ---------------------------------------------------------------------------

class MatF:
    """Immutable d x d matrix over Z_p, backed by a uint8 numpy array."""

    __slots__ = ("p", "d", "a")

    def __init__(self, entries, p=2):
        a = np.asarray(entries, dtype=np.int64) % p
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        self.p = p
        self.d = a.shape[0]
        self.a = a.astype(np.uint8)
        self.a.setflags(write=False)

    @classmethod
    def zero(cls, d, p=2):
        return cls(np.zeros((d, d), dtype=np.uint8), p)

    @classmethod
    def identity(cls, d, p=2):
        return cls(np.eye(d, dtype=np.uint8), p)

    def is_zero(self):
        return not self.a.any()

    def __add__(self, other):
        self._check(other)
        return MatF((self.a.astype(np.int64) + other.a) % self.p, self.p)

    def __matmul__(self, other):
        self._check(other)
        return MatF((self.a.astype(np.int64) @ other.a) % self.p, self.p)

    def __eq__(self, other):
        return (isinstance(other, MatF) and self.p == other.p
                and self.d == other.d and np.array_equal(self.a, other.a))

    def __hash__(self):
        return hash((self.p, self.d, self.a.tobytes()))

    def __repr__(self):
        return f"MatF({self.a.tolist()}, p={self.p})"

    def _check(self, other):
        if self.p != other.p or self.d != other.d:
            raise ValueError("matrix dimension/modulus mismatch")

    def rank(self):
        """Rank over Z_p by Gaussian elimination (exact)."""
        m = self.a.astype(np.int64) % self.p
        m = m.copy()
        p, d = self.p, self.d
        rank = 0
        col = 0
        for col in range(d):
            pivot = None
            for r in range(rank, d):
                if m[r, col] % p:
                    pivot = r
                    break
            if pivot is None:
                continue
            m[[rank, pivot]] = m[[pivot, rank]]
            inv = pow(int(m[rank, col]), p - 2, p)
            m[rank] = (m[rank] * inv) % p
            for r in range(d):
                if r != rank and m[r, col]:
                    m[r] = (m[r] - m[r, col] * m[rank]) % p
            rank += 1
        return rank

    def is_invertible(self):
        return self.rank() == self.d


# ---------------------------------------------------------------------------
# scalar Laurent polynomials over Z_p
# ---------------------------------------------------------------------------

class ScalarLaurent:
    """Finitely supported map exponent -> Z_p, normalized (no stored zeros)."""

    __slots__ = ("p", "coeffs")

    def __init__(self, coeffs=None, p=2):
        cc = {}
        for e, c in (coeffs or {}).items():
            c = c % p
            if c:
                cc[int(e)] = c
        self.p = p
        self.coeffs = cc

    @classmethod
    def zero(cls, p=2):
        return cls({}, p)

    @classmethod
    def one(cls, p=2):
        return cls({0: 1}, p)

    @classmethod
    def monomial(cls, e, c=1, p=2):
        return cls({e: c}, p)

    def is_zero(self):
        return not self.coeffs

    def is_unit(self):
        """Units of Z_p[u,1/u] are single nonzero-scalar monomials."""
        return len(self.coeffs) == 1

    def __add__(self, other):
        cc = dict(self.coeffs)
        for e, c in other.coeffs.items():
            cc[e] = cc.get(e, 0) + c
        return ScalarLaurent(cc, self.p)

    def __mul__(self, other):
        cc = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                cc[e] = cc.get(e, 0) + c1 * c2
        return ScalarLaurent(cc, self.p)

    def __neg__(self):
        return ScalarLaurent({e: -c for e, c in self.coeffs.items()}, self.p)

    def __eq__(self, other):
        return (isinstance(other, ScalarLaurent) and self.p == other.p
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.p, tuple(sorted(self.coeffs.items()))))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for e in sorted(self.coeffs):
            c = self.coeffs[e]
            if e == 0:
                terms.append(str(c))
            else:
                cs = "" if c == 1 else str(c) + "*"
                terms.append(f"{cs}u^{e}" if e != 1 else f"{cs}u")
        return "+".join(terms)


# ---------------------------------------------------------------------------
# matrix-valued Laurent polynomials (symbols)
# ---------------------------------------------------------------------------

class LaurentMat:
    """d x d matrix-valued Laurent polynomial over Z_p: the symbol of a
    linear CA.  coeffs maps integer exponent -> MatF; normalized."""

    __slots__ = ("p", "d", "coeffs")

    def __init__(self, coeffs, p=2, d=None):
        cc = {}
        for e, m in coeffs.items():
            if not isinstance(m, MatF):
                m = MatF(m, p)
            if m.p != p:
                raise ValueError("coefficient modulus mismatch")
            if d is None:
                d = m.d
            elif m.d != d:
                raise ValueError("coefficient dimension mismatch")
            if not m.is_zero():
                cc[int(e)] = m
        if d is None:
            raise ValueError("dimension must be given for an empty symbol")
        self.p = check_prime(p)
        self.d = d
        self.coeffs = cc

    @classmethod
    def identity(cls, d, p=2):
        return cls({0: MatF.identity(d, p)}, p, d)

    @classmethod
    def zero(cls, d, p=2):
        return cls({}, p, d)

    @classmethod
    def from_scalar(cls, s: ScalarLaurent):
        return cls({e: MatF([[c]], s.p) for e, c in s.coeffs.items()}, s.p, 1)

    def support(self):
        return sorted(self.coeffs)

    def is_zero(self):
        return not self.coeffs

    def coeff(self, e):
        return self.coeffs.get(e, MatF.zero(self.d, self.p))

    def entry(self, i, j):
        """Entry (i, j) as a ScalarLaurent."""
        return ScalarLaurent(
            {e: int(m.a[i, j]) for e, m in self.coeffs.items()}, self.p)

    def __eq__(self, other):
        return (isinstance(other, LaurentMat) and self.p == other.p
                and self.d == other.d and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.p, self.d, tuple(sorted(
            (e, m.a.tobytes()) for e, m in self.coeffs.items()))))

    def __repr__(self):
        return f"LaurentMat(p={self.p}, d={self.d}, support={self.support()})"


def _check_pair(a: LaurentMat, b: LaurentMat):
    if a.p != b.p or a.d != b.d:
        raise ValueError("symbol dimension/modulus mismatch")


def lm_add(a: LaurentMat, b: LaurentMat) -> LaurentMat:
    _check_pair(a, b)
    cc = {e: m.a.astype(np.int64) for e, m in a.coeffs.items()}
    for e, m in b.coeffs.items():
        cc[e] = (cc.get(e, 0) + m.a.astype(np.int64)) % a.p
    return LaurentMat({e: MatF(m, a.p) for e, m in cc.items()}, a.p, a.d)


def lm_mul(a: LaurentMat, b: LaurentMat) -> LaurentMat:
    """Convolution product in the symbol algebra M_d(Z_p)[u,1/u]."""
    _check_pair(a, b)
    acc = {}
    for e1, m1 in a.coeffs.items():
        m1a = m1.a.astype(np.int64)
        for e2, m2 in b.coeffs.items():
            e = e1 + e2
            prod = m1a @ m2.a
            if e in acc:
                acc[e] = acc[e] + prod
            else:
                acc[e] = prod
    return LaurentMat({e: MatF(m % a.p, a.p) for e, m in acc.items()},
                      a.p, a.d)


def lm_scalar_mul(s: ScalarLaurent, f: LaurentMat) -> LaurentMat:
    """Product of a scalar Laurent polynomial with a symbol."""
    if s.p != f.p:
        raise ValueError("modulus mismatch")
    acc = {}
    for e1, c in s.coeffs.items():
        for e2, m in f.coeffs.items():
            e = e1 + e2
            term = (c * m.a.astype(np.int64))
            acc[e] = acc.get(e, 0) + term
    return LaurentMat({e: MatF(m % f.p, f.p) for e, m in acc.items()},
                      f.p, f.d)


def lm_pow(f: LaurentMat, y: int) -> LaurentMat:
    """y-fold product; f**0 is the identity symbol."""
    if y < 0:
        raise ValueError("exponent must be nonnegative")
    result = LaurentMat.identity(f.d, f.p)
    base = f
    while y:
        if y & 1:
            result = lm_mul(result, base)
        y >>= 1
        if y:
            base = lm_mul(base, base)
    return result


def lm_det(f: LaurentMat) -> ScalarLaurent:
    """Determinant by cofactor expansion over the commutative ring
    Z_p[u,1/u]."""
    d = f.d
    entries = [[f.entry(i, j) for j in range(d)] for i in range(d)]
    return _det_rec(entries, f.p)


def _det_rec(rows, p):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    acc = ScalarLaurent.zero(p)
    for j in range(n):
        if rows[0][j].is_zero():
            continue
        minor = [[rows[i][k] for k in range(n) if k != j]
                 for i in range(1, n)]
        term = rows[0][j] * _det_rec(minor, p)
        acc = acc + (term if j % 2 == 0 else -term)
    return acc


def lm_invert(f: LaurentMat) -> LaurentMat:
    """Adjugate divided by the determinant.

    Valid iff det(f) is a unit of Z_p[u,1/u], i.e. a single monomial c*u^e
    with c != 0; raises NotInvertible otherwise.
    """
    det = lm_det(f)
    if not det.is_unit():
        raise NotInvertible(f"determinant {det!r} is not a unit monomial")
    (e_det, c_det), = det.coeffs.items()
    c_inv = pow(c_det, f.p - 2, f.p)
    d, p = f.d, f.p
    entries = [[f.entry(i, j) for j in range(d)] for i in range(d)]
    acc = {}
    for i in range(d):
        for j in range(d):
            minor = [[entries[r][c] for c in range(d) if c != j]
                     for r in range(d) if r != i]
            cof = _det_rec(minor, p) if d > 1 else ScalarLaurent.one(p)
            if (i + j) % 2:
                cof = -cof
            # adjugate transposes the cofactor matrix; divide by det
            for e, c in cof.coeffs.items():
                key = e - e_det
                m = acc.setdefault(key, np.zeros((d, d), dtype=np.int64))
                m[j, i] = (m[j, i] + c * c_inv) % p
    return LaurentMat({e: MatF(m, p) for e, m in acc.items()}, p, d)


# ---------------------------------------------------------------------------
# minimal polynomials
# ---------------------------------------------------------------------------

class MinPoly:
    """Monic polynomial X^D + c_{D-1} X^{D-1} + ... + c_0 with coefficients
    in Z_p[u,1/u]."""

    __slots__ = ("p", "degree", "coeffs")

    def __init__(self, coeffs, p=2):
        if not coeffs:
            raise ValueError("degree must be at least 1")
        self.p = p
        self.degree = len(coeffs)
        self.coeffs = tuple(
            c if isinstance(c, ScalarLaurent) else ScalarLaurent(c, p)
            for c in coeffs)
        for c in self.coeffs:
            if c.p != p:
                raise ValueError("coefficient modulus mismatch")

    def __repr__(self):
        return f"MinPoly(degree={self.degree}, coeffs={list(self.coeffs)})"


def annihilates(m: MinPoly, f: LaurentMat) -> bool:
    """True iff f^D + sum_j c_j f^j vanishes in the symbol algebra."""
    if m.p != f.p:
        raise ValueError("modulus mismatch")
    acc = lm_pow(f, m.degree)
    power = LaurentMat.identity(f.d, f.p)
    for j, c in enumerate(m.coeffs):
        if j > 0:
            power = lm_mul(power, f)
        if not c.is_zero():
            acc = lm_add(acc, lm_scalar_mul(c, power))
    return acc.is_zero()


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def symbol_to_json(f: LaurentMat) -> str:
    doc = {
        "p": f.p,
        "d": f.d,
        "symbol": [{"exp": e, "matrix": f.coeffs[e].a.tolist()}
                   for e in f.support()],
    }
    return json.dumps(doc)


def symbol_from_json(text: str) -> LaurentMat:
    doc = json.loads(text)
    p, d = doc["p"], doc["d"]
    seen = set()
    coeffs = {}
    for item in doc["symbol"]:
        e = int(item["exp"])
        if e in seen:
            raise ValueError(f"duplicate exponent {e} in symbol document")
        seen.add(e)
        coeffs[e] = MatF(item["matrix"], p)
    return LaurentMat(coeffs, p, d)
