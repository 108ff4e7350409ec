import random

import pytest

from linca.algebra import LaurentMat, MatF, MinPoly
from linca.automata import load_ca

SEED = 20240901


@pytest.fixture
def rng():
    return random.Random(SEED)


def random_symbol(rng, d=2, p=2, span=2, density=0.7):
    """Random sparse Laurent matrix with exponents in [-span, span]."""
    coeffs = {}
    for e in range(-span, span + 1):
        if rng.random() < density:
            coeffs[e] = MatF([[rng.randrange(p) for _ in range(d)]
                              for _ in range(d)], p)
    if not coeffs:
        coeffs[0] = MatF.identity(d, p)
    return LaurentMat(coeffs, p, d)


# X^3 + X^2 + (1 + u^2) X + 1, annihilates the gamma symbol
GAMMA_MINPOLY = MinPoly([{0: 1}, {0: 1, 2: 1}, {0: 1}])
# X^3 + (1 + u^2) X^2 + X + 1, annihilates the gamma_inv symbol
GAMMA_INV_MINPOLY = MinPoly([{0: 1}, {0: 1}, {0: 1, 2: 1}])


@pytest.fixture(scope="session")
def gamma():
    return load_ca("gamma")


@pytest.fixture(scope="session")
def gamma_inv():
    return load_ca("gamma_inv")


@pytest.fixture(scope="session")
def theta():
    return load_ca("theta")


@pytest.fixture(scope="session")
def theta_inv():
    return load_ca("theta_inv")


@pytest.fixture(scope="session")
def xor():
    return load_ca("xor")
