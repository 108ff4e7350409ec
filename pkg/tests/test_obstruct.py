from fractions import Fraction

import pytest

from linca.automata import load_ca, mirror
from linca.obstruct import (DirectionExtractionError, PiMap,
                            contained_within, extract_directions, pi_apply,
                            replay_final_argument, search_pi)
from linca.xp import XpSample, sample_xp


@pytest.fixture(scope="module")
def samples():
    out = {}
    out["gamma"] = sample_xp(load_ca("gamma"), 2, 8, 5)
    out["gamma_inv"] = sample_xp(load_ca("gamma_inv"), 2, 8, 5)
    out["mirror_inv"] = sample_xp(mirror(load_ca("gamma_inv")), 2, 8, 5)
    out["xor"] = sample_xp(load_ca("xor"), 2, 8, 5)
    out["shift1"] = sample_xp(load_ca("shift(1)"), 2, 8, 5)
    return out


def test_pimap_validation():
    with pytest.raises(ValueError):
        PiMap(0, 0, 1)
    with pytest.raises(ValueError):
        PiMap(1, 0, -2)
    m = PiMap(Fraction(1, 2), -1, 3)
    assert m(4, 2) == (0, 6)


def test_extract_directions_frozen(samples):
    assert extract_directions(samples["gamma"]) == [-1, 0]
    assert extract_directions(samples["gamma_inv"]) == [-2, 0]
    assert extract_directions(samples["mirror_inv"]) == [0, 2]
    assert extract_directions(samples["xor"]) == [0, 1]
    assert extract_directions(samples["shift1"]) == [1]


def test_extract_directions_too_sparse():
    empty = XpSample(2, 8, 5, 512, set())
    with pytest.raises(DirectionExtractionError):
        extract_directions(empty)


def test_containment_reflexive(samples):
    s = samples["gamma"]
    assert contained_within(pi_apply(PiMap(1, 0, 1), s), s, tol=0)


def test_containment_detects_displacement(samples):
    s = samples["gamma"]
    moved = pi_apply(PiMap(1, Fraction(1, 8), 1), s)
    assert not contained_within(moved, s, tol=2)


def test_search_pi_identity():
    s = sample_xp(load_ca("gamma"), 2, 6, 4)
    found = search_pi(s, s, denom_bound=3)
    assert found == [PiMap(1, 0, 1)]


def test_search_pi_shift_law():
    s1 = sample_xp(load_ca("shift(1)"), 2, 6, 4)
    s2 = sample_xp(load_ca("shift(2)"), 2, 6, 4)
    found = search_pi(s1, s2, denom_bound=4)
    assert PiMap(1, 1, 1) in found
    # the line x=y can only land on x=2y when alpha + beta = 2 gamma
    assert all(m.alpha + m.beta == 2 * m.gamma for m in found)


def test_search_pi_obstruction_pair_empty():
    sf = sample_xp(load_ca("gamma"), 2, 6, 4)
    sg = sample_xp(load_ca("gamma_inv"), 2, 6, 4)
    assert search_pi(sf, sg, denom_bound=8) == []


def test_replay_obstruction(samples):
    v = replay_final_argument(samples["gamma"], samples["gamma_inv"],
                              induction_backed=True,
                              pair=("gamma", "gamma_inv"))
    assert v["forced"] == {"beta": "0", "alpha_over_gamma": "2"}
    assert v["containment"] is False
    assert v["obstruction"] is True
    assert v["induction_backed"] is True
    assert v["mirror_normalized"] is False


def test_replay_obstruction_mirrored_target(samples):
    v = replay_final_argument(samples["gamma"], samples["mirror_inv"],
                              induction_backed=True,
                              pair=("gamma", "mirror(gamma_inv)"))
    assert v["forced"] == {"beta": "0", "alpha_over_gamma": "2"}
    assert v["mirror_normalized"] is True
    assert v["obstruction"] is True


def test_replay_self_simulation(samples):
    v = replay_final_argument(samples["gamma"], samples["gamma"],
                              pair=("gamma", "gamma"))
    assert v["forced"] == {"beta": "0", "alpha_over_gamma": "1"}
    assert v["containment"] is True
    assert v["obstruction"] is False
    assert v["induction_backed"] is False


def test_replay_requires_matching_scan(samples):
    other = sample_xp(load_ca("gamma"), 2, 6, 4)
    with pytest.raises(ValueError):
        replay_final_argument(samples["gamma"], other)
