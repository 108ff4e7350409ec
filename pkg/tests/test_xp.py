import hashlib

from linca.automata import Rescaling, load_ca, rescale
from linca.xp import (XpSample, apply_lattice_shift_law, iteration_law_check,
                      lattice_pack_law_check, product_intersection_check,
                      render_sample, render_spacetime, sample_from_json,
                      sample_to_csv, sample_to_json, sample_xp,
                      subautomaton_inclusion_check)


def _lucas_points(n, k, y_max):
    """Binomial parity by digit containment, plus the isolation margin:
    row b contributes a when the binary digits of a are a subset of b's
    and the two support neighbors are more than p^(n-k) away."""
    margin = 2 ** (n - k)
    pts = set()
    for b in range(y_max + 1):
        support = [a for a in range(b + 1) if a & b == a]
        for i, a in enumerate(support):
            left_ok = i == 0 or a - support[i - 1] > margin
            right_ok = i == len(support) - 1 or support[i + 1] - a > margin
            if left_ok and right_ok:
                pts.add((a, b))
    return pts


def test_xor_sample_equals_lucas_predicate(xor):
    s = sample_xp(xor, 2, 8, 1)
    expected = _lucas_points(8, 1, s.y_max)
    assert s.points == expected
    assert len(s.points ^ expected) == 0


def test_sample_scale_and_margin():
    s = XpSample(2, 8, 3, 16, set())
    assert s.scale() == 256 and s.margin() == 32


def test_shift_line_sample():
    s1 = load_ca("shift(1)")
    s = sample_xp(s1, 2, 6, 2)
    assert s.points == {(b, b) for b in range(s.y_max + 1)}


def test_nilpotent_sample_collapses():
    nil = load_ca("nilpotent")
    s = sample_xp(nil, 2, 6, 2)
    assert s.points == {(0, 0)}


def test_lattice_shift_law(xor, gamma):
    for ca in (xor, gamma, load_ca("theta")):
        for z in (1, -2):
            shifted = rescale(ca, Rescaling(1, 1, z))
            s0 = sample_xp(ca, 2, 6, 2)
            s1 = sample_xp(shifted, 2, 6, 2)
            assert s1.points == apply_lattice_shift_law(s0, z).points


def test_pack_law(xor, gamma, theta):
    for ca in (xor, gamma, theta):
        assert lattice_pack_law_check(ca, 2, 2, 6, 2)


def test_product_intersection(xor, gamma, theta):
    assert product_intersection_check(xor, theta, 2, 6, 2)
    assert product_intersection_check(gamma, xor, 2, 6, 2)
    assert product_intersection_check(theta, gamma, 2, 6, 2)


def test_subautomaton_inclusion(theta, theta_inv, xor, gamma):
    swap = [[0, 1], [1, 0]]
    assert subautomaton_inclusion_check(theta_inv, theta, swap, 2, 6, 2)
    eye = [[1, 0], [0, 1]]
    assert subautomaton_inclusion_check(theta, theta, eye, 2, 6, 2)
    eye3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert subautomaton_inclusion_check(gamma, gamma, eye3, 2, 6, 2)


def test_iteration_law(xor, gamma):
    for ca in (xor, gamma):
        for t in (2, 3):
            assert iteration_law_check(ca, t, 2, 6, 2)


def test_json_round_trip(xor):
    s = sample_xp(xor, 2, 6, 2)
    t = sample_from_json(sample_to_json(s))
    assert (t.p, t.n, t.k, t.y_max, t.points) \
        == (s.p, s.n, s.k, s.y_max, s.points)
    # byte-deterministic serialization
    assert sample_to_json(s) == sample_to_json(t)


def test_csv_format(xor):
    s = sample_xp(xor, 2, 6, 2)
    lines = sample_to_csv(s).strip().splitlines()
    assert lines[0] == "x,y"
    assert len(lines) == len(s.points) + 1
    scale = s.scale()
    assert all(f"/{scale}," in ln for ln in lines[1:])


def test_render_golden_bytes(tmp_path, xor):
    st = tmp_path / "st.pgm"
    render_spacetime(xor, 32, str(st))
    assert hashlib.sha256(st.read_bytes()).hexdigest() == \
        "105954e83fd19f60af877f9b5cf05a5cc3371afe8614ef8b1c4277026bed144b"
    sm = tmp_path / "sm.pgm"
    render_sample(sample_xp(xor, 2, 6, 2), str(sm))
    assert hashlib.sha256(sm.read_bytes()).hexdigest() == \
        "3f6dcf23a0e4e98fea66c5906a09c6e4f232d8ae52b64d081c4b86a50d0de78e"


def test_render_mirror_differs(tmp_path, gamma):
    a = tmp_path / "a.pgm"
    b = tmp_path / "b.pgm"
    render_spacetime(gamma, 16, str(a))
    render_spacetime(gamma, 16, str(b), mirror=True)
    assert a.read_bytes() != b.read_bytes()
