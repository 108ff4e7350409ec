import json
import os

import pytest

from linca.automata import load_ca
from linca.green import green_row
from linca.subst import (_BUILTIN_CHECKSUMS, SubstSystem, TRIANGLE,
                         TRIANGLE_DOUBLED, builtin_system_names, cell,
                         check_assertion_i, check_assertion_ii,
                         check_assertion_iii, expand, load_system,
                         nontrivial_sccs, transition_graph,
                         triangle_region_empty, verify_against_green)

DATA = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture(scope="module")
def gamma_sys():
    return load_system("gamma")


@pytest.fixture(scope="module")
def omega_sys():
    return load_system("omega")


def test_depth5_grid_matches_golden(gamma_sys):
    with open(os.path.join(DATA, "gamma_depth5_golden.json")) as fh:
        golden = json.load(fh)
    assert golden["depth"] == 5
    grid = expand(gamma_sys, 5)
    want = {(x, y): name for x, y, name in golden["cells"]}
    got = {(x, y): gamma_sys.state_name(st)
           for y, row in enumerate(grid.rows) for x, st in row.items()}
    assert got == want


def test_cell_matches_expand(gamma_sys, omega_sys):
    for s in (gamma_sys, omega_sys):
        for depth in (3, 5, 7):
            grid = expand(s, depth)
            for y, row in enumerate(grid.rows):
                for x in range(2 ** depth):
                    assert cell(s, x, y, depth) == row.get(x, 0)


def test_all_builtins_verify_against_green():
    cas = {"gamma": "gamma", "gamma_full9": "gamma",
           "omega": "gamma_inv", "omega_full12": "gamma_inv"}
    assert sorted(cas) == builtin_system_names()
    for name, ca_name in cas.items():
        s = load_system(name, verify_depth=0)
        ok, where = verify_against_green(s, load_ca(ca_name), 5)
        assert ok, (name, where)


def test_checksums_frozen_for_all_builtins():
    for name in builtin_system_names():
        assert load_system(name, verify_depth=0).checksum() \
            == _BUILTIN_CHECKSUMS[name]


def test_tampered_table_fails_checksum(monkeypatch):
    import linca.subst as subst
    bad = dict(_BUILTIN_CHECKSUMS)
    bad["gamma"] = "0" * 64
    monkeypatch.setattr(subst, "_BUILTIN_CHECKSUMS", bad)
    with pytest.raises(ValueError):
        load_system("gamma")


def test_mirror_projection_matches_green(gamma_sys, omega_sys):
    # grid cell (x, y) projects to the Green entry at -x (mirrored layout)
    for s, ca in ((gamma_sys, load_ca("gamma")),
                  (omega_sys, load_ca("gamma_inv"))):
        assert s.mirror
        grid = expand(s, 4)
        for y in range(16):
            row = green_row(ca, y)
            for x in range(16):
                assert s.project(grid.at(x, y)) == row.at(-x)


def test_gamma_transition_graph_structure(gamma_sys):
    g = transition_graph(gamma_sys)
    names = {gamma_sys.state_name(v) for v in g.vertices()}
    assert len(names) == 11
    comps = nontrivial_sccs(g)
    nonzero = [c for c in comps if c != {0}]
    assert len(nonzero) == 2
    bd = gamma_sys.state_from_letters(["b", "d"])
    assert {bd} in [set(c) for c in nonzero]
    # the large component contains both column letters
    big = max(nonzero, key=len)
    assert gamma_sys.state_from_letters(["d"]) in big
    assert gamma_sys.state_from_letters(["g"]) in big
    # D is reachable from every nonzero reachable state except BD
    d = gamma_sys.state_from_letters(["d"])
    for v in g.vertices():
        if v and v != bd:
            assert d in g.reachable_from(v), gamma_sys.state_name(v)
    assert d not in g.reachable_from(bd)


def test_assertion_i_small(gamma_sys):
    assert check_assertion_i(gamma_sys, n_max=32)


def test_assertion_ii_small(gamma_sys):
    assert check_assertion_ii(gamma_sys, n_max=10)


def test_assertion_iii_small(omega_sys):
    assert check_assertion_iii(omega_sys, n_max=8)


def test_triangle_expansion_emptiness(omega_sys):
    assert triangle_region_empty(omega_sys, TRIANGLE, 8)
    assert triangle_region_empty(omega_sys, TRIANGLE_DOUBLED, 8,
                                 scale_depth=7)


def test_state_name_round_trip(gamma_sys):
    for letters in (["b"], ["b", "d"], ["c", "f"], ["b", "d", "g"]):
        mask = gamma_sys.state_from_letters(letters)
        assert gamma_sys.state_name(mask) \
            == "".join(l.upper() for l in letters)
    assert gamma_sys.state_name(0) == "0"


def test_quadrant_maps_are_linear(gamma_sys, omega_sys):
    for s in (gamma_sys, omega_sys):
        n = len(s.letters)
        for quad in s.quads:
            for a in range(1 << n):
                for b in range(1 << n):
                    assert s.apply(quad, a ^ b) \
                        == s.apply(quad, a) ^ s.apply(quad, b)
                if n > 5:
                    break  # exhaustive pairs only for the small system


def test_load_rejects_unknown():
    with pytest.raises((KeyError, OSError)):
        load_system("no_such_system")
