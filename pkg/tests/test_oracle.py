import copy

import pytest
from hypothesis import given, settings, strategies as st

from zcolor.coloring import build_matrix, integer_kernel, kernel_colorings, nontrivial_coloring, palette, validate
from zcolor.diagram import from_pd, r2_push_over
from zcolor.generators import braid_closure, pretzel, random_braid_closure, scramble, trefoil, zero_det_pretzels
from zcolor.oracle import (
    EXHAUSTED,
    TooLargeError,
    bounded_palette_search,
    exhaustive_small_coloring_check,
    lattice_coordinates,
    rational_nullity,
    verify_trace,
)


def _pushed():
    d = pretzel([2, -2])
    g = nontrivial_coloring(d)
    d2, g2, rec = r2_push_over(d, g, 1, 0)
    return d, g, [rec], d2, g2


def test_empty_trace_passes():
    d = pretzel([3, -3])
    g = nontrivial_coloring(d)
    v = verify_trace(d, g, [], d, g)
    assert v.ok and v.steps_checked == 0


def test_single_push_passes():
    assert verify_trace(*_pushed())


def test_tampered_middle_color_fails_at_step_one():
    d, g, trace, d2, g2 = _pushed()
    bad = copy.deepcopy(trace)
    middle = next(a for a, c in bad[0]["colors"].items() if c == 5)
    bad[0]["colors"][middle] = 6
    v = verify_trace(d, g, bad, d2, g2)
    assert not v
    assert v.step == 1
    assert v.invariant == "coloring"


def test_wrong_output_fails():
    d, g, trace, d2, g2 = _pushed()
    g3 = dict(g2)
    g3[0] += 1
    v = verify_trace(d, g, trace, d2, g3)
    assert not v.ok


def test_bogus_site_fails():
    d, g, trace, d2, g2 = _pushed()
    bad = copy.deepcopy(trace)
    bad[0]["site"]["target"] = [0, 0]
    v = verify_trace(d, g, bad, d2, g2)
    assert not v.ok and v.step == 1


def test_tampered_step_in_longer_trace():
    d = pretzel([3, -3])
    g = nontrivial_coloring(d)
    d2, g2, trace = scramble(d, g, 4, 8)
    assert verify_trace(d, g, trace, d2, g2)
    bad = copy.deepcopy(trace)
    arc = next(iter(bad[4]["colors"]))
    bad[4]["colors"][arc] += 1
    v = verify_trace(d, g, bad, d2, g2)
    assert not v.ok and v.step == 5


def test_rational_nullity_examples():
    assert rational_nullity(build_matrix(trefoil())) == 1
    assert rational_nullity([[0] * 4 for _ in range(4)]) == 4
    assert rational_nullity(build_matrix(pretzel([2, -2]))) >= 2


def _kink():
    return from_pd({0: (0, 0, 1, 1)})


def test_exhaustive_examples():
    assert exhaustive_small_coloring_check(_kink(), range(3)) == [{0: 0}, {0: 1}, {0: 2}]
    found = exhaustive_small_coloring_check(trefoil(), range(3))
    assert [set(g.values()) for g in found] == [{0}, {1}, {2}]


def test_exhaustive_too_large():
    with pytest.raises(TooLargeError):
        exhaustive_small_coloring_check(random_braid_closure(0, 4, 12), range(3))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 3), st.integers(1, 5))
def test_exhaustive_hits_lie_in_kernel_lattice(seed, strands, length):
    d = random_braid_closure(seed, strands, length)
    if len(d.arcs) > 8:
        return
    basis = kernel_colorings(d)
    for g in exhaustive_small_coloring_check(d, range(-2, 3)):
        assert lattice_coordinates(g, basis) is not None


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 4), st.integers(1, 10))
def test_two_nullity_routes_agree(seed, strands, length):
    m = build_matrix(random_braid_closure(seed, strands, length))
    assert len(integer_kernel(m)) == rational_nullity(m)


def test_palette_search_k1_exhausted():
    assert bounded_palette_search(pretzel([2, -2]), 1, 3) == EXHAUSTED


def test_palette_search_result_contract():
    d = pretzel([2, -2])
    g = bounded_palette_search(d, 4, 3)
    assert g != EXHAUSTED
    assert validate(d, g)
    assert 1 < palette(g)[1] <= 4


@pytest.mark.parametrize("twists,d", zero_det_pretzels(), ids=lambda x: str(x) if isinstance(x, tuple) else "")
def test_palette_search_three_colors_exhausted(twists, d):
    assert bounded_palette_search(d, 3, 6) == EXHAUSTED


def test_palette_search_is_deterministic():
    d = braid_closure(3, [1, -1, 2, -2])
    assert bounded_palette_search(d, 4, 2) == bounded_palette_search(d, 4, 2)
