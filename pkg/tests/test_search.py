import math

import numpy as np
import pytest

from imcheck import ContractError, build_product
from imcheck.oracle import (classify_bsccs, enumerate_accepting_union,
                            enumerate_nonaccepting_union, iter_resolutions,
                            sample_vertex_adversary)
from imcheck.search import (EdgeGraph, find_largest_accepting_single_pair,
                            find_largest_nonaccepting, find_leaky,
                            strongly_connected_components)

from . import generators
from .generators import make_product, random_dra, random_imc


# --- strongly connected components -----------------------------------------

def test_case_study_model_scc_partition(grid):
    g = EdgeGraph.from_product(grid)
    comps = {frozenset(grid.states[i] for i in c)
             for c in strongly_connected_components(g)}
    assert comps == {frozenset({"q0", "q1", "q5"}), frozenset({"q2", "q4"}),
                     frozenset({"q3"})}


def test_empty_graph_has_no_components():
    g = EdgeGraph(0, (), ())
    assert strongly_connected_components(g) == []


def test_self_loop_singleton():
    g = EdgeGraph(1, ((0,),), ((0,),))
    assert strongly_connected_components(g) == [frozenset({0})]


def test_restrict_limits_the_partition(grid):
    g = EdgeGraph.from_product(grid)
    comps = strongly_connected_components(g, restrict={grid.index_of("q2"),
                                                       grid.index_of("q4")})
    assert comps == [frozenset({2, 4})]


# --- leaky elimination ------------------------------------------------------

def test_grid_top_scc_is_fully_leaky(grid):
    c = {grid.index_of(q) for q in ("q0", "q1", "q5")}
    assert find_leaky(c, grid) == frozenset(c)


def test_grid_bottom_cycles_are_leak_free(grid):
    assert find_leaky({2, 4}, grid) == frozenset()
    assert find_leaky({3}, grid) == frozenset()


def test_leaky_propagates_through_forced_edges():
    # b is forced into leaky a; c only closes through b
    lower = [[0.0, 0.0, 0.0],
             [0.5, 0.0, 0.0],
             [0.0, 0.0, 0.0]]
    upper = [[0.0, 0.0, 0.0],  # a has no mass inside the candidate
             [0.5, 0.5, 0.0],
             [0.0, 1.0, 0.5]]
    p = make_product(lower, upper, np.zeros((3, 1)), np.zeros((3, 1)))
    assert find_leaky({0, 1, 2}, p) == frozenset({0, 1, 2})


def test_seeds_are_respected():
    lower = [[0.0, 0.0], [0.0, 0.0]]
    upper = [[1.0, 1.0], [1.0, 1.0]]
    p = make_product(lower, upper, np.zeros((2, 1)), np.zeros((2, 1)))
    assert find_leaky({0, 1}, p) == frozenset()
    assert find_leaky({0, 1}, p, seeds={0}) >= frozenset({0})


# --- largest non-accepting set ----------------------------------------------

def test_accepts_nothing_nonaccepting_projects_to_bottom_states(grid, a_nothing):
    p = build_product(grid, a_nothing)
    sets = find_largest_nonaccepting(p)
    assert p.project(sets.non_accepting) == {"q2", "q3", "q4"}
    assert sets.non_accepting == enumerate_nonaccepting_union(p)


def test_all_f_no_e_gives_empty_nonaccepting(grid, a_universal):
    p = build_product(grid, a_universal)
    assert find_largest_nonaccepting(p).non_accepting == frozenset()


def test_nonaccepting_witnesses_are_leak_free(grid, a_phi1):
    p = build_product(grid, a_phi1)
    sets = find_largest_nonaccepting(p)
    lower, upper = np.asarray(p.lower), np.asarray(p.upper)
    for w in sets.witnesses:
        b = w.members
        for v in b:
            assert all(t in b for t in np.flatnonzero(lower[v] > 0)), "forced edge leaves BSCC"
            assert math.fsum(upper[v][sorted(b)]) >= 1.0
        if w.matched_pairs:
            for i in w.matched_pairs:
                assert any(p.e_members[v, i] for v in b)


def test_superset_of_sampled_chain_nonaccepting(grid, a_phi2):
    p = build_product(grid, a_phi2)
    u_n = find_largest_nonaccepting(p).non_accepting
    for seed in range(25):
        mc = sample_vertex_adversary(p, seed)
        succ = [np.flatnonzero(mc.trans[v] > 0).tolist() for v in range(mc.n)]
        _, non = classify_bsccs(p, succ, np.flatnonzero(p.reachable))
        assert non <= u_n


# --- hand-built counterexample fixtures ---------------------------------------

@pytest.fixture(name="toggle_path_product")
def toggle_path_fixture():
    return generators.toggle_path_product()


def test_toggle_path_nonaccepting_is_the_sink_under_every_resolution(toggle_path_product):
    p = toggle_path_product
    for res in iter_resolutions(p):
        _, non = classify_bsccs(p, res.succ, range(p.n))
        assert 3 in non
    sets = find_largest_nonaccepting(p)
    assert sets.non_accepting == frozenset({3})
    assert sets.non_accepting == enumerate_nonaccepting_union(p)


def test_toggle_path_accepting_is_the_cycle(toggle_path_product):
    p = toggle_path_product
    sets = find_largest_accepting_single_pair(p)
    assert sets.accepting == frozenset({0, 1, 2})
    assert sets.accepting == enumerate_accepting_union(p)


@pytest.fixture(name="two_pair_switch_product")
def two_pair_switch_fixture():
    return generators.two_pair_switch_product()


def test_switch_single_pair_views_yield_either_side(two_pair_switch_product):
    p = two_pair_switch_product
    left = make_product(p.lower, p.upper, p.e_members[:, :1], p.f_members[:, :1])
    right = make_product(p.lower, p.upper, p.e_members[:, 1:], p.f_members[:, 1:])
    assert find_largest_accepting_single_pair(left).accepting == frozenset({0, 1})
    assert find_largest_accepting_single_pair(right).accepting == frozenset({1, 2})


def test_switch_has_no_resolution_accepting_all_three(two_pair_switch_product):
    p = two_pair_switch_product
    per_resolution = [classify_bsccs(p, res.succ, range(p.n))[0]
                      for res in iter_resolutions(p)]
    union = frozenset().union(*per_resolution)
    assert union == frozenset({0, 1, 2})
    assert all(acc != frozenset({0, 1, 2}) for acc in per_resolution)


def test_switch_nonaccepting_analogue_holds(two_pair_switch_product):
    """The union of non-accepting sets is achieved by a single resolution."""
    p = two_pair_switch_product
    per_resolution = [classify_bsccs(p, res.succ, range(p.n))[1]
                      for res in iter_resolutions(p)]
    union = frozenset().union(*per_resolution)
    assert union in per_resolution
    assert find_largest_nonaccepting(p).non_accepting == union


# --- contracts and degenerate structure --------------------------------------

def test_absorbing_f_singleton_is_accepting():
    p = make_product([[1.0]], [[1.0]], np.zeros((1, 1)), np.ones((1, 1)))
    sets = find_largest_accepting_single_pair(p)
    assert sets.accepting == frozenset({0})
    assert sets.witnesses[0].pair == 0


def test_edge_graph_forced_edges_are_edges(grid):
    g = EdgeGraph.from_product(grid)
    for v in range(g.n):
        assert set(g.forced[v]) <= set(g.succ[v])


def test_accepting_search_requires_single_pair(grid, a_phi2):
    p = build_product(grid, a_phi2)
    with pytest.raises(ContractError, match="one Rabin pair"):
        find_largest_accepting_single_pair(p)


def test_pinned_row_phantom_edges_do_not_create_bsccs():
    """A row whose lower bounds sum to 1 cannot fire its optional edges."""
    # a: pinned to b, phantom upper mass to c; b: back to a; c: only to a
    lower = [[0.0, 1.0, 0.0],
             [1.0, 0.0, 0.0],
             [0.0, 0.0, 0.0]]
    upper = [[0.0, 1.0, 0.5],
             [1.0, 0.0, 0.0],
             [1.0, 0.0, 0.0]]
    p = make_product(lower, upper, np.zeros((3, 1)), np.zeros((3, 1)))
    sets = find_largest_nonaccepting(p)
    assert sets.non_accepting == frozenset({0, 1})
    assert sets.non_accepting == enumerate_nonaccepting_union(p)


def test_oracle_equivalence_on_random_sample():
    mismatches = 0
    for seed in range(60):
        rng = np.random.default_rng(40_000 + seed)
        m = random_imc(rng, int(rng.integers(2, 6)))
        a = random_dra(rng, int(rng.integers(1, 4)), n_pairs=int(rng.integers(1, 3)))
        p = build_product(m, a)
        try:
            expected = enumerate_nonaccepting_union(p)
        except ContractError:
            continue  # too many optional edges for the oracle
        if find_largest_nonaccepting(p).non_accepting != expected:
            mismatches += 1
    assert mismatches == 0
