import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imcheck import ValidationError, build_product, validate_imc
from imcheck.product import dump_product_json, pstate_name

from .generators import random_dra, random_imc


def test_case_study_product_has_grid_of_pstates(grid, a_phi1):
    p = build_product(grid, a_phi1)
    assert p.n == 18
    assert len(p.initial_of) == 6


def test_q3_row_is_single_point_interval(grid, a_phi1):
    """q3 self-loops with [1,1]; the automaton component follows L(q3) = {R}."""
    p = build_product(grid, a_phi1)
    dest_aut = a_phi1.step(a_phi1.index_of("s1"), frozenset({"R"}))
    src = p.pstates.index(("q3", "s1"))
    dst = p.pstates.index(("q3", a_phi1.aut_states[dest_aut]))
    row = np.asarray(p.lower)[src]
    assert row[dst] == 1.0 and np.asarray(p.upper)[src][dst] == 1.0
    assert math.fsum(row) == 1.0
    assert math.fsum(np.asarray(p.upper)[src]) == 1.0


def test_universal_product_isomorphic_to_model(grid, a_universal):
    p = build_product(grid, a_universal)
    assert p.n == grid.n
    assert np.array_equal(p.lower, grid.lower)
    assert np.array_equal(p.upper, grid.upper)
    assert all("F1" in lab for lab in p.labels)
    assert p.reachable.all()


def test_product_validates_as_imc(grid, a_phi1, a_phi2, a_not_phi2):
    for a in (a_phi1, a_phi2, a_not_phi2):
        assert validate_imc(build_product(grid, a)) == []


def test_prop_mismatch_raises(grid):
    a = random_dra(np.random.default_rng(0), 2, props=("X", "Y"))
    with pytest.raises(ValidationError, match="prop mismatch"):
        build_product(grid, a)


def test_projection_recovers_model_rows(grid, a_phi2):
    """Summing product intervals over automaton components gives the model row."""
    p = build_product(grid, a_phi2)
    ns = a_phi2.n
    for qj in range(grid.n):
        for s in range(ns):
            src = qj * ns + s
            for ql in range(grid.n):
                cols = [ql * ns + t for t in range(ns)]
                assert math.fsum(np.asarray(p.lower)[src][cols]) == grid.lower[qj, ql]
                assert math.fsum(np.asarray(p.upper)[src][cols]) == grid.upper[qj, ql]


def test_rows_are_automaton_deterministic(grid, a_phi2):
    """At most one nonzero column per model successor in each product row."""
    p = build_product(grid, a_phi2)
    ns = a_phi2.n
    upper = np.asarray(p.upper)
    for src in range(p.n):
        for ql in range(grid.n):
            cols = [ql * ns + t for t in range(ns)]
            assert int((upper[src][cols] > 0).sum()) <= 1


def test_plabels_reflect_pair_membership(grid, a_phi2):
    p = build_product(grid, a_phi2)
    for v, (q, s) in enumerate(p.pstates):
        for i, (e, f) in enumerate(a_phi2.pairs):
            assert p.e_members[v, i] == (s in e)
            assert p.f_members[v, i] == (s in f)


def test_reachable_set_is_forward_closed(grid, a_phi1):
    p = build_product(grid, a_phi1)
    reach = set(np.flatnonzero(p.reachable).tolist())
    assert set(p.initial_of.values()) <= reach
    upper = np.asarray(p.upper)
    for v in reach:
        if math.fsum(np.asarray(p.lower)[v]) < 1.0:
            succ = np.flatnonzero(upper[v] > 0)
        else:
            succ = np.flatnonzero(np.asarray(p.lower)[v] > 0)
        assert set(succ.tolist()) <= reach


def test_sampled_product_chains_project_into_model_intervals(grid, a_phi2):
    """Induced product chains behave like some adversary of the base model."""
    from imcheck import contains_distribution
    from imcheck.oracle import sample_vertex_adversary

    p = build_product(grid, a_phi2)
    ns = a_phi2.n
    for seed in range(10):
        mc = sample_vertex_adversary(p, seed)
        for qj in range(grid.n):
            for s in range(ns):
                projected = [math.fsum(mc.trans[qj * ns + s][ql * ns + t] for t in range(ns))
                             for ql in range(grid.n)]
                assert contains_distribution(grid, grid.states[qj], projected)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_random_products_validate(seed):
    rng = np.random.default_rng(seed)
    m = random_imc(rng, int(rng.integers(2, 6)))
    a = random_dra(rng, int(rng.integers(1, 4)), n_pairs=int(rng.integers(1, 3)))
    assert validate_imc(build_product(m, a)) == []


def test_dump_contains_imc_form_and_metadata(grid, a_phi1):
    p = build_product(grid, a_phi1)
    doc = dump_product_json(p)
    assert set(doc) >= {"states", "props", "labels", "lower", "upper", "initial_of", "reachable"}
    assert pstate_name("q0", a_phi1.initial) in doc["states"]
    assert len(doc["lower"]) == p.n
