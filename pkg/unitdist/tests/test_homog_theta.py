import math

import numpy as np
import pytest

from unitdist.errors import InvalidUsage
from unitdist.geometry import build_circulant
from unitdist.homog_theta import (
    AbelianCayleyGraph,
    SubgraphSpec,
    cayley_theta_lp,
    invariant_matrix,
    min_eigenvalue,
    ratio_inequality_check,
    subgraph_alpha,
    theta_cayley,
    theta_cayley_strengthened,
)
from unitdist.independence import max_independent_set

C5 = AbelianCayleyGraph.cyclic(5, (1,))


def _odd_cycle_theta(n: int) -> float:
    return n * math.cos(math.pi / n) / (1 + math.cos(math.pi / n))


# ------------------------------------------------------------------------------------ #
#                                     construction                                     #
# ------------------------------------------------------------------------------------ #


def test_connection_is_closed_under_negation():
    g = AbelianCayleyGraph.cyclic(13, (1, 5))
    assert {s[0] for s in g.connection} == {1, 5, 8, 12}
    assert g.label == "circulant:13:1,5"


def test_to_graph_matches_circulant_builder():
    g = AbelianCayleyGraph.cyclic(13, (1, 5))
    assert set(g.to_graph().edges) == set(build_circulant(13, (1, 5)).edges)


def test_product_group_elements():
    g = AbelianCayleyGraph((3, 4), ((1, 0), (0, 1)))
    assert g.size == 12
    assert g.elements.shape == (12, 2)
    assert g.index((2, 3)) == 11
    assert g.index((-1, -1)) == 11
    assert g.negate(g.index((1, 1))) == g.index((2, 3))
    assert all(d == 4 for d in g.to_graph().degrees())


@pytest.mark.parametrize(
    "orders, connection",
    [((1000, 1000), ()), ((5,), ((0,),)), ((5,), ((1, 1),)), ((0,), ())],
)
def test_rejected_groups(orders, connection):
    with pytest.raises(InvalidUsage):
        AbelianCayleyGraph(orders, connection)


def test_subgraph_spec_validation():
    with pytest.raises(InvalidUsage):
        SubgraphSpec((), 1)
    with pytest.raises(InvalidUsage):
        SubgraphSpec((0,), 0)


# ------------------------------------------------------------------------------------ #
#                                     plain theta                                      #
# ------------------------------------------------------------------------------------ #


def test_five_cycle():
    assert theta_cayley(C5) == pytest.approx(math.sqrt(5), abs=1e-8)


@pytest.mark.parametrize("n", [7, 9, 11, 15])
def test_odd_cycles(n):
    assert theta_cayley(AbelianCayleyGraph.cyclic(n, (1,))) == pytest.approx(_odd_cycle_theta(n), abs=1e-8)


def test_complete_graph():
    g = AbelianCayleyGraph.cyclic(7, range(1, 7))
    assert theta_cayley(g) == pytest.approx(1.0, abs=1e-9)


def test_edgeless_graph():
    g = AbelianCayleyGraph((3, 4), ())
    assert theta_cayley(g) == pytest.approx(12.0, abs=1e-8)
    assert cayley_theta_lp(g).density == pytest.approx(1.0, abs=1e-9)


def test_bipartite_torus():
    g = AbelianCayleyGraph((4, 4), ((1, 0), (0, 1)))
    assert theta_cayley(g) == pytest.approx(8.0, abs=1e-8)


def test_symmetrization_does_not_change_the_value():
    g = AbelianCayleyGraph.cyclic(17, (1, 4))
    full = cayley_theta_lp(g, symmetrize=False)
    reduced = cayley_theta_lp(g)
    assert reduced.num_orbits < full.num_orbits
    assert reduced.value == pytest.approx(full.value, abs=1e-8)


def test_optimal_f_is_positive_definite():
    for g in (C5, AbelianCayleyGraph.cyclic(17, (1, 4)), AbelianCayleyGraph((4, 6), ((1, 0), (1, 3)))):
        result = cayley_theta_lp(g)
        assert result.f[0] == pytest.approx(1.0)
        assert min_eigenvalue(g, result.f) >= -1e-8
        for s in g.connection:
            assert abs(result.f[g.index(s)]) <= 1e-9


def test_invariant_matrix_rows_are_shifts():
    g = AbelianCayleyGraph.cyclic(6, (1,))
    F = invariant_matrix(g, np.arange(6.0))
    assert F.shape == (6, 6)
    assert list(F[0]) == [0, 1, 2, 3, 4, 5]
    assert list(F[2]) == [4, 5, 0, 1, 2, 3]


# ------------------------------------------------------------------------------------ #
#                                  strengthened theta                                  #
# ------------------------------------------------------------------------------------ #


def test_five_cycle_strengthened():
    # {0, 2, 3} induces an edge plus a vertex
    sub = SubgraphSpec((0, 2, 3), subgraph_alpha(C5, (0, 2, 3)))
    assert sub.alpha_value == 2
    value = theta_cayley_strengthened(C5, sub)
    assert 2 - 1e-9 <= value < math.sqrt(5) - 1e-3


def test_consecutive_vertices_are_slack():
    # f vanishes on the neighbours of 0, so the constraint reads 1 + f(2) <= 2
    value = theta_cayley_strengthened(C5, SubgraphSpec((0, 1, 2), 2))
    assert value == pytest.approx(math.sqrt(5), abs=1e-8)


def test_single_vertex_is_redundant():
    g = AbelianCayleyGraph.cyclic(13, (1, 5))
    assert theta_cayley_strengthened(g, SubgraphSpec((0,), 1)) == pytest.approx(theta_cayley(g), abs=1e-8)


def test_sandwich_on_random_circulants(rng):
    for _ in range(50):
        N = rng.randint(5, 20)
        half = list(range(1, N // 2 + 1))
        S = rng.sample(half, rng.randint(1, min(3, len(half))))
        g = AbelianCayleyGraph.cyclic(N, S)
        V = sorted(rng.sample(range(N), rng.randint(1, N)))

        alpha = max_independent_set(g.to_graph(), engine="bnb").value
        sub = SubgraphSpec(tuple(V), subgraph_alpha(g, V))
        plain = theta_cayley(g)
        strong = cayley_theta_lp(g, sub)

        assert alpha - 1e-7 <= strong.value <= plain + 1e-7, (N, S, V)
        assert min_eigenvalue(g, strong.f) >= -1e-8
        assert ratio_inequality_check(g, V)


# ------------------------------------------------------------------------------------ #
#                                   ratio inequality                                   #
# ------------------------------------------------------------------------------------ #


def test_ratio_inequality_examples():
    assert ratio_inequality_check(C5, (0, 1, 2))
    assert ratio_inequality_check(C5, range(5))
    with pytest.raises(InvalidUsage):
        ratio_inequality_check(C5, ())


def test_subgraph_alpha():
    g = AbelianCayleyGraph((4, 4), ((1, 0), (0, 1)))
    assert subgraph_alpha(g, [(0, 0), (0, 1), (1, 1), (1, 0)]) == 2


def test_ratio_inequality_on_product_group():
    g = AbelianCayleyGraph((4, 4), ((1, 0), (0, 1)))
    # alpha(torus) / 16 = 1/2 against alpha(edge) / 2 = 1/2
    assert ratio_inequality_check(g, [(0, 0), (0, 1)])
    assert ratio_inequality_check(g, [(0, 0), (0, 2), (2, 0)])
    with pytest.raises(InvalidUsage):
        ratio_inequality_check(g, [(0, 0), (5,)])
