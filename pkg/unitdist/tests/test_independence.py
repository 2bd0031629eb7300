import numpy as np
import pytest

from unitdist.errors import InvalidUsage, SolverError
from unitdist.geometry import (
    Cell600,
    E8Kissing,
    E8Roots,
    FiniteGraph,
    Johnson,
    QuadExt,
    Simplex,
    build_circulant,
    build_graph,
    parse_quadext,
)
from unitdist.independence import (
    AlphaBound,
    AlphaKind,
    Provenance,
    Registry,
    frankl_wilson,
    frankl_wilson_bound,
    greedy_bound,
    greedy_independent_set,
    is_prime_power,
    max_independent_set,
)


def _exact(spec, **kwargs):
    g = build_graph(spec)
    found = max_independent_set(g, budget=300, **kwargs)
    assert found.complete
    assert found.kind is AlphaKind.EXACT
    assert g.is_independent(found.witness)
    return found.value


# ------------------------------------------------------------------------------------ #
#                                    exact search                                      #
# ------------------------------------------------------------------------------------ #


def test_simplex_has_alpha_one():
    assert _exact(Simplex(5)) == 1


def test_edgeless_graph():
    g = build_circulant(7, ())
    found = max_independent_set(g)
    assert found.value == 7
    assert found.complete


@pytest.mark.parametrize("order, connection, alpha", [(5, (1,), 2), (7, (1,), 3), (8, (1, 4), 3), (10, (1, 5), 5)])
def test_small_circulants(order, connection, alpha):
    g = build_circulant(order, connection)
    assert max_independent_set(g, engine="bnb").value == alpha


def test_e8_kissing_alpha():
    assert _exact(E8Kissing()) == 7


@pytest.mark.parametrize("n, alpha", [(6, 4), (7, 5), (8, 8), (9, 8)])
def test_small_johnson(n, alpha):
    assert _exact(Johnson(n, 3, 1)) == alpha


@pytest.mark.slow
@pytest.mark.parametrize(
    "d_squared, alpha",
    [
        ("(5+sqrt5)/2", 39),
        ("(5-sqrt5)/2", 39),
        ("3", 26),
        ("(3+sqrt5)/2", 24),
        ("(3-sqrt5)/2", 24),
        ("2", 26),
        ("1", 20),
    ],
)
def test_600cell_alpha(d_squared, alpha):
    assert _exact(Cell600(parse_quadext(d_squared))) == alpha


@pytest.mark.slow
@pytest.mark.parametrize("d_squared, alpha", [(2, 16), (4, 16), (6, 36)])
def test_e8_alpha(d_squared, alpha):
    assert _exact(E8Roots(d_squared)) == alpha


@pytest.mark.slow
def test_johnson_10_5_2():
    assert _exact(Johnson(10, 5, 2), engine="cpsat") == 27


def test_engines_agree_on_random_circulants(rng):
    for _ in range(10):
        order = rng.randint(9, 30)
        connection = tuple(sorted(rng.sample(range(1, order // 2 + 1), 2)))
        g = build_circulant(order, connection)
        bnb = max_independent_set(g, engine="bnb", budget=60)
        cpsat = max_independent_set(g, engine="cpsat", budget=60, workers=1)
        assert bnb.complete and cpsat.complete
        assert bnb.value == cpsat.value, (order, connection)


def test_engine_limits():
    g = build_circulant(11, (1, 3))
    with pytest.raises(InvalidUsage):
        max_independent_set(g, engine="nope")
    with pytest.raises(InvalidUsage):
        max_independent_set(g, budget=0)
    with pytest.raises(InvalidUsage):
        max_independent_set(g, max_vertices=10)
    with pytest.raises(InvalidUsage):
        max_independent_set(g, engine="bnb", bnb_max_vertices=10)


def test_greedy_is_independent_and_below_alpha():
    g = build_graph(Johnson(8, 3, 1))
    witness = greedy_independent_set(g)
    assert g.is_independent(witness)
    assert len(witness) <= 8
    bound = greedy_bound(g)
    assert bound.kind is AlphaKind.LOWER
    assert bound.provenance is Provenance.COMPUTED_GREEDY


def test_interrupted_search_is_heuristic(monkeypatch):
    g = build_graph(Johnson(8, 3, 1))
    best = max_independent_set(g, engine="bnb").witness
    monkeypatch.setattr("unitdist.independence._search_bnb", lambda g, budget, incumbent: (list(best), False))
    found = max_independent_set(g, engine="bnb")
    assert found.kind is AlphaKind.LOWER
    assert not found.complete
    assert found.value == len(best)
    assert found.provenance is Provenance.COMPUTED_GREEDY


def _alpha_by_enumeration(g):
    """Largest independent set over all 2^M vertex subsets."""
    M = g.num_vertices
    masks = np.arange(1 << M, dtype=np.int64)
    clash = np.zeros(masks.shape, dtype=bool)
    for u, v in g.edges:
        clash |= ((masks >> u) & (masks >> v) & 1).astype(bool)
    sizes = np.zeros(masks.shape, dtype=np.int64)
    for k in range(M):
        sizes += (masks >> k) & 1
    return int(sizes[~clash].max())


def _random_graph(rng, M, p):
    edges = [(u, v) for u in range(M) for v in range(u + 1, M) if rng.random() < p]
    return FiniteGraph(M, tuple(edges), label=f"random:{M}")


@pytest.mark.parametrize("engine", ["bnb", "cpsat"])
def test_engines_match_enumeration_on_random_graphs(rng, engine):
    for _ in range(8):
        M = rng.randint(6, 22)
        g = _random_graph(rng, M, rng.choice([0.15, 0.3, 0.5]))
        found = max_independent_set(g, engine=engine, budget=60, workers=1)
        assert found.complete
        assert g.is_independent(found.witness)
        assert found.value == _alpha_by_enumeration(g), g.edges


@pytest.mark.parametrize("n", [6, 7, 8, 9])
def test_greedy_exact_and_upper_bounds_are_ordered(registry, n):
    spec = Johnson(n, 3, 1)
    g = build_graph(spec)
    exact = max_independent_set(g, budget=300)
    assert exact.complete
    assert greedy_bound(g).value <= exact.value
    assert exact.value <= frankl_wilson_bound(spec).value
    assert exact.value <= registry.lookup(spec).value


# ------------------------------------------------------------------------------------ #
#                                    frankl-wilson                                     #
# ------------------------------------------------------------------------------------ #


@pytest.mark.parametrize("q, expected", [(2, True), (4, True), (9, True), (6, False), (12, False), (1, False), (0, False)])
def test_is_prime_power(q, expected):
    assert is_prime_power(q) is expected


def test_frankl_wilson_values():
    assert frankl_wilson(9, 2) == 9
    assert frankl_wilson(13, 3) == 78
    assert frankl_wilson(22, 5) == 7315
    with pytest.raises(InvalidUsage):
        frankl_wilson(10, 6)
    with pytest.raises(InvalidUsage):
        frankl_wilson(4, 3)


def test_frankl_wilson_bound_only_on_matching_parameters():
    bound = frankl_wilson_bound(Johnson(16, 7, 3))
    assert bound.value == 560
    assert bound.kind is AlphaKind.UPPER
    assert frankl_wilson_bound(Johnson(16, 8, 3)) is None
    assert frankl_wilson_bound(Cell600(QuadExt(3))) is None


# ------------------------------------------------------------------------------------ #
#                                       registry                                       #
# ------------------------------------------------------------------------------------ #


def test_shipped_registry(registry):
    assert registry.lookup("johnson:13,6,2").value == 148
    assert registry.lookup(Johnson(22, 11, 5)).value == 11360
    assert registry.lookup("orth:24").value == 183373
    assert registry.lookup("johnson:6,3,1").value == 4
    assert registry.lookup("e8:dsq=6") is None


def test_registry_takes_the_smallest_bound(registry_file):
    reg = Registry.load(registry_file)
    assert len(reg) == 3
    found = reg.lookup("johnson:13,6,2")
    assert found.value == 148
    assert found.citation == "tight"
    assert found.provenance is Provenance.EXTERNAL


@pytest.mark.parametrize(
    "line",
    [
        "johnson:13,6,2 upper 148",
        "johnson:13,6,2 exact 148 cite",
        "johnson:13,6,2 upper many cite",
        "nowhere:3 upper 1 cite",
    ],
)
def test_registry_rejects_bad_lines(tmp_path, line):
    path = tmp_path / "bad.registry"
    path.write_text(line + "\n")
    with pytest.raises(InvalidUsage):
        Registry.load(path)


def test_registry_missing_file(tmp_path):
    with pytest.raises(InvalidUsage):
        Registry.load(tmp_path / "absent")


# ------------------------------------------------------------------------------------ #
#                                      alpha bound                                     #
# ------------------------------------------------------------------------------------ #


def test_alpha_bound_validation():
    with pytest.raises(InvalidUsage):
        AlphaBound("g", AlphaKind.UPPER, -1, Provenance.EXTERNAL)
    with pytest.raises(SolverError):
        AlphaBound("g", AlphaKind.EXACT, 2, Provenance.COMPUTED_EXACT, witness=(0, 1))
    with pytest.raises(SolverError):
        AlphaBound("g", AlphaKind.LOWER, 3, Provenance.COMPUTED_GREEDY, witness=(0, 1))
    ok = AlphaBound("g", AlphaKind.EXACT, 2, Provenance.COMPUTED_EXACT, witness=(0, 1), complete=True)
    assert ok.to_dict() == {
        "graph": "g",
        "kind": "exact",
        "alpha": 2,
        "provenance": "computed-exact",
        "citation": "",
    }
