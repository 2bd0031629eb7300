import math
from fractions import Fraction

import numpy as np
import pytest

from unitdist.errors import InvalidUsage
from unitdist.geometry import (
    Cell600,
    Circulant,
    E8Kissing,
    E8Roots,
    GraphFile,
    GraphSpec,
    Johnson,
    Orthogonality,
    QuadExt,
    Simplex,
    build_600cell,
    build_circulant,
    build_e8_kissing,
    build_e8_roots,
    build_graph,
    build_johnson,
    build_orthogonality,
    build_simplex,
    distance_graph,
    graph_profile,
    johnson_radius_squared,
    parse_quadext,
    read_graph_file,
    write_graph_file,
)

PHI = QuadExt(Fraction(1, 2), Fraction(1, 2))


# ------------------------------------------------------------------------------------ #
#                                     exact numbers                                    #
# ------------------------------------------------------------------------------------ #


def test_golden_ratio_identities():
    assert PHI * PHI == PHI + 1
    assert 1 / PHI == PHI - 1
    assert PHI.conjugate() * PHI == -1
    assert PHI.norm() == -1


def test_quadext_sign_and_order():
    assert QuadExt(3, -1).sign() == 1  # 3 > sqrt5
    assert QuadExt(2, -1).sign() == -1  # 2 < sqrt5
    assert QuadExt(0, 0).sign() == 0
    assert QuadExt(Fraction(3, 2), Fraction(-1, 2)) < 1
    assert sorted([QuadExt(3), PHI, QuadExt(2)]) == [PHI, QuadExt(2), QuadExt(3)]


@pytest.mark.parametrize(
    "text, expected",
    [
        ("3", QuadExt(3)),
        ("1/2", QuadExt(Fraction(1, 2))),
        ("(5+sqrt5)/2", QuadExt(Fraction(5, 2), Fraction(1, 2))),
        ("(3-√5)/2", QuadExt(Fraction(3, 2), Fraction(-1, 2))),
        ("2sqrt5", QuadExt(0, 2)),
        ("sqrt(5)*sqrt(5)", QuadExt(5)),
        ("-1 + 2*(1 - sqrt5)", QuadExt(1, -2)),
    ],
)
def test_parse_quadext(text, expected):
    assert parse_quadext(text) == expected


@pytest.mark.parametrize("text", ["", "sqrt3", "(1+2", "1/0", "1 2 )"])
def test_parse_quadext_rejects(text):
    with pytest.raises(InvalidUsage):
        parse_quadext(text)


def test_quadext_str_parses_back():
    for q in (QuadExt(Fraction(5, 2), Fraction(1, 2)), QuadExt(Fraction(3, 2), Fraction(-1, 2)), QuadExt(7), QuadExt(0, -3)):
        assert parse_quadext(str(q)) == q


# ------------------------------------------------------------------------------------ #
#                                      point sets                                      #
# ------------------------------------------------------------------------------------ #


@pytest.fixture(scope="module")
def cell600():
    return build_600cell()


def test_600cell_on_unit_sphere(cell600):
    assert len(cell600) == 120
    assert all(q == 1 for q in cell600.squared_norms())


def test_600cell_distances(cell600):
    expected = sorted(
        parse_quadext(t) for t in ["(3-sqrt5)/2", "1", "(5-sqrt5)/2", "2", "3", "(5+sqrt5)/2", "(3+sqrt5)/2", "4"]
    )
    assert cell600.squared_distances() == expected


def test_600cell_is_regular(cell600):
    # every vertex has 12 nearest neighbours at squared distance (3 - sqrt5)/2
    g = distance_graph(cell600, "(3-sqrt5)/2")
    assert set(g.degrees()) == {12}
    assert len(g.edges) == 720
    assert g.max_edge_error() < 1e-12


def test_e8_roots():
    roots = build_e8_roots()
    assert len(roots) == 240
    assert all(q == 2 for q in roots.squared_norms())
    assert roots.squared_distances() == [QuadExt(2), QuadExt(4), QuadExt(6), QuadExt(8)]


def test_e8_kissing():
    ps = build_e8_kissing()
    assert len(ps) == 56
    assert all(q == Fraction(3, 2) for q in ps.squared_norms())
    # centered: the coordinate sums vanish
    assert np.allclose(ps.as_float().sum(axis=0), 0.0)
    # the points span a hyperplane
    assert np.linalg.matrix_rank(ps.as_float(), tol=1e-9) == 7


def test_e8_kissing_graph():
    g = E8Kissing().build()
    assert g.dim == 7
    assert g.radii[0] == pytest.approx(math.sqrt(6) / 4)
    # every vertex is joined to 27 others at squared distance 4
    assert set(g.degrees()) == {27}


def test_distance_graph_without_hits(cell600):
    g = distance_graph(cell600, QuadExt(5))
    assert g.edges == ()


# ------------------------------------------------------------------------------------ #
#                                    graph families                                    #
# ------------------------------------------------------------------------------------ #


@pytest.mark.parametrize("n, w, i", [(6, 3, 1), (7, 3, 1), (9, 3, 1), (10, 5, 2)])
def test_johnson_unit_edges(n, w, i):
    g = build_johnson(n, w, i)
    assert g.num_vertices == math.comb(n, w)
    assert set(g.degrees()) == {math.comb(w, i) * math.comb(n - w, w - i)}
    assert g.max_edge_error() < 1e-12
    r2 = float(johnson_radius_squared(n, w, i))
    np.testing.assert_allclose(np.sum(g.coords**2, axis=1), r2, atol=1e-12)
    assert g.dim == n - 1


def test_johnson_radii_of_table_rows():
    assert johnson_radius_squared(13, 6, 2) == Fraction(21, 52)
    assert johnson_radius_squared(14, 7, 3) == Fraction(7, 16)
    assert johnson_radius_squared(20, 9, 3) == Fraction(33, 80)
    assert johnson_radius_squared(24, 12, 5) == Fraction(3, 7)


def test_johnson_adjacency_is_intersection():
    g = build_johnson(7, 3, 1)
    from unitdist.geometry import johnson_vertices

    masks = johnson_vertices(7, 3)
    for u, v in g.edges[:50]:
        assert (masks[u] & masks[v]).bit_count() == 1


@pytest.mark.parametrize("n, w, i", [(5, 3, 0), (6, 0, 0), (6, 3, 3)])
def test_johnson_rejects(n, w, i):
    with pytest.raises(InvalidUsage):
        build_johnson(n, w, i)


def test_johnson_edge_cap():
    # far too many edges to materialise, but its profile is available
    with pytest.raises(InvalidUsage):
        build_johnson(24, 12, 5)
    profile = graph_profile(Johnson(24, 12, 5))
    assert profile.num_vertices == 2704156
    assert profile.radius_label == "sqrt(3/7)"


def test_orthogonality_graph():
    g = build_orthogonality(8)
    assert g.num_vertices == 256
    assert set(g.degrees()) == {70}
    assert g.max_edge_error() < 1e-12
    assert g.radii[0] == pytest.approx(math.sqrt(0.5))


def test_orthogonality_limits():
    with pytest.raises(InvalidUsage):
        build_orthogonality(6)
    with pytest.raises(InvalidUsage):
        build_orthogonality(24)
    assert graph_profile(Orthogonality(24)).num_vertices == 2**24


def test_simplex():
    g = build_simplex(3)
    assert g.num_vertices == 4 and len(g.edges) == 6
    assert g.max_edge_error() < 1e-12
    assert g.radii[0] == pytest.approx(math.sqrt(3 / 8))


def test_circulant():
    g = build_circulant(5, [1])
    assert g.edges == ((0, 1), (0, 4), (1, 2), (2, 3), (3, 4))
    assert g.vertex_transitive
    with pytest.raises(InvalidUsage):
        build_circulant(5, [0, 1])


def test_induced_subgraph():
    g = build_circulant(6, [1])
    sub = g.induced([0, 1, 2])
    assert sub.edges == ((0, 1), (1, 2))
    assert not sub.vertex_transitive


def test_is_independent():
    g = build_circulant(6, [1])
    assert g.is_independent([0, 2, 4])
    assert not g.is_independent([0, 1])


# ------------------------------------------------------------------------------------ #
#                                      graph specs                                     #
# ------------------------------------------------------------------------------------ #


@pytest.mark.parametrize(
    "text, expected",
    [
        ("johnson:13,6,2", Johnson(13, 6, 2)),
        ("600cell:dsq=3", Cell600(QuadExt(3))),
        ("600cell:dsq=(5+sqrt5)/2", Cell600(QuadExt(Fraction(5, 2), Fraction(1, 2)))),
        ("e8:dsq=6", E8Roots(6)),
        ("e8kissing", E8Kissing(4)),
        ("e8kissing:dsq=6", E8Kissing(6)),
        ("orth:24", Orthogonality(24)),
        ("simplex:4", Simplex(4)),
        ("circulant:5:1", Circulant(5, (1,))),
    ],
)
def test_spec_parse_roundtrip(text, expected):
    spec = GraphSpec.parse(text)
    assert spec == expected
    assert GraphSpec.parse(str(spec)) == spec


@pytest.mark.parametrize("text", ["petersen", "johnson:1,2", "e8:6", "600cell:dsq=", "file:"])
def test_spec_parse_rejects(text):
    with pytest.raises(InvalidUsage):
        GraphSpec.parse(text)


@pytest.mark.parametrize(
    "spec, dim, vertices, r2",
    [
        (Cell600(QuadExt(3)), 4, 120, 1 / 3),
        (E8Roots(6), 8, 240, 1 / 3),
        (E8Kissing(), 7, 56, 3 / 8),
        (Johnson(13, 6, 2), 12, 1716, 21 / 52),
    ],
)
def test_profile_matches_built_graph(spec, dim, vertices, r2):
    profile = graph_profile(spec)
    assert (profile.dim, profile.num_vertices) == (dim, vertices)
    assert profile.profile[0][0] ** 2 == pytest.approx(r2)
    built = build_graph(spec)
    assert built.num_vertices == vertices
    assert built.radius_profile()[0][0] == pytest.approx(profile.profile[0][0], abs=1e-12)


def test_build_graph_is_cached():
    assert build_graph(Johnson(6, 3, 1)) is build_graph(Johnson(6, 3, 1))


def test_graph_file_roundtrip(tmp_path):
    g = E8Roots(4).build()
    path = write_graph_file(g, tmp_path / "e8.graph")
    back = read_graph_file(path)
    assert back.num_vertices == 240
    assert back.edges == g.edges
    assert back.max_edge_error() < 1e-12
    assert GraphFile(str(path)).build().num_vertices == 240


def test_graph_file_rejects_mixed_lengths(tmp_path):
    path = tmp_path / "bad.graph"
    path.write_text("2 3\n0 0\n1 0\n0 2\n0 1\n0 2\n")
    with pytest.raises(InvalidUsage):
        read_graph_file(path)


def test_graph_file_without_exact_coordinates(tmp_path):
    with pytest.raises(InvalidUsage):
        write_graph_file(build_johnson(6, 3, 1), tmp_path / "j.graph")
    with pytest.raises(InvalidUsage):
        write_graph_file(Cell600(QuadExt(3)).build(), tmp_path / "c.graph")
