import numpy as np
import pytest

from unitdist.errors import CertificationError, InvalidUsage
from unitdist.euclid_bound import (
    BoundProblem,
    SubgraphConstraint,
    chromatic_lower,
    constraint_from_graph,
    constraint_from_profile,
    solve_theta_g,
    theorem_feasible_point,
    theta_infinity,
    verify_feasible,
)
from unitdist.geometry import Cell600, GraphSpec, QuadExt, build_graph, graph_profile
from unitdist.tables import PUBLISHED_GRID_TOLERANCE, PUBLISHED_OBJECTIVE_RTOL, load_manifest


def _table2_problem(n: int) -> tuple[BoundProblem, dict]:
    row = next(r for r in load_manifest("table2") if r["n"] == n)
    published = row["published"]
    profile = graph_profile(GraphSpec.parse(row["graph"]))
    constraint = constraint_from_profile(profile, published["alpha"], row["graph"])
    return BoundProblem(n, (constraint,)), published


# ------------------------------------------------------------------------------------ #
#                                    closed forms                                      #
# ------------------------------------------------------------------------------------ #


def test_theta_infinity_plane():
    assert theta_infinity(2) == pytest.approx(0.402759395702553 / 1.402759395702553, abs=1e-12)


def test_theta_infinity_range_and_decay():
    values = [theta_infinity(n) for n in range(2, 65)]
    assert all(0 < v < 1 for v in values)
    assert all(b < a for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("bound, expected", [(0.100062, 10), (1.84366e-4, 5424), (0.5, 2), (0.0677778, 15), (0.25, 4)])
def test_chromatic_lower(bound, expected):
    assert chromatic_lower(bound) == expected


@pytest.mark.parametrize("bound", [0.0, 1.0, -0.2, 3.0])
def test_chromatic_lower_domain(bound):
    with pytest.raises(InvalidUsage):
        chromatic_lower(bound)


def test_theorem_feasible_point():
    z = theorem_feasible_point(10, 0.5, 0.9, 0.8)
    np.testing.assert_allclose(z, [0.8**10, 1.0, 0.9**10])
    with pytest.raises(InvalidUsage):
        theorem_feasible_point(10, 1.5, 0.9, 0.8)


# ------------------------------------------------------------------------------------ #
#                                      problems                                        #
# ------------------------------------------------------------------------------------ #


def test_subgraph_constraint_validation():
    with pytest.raises(InvalidUsage):
        SubgraphConstraint((), 0.5)
    with pytest.raises(InvalidUsage):
        SubgraphConstraint(((0.0, 1.0),), 0.5)
    with pytest.raises(InvalidUsage):
        SubgraphConstraint(((0.5, -1.0),), 0.5)
    with pytest.raises(InvalidUsage):
        SubgraphConstraint(((0.5, 1.0),), 1.5)


def test_bound_problem_validation():
    with pytest.raises(InvalidUsage):
        BoundProblem(1)
    with pytest.raises(InvalidUsage):
        BoundProblem(4, samples=5)
    with pytest.raises(InvalidUsage):
        BoundProblem(4, refine_tol=0)


def test_t_max_is_raised_for_large_dimension():
    p = BoundProblem(60, t_max=10)
    assert p.t_max > 60


def test_constraint_from_graph_matches_profile():
    spec = Cell600(QuadExt(3))
    from_graph = constraint_from_graph(build_graph(spec), 26)
    from_profile = constraint_from_profile(graph_profile(spec), 26)
    assert from_graph.alpha_ratio == pytest.approx(26 / 120)
    assert from_profile.alpha_ratio == pytest.approx(26 / 120)
    ts = np.linspace(0.0, 30.0, 301)
    np.testing.assert_allclose(from_graph.kernel_mean(4, ts), from_profile.kernel_mean(4, ts), atol=1e-12)


# ------------------------------------------------------------------------------------ #
#                                    verification                                      #
# ------------------------------------------------------------------------------------ #


def test_trivial_point_is_feasible():
    p, _ = _table2_problem(4)
    report = verify_feasible([1.0, 0.0, 0.0], p)
    assert report.feasible
    assert report.objective == 1.0


@pytest.mark.parametrize("n", [2, 5, 11])
def test_pure_kernel_point_is_infeasible(n):
    report = verify_feasible([0.0, 1.0], BoundProblem(n))
    assert not report.feasible
    assert report.grid_min < 0


def test_wrong_length_is_rejected():
    with pytest.raises(InvalidUsage):
        verify_feasible([1.0, 0.0], _table2_problem(4)[0])


@pytest.mark.parametrize("n", range(4, 25))
def test_published_points_verify(n):
    p, published = _table2_problem(n)
    report = verify_feasible(published["z"], p, tolerance=PUBLISHED_GRID_TOLERANCE)
    # printed to six digits, so allow the rounding error
    assert report.feasible, report.to_dict()
    assert report.grid_min >= -PUBLISHED_GRID_TOLERANCE
    assert report.tail_margin >= 0
    assert report.objective == pytest.approx(published["objective"], rel=PUBLISHED_OBJECTIVE_RTOL)


# ------------------------------------------------------------------------------------ #
#                                       solving                                        #
# ------------------------------------------------------------------------------------ #


@pytest.mark.parametrize("n", [2, 4, 8])
def test_no_constraints_gives_theta_infinity(n):
    cert = solve_theta_g(BoundProblem(n, samples=20000))
    assert cert.objective == pytest.approx(theta_infinity(n), abs=1e-6)
    assert cert.objective >= theta_infinity(n) - 1e-9


def test_600cell_row():
    p, published = _table2_problem(4)
    cert = solve_theta_g(p)
    assert cert.objective <= published["objective"] + 1e-5
    assert cert.objective <= theta_infinity(4)
    assert cert.chromatic_lower == 10

    z = cert.z
    assert np.all(z[2:] >= 0)
    assert z.sum() >= 1 - 1e-12
    assert cert.report.revalidated_min >= -1e-12
    assert cert.report.tail_margin >= 0

    # independent recheck on a finer grid
    ts = np.linspace(0.0, cert.problem.t_max, 200001)
    assert p.evaluate(z, ts).min() >= -1e-12


def test_raising_alpha_never_helps():
    spec = Cell600(QuadExt(3))
    profile = graph_profile(spec)
    tight = solve_theta_g(BoundProblem(4, (constraint_from_profile(profile, 26),)))
    loose = solve_theta_g(BoundProblem(4, (constraint_from_profile(profile, 39),)))
    assert tight.objective <= loose.objective + 1e-7


def test_second_constraint_never_hurts():
    profile = graph_profile(Cell600(QuadExt(3)))
    one = constraint_from_profile(profile, 26)
    other = constraint_from_profile(graph_profile(Cell600(QuadExt(2))), 26)
    single = solve_theta_g(BoundProblem(4, (one,)))
    both = solve_theta_g(BoundProblem(4, (one, other)))
    assert both.objective <= single.objective + 1e-7


def test_tail_failure_raises(monkeypatch):
    import unitdist.euclid_bound as eb

    monkeypatch.setattr(eb, "omega_tail_bound", lambda n, T: 1.0)
    with pytest.raises(CertificationError) as info:
        solve_theta_g(BoundProblem(4, tail_retries=1))
    assert info.value.exit_code == 2


@pytest.mark.slow
@pytest.mark.parametrize("n", [5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23])
def test_table2_rows(n):
    p, published = _table2_problem(n)
    assert solve_theta_g(p).objective <= published["objective"] + 1e-5


@pytest.mark.slow
def test_orthogonality_row():
    p, published = _table2_problem(24)
    cert = solve_theta_g(p)
    assert cert.objective <= published["objective"] * (1 + 1e-4)
    assert cert.chromatic_lower >= 5424
