import random
from fractions import Fraction as F

import pytest

from ksum_ldt.geometry import Hyperplane, boundary_set, in_relative_interior, sigma
from ksum_ldt.oracle import NormalizedView, QueryOracle
from ksum_ldt.simplex_builder import RayShootState, build_simplex, extend_general_position, ray_shoot
from harness import SIMPLEX_QUERY_CONSTANT, normalized_point, simplex_run


def lifted_view(values):
    o = QueryOracle(values)
    return NormalizedView(o, o.normalize(lifted=True), lifted=True)


def test_one_dimensional_interval():
    # x = (1, 3/10): the constant coordinate is pinned, x_1 is boxed by +-1
    view = lifted_view(["3/10"])
    I = [(Hyperplane.boundary(1, 1), -1), (Hyperplane.boundary(1, -1), 1)]
    E = [Hyperplane.boundary(0, 1)]
    s = build_simplex(view, I, E)
    assert set(s.vertices) == {(F(1), F(1)), (F(1), F(-1))}
    assert in_relative_interior(s, [F(1), F(3, 10)])
    assert view.oracle.transcript.open_book_reads == 0


def test_full_equality_set_needs_no_queries():
    view = lifted_view(["1/2", "-1/3"])
    before = view.oracle.transcript.total_queries
    E = [Hyperplane.boundary(0, 1), Hyperplane.build({1: 1}, F(-1, 2)), Hyperplane.build({2: 1}, F(1, 3))]
    s = build_simplex(view, [], E)
    assert s.vertices == ((F(1), F(1, 2), F(-1, 3)),)
    assert view.oracle.transcript.total_queries == before


def test_box_cell_gives_triangle():
    view = lifted_view(["1/3", "-1/5"])
    x = normalized_point([F(1, 3), F(-1, 5)], True)
    I = [(h, sigma(h, x)) for h in boundary_set(3)[2:]]
    s = build_simplex(view, I, [Hyperplane.boundary(0, 1)])
    assert len(s.vertices) == 3
    corners = {(F(1), a, b) for a in (F(1), F(-1)) for b in (F(1), F(-1))}
    assert set(s.vertices[:2]) <= corners
    assert in_relative_interior(s, x)


def test_ray_shoot_hits_the_far_side():
    # from nu = 1 through x = 3/10 the ray meets x_1 = -1 first
    view = lifted_view(["3/10"])
    I = [(Hyperplane.boundary(1, -1), 1)]
    hit, state = ray_shoot(view, I, (F(1), F(1)), RayShootState.start(2))
    assert hit == [0]
    assert state.depth == 1


def test_ray_shoot_reports_ties():
    # x = (1, 0, 0) and nu = (1, 1, 1): x_1 = -1 and x_2 = -1 are hit at the same parameter
    view = lifted_view(["0", "0"])
    I = [(Hyperplane.boundary(1, -1), 1), (Hyperplane.boundary(2, -1), 1)]
    hit, _ = ray_shoot(view, I, (F(1), F(1), F(1)), RayShootState.start(3))
    assert sorted(hit) == [0, 1]


def test_ray_shoot_skips_planes_through_vertex():
    view = lifted_view(["3/10"])
    I = [(Hyperplane.boundary(1, 1), -1), (Hyperplane.boundary(1, -1), 1)]
    before = view.oracle.transcript.total_queries
    hit, _ = ray_shoot(view, I, (F(1), F(1)), RayShootState.start(2))
    assert hit == [1]
    # only the far plane is asked about
    assert view.oracle.transcript.total_queries - before == 1


def test_extend_general_position():
    h1 = Hyperplane.build({0: 1})
    h1b = Hyperplane.build({0: 2})
    h2 = Hyperplane.build({1: 1})
    assert extend_general_position([], [h1, h1b], 2) == [h1]
    assert extend_general_position([h1], [h2], 2) == [h1, h2]
    assert extend_general_position([h1, h2], [Hyperplane.build({0: 1, 1: 1})], 2) == [h1, h2]


@pytest.mark.parametrize("seed", range(40))
def test_soundness_against_open_book(seed):
    r = simplex_run(seed)
    assert r["relative_interior"]
    assert r["vertices_in_cell"]
    assert r["levels"] <= r["dim"]
    assert r["queries"] <= SIMPLEX_QUERY_CONSTANT * r["dim"] * max(1, r["I"])


def test_queries_stay_linear():
    o = QueryOracle([1, 2, -3, 5])
    view = NormalizedView(o, o.normalize(), False)
    x = normalized_point([F(v) for v in (1, 2, -3, 5)], False)
    hs = boundary_set(4) + [Hyperplane.build({0: 1, 1: 1, 2: 1}), Hyperplane.build({1: 1, 3: -1})]
    I = [(h, sigma(h, x)) for h in hs if sigma(h, x)]
    E = [h for h in hs if not sigma(h, x)]
    build_simplex(view, I, E, random.Random(2))
    assert o.transcript.max_terms <= 4
