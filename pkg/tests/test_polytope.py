from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricdegen import (
    EmptyPolyhedronError,
    GeometryError,
    LatticePolytope,
    SupportFunction,
    lattice_equivalent,
    normal_fan,
    support_function_of_polytope,
)
from toricdegen.polytope import Fan, complete_fan_from_rays

from corpus import (
    chain_partition,
    dilated_simplex,
    reflexive_simplex,
    segment,
    staircase_fan,
    weighted_projective_simplex,
)


def point_sets(dim, n_points, bound=4):
    return st.lists(
        st.tuples(*[st.integers(-bound, bound) for _ in range(dim)]),
        min_size=dim + 1,
        max_size=n_points,
    )


class TestFromVertices:
    def test_triangle_halfspaces(self):
        t = LatticePolytope.from_vertices([(0, 0), (3, 0), (0, 3)])
        assert set(t.halfspaces) == {
            ((1, 0), 0),
            ((0, 1), 0),
            ((-1, -1), 3),
        }

    def test_single_point(self):
        p = LatticePolytope.from_vertices([(2, 5)])
        assert p.dim == 0
        assert p.halfspaces == ()
        assert len(p.equations) == 2

    def test_reflexive_simplex_face_counts(self):
        d3 = reflexive_simplex(3)
        assert len(d3.facets()) == 4
        assert len(d3.faces(1)) == 6
        assert len(d3.vertices) == 4

    def test_interior_points_are_not_vertices(self):
        p = LatticePolytope.from_vertices([(0, 0), (2, 0), (0, 2), (1, 1)])
        assert set(p.vertices) == {(0, 0), (2, 0), (0, 2)}


class TestFromHalfspaces:
    def test_whole_space(self):
        w = LatticePolytope.from_halfspaces([], 2)
        assert w.is_whole_space and w.dim == 2
        fan = normal_fan(w)
        assert fan.rays == () and fan.cones == frozenset({frozenset()})

    def test_segment(self):
        s = LatticePolytope.from_halfspaces([((1,), 0), ((-1,), 2)], 1)
        assert set(s.vertices) == {(0,), (2,)} and s.rays == ()

    def test_quadrant(self):
        q = LatticePolytope.from_halfspaces([((1, 0), 0), ((0, 1), 0)], 2)
        assert q.vertices == ((0, 0),)
        assert set(q.rays) == {(1, 0), (0, 1)}

    def test_infeasible(self):
        with pytest.raises(EmptyPolyhedronError, match="empty polyhedron"):
            LatticePolytope.from_halfspaces([((1,), 0), ((-1,), -2)], 1)

    def test_redundant_halfspaces_dropped(self):
        s = LatticePolytope.from_halfspaces([((1,), 0), ((1,), -1), ((-1,), 2)], 1)
        assert len(s.halfspaces) == 2

    @given(point_sets(2, 7))
    @settings(max_examples=40, deadline=None)
    def test_round_trip_2d(self, points):
        hull = LatticePolytope.from_vertices(points)
        if hull.dim < 2:
            return
        back = LatticePolytope.from_halfspaces(
            [(h.normal, h.offset) for h in hull.halfspaces], 2
        )
        assert set(back.vertices) == set(hull.vertices)

    @given(point_sets(3, 6, bound=3))
    @settings(max_examples=25, deadline=None)
    def test_round_trip_3d(self, points):
        hull = LatticePolytope.from_vertices(points)
        if hull.dim < 3:
            return
        back = LatticePolytope.from_halfspaces(
            [(h.normal, h.offset) for h in hull.halfspaces], 3
        )
        assert set(back.vertices) == set(hull.vertices)


class TestNormalFan:
    def test_unit_square(self):
        sq = LatticePolytope.from_vertices([(0, 0), (1, 0), (0, 1), (1, 1)])
        fan = normal_fan(sq)
        assert set(fan.rays) == {(1, 0), (-1, 0), (0, 1), (0, -1)}
        assert len(fan.maximal_cones) == 4
        assert fan.is_complete()

    def test_reflexive_simplex_gives_projective_fan(self):
        for n in (2, 3):
            fan = normal_fan(reflexive_simplex(n))
            expected = {tuple(int(i == j) for j in range(n)) for i in range(n)}
            expected.add(tuple(-1 for _ in range(n)))
            assert set(fan.rays) == expected
            assert fan.is_complete()

    def test_segment(self):
        fan = normal_fan(segment(0, 2))
        assert set(fan.rays) == {(1,), (-1,)}
        assert fan.is_complete()

    def test_complete_iff_compact(self):
        q = LatticePolytope.from_halfspaces([((1, 0), 0), ((0, 1), 0)], 2)
        assert not normal_fan(q).is_complete()
        assert normal_fan(reflexive_simplex(2)).is_complete()

    def test_lower_dimensional_rejected(self):
        p = LatticePolytope.from_vertices([(0, 0), (1, 0)])
        with pytest.raises(GeometryError):
            normal_fan(p)


class TestSimplicialNonsingular:
    def test_reflexive_simplices_nonsingular(self):
        for n in (2, 3):
            assert reflexive_simplex(n).is_nonsingular()

    def test_weighted_projective_simplicial_not_nonsingular(self):
        wp = weighted_projective_simplex()
        assert wp.is_simplicial()
        assert not wp.is_nonsingular()
        assert wp.nonsingular_witness() in set(wp.vertices)

    def test_unit_cube(self):
        cube = LatticePolytope.from_vertices(
            [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)]
        )
        assert cube.is_nonsingular()

    def test_square_pyramid_not_simplicial(self):
        pyr = LatticePolytope.from_vertices(
            [(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0), (0, 0, 1)]
        )
        assert not pyr.is_simplicial()


class TestSupportFunctions:
    def test_zero_is_affine(self):
        fan = staircase_fan(2)
        assert SupportFunction(fan, [0, 0, 0]).classify() == "affine"

    def test_anticanonical_on_projective_space_strictly_convex(self):
        for n in (2, 3):
            fan = normal_fan(reflexive_simplex(n))
            phi = SupportFunction(fan, [-1] * len(fan.rays))
            assert phi.classify() == "strictly-convex"

    def test_product_fan_convex_not_strict(self):
        rays = [(1, 0), (-1, 0), (0, 1), (0, -1)]
        cones = [
            frozenset(c)
            for c in ([0, 2], [0, 3], [1, 2], [1, 3], [0], [1], [2], [3], [])
        ]
        fan = Fan(2, rays, cones)
        assert fan.is_complete()
        phi = SupportFunction(fan, [-1, -1, 0, 0])
        assert phi.classify() == "convex"

    def test_incomplete_fan_rejected(self):
        q = LatticePolytope.from_halfspaces([((1, 0), 0), ((0, 1), 0)], 2)
        phi = SupportFunction(normal_fan(q), [0, 0])
        with pytest.raises(GeometryError, match="complete fan"):
            phi.classify()

    def test_divisor_polytope_of_anticanonical(self):
        fan = normal_fan(reflexive_simplex(2))
        phi = SupportFunction(fan, [-1, -1, -1])
        assert phi.divisor_polytope() == reflexive_simplex(2)

    def test_divisor_polytope_of_zero_is_a_point(self):
        fan = normal_fan(reflexive_simplex(2))
        phi = SupportFunction(fan, [0, 0, 0])
        poly = phi.divisor_polytope()
        assert poly.dim == 0 and poly.vertices == ((0, 0),)

    def test_multiples_of_hyperplane_class_on_line(self):
        fan = normal_fan(segment(0, 1))
        for d in (1, 2, 5):
            values = [0 if r == (1,) else -d for r in fan.rays]
            poly = SupportFunction(fan, values).divisor_polytope()
            assert set(poly.vertices) == {(0,), (d,)}
            assert len(poly.lattice_points()) == d + 1

    def test_nonconvex_rejected_for_divisor_polytope(self):
        fan = normal_fan(segment(0, 1))
        values = [1 if r == (1,) else 1 for r in fan.rays]  # phi(1)+phi(-1) > 0
        phi = SupportFunction(fan, values)
        assert phi.classify() == "none"
        with pytest.raises(GeometryError):
            phi.divisor_polytope()

    def test_induced_support_function_of_nonsingular_polytope(self):
        for poly in (
            reflexive_simplex(2),
            reflexive_simplex(3),
            LatticePolytope.from_vertices([(0, 0), (1, 0), (0, 1), (1, 1)]),
        ):
            assert support_function_of_polytope(poly).classify() == "strictly-convex"


class TestLatticePoints:
    def test_triangle(self):
        t = LatticePolytope.from_vertices([(0, 0), (3, 0), (0, 3)])
        assert len(t.lattice_points()) == 10

    def test_segments(self):
        for d in (0, 1, 4):
            assert len(segment(0, d).lattice_points()) == d + 1

    def test_dilated_simplex_binomial(self):
        pts = dilated_simplex(4).lattice_points()
        assert len(pts) == comb(7, 3) == 35
        # independent enumeration
        direct = sum(
            1
            for x in range(5)
            for y in range(5)
            for z in range(5)
            if x + y + z <= 4
        )
        assert len(pts) == direct

    def test_unbounded_rejected(self):
        q = LatticePolytope.from_halfspaces([((1, 0), 0), ((0, 1), 0)], 2)
        with pytest.raises(GeometryError):
            q.lattice_points()


class TestLatticeEquivalence:
    def test_identity(self):
        d2 = reflexive_simplex(2)
        found = lattice_equivalent(d2, d2)
        assert found is not None
        matrix, shift = found
        assert abs(matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]) == 1

    def test_translation(self):
        t = LatticePolytope.from_vertices([(0, 0), (3, 0), (0, 3)])
        shifted = LatticePolytope.from_vertices([(5, 7), (8, 7), (5, 10)])
        assert lattice_equivalent(t, shifted) is not None

    def test_chain_slab_pieces_across_cut_choices(self):
        # the bottom piece of the x_1-cut chain matches a piece of the
        # (x_1+x_2+x_3)-cut chain of the same degree
        g1 = chain_partition(4, k=1)
        g3 = chain_partition(4, k=3)
        first = g1.pieces[0]
        assert any(
            lattice_equivalent(first, piece) is not None for piece in g3.pieces
        )

    def test_chain_k2_end_pieces(self):
        g = chain_partition(4, k=2)
        assert lattice_equivalent(g.pieces[0], g.pieces[3]) is not None
        assert lattice_equivalent(g.pieces[1], g.pieces[2]) is not None
        assert lattice_equivalent(g.pieces[0], g.pieces[1]) is None

    def test_distinct_volumes_not_equivalent(self):
        a = LatticePolytope.from_vertices([(0, 0), (1, 0), (0, 1)])
        b = LatticePolytope.from_vertices([(0, 0), (2, 0), (0, 2)])
        assert lattice_equivalent(a, b) is None

    def test_symmetric_and_reflexive_on_corpus(self):
        pieces = list(chain_partition(4, k=2).pieces) + list(chain_partition(3).pieces)
        for p in pieces:
            assert lattice_equivalent(p, p) is not None
        for p in pieces:
            for q in pieces:
                assert (lattice_equivalent(p, q) is None) == (
                    lattice_equivalent(q, p) is None
                )

    def test_lower_dimensional_polytopes(self):
        # a segment embedded in the plane vs the same segment on the axis
        a = LatticePolytope.from_vertices([(1, 1), (3, 3)])
        b = LatticePolytope.from_vertices([(0,), (2,)])
        assert lattice_equivalent(a, b) is not None


class TestVolume:
    def test_simplex(self):
        assert dilated_simplex(1).volume() == Fraction(1, 6)
        assert dilated_simplex(4).volume() == Fraction(64, 6)

    def test_square(self):
        sq = LatticePolytope.from_vertices([(0, 0), (2, 0), (0, 2), (2, 2)])
        assert sq.volume() == 4


class TestCompleteFanFromRays:
    def test_rejects_bad_relation(self):
        with pytest.raises(GeometryError):
            complete_fan_from_rays([(1, 0), (0, 1), (1, 1)])

    def test_staircase_fans_complete(self):
        for n in (1, 2, 3, 4):
            assert staircase_fan(n).is_complete()


class TestSupportFunctionRoundTrip:
    def test_divisor_polytope_inverts_induced_support_function(self):
        for poly in (
            reflexive_simplex(2),
            reflexive_simplex(3),
            dilated_simplex(4),
            LatticePolytope.from_vertices([(0, 0), (2, 0), (0, 3), (2, 3)]),
        ):
            phi = support_function_of_polytope(poly)
            assert phi.divisor_polytope() == poly

    def test_equivalence_map_actually_maps(self):
        g = chain_partition(4, k=2)
        found = lattice_equivalent(g.pieces[0], g.pieces[3])
        assert found is not None
        matrix, shift = found
        image = {
            tuple(sum(row[k] * v[k] for k in range(3)) + s for row, s in zip(matrix, shift))
            for v in g.pieces[0].vertices
        }
        assert image == set(g.pieces[3].vertices)


class TestFanValidity:
    """Pairwise cone intersections are faces of both cones."""

    @pytest.mark.parametrize("fan_source", ["staircase-2", "staircase-3", "square"])
    def test_cone_intersections_are_faces(self, fan_source):
        if fan_source == "square":
            fan = normal_fan(LatticePolytope.from_vertices([(0, 0), (1, 0), (0, 1), (1, 1)]))
        else:
            fan = staircase_fan(int(fan_source[-1]))
        cones = sorted(fan.cones, key=sorted)
        for a in cones:
            for b in cones:
                pa, pb = fan.cone_polyhedron(a), fan.cone_polyhedron(b)
                meet = pa.intersect_polyhedron(pb)
                rays = frozenset(fan.ray_index(r) for r in meet.rays)
                assert rays in fan.cones
                assert meet == fan.cone_polyhedron(rays)
                assert rays <= a and rays <= b

    def test_cones_closed_under_faces(self):
        for n in (2, 3):
            fan = staircase_fan(n)
            for cone in fan.cones:
                for wall in fan.cone_facets(cone):
                    assert frozenset(wall) in fan.cones


class TestEnumerationGuard:
    def test_oversized_boxes_rejected_cleanly(self):
        from toricdegen import UnsupportedGeometryError

        long_segment = segment(0, 10**12)
        with pytest.raises(UnsupportedGeometryError, match="enumeration"):
            long_segment.lattice_points()
