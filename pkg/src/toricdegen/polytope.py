"""Exact rational polyhedra, face lattices, normal fans and support functions.

Polyhedra live in a fixed ambient lattice of rank ``n``.  The H-representation
uses inward halfspaces ``<x, normal> >= -offset`` with primitive integer
normals; offsets are exact rationals (they stay integral for lattice
polytopes).  Unbounded polyhedra carry explicit recession rays.  Dual
descriptions are computed by brute force over tight subsets, which is entirely
adequate at desk scale (rank <= 6, a few dozen facets) and keeps every step
exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import EmptyPolyhedronError, GeometryError, UnsupportedGeometryError
from .exactmath import (
    determinant,
    determinant_fraction,
    gcd_all,
    left_kernel,
    normalize_coord,
    normalize_point,
    primitive,
    rank_fraction,
    rational_primitive,
    right_kernel,
    saturation,
    solve_linear,
    solve_particular,
    vadd,
    vdot,
    vsub,
)


class Halfspace(NamedTuple):
    """Constraint ``<x, normal> >= -offset``."""

    normal: tuple
    offset: object  # int or Fraction


class Equation(NamedTuple):
    """Constraint ``<x, normal> = -offset`` (affine hull of lower-dim bodies)."""

    normal: tuple
    offset: object


def _normalize_halfspace(normal, offset):
    normal = tuple(int(x) for x in normal)
    if all(x == 0 for x in normal):
        raise GeometryError("halfspace normal must be nonzero")
    g = gcd_all(normal)
    return Halfspace(tuple(x // g for x in normal), normalize_coord(Fraction(offset) / g))


def _normalize_equation(normal, offset):
    normal = tuple(int(x) for x in normal)
    g = gcd_all(normal)
    normal = tuple(x // g for x in normal)
    offset = Fraction(offset) / g
    lead = next(x for x in normal if x != 0)
    if lead < 0:
        normal = tuple(-x for x in normal)
        offset = -offset
    return Equation(normal, normalize_coord(offset))


@dataclass(frozen=True)
class Face:
    """A face of a polyhedron, keyed by its vertex and ray sets."""

    vertices: tuple
    rays: tuple
    dim: int
    tight: frozenset

    @property
    def key(self):
        return (self.vertices, self.rays)

    def contains_generators_of(self, other: "Face") -> bool:
        return set(other.vertices) <= set(self.vertices) and set(other.rays) <= set(self.rays)


def _face_dim(vertices, rays):
    if not vertices:
        return -1
    base = vertices[0]
    dirs = [vsub(v, base) for v in vertices[1:]] + list(rays)
    dirs = [d for d in dirs if any(x != 0 for x in d)]
    if not dirs:
        return 0
    return rank_fraction(dirs)


def _dual_from_generators(points, rays, rank):
    """Facet halfspaces and affine-hull equations of conv(points) + cone(rays)."""
    points = [normalize_point(p) for p in points]
    rays = [primitive(r) for r in rays]
    base = points[0]
    dirs = [vsub(p, base) for p in points[1:]] + list(rays)
    int_dirs = []
    for d in dirs:
        if any(x != 0 for x in d):
            int_dirs.append(rational_primitive(d)[0])
    d = rank_fraction(int_dirs) if int_dirs else 0

    equations = []
    if d < rank:
        if int_dirs:
            for u in right_kernel(int_dirs):
                equations.append(_normalize_equation(u, -vdot(base, u)))
        else:
            for i in range(rank):
                u = tuple(int(i == j) for j in range(rank))
                equations.append(_normalize_equation(u, -base[i]))
    if d == 0:
        return (), tuple(sorted(equations))

    if d == rank:
        halfspaces = _full_dim_facets(points, rays, rank)
    else:
        basis = saturation(int_dirs)
        model_pts = [_model_coords(basis, base, p) for p in points]
        model_rays = [_model_coords(basis, None, r) for r in rays]
        model_hs = _full_dim_facets(model_pts, model_rays, d)
        halfspaces = []
        for hs in model_hs:
            w = solve_particular(list(basis), hs.normal)
            scale_w, s = rational_primitive(w)
            # <x - base, w> >= -offset  in ambient coordinates
            off = (Fraction(hs.offset) - vdot(base, w)) / s
            halfspaces.append(_normalize_halfspace(scale_w, off))
    return tuple(sorted(set(halfspaces))), tuple(sorted(equations))


def _model_coords(basis, base, point):
    target = vsub(point, base) if base is not None else point
    rows = [[b[i] for b in basis] for i in range(len(target))]
    status, t = solve_linear(rows, target)
    if status != "unique":
        raise GeometryError("point outside the affine hull chart")
    return normalize_point(t)


def _full_dim_facets(points, rays, rank):
    """Brute-force facet enumeration for a full-dimensional hull."""
    # generators are scaled to primitive integer vectors: rational points may
    # appear, and positive scaling changes neither hyperplanes nor sides
    homog = [rational_primitive(tuple(p) + (1,))[0] for p in points] + [
        tuple(r) + (0,) for r in rays
    ]
    found = {}
    for subset in itertools.combinations(range(len(homog)), rank):
        rows = [homog[i] for i in subset]
        kernel = right_kernel(list(rows))
        if len(kernel) != 1:
            continue
        w = primitive(kernel[0])
        dots = [vdot(g, w) for g in homog]
        if all(x >= 0 for x in dots):
            pass
        elif all(x <= 0 for x in dots):
            w = tuple(-x for x in w)
        else:
            continue
        normal, off = w[:-1], w[-1]
        if all(x == 0 for x in normal):
            continue  # the hyperplane at infinity
        found[(normal, off)] = Halfspace(normal, off)
    return [_normalize_halfspace(h.normal, h.offset) for h in found.values()]


def _enumerate_generators(halfspaces, equations, rank):
    """All vertices and extreme rays of a pointed H-representation."""
    normals = [h.normal for h in halfspaces] + [e.normal for e in equations]
    lineality = right_kernel(list(normals)) if normals else None
    if normals and lineality:
        raise UnsupportedGeometryError("polyhedron has a nontrivial lineality space")
    eq_rows = [e.normal for e in equations]
    eq_rhs = [-Fraction(e.offset) for e in equations]
    r_eq = rank_fraction(eq_rows) if eq_rows else 0
    k = rank - r_eq

    def feasible(point):
        return all(vdot(point, h.normal) >= -Fraction(h.offset) for h in halfspaces) and all(
            vdot(point, e.normal) == -Fraction(e.offset) for e in equations
        )

    vertices = set()
    for subset in itertools.combinations(range(len(halfspaces)), k):
        rows = eq_rows + [halfspaces[i].normal for i in subset]
        rhs = eq_rhs + [-Fraction(halfspaces[i].offset) for i in subset]
        status, x = solve_linear(rows, rhs)
        if status == "unique" and feasible(x):
            vertices.add(normalize_point(x))
    if k == 0:
        status, x = solve_linear(eq_rows, eq_rhs)
        if status == "unique" and feasible(x):
            vertices.add(normalize_point(x))

    rays = set()
    if k >= 1:
        for subset in itertools.combinations(range(len(halfspaces)), k - 1):
            rows = eq_rows + [halfspaces[i].normal for i in subset]
            if not rows:
                rows = [tuple(0 for _ in range(rank))]
            kernel = right_kernel(list(rows))
            if len(kernel) != 1:
                continue
            c = primitive(kernel[0])
            for cand in (c, tuple(-x for x in c)):
                if all(vdot(cand, h.normal) >= 0 for h in halfspaces) and all(
                    vdot(cand, e.normal) == 0 for e in equations
                ):
                    rays.add(cand)
    return sorted(vertices), sorted(rays)


class LatticePolytope:
    """A rational polyhedron with cached dual description and face lattice."""

    __slots__ = (
        "ambient_rank",
        "halfspaces",
        "equations",
        "vertices",
        "rays",
        "is_whole_space",
        "_dim",
        "_faces",
        "_face_index",
    )

    def __init__(self, ambient_rank, halfspaces, equations, vertices, rays, whole=False):
        self.ambient_rank = ambient_rank
        self.halfspaces = tuple(halfspaces)
        self.equations = tuple(equations)
        self.vertices = tuple(vertices)
        self.rays = tuple(rays)
        self.is_whole_space = whole
        self._dim = ambient_rank if whole else _face_dim(self.vertices, self.rays)
        self._faces = None
        self._face_index = None

    # -- construction ----------------------------------------------------

    @classmethod
    def from_vertices(cls, points):
        """Convex hull of finitely many points (compact polytope)."""
        return cls.from_generators(points, ())

    @classmethod
    def from_generators(cls, points, rays):
        points = [normalize_point(p) for p in points]
        if not points:
            raise GeometryError("at least one point is required")
        rank = len(points[0])
        halfspaces, equations = _dual_from_generators(points, rays, rank)
        vertices, extreme = _enumerate_generators(halfspaces, equations, rank)
        return cls(rank, halfspaces, equations, vertices, extreme)

    @classmethod
    def from_halfspaces(cls, halfspaces, rank, equations=()):
        """Intersection of halfspaces; may be unbounded or the whole space."""
        halfspaces = [_normalize_halfspace(n, o) for n, o in halfspaces]
        equations = [_normalize_equation(n, o) for n, o in equations]
        if not halfspaces and not equations:
            return cls(rank, (), (), (), (), whole=True)
        dedup = {}
        for h in halfspaces:
            prev = dedup.get(h.normal)
            if prev is None or Fraction(h.offset) < Fraction(prev):
                dedup[h.normal] = h.offset
        halfspaces = [Halfspace(n, o) for n, o in sorted(dedup.items())]
        vertices, rays = _enumerate_generators(halfspaces, equations, rank)
        if not vertices:
            raise EmptyPolyhedronError("empty polyhedron")
        # canonical facet-only representation
        hs, eqs = _dual_from_generators(vertices, rays, rank)
        return cls(rank, hs, eqs, vertices, rays)

    # -- basic queries ----------------------------------------------------

    @property
    def dim(self):
        return self._dim

    @property
    def is_compact(self):
        return not self.rays and not self.is_whole_space

    @property
    def is_lattice(self):
        return all(all(Fraction(x).denominator == 1 for x in v) for v in self.vertices)

    def contains(self, point) -> bool:
        if len(point) != self.ambient_rank:
            raise GeometryError("point has wrong dimension")
        if self.is_whole_space:
            return True
        return all(vdot(point, h.normal) >= -Fraction(h.offset) for h in self.halfspaces) and all(
            vdot(point, e.normal) == -Fraction(e.offset) for e in self.equations
        )

    def contains_polyhedron(self, other: "LatticePolytope") -> bool:
        if self.is_whole_space:
            return True
        if other.is_whole_space:
            return False
        return all(self.contains(v) for v in other.vertices) and all(
            vdot(r, h.normal) >= 0 for r in other.rays for h in self.halfspaces
        ) and all(vdot(r, e.normal) == 0 for r in other.rays for e in self.equations)

    def __eq__(self, other):
        return (
            isinstance(other, LatticePolytope)
            and self.ambient_rank == other.ambient_rank
            and self.is_whole_space == other.is_whole_space
            and set(self.vertices) == set(other.vertices)
            and set(self.rays) == set(other.rays)
        )

    def __hash__(self):
        return hash((self.ambient_rank, frozenset(self.vertices), frozenset(self.rays)))

    def __repr__(self):
        if self.is_whole_space:
            return f"LatticePolytope(R^{self.ambient_rank})"
        kind = "polytope" if self.is_compact else "polyhedron"
        return (
            f"LatticePolytope({self.dim}-dim {kind} in rank {self.ambient_rank}, "
            f"{len(self.vertices)} vertices, {len(self.rays)} rays)"
        )

    @property
    def key(self):
        return (self.vertices, self.rays)

    # -- faces -------------------------------------------------------------

    def faces(self, dim=None):
        if self._faces is None:
            self._faces = self._compute_faces()
            self._face_index = {f.key: f for f in self._faces}
        if dim is None:
            return self._faces
        return tuple(f for f in self._faces if f.dim == dim)

    def _compute_faces(self):
        if self.is_whole_space:
            return (Face((), (), self.ambient_rank, frozenset()),)
        all_v = frozenset(self.vertices)
        all_r = frozenset(self.rays)
        tight_v = []
        tight_r = []
        for h in self.halfspaces:
            tight_v.append(frozenset(v for v in self.vertices if vdot(v, h.normal) == -Fraction(h.offset)))
            tight_r.append(frozenset(r for r in self.rays if vdot(r, h.normal) == 0))
        seen = {(all_v, all_r)}
        queue = [(all_v, all_r)]
        while queue:
            vs, rs = queue.pop()
            for i in range(len(self.halfspaces)):
                nvs, nrs = vs & tight_v[i], rs & tight_r[i]
                if not nvs:
                    continue
                if (nvs, nrs) not in seen:
                    seen.add((nvs, nrs))
                    queue.append((nvs, nrs))
        faces = []
        for vs, rs in seen:
            verts = tuple(sorted(vs))
            rays = tuple(sorted(rs))
            tight = frozenset(
                i for i in range(len(self.halfspaces)) if vs <= tight_v[i] and rs <= tight_r[i]
            )
            faces.append(Face(verts, rays, _face_dim(verts, rays), tight))
        faces.sort(key=lambda f: (f.dim, f.vertices, f.rays))
        return tuple(faces)

    def facets(self):
        return self.faces(self.dim - 1)

    def top_face(self):
        return self.faces(self.dim)[0]

    def face_by_key(self, vertices, rays=()):
        self.faces()
        return self._face_index.get((tuple(sorted(vertices)), tuple(sorted(rays))))

    def smallest_face_containing(self, points, rays=()):
        """The smallest face containing the given points and ray directions."""
        if self.is_whole_space:
            return self.top_face()
        tight = [
            i
            for i, h in enumerate(self.halfspaces)
            if all(vdot(p, h.normal) == -Fraction(h.offset) for p in points)
            and all(vdot(r, h.normal) == 0 for r in rays)
        ]
        vs = set(self.vertices)
        rs = set(self.rays)
        for i in tight:
            h = self.halfspaces[i]
            vs = {v for v in vs if vdot(v, h.normal) == -Fraction(h.offset)}
            rs = {r for r in rs if vdot(r, h.normal) == 0}
        face = self.face_by_key(tuple(vs), tuple(rs))
        if face is None:
            raise GeometryError("generators do not lie on a common face")
        return face

    # -- vertex-local structure --------------------------------------------

    def edges_at(self, vertex):
        """Primitive edge directions at a vertex (bounded edges and rays)."""
        dirs = []
        for f in self.faces(1):
            if vertex in f.vertices:
                if len(f.vertices) == 2:
                    other = f.vertices[0] if f.vertices[1] == vertex else f.vertices[1]
                    dirs.append(rational_primitive(vsub(other, vertex))[0])
                elif len(f.vertices) == 1 and len(f.rays) == 1:
                    dirs.append(f.rays[0])
        return sorted(dirs)

    def is_simplicial(self) -> bool:
        if self.is_whole_space:
            return False
        return all(len(self.edges_at(v)) == self.dim for v in self.vertices)

    def nonsingular_witness(self):
        """None when every vertex is unimodular, else an offending vertex."""
        if self.is_whole_space:
            return None
        chart = None
        if self.dim < self.ambient_rank:
            chart = affine_lattice_chart(self)
        for v in self.vertices:
            dirs = self.edges_at(v)
            if len(dirs) != self.dim:
                return v
            if chart is not None:
                dirs = [chart.direction(d) for d in dirs]
            if abs(determinant(dirs)) != 1:
                return v
        return None

    def is_nonsingular(self) -> bool:
        return self.nonsingular_witness() is None

    # -- metric / point queries ---------------------------------------------

    def lattice_points(self):
        """All lattice points of a compact polytope, sorted."""
        if not self.is_compact:
            raise GeometryError("lattice point enumeration requires a compact polytope")
        lo = []
        hi = []
        for i in range(self.ambient_rank):
            coords = [Fraction(v[i]) for v in self.vertices]
            lo.append(min(coords).__ceil__())
            hi.append(max(coords).__floor__())
        box = 1
        for a, b in zip(lo, hi):
            box *= max(b - a + 1, 0)
        if box > 10**7:
            raise UnsupportedGeometryError(
                f"lattice point enumeration over a box of {box} points"
            )
        points = []
        for p in itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)]):
            if self.contains(p):
                points.append(p)
        return points

    def relative_interior_point(self):
        if self.is_whole_space:
            return tuple(Fraction(0) for _ in range(self.ambient_rank))
        n = len(self.vertices)
        acc = tuple(Fraction(0) for _ in range(self.ambient_rank))
        for v in self.vertices:
            acc = vadd(acc, v)
        acc = tuple(Fraction(x, n) for x in acc)
        for r in self.rays:
            acc = vadd(acc, r)
        return normalize_point(acc)

    def intersect(self, halfspaces=(), equations=()):
        """Intersection with further constraints; raises on emptiness."""
        hs = [(h.normal, h.offset) for h in self.halfspaces] + [tuple(h) for h in halfspaces]
        eqs = [(e.normal, e.offset) for e in self.equations] + [tuple(e) for e in equations]
        return LatticePolytope.from_halfspaces(hs, self.ambient_rank, eqs)

    def intersect_polyhedron(self, other: "LatticePolytope"):
        return self.intersect(other.halfspaces, other.equations)

    def translate(self, vector):
        return LatticePolytope.from_generators([vadd(v, vector) for v in self.vertices], self.rays)

    def bounding_box_polytope(self, margin=1):
        """Axis box strictly containing all vertices, one ray step deep."""
        lo, hi = [], []
        for i in range(self.ambient_rank):
            coords = [Fraction(v[i]) for v in self.vertices] or [Fraction(0)]
            coords += [Fraction(v[i]) + r[i] for v in self.vertices for r in self.rays]
            lo.append(min(coords).__floor__() - margin)
            hi.append(max(coords).__ceil__() + margin)
        hs = []
        for i in range(self.ambient_rank):
            e = tuple(int(i == j) for j in range(self.ambient_rank))
            hs.append((e, -lo[i]))
            hs.append((tuple(-x for x in e), hi[i]))
        return LatticePolytope.from_halfspaces(hs, self.ambient_rank)

    def volume(self):
        """Euclidean volume of a full-dimensional compact polytope."""
        if not self.is_compact:
            raise GeometryError("volume requires a compact polytope")
        if self.dim < self.ambient_rank:
            raise GeometryError("volume requires a full-dimensional polytope")
        total = Fraction(0)
        for simplex in self.triangulation():
            rows = [vsub(p, simplex[0]) for p in simplex[1:]]
            total += abs(determinant_fraction(rows))
        return total / math.factorial(self.dim)

    def triangulation(self):
        """Simplices (vertex tuples) triangulating a compact polytope."""
        if not self.is_compact:
            raise GeometryError("triangulation requires a compact polytope")
        self.faces()
        return _triangulate_face(self, self.top_face())


def _triangulate_face(poly, face):
    if face.dim == 0:
        return [face.vertices]
    apex = face.vertices[0]
    simplices = []
    for sub in poly.faces(face.dim - 1):
        if face.contains_generators_of(sub) and apex not in sub.vertices:
            for s in _triangulate_face(poly, sub):
                simplices.append((apex,) + s)
    return simplices


# -- affine lattice charts for lower-dimensional polytopes -------------------


class AffineChart:
    """Integer coordinates on the affine lattice spanned by a polytope."""

    def __init__(self, base, basis):
        self.base = base
        self.basis = basis  # rows: lattice basis of the direction space

    def point(self, p):
        return _model_coords(self.basis, self.base, p)

    def direction(self, d):
        return _model_coords(self.basis, None, d)


def affine_lattice_chart(poly: LatticePolytope) -> AffineChart:
    base = poly.vertices[0]
    dirs = [vsub(v, base) for v in poly.vertices[1:]] + list(poly.rays)
    int_dirs = [rational_primitive(d)[0] for d in dirs if any(x != 0 for x in d)]
    basis = saturation(int_dirs)
    return AffineChart(base, basis)


# -- fans ---------------------------------------------------------------------


class Fan:
    """A fan given by primitive rays and cones as ray-index sets."""

    def __init__(self, rank, rays, cones):
        self.rank = rank
        self.rays = tuple(tuple(r) for r in rays)
        self.cones = frozenset(frozenset(c) for c in cones)
        self._cone_face_cache = {}

    def __repr__(self):
        return f"Fan(rank {self.rank}, {len(self.rays)} rays, {len(self.cones)} cones)"

    @property
    def maximal_cones(self):
        cones = sorted(self.cones, key=lambda c: (-len(c), sorted(c)))
        maximal = []
        for c in cones:
            if not any(c < m for m in maximal):
                maximal.append(c)
        return tuple(sorted(maximal, key=sorted))

    def cone_dim(self, cone):
        if not cone:
            return 0
        return rank_fraction([self.rays[i] for i in cone])

    def cone_polyhedron(self, cone):
        if cone not in self._cone_face_cache:
            origin = tuple(0 for _ in range(self.rank))
            poly = LatticePolytope.from_generators([origin], [self.rays[i] for i in cone])
            self._cone_face_cache[cone] = poly
        return self._cone_face_cache[cone]

    def cone_facets(self, cone):
        """Ray-index sets of the codimension-one faces of a cone."""
        poly = self.cone_polyhedron(cone)
        out = []
        for f in poly.faces(self.cone_dim(cone) - 1):
            out.append(frozenset(i for i in cone if self.rays[i] in set(f.rays)))
        return out

    def cone_contains(self, cone, vector) -> bool:
        poly = self.cone_polyhedron(cone)
        return poly.contains(vector)

    def is_complete(self) -> bool:
        """Support equals the whole space (every wall borders two chambers)."""
        maxes = [c for c in self.maximal_cones if self.cone_dim(c) == self.rank]
        if len(maxes) != len(self.maximal_cones) or not maxes:
            return self.rank == 0
        wall_count = {}
        for c in maxes:
            for w in self.cone_facets(c):
                wall_count[w] = wall_count.get(w, 0) + 1
        return all(v == 2 for v in wall_count.values())

    def ray_index(self, ray):
        ray = tuple(ray)
        for i, r in enumerate(self.rays):
            if r == ray:
                return i
        raise GeometryError("vector is not a ray of the fan")


def normal_fan(poly: LatticePolytope) -> Fan:
    """One cone per face, spanned by the inward normals of incident facets."""
    if poly.dim != poly.ambient_rank:
        raise GeometryError("normal fan requires a full-dimensional polytope")
    if poly.is_whole_space:
        return Fan(poly.ambient_rank, (), [frozenset()])
    rays = [h.normal for h in poly.halfspaces]
    cones = [frozenset(f.tight) for f in poly.faces()]
    return Fan(poly.ambient_rank, rays, cones)


def complete_fan_from_rays(rays):
    """The complete simplicial fan on n+1 rays in a single positive relation.

    The rays must span and satisfy one relation with all-positive
    coefficients; the maximal cones then drop one ray each (the combinatorics
    of a projective space).
    """
    rays = [primitive(r) for r in rays]
    rank = len(rays[0])
    if len(rays) != rank + 1:
        raise GeometryError("expected rank+1 rays")
    kernel = left_kernel(rays)
    if len(kernel) != 1:
        raise GeometryError("rays must satisfy a single linear relation")
    rel = kernel[0]
    if all(x < 0 for x in rel):
        rel = tuple(-x for x in rel)
    if not all(x > 0 for x in rel):
        raise GeometryError("rays must satisfy a single positive relation")
    cones = set()
    for drop in range(rank + 1):
        cone = frozenset(i for i in range(rank + 1) if i != drop)
        if abs(determinant([rays[i] for i in sorted(cone)])) == 0:
            raise GeometryError("rays do not span in every chamber")
        cones.add(cone)
        for sub in itertools.chain.from_iterable(
            itertools.combinations(sorted(cone), k) for k in range(rank)
        ):
            cones.add(frozenset(sub))
    fan = Fan(rank, rays, cones)
    if not fan.is_complete():
        raise GeometryError("rays do not generate a complete fan")
    return fan


# -- support functions ---------------------------------------------------------


class SupportFunction:
    """A piecewise linear function on a fan, given by its values on rays."""

    def __init__(self, fan: Fan, values):
        self.fan = fan
        self.values = tuple(Fraction(v) for v in values)
        if len(self.values) != len(fan.rays):
            raise GeometryError("one value per ray is required")
        self._linears = {}
        for cone in fan.maximal_cones:
            idx = sorted(cone)
            rows = [fan.rays[i] for i in idx]
            rhs = [self.values[i] for i in idx]
            if not rows:
                self._linears[cone] = tuple(Fraction(0) for _ in range(fan.rank))
                continue
            sol = solve_particular(rows, rhs)
            if sol is None:
                raise GeometryError("values do not extend linearly over a cone")
            self._linears[cone] = sol

    def cone_linear(self, cone):
        return self._linears[frozenset(cone)]

    def value(self, vector):
        for cone in self.fan.maximal_cones:
            if self.fan.cone_contains(cone, vector):
                return vdot(self._linears[cone], vector)
        raise GeometryError("vector outside the support of the fan")

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in self.values)

    def classify(self) -> str:
        """One of ``affine``, ``strictly-convex``, ``convex``, ``none``.

        Convexity here is the toric-divisor convention: the function is the
        minimum of its cone-linear pieces, so each piece over-estimates the
        values on rays outside its own cone.
        """
        if not self.fan.is_complete():
            raise GeometryError("classification requires a complete fan")
        maxes = self.fan.maximal_cones
        linears = [self._linears[c] for c in maxes]
        if all(l == linears[0] for l in linears):
            return "affine"
        weak = True
        strict = True
        for cone, lin in zip(maxes, linears):
            for i, ray in enumerate(self.fan.rays):
                if i in cone:
                    continue
                bound = vdot(lin, ray)
                if bound < self.values[i]:
                    weak = False
                    strict = False
                elif bound == self.values[i]:
                    strict = False
        if strict:
            return "strictly-convex"
        if weak:
            return "convex"
        return "none"

    def divisor_polytope(self) -> LatticePolytope:
        """``{u : <u, ray> >= value(ray) for all rays}``."""
        if self.classify() == "none":
            raise GeometryError("divisor polytope requires a convex support function")
        hs = [(ray, -v) for ray, v in zip(self.fan.rays, self.values)]
        return LatticePolytope.from_halfspaces(hs, self.fan.rank)


def support_function_of_polytope(poly: LatticePolytope) -> SupportFunction:
    """The support function of the ample divisor a compact polytope defines."""
    if not poly.is_compact:
        raise GeometryError("support function requires a compact polytope")
    fan = normal_fan(poly)
    values = [-Fraction(h.offset) for h in poly.halfspaces]
    return SupportFunction(fan, values)


# -- lattice equivalence --------------------------------------------------------


def _full_dim_vertex_model(poly):
    if poly.dim == poly.ambient_rank:
        if not poly.is_lattice:
            raise GeometryError("lattice equivalence requires lattice polytopes")
        return poly, [tuple(int(x) for x in v) for v in poly.vertices]
    chart = affine_lattice_chart(poly)
    verts = [chart.point(v) for v in poly.vertices]
    if any(any(Fraction(x).denominator != 1 for x in v) for v in verts):
        raise GeometryError("lattice equivalence requires lattice polytopes")
    model = LatticePolytope.from_vertices(verts)
    return model, [tuple(int(x) for x in v) for v in model.vertices]


def lattice_equivalences(p: LatticePolytope, q: LatticePolytope):
    """Yield all affine-unimodular maps with ``psi(P) = Q``.

    Maps are returned as ``(matrix_rows, translation)`` acting by
    ``x -> A x + t`` in the intrinsic lattice coordinates of the polytopes
    (ambient coordinates when both are full-dimensional).
    """
    if not (p.is_compact and q.is_compact):
        raise GeometryError("lattice equivalence requires compact polytopes")
    if p.dim != q.dim:
        return
    d = p.dim
    if d == 0:
        yield tuple(), tuple()
        return
    pm, p_verts = _full_dim_vertex_model(p)
    qm, q_verts = _full_dim_vertex_model(q)
    if len(p_verts) != len(q_verts):
        return
    p_set = set(p_verts)
    q_set = set(q_verts)

    def neighbors(model, v):
        out = []
        for f in model.faces(1):
            if v in f.vertices and len(f.vertices) == 2:
                other = f.vertices[0] if f.vertices[1] == v else f.vertices[1]
                out.append(vsub(other, v))
        return sorted(out)

    p0 = min(p_verts)
    p_edges = neighbors(pm, p0)
    if len(p_edges) > 8:
        raise UnsupportedGeometryError("vertex valence too high for exhaustive matching")
    # a spanning subset of edge vectors determines the linear part
    span_idx = []
    rows = []
    for i, e in enumerate(p_edges):
        if rank_fraction(rows + [e]) > len(span_idx):
            span_idx.append(i)
            rows.append(e)
        if len(span_idx) == d:
            break
    seen = set()
    for q0 in sorted(q_set):
        q_edges = neighbors(qm, q0)
        if len(q_edges) != len(p_edges):
            continue
        for perm in itertools.permutations(range(len(q_edges))):
            targets = [q_edges[perm[i]] for i in range(len(p_edges))]
            cols = []
            ok = True
            for i in span_idx:
                cols.append(targets[i])
            # A * p_edges[i] = targets[i] for the spanning subset
            mat_rows = []
            for rdx in range(d):
                status, sol = solve_linear(
                    [p_edges[i] for i in span_idx], [cols[j][rdx] for j in range(d)]
                )
                if status != "unique":
                    ok = False
                    break
                mat_rows.append(sol)
            if not ok:
                continue
            a = tuple(tuple(x) for x in mat_rows)
            if any(Fraction(x).denominator != 1 for row in a for x in row):
                continue
            a = tuple(tuple(int(x) for x in row) for row in a)
            if abs(determinant(a)) != 1:
                continue
            if any(_apply(a, p_edges[i]) != tuple(targets[i]) for i in range(len(p_edges))):
                continue
            t = vsub(q0, _apply(a, p0))
            image = {vadd(_apply(a, v), t) for v in p_set}
            if image == q_set:
                if (a, t) not in seen:
                    seen.add((a, t))
                    yield a, t


def _apply(matrix_rows, vector):
    return tuple(vdot(row, vector) for row in matrix_rows)


def lattice_equivalent(p: LatticePolytope, q: LatticePolytope):
    """First unimodular affine map taking P onto Q, or None."""
    for found in lattice_equivalences(p, q):
        return found
    return None
