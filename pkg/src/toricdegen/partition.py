"""Partitions of a polytope into simplicial subpolytopes.

A partition is stored with its full face poset: every face of every piece is
a face of the partition, merged across pieces by exact polyhedron equality.
Vertices of the ambient polytope are *not* counted as 0-faces of the
partition.  The semi-stability condition counts, for each partition face and
the smallest ambient face containing it, how many pieces share it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import EmptyPolyhedronError, GeometryError, PartitionError
from .exactmath import determinant, left_kernel, rational_primitive, vdot, vsub
from .polytope import (
    Face,
    Fan,
    LatticePolytope,
    affine_lattice_chart,
    lattice_equivalences,
)


@dataclass(frozen=True)
class PartitionFace:
    """A face of the partition with its piece incidences."""

    vertices: tuple
    rays: tuple
    dim: int
    pieces: frozenset
    ambient_face: Face  # smallest face of the ambient polytope containing it

    @property
    def key(self):
        return (self.vertices, self.rays)

    @property
    def is_interior(self):
        return self.ambient_face.tight == frozenset()


@dataclass(frozen=True)
class WeightVector:
    """The positive primitive relation among the edge directions at a vertex.

    ``weights[0]`` belongs to the lexicographically smallest edge direction;
    the remaining weights are sorted ascending.  ``by_edge`` keeps the
    unsorted direction-to-weight pairing.
    """

    vertex: tuple
    weights: tuple
    by_edge: tuple  # ((direction, weight), ...) in lex direction order

    @property
    def is_balanced(self):
        return all(w == 1 for w in self.weights)


@dataclass(frozen=True)
class DualComplex:
    """Dual simplicial complex: one vertex per piece, one simplex per
    interior face (the set of pieces sharing that face)."""

    n_vertices: int
    cells: tuple  # ((face_key, frozenset pieces, face_dim), ...)
    simplices: frozenset = field(default=None)

    def __post_init__(self):
        if self.simplices is None:
            object.__setattr__(self, "simplices", self._close(self.cells))

    def _close(self, cells, min_face_dim=None):
        out = {frozenset([i]) for i in range(self.n_vertices)}
        for _, piece_set, fdim in cells:
            if min_face_dim is not None and fdim < min_face_dim:
                continue
            for size in range(1, len(piece_set) + 1):
                for sub in itertools.combinations(sorted(piece_set), size):
                    out.add(frozenset(sub))
        return frozenset(out)

    @property
    def dimension(self):
        return max(len(s) for s in self.simplices) - 1

    def edges(self):
        return sorted(tuple(sorted(s)) for s in self.simplices if len(s) == 2)

    def is_connected(self):
        if self.n_vertices == 0:
            return True
        seen = {0}
        frontier = [0]
        adj = {i: set() for i in range(self.n_vertices)}
        for a, b in self.edges():
            adj[a].add(b)
            adj[b].add(a)
        while frontier:
            i = frontier.pop()
            for j in adj[i]:
                if j not in seen:
                    seen.add(j)
                    frontier.append(j)
        return len(seen) == self.n_vertices

    def hypersurface_complex(self):
        """Dual complex of a generic hypersurface family in the degeneration.

        A generic hypersurface misses the zero-dimensional strata of the
        central fiber, so simplices dual to partition *vertices* are dropped;
        simplices dual to positive-dimensional faces survive.
        """
        closed = self._close(self.cells, min_face_dim=1)
        return DualComplex(self.n_vertices, tuple(), closed)

    def same_as(self, other: "DualComplex"):
        return self.n_vertices == other.n_vertices and self.simplices == other.simplices

    @staticmethod
    def path(n):
        cells = tuple((None, frozenset([i, i + 1]), 1) for i in range(n - 1))
        return DualComplex(n, cells)

    @staticmethod
    def full_simplex(n):
        """All faces of the n-simplex on n+1 vertices."""
        cells = ((None, frozenset(range(n + 1)), 0),)
        return DualComplex(n + 1, cells)

    @staticmethod
    def simplex_boundary(n):
        """All proper faces of the n-simplex (a triangulation of S^{n-1})."""
        cells = tuple(
            (None, frozenset(range(n + 1)) - {i}, 1) for i in range(n + 1)
        )
        return DualComplex(n + 1, cells)


class Partition:
    """A verified tiling of a polytope by simplicial subpolytopes."""

    def __init__(self, ambient, pieces, face_index):
        self.ambient = ambient
        self.pieces = tuple(pieces)
        self.face_index = face_index  # dict key -> PartitionFace
        self._classification = None
        self._weights = None
        self._dual = None

    def __repr__(self):
        return f"Partition({len(self.pieces)} pieces of {self.ambient!r})"

    @property
    def dim(self):
        return self.ambient.dim

    def faces(self, dim=None):
        faces = sorted(self.face_index.values(), key=lambda f: (f.dim, f.key))
        if dim is None:
            return faces
        return [f for f in faces if f.dim == dim]

    def vertices(self):
        return [f.vertices[0] for f in self.faces(0)]

    def face_at(self, point):
        for f in self.faces(0):
            if f.vertices[0] == tuple(point):
                return f
        return None

    # -- semi-stability ----------------------------------------------------

    def semistable_witness(self):
        """None, or (face, ambient_face, count) violating the count rule.

        For an l-face lying in a k-face of the ambient polytope, exactly
        k - l + 1 pieces must share it.
        """
        for f in self.faces():
            expected = f.ambient_face.dim - f.dim + 1
            if len(f.pieces) != expected:
                return (f, f.ambient_face, len(f.pieces))
        return None

    def is_semistable(self):
        return self.semistable_witness() is None

    # -- weight vectors ------------------------------------------------------

    def edges_at_vertex_within_ambient_face(self, vertex_face: PartitionFace):
        """Edges of the restricted partition at a vertex.

        These are the partition edges through the vertex whose smallest
        containing ambient face agrees with the vertex's own.
        """
        p = vertex_face.vertices[0]
        tau = vertex_face.ambient_face
        out = []
        for f in self.faces(1):
            if p in f.vertices and f.ambient_face == tau:
                out.append(f)
        return out

    def edge_direction(self, edge: PartitionFace, at):
        if len(edge.vertices) == 2:
            other = edge.vertices[0] if edge.vertices[1] == at else edge.vertices[1]
            return rational_primitive(vsub(other, at))[0]
        return edge.rays[0]

    def weight_vector(self, point) -> WeightVector:
        vf = self.face_at(point)
        if vf is None:
            raise PartitionError("point is not a vertex of the partition", witness=tuple(point))
        p = vf.vertices[0]
        edges = self.edges_at_vertex_within_ambient_face(vf)
        l = vf.ambient_face.dim
        if len(edges) != l + 1:
            raise PartitionError("not semi-stable at vertex", witness=p)
        dirs = sorted(self.edge_direction(e, p) for e in edges)
        kernel = left_kernel(dirs)
        if len(kernel) != 1:
            raise PartitionError("not semi-stable at vertex", witness=p)
        rel = kernel[0]
        if all(x < 0 for x in rel):
            rel = tuple(-x for x in rel)
        if not all(x > 0 for x in rel):
            raise PartitionError("not semi-stable at vertex", witness=p)
        weights = (rel[0],) + tuple(sorted(rel[1:]))
        return WeightVector(p, weights, tuple(zip(dirs, rel)))

    def all_weight_vectors(self):
        if self._weights is None:
            self._weights = {
                f.vertices[0]: self.weight_vector(f.vertices[0]) for f in self.faces(0)
            }
        return self._weights

    # -- vertex nonsingularity -------------------------------------------------

    def vertex_is_nonsingular(self, point) -> bool:
        """Unimodular edge basis in (any) one piece having the vertex."""
        vf = self.face_at(point)
        piece = self.pieces[min(vf.pieces)]
        dirs = piece.edges_at(vf.vertices[0])
        if len(dirs) != piece.dim:
            return False
        if self.ambient.dim < self.ambient.ambient_rank:
            chart = affine_lattice_chart(self.ambient)
            dirs = [chart.direction(d) for d in dirs]
        return abs(determinant(dirs)) == 1

    # -- classification ----------------------------------------------------------

    def classify(self):
        """Tri-state flags and the maximal-vertex list.

        ``mildly_singular`` means balanced with all maximal vertices (those
        whose smallest containing ambient face has the dimension of the dual
        complex) nonsingular.
        """
        if self._classification is not None:
            return self._classification
        witness = self.semistable_witness()
        flags = {
            "semistable": witness is None,
            "witness": witness,
            "balanced": None,
            "nonsingular": None,
            "mildly_singular": None,
            "maximal_vertices": None,
        }
        if witness is None:
            weights = self.all_weight_vectors()
            flags["balanced"] = all(w.is_balanced for w in weights.values())
            nonsing = {p: self.vertex_is_nonsingular(p) for p in weights}
            flags["nonsingular"] = all(nonsing.values()) and flags["balanced"]
            dual_dim = self.dual_complex().dimension
            maximal = sorted(
                p for p, _ in weights.items() if self.face_at(p).ambient_face.dim == dual_dim
            )
            flags["maximal_vertices"] = tuple(maximal)
            flags["mildly_singular"] = flags["balanced"] and all(nonsing[p] for p in maximal)
            flags["vertex_nonsingular"] = nonsing
        self._classification = flags
        return flags

    # -- dual complex ---------------------------------------------------------------

    def dual_complex(self) -> DualComplex:
        if self._dual is None:
            cells = []
            for f in self.faces():
                if f.is_interior:
                    cells.append((f.key, f.pieces, f.dim))
            self._dual = DualComplex(len(self.pieces), tuple(cells))
        return self._dual

    def walls(self):
        """Interior codimension-one faces with their two pieces."""
        out = []
        for f in self.faces(self.dim - 1):
            if f.is_interior:
                out.append(f)
        return out

    # -- restriction -------------------------------------------------------------

    def restrict(self, face: Face) -> "Partition":
        """The induced partition of a proper ambient face."""
        if face.dim >= self.ambient.dim:
            raise GeometryError("restriction requires a proper face")
        target = LatticePolytope.from_generators(face.vertices, face.rays)
        pieces = []
        for piece in self.pieces:
            try:
                cut = piece.intersect_polyhedron(target)
            except EmptyPolyhedronError:
                continue
            if cut.dim == target.dim:
                pieces.append(cut)
        return build_partition(target, pieces)


# -- construction and validation ------------------------------------------------


def build_partition(ambient: LatticePolytope, pieces) -> Partition:
    """Validate a tiling and assemble its face poset.

    Raises :class:`PartitionError` with a witness on overlap, gap, or a
    non-simplicial piece.
    """
    pieces = list(pieces)
    if not pieces:
        raise PartitionError("a partition needs at least one piece")
    d = ambient.dim
    for idx, piece in enumerate(pieces):
        if piece.ambient_rank != ambient.ambient_rank:
            raise PartitionError("piece in wrong ambient space", witness=idx)
        if piece.dim != d:
            raise PartitionError("piece is not full-dimensional in the ambient polytope", witness=idx)
        if not ambient.contains_polyhedron(piece):
            raise PartitionError("piece is not contained in the ambient polytope", witness=idx)
        if not piece.is_simplicial():
            raise PartitionError("piece is not simplicial", witness=idx)
    _check_interior_disjoint(pieces, d)
    _check_cover(ambient, pieces)
    faces = _collect_faces(ambient, pieces)
    return Partition(ambient, pieces, faces)


def _check_interior_disjoint(pieces, d):
    for i, j in itertools.combinations(range(len(pieces)), 2):
        if not _boxes_touch(pieces[i], pieces[j]):
            continue
        try:
            meet = pieces[i].intersect_polyhedron(pieces[j])
        except EmptyPolyhedronError:
            continue
        if meet.dim == d:
            raise PartitionError(
                "interior overlap between pieces",
                witness=(i, j, meet.relative_interior_point()),
            )


def _boxes_touch(p, q):
    for i in range(p.ambient_rank):
        if p.rays or q.rays:
            return True
        pc = [Fraction(v[i]) for v in p.vertices]
        qc = [Fraction(v[i]) for v in q.vertices]
        if max(pc) < min(qc) or max(qc) < min(pc):
            return False
    return True


def _check_cover(ambient, pieces):
    """Volume certificate that the pieces fill the ambient polytope.

    Pieces are already pairwise interior-disjoint and contained in the
    ambient polytope, so equality of volumes certifies the tiling.  Unbounded
    inputs are truncated by boxes at two scales; a mismatch falls back to an
    exact polyhedral difference to produce a witness point.
    """
    if ambient.dim == 0:
        return  # containment and disjointness already pin a point tiling
    chart = None
    if ambient.dim < ambient.ambient_rank and not ambient.is_whole_space:
        chart = affine_lattice_chart(ambient)

    def model(poly):
        if chart is None:
            return poly
        return LatticePolytope.from_generators(
            [chart.point(v) for v in poly.vertices],
            [chart.direction(r) for r in poly.rays],
        )

    ambient_m = model(ambient) if not ambient.is_whole_space else ambient
    pieces_m = [model(p) for p in pieces]
    compact = ambient_m.is_compact and not ambient.is_whole_space

    def truncated_volumes(margin):
        hull_gens = [v for p in pieces_m for v in p.vertices]
        box = LatticePolytope.from_vertices(hull_gens).bounding_box_polytope(margin)
        if ambient.is_whole_space:
            amb_vol = box.volume()
        else:
            amb_vol = ambient_m.intersect_polyhedron(box).volume()
        piece_vol = sum((p.intersect_polyhedron(box).volume() for p in pieces_m), Fraction(0))
        return amb_vol, piece_vol

    if compact:
        amb_vol = ambient_m.volume()
        piece_vol = sum((p.volume() for p in pieces_m), Fraction(0))
        ok = amb_vol == piece_vol
    else:
        ok = True
        for margin in (1, 3):
            a, b = truncated_volumes(margin)
            if a != b:
                ok = False
                break
    if not ok:
        witness = _uncovered_point(ambient_m if not ambient.is_whole_space else ambient, pieces_m)
        raise PartitionError("gap: pieces do not cover the ambient polytope", witness=witness)


def _uncovered_point(ambient, pieces):
    """A point of the ambient polytope in no piece, by polyhedral difference."""
    if ambient.is_whole_space:
        hull = LatticePolytope.from_vertices([v for p in pieces for v in p.vertices])
        regions = [hull.bounding_box_polytope(2)]
        d = ambient.ambient_rank
    else:
        regions = [ambient]
        d = ambient.dim
    for piece in pieces:
        new_regions = []
        for region in regions:
            prefix = []
            for h in piece.halfspaces:
                flipped = (tuple(-x for x in h.normal), -Fraction(h.offset))
                try:
                    chunk = region.intersect(prefix + [flipped])
                except EmptyPolyhedronError:
                    chunk = None
                if chunk is not None and chunk.dim == d:
                    new_regions.append(chunk)
                prefix.append((h.normal, h.offset))
        regions = new_regions
        if not regions:
            return None
    return regions[0].relative_interior_point() if regions else None


def _collect_faces(ambient, pieces):
    ambient.faces()
    piece_sets = {}
    dims = {}
    for idx, piece in enumerate(pieces):
        for f in piece.faces():
            key = f.key
            piece_sets.setdefault(key, set()).add(idx)
            dims[key] = f.dim
    ambient_vertices = set(ambient.vertices)
    out = {}
    for key, owners in piece_sets.items():
        verts, rays = key
        if dims[key] == 0 and verts[0] in ambient_vertices:
            continue  # ambient vertices are not 0-faces of the partition
        amb_face = ambient.smallest_face_containing(verts, rays)
        out[key] = PartitionFace(verts, rays, dims[key], frozenset(owners), amb_face)
    return out


# -- constructions used by the CLI and the examples --------------------------------


def partition_from_fan(ambient: LatticePolytope, fan: Fan) -> Partition:
    """Pieces cut out by the maximal cones of a complete fan."""
    if not fan.is_complete():
        raise PartitionError("fan partition requires a complete fan")
    pieces = []
    for cone in sorted(fan.maximal_cones, key=sorted):
        cone_poly = fan.cone_polyhedron(cone)
        piece = ambient.intersect(cone_poly.halfspaces, cone_poly.equations)
        pieces.append(piece)
    return build_partition(ambient, pieces)


def partition_by_hyperplanes(ambient: LatticePolytope, cuts) -> Partition:
    """Chambers of ``<x, normal> = value`` hyperplane cuts inside a polytope.

    Pieces are ordered by the position of their interior point along the
    first cut normal, then lexicographically.
    """
    regions = [ambient]
    for normal, value in cuts:
        normal = tuple(int(x) for x in normal)
        value = Fraction(value)
        new_regions = []
        for region in regions:
            for hs in ((normal, -value), (tuple(-x for x in normal), value)):
                try:
                    piece = region.intersect([hs])
                except EmptyPolyhedronError:
                    continue
                if piece.dim == ambient.dim:
                    new_regions.append(piece)
        regions = new_regions
    first_normal = tuple(int(x) for x in cuts[0][0]) if cuts else None

    def sort_key(piece):
        p = piece.relative_interior_point()
        primary = vdot(p, first_normal) if first_normal else 0
        return (primary, p)

    regions.sort(key=sort_key)
    return build_partition(ambient, regions)


def partitions_equivalent(a: Partition, b: Partition) -> bool:
    """Whether one affine-unimodular map carries one tiling onto the other."""
    if len(a.pieces) != len(b.pieces):
        return False
    pa, pb = a.ambient, b.ambient
    if pa.is_whole_space or pb.is_whole_space:
        raise GeometryError("partition equivalence requires compact ambient polytopes")

    def model(partition):
        amb = partition.ambient
        if amb.dim == amb.ambient_rank:
            return [set(map(tuple, piece.vertices)) for piece in partition.pieces]
        chart = affine_lattice_chart(amb)
        return [set(chart.point(v) for v in piece.vertices) for piece in partition.pieces]

    b_pieces = [frozenset(s) for s in model(b)]
    a_pieces = model(a)
    for matrix, shift in lattice_equivalences(pa, pb):

        def image(v):
            if not matrix:
                return v
            return tuple(vdot(row, v) + s for row, s in zip(matrix, shift))

        mapped = [frozenset(image(v) for v in piece) for piece in a_pieces]
        if sorted(mapped, key=sorted) == sorted(b_pieces, key=sorted):
            return True
    return False
