"""Combinatorial description of the degeneration a lifted polytope defines.

Components of the central fiber correspond to the partition pieces, the dual
graph to the dual complex, and each vertex of the lifted polytope carries a
monomial chart: the expansion of the vertical unit vector in its primitive
edge basis, whose support gives the coordinates multiplying to the
degeneration parameter.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import GeometryError, LiftingError
from .exactmath import determinant, solve_linear
from .lifting import LiftedPolytope
from .partition import DualComplex
from .polytope import lattice_equivalent, normal_fan


@dataclass(frozen=True)
class LatticeSequence:
    """The two exact sequences relating the base and lifted lattices.

    ``include`` embeds the base lattice into the lifted one (extra coordinate
    last), ``project_height`` is the quotient onto that coordinate;
    ``include_height`` and ``project_base`` are the dual pair.
    """

    rank: int
    include: tuple  # (rank+1) x rank
    project_height: tuple  # 1 x (rank+1)
    include_height: tuple  # (rank+1) x 1
    project_base: tuple  # rank x (rank+1)

    def check_exact(self):
        assert _matmul(self.project_height, self.include) == _zero(1, self.rank)
        assert _matmul(self.project_base, self.include_height) == _zero(self.rank, 1)
        assert self.project_height[0][-1] == 1  # surjective
        for i in range(self.rank):  # projection hits every basis vector
            assert self.project_base[i][i] == 1
        return True


def _matmul(a, b):
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0])))
        for i in range(len(a))
    )


def _zero(r, c):
    return tuple(tuple(0 for _ in range(c)) for _ in range(r))


def build_sequences(rank: int) -> LatticeSequence:
    if rank < 1:
        raise GeometryError("rank must be positive")
    include = tuple(
        tuple(int(i == j) for j in range(rank)) for i in range(rank)
    ) + (tuple(0 for _ in range(rank)),)
    project_height = (tuple(0 for _ in range(rank)) + (1,),)
    include_height = tuple((0,) for _ in range(rank)) + ((1,),)
    project_base = tuple(
        tuple(int(i == j) for j in range(rank + 1)) for i in range(rank)
    )
    seq = LatticeSequence(rank, include, project_height, include_height, project_base)
    seq.check_exact()
    return seq


@dataclass(frozen=True)
class LocalChart:
    """Monomial chart at a vertex of the lifted polytope.

    ``monomial`` lists the positions (into ``edge_vectors``) of the chart
    coordinates whose product is the degeneration parameter; its size is
    ``face_dim + 1`` where ``face_dim`` is the dimension of the smallest base
    face containing the vertex shadow.
    """

    vertex: tuple  # shadow in the base lattice
    lifted_vertex: tuple
    face_dim: int
    edge_vectors: tuple
    monomial: tuple

    @property
    def factor_count(self):
        return len(self.monomial)


def local_charts(lifted: LiftedPolytope, strict=True):
    """One chart per vertex of the lifted polytope off the cap.

    Singular vertices (edge basis not unimodular, or parameter expansion not
    zero-one) yield no chart; they are returned in the second component.
    """
    poly = lifted.polytope
    rank = poly.ambient_rank
    cap_vertices = lifted.cap_vertices()
    vertical = tuple(0 for _ in range(rank - 1)) + (1,)
    charts = []
    skipped = []
    base = lifted.base.ambient
    for v in sorted(set(poly.vertices) - cap_vertices):
        dirs = poly.edges_at(v)
        shadow = v[:-1]
        if base.is_whole_space:
            face_dim = base.ambient_rank
        else:
            face_dim = base.smallest_face_containing([shadow]).dim
        if len(dirs) != rank:
            skipped.append(v)
            continue
        rows = [[d[i] for d in dirs] for i in range(rank)]
        status, coeffs = solve_linear(rows, vertical)
        if status != "unique" or any(c not in (0, 1) for c in coeffs):
            skipped.append(v)
            continue
        monomial = tuple(i for i, c in enumerate(coeffs) if c == 1)
        charts.append(LocalChart(shadow, v, face_dim, tuple(dirs), monomial))
    if skipped and strict:
        raise LiftingError("singular vertex has no monomial chart", witness=skipped[0])
    return charts, tuple(skipped)


def chart_transitions_unimodular(lifted: LiftedPolytope) -> bool:
    """Adjacent vertex charts differ by a unimodular change of basis."""
    poly = lifted.polytope
    rank = poly.ambient_rank
    bases = {}
    for v in poly.vertices:
        dirs = poly.edges_at(v)
        if len(dirs) == rank:
            bases[v] = dirs
    for edge in poly.faces(1):
        if len(edge.vertices) != 2:
            continue
        a, b = edge.vertices
        if a not in bases or b not in bases:
            continue
        rows = [[d[i] for d in bases[a]] for i in range(rank)]
        cols = []
        for target in bases[b]:
            status, sol = solve_linear(rows, target)
            if status != "unique" or any(Fraction(c).denominator != 1 for c in sol):
                return False
            cols.append(tuple(int(c) for c in sol))
        transition = tuple(tuple(cols[j][i] for j in range(rank)) for i in range(rank))
        if abs(determinant(transition)) != 1:
            return False
    return True


@dataclass
class DegenerationReport:
    """Everything the degeneration of one lifted polytope determines."""

    lifted: LiftedPolytope
    components: tuple  # (piece index, polytope, nonsingular, class id)
    dual_graph: DualComplex
    hypersurface_dual_graph: DualComplex
    charts: tuple
    skipped_vertices: tuple
    weak: bool

    @property
    def component_classes(self):
        groups = {}
        for idx, _, _, cls in self.components:
            groups.setdefault(cls, []).append(idx)
        return tuple(tuple(v) for _, v in sorted(groups.items()))


def build_report(lifted: LiftedPolytope) -> DegenerationReport:
    """Components, dual graph, equivalence classes and charts of a lift."""
    partition = lifted.base
    flags = partition.classify()
    if not flags["semistable"]:
        raise GeometryError("degeneration requires a semi-stable partition")
    if not (flags["nonsingular"] or flags["mildly_singular"]):
        raise GeometryError("degeneration requires a nonsingular or mildly singular partition")
    weak = not flags["nonsingular"]
    charts, skipped = local_charts(lifted, strict=not weak)

    classes = _equivalence_classes(partition.pieces)
    components = tuple(
        (i, piece, piece.is_nonsingular(), classes[i])
        for i, piece in enumerate(partition.pieces)
    )
    dual = partition.dual_complex()
    return DegenerationReport(
        lifted,
        components,
        dual,
        dual.hypersurface_complex(),
        tuple(charts),
        skipped,
        weak,
    )


def _equivalence_classes(pieces):
    classes = {}
    next_class = 0
    representatives = []
    for i, piece in enumerate(pieces):
        if not piece.is_compact:
            matched = None
            for cls, rep in representatives:
                if rep == piece:
                    matched = cls
                    break
        else:
            matched = None
            for cls, rep in representatives:
                if rep.is_compact and lattice_equivalent(piece, rep) is not None:
                    matched = cls
                    break
        if matched is None:
            matched = next_class
            representatives.append((matched, piece))
            next_class += 1
        classes[i] = matched
    return classes


# -- family equations ---------------------------------------------------------


@dataclass
class FamilyEquations:
    """Exponent table of the one-parameter hypersurface family.

    The monomial at lattice point ``points[j]`` carries the parameter to the
    power ``exponents[j]``; ``supports[i]`` lists the indices of the lattice
    points lying in piece ``i`` (the coordinates surviving on that
    component).
    """

    points: tuple
    exponents: tuple
    coefficients: tuple
    supports: tuple
    anchor: int

    def monomials(self):
        return tuple(
            (self.coefficients[j], self.exponents[j], self.points[j])
            for j in range(len(self.points))
        )


def family_equations(lifted: LiftedPolytope, coefficients=None, anchor=None, seed=None):
    """Exponents of the degeneration parameter across all lattice points.

    The lifting function is renormalized to vanish on the anchor piece
    (default: the integration root), so exponents are nonnegative and vanish
    exactly on the anchor's lattice points.  Coefficients default to formal
    symbols ``a1..aN``; a seed draws deterministic rational values instead.
    """
    base = lifted.base.ambient
    if not base.is_compact:
        raise GeometryError("family equations require a compact base polytope")
    func = lifted.lifting.function
    if anchor is None:
        anchor = func.root if func.root is not None else 0
    if not 0 <= anchor < len(lifted.base.pieces):
        raise GeometryError(f"anchor piece {anchor} out of range")
    shifted = func.subtract_affine(func.piece_function(anchor))
    if not shifted.is_integral():
        raise LiftingError("anchor renormalization is not integral", witness=anchor)
    points = tuple(base.lattice_points())
    exponents = tuple(int(shifted.value(p)) for p in points)
    if min(exponents) < 0:
        raise LiftingError("negative exponent: function not minimal on the anchor piece")
    supports = tuple(
        tuple(j for j, p in enumerate(points) if piece.contains(p))
        for piece in lifted.base.pieces
    )
    if coefficients is not None:
        coeffs = tuple(coefficients[p] for p in points)
    elif seed is not None:
        rng = random.Random(seed)
        coeffs = tuple(Fraction(rng.randint(1, 99), rng.randint(1, 9)) for _ in points)
    else:
        coeffs = tuple(f"a{j + 1}" for j in range(len(points)))
    return FamilyEquations(points, exponents, coeffs, supports, anchor)


# -- fan-level invariants -----------------------------------------------------


def base_fan_is_subfan(lifted: LiftedPolytope) -> bool:
    """The base normal fan, embedded at height zero, sits inside the lifted fan;
    all other cones live strictly in the upper half space."""
    base_fan = normal_fan(lifted.base.ambient)
    lifted_fan = normal_fan(lifted.polytope)
    lifted_cones = {
        frozenset(lifted_fan.rays[i] for i in cone) for cone in lifted_fan.cones
    }
    for cone in base_fan.cones:
        embedded = frozenset(base_fan.rays[i] + (0,) for i in cone)
        if embedded not in lifted_cones:
            return False
    for cone in lifted_fan.cones:
        rays = [lifted_fan.rays[i] for i in cone]
        if any(r[-1] < 0 for r in rays) and lifted.cap is None:
            return False
    return True


def fan_support_is_upper_halfspace(lifted: LiftedPolytope) -> bool:
    """For the open lift of a compact base: every ray sits at height >= 0,
    the height-zero boundary is the base fan, and every interior wall bounds
    exactly two chambers."""
    if lifted.cap is not None or not lifted.base.ambient.is_compact:
        raise GeometryError("support check applies to open lifts of compact bases")
    fan = normal_fan(lifted.polytope)
    rank = fan.rank
    if any(r[-1] < 0 for r in fan.rays):
        return False
    maxes = [c for c in fan.maximal_cones if fan.cone_dim(c) == rank]
    if len(maxes) != len(fan.maximal_cones):
        return False
    wall_count = {}
    for cone in maxes:
        for wall in fan.cone_facets(cone):
            wall_count[frozenset(wall)] = wall_count.get(frozenset(wall), 0) + 1
    for wall, count in wall_count.items():
        boundary = all(fan.rays[i][-1] == 0 for i in wall)
        if boundary and count != 1:
            return False
        if not boundary and count != 2:
            return False
    return True
