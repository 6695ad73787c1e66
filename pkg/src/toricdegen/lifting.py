"""Lifting functions and the lifted polytope one dimension up.

The pipeline: wall cochain from the interior codimension-one faces, cocycle
check over triples, integration over a spanning tree of the dual complex,
concavity profile, minimal integral rescaling, then the lifted polytope
``{(x, y) : x in base, y >= F(x)}`` with the extra coordinate *last*.

Sign convention (followed verbatim from the toric-degeneration literature):
the concavity ``C(F, p)`` sums the increments of ``F`` along the partition
edges at ``p``, and ``C > 0`` is called *concave* even though the region
``y >= F`` is then convex — ``F`` is a maximum of its per-piece affine
functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import GeometryError, LiftingError
from .exactmath import (
    AffineFunction,
    determinant,
    gcd_all,
    lcm_all,
    primitive,
    rational_primitive,
    right_kernel,
    vdot,
    vsub,
)
from .partition import DualComplex, Partition, partition_by_hyperplanes
from .polytope import LatticePolytope, SupportFunction, normal_fan


@dataclass(frozen=True)
class WallCochain:
    """One affine function per oriented interior wall, ``f[j,i] = -f[i,j]``.

    Each function vanishes on its wall's hyperplane and takes the value 1 one
    weighted primitive edge step into the second piece, measured at the
    wall's base vertex.
    """

    functions: dict  # (i, j) -> AffineFunction
    base_vertices: dict  # frozenset({i, j}) -> vertex

    def __getitem__(self, pair):
        return self.functions[pair]

    def pairs(self):
        return sorted(k for k in self.functions if k[0] < k[1])


def wall_functions(partition: Partition) -> WallCochain:
    """The defining affine function of every interior wall, normalized.

    Requires a semi-stable partition that is mildly singular, unless the dual
    complex is one-dimensional (a chain, automatically balanced) in which
    case any wall vertex may anchor the normalization.
    """
    flags = partition.classify()
    if not flags["semistable"]:
        raise LiftingError("partition is not semi-stable", witness=flags["witness"])
    dual_dim = partition.dual_complex().dimension
    maximal = set(flags["maximal_vertices"])
    nonsingular = flags["vertex_nonsingular"]
    functions = {}
    bases = {}
    for wall in partition.walls():
        i, j = sorted(wall.pieces)
        candidates = [v for v in wall.vertices if partition.face_at(v) is not None]
        preferred = [v for v in candidates if v in maximal and nonsingular[v]]
        if dual_dim > 1:
            if not preferred:
                raise LiftingError(
                    "partition not mildly singular: wall has no nonsingular maximal vertex",
                    witness=wall.key,
                )
            pool = preferred
        else:
            pool = preferred or [v for v in candidates if nonsingular[v]] or candidates
        if pool:
            p = min(pool)
            f = _wall_function_at(partition, wall, p, i, j)
        else:
            # every vertex of this wall is a vertex of the base polytope
            # (a cut running corner to corner); anchor there with unit weight
            p = min(wall.vertices)
            f = _wall_function_at(partition, wall, p, i, j, ambient_vertex=True)
        functions[(i, j)] = f
        functions[(j, i)] = -f
        bases[frozenset((i, j))] = p
    return WallCochain(functions, bases)


def _wall_function_at(partition, wall, p, i, j, ambient_vertex=False):
    # hyperplane through the wall: primitive integer normal u, <x,u> = c
    base = wall.vertices[0]
    dirs = [vsub(v, base) for v in wall.vertices[1:]] + list(wall.rays)
    int_dirs = [rational_primitive(d)[0] for d in dirs if any(x != 0 for x in d)]
    rank = partition.ambient.ambient_rank
    if int_dirs:
        kernel = right_kernel(int_dirs)
    else:
        kernel = [tuple(int(i == j) for j in range(rank)) for i in range(rank)]
    if len(kernel) != 1:
        raise LiftingError("wall is not a hyperplane piece", witness=wall.key)
    u = primitive(kernel[0])
    c = vdot(base, u)
    # the unique partition edge at p missed by piece i; it points into piece j
    if ambient_vertex:
        edges = [e for e in partition.faces(1) if p in e.vertices]
        weight_of = lambda d: 1
    else:
        vf = partition.face_at(p)
        edges = partition.edges_at_vertex_within_ambient_face(vf)
        weight_of = dict(partition.weight_vector(p).by_edge).__getitem__
    missed = [e for e in edges if i not in e.pieces]
    if len(missed) != 1:
        raise LiftingError("wall normalization edge is not unique", witness=p)
    direction = partition.edge_direction(missed[0], p)
    scale = Fraction(1, weight_of(direction) * vdot(direction, u))
    return AffineFunction.make(tuple(scale * x for x in u), -scale * c)


def check_cocycle(alpha: WallCochain, dual: DualComplex):
    """Closure ``f_ij + f_jk + f_ki = 0`` on every 2-simplex; witness on failure."""
    for simplex in sorted(dual.simplices, key=sorted):
        if len(simplex) != 3:
            continue
        i, j, k = sorted(simplex)
        total = alpha[(i, j)] + alpha[(j, k)] + alpha[(k, i)]
        if not total.is_zero:
            return False, (i, j, k)
    return True, None


@dataclass
class PiecewiseAffine:
    """A function on a partition, one affine function per piece."""

    partition: Partition
    per_piece: tuple
    root: int = None

    def piece_function(self, index):
        return self.per_piece[index]

    def value(self, point):
        for piece, f in zip(self.partition.pieces, self.per_piece):
            if piece.contains(point):
                return f(point)
        raise GeometryError("point outside the partitioned polytope")

    def scale(self, c):
        return PiecewiseAffine(self.partition, tuple(f.scale(c) for f in self.per_piece), self.root)

    def subtract_affine(self, g: AffineFunction):
        return PiecewiseAffine(self.partition, tuple(f - g for f in self.per_piece), self.root)

    def difference(self, other: "PiecewiseAffine"):
        return PiecewiseAffine(
            self.partition,
            tuple(f - g for f, g in zip(self.per_piece, other.per_piece)),
            self.root,
        )

    def is_continuous(self) -> bool:
        for wall in self.partition.walls():
            i, j = sorted(wall.pieces)
            diff = self.per_piece[i] - self.per_piece[j]
            if any(diff(v) != 0 for v in wall.vertices):
                return False
            if any(diff.directional(r) != 0 for r in wall.rays):
                return False
        return True

    def is_global_affine(self) -> bool:
        first = self.per_piece[0]
        return all(f == first for f in self.per_piece)

    def value_samples(self):
        """Exact generating set for the values on the lattice points.

        Compact pieces contribute all their lattice point values; unbounded
        pieces contribute the values on a one-step truncation together with
        the slopes along their recession rays.
        """
        samples = []
        for piece, f in zip(self.partition.pieces, self.per_piece):
            if piece.is_compact:
                pts = piece.lattice_points()
            else:
                box = piece.bounding_box_polytope(1)
                pts = piece.intersect_polyhedron(box).lattice_points()
                samples.extend(f.directional(r) for r in piece.rays)
            samples.extend(f(p) for p in pts)
        return [Fraction(s) for s in samples]

    def minimal_integral_scale(self) -> Fraction:
        """Least positive rational ``r`` with ``r * F`` integer-valued on the
        lattice points of the base."""
        samples = [s for s in self.value_samples() if s != 0]
        if not samples:
            return Fraction(1)
        denom = lcm_all(s.denominator for s in samples)
        nums = gcd_all(int(s * denom) for s in samples)
        return Fraction(denom, nums)

    def is_integral(self) -> bool:
        return all(s.denominator == 1 for s in self.value_samples())


def integrate_cocycle(alpha: WallCochain, dual: DualComplex, partition: Partition, root=None):
    """Piecewise affine ``F`` with ``f_j - f_i = f_ij`` on every wall.

    Integration runs over a breadth-first spanning tree of the dual complex
    anchored at ``root`` (default: the lowest piece index) with ``f_root = 0``;
    every non-tree wall is then verified exactly.
    """
    pairs = alpha.pairs()
    n = len(partition.pieces)
    adjacency = {i: [] for i in range(n)}
    for i, j in pairs:
        adjacency[i].append(j)
        adjacency[j].append(i)
    if root is None:
        root = 0
    rank = partition.ambient.ambient_rank
    values = {root: AffineFunction.zero(rank)}
    frontier = [root]
    while frontier:
        i = frontier.pop(0)
        for j in sorted(adjacency[i]):
            if j not in values:
                values[j] = values[i] + alpha[(i, j)]
                frontier.append(j)
    if len(values) != n:
        raise LiftingError("dual complex is not connected")
    for i, j in pairs:
        if values[j] - values[i] != alpha[(i, j)]:
            raise LiftingError("cocycle integration failed", witness=(i, j))
    out = PiecewiseAffine(partition, tuple(values[i] for i in range(n)), root)
    if not out.is_continuous():
        raise LiftingError("integrated function is not continuous")
    return out


def concavity(func: PiecewiseAffine, point) -> Fraction:
    """Sum of increments of the function along the partition edges at a vertex.

    At a boundary vertex only the edges inside the smallest containing
    ambient face are counted.  Undefined at vertices of the ambient polytope.
    """
    partition = func.partition
    if tuple(point) in set(partition.ambient.vertices):
        raise LiftingError("concavity undefined at vertices of the ambient polytope")
    vf = partition.face_at(point)
    if vf is None:
        raise LiftingError("not a vertex of the partition", witness=tuple(point))
    p = vf.vertices[0]
    total = Fraction(0)
    for edge in partition.edges_at_vertex_within_ambient_face(vf):
        step = partition.edge_direction(edge, p)
        # one primitive step along the edge, measured inside a piece having
        # the edge as a face (a rational vertex may sit closer to the next
        # vertex than a full lattice step)
        f = func.piece_function(min(edge.pieces))
        total += f.directional(step)
    return total


def concavity_profile(func: PiecewiseAffine):
    return {f.vertices[0]: concavity(func, f.vertices[0]) for f in func.partition.faces(0)}


@dataclass
class IntegralLifting:
    """A minimal integral lifting function with its concavity data."""

    function: PiecewiseAffine
    scale: Fraction
    concavities: dict
    unit_concavity: bool


def minimal_integral_lifting(func: PiecewiseAffine) -> IntegralLifting:
    """Rescale to the minimal integral lifting.

    For balanced partitions with a constant concavity profile the scaling is
    pushed further to make every concavity 1 when that scaling is itself
    integral; otherwise the minimal integral scaling is returned as is.
    """
    profile = concavity_profile(func)
    if any(c <= 0 for c in profile.values()):
        bad = min(p for p, c in profile.items() if c <= 0)
        raise LiftingError("not a lifting function: nonpositive concavity", witness=bad)
    scale = func.minimal_integral_scale()
    scaled = func.scale(scale)
    profile = {p: c * scale for p, c in profile.items()}
    flags = func.partition.classify()
    values = set(profile.values())
    if flags["balanced"] and len(values) == 1 and values != {Fraction(1)}:
        c = values.pop()
        candidate_scale = scale / c
        candidate = func.scale(candidate_scale)
        if candidate.is_integral():
            scaled, scale = candidate, candidate_scale
            profile = {p: Fraction(1) for p in profile}
    return IntegralLifting(scaled, scale, profile, set(profile.values()) == {Fraction(1)})


def lifting_function(partition: Partition, root=None) -> IntegralLifting:
    """Wall cochain, cocycle check, integration and minimal rescaling in one go."""
    alpha = wall_functions(partition)
    dual = partition.dual_complex()
    ok, witness = check_cocycle(alpha, dual)
    if not ok:
        raise LiftingError("wall cochain is not a cocycle", witness=witness)
    return minimal_integral_lifting(integrate_cocycle(alpha, dual, partition, root=root))


# -- the lifted polytope -------------------------------------------------------


@dataclass
class LiftedPolytope:
    """``{(x, y) : x in base, y >= F(x)}`` with verification artifacts.

    The extra coordinate is last.  ``lift_map`` sends each partition face key
    to the face of the lifted polytope lying on the graph of ``F`` over it.
    """

    base: Partition
    lifting: IntegralLifting
    polytope: LatticePolytope
    lift_map: dict
    piece_facets: dict  # piece index -> halfspace index in self.polytope
    cap: tuple  # None or (a, b) for the extra face  y <= <a, x> + b
    cap_facet: int
    simplicial: bool
    singular_vertices: tuple
    nonsingular: bool

    @property
    def rank(self):
        return self.polytope.ambient_rank

    def graph_faces(self):
        piece_idx = set(self.piece_facets.values())
        return [f for f in self.polytope.faces() if f.tight & piece_idx]

    def cap_vertices(self):
        if self.cap is None:
            return set()
        a, b = self.cap
        return {
            v
            for v in self.polytope.vertices
            if Fraction(v[-1]) == vdot(a, v[:-1]) + b
        }

    def lifted_vertex(self, point):
        return tuple(point) + (self.lifting.function.value(point),)

    def lifted_edge_vectors(self, point):
        """Primitive lifted directions of the partition edges at a vertex
        that lie in its smallest containing ambient face."""
        vf = self.base.face_at(point)
        out = []
        for edge in self.base.edges_at_vertex_within_ambient_face(vf):
            d = self.base.edge_direction(edge, point)
            f = self.lifting.function.piece_function(min(edge.pieces))
            out.append(primitive(tuple(d) + (f.directional(d),)))
        return sorted(out)

    def edge_sum(self, point):
        """Sum of the lifted primitive edge vectors at a partition vertex."""
        vectors = self.lifted_edge_vectors(point)
        total = tuple(0 for _ in range(self.rank))
        for v in vectors:
            total = tuple(a + b for a, b in zip(total, v))
        return total


def lift_polytope(partition: Partition, lifting: IntegralLifting, compact_cap=None) -> LiftedPolytope:
    """Build and verify the lifted polytope of a lifting function.

    ``compact_cap`` may be ``True`` (default cap: horizontal, one above the
    maximum of the function on the base vertices) or a pair ``(a, b)`` for
    the halfspace ``y <= <a, x> + b``.  Verification: integrality, exactly
    one lift of every partition face, projection of every face onto a face of
    the base polytope or of the partition, and nonsingularity whenever the
    input data promises it.
    """
    func = lifting.function
    base = partition.ambient
    n = base.ambient_rank
    if any(c <= 0 for c in lifting.concavities.values()):
        raise LiftingError("not a lifting function: nonpositive concavity")
    halfspaces = [(h.normal + (0,), h.offset) for h in base.halfspaces]
    piece_keys = {}
    for idx, f in enumerate(func.per_piece):
        denom = lcm_all([Fraction(c).denominator for c in f.linear] + [f.constant.denominator])
        normal = tuple(int(-c * denom) for c in f.linear) + (denom,)
        offset = -f.constant * denom
        g = gcd_all(normal)
        key = (tuple(x // g for x in normal), Fraction(offset) / g)
        if key in piece_keys:
            raise LiftingError("pieces share an affine function", witness=(piece_keys[key], idx))
        piece_keys[key] = idx
        halfspaces.append((normal, offset))
    cap = None
    if compact_cap:
        if not base.is_compact:
            raise LiftingError("compact cap requires a compact base polytope")
        if compact_cap is True:
            a = tuple(0 for _ in range(n))
            b = 1 + max(int(func.value(v).__ceil__()) for v in base.vertices)
        else:
            a, b = compact_cap
            a = tuple(int(x) for x in a)
            b = int(b)
        cap = (a, b)
        halfspaces.append((a + (-1,), b))
    lifted = LatticePolytope.from_halfspaces(halfspaces, n + 1, base.equations and [
        (e.normal + (0,), e.offset) for e in base.equations
    ] or ())

    if not lifted.is_lattice:
        bad = next(v for v in lifted.vertices if any(Fraction(x).denominator != 1 for x in v))
        raise LiftingError("lifted polytope is not integral", witness=bad)

    piece_facets = {}
    index_of = {(h.normal, Fraction(h.offset)): i for i, h in enumerate(lifted.halfspaces)}
    for key, idx in piece_keys.items():
        hs_index = index_of.get((key[0], Fraction(key[1])))
        if hs_index is None:
            raise LiftingError("a piece does not contribute a facet", witness=idx)
        piece_facets[idx] = hs_index
    cap_facet = -1
    if cap is not None:
        a, b = cap
        g = gcd_all(a + (-1,))
        key = (tuple(x // g for x in a + (-1,)), Fraction(b) / g)
        cap_facet = index_of.get(key, -1)
        if cap_facet < 0:
            raise LiftingError("cap does not contribute a facet; choose a larger bound")

    lift_map = _verify_lifts(partition, lifted, piece_facets)
    _verify_projections(partition, lifted, piece_facets)

    simplicial = lifted.is_simplicial()
    singular = []
    for v in lifted.vertices:
        dirs = lifted.edges_at(v)
        if len(dirs) != n + 1 or abs(determinant(dirs)) != 1:
            singular.append(v)
    nonsingular = simplicial and not singular
    flags = partition.classify()
    # walls running into a vertex of the base polytope fall outside the
    # nonsingular-lift guarantee (the lift can acquire conifold-type points,
    # as for a square cut along its diagonal); only report in that case
    base_vertices = set(base.vertices)
    walls_clear = all(
        not (set(w.vertices) & base_vertices) for w in partition.walls()
    )
    promised = (
        flags["nonsingular"]
        and lifting.unit_concavity
        and base.is_nonsingular()
        and walls_clear
    )
    if promised and not nonsingular:
        witness = singular[0] if singular else None
        raise LiftingError("lift of a nonsingular partition came out singular", witness=witness)
    return LiftedPolytope(
        partition,
        lifting,
        lifted,
        lift_map,
        piece_facets,
        cap,
        cap_facet,
        simplicial,
        tuple(singular),
        nonsingular,
    )


def _verify_lifts(partition, lifted, piece_facets):
    """Each partition face must appear exactly once among the graph faces."""
    piece_idx = frozenset(piece_facets.values())
    found = {}
    for face in lifted.faces():
        if not (face.tight & piece_idx):
            continue
        verts = tuple(sorted(v[:-1] for v in face.vertices))
        rays = tuple(sorted(r[:-1] for r in face.rays if any(r[:-1])))
        key = (verts, rays)
        found.setdefault(key, []).append(face)
    lift_map = {}
    for key, gface in partition.face_index.items():
        faces = found.get(key, [])
        if len(faces) != 1:
            raise LiftingError(
                "partition face does not have exactly one lift",
                witness=(key, len(faces)),
            )
        lift_map[key] = faces[0]
    # graph faces over vertices of the base polytope project to base faces,
    # which the face convention excludes from the partition
    base = partition.ambient
    base_keys = {f.key for f in base.faces()}
    for key in set(found) - set(partition.face_index):
        if key not in base_keys:
            raise LiftingError("graph face projects outside the partition", witness=key)
    return lift_map


def _verify_projections(partition, lifted, piece_facets):
    """Every face of the lifted polytope projects onto a base or partition face."""
    piece_idx = frozenset(piece_facets.values())
    base = partition.ambient
    base.faces()
    base_keys = {f.key for f in base.faces()}
    if base.is_whole_space:
        base_keys = {((), ())}
    for face in lifted.faces():
        if face.tight & piece_idx:
            continue  # graph faces were matched against partition faces already
        pts = [v[:-1] for v in face.vertices]
        rays = [r[:-1] for r in face.rays if any(r[:-1])]
        if base.is_whole_space:
            continue
        shadow = LatticePolytope.from_generators(pts, rays)
        key = (shadow.vertices, shadow.rays)
        if key not in base_keys:
            raise LiftingError(
                "face projects onto neither a base face nor a partition face",
                witness=face.key,
            )


# -- iterated lifting over several parallel hyperplanes -------------------------


@dataclass
class MultiLifting:
    """Result of lifting a chain of parallel cuts into several directions."""

    polytope: LatticePolytope
    partition: Partition
    components: tuple  # per piece: tuple of AffineFunction, one per cut
    intermediates: tuple


def iterated_lift(base: LatticePolytope, normal, offsets) -> MultiLifting:
    """Lift along parallel integral cuts, one extra dimension per cut.

    The one-shot construction takes the region above the graph of the vector
    function whose j-th component is ``max(0, <normal, x> - c_j)``; it is
    verified vertex-for-vertex against the step-by-step iteration, and every
    intermediate partition is checked nonsingular.
    """
    normal = primitive(tuple(int(x) for x in normal))
    offsets = [int(c) for c in offsets]
    if sorted(set(offsets)) != offsets:
        raise LiftingError("cut offsets must be strictly increasing")
    for c in offsets:
        if not _cuts_interior(base, normal, c):
            raise LiftingError("cut misses the interior of the base polytope", witness=c)
    n = base.ambient_rank
    l = len(offsets)

    # one-shot: x in base, y_j >= 0, y_j >= <normal, x> - c_j
    halfspaces = [(h.normal + (0,) * l, h.offset) for h in base.halfspaces]
    for j, c in enumerate(offsets):
        unit = tuple(int(k == j) for k in range(l))
        halfspaces.append(((0,) * n + unit, 0))
        halfspaces.append((tuple(-x for x in normal) + unit, c))
    oneshot = LatticePolytope.from_halfspaces(halfspaces, n + l)

    # step-by-step, verifying each stage
    current = base
    lifts = []
    for j, c in enumerate(offsets):
        cut_normal = normal + (0,) * j
        chain = partition_by_hyperplanes(current, [(cut_normal, c)])
        flags = chain.classify()
        if not flags["semistable"] or not flags["nonsingular"]:
            raise LiftingError("intermediate partition is not nonsingular", witness=j)
        lifted = lift_polytope(chain, lifting_function(chain))
        lifts.append(lifted)
        current = lifted.polytope
    if set(current.vertices) != set(oneshot.vertices) or set(current.rays) != set(
        oneshot.rays
    ):
        raise LiftingError("iterated lift disagrees with the one-shot construction")

    partition = partition_by_hyperplanes(base, [(normal, c) for c in offsets])
    components = []
    for piece in partition.pieces:
        x = piece.relative_interior_point()
        level = vdot(normal, x)
        fns = []
        for c in offsets:
            if level > c:
                fns.append(AffineFunction.make(normal, -c))
            else:
                fns.append(AffineFunction.zero(n))
        components.append(tuple(fns))
    return MultiLifting(oneshot, partition, tuple(components), tuple(lifts))


def _cuts_interior(poly, normal, value):
    lo = min(vdot(v, normal) for v in poly.vertices) if poly.vertices else None
    hi = max(vdot(v, normal) for v in poly.vertices) if poly.vertices else None
    if poly.is_whole_space:
        return True
    for r in poly.rays:
        s = vdot(r, normal)
        if s < 0:
            lo = None
        if s > 0:
            hi = None
    below = lo is None or lo < value
    above = hi is None or hi > value
    return below and above


# -- extending a support function over a single-cut compact lift -----------------


def extend_support_function(phi: SupportFunction, lifted: LiftedPolytope) -> SupportFunction:
    """Extend a convex integral support function over the fan of a compact lift.

    The extension restricts to the input on the base subfan, vanishes on the
    two new upper rays (the graph facet normals), and takes the largest
    integer value on the downward cap ray that keeps it convex.
    """
    if lifted.cap is None:
        raise LiftingError("extension requires a compact lift")
    if len(lifted.base.pieces) != 2:
        raise LiftingError("extension requires a single-hyperplane partition")
    if not phi.is_integral():
        raise LiftingError("support function must be integral")
    if phi.classify() == "none":
        raise GeometryError("support function is not convex")
    fan = normal_fan(lifted.polytope)
    base_values = {ray: value for ray, value in zip(phi.fan.rays, phi.values)}
    roles = []
    for ray in fan.rays:
        head, last = ray[:-1], ray[-1]
        if last == 0:
            if head not in base_values:
                raise LiftingError("lifted fan does not contain the base fan")
            roles.append(("base", base_values[head]))
        elif last > 0:
            roles.append(("upper", Fraction(0)))
        else:
            roles.append(("cap", None))
    bound = 4 + 4 * max((abs(v) for v in phi.values), default=0) * max(
        sum(abs(x) for x in r) for r in fan.rays
    )
    a = 0
    while a >= -bound:
        values = [Fraction(a) if role == "cap" else v for role, v in roles]
        try:
            candidate = SupportFunction(fan, values)
        except GeometryError:
            a -= 1
            continue
        if candidate.classify() in ("affine", "convex", "strictly-convex"):
            return candidate
        a -= 1
    raise LiftingError("no integral cap value keeps the extension convex")
