"""K-vector spaces as projective geometries, relation and order encodings of
hyperaddition, Desargues testing, incidence groups and difference sets.

Geometry points are positive integers; 0 is reserved for the zero of the
associated K-vector space.
"""

from dataclasses import dataclass, field
from itertools import combinations, permutations

from . import config
from .bits import iter_bits, mask_of, members, popcount
from .constructions import AbelianGroupSpec, PointedGroup, contains_K, contains_S
from .core import AxiomResult, HyperStructure, validate
from .errors import BoundError, PreconditionError, StructureError

# -- incidence geometries ----------------------------------------------------------


class IncidenceGeometry:
    """Points and lines; lines are stored as sorted tuples, deduplicated."""

    def __init__(self, points, lines):
        pts = tuple(sorted(set(int(p) for p in points)))
        if any(p < 1 for p in pts):
            raise ValueError("points must be positive integers (0 is the zero element)")
        lines = sorted({tuple(sorted(set(int(p) for p in L))) for L in lines}, key=lambda L: (len(L), L))
        pset = set(pts)
        for L in lines:
            if not set(L) <= pset:
                raise ValueError(f"line {L} uses points outside the point set")
        self.points = pts
        self.lines = tuple(lines)
        self.line_masks = tuple(mask_of(L) for L in self.lines)
        self._through = None
        self._pairs = None

    def __eq__(self, other):
        return isinstance(other, IncidenceGeometry) and (self.points, self.lines) == (other.points, other.lines)

    def __hash__(self):
        return hash((self.points, self.lines))

    def __repr__(self):
        return f"<IncidenceGeometry points={len(self.points)} lines={len(self.lines)}>"

    @property
    def point_mask(self):
        return mask_of(self.points)

    def lines_through(self, p):
        if self._through is None:
            through = {q: [] for q in self.points}
            for m in self.line_masks:
                for q in iter_bits(m):
                    through[q].append(m)
            self._through = through
        return self._through[p]

    def line_mask(self, x, y):
        """Mask of the first line through x and y, or 0."""
        if self._pairs is None:
            size = (self.points[-1] + 1) if self.points else 0
            table = [[0] * size for _ in range(size)]
            for m in self.line_masks:
                pts = members(m)
                for a in pts:
                    row = table[a]
                    for b in pts:
                        if not row[b]:
                            row[b] = m
            self._pairs = table
        return self._pairs[x][y]

    def join(self, x, y):
        """L(x, y) as a mask: the line through x != y, or {x} when x == y."""
        if x == y:
            return 1 << x
        return self.line_mask(x, y) or (1 << x) | (1 << y)

    def line_sizes(self):
        return sorted(len(L) for L in self.lines)


def _relabel_geometry(G, mapping):
    return IncidenceGeometry([mapping[p] for p in G.points], [[mapping[p] for p in L] for L in G.lines])


def geometry_of(E):
    """Points are the nonzero elements; lines are the sets (x+y) ∪ {x, y}."""
    _require_kvector(E)
    pts = [x for x in range(E.n) if x != E.zero]
    if E.zero != 0:
        raise PreconditionError("geometry_of expects the zero at index 0")
    lines = set()
    for i, x in enumerate(pts):
        for y in pts[i + 1 :]:
            lines.add(E.add[x][y] | (1 << x) | (1 << y))
    return IncidenceGeometry(pts, [members(m) for m in lines])


def _require_kvector(E):
    report = validate(E, "kvector")
    if not report.passed:
        axiom, res = report.first_failure()
        raise PreconditionError(f"not a K-vector space: {axiom} fails", witness=res.counterexample)


def kvector_from_geometry(G, name=None):
    """The hypergroup on {0} ∪ points with x + y = L(x,y) minus {x, y}.

    Points are relabelled 1..n in increasing order.  No multiplication.
    """
    report = check_projective_axioms(G)
    for axiom in ("P1", "P2", "P3'"):
        if not report[axiom].passed:
            raise PreconditionError(f"geometry fails {axiom}", witness=report[axiom].counterexample)
    index = {p: i + 1 for i, p in enumerate(G.points)}
    n = len(G.points) + 1
    add = [[0] * n for _ in range(n)]
    for x in range(n):
        add[0][x] = add[x][0] = 1 << x
    for p in G.points:
        add[index[p]][index[p]] = 1 | (1 << index[p])
    for L in G.lines:
        idx = [index[p] for p in L]
        m = mask_of(idx)
        for x in idx:
            for y in idx:
                if x != y:
                    add[x][y] = m & ~((1 << x) | (1 << y))
    E = HyperStructure(n, add, None, zero=0, one=None, name=name or "K-vector space")
    _require_kvector(E)
    return E


# -- axioms ---------------------------------------------------------------------------


def _p1(G):
    seen = {}
    for i, m in enumerate(G.line_masks):
        if popcount(m) < 2:
            return AxiomResult(False, (G.lines[i],), "line with fewer than two points")
        pts = members(m)
        for a, b in combinations(pts, 2):
            if (a, b) in seen:
                return AxiomResult(False, (a, b), "two lines through the same pair")
            seen[(a, b)] = i
    for a, b in combinations(G.points, 2):
        if (a, b) not in seen:
            return AxiomResult(False, (a, b), "pair of points on no line")
    return AxiomResult(True, None, "")


def _p2(G):
    """For x != y, z off L(x,y), t in L(x,y) - {x}, u in L(x,z) - {x}:
    L(y,z) meets L(t,u)."""
    pts = G.points
    for x in pts:
        for y in pts:
            if y == x:
                continue
            lxy = G.join(x, y)
            for z in pts:
                if lxy >> z & 1:
                    continue
                lxz = G.join(x, z)
                lyz = G.join(y, z)
                for t in iter_bits(lxy & ~(1 << x)):
                    for u in iter_bits(lxz & ~(1 << x)):
                        if not G.join(t, u) & lyz:
                            return AxiomResult(False, (x, y, z, t, u), "")
    return AxiomResult(True, None, "")


def _min_line(G, k):
    for L in G.lines:
        if len(L) < k:
            return AxiomResult(False, L, f"line with fewer than {k} points")
    return AxiomResult(True, None, "")


def check_projective_axioms(G):
    """Verdicts for P1, P2, P3 (>= 3 points per line) and P3' (>= 4).

    P2 needs the join of two points, so it is only evaluated when P1 holds
    (otherwise its result has ``passed=None``).
    """
    p1 = _p1(G)
    p2 = _p2(G) if p1.passed else AxiomResult(None, None, "not evaluated: P1 fails")
    return {"P1": p1, "P2": p2, "P3": _min_line(G, 3), "P3'": _min_line(G, 4)}


def span_mask(G, mask):
    """Closure of a point set under joining pairs of its points."""
    S = mask
    while True:
        new = S
        pts = members(S)
        for i, a in enumerate(pts):
            for b in pts[i + 1 :]:
                new |= G.line_mask(a, b)
        if new == S:
            return S
        S = new


def geometric_dimension(G):
    """Projective dimension: size of a greedy basis minus one (-1 if empty)."""
    span = 0
    size = 0
    for p in G.points:
        if not span >> p & 1:
            span = span_mask(G, span | (1 << p))
            size += 1
    return size - 1


def _collinear(G, a, b, c):
    return bool(G.line_mask(a, b) >> c & 1)


def _meet(G, l1, l2):
    common = l1 & l2
    return (common & -common).bit_length() - 1 if common else None


def is_desarguesian(G):
    """"yes", "no" or "vacuous".

    Geometries with at most one line, or of dimension >= 3 where Desargues
    holds automatically, are "vacuous".  Planes are checked on every pair of
    triangles in central perspective.
    """
    report = check_projective_axioms(G)
    for axiom in ("P1", "P2", "P3'"):
        if not report[axiom].passed:
            raise PreconditionError(f"geometry fails {axiom}", witness=report[axiom].counterexample)
    if len(G.lines) <= 1:
        return "vacuous"
    dim = geometric_dimension(G)
    if dim >= 3:
        return "vacuous"
    return "yes" if find_desargues_failure(G) is None else "no"


def find_desargues_failure(G):
    """A configuration (O, a, b, c, a', b', c') violating Desargues, or None."""
    for O in G.points:
        through = G.lines_through(O)
        for l1, l2, l3 in combinations(through, 3):
            rest = [[p for p in iter_bits(l) if p != O] for l in (l1, l2, l3)]
            pairs = [list(permutations(r, 2)) for r in rest]
            for a, a2 in pairs[0]:
                for b, b2 in pairs[1]:
                    ab = G.line_mask(a, b)
                    ab2 = G.line_mask(a2, b2)
                    p = _meet(G, ab, ab2)
                    for c, c2 in pairs[2]:
                        q = _meet(G, G.line_mask(b, c), G.line_mask(b2, c2))
                        r = _meet(G, G.line_mask(c, a), G.line_mask(c2, a2))
                        if p is None or q is None or r is None:
                            continue
                        if p == q or q == r or p == r:
                            continue
                        if not _collinear(G, p, q, r):
                            return (O, a, b, c, a2, b2, c2)
    return None


# -- incidence groups ---------------------------------------------------------------


def incidence_group_check(G, action):
    """True iff every permutation in ``action`` maps lines to lines.

    ``action`` is a list of dicts (or sequences indexed by point) and must act
    simply transitively on the points.
    """
    perms = [dict(p) if isinstance(p, dict) else {q: p[q] for q in G.points} for p in action]
    pts = G.points
    if len(perms) != len(pts):
        raise PreconditionError("action is not simply transitive: wrong number of elements")
    base = pts[0]
    images = sorted(p[base] for p in perms)
    if images != list(pts):
        raise PreconditionError("action is not simply transitive on the points")
    for p in perms:
        if sorted(p[q] for q in pts) != list(pts):
            raise PreconditionError("action element is not a permutation of the points")
    lines = set(G.line_masks)
    for p in perms:
        for m in G.line_masks:
            if mask_of(p[q] for q in iter_bits(m)) not in lines:
                return False
    return True


def translations(E):
    """Left translations x -> a x of the nonzero elements of a hyperfield."""
    pts = [x for x in range(E.n) if x != E.zero]
    return [{x: E.mul[a][x] for x in pts} for a in pts]


# -- relation families ---------------------------------------------------------------


@dataclass(frozen=True)
class RelationFamily:
    """For each point a, the partition R_a of {0} ∪ points (0 is the zero)."""

    points: tuple
    partitions: dict = field(compare=False)

    def classes(self, a):
        return self.partitions[a]

    def class_map(self, a):
        out = {}
        for cls in self.partitions[a]:
            m = mask_of(cls)
            for x in cls:
                out[x] = m
        return out


def _partition_from_key(carrier, key):
    groups = {}
    for x in carrier:
        groups.setdefault(key(x), []).append(x)
    return tuple(sorted((frozenset(g) for g in groups.values()), key=lambda c: (min(c), len(c))))


def relation_family(source):
    """R_a: x ~ y iff a in L(x, y) (with x ~ x always).

    ``source`` may be a K-vector HyperStructure or an IncidenceGeometry.
    """
    if isinstance(source, IncidenceGeometry):
        G = source
        pts = G.points
        parts = {}
        for a in pts:
            classes = [frozenset({0, a})]
            covered = (1 << a) | 1
            for m in G.lines_through(a):
                classes.append(frozenset(members(m & ~(1 << a))))
                covered |= m
            for p in pts:
                if not covered >> p & 1:
                    classes.append(frozenset({p}))
            parts[a] = tuple(sorted(classes, key=lambda c: (min(c), len(c))))
        return RelationFamily(tuple(pts), parts)
    E = source
    _require_kvector(E)
    if E.zero != 0:
        raise PreconditionError("relation_family expects the zero at index 0")
    pts = tuple(x for x in range(E.n) if x != E.zero)
    carrier = range(E.n)
    parts = {}
    for a in pts:
        # class of x under R_a: {x} ∪ {y : a ∈ (x + y) ∪ {x, y}}
        def cls(x, a=a):
            if x == a or x == 0:
                return mask_of((0, a))
            return mask_of(y for y in carrier if y == x or (E.add[x][y] | (1 << x) | (1 << y)) >> a & 1)

        parts[a] = _partition_from_key(carrier, cls)
    return RelationFamily(pts, parts)


def _compose(class1, class2, x):
    """(T1 ∘ T2)(x) = union of T2(y) for y in T1(x); relations as class maps."""
    out = 0
    for y in iter_bits(class1[x]):
        out |= class2[y]
    return out


def relations_commute(F):
    """(True, None) or (False, (a, b, x)) with R_a∘R_b(x) != R_b∘R_a(x)."""
    maps = {a: F.class_map(a) for a in F.points}
    carrier = (0,) + tuple(F.points)
    for i, a in enumerate(F.points):
        for b in F.points[i + 1 :]:
            for x in carrier:
                if _compose(maps[a], maps[b], x) != _compose(maps[b], maps[a], x):
                    return False, (a, b, x)
    return True, None


def geometry_from_relations(F):
    """Lines are the traces on the points of (R_a ∘ R_b)(0)."""
    for a in F.points:
        classes = F.classes(a)
        if frozenset({0, a}) not in classes:
            raise PreconditionError(f"{{0, {a}}} is not a class of R_{a}", witness=(a,))
        for c in classes:
            if c != frozenset({0, a}) and len(c) < 3:
                raise PreconditionError(
                    f"R_{a} has a class of size {len(c)}: {sorted(c)}", witness=(a, tuple(sorted(c)))
                )
    ok, cx = relations_commute(F)
    if not ok:
        raise PreconditionError(f"R_{cx[0]} and R_{cx[1]} do not commute", witness=cx)
    maps = {a: F.class_map(a) for a in F.points}
    lines = set()
    for i, a in enumerate(F.points):
        for b in F.points[i + 1 :]:
            lines.add(_compose(maps[a], maps[b], 0) & ~1)
    G = IncidenceGeometry(F.points, [members(m) for m in lines])
    report = check_projective_axioms(G)
    for axiom in ("P1", "P2", "P3'"):
        if not report[axiom].passed:
            raise PreconditionError(f"resulting geometry fails {axiom}", witness=report[axiom].counterexample)
    return G


def family_from_relation(group, partition):
    """Conjugates S_a = a S a^{-1} of a relation S on a pointed group."""
    cls = _class_masks(group.n, partition)
    pts = tuple(group.nonzero)
    parts = {}
    for a in pts:
        inv = group.inverse[a]
        parts[a] = _partition_from_key(
            range(group.n), lambda x, a=a, inv=inv: mask_of(group.mul[a][y] for y in iter_bits(cls[group.mul[inv][x]]))
        )
    return RelationFamily(pts, parts)


# -- the relation encoding of addition -------------------------------------------------


def _class_masks(n, partition):
    out = [0] * n
    seen = 0
    for c in partition:
        m = mask_of(c)
        if m & seen:
            raise PreconditionError("classes overlap", witness=tuple(sorted(c)))
        seen |= m
        for x in c:
            out[x] = m
    if seen != (1 << n) - 1:
        raise PreconditionError("classes do not cover the carrier")
    return out


def _conjugate(group, rel, a):
    """Conjugate of a multivalued map given as masks: x -> a rel(a^{-1} x)."""
    inv = group.inverse[a]
    row = group.mul[a]
    return [mask_of(row[y] for y in iter_bits(rel[group.mul[inv][x]])) for x in range(group.n)]


def _apply(rel, mask):
    out = 0
    for y in iter_bits(mask):
        out |= rel[y]
    return out


def commutes_with_conjugates(group, rel):
    """(True, None) or (False, (a, x)) where rel ∘ rel^a differs from rel^a ∘ rel at x."""
    for a in group.nonzero:
        conj = _conjugate(group, rel, a)
        for x in range(group.n):
            if _apply(rel, conj[x]) != _apply(conj, rel[x]):
                return False, (a, x)
    return True, None


def canonical_relation(R):
    """Partition of R by x ~ y iff x ∪ (x+1) = y ∪ (y+1)."""
    if R.mul is None or not contains_K(R):
        raise PreconditionError("the structure does not contain K (1 + 1 != {0, 1})")
    one = R.one
    key = [(1 << x) | R.add[x][one] for x in range(R.n)]
    partition = _partition_from_key(range(R.n), lambda x: key[x])
    # each key is the class itself, which makes ~ an equivalence
    for c in partition:
        if any(key[x] != mask_of(c) for x in c):
            raise StructureError("x ∪ (x+1) is not the class of x", witness=tuple(sorted(c)))
    group = PointedGroup.from_structure(R)
    ok, cx = commutes_with_conjugates(group, _class_masks(R.n, partition))
    if not ok:
        raise StructureError("relation does not commute with a conjugate", witness=cx)
    return partition


def rebuild_addition_from_relation(group, partition, name=None):
    """Hyperfield on a pointed group whose canonical relation is ``partition``."""
    n, zero, one = group.n, group.zero, group.one
    cls = _class_masks(n, partition)
    base = (1 << zero) | (1 << one)
    if cls[zero] != base:
        raise PreconditionError("{0, 1} is not a class", witness=tuple(members(cls[zero])))
    for c in partition:
        if mask_of(c) != base and len(c) < 3:
            raise PreconditionError(f"class {sorted(c)} has fewer than three elements", witness=tuple(sorted(c)))
    ok, cx = commutes_with_conjugates(group, cls)
    if not ok:
        raise PreconditionError("relation does not commute with its conjugates", witness=cx)
    s = [cls[x] & ~(1 << x) for x in range(n)]
    s[one] = base
    R = _assemble(group, s, name or "rebuilt from relation")
    if not validate(R, "hyperfield").passed:
        axiom, res = validate(R, "hyperfield").first_failure()
        raise StructureError(f"rebuilt structure fails {axiom}", witness=res.counterexample)
    return R


def _assemble(group, s, name):
    """x + y = y if x = 0, else x s(y x^{-1})."""
    n = group.n
    add = [[0] * n for _ in range(n)]
    for x in range(n):
        for y in range(n):
            if x == group.zero:
                add[x][y] = 1 << y
            else:
                t = group.mul[y][group.inverse[x]]
                row = group.mul[x]
                add[x][y] = mask_of(row[z] for z in iter_bits(s[t]))
    return HyperStructure(n, add, group.mul, group.zero, group.one, name=name)


# -- the order encoding ------------------------------------------------------------------


@dataclass(frozen=True)
class PartialOrder:
    """``up[x]`` is the mask of {y : x <= y}."""

    n: int
    up: tuple

    def leq(self, x, y):
        return bool(self.up[x] >> y & 1)

    def pairs(self):
        return [(x, y) for x in range(self.n) for y in iter_bits(self.up[x])]


def order_violation(P):
    """None if P is a partial order, else a witness tuple."""
    for x in range(P.n):
        if not P.up[x] >> x & 1:
            return ("reflexivity", x)
        for y in iter_bits(P.up[x]):
            if y != x and P.up[y] >> x & 1:
                return ("antisymmetry", x, y)
            if P.up[y] & ~P.up[x]:
                return ("transitivity", x, y)
    return None


def canonical_order(R):
    """x <= y iff y ∈ x + 1 or y = x, on a structure containing S."""
    if R.mul is None or not contains_S(R):
        raise PreconditionError("the structure does not contain S")
    one = R.one
    P = PartialOrder(R.n, tuple(R.add[x][one] | (1 << x) for x in range(R.n)))
    bad = order_violation(P)
    if bad:
        raise StructureError("relation is not a partial order", witness=bad)
    minus_one = R.neg(one)
    for x in range(R.n):
        if x not in (one, minus_one) and R.add[x][one] != P.up[x] & ~(1 << x):
            raise StructureError("x + 1 differs from the strict up-set", witness=(x,))
    group = PointedGroup.from_structure(R)
    ok, cx = commutes_with_conjugates(group, list(P.up))
    if not ok:
        raise StructureError("order does not commute with a conjugate", witness=cx)
    return P


def _order_s(group, eps, up):
    zero, one = group.zero, group.one
    s = []
    for x in range(group.n):
        if x == eps:
            s.append((1 << eps) | (1 << zero) | (1 << one))
        elif x in (zero, one):
            s.append(1 << one)
        else:
            s.append(up[x] & ~(1 << x))
    return s


def order_preconditions(group, eps, P):
    """None if the order data satisfies every precondition, else a witness."""
    zero, one = group.zero, group.one
    if eps in (zero, one) or group.mul[eps][eps] != one:
        return ("epsilon", eps)
    bad = order_violation(P)
    if bad:
        return bad
    if P.up[eps] != mask_of((eps, zero, one)):
        return ("S(eps)", members(P.up[eps]))
    if P.up[zero] != mask_of((zero, one)):
        return ("S(0)", members(P.up[zero]))
    if P.up[one] != 1 << one:
        return ("S(1)", members(P.up[one]))
    em = group.mul[eps]
    for x in range(group.n):
        for y in range(group.n):
            if P.leq(x, y) != P.leq(em[y], em[x]):
                return ("reversal", x, y)
    s = _order_s(group, eps, P.up)
    for x in range(group.n):
        if not s[x]:
            return ("empty s", x)
    ok, cx = commutes_with_conjugates(group, s)
    if not ok:
        return ("conjugates", cx)
    return None


def rebuild_addition_from_order(group, eps, P, name=None):
    """Hyperfield containing S from an order on a pointed group with involution eps."""
    bad = order_preconditions(group, eps, P)
    if bad:
        raise PreconditionError(f"order data fails the precondition {bad[0]}", witness=bad)
    R = _assemble(group, _order_s(group, eps, P.up), name or "rebuilt from order")
    report = validate(R, "hyperfield")
    if not report.passed:
        axiom, res = report.first_failure()
        raise StructureError(f"rebuilt structure fails {axiom}", witness=res.counterexample)
    return R


def order_scan(group, eps):
    """Every order on a pointed group satisfying the rebuild preconditions.

    Up-sets of 0, 1 and eps are fixed; the others are chosen by backtracking
    with reflexivity, antisymmetry, transitivity and reversal pruning.
    """
    n, zero, one = group.n, group.zero, group.one
    if eps in (zero, one) or group.mul[eps][eps] != one:
        raise PreconditionError("eps must be an element of order two", witness=(eps,))
    fixed = {eps: mask_of((eps, zero, one)), zero: mask_of((zero, one)), one: 1 << one}
    free = [x for x in range(n) if x not in fixed]
    em = group.mul[eps]
    found = []

    def consistent(up):
        for x, ux in up.items():
            for y in iter_bits(ux):
                if y in up:
                    if y != x and up[y] >> x & 1:
                        return False
                    if up[y] & ~ux:
                        return False
                # reversal: x <= y iff eps y <= eps x
                ey, ex = em[y], em[x]
                if ey in up and not up[ey] >> ex & 1:
                    return False
            for y in range(n):
                if not ux >> y & 1:
                    ey, ex = em[y], em[x]
                    if ey in up and up[ey] >> ex & 1:
                        return False
        return True

    def recurse(i, up):
        if i == len(free):
            P = PartialOrder(n, tuple(up[x] for x in range(n)))
            if order_preconditions(group, eps, P) is None:
                found.append(P)
            return
        x = free[i]
        others = [y for y in range(n) if y != x]
        for bits in range(1 << len(others)):
            ux = (1 << x) | mask_of(others[j] for j in range(len(others)) if bits >> j & 1)
            up[x] = ux
            if consistent(up):
                recurse(i + 1, up)
            del up[x]

    if not consistent(dict(fixed)):
        return []
    recurse(0, dict(fixed))
    return found


# -- difference sets and cyclic planes ---------------------------------------------------


@dataclass(frozen=True)
class DifferenceSet:
    n: int
    elements: tuple

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(sorted(int(d) % self.n for d in self.elements)))

    def is_valid(self):
        D = self.elements
        diffs = sorted((a - b) % self.n for a in D for b in D if a != b)
        return len(set(D)) == len(D) and diffs == list(range(1, self.n))


def _canonical(D, n):
    units = [u for u in range(1, n) if _gcd(u, n) == 1]
    best = None
    for u in units:
        scaled = [(u * d) % n for d in D]
        for t in range(n):
            cand = tuple(sorted((x + t) % n for x in scaled))
            if best is None or cand < best:
                best = cand
    return best


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def equivalence_class(D):
    """All sets u D + t for units u and translations t."""
    n = D.n
    units = [u for u in range(1, n) if _gcd(u, n) == 1]
    return sorted({tuple(sorted((u * d + t) % n for d in D.elements)) for u in units for t in range(n)})


def difference_set_search(n, k):
    """Perfect difference sets of size k mod n, one per class under
    translations and multipliers, each in lexicographically least form."""
    if n > config.DIFFERENCE_SET_BOUND:
        raise BoundError(f"modulus {n} exceeds the difference-set bound")
    if k < 2 or k > n:
        return []
    if k * (k - 1) != n - 1:
        return []
    found = set()
    # every perfect difference set has a translate containing 0 and 1
    chosen = [0, 1]
    used = {1, n - 1}

    def recurse(start):
        if len(chosen) == k:
            found.add(_canonical(chosen, n))
            return
        for x in range(start, n):
            new = []
            ok = True
            for d in chosen:
                for diff in ((x - d) % n, (d - x) % n):
                    if diff in used or diff in new:
                        ok = False
                        break
                    new.append(diff)
                if not ok:
                    break
            if not ok:
                continue
            chosen.append(x)
            used.update(new)
            recurse(x + 1)
            chosen.pop()
            used.difference_update(new)

    recurse(2)
    return [DifferenceSet(n, D) for D in sorted(found)]


def plane_from_difference_set(D, want_hyperfield=True):
    """Cyclic plane with lines the translates of D (element i is point i+1),
    plus the induced hyperfield extension of K (None if refused).

    Returns ``(geometry, hyperfield, reason)``; ``reason`` explains a refusal.
    """
    if not isinstance(D, DifferenceSet):
        raise ValueError("expected a DifferenceSet")
    if not D.is_valid():
        raise PreconditionError(f"{D.elements} is not a perfect difference set mod {D.n}", witness=D.elements)
    n = D.n
    lines = [[(d + t) % n + 1 for d in D.elements] for t in range(n)]
    G = IncidenceGeometry(range(1, n + 1), lines)
    if not want_hyperfield:
        return G, None, None
    group = PointedGroup.from_spec(AbelianGroupSpec((n,)))
    # classes other than {0,1}: (D - u) minus the identity, for u in D
    partition = [frozenset({0, 1})]
    for u in D.elements:
        partition.append(frozenset((d - u) % n + 1 for d in D.elements if d != u))
    try:
        H = rebuild_addition_from_relation(group, partition, name=f"plane hyperfield mod {n}")
    except PreconditionError as exc:
        return G, None, f"{exc} (P3' needs lines of at least four points)"
    return G, H, None


# -- geometry builders ---------------------------------------------------------------------


def projective_space(q, d):
    """PG(d, q): points are 1-dimensional subspaces of F_q^(d+1), numbered from 1."""
    from .rings import finite_field

    F = finite_field(q)
    dim = d + 1
    vecs = []
    # normalized vectors: first nonzero coordinate equals 1
    def all_vectors(k):
        if k == 0:
            yield ()
            return
        for v in all_vectors(k - 1):
            for c in range(q):
                yield v + (c,)

    for v in all_vectors(dim):
        nz = [c for c in v if c]
        if nz and nz[0] == 1:
            vecs.append(v)
    index = {v: i + 1 for i, v in enumerate(vecs)}

    def normalize(v):
        lead = next(c for c in v if c)
        inv = F.inverse(lead)
        return tuple(int(F.mul[inv, c]) for c in v)

    lines = set()
    for a, b in combinations(vecs, 2):
        pts = {index[a], index[b]}
        for lam in range(1, q):
            w = tuple(int(F.add[x, F.mul[lam, y]]) for x, y in zip(a, b))
            pts.add(index[normalize(w)])
        lines.add(tuple(sorted(pts)))
    return IncidenceGeometry(range(1, len(vecs) + 1), lines)


def affine_plane(q):
    """AG(2, q) with points numbered from 1."""
    from .rings import finite_field

    F = finite_field(q)
    idx = {(x, y): 1 + x * q + y for x in range(q) for y in range(q)}
    lines = []
    for m in range(q):
        for c in range(q):
            lines.append([idx[(x, int(F.add[F.mul[m, x], c]))] for x in range(q)])
    for c in range(q):
        lines.append([idx[(c, y)] for y in range(q)])
    return IncidenceGeometry(idx.values(), lines)


def single_line(k):
    return IncidenceGeometry(range(1, k + 1), [range(1, k + 1)])


def near_pencil(k):
    """One line of k points plus a point joined to each of them by a 2-point line."""
    pts = list(range(1, k + 2))
    lines = [list(range(1, k + 1))] + [[p, k + 1] for p in range(1, k + 1)]
    return IncidenceGeometry(pts, lines)


def complete_with_pairs(points, lines):
    """Add a 2-point line for every pair not yet covered (partial -> linear space)."""
    covered = set()
    for L in lines:
        for a, b in combinations(sorted(L), 2):
            covered.add((a, b))
    extra = [[a, b] for a, b in combinations(sorted(points), 2) if (a, b) not in covered]
    return IncidenceGeometry(points, list(lines) + extra)


def random_linear_space(n_points, n_blocks, block_size, rng):
    """Greedy random partial linear space completed with 2-point lines."""
    pts = list(range(1, n_points + 1))
    blocks = []
    covered = set()
    for _ in range(n_blocks * 20):
        if len(blocks) == n_blocks:
            break
        B = sorted(rng.sample(pts, block_size))
        pairs = list(combinations(B, 2))
        if any(p in covered for p in pairs):
            continue
        covered.update(pairs)
        blocks.append(B)
    return complete_with_pairs(pts, blocks)


def delete_points(G, removed):
    """Restriction of G to the remaining points; lines left with < 2 points vanish."""
    removed = set(removed)
    pts = [p for p in G.points if p not in removed]
    lines = [[p for p in L if p not in removed] for L in G.lines]
    return IncidenceGeometry(pts, [L for L in lines if len(L) >= 2])


def random_punctured(G, rng, min_line=3, attempts=50):
    """Delete a random set of points keeping every surviving line >= min_line points."""
    for _ in range(attempts):
        k = rng.randint(1, max(1, len(G.points) // 3))
        removed = rng.sample(list(G.points), k)
        H = delete_points(G, removed)
        if H.lines and min(len(L) for L in H.lines) >= min_line:
            return H
    return G


def steiner_triple_system(v, rng, max_steps=100000):
    """Random STS(v) by Stinson's hill-climbing; v must be 1 or 3 mod 6."""
    if v % 6 not in (1, 3):
        raise PreconditionError("Steiner triple systems need v = 1 or 3 mod 6")
    pts = list(range(1, v + 1))
    partner = {x: {} for x in pts}  # partner[x][y] = z for triple {x, y, z}
    triples = set()
    target = v * (v - 1) // 6
    for _ in range(max_steps):
        if len(triples) == target:
            break
        live = [x for x in pts if len(partner[x]) < v - 1]
        x = rng.choice(live)
        y = rng.choice([y for y in pts if y != x and y not in partner[x]])
        z = rng.choice([z for z in pts if z != x and z != y and z not in partner[x]])
        if y in partner[z]:
            w = partner[z][y]
            old = tuple(sorted((z, y, w)))
            triples.discard(old)
            for a, b in combinations(old, 2):
                partner[a].pop(b, None)
                partner[b].pop(a, None)
        t = tuple(sorted((x, y, z)))
        triples.add(t)
        for a, b in combinations(t, 2):
            c = next(c for c in t if c not in (a, b))
            partner[a][b] = c
            partner[b][a] = c
    if len(triples) != target:
        raise StructureError("hill-climbing did not finish")
    return IncidenceGeometry(pts, triples)
