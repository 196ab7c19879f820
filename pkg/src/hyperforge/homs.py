"""Homomorphisms between hyperrings: enumeration, epimorphisms, K-dimension
and lifting of maps between field quotients to ring homomorphisms."""

from dataclasses import dataclass, field

from . import config
from .bits import iter_bits, mask_of, members, popcount
from .constructions import QuotientOrigin
from .core import HyperStructure, require, search_maps, validate
from .errors import LiftError, PreconditionError, StructureError
from .rings import ring_homomorphisms


@dataclass(frozen=True)
class HomWitness:
    source: HyperStructure = field(repr=False, compare=False)
    target: HyperStructure = field(repr=False, compare=False)
    mapping: tuple
    is_hom: bool = True
    is_epi: bool = False
    is_iso: bool = False

    def __call__(self, x):
        return self.mapping[x]

    def image(self):
        return sorted(set(self.mapping))


def _additive_image(R1, f, a, b):
    return mask_of(f[c] for c in iter_bits(R1.add[a][b]))


def _check_hom(R1, R2, f):
    if f[R1.zero] != R2.zero or f[R1.one] != R2.one:
        return False
    for a in range(R1.n):
        for b in range(R1.n):
            if f[R1.mul[a][b]] != R2.mul[f[a]][f[b]]:
                return False
            if _additive_image(R1, f, a, b) & ~R2.add[f[a]][f[b]]:
                return False
    return True


def _epi(R1, R2, f):
    if len(set(f)) != R2.n:
        return False
    fibres = [[] for _ in range(R2.n)]
    for a, x in enumerate(f):
        fibres[x].append(a)
    for x in range(R2.n):
        for y in range(R2.n):
            union = 0
            for a in fibres[x]:
                for b in fibres[y]:
                    union |= _additive_image(R1, f, a, b)
            if union != R2.add[x][y]:
                return False
    return True


def _iso(R1, R2, f):
    if len(set(f)) != R1.n or R1.n != R2.n:
        return False
    return all(
        _additive_image(R1, f, a, b) == R2.add[f[a]][f[b]] for a in range(R1.n) for b in range(R1.n)
    )


def make_witness(R1, R2, mapping):
    f = tuple(int(v) for v in mapping)
    if len(f) != R1.n or any(not 0 <= v < R2.n for v in f):
        raise ValueError("mapping does not fit the carriers")
    ok = _check_hom(R1, R2, f)
    return HomWitness(R1, R2, f, ok, ok and _epi(R1, R2, f), ok and _iso(R1, R2, f))


def enumerate_homs(R1, R2, budget=None):
    """All homomorphisms R1 -> R2, in lexicographic order of their tables.

    Raises BudgetExhausted (with the partial list) when the node budget runs
    out; results are never silently truncated.
    """
    require(R1, "hyperring")
    require(R2, "hyperring")
    if budget is None:
        budget = config.HOM_SEARCH_BUDGET
    if budget <= 0:
        raise ValueError("search budget must be positive")
    found, _ = search_maps(R1, R2, injective=False, exact=False, budget=budget)
    return [make_witness(R1, R2, f) for f in sorted(set(found))]


def compose(h1, h2):
    """h2 after h1."""
    return make_witness(h1.source, h2.target, [h2.mapping[x] for x in h1.mapping])


def is_epimorphism(h):
    if not h.is_hom:
        raise PreconditionError("not a homomorphism")
    return _epi(h.source, h.target, h.mapping)


# -- K-dimension ------------------------------------------------------------------


def line_closure(E, mask):
    """Smallest subset containing ``mask`` and 0 that is closed under sums."""
    W = mask | (1 << E.zero)
    while True:
        nxt = W | E.sum_union(W, W)
        if nxt == W:
            return W
        W = nxt


def _require_kvector(E):
    report = validate(E, "kvector")
    if not report.passed:
        axiom, res = report.first_failure()
        raise StructureError(f"not a K-vector space: {axiom} fails at {res.counterexample}")


def k_dimension(E, subset=None):
    """Size of a minimal generating set of ``subset`` (default: all of E)
    under line closure.  Greedy growth is exact because independent sets of a
    projective geometry form a matroid."""
    _require_kvector(E)
    target = mask_of(range(E.n)) if subset is None else line_closure(E, mask_of(subset))
    span = 1 << E.zero
    dim = 0
    for x in range(E.n):
        if target >> x & 1 and not span >> x & 1:
            span = line_closure(E, span | (1 << x))
            dim += 1
    return dim


def range_dimension(h):
    return k_dimension(h.target, h.image())


# -- lifting ----------------------------------------------------------------------


@dataclass(frozen=True)
class LiftResult:
    """Outcome of ``lift_hom``: a ring map, or a report that the range is in a line."""

    kind: str  # "lift" or "line"
    dimension: int
    ring_map: tuple = None
    lifts: tuple = ()

    def __str__(self):
        if self.kind == "lift":
            return f"lifted (range dimension {self.dimension})"
        return f"range lies in a line (dimension {self.dimension}); {len(self.lifts)} inducing ring maps"


def _quotient_origin(H):
    origin = H.origin
    if not isinstance(origin, QuotientOrigin):
        raise PreconditionError(f"{H!r} was not built by quotient_by_subgroup")
    if len(origin.subgroup) + 1 <= 2:
        raise PreconditionError("the quotient needs a subfield with more than two elements")
    return origin


def inducing_ring_maps(h):
    """All unital ring homomorphisms A1 -> A2 that induce ``h`` on classes."""
    o1 = _quotient_origin(h.source)
    o2 = _quotient_origin(h.target)
    out = []
    for rho in ring_homomorphisms(o1.ring, o2.ring):
        if all(o2.class_of[rho[x]] == h.mapping[o1.class_of[x]] for x in range(o1.ring.size)):
            out.append(tuple(int(v) for v in rho))
    return sorted(out)


def lift_hom(h):
    """Lift a hom between field quotients A1/K1^x -> A2/K2^x to a ring map.

    When the range spans more than a line the lift must exist and be unique,
    otherwise LiftError is raised.  Line-ranged homs get a "line" report.
    """
    if not h.is_hom:
        raise PreconditionError("not a homomorphism")
    lifts = inducing_ring_maps(h)
    dim = range_dimension(h)
    if dim > 2:
        if len(lifts) != 1:
            raise LiftError(f"range dimension {dim} but {len(lifts)} inducing ring maps for {h.mapping}")
        return LiftResult("lift", dim, lifts[0], tuple(lifts))
    return LiftResult("line", dim, None, tuple(lifts))


def range_members(h):
    return members(mask_of(h.mapping))


def is_line_ranged(h):
    return range_dimension(h) <= 2


def image_size(h):
    return popcount(mask_of(h.mapping))
