"""Finite semi-local model of an adele class space: a product of finite
fields modulo the diagonal units of a common base field.

Places are the factors.  Ideals correspond to subsets of places, primes to
single places, and prime elements over a place form a group with a unique
idempotent.
"""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import config
from .bits import members
from .constructions import QuotientHyperring, subfield_criterion
from .errors import BoundError, PreconditionError, StructureError
from .ideals import _ideal_masks, _mask_from_indices, ideal_closure, is_prime_mask
from .rings import factor_prime_power, finite_field, product_ring, ring_homomorphisms


@dataclass(frozen=True)
class PlaceSystem:
    """Base field size q and the degrees m_v of the residue fields F_{q^m_v}."""

    q: int
    degrees: tuple

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(m) for m in self.degrees))
        if factor_prime_power(self.q) is None:
            raise PreconditionError(f"{self.q} is not a prime power")
        if self.q <= 2:
            raise PreconditionError("q must exceed 2 so that the diagonal unit group is nontrivial")
        if not self.degrees or any(m < 1 for m in self.degrees):
            raise PreconditionError("every place needs a degree m_v >= 1")

    @classmethod
    def from_sizes(cls, q, sizes):
        degrees = []
        for s in sizes:
            m, power = 0, 1
            while power < s:
                power *= q
                m += 1
            if power != s:
                raise PreconditionError(f"residue size {s} is not a power of {q}")
            degrees.append(m)
        return cls(q, tuple(degrees))

    @property
    def sizes(self):
        return tuple(self.q**m for m in self.degrees)


class SemiLocalClassSpace:
    def __init__(self, places, ring, diagonal, H, fields):
        self.places = places
        self.ring = ring
        self.diagonal = diagonal
        self.H = H
        self.fields = fields
        # zero pattern of each class: zero_at[c, v] is True when x_v = 0
        reps = H.reps
        cols = []
        for v, stride in enumerate(ring.strides):
            cols.append((reps // stride) % ring.factors[v].size == 0)
        self.zero_at = np.stack(cols, axis=1)

    @property
    def n_places(self):
        return len(self.places.degrees)

    def units_count(self):
        out = 1
        for s in self.places.sizes:
            out *= s - 1
        return out // (self.places.q - 1)


def build_semilocal(ps, bound=None):
    """H = (prod F_{q^m_v}) / F_q^x with F_q embedded diagonally."""
    bound = config.SANDBOX_RING_BOUND if bound is None else bound
    total = 1
    for s in ps.sizes:
        total *= s
    if total > bound:
        raise BoundError(f"product ring of size {total} exceeds the bound {bound}")
    fields = [finite_field(s) for s in ps.sizes]
    R = product_ring(fields, name="x".join(f"F_{s}" for s in ps.sizes), bound=bound)
    if len(fields) == 1:
        R.factors, R.strides = list(fields), [1]
    base = finite_field(ps.q)
    embeddings = []
    for F in fields:
        homs = ring_homomorphisms(base, F)
        if not homs:
            raise StructureError(f"F_{ps.q} does not embed in F_{F.size}")
        embeddings.append(homs[0])
    diagonal = sorted(
        int(sum(e[c] * stride for e, stride in zip(embeddings, R.strides))) for c in range(1, ps.q)
    )
    if not subfield_criterion(R, diagonal):
        raise StructureError("diagonal units plus zero do not form a subfield")
    H = QuotientHyperring(R, diagonal)
    if H.sum(H.one, H.one) != (1 << H.zero) | (1 << H.one):
        raise StructureError("the quotient does not contain K")
    return SemiLocalClassSpace(ps, R, diagonal, H, fields)


def _subsets(k):
    for r in range(k + 1):
        yield from combinations(range(k), r)


def ideal_of_places(S, Z):
    """J_Z = classes with x_w = 0 for every w in Z, as a bitmask."""
    flags = np.ones(S.H.n, dtype=bool)
    for w in Z:
        flags &= S.zero_at[:, w]
    return _mask_from_indices(np.nonzero(flags)[0], S.H.n)


def classify_ideals(S, verify=True):
    """Map each subset Z of places (a sorted tuple) to the ideal J_Z.

    With ``verify`` the map is checked to be a bijection onto all ideals and
    to turn intersections of place sets into ideal joins and unions into
    ideal intersections.
    """
    out = {Z: ideal_of_places(S, Z) for Z in _subsets(S.n_places)}
    if verify:
        found = set(_ideal_masks(S.H))
        if found != set(out.values()) or len(found) != len(out):
            raise StructureError(f"ideals do not match place subsets: {len(found)} ideals, {len(out)} subsets")
        for Z1 in out:
            for Z2 in out:
                meet = tuple(sorted(set(Z1) & set(Z2)))
                join = tuple(sorted(set(Z1) | set(Z2)))
                if ideal_closure(S.H, out[Z1] | out[Z2]) != out[meet]:
                    raise StructureError(f"J of {meet} is not the join of J{Z1} and J{Z2}")
                if out[Z1] & out[Z2] != out[join]:
                    raise StructureError(f"J of {join} is not the meet of J{Z1} and J{Z2}")
    return {Z: frozenset(members(m)) for Z, m in out.items()}


def prime_spectrum(S):
    """The primes p_w = J_{w}, one per place, cross-checked by a full scan."""
    primes = [(w, ideal_of_places(S, (w,))) for w in range(S.n_places)]
    scanned = {I for I in _ideal_masks(S.H) if is_prime_mask(S.H, I)}
    if scanned != {p for _, p in primes}:
        raise StructureError("prime ideals differ from the single-place ideals")
    return [(w, frozenset(members(p))) for w, p in primes]


@dataclass
class PrimeGroupoid:
    space: SemiLocalClassSpace = field(repr=False)
    fibers: dict  # place -> sorted array of classes generating p_w
    idempotents: dict  # place -> class
    units: np.ndarray = field(repr=False)
    isotropy: dict = field(default_factory=dict)

    def report_lines(self):
        lines = []
        S = self.space
        for w in sorted(self.fibers):
            rep = int(S.H.reps[self.idempotents[w]])
            parts = [int((rep // st) % f.size) for st, f in zip(S.ring.strides, S.ring.factors)]
            lines.append(f"place {w} (residue field F_{S.places.sizes[w]})")
            lines.append(f"  fiber size     {len(self.fibers[w])}")
            lines.append(f"  isotropy order {self.isotropy[w]}")
            lines.append(f"  idempotent     class {self.idempotents[w]} = {tuple(parts)}")
        return lines


def _principal(M, a, n):
    return _mask_from_indices(np.unique(M[a]), n)


def prime_elements(S):
    """Fibers {a : aH = p_w}, with transitivity and isotropy verified."""
    H = S.H
    M = H.mul_array()
    n = H.n
    units = np.array(H.units(), dtype=np.int64)
    primes = {w: ideal_of_places(S, (w,)) for w in range(S.n_places)}
    by_mask = {m: w for w, m in primes.items()}
    fibers = {w: [] for w in primes}
    for a in range(n):
        P = _principal(M, a, n)
        if is_prime_mask(H, P):
            if P not in by_mask:
                raise StructureError(f"principal prime {a}H is not a single-place ideal")
            fibers[by_mask[P]].append(a)
    groupoid = PrimeGroupoid(S, {}, {}, units)
    for w, fib in fibers.items():
        fib = np.array(sorted(fib), dtype=np.int64)
        if not len(fib):
            raise StructureError(f"no generators over place {w}")
        a = int(fib[0])
        orbit = np.unique(M[units, a])
        if not np.array_equal(orbit, fib):
            raise StructureError(f"units are not transitive on the fiber over place {w}")
        iso = int((M[units, a] == a).sum())
        expected = S.places.sizes[w] - 1
        if iso != expected or len(units) != iso * len(fib):
            raise StructureError(f"isotropy over place {w} is {iso}, expected {expected}")
        idem = [int(x) for x in fib if M[x, x] == x]
        if len(idem) != 1:
            raise StructureError(f"fiber over place {w} has {len(idem)} idempotents")
        # the class of the indicator vector of the complement of w
        parts = [0 if v == w else 1 for v in range(S.n_places)]
        indicator = int(sum(p * st for p, st in zip(parts, S.ring.strides)))
        if int(H.class_of[indicator]) != idem[0]:
            raise StructureError(f"idempotent over place {w} is not the indicator class")
        groupoid.fibers[w] = fib
        groupoid.idempotents[w] = idem[0]
        groupoid.isotropy[w] = iso
    return groupoid


def partial_product(P, a, b):
    """a * b when a and b lie over the same place, else None."""
    for w, fib in P.fibers.items():
        if a in fib and b in fib:
            return int(P.space.H.mul_array()[a, b])
    return None


def check_groupoid_laws(P):
    """Closure, associativity, identity and inverses in every fiber; products
    across fibers leave every fiber.  Returns {law: bool}."""
    M = P.space.H.mul_array()
    report = {"closure": True, "associativity": True, "identity": True, "inverses": True, "cross_undefined": True}
    all_fibers = np.zeros(P.space.H.n, dtype=bool)
    for fib in P.fibers.values():
        all_fibers[fib] = True
    for w, fib in P.fibers.items():
        in_fib = np.zeros(P.space.H.n, dtype=bool)
        in_fib[fib] = True
        T = M[np.ix_(fib, fib)]
        if not in_fib[T].all():
            report["closure"] = False
            continue
        for a in fib:
            left = M[M[a, fib]][:, fib]  # (a b) c
            right = M[a][M[np.ix_(fib, fib)]]  # a (b c)
            if not np.array_equal(left, right):
                report["associativity"] = False
                break
        e = P.idempotents[w]
        if not np.array_equal(M[e, fib], fib):
            report["identity"] = False
        if not (T == e).any(axis=1).all():
            report["inverses"] = False
    places = sorted(P.fibers)
    for v, w in combinations(places, 2):
        prods = M[np.ix_(P.fibers[v], P.fibers[w])]
        if all_fibers[prods].any():
            report["cross_undefined"] = False
    return report


def sandbox_report(S, P):
    lines = [
        f"base field F_{S.places.q}, residue fields {', '.join(f'F_{s}' for s in S.places.sizes)}",
        f"classes {S.H.n}, units {len(P.units)}",
    ]
    return lines + P.report_lines()
