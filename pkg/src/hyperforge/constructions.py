"""Builders for the concrete hyperstructures: K, S, quotients R/G, K[H] and
its dimension-2 variants, finite-field quotients, and the sign maps."""

import warnings
from dataclasses import dataclass
from itertools import product as iproduct

import numpy as np

from . import config
from .bits import mask_of, members
from .core import HyperStructure, validate
from .errors import BoundError, PreconditionError, StructureError
from .rings import (
    FiniteRing,
    factor_prime_power,
    finite_field,
    is_unit_subgroup,
    product_of_fields,
    subfield_elements,
)

# S carrier: index 0 is 0, index 1 is +1, index 2 is -1
S_INDEX = {0: 0, 1: 1, -1: 2}
S_VALUE = {0: 0, 1: 1, 2: -1}


def builtin(name):
    """The Krasner hyperfield ``"K"`` or the sign hyperfield ``"S"``."""
    if name == "K":
        add = [[{0}, {1}], [{1}, {0, 1}]]
        mul = [[0, 0], [0, 1]]
        return HyperStructure.from_sets(add, mul, name="K")
    if name == "S":
        z, p, m = 0, 1, 2
        every = {z, p, m}
        add = [
            [{z}, {p}, {m}],
            [{p}, {p}, every],
            [{m}, every, {m}],
        ]
        mul = [[z, z, z], [z, p, m], [z, m, p]]
        return HyperStructure.from_sets(add, mul, name="S")
    raise ValueError(f"unknown builtin {name!r}; expected 'K' or 'S'")


def sign_of_integer(n):
    """The sign homomorphism Z -> S, returned as -1, 0 or 1."""
    return (n > 0) - (n < 0)


def abs_to_K(s):
    """Absolute value S -> K on signs (-1, 0, 1)."""
    if s not in (-1, 0, 1):
        raise ValueError(f"{s!r} is not an element of S")
    return abs(s)


# -- quotients R/G ----------------------------------------------------------------


@dataclass(frozen=True)
class QuotientOrigin:
    ring: FiniteRing
    subgroup: tuple
    reps: tuple
    class_of: tuple


class QuotientHyperring:
    """R/G computed on demand from the ring tables.

    Class 0 is the orbit of 0, class 1 the orbit of 1, the rest ordered by
    smallest representative.  Sums are ``(aG + bG)/G``, i.e. the classes of
    ``a + g b`` for ``g`` in G.
    """

    def __init__(self, R, G):
        G = sorted(int(g) for g in G)
        if not is_unit_subgroup(R, G):
            raise PreconditionError("G is not a subgroup of the unit group", witness=tuple(G))
        self.ring = R
        self.G = np.array(G, dtype=np.int64)
        class_of = np.full(R.size, -1, dtype=np.int64)
        reps = []
        for x in range(R.size):
            if class_of[x] >= 0:
                continue
            orbit = R.mul[self.G, x]
            class_of[orbit] = len(reps)
            reps.append(x)
        self.class_of = class_of
        self.reps = np.array(reps, dtype=np.int64)
        self.n = len(reps)
        self.zero = 0
        self.one = int(class_of[R.one])
        self._gmul = R.mul[self.G][:, self.reps]  # [g, class] -> g * rep
        self._mul = None
        self._cache = {}

    def __repr__(self):
        return f"<QuotientHyperring {self.ring.name}/G n={self.n}>"

    def _mask(self, classes):
        flags = np.zeros(self.n, dtype=bool)
        flags[classes] = True
        return int.from_bytes(np.packbits(flags, bitorder="little").tobytes(), "little")

    def _indices(self, mask):
        if isinstance(mask, (list, tuple, np.ndarray)):
            return np.asarray(mask, dtype=np.int64)
        return np.array(members(mask), dtype=np.int64)

    def sum(self, a, b):
        s = self.ring.add[self.reps[a], self._gmul[:, b]]
        return self._mask(self.class_of[s])

    def sum_union(self, A, B):
        ia = self._indices(A)
        ib = self._indices(B)
        if not len(ia) or not len(ib):
            return 0
        ra = self.reps[ia]
        gb = self._gmul[:, ib].ravel()
        s = self.ring.add[ra[:, None], gb[None, :]]
        return self._mask(np.unique(self.class_of[s]))

    def product(self, a, b):
        return int(self.class_of[self.ring.mul[self.reps[a], self.reps[b]]])

    def mul_array(self):
        if self._mul is None:
            self._mul = self.class_of[self.ring.mul[np.ix_(self.reps, self.reps)]]
        return self._mul

    def scale_mask(self, r, A):
        row = self.mul_array()[r]
        return self._mask(row[self._indices(A)])

    def neg(self, x):
        return int(self.class_of[self.ring.neg[self.reps[x]]])

    def units(self):
        M = self.mul_array()
        return [int(x) for x in np.nonzero((M == self.one).any(axis=1))[0]]

    def class_members(self, c):
        return np.nonzero(self.class_of == c)[0]

    def to_structure(self, name=None):
        if self.n > config.EXPLICIT_CARRIER_BOUND:
            raise BoundError(f"quotient with {self.n} classes exceeds the explicit bound")
        add = [[self.sum(a, b) for b in range(self.n)] for a in range(self.n)]
        mul = self.mul_array().tolist()
        origin = QuotientOrigin(
            self.ring, tuple(int(g) for g in self.G), tuple(int(r) for r in self.reps), tuple(int(c) for c in self.class_of)
        )
        return HyperStructure(self.n, add, mul, 0, self.one, name=name, origin=origin)


def quotient_by_subgroup(R, G, name=None):
    """Krasner's quotient hyperring R/G as an explicit HyperStructure."""
    Q = QuotientHyperring(R, G)
    return Q.to_structure(name=name or f"{R.name}/G{len(Q.G)}")


def subfield_criterion(R, G):
    """True iff {0} ∪ G is a subfield of R (so that R/G contains K)."""
    G = set(int(g) for g in G)
    if len(G) <= 1:
        raise PreconditionError("the criterion needs G != {1}")
    if not is_unit_subgroup(R, G):
        raise PreconditionError("G is not a subgroup of the unit group")
    F = G | {0}
    return all(int(R.add[a, b]) in F for a in F for b in F)


def contains_K(H):
    """Direct test: 1 + 1 = {0, 1} in H."""
    return H.sum(H.one, H.one) == (1 << H.zero) | (1 << H.one)


def ordered_subfield_criterion(R, G):
    """True iff {0} ∪ G ∪ -G is a subfield ordered with positive part {0} ∪ G.

    Finite rings never satisfy this; the exhaustive check confirms it case
    by case.
    """
    G = set(int(g) for g in G)
    if len(G) <= 1:
        raise PreconditionError("the criterion needs G != {1}")
    if not is_unit_subgroup(R, G):
        raise PreconditionError("G is not a subgroup of the unit group")
    minus_one = int(R.neg[R.one])
    if minus_one in G:
        raise PreconditionError("the criterion needs -1 not in G")
    negG = {int(R.neg[g]) for g in G}
    F = G | negG | {0}
    if not all(int(R.add[a, b]) in F for a in F for b in F):
        return False
    # positive cone: G + G ⊆ G (products stay in G since G is a group)
    return all(int(R.add[a, b]) in G for a in G for b in G)


def contains_S(H):
    """Direct test that {0, 1, -1} spans a copy of S inside H."""
    one = H.one
    m1 = [y for y in range(H.n) if H.sum(one, y) >> H.zero & 1]
    if len(m1) != 1:
        return False
    m1 = m1[0]
    if m1 == one:
        return False
    z = H.zero
    return (
        H.sum(one, one) == 1 << one
        and H.sum(m1, m1) == 1 << m1
        and H.sum(one, m1) == (1 << z) | (1 << one) | (1 << m1)
        and H.product(m1, m1) == one
    )


# -- abelian groups --------------------------------------------------------------


@dataclass(frozen=True)
class AbelianGroupSpec:
    """Finite abelian group in invariant-factor form, e.g. (2, 4) for Z/2 x Z/4."""

    factors: tuple

    def __post_init__(self):
        f = tuple(int(x) for x in self.factors)
        object.__setattr__(self, "factors", f)
        for a in f:
            if a < 2:
                raise PreconditionError(f"cyclic factor orders must be >= 2, got {f}")
        for a, b in zip(f, f[1:]):
            if b % a:
                raise PreconditionError(f"invariant factors must divide each other, got {f}")

    @property
    def order(self):
        out = 1
        for a in self.factors:
            out *= a
        return out

    def __str__(self):
        if not self.factors:
            return "1"
        return " x ".join(f"Z/{a}" for a in self.factors)

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if text in ("", "1"):
            return cls(())
        parts = text.replace("Z/", "").replace("x", ",").replace("*", ",").split(",")
        return cls(tuple(int(p) for p in parts if p.strip()))


def _partitions(k, largest=None):
    if largest is None:
        largest = k
    if k == 0:
        yield ()
        return
    for first in range(min(k, largest), 0, -1):
        for rest in _partitions(k - first, first):
            yield (first,) + rest


def _prime_factorization(n):
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def abelian_group_specs(order):
    """All abelian groups of the given order, sorted by invariant factors."""
    if order < 1:
        raise PreconditionError("group order must be positive")
    if order == 1:
        return [AbelianGroupSpec(())]
    per_prime = []
    for p, e in sorted(_prime_factorization(order).items()):
        per_prime.append([(p, part) for part in _partitions(e)])
    specs = set()
    for choice in iproduct(*per_prime):
        length = max(len(part) for _, part in choice)
        factors = [1] * length
        for p, part in choice:
            for i, exp in enumerate(part):
                # largest exponents go to the last invariant factor
                factors[length - 1 - i] *= p**exp
        specs.add(tuple(f for f in factors if f > 1))
    return [AbelianGroupSpec(f) for f in sorted(specs, key=lambda f: (len(f), f))]


class PointedGroup:
    """A finite group with an adjoined absorbing zero, as a carrier table.

    Carrier index 0 is the zero, index 1 the identity.  ``elements[i]`` is
    the group element at carrier index ``i + 1`` (tuples of residues when the
    group comes from an AbelianGroupSpec).
    """

    def __init__(self, n, mul, zero=0, one=1, elements=None, spec=None):
        self.n = n
        self.mul = [list(row) for row in mul]
        self.zero = zero
        self.one = one
        self.elements = elements
        self.spec = spec
        self.nonzero = [x for x in range(n) if x != zero]
        self.inverse = {}
        for x in self.nonzero:
            for y in self.nonzero:
                if self.mul[x][y] == one:
                    self.inverse[x] = y
                    break
        if len(self.inverse) != len(self.nonzero):
            raise PreconditionError("nonzero elements do not form a group")

    @classmethod
    def from_spec(cls, spec):
        if not isinstance(spec, AbelianGroupSpec):
            spec = AbelianGroupSpec(tuple(spec))
        elements = list(iproduct(*[range(f) for f in spec.factors])) if spec.factors else [()]
        index = {e: i + 1 for i, e in enumerate(elements)}
        n = len(elements) + 1
        mul = [[0] * n for _ in range(n)]
        for e in elements:
            for f in elements:
                g = tuple((a + b) % m for a, b, m in zip(e, f, spec.factors))
                mul[index[e]][index[f]] = index[g]
        return cls(n, mul, 0, 1, elements=elements, spec=spec)

    @classmethod
    def from_structure(cls, R):
        return cls(R.n, R.mul, R.zero, R.one)

    def order_of(self, x):
        k, cur = 1, x
        while cur != self.one:
            cur = self.mul[cur][x]
            k += 1
        return k

    def order_statistics(self):
        """Sorted element orders; equal statistics ⟺ isomorphic abelian groups."""
        return tuple(sorted(self.order_of(x) for x in self.nonzero))


def spec_of_group(G):
    """Invariant factors of an abelian PointedGroup, via order statistics."""
    stats = G.order_statistics()
    for spec in abelian_group_specs(len(G.nonzero)):
        if PointedGroup.from_spec(spec).order_statistics() == stats:
            return spec
    raise PreconditionError("group is not isomorphic to any abelian group of its order")


# -- K[H] and its dimension-2 variants -------------------------------------------

_MIN_GROUP = {"plain": 4, "nilpotent": 3, "idempotent_pair": 2}


def single_line_addition(n, zero=0):
    """x + 0 = x, x + x = {0, x}, x + y = everything but {0, x, y}."""
    full = (1 << n) - 1
    add = []
    for x in range(n):
        row = []
        for y in range(n):
            if x == zero:
                row.append(1 << y)
            elif y == zero:
                row.append(1 << x)
            elif x == y:
                row.append((1 << zero) | (1 << x))
            else:
                row.append(full & ~((1 << zero) | (1 << x) | (1 << y)))
        add.append(row)
    return add


def lyndon_extension(spec, variant="plain"):
    """K[H] (plain) or the zero-divisor variants K[H]^(1), K[H]^(2).

    Nonzero elements always form a single line.  The table is validated and
    the builder refuses when an axiom fails (groups that are too small).
    """
    if variant not in _MIN_GROUP:
        raise ValueError(f"unknown variant {variant!r}")
    if not isinstance(spec, AbelianGroupSpec):
        spec = AbelianGroupSpec(tuple(spec))
    G = PointedGroup.from_spec(spec)
    m = len(G.nonzero)
    extra = {"plain": 0, "nilpotent": 1, "idempotent_pair": 2}[variant]
    n = m + 1 + extra
    mul = [[0] * n for _ in range(n)]
    for x in range(m + 1):
        for y in range(m + 1):
            mul[x][y] = G.mul[x][y]
    if variant == "nilpotent":
        a = m + 1
        for u in range(1, m + 1):
            mul[a][u] = mul[u][a] = a
        mul[a][a] = 0
    elif variant == "idempotent_pair":
        e, f = m + 1, m + 2
        for u in range(1, m + 1):
            mul[e][u] = mul[u][e] = e
            mul[f][u] = mul[u][f] = f
        mul[e][e] = e
        mul[f][f] = f
        mul[e][f] = mul[f][e] = 0
    add = single_line_addition(n)
    label = {"plain": "K[{}]", "nilpotent": "K[{}]^(1)", "idempotent_pair": "K[{}]^(2)"}[variant]
    try:
        R = HyperStructure(n, add, mul, name=label.format(spec), origin=("lyndon", spec, variant))
    except StructureError as exc:
        # x + y would be empty: the line has too few points
        raise PreconditionError(
            f"{variant} construction on {spec} is not defined (needs a group of order >= {_MIN_GROUP[variant]})"
        ) from exc
    level = "hyperfield" if variant == "plain" else "hyperring"
    report = validate(R, level)
    if not report.passed:
        axiom, res = report.first_failure()
        raise PreconditionError(
            f"{variant} construction on {spec} fails {axiom} "
            f"(needs a group of order >= {_MIN_GROUP[variant]})",
            witness=res.counterexample,
        )
    return R


# -- finite-field quotients ---------------------------------------------------------


def field_quotient(q, m, bound=None):
    """F_{q^m} / F_q^× with F_q embedded as the fixed field of x -> x^q."""
    if factor_prime_power(q) is None:
        raise PreconditionError(f"{q} is not a prime power")
    if m < 2:
        raise PreconditionError("extension degree must be at least 2")
    F = finite_field(q**m, bound=bound)
    G = [x for x in subfield_elements(F, q) if x != 0]
    if q == 2:
        warnings.warn("q = 2 gives the trivial subgroup: the quotient is the field itself", stacklevel=2)
    H = quotient_by_subgroup(F, G, name=f"F_{q**m}/F_{q}^x")
    H._cache["field_quotient"] = (q, m)
    return H


def field_quotient_params(H):
    return H._cache.get("field_quotient")


def product_quotient(qs, G):
    R = product_of_fields(qs)
    return quotient_by_subgroup(R, G)


def class_subset(H, ring_elements):
    """Mask of classes of the given ring elements in a quotient H."""
    origin = H.origin
    return mask_of(origin.class_of[x] for x in ring_elements)
