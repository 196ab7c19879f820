"""Finite commutative rings given by explicit tables.

Elements are the indices ``0..size-1``; index 0 is always the additive zero.
Tables are numpy arrays so that quotient and sandbox computations can be
vectorised.
"""

from functools import reduce

import numpy as np

from . import config
from .core import HyperStructure
from .errors import BoundError, PreconditionError, StructureError

FULL_CHECK_LIMIT = 256


class FiniteRing:
    """Commutative ring with identity on ``0..size-1``.

    Axioms are checked exhaustively on construction when ``size`` is at most
    ``FULL_CHECK_LIMIT``; larger rings must come from a builder that is a
    ring by construction (prime fields, polynomial quotients by an
    irreducible, products of checked factors) and pass ``checked=True``.
    """

    def __init__(self, add, mul, one=1, name=None, checked=False, labels=None):
        add = np.asarray(add, dtype=np.int32)
        mul = np.asarray(mul, dtype=np.int32)
        size = add.shape[0]
        if add.shape != (size, size) or mul.shape != (size, size):
            raise StructureError("ring tables must be square and of equal size")
        self.size = size
        self.add = add
        self.mul = mul
        self.zero = 0
        self.one = one
        self.name = name
        self.labels = labels
        if not checked:
            if size > FULL_CHECK_LIMIT:
                raise StructureError(
                    f"ring of size {size} is too large for the exhaustive axiom check; "
                    "build it from checked components"
                )
            problem = check_ring_axioms(add, mul, one)
            if problem:
                raise StructureError(f"not a commutative ring: {problem}")
        self.neg = np.argmax(add == 0, axis=1).astype(np.int32)

    def __repr__(self):
        return f"<FiniteRing {self.name or ''} size={self.size}>"

    def is_unit(self, x):
        return bool((self.mul[x] == self.one).any())

    def units(self):
        return [int(x) for x in np.nonzero((self.mul == self.one).any(axis=1))[0]]

    def inverse(self, x):
        hits = np.nonzero(self.mul[x] == self.one)[0]
        if not len(hits):
            raise ValueError(f"{x} is not a unit")
        return int(hits[0])

    def power(self, x, k):
        acc = self.one
        for _ in range(k):
            acc = int(self.mul[acc, x])
        return acc

    def additive_span(self, elements):
        span = {0}
        frontier = [0]
        gens = list(elements)
        while frontier:
            new = []
            for a in frontier:
                for g in gens:
                    c = int(self.add[a, g])
                    if c not in span:
                        span.add(c)
                        new.append(c)
            frontier = new
        return span

    def as_hyperstructure(self):
        """The ring viewed as a hyperring with singleton sums."""
        if self.size > config.EXPLICIT_CARRIER_BOUND:
            raise BoundError("ring too large for an explicit hyperstructure")
        add = [[1 << int(self.add[a, b]) for b in range(self.size)] for a in range(self.size)]
        return HyperStructure(self.size, add, self.mul.tolist(), 0, self.one, name=self.name, origin=("ring", self))


def check_ring_axioms(add, mul, one):
    """First violated commutative-ring axiom as a string, or None."""
    n = add.shape[0]
    idx = np.arange(n)
    if one == 0 and n > 1:
        return "one equals zero"
    if not (add == add.T).all():
        return "addition not commutative"
    if not (mul == mul.T).all():
        return "multiplication not commutative"
    if not (add[0] == idx).all():
        return "0 is not additively neutral"
    if not (mul[one] == idx).all():
        return "one is not multiplicatively neutral"
    if not (add == 0).any(axis=1).all():
        return "missing additive inverse"
    for x in range(n):
        if sorted(add[x].tolist()) != list(range(n)):
            return "addition is not a group law"
    if (add[add, :] != add[:, add]).any():
        return "addition not associative"
    if (mul[mul, :] != mul[:, mul]).any():
        return "multiplication not associative"
    # a*(b+c) == a*b + a*c
    left = mul[:, add]  # [a,b,c] = a*(b+c)
    ab = mul[:, :, None]
    ac = mul[:, None, :]
    right = add[np.broadcast_to(ab, left.shape), np.broadcast_to(ac, left.shape)]
    if (left != right).any():
        return "distributivity fails"
    return None


def integers_mod(n):
    if n < 2:
        raise PreconditionError("modulus must be at least 2")
    idx = np.arange(n)
    add = (idx[:, None] + idx[None, :]) % n
    mul = (idx[:, None] * idx[None, :]) % n
    return FiniteRing(add, mul, 1, name=f"Z/{n}", checked=n > FULL_CHECK_LIMIT)


# -- prime powers and polynomials over Z/p --------------------------------------


def factor_prime_power(q):
    """(p, k) with q = p**k, or None."""
    if q < 2:
        return None
    p = None
    m = q
    d = 2
    while d * d <= m:
        if m % d == 0:
            p = d
            break
        d += 1
    if p is None:
        return q, 1
    k = 0
    while m % p == 0:
        m //= p
        k += 1
    if m != 1:
        return None
    return p, k


def is_prime(n):
    return n >= 2 and factor_prime_power(n) == (n, 1)


def _poly_mod(a, m, p):
    """Remainder of ``a`` modulo monic ``m`` (coefficient lists, constant first)."""
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        c = a[-1] % p
        if c:
            shift = len(a) - 1 - dm
            for i, mc in enumerate(m):
                a[shift + i] = (a[shift + i] - c * mc) % p
        a.pop()
    return [x % p for x in a]


def _poly_mulmod(a, b, m, p):
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    return _poly_mod(prod, m, p)


def _is_irreducible(m, p):
    """True iff monic ``m`` of degree k is irreducible over Z/p.

    Uses Rabin's test: x^(p^k) = x mod m, and gcd(x^(p^(k/r)) - x, m) = 1
    for each prime r | k.
    """
    k = len(m) - 1

    def xpow(e):
        result = [1]
        base = [0, 1]
        while e:
            if e & 1:
                result = _poly_mulmod(result, base, m, p)
            base = _poly_mulmod(base, base, m, p)
            e >>= 1
        return result

    def sub_x(a):
        a = list(a) + [0] * max(0, 2 - len(a))
        a[1] = (a[1] - 1) % p
        while a and a[-1] == 0:
            a.pop()
        return a

    def gcd(a, b):
        a = [x % p for x in a]
        b = [x % p for x in b]
        while a and a[-1] == 0:
            a.pop()
        while b and b[-1] == 0:
            b.pop()
        while b:
            inv = pow(b[-1], p - 2, p)
            bm = [(x * inv) % p for x in b]
            a = _poly_mod(a, bm, p)
            while a and a[-1] == 0:
                a.pop()
            a, b = b, a
        return a

    if sub_x(xpow(p**k)):
        return False
    for r in {f for f in range(2, k + 1) if k % f == 0 and is_prime(f)}:
        g = gcd(sub_x(xpow(p ** (k // r))), m)
        if len(g) > 1:
            return False
    return True


def smallest_irreducible(p, k):
    """Lexicographically smallest monic irreducible of degree k over Z/p.

    Candidates are scanned in increasing order of the base-p integer whose
    digits are the coefficients (leading 1 first), i.e. lexicographically on
    (a_{k-1}, ..., a_0).
    """
    for code in range(p**k):
        coeffs = []
        c = code
        for _ in range(k):
            coeffs.append(c % p)
            c //= p
        m = coeffs + [1]
        if k == 1 or (m[0] != 0 and _is_irreducible(m, p)):
            return m
    raise AssertionError("no irreducible found")


def finite_field(q, bound=None):
    """Field of order q: Z/p for primes, else F_p[T]/(m) with m as above.

    Element index i encodes the residue sum(d_j T^j) where d_j are the base-p
    digits of i; so 0 and 1 keep their meaning and p is the class of T.
    """
    if bound is None:
        bound = config.RING_SIZE_BOUND
    pk = factor_prime_power(q)
    if pk is None:
        raise PreconditionError(f"{q} is not a prime power")
    if q > bound:
        raise BoundError(f"field order {q} exceeds bound {bound}")
    p, k = pk
    if k == 1:
        R = integers_mod(p)
        R.name = f"F_{q}"
        R.modulus = [0, 1]
        return R
    m = smallest_irreducible(p, k)
    digits = np.array([[(i // p**j) % p for j in range(k)] for i in range(q)], dtype=np.int64)
    if p == 2:
        idx = np.arange(q, dtype=np.int32)
        add = idx[:, None] ^ idx[None, :]
    else:
        add = np.zeros((q, q), dtype=np.int32)
        for j in range(k):
            d = digits[:, j].astype(np.int32)
            add += ((d[:, None] + d[None, :]) % p) * (p**j)
    # multiplication through discrete logs of a primitive element
    def mulpoly(i, j):
        return _poly_mulmod(list(digits[i]), list(digits[j]), m, p)

    def encode(poly):
        return sum(int(c) * p**j for j, c in enumerate(poly))

    order = q - 1
    prime_factors = [f for f in range(2, order + 1) if order % f == 0 and is_prime(f)]
    gen = None
    for cand in range(2, q):
        ok = True
        for f in prime_factors:
            # cand^(order/f) != 1
            acc = [1]
            base = list(digits[cand])
            e = order // f
            while e:
                if e & 1:
                    acc = _poly_mulmod(acc, base, m, p)
                base = _poly_mulmod(base, base, m, p)
                e >>= 1
            if encode(acc) == 1:
                ok = False
                break
        if ok:
            gen = cand
            break
    exp = np.zeros(order, dtype=np.int64)
    log = np.zeros(q, dtype=np.int64)
    cur = 1
    for e in range(order):
        exp[e] = cur
        log[cur] = e
        cur = encode(mulpoly(cur, gen))
    mul = np.zeros((q, q), dtype=np.int32)
    lg = log[1:].astype(np.int32)
    mul[1:, 1:] = exp[(lg[:, None] + lg[None, :]) % order]
    R = FiniteRing(add, mul, 1, name=f"F_{q}", checked=q > FULL_CHECK_LIMIT)
    R.modulus = m
    return R


def polynomial_quotient_ring(n, modulus):
    """(Z/n)[T]/(modulus) for a monic ``modulus`` (constant term first)."""
    if modulus[-1] != 1:
        raise PreconditionError("modulus must be monic")
    k = len(modulus) - 1
    size = n**k
    if size > FULL_CHECK_LIMIT:
        raise BoundError("polynomial quotient ring too large")
    digits = [[(i // n**j) % n for j in range(k)] for i in range(size)]

    def encode(poly):
        poly = list(poly) + [0] * (k - len(poly))
        return sum((c % n) * n**j for j, c in enumerate(poly[:k]))

    def reduce_(prod):
        prod = list(prod)
        for d in range(len(prod) - 1, k - 1, -1):
            c = prod[d]
            if c:
                for j, mc in enumerate(modulus):
                    prod[d - k + j] -= c * mc
        return [c % n for c in prod[:k]]

    add = np.zeros((size, size), dtype=np.int64)
    mul = np.zeros((size, size), dtype=np.int64)
    for i in range(size):
        for j in range(size):
            a, b = digits[i], digits[j]
            add[i, j] = encode([(x + y) % n for x, y in zip(a, b)])
            prod = [0] * (2 * k - 1)
            for s, x in enumerate(a):
                for t, y in enumerate(b):
                    prod[s + t] += x * y
            mul[i, j] = encode(reduce_(prod))
    label = "+".join(f"{c}T^{j}" for j, c in enumerate(modulus) if c)
    return FiniteRing(add, mul, 1, name=f"Z/{n}[T]/({label})")


def product_ring(factors, name=None, bound=None):
    """Componentwise product; element index is the mixed-radix code."""
    if not factors:
        raise PreconditionError("product needs at least one factor")
    if bound is None:
        bound = config.RING_SIZE_BOUND
    sizes = [F.size for F in factors]
    total = reduce(lambda a, b: a * b, sizes, 1)
    if total > bound:
        raise BoundError(f"product ring of size {total} exceeds bound {bound}")
    if len(factors) == 1:
        return factors[0]
    strides = []
    s = 1
    for size in sizes:
        strides.append(s)
        s *= size
    idx = np.arange(total)
    comps = [(idx // st) % sz for st, sz in zip(strides, sizes)]
    dtype = np.int32
    add = np.zeros((total, total), dtype=dtype)
    mul = np.zeros((total, total), dtype=dtype)
    for F, c, st in zip(factors, comps, strides):
        add += (F.add[c[:, None], c[None, :]] * st).astype(dtype)
        mul += (F.mul[c[:, None], c[None, :]] * st).astype(dtype)
    one = sum(F.one * st for F, st in zip(factors, strides))
    R = FiniteRing(add, mul, one, name=name or " x ".join(F.name or "?" for F in factors), checked=True)
    R.factors = list(factors)
    R.strides = strides
    return R


def component(R, x, v):
    return (x // R.strides[v]) % R.factors[v].size


def compose(R, parts):
    return sum(int(p) * st for p, st in zip(parts, R.strides))


def product_of_fields(qs, bound=None):
    if not qs:
        raise PreconditionError("empty list of field orders")
    fields = [finite_field(q, bound=bound) for q in qs]
    if len(fields) == 1:
        return fields[0]
    return product_ring(fields, bound=bound)


# -- unit subgroups -----------------------------------------------------------


def subgroup_closure(R, elements):
    group = {R.one}
    frontier = [R.one]
    gens = list(elements)
    while frontier:
        new = []
        for a in frontier:
            for g in gens:
                c = int(R.mul[a, g])
                if c not in group:
                    group.add(c)
                    new.append(c)
        frontier = new
    return frozenset(group)


def is_unit_subgroup(R, G):
    G = set(G)
    if R.one not in G:
        return False
    for g in G:
        if not R.is_unit(g):
            return False
        if R.inverse(g) not in G:
            return False
        for h in G:
            if int(R.mul[g, h]) not in G:
                return False
    return True


def unit_subgroups(R):
    """All subgroups of the unit group, sorted by (order, elements)."""
    units = R.units()
    found = {frozenset([R.one])}
    frontier = [frozenset([R.one])]
    while frontier:
        new = []
        for H in frontier:
            for u in units:
                if u in H:
                    continue
                K = subgroup_closure(R, list(H) + [u])
                if K not in found:
                    found.add(K)
                    new.append(K)
        frontier = new
    return sorted(found, key=lambda H: (len(H), sorted(H)))


def ring_homomorphisms(A, B, require_unital=True):
    """All unital ring homomorphisms A -> B by generator search.

    Generators of A as a ring are chosen greedily; images are searched over
    all of B with propagation through + and *.
    """
    gens = _ring_generators(A)
    results = []

    def propagate(f, new):
        queue = list(new)
        while queue:
            a = queue.pop()
            assigned = [b for b in range(A.size) if f[b] is not None]
            for b in assigned:
                for c, fc in (
                    (int(A.add[a, b]), int(B.add[f[a], f[b]])),
                    (int(A.mul[a, b]), int(B.mul[f[a], f[b]])),
                ):
                    if f[c] is None:
                        f[c] = fc
                        queue.append(c)
                    elif f[c] != fc:
                        return False
        return True

    def recurse(f, k):
        if k == len(gens):
            if all(v is not None for v in f):
                results.append(tuple(f))
            return
        g = gens[k]
        if f[g] is not None:
            recurse(f, k + 1)
            return
        for t in range(B.size):
            f2 = list(f)
            f2[g] = t
            if propagate(f2, [g]):
                recurse(f2, k + 1)

    f = [None] * A.size
    f[0] = 0
    if require_unital:
        f[A.one] = B.one
    if propagate(f, [0, A.one] if require_unital else [0]):
        recurse(f, 0)
    return results


def _ring_generators(A):
    closed = _ring_closure(A, {0, A.one})
    gens = []
    while len(closed) < A.size:
        best, best_size = None, -1
        for x in range(A.size):
            if x in closed:
                continue
            size = len(_ring_closure(A, closed | {x}))
            if size > best_size:
                best, best_size = x, size
            if best_size == A.size:
                break
        gens.append(best)
        closed = _ring_closure(A, closed | {best})
    return gens


def _ring_closure(A, elements):
    closed = set(elements)
    frontier = list(closed)
    while frontier:
        new = []
        for a in frontier:
            for b in list(closed):
                for c in (int(A.add[a, b]), int(A.mul[a, b])):
                    if c not in closed:
                        closed.add(c)
                        new.append(c)
        frontier = new
    return closed


def subfield_elements(F, q):
    """Elements x of the field F with x**q == x (the copy of F_q inside F)."""
    out = []
    for x in range(F.size):
        if F.power(x, q) == x:
            out.append(x)
    return out
