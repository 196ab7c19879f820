"""Hyperideals, prime ideals, homomorphisms to K and S, radicals and exact
sign evaluation of integer polynomials."""

import math
from fractions import Fraction

import numpy as np

from . import config
from .bits import full_mask, iter_bits, mask_of, members
from .constructions import S_INDEX, builtin
from .core import HyperStructure, require, search_maps
from .errors import BoundError, PreconditionError, StructureError
from .rings import FiniteRing

# Works on anything exposing n, zero, one, sum_union(maskA, maskB), mul_array(),
# neg(x): explicit HyperStructures and the lazy QuotientHyperring alike.


def _carrier(R):
    if isinstance(R, FiniteRing):
        return _RingView(R)
    return R


class _RingView:
    """A FiniteRing seen through the hyperstructure mask interface."""

    def __init__(self, R):
        self.ring = R
        self.n = R.size
        self.zero = 0
        self.one = R.one

    def sum_union(self, A, B):
        a = np.array(members(A), dtype=np.int64)
        b = np.array(members(B), dtype=np.int64)
        if not len(a) or not len(b):
            return 0
        return _mask_from_indices(self.ring.add[a[:, None], b[None, :]].ravel(), self.n)

    def mul_array(self):
        return self.ring.mul

    def neg(self, x):
        return int(self.ring.neg[x])


def _mask_from_indices(idx, n):
    flags = np.zeros(n, dtype=bool)
    flags[np.asarray(idx)] = True
    return int.from_bytes(np.packbits(flags, bitorder="little").tobytes(), "little")


def _flags(mask, n):
    raw = mask.to_bytes((n + 7) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:n].astype(bool)


def _units(R):
    M = np.asarray(R.mul_array())
    return np.nonzero((M == R.one).any(axis=1))[0]


def _scale_all(R, I):
    """Mask of R * I."""
    M = np.asarray(R.mul_array())
    idx = np.array(members(I), dtype=np.int64)
    return _mask_from_indices(M[:, idx].ravel(), R.n)


def _neg_mask(R, I):
    return mask_of(R.neg(x) for x in iter_bits(I))


def ideal_closure(R, seed):
    """Smallest hyperideal containing the elements of mask ``seed``."""
    R = _carrier(R)
    I = seed | (1 << R.zero)
    while True:
        J = I | _scale_all(R, I)
        J |= R.sum_union(J, _neg_mask(R, J))
        if J == I:
            return I
        I = J


def is_ideal(R, I):
    """Check the ideal conditions on a mask directly."""
    R = _carrier(R)
    if not I:
        return False
    if _scale_all(R, I) & ~I:
        return False
    return not (R.sum_union(I, _neg_mask(R, I)) & ~I)


def _sort_key(mask):
    return (bin(mask).count("1"), members(mask))


def _check_input(R):
    if isinstance(R, HyperStructure):
        require(R, "hyperring")
    n = R.size if isinstance(R, FiniteRing) else R.n
    if n > config.IDEAL_SCAN_BOUND:
        raise BoundError(f"carrier of size {n} exceeds the ideal enumeration bound")


def _ideal_masks(R):
    cache = getattr(R, "_cache", None)
    if cache is not None and "ideal_masks" in cache:
        return cache["ideal_masks"]
    _check_input(R)
    V = _carrier(R)
    M = np.asarray(V.mul_array())
    # principal ideals only depend on the unit orbit of the generator
    units = _units(V)
    seen = np.zeros(V.n, dtype=bool)
    seeds = []
    for x in range(V.n):
        if seen[x]:
            continue
        seen[M[units, x]] = True
        seeds.append(x)
    principal = {ideal_closure(V, 1 << x) for x in seeds}
    ideals = set(principal)
    frontier = list(principal)
    while frontier:
        new = []
        for I in frontier:
            for J in list(ideals):
                if I | J == I or I | J == J:
                    continue
                K = ideal_closure(V, I | J)
                if K not in ideals:
                    ideals.add(K)
                    new.append(K)
        frontier = new
    out = sorted(ideals, key=_sort_key)
    if cache is not None:
        cache["ideal_masks"] = out
    return out


def enumerate_ideals(R):
    """All hyperideals of R, generated as joins of principal closures, sorted
    by size then elements."""
    return [frozenset(members(I)) for I in _ideal_masks(R)]


def enumerate_ideals_by_scan(R):
    """Raw 2^n subset scan; an independent oracle for small carriers."""
    V = _carrier(R)
    if V.n > 16:
        raise BoundError("subset scan limited to 16 elements")
    out = [m for m in range(1, 1 << V.n) if m >> V.zero & 1 and is_ideal(V, m)]
    return [frozenset(members(I)) for I in sorted(out, key=_sort_key)]


def is_prime_mask(R, I):
    V = _carrier(R)
    if I == full_mask(V.n):
        return False
    comp = np.nonzero(~_flags(I, V.n))[0]
    M = np.asarray(V.mul_array())
    prods = M[np.ix_(comp, comp)]
    return not _flags(I, V.n)[prods].any()


def enumerate_prime_ideals(R):
    """Ideals I != R with ab in I implying a in I or b in I.

    The zero ideal of a hyperfield counts: its complement is multiplicative.
    """
    return [frozenset(members(I)) for I in _ideal_masks(R) if is_prime_mask(R, I)]


# -- homs to K and S -----------------------------------------------------------


def _as_explicit(R):
    if isinstance(R, FiniteRing):
        return R.as_hyperstructure()
    if not isinstance(R, HyperStructure):
        return R.to_structure()
    return R


def is_hom(R1, R2, f):
    """f(0)=0, f(1)=1, multiplicative, and f(a+b) ⊆ f(a)+f(b)."""
    if f[R1.zero] != R2.zero or f[R1.one] != R2.one:
        return False
    n = R1.n
    for a in range(n):
        for b in range(n):
            if f[R1.mul[a][b]] != R2.mul[f[a]][f[b]]:
                return False
            image = mask_of(f[c] for c in iter_bits(R1.add[a][b]))
            if image & ~R2.add[f[a]][f[b]]:
                return False
    return True


def spec_hom_bijection(R):
    """Pair each prime p with phi_p (0 on p, 1 off p) and check that this
    is inverse to taking kernels of the independently enumerated homs to K.

    Returns a list of (prime, hom) pairs, sorted by prime.
    """
    E = _as_explicit(R)
    require(E, "hyperring")
    K = builtin("K")
    primes = enumerate_prime_ideals(E)
    from_primes = {}
    for p in primes:
        phi = tuple(0 if x in p else 1 for x in range(E.n))
        if not is_hom(E, K, phi):
            raise StructureError(f"phi_p for prime {sorted(p)} is not a homomorphism")
        from_primes[p] = phi
    homs, _ = search_maps(E, K, injective=False, exact=False, budget=config.HOM_SEARCH_BUDGET)
    kernels = {}
    for f in homs:
        kernel = frozenset(x for x in range(E.n) if f[x] == 0)
        if kernel in kernels:
            raise StructureError("two homs to K share a kernel")
        kernels[kernel] = f
    if set(kernels) != set(from_primes):
        missing = set(from_primes) ^ set(kernels)
        raise StructureError(f"primes and hom kernels disagree on {[sorted(m) for m in missing]}")
    for p, phi in from_primes.items():
        if kernels[p] != phi:
            raise StructureError(f"hom with kernel {sorted(p)} differs from phi_p")
    return [(p, from_primes[p]) for p in sorted(from_primes, key=lambda s: (len(s), sorted(s)))]


def is_symmetric_cone(R, P):
    """Check the cone conditions for a mask ``P`` of a FiniteRing."""
    n = R.size
    if P >> 0 & 1:
        return False
    inside = _flags(P, n)
    pin = np.nonzero(inside)[0]
    pout = np.nonzero(~inside)[0]
    if not len(pin):
        return False
    if not inside[R.add[np.ix_(pin, pin)]].all():
        return False
    if not inside[R.mul[np.ix_(pin, pin)]].all():
        return False
    if inside[R.add[np.ix_(pout, pout)]].any():
        return False
    # a in P and ab in P imply b in P
    ab = inside[R.mul[np.ix_(pin, pout)]]
    if ab.any():
        return False
    diffs = R.add[pin[:, None], R.neg[pin][None, :]]
    return np.unique(diffs).size == n


def cone_to_sign_hom(R, P):
    """rho(x) = 1 on P, -1 on -P, 0 elsewhere, as S carrier indices."""
    inside = _flags(P, R.size)
    out = []
    for x in range(R.size):
        if inside[x]:
            out.append(S_INDEX[1])
        elif inside[R.neg[x]]:
            out.append(S_INDEX[-1])
        else:
            out.append(S_INDEX[0])
    return tuple(out)


CONE_SCAN_BOUND = 16


def homs_to_sign(R):
    """Homs R -> S paired with their symmetric cones.

    Cones come from a full subset scan; homs come from the map search; the
    two lists must correspond.  Finite rings of positive characteristic give
    an empty list.
    """
    if R.size > CONE_SCAN_BOUND:
        raise BoundError(f"cone scan limited to rings of size {CONE_SCAN_BOUND}")
    cones = [P for P in range(1, 1 << R.size) if is_symmetric_cone(R, P)]
    S = builtin("S")
    E = R.as_hyperstructure()
    from_cones = {}
    for P in cones:
        rho = cone_to_sign_hom(R, P)
        if not is_hom(E, S, rho):
            raise StructureError(f"cone {members(P)} does not give a homomorphism")
        from_cones[rho] = P
    homs, _ = search_maps(E, S, injective=False, exact=False, budget=config.HOM_SEARCH_BUDGET)
    for f in homs:
        P = mask_of(x for x in range(R.size) if f[x] == S_INDEX[1])
        if not is_symmetric_cone(R, P) or from_cones.get(tuple(f)) != P:
            raise StructureError(f"hom {f} to S has no matching cone")
    if len(homs) != len(from_cones):
        raise StructureError("cone-derived maps missing from the hom enumeration")
    return [(rho, frozenset(members(P))) for rho, P in sorted(from_cones.items())]


# -- infinity radical ------------------------------------------------------------


def _power_cycle(M, x):
    seen = {}
    seq = []
    cur = x
    while cur not in seen:
        seen[cur] = len(seq)
        seq.append(cur)
        cur = int(M[cur, x])
    return seq[seen[cur]:]


def infinity_radical(R, J):
    """Elements whose powers eventually cycle inside the ideal J."""
    V = _carrier(R)
    Jm = mask_of(J)
    if not is_ideal(V, Jm):
        raise PreconditionError("J is not an ideal", witness=sorted(J))
    M = np.asarray(V.mul_array())
    out = frozenset(x for x in range(V.n) if all(Jm >> c & 1 for c in _power_cycle(M, x)))
    if not is_ideal(V, mask_of(out)):
        raise StructureError("infinity radical failed the ideal check")
    return out


# -- exact signs ----------------------------------------------------------------


def _sign(v):
    return (v > 0) - (v < 0)


def _trim(coeffs):
    c = [int(a) for a in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return c


def sign_at(P, lam):
    """Sign of P(lam) for an integer polynomial (constant term first).

    ``lam`` is a rational or +/- infinity.
    """
    c = _trim(P)
    if not c:
        return 0
    if isinstance(lam, float) and math.isinf(lam):
        deg = len(c) - 1
        s = _sign(c[-1])
        return s if lam > 0 or deg % 2 == 0 else -s
    lam = Fraction(lam)
    a, b = lam.numerator, lam.denominator
    deg = len(c) - 1
    # b^deg P(a/b), and b > 0
    total = sum(ci * a**i * b ** (deg - i) for i, ci in enumerate(c))
    return _sign(total)


def sign_at_pm(P, lam, side):
    """Sign of P(lam + eps) (side "plus") or P(lam - eps) (side "minus")."""
    if side not in ("plus", "minus"):
        raise ValueError("side must be 'plus' or 'minus'")
    c = _trim(P)
    if not c:
        raise PreconditionError("the zero polynomial has no one-sided sign")
    if isinstance(lam, float) and math.isinf(lam):
        return sign_at(c, lam)
    lam = Fraction(lam)
    q = [Fraction(a) for a in c]
    k = 0
    while True:
        # synthetic division by (T - lam), highest degree first
        rem = Fraction(0)
        quotient = []
        for a in reversed(q):
            rem = rem * lam + a
            quotient.append(rem)
        if rem != 0:
            break
        quotient.pop()
        q = list(reversed(quotient))
        k += 1
    value = sum(a * lam**i for i, a in enumerate(q))
    s = _sign(value)
    return s if side == "plus" or k % 2 == 0 else -s
