"""Finite hyperstructures: tables, set-valued arithmetic and axiom checks.

A carrier of size ``n`` is the index range ``0..n-1``.  Hyperaddition is an
``n x n`` table of nonempty subsets stored as int bitmasks; multiplication is
an ``n x n`` table of indices (absent for pure hypergroups).
"""

from dataclasses import dataclass, field

import numpy as np

from .bits import iter_bits, mask_of, members, popcount
from .errors import BudgetExhausted, StructureError

LEVELS = ("raw", "hypergroup", "kvector", "hyperring", "hyperfield")

HYPERGROUP_AXIOMS = ("commutativity", "associativity", "neutral", "inverse", "reversibility")
KVECTOR_AXIOMS = HYPERGROUP_AXIOMS + ("idempotent_sum",)
HYPERRING_AXIOMS = HYPERGROUP_AXIOMS + (
    "mul_associative",
    "mul_identity",
    "mul_commutative",
    "left_distributive",
    "right_distributive",
    "absorbing",
    "zero_ne_one",
)
HYPERFIELD_AXIOMS = HYPERRING_AXIOMS + ("units_group",)

AXIOMS_BY_LEVEL = {
    "raw": (),
    "hypergroup": HYPERGROUP_AXIOMS,
    "kvector": KVECTOR_AXIOMS,
    "hyperring": HYPERRING_AXIOMS,
    "hyperfield": HYPERFIELD_AXIOMS,
}


class HyperStructure:
    """Immutable finite hyperstructure.

    ``add[a][b]`` is the bitmask of ``a + b``; ``mul[a][b]`` the index of
    ``a * b`` or ``mul is None`` for an additive hypergroup only.  ``origin``
    optionally records how the structure was built (e.g. the ring and unit
    subgroup of a quotient) and never takes part in equality.
    """

    __slots__ = ("n", "zero", "one", "add", "mul", "commutative", "name", "origin", "_cache")

    def __init__(self, n, add, mul=None, zero=0, one=1, commutative=True, name=None, origin=None):
        if n < 1:
            raise StructureError("carrier must have at least one element")
        add = tuple(tuple(int(m) for m in row) for row in add)
        if len(add) != n or any(len(row) != n for row in add):
            raise StructureError(f"addition table must be {n}x{n}")
        limit = 1 << n
        for a, row in enumerate(add):
            for b, m in enumerate(row):
                if m <= 0 or m >= limit:
                    raise StructureError(f"add[{a}][{b}] must be a nonempty subset of the carrier")
        if mul is not None:
            mul = tuple(tuple(int(v) for v in row) for row in mul)
            if len(mul) != n or any(len(row) != n for row in mul):
                raise StructureError(f"multiplication table must be {n}x{n}")
            for a, row in enumerate(mul):
                for b, v in enumerate(row):
                    if not 0 <= v < n:
                        raise StructureError(f"mul[{a}][{b}]={v} out of range")
        if not 0 <= zero < n:
            raise StructureError("zero index out of range")
        if one is not None and not 0 <= one < n:
            raise StructureError("one index out of range")
        self.n = n
        self.zero = zero
        self.one = one
        self.add = add
        self.mul = mul
        self.commutative = commutative
        self.name = name
        self.origin = origin
        self._cache = {}

    @classmethod
    def from_sets(cls, add_sets, mul=None, **kw):
        n = len(add_sets)
        add = [[mask_of(cell) for cell in row] for row in add_sets]
        return cls(n, add, mul, **kw)

    def __eq__(self, other):
        if not isinstance(other, HyperStructure):
            return NotImplemented
        return (
            self.n == other.n
            and self.zero == other.zero
            and self.one == other.one
            and self.add == other.add
            and self.mul == other.mul
        )

    def __hash__(self):
        return hash((self.n, self.zero, self.one, self.add, self.mul))

    def __repr__(self):
        name = getattr(self, "name", None)
        label = f" {name}" if name else ""
        return f"<HyperStructure{label} n={self.n}>"

    # -- arithmetic on masks -------------------------------------------------

    def sum(self, a, b):
        return self.add[a][b]

    def sum_union(self, A, B):
        """Bitmask of ``A + B`` for bitmasks ``A`` and ``B``."""
        out = 0
        rows = self.add
        bs = list(iter_bits(B))
        for a in iter_bits(A):
            row = rows[a]
            for b in bs:
                out |= row[b]
        return out

    def product(self, a, b):
        return self.mul[a][b]

    def scale_mask(self, r, A):
        """Bitmask of ``{r * a : a in A}``."""
        row = self.mul[r]
        out = 0
        for a in iter_bits(A):
            out |= 1 << row[a]
        return out

    def mul_array(self):
        arr = self._cache.get("mul_array")
        if arr is None:
            arr = np.array(self.mul, dtype=np.int64)
            self._cache["mul_array"] = arr
        return arr

    def neg(self, x):
        return negate(x, self)

    def nonzero(self):
        return [x for x in range(self.n) if x != self.zero]

    def units(self):
        if self.mul is None or self.one is None:
            return []
        return [
            x
            for x in range(self.n)
            if any(self.mul[x][y] == self.one and self.mul[y][x] == self.one for y in range(self.n))
        ]

    @property
    def validated_level(self):
        """Highest level along raw < hypergroup < hyperring < hyperfield that passes."""
        best = "raw"
        for level in ("hypergroup", "hyperring", "hyperfield"):
            if validate(self, level).passed:
                best = level
            else:
                break
        return best

    def passes(self, level):
        return validate(self, level).passed


@dataclass
class AxiomResult:
    passed: bool
    counterexample: tuple = None
    note: str = ""


@dataclass
class ValidationReport:
    level: str
    results: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(r.passed for r in self.results.values())

    @property
    def failures(self):
        return {k: r for k, r in self.results.items() if not r.passed}

    def first_failure(self):
        for k, r in self.results.items():
            if not r.passed:
                return k, r
        return None

    def lines(self):
        out = []
        for k, r in self.results.items():
            if r.passed:
                out.append(f"{k}: pass")
            else:
                extra = f" counterexample={r.counterexample}" if r.counterexample is not None else ""
                note = f" ({r.note})" if r.note else ""
                out.append(f"{k}: FAIL{extra}{note}")
        return out


# -- set-valued sums -----------------------------------------------------------


def _check_subset(A, R):
    A = list(A)
    for a in A:
        if not isinstance(a, (int, np.integer)) or not 0 <= a < R.n:
            raise IndexError(f"element {a!r} outside carrier of size {R.n}")
    return mask_of(A)


def hyper_sum(A, B, R):
    """Set-extended sum ``A + B`` as a frozenset of carrier indices."""
    return frozenset(members(R.sum_union(_check_subset(A, R), _check_subset(B, R))))


def multiple_mask(R, x, k):
    """Bitmask of ``k x = x + ... + x`` (k >= 1 copies); ``0 x = {0}``."""
    if k == 0:
        return 1 << R.zero
    acc = 1 << x
    for _ in range(k - 1):
        acc = R.sum_union(acc, 1 << x)
    return acc


# -- axiom checks --------------------------------------------------------------


def _ok():
    return AxiomResult(True)


def _fail(cx=None, note=""):
    return AxiomResult(False, cx, note)


def _check_commutativity(R):
    for a in range(R.n):
        for b in range(a + 1, R.n):
            if R.add[a][b] != R.add[b][a]:
                return _fail((a, b))
    return _ok()


def _check_associativity(R):
    n = R.n
    for x in range(n):
        for y in range(n):
            xy = R.add[x][y]
            for z in range(n):
                left = R.sum_union(xy, 1 << z)
                right = R.sum_union(1 << x, R.add[y][z])
                if left != right:
                    return _fail((x, y, z))
    return _ok()


def _check_neutral(R):
    z = R.zero
    for x in range(R.n):
        if R.add[z][x] != 1 << x or R.add[x][z] != 1 << x:
            return _fail((x,))
    return _ok()


def _negation_table(R):
    """Map x -> unique y with 0 in x + y, or None when (4) fails somewhere."""
    zbit = 1 << R.zero
    table = []
    for x in range(R.n):
        ys = [y for y in range(R.n) if R.add[x][y] & zbit]
        if len(ys) != 1:
            return None, x
        table.append(ys[0])
    return tuple(table), None


def _check_inverse(R):
    table, bad = _negation_table(R)
    if table is None:
        return _fail((bad,), "no unique opposite")
    return _ok()


def _check_reversibility(R):
    table, _ = _negation_table(R)
    if table is None:
        return _fail(None, "requires unique opposites")
    for y in range(R.n):
        ny = table[y]
        for z in range(R.n):
            for x in iter_bits(R.add[y][z]):
                if not R.add[x][ny] >> z & 1:
                    return _fail((x, y, z))
    return _ok()


def _check_idempotent_sum(R):
    for x in range(R.n):
        if x == R.zero:
            continue
        if R.add[x][x] != (1 << R.zero) | (1 << x):
            return _fail((x,))
    return _ok()


def _no_mul():
    return _fail(None, "no multiplication")


def _check_mul_associative(R):
    if R.mul is None:
        return _no_mul()
    m = R.mul_array()
    left = m[m, :]  # left[a, b, c] = (a*b)*c
    right = m[:, m]  # right[a, b, c] = a*(b*c)
    bad = np.argwhere(left != right)
    if len(bad):
        return _fail(tuple(int(v) for v in bad[0]))
    return _ok()


def _check_mul_identity(R):
    if R.mul is None or R.one is None:
        return _no_mul()
    e = R.one
    for x in range(R.n):
        if R.mul[e][x] != x or R.mul[x][e] != x:
            return _fail((x,))
    return _ok()


def _check_mul_commutative(R):
    if R.mul is None:
        return _no_mul()
    if not R.commutative:
        return AxiomResult(True, None, "not asserted")
    for a in range(R.n):
        for b in range(a + 1, R.n):
            if R.mul[a][b] != R.mul[b][a]:
                return _fail((a, b))
    return _ok()


def _check_left_distributive(R):
    if R.mul is None:
        return _no_mul()
    for r in range(R.n):
        row = R.mul[r]
        for s in range(R.n):
            for t in range(R.n):
                if R.scale_mask(r, R.add[s][t]) != R.add[row[s]][row[t]]:
                    return _fail((r, s, t))
    return _ok()


def _check_right_distributive(R):
    if R.mul is None:
        return _no_mul()
    cols = [[R.mul[x][r] for x in range(R.n)] for r in range(R.n)]
    for r in range(R.n):
        col = cols[r]
        for s in range(R.n):
            for t in range(R.n):
                image = 0
                for u in iter_bits(R.add[s][t]):
                    image |= 1 << col[u]
                if image != R.add[col[s]][col[t]]:
                    return _fail((r, s, t))
    return _ok()


def _check_absorbing(R):
    if R.mul is None:
        return _no_mul()
    z = R.zero
    for x in range(R.n):
        if R.mul[x][z] != z or R.mul[z][x] != z:
            return _fail((x,))
    return _ok()


def _check_zero_ne_one(R):
    if R.one is None:
        return _no_mul()
    if R.zero == R.one:
        return _fail((R.zero,))
    return _ok()


def _check_units_group(R):
    if R.mul is None or R.one is None:
        return _no_mul()
    nz = R.nonzero()
    for a in nz:
        for b in nz:
            if R.mul[a][b] == R.zero:
                return _fail((a, b), "zero divisor")
    for a in nz:
        if not any(R.mul[a][b] == R.one and R.mul[b][a] == R.one for b in nz):
            return _fail((a,), "no inverse")
    return _ok()


_CHECKS = {
    "commutativity": _check_commutativity,
    "associativity": _check_associativity,
    "neutral": _check_neutral,
    "inverse": _check_inverse,
    "reversibility": _check_reversibility,
    "idempotent_sum": _check_idempotent_sum,
    "mul_associative": _check_mul_associative,
    "mul_identity": _check_mul_identity,
    "mul_commutative": _check_mul_commutative,
    "left_distributive": _check_left_distributive,
    "right_distributive": _check_right_distributive,
    "absorbing": _check_absorbing,
    "zero_ne_one": _check_zero_ne_one,
    "units_group": _check_units_group,
}


def validate(R, level="hyperfield"):
    """Check the axioms of ``level`` and return a ValidationReport.

    Levels are cumulative along hypergroup < hyperring < hyperfield;
    ``kvector`` is hypergroup plus ``x + x = {0, x}``.  Failures are report
    content, never exceptions.
    """
    if level not in AXIOMS_BY_LEVEL:
        raise ValueError(f"unknown level {level!r}")
    cache = R._cache
    report = ValidationReport(level)
    for axiom in AXIOMS_BY_LEVEL[level]:
        key = ("axiom", axiom)
        if key not in cache:
            cache[key] = _CHECKS[axiom](R)
        report.results[axiom] = cache[key]
    return report


def require(R, level):
    report = validate(R, level)
    if not report.passed:
        name, res = report.first_failure()
        raise StructureError(f"structure fails {level} level: {name} counterexample={res.counterexample}")
    return report


# -- negation and element orders ----------------------------------------------


def negation_table(R):
    require(R, "hypergroup")
    table, _ = _negation_table(R)
    return table


def negate(x, R):
    """The unique ``y`` with ``0 in x + y``."""
    if not 0 <= x < R.n:
        raise IndexError(f"element {x} outside carrier of size {R.n}")
    return negation_table(R)[x]


@dataclass(frozen=True)
class ElementOrder:
    principal: object  # positive int or math.inf
    secondary: int = None

    def as_tuple(self):
        return (self.principal, self.secondary)


def element_order(x, R):
    """Principal and secondary order of ``x`` by fixpoint iteration of sums.

    ``O(x) = {r : exists n, 0 in r x + n (x - x)}``; the sets ``n (x - x)``
    grow monotonically (they contain 0) and ``r x`` is eventually periodic,
    so both stabilise within the carrier-size-squared step cap.
    """
    import math

    if not 0 <= x < R.n:
        raise IndexError(f"element {x} outside carrier of size {R.n}")
    neg = negation_table(R)
    zbit = 1 << R.zero
    cap = R.n * R.n + 1
    diff = R.add[x][neg[x]]
    # D_n = n (x - x); increasing, stabilises
    d = zbit
    d_steps = [d]
    for _ in range(cap):
        nxt = R.sum_union(d, diff)
        if nxt == d:
            break
        d = nxt
        d_steps.append(d)
    d_inf = d

    multiples = _eventual_multiples(R, x, cap)
    h = None
    for r, mr in multiples:
        if R.sum_union(mr, d_inf) & zbit:
            h = r
            break
    if h is None:
        return ElementOrder(math.inf, None)
    hx = _eventual_multiples(R, x, cap, step=h)
    for s, ds in enumerate(d_steps):
        if any(R.sum_union(m, ds) & zbit for _, m in hx):
            return ElementOrder(h, s)
    # d_steps exhausted means D stabilised; the membership above already failed
    return ElementOrder(h, None)


def _eventual_multiples(R, x, cap, step=1):
    """Pairs (r, r*step*x) for r >= 1 covering the pre-period and one period."""
    base = multiple_mask(R, x, step)
    seen = {}
    out = []
    cur = base
    r = 1
    while cur not in seen and r <= cap:
        seen[cur] = r
        out.append((r * step, cur))
        cur = R.sum_union(cur, base)
        r += 1
    return out


# -- map search shared by isomorphism and homomorphism enumeration ------------


def monoid_generators(R):
    """Greedy small generating set of the multiplicative monoid (0, 1 implicit)."""
    n = R.n
    start = {R.zero, R.one}
    closed = _closure(R, start)
    gens = []
    while len(closed) < n:
        best = None
        best_size = -1
        for x in range(n):
            if x in closed:
                continue
            size = len(_closure(R, closed | {x}))
            if size > best_size:
                best, best_size = x, size
        gens.append(best)
        closed = _closure(R, closed | {best})
    return gens


def _closure(R, elements):
    closed = set(elements)
    frontier = list(closed)
    while frontier:
        new = []
        for a in frontier:
            for b in list(closed):
                for c in (R.mul[a][b], R.mul[b][a]):
                    if c not in closed:
                        closed.add(c)
                        new.append(c)
        frontier = new
    return closed


def _power_profile(R, x):
    seen = {}
    cur = x
    k = 1
    while cur not in seen:
        seen[cur] = k
        cur = R.mul[cur][x]
        k += 1
    tail = seen[cur] - 1
    period = k - seen[cur]
    return tail, period


def element_signature(R, x):
    """Isomorphism-invariant fingerprint of ``x`` (0 and 1 are fixed)."""
    sizes = sorted(popcount(R.add[x][y]) for y in range(R.n))
    return (
        x == R.zero,
        x == R.one,
        _power_profile(R, x),
        popcount(R.add[x][x]),
        popcount(R.add[x][R.one]),
        bool(R.add[x][R.one] >> x & 1),
        tuple(sizes),
    )


class _MapSearch:
    def __init__(self, R1, R2, injective, exact, budget, candidates):
        self.R1, self.R2 = R1, R2
        self.injective = injective
        self.exact = exact
        self.budget = budget
        self.nodes = 0
        self.candidates = candidates
        self.results = []

    def propagate(self, f, used, new):
        R1, R2 = self.R1, self.R2
        queue = list(new)
        while queue:
            a = queue.pop()
            fa = f[a]
            assigned = [b for b in range(R1.n) if f[b] is not None]
            for b in assigned:
                fb = f[b]
                for c, fc in ((R1.mul[a][b], R2.mul[fa][fb]), (R1.mul[b][a], R2.mul[fb][fa])):
                    cur = f[c]
                    if cur is None:
                        if self.injective and fc in used:
                            return False
                        f[c] = fc
                        used.add(fc)
                        queue.append(c)
                    elif cur != fc:
                        return False
        return True

    def additive_ok(self, f, full):
        R1, R2 = self.R1, self.R2
        assigned_mask = 0
        for a in range(R1.n):
            if f[a] is not None:
                assigned_mask |= 1 << a
        idx = [a for a in range(R1.n) if f[a] is not None]
        for i, a in enumerate(idx):
            for b in idx[i:]:
                s = R1.add[a][b]
                if not full and s & ~assigned_mask:
                    continue
                image = 0
                for c in iter_bits(s):
                    image |= 1 << f[c]
                target = R2.add[f[a]][f[b]]
                if self.exact:
                    if image != target:
                        return False
                elif image & ~target:
                    return False
        return True

    def run(self, gens, first_only):
        f = [None] * self.R1.n
        f[self.R1.zero] = self.R2.zero
        f[self.R1.one] = self.R2.one
        used = {self.R2.zero, self.R2.one}
        if not self.propagate(f, used, [self.R1.zero, self.R1.one]):
            return
        self._recurse(f, used, gens, 0, first_only)

    def _recurse(self, f, used, gens, k, first_only):
        if first_only and self.results:
            return
        if k == len(gens):
            if all(v is not None for v in f) and self.additive_ok(f, True):
                self.results.append(tuple(f))
            return
        g = gens[k]
        if f[g] is not None:
            self._recurse(f, used, gens, k + 1, first_only)
            return
        for t in self.candidates(g):
            if self.injective and t in used:
                continue
            self.nodes += 1
            if self.budget is not None and self.nodes > self.budget:
                raise BudgetExhausted(f"map search exceeded {self.budget} nodes", list(self.results))
            f2 = list(f)
            used2 = set(used)
            f2[g] = t
            used2.add(t)
            if self.propagate(f2, used2, [g]) and self.additive_ok(f2, False):
                self._recurse(f2, used2, gens, k + 1, first_only)
                if first_only and self.results:
                    return


def search_maps(R1, R2, *, injective, exact, first_only=False, budget=None, candidates=None):
    """All maps fixing 0 and 1, multiplicative, with f(a+b) ⊆ (or =) f(a)+f(b)."""
    if R1.mul is None or R2.mul is None:
        raise StructureError("map search needs multiplication on both sides")
    if candidates is None:
        targets = list(range(R2.n))

        def candidates(g):
            return targets

    search = _MapSearch(R1, R2, injective, exact, budget, candidates)
    search.run(monoid_generators(R1), first_only)
    return search.results, search.nodes


def is_isomorphic(R1, R2):
    """A bijection R1 -> R2 fixing 0, 1, multiplicative and additive, or None.

    Candidate images are pruned by ``element_signature``; the search is
    deterministic (first solution in canonical candidate order).
    """
    if R1.n != R2.n or R1.mul is None or R2.mul is None:
        return None
    require(R1, "hyperring")
    require(R2, "hyperring")
    sig1 = [element_signature(R1, x) for x in range(R1.n)]
    sig2 = [element_signature(R2, x) for x in range(R2.n)]
    if sorted(sig1) != sorted(sig2):
        return None
    by_sig = {}
    for y, s in enumerate(sig2):
        by_sig.setdefault(s, []).append(y)

    def candidates(g):
        return by_sig.get(sig1[g], [])

    found, _ = search_maps(R1, R2, injective=True, exact=True, first_only=True, candidates=candidates)
    return list(found[0]) if found else None


def relabel(R, perm, name=None):
    """Transport ``R`` along the bijection ``perm`` (old index -> new index)."""
    n = R.n
    inv = [0] * n
    for old, new in enumerate(perm):
        inv[new] = old
    add = []
    for a in range(n):
        row = []
        for b in range(n):
            m = R.add[inv[a]][inv[b]]
            row.append(mask_of(perm[c] for c in iter_bits(m)))
        add.append(row)
    mul = None
    if R.mul is not None:
        mul = [[perm[R.mul[inv[a]][inv[b]]] for b in range(n)] for a in range(n)]
    one = perm[R.one] if R.one is not None else None
    return HyperStructure(
        n, add, mul, zero=perm[R.zero], one=one, commutative=R.commutative, name=name or R.name
    )


def add_sets(R):
    """Addition table as nested lists of sorted index lists."""
    return [[members(m) for m in row] for row in R.add]
