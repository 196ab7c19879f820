"""Isomorph-free enumeration of small hyperfield extensions of K and S, with
labels for the three possible kinds of K-extension."""

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

from . import config
from .bits import iter_bits, mask_of, members
from .constructions import (
    AbelianGroupSpec,
    PointedGroup,
    abelian_group_specs,
    contains_K,
    contains_S,
    field_quotient,
    lyndon_extension,
    spec_of_group,
)
from .core import is_isomorphic, validate
from .errors import BoundError, PreconditionError, StructureError
from .geometry import _assemble, geometry_of, is_desarguesian, rebuild_addition_from_relation
from .homs import k_dimension

LABELS = ("lyndon", "field_quotient", "non_desarguesian_plane", "unknown")


@dataclass
class ClassificationEntry:
    structure: object = field(repr=False)
    label: str
    group: AbelianGroupSpec
    witness: object = None  # group spec, (q, m), or a plane description

    def describe(self):
        if self.label == "lyndon":
            return f"K[{self.group}]"
        if self.label == "field_quotient":
            q, m = self.witness
            return f"F_{q**m}/F_{q}^x"
        return f"{self.label} on {self.group}"


# -- translation-invariant line partitions -------------------------------------------


def _line_partitions(group):
    """Partitions of H - {1} into blocks of equal size >= 3 such that for every
    block B and y in B, y^{-1} (B ∪ {1}) - {1} is again a block.

    These are exactly the lines through 1 of an H-invariant linear space with
    lines of at least four points.
    """
    one = group.one
    elems = [x for x in group.nonzero if x != one]
    m = len(elems)
    inv = group.inverse
    out = []
    for size in range(3, m + 1):
        if m % size:
            continue
        block_of = {}

        def forced(B):
            # translates of the line B ∪ {1} that pass through 1
            line = B | {one}
            res = []
            for y in B:
                yi = inv[y]
                res.append(frozenset(group.mul[yi][z] for z in line) - {one})
            return res

        def place(blocks, B):
            """Add B and everything it forces; None on conflict."""
            added = []
            queue = [B]
            while queue:
                C = queue.pop()
                if len(C) != size:
                    return None, added
                existing = {block_of.get(z) for z in C}
                if existing == {C}:
                    continue
                if existing != {None}:
                    return None, added
                for z in C:
                    block_of[z] = C
                added.append(C)
                queue.extend(forced(C))
            return True, added

        def undo(added):
            for C in added:
                for z in C:
                    block_of.pop(z, None)

        def recurse():
            free = [x for x in elems if x not in block_of]
            if not free:
                out.append(frozenset(set(block_of.values())))
                return
            y = free[0]
            for rest in combinations(free[1:], size - 1):
                B = frozenset((y,) + rest)
                ok, added = place(None, B)
                if ok:
                    recurse()
                undo(added)

        recurse()
    return out


def _partition_classes(group, blocks):
    return [frozenset({group.zero, group.one})] + [frozenset(b) for b in blocks]


def _extensions_for_group(spec):
    group = PointedGroup.from_spec(spec)
    found = []
    for blocks in sorted(_line_partitions(group), key=lambda bs: sorted(sorted(b) for b in bs)):
        try:
            R = rebuild_addition_from_relation(group, _partition_classes(group, blocks))
        except (PreconditionError, StructureError):
            continue
        if not any(_same(R, S) for S in found):
            found.append(R)
    return spec, found


def _same(R1, R2):
    return is_isomorphic(R1, R2) is not None


def _raw_extensions_for_group(spec):
    """Oracle: every equivalence relation with {0,1} as a class, assembled
    into x + y = x s(y/x) and validated, with no further preconditions."""
    group = PointedGroup.from_spec(spec)
    one = group.one
    rest = [x for x in group.nonzero if x != one]
    found = []
    for blocks in _set_partitions(rest):
        cls = [0] * group.n
        cls[group.zero] = cls[one] = mask_of((group.zero, one))
        for b in blocks:
            m = mask_of(b)
            for x in b:
                cls[x] = m
        s = [cls[x] & ~(1 << x) for x in range(group.n)]
        s[one] = cls[one]
        if not all(s):
            continue  # an empty sum is never allowed
        R = _assemble(group, s, "raw candidate")
        if validate(R, "hyperfield").passed and not any(_same(R, S) for S in found):
            found.append(R)
    return spec, found


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


def _run(worker, specs, jobs):
    if jobs and jobs > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(worker, specs))
    else:
        results = [worker(s) for s in specs]
    # deterministic merge: the order of specs, whatever finished first
    order = {s.factors: i for i, s in enumerate(specs)}
    return sorted(results, key=lambda r: order[r[0].factors])


def enumerate_K_extensions(n, strategy="lines", jobs=1, bound=None, label=True):
    """Hyperfield extensions of K with n elements, up to isomorphism.

    Only commutative extensions are produced (abelian multiplicative group).
    """
    bound = config.env_bound(config.K_EXTENSION_BOUND) if bound is None else bound
    if n < 3:
        raise PreconditionError("extensions of K have at least three elements")
    if n > bound:
        raise BoundError(f"n = {n} exceeds the bound {bound}")
    worker = {"lines": _extensions_for_group, "raw": _raw_extensions_for_group}.get(strategy)
    if worker is None:
        raise ValueError(f"unknown strategy {strategy!r}")
    specs = abelian_group_specs(n - 1)
    entries = []
    for spec, structures in _run(worker, specs, jobs):
        for R in structures:
            R.name = f"ext{n}.{len(entries)}"
            if not contains_K(R):
                raise StructureError(f"{R.name} does not contain K")
            entries.append(label_extension(R, spec) if label else ClassificationEntry(R, "unknown", spec))
    return entries


def label_extension(R, spec=None):
    """Label a hyperfield extension of K by the trichotomy, with a witness."""
    if spec is None:
        spec = spec_of_group(PointedGroup.from_structure(R))
    dim = k_dimension(R)
    if dim <= 2:
        L = lyndon_extension(spec, "plain")
        if _same(R, L):
            return ClassificationEntry(R, "lyndon", spec, spec)
        warnings.warn(f"single-line extension on {spec} is not K[H]", stacklevel=2)
        return ClassificationEntry(R, "unknown", spec, None)
    G = geometry_of(R)
    verdict = is_desarguesian(G)
    if verdict == "no":
        return ClassificationEntry(R, "non_desarguesian_plane", spec, (len(G.points), len(G.lines)))
    line = len(G.lines[0])
    q = line - 1
    order = len(G.points)
    for m in range(2, 64):
        size = (q**m - 1) // (q - 1)
        if size > order:
            break
        if size == order:
            try:
                F = field_quotient(q, m)
            except Exception:
                break
            if _same(R, F):
                return ClassificationEntry(R, "field_quotient", spec, (q, m))
    warnings.warn(f"Desarguesian extension on {spec} matches no field quotient", stacklevel=2)
    return ClassificationEntry(R, "unknown", spec, None)


# -- extensions of S ---------------------------------------------------------------


def _involutions(group):
    return [x for x in group.nonzero if x != group.one and group.mul[x][x] == group.one]


def _s_rows_search(group, eps):
    """All homogeneous additions containing S on a pointed group, with
    ``eps`` playing -1, found through the rows s(x) = x + 1.

    Pruning uses consequences of the axioms:
      s(t) = t s(1/t)                 (commutativity)
      s(s(x)) = s(x)                  (associativity with 1 + 1 = 1)
      z in s(x)  =>  1/z in s(eps x / z)   (reversibility)
      0 in s(x) only for x = eps; x not in s(x) unless x = +-1
    Rows are assigned along chains: members of a row are assigned next.
    """
    n, zero, one = group.n, group.zero, group.one
    mul, inv = group.mul, group.inverse
    s = [None] * n
    s[zero] = 1 << one
    s[one] = 1 << one
    s[eps] = mask_of((eps, zero, one))
    found = []

    def scale(a, mask):
        row = mul[a]
        return mask_of(row[z] for z in iter_bits(mask))

    def consistent():
        for x in range(n):
            sx = s[x]
            if sx is None:
                continue
            if x not in (zero, one, eps):
                if sx >> zero & 1 or sx >> x & 1 or not sx:
                    return False
            if x != zero:
                xi = inv[x]
                partner = s[xi]
                if partner is not None and scale(x, partner) != sx:
                    return False
            union = 0
            complete = True
            for y in iter_bits(sx):
                if s[y] is None:
                    complete = False
                    continue
                if s[y] & ~sx:
                    return False
                union |= s[y]
            if complete and union != sx:
                return False
            if x != zero:
                ex = mul[eps][x]
                for z in iter_bits(sx):
                    if z == zero:
                        continue
                    target = mul[ex][inv[z]]
                    if s[target] is not None and not s[target] >> inv[z] & 1:
                        return False
        return True

    def next_free():
        # follow the chain: an unassigned member of an assigned row first
        for x in range(n):
            if s[x] is not None:
                for y in iter_bits(s[x]):
                    if s[y] is None:
                        return y
        for x in range(n):
            if s[x] is None:
                return x
        return None

    def recurse():
        x = next_free()
        if x is None:
            R = _assemble(group, s, "sign candidate")
            if validate(R, "hyperfield").passed and contains_S(R):
                found.append(R)
            return
        # candidate rows: within the smallest assigned row containing x, if any
        universe = (1 << n) - 1
        for y in range(n):
            if s[y] is not None and s[y] >> x & 1:
                universe &= s[y]
        universe &= ~((1 << zero) | (1 << x))
        xi = inv[x]
        pool = members(universe)
        for r in range(1, len(pool) + 1):
            for choice in combinations(pool, r):
                row = mask_of(choice)
                s[x] = row
                forced = s[xi] is None and xi != x
                if forced:
                    s[xi] = scale(xi, row)
                if consistent():
                    recurse()
                if forced:
                    s[xi] = None
                s[x] = None

    if consistent():
        recurse()
    return found


def _s_worker(spec):
    group = PointedGroup.from_spec(spec)
    found = []
    for eps in _involutions(group):
        for R in _s_rows_search(group, eps):
            if not any(_same(R, S) for S in found):
                found.append(R)
    return spec, found


def enumerate_S_extensions(n, jobs=1, bound=None):
    """Hyperfield extensions of S with n elements.  Expected to be empty; a
    nonempty result is reported loudly."""
    bound = config.env_bound(config.S_EXTENSION_BOUND) if bound is None else bound
    if n <= 3:
        raise PreconditionError("n must exceed 3: S itself is not a proper extension")
    if n > bound:
        raise BoundError(f"n = {n} exceeds the bound {bound}")
    specs = abelian_group_specs(n - 1)
    out = []
    for spec, structures in _run(_s_worker, specs, jobs):
        out.extend(structures)
    if out:
        warnings.warn(f"found {len(out)} finite extensions of S with {n} elements", stacklevel=2)
    return out


# -- dimension two ------------------------------------------------------------------


def _unit_group(R):
    units = R.units()
    mul = [[0] * (len(units) + 1) for _ in range(len(units) + 1)]
    index = {u: i + 1 for i, u in enumerate(units)}
    for u in units:
        for v in units:
            mul[index[u]][index[v]] = index[R.mul[u][v]]
    return PointedGroup(len(units) + 1, mul, 0, index[R.one])


def classify_dimension2(R):
    """Match R against K[H], K[H]^(1), K[H]^(2); returns (variant, spec)."""
    if not contains_K(R):
        raise PreconditionError("R does not contain K")
    dim = k_dimension(R)
    if dim != 2:
        raise PreconditionError(f"K-dimension is {dim}, not 2", witness=dim)
    spec = spec_of_group(_unit_group(R))
    for variant in ("plain", "nilpotent", "idempotent_pair"):
        try:
            L = lyndon_extension(spec, variant)
        except PreconditionError:
            continue
        if L.n == R.n and _same(R, L):
            return variant, spec
    raise StructureError(f"no presentation K[H]^(j) matches, H = {spec}")


def classification_table(n, entries):
    """Plain text lines for a classification run."""
    lines = [f"n = {n}: {len(entries)} structures"]
    for e in entries:
        lines.append(f"  {e.describe():<24} group {e.group}  label {e.label}")
    return lines
