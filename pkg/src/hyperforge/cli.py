"""Command line interface.

Exit codes: 0 success, 1 the mathematics disagreed (a claimed structure
fails its axioms, a precondition or verification failed), 2 usage errors
(bad arguments, unreadable or malformed input).
"""

import argparse
import os
import sys

from . import config
from .classification import (
    classification_table,
    classify_dimension2,
    enumerate_K_extensions,
    enumerate_S_extensions,
)
from .constructions import (
    AbelianGroupSpec,
    PointedGroup,
    builtin,
    field_quotient,
    lyndon_extension,
    quotient_by_subgroup,
)
from .core import validate
from .errors import BoundError, BudgetExhausted, HyperforgeError, LiftError, PreconditionError, StructureError
from .geometry import (
    canonical_relation,
    check_projective_axioms,
    difference_set_search,
    equivalence_class,
    geometry_of,
    incidence_group_check,
    is_desarguesian,
    plane_from_difference_set,
    rebuild_addition_from_relation,
    relation_family,
    relations_commute,
)
from .homs import enumerate_homs, lift_hom
from .ideals import enumerate_ideals, enumerate_prime_ideals, spec_hom_bijection
from .io import StructureParseError, emit_geometry, emit_structure, read_geometry, read_structure
from .rings import finite_field, integers_mod, product_of_fields
from .sandbox import (
    PlaceSystem,
    build_semilocal,
    check_groupoid_laws,
    classify_ideals,
    prime_elements,
    prime_spectrum,
    sandbox_report,
)


class UsageError(Exception):
    pass


def _ints(text):
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise UsageError(f"expected a comma separated list of integers, got {text!r}") from None


def parse_ring(text):
    """``Z/n``, ``F<q>`` or ``P<q1>,<q2>,...`` (product of fields)."""
    t = text.strip()
    if t.startswith("Z/"):
        return integers_mod(int(t[2:]))
    if t.startswith("F"):
        return finite_field(int(t[1:].lstrip("_")))
    if t.startswith("P"):
        return product_of_fields(_ints(t[1:]))
    raise UsageError(f"unknown ring {text!r}; use Z/n, Fq or Pq1,q2,...")


def load_structure(arg):
    """A path to a ``.hr`` file or a builder expression:
    ``K``, ``S``, ``fieldq:q,m``, ``lyndon:spec[:variant]``, ``quotient:RING:g1,g2``."""
    if arg in ("K", "S"):
        return builtin(arg)
    if arg.startswith("fieldq:"):
        q, m = _ints(arg.split(":", 1)[1])
        return field_quotient(q, m)
    if arg.startswith("lyndon:"):
        parts = arg.split(":")
        variant = parts[2] if len(parts) > 2 else "plain"
        return lyndon_extension(AbelianGroupSpec(tuple(_ints(parts[1]))), variant)
    if arg.startswith("quotient:"):
        _, ring, sub = arg.split(":", 2)
        return quotient_by_subgroup(parse_ring(ring), _ints(sub))
    if not os.path.exists(arg):
        raise UsageError(f"no such file or builder expression: {arg}")
    return read_structure(arg)


def _out(args, text):
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt_set(s):
    return "{" + ", ".join(str(x) for x in sorted(s)) + "}"


# -- commands ------------------------------------------------------------------------


def cmd_validate(args):
    R = load_structure(args.structure)
    report = validate(R, args.level)
    for line in report.lines():
        print(line)
    print(f"{args.level}: {'pass' if report.passed else 'FAIL'}")
    return 0 if report.passed else 1


def cmd_build(args):
    kind = args.kind
    if kind == "kras":
        R = builtin("K")
    elif kind == "sign":
        R = builtin("S")
    elif kind == "quotient":
        if not args.ring or not args.subgroup:
            raise UsageError("build quotient needs --ring and --subgroup")
        R = quotient_by_subgroup(parse_ring(args.ring), _ints(args.subgroup))
    elif kind == "lyndon":
        if not args.group:
            raise UsageError("build lyndon needs --group")
        R = lyndon_extension(AbelianGroupSpec(tuple(_ints(args.group))), args.variant)
    elif kind == "fieldq":
        if args.q is None or args.m is None:
            raise UsageError("build fieldq needs --q and --m")
        R = field_quotient(args.q, args.m)
    else:  # product
        if args.q is None or not args.sizes:
            raise UsageError("build product needs --q and --sizes")
        S = build_semilocal(PlaceSystem.from_sizes(args.q, _ints(args.sizes)))
        R = S.H.to_structure()
    _out(args, emit_structure(R))
    return 0


def cmd_spec(args):
    R = load_structure(args.structure)
    ideals = enumerate_ideals(R)
    primes = enumerate_prime_ideals(R)
    print(f"ideals ({len(ideals)}):")
    for I in ideals:
        print("  " + _fmt_set(I))
    print(f"primes ({len(primes)}):")
    pairs = spec_hom_bijection(R)
    for p, phi in pairs:
        print(f"  {_fmt_set(p)}  <->  hom to K {list(phi)}")
    print("prime/hom bijection verified")
    return 0


def cmd_homs(args):
    R1 = load_structure(args.source)
    R2 = load_structure(args.target)
    homs = enumerate_homs(R1, R2, budget=args.budget)
    print(f"{len(homs)} homomorphisms")
    for h in homs:
        flags = [name for name, on in (("epi", h.is_epi), ("iso", h.is_iso)) if on]
        line = f"  {list(h.mapping)}" + (f"  [{', '.join(flags)}]" if flags else "")
        if args.lift:
            line += f"  {lift_hom(h)}"
        print(line)
    return 0


def _geometry_arg(arg):
    if os.path.exists(arg) and arg.endswith(".geom"):
        return read_geometry(arg)
    return geometry_of(load_structure(arg))


def cmd_geometry(args):
    action = args.action
    if action == "diffset":
        if args.n is None or args.k is None:
            raise UsageError("geometry diffset needs --n and --k")
        found = difference_set_search(args.n, args.k)
        print(f"{len(found)} equivalence classes of ({args.n},{args.k}) difference sets")
        for D in found:
            orbit = equivalence_class(D)
            print(f"  {_fmt_set(D.elements)}  orbit of {len(orbit)} sets")
        return 0
    if not args.input:
        raise UsageError(f"geometry {action} needs an input")
    if action == "of":
        _out(args, emit_geometry(geometry_of(load_structure(args.input))))
        return 0
    if action == "axioms":
        G = _geometry_arg(args.input)
        report = check_projective_axioms(G)
        for name, res in report.items():
            verdict = {True: "pass", False: "FAIL", None: "not evaluated"}[res.passed]
            extra = f"  witness {res.counterexample}" if res.counterexample is not None else ""
            print(f"{name}: {verdict}{extra}")
        ok = all(report[a].passed for a in ("P1", "P2", "P3'"))
        return 0 if ok else 1
    if action == "desargues":
        print(is_desarguesian(_geometry_arg(args.input)))
        return 0
    if action == "relations":
        R = load_structure(args.input)
        classes = canonical_relation(R)
        print("canonical relation classes: " + " ".join(_fmt_set(c) for c in classes))
        ok, cx = relations_commute(relation_family(R))
        print(f"relation family commutes: {ok}" + (f" (witness {cx})" if cx else ""))
        return 0 if ok else 1
    if action == "rebuild":
        if not args.group:
            raise UsageError("geometry rebuild needs --group")
        G = read_geometry(args.input)
        group = PointedGroup.from_spec(AbelianGroupSpec(tuple(_ints(args.group))))
        if list(G.points) != list(range(1, group.n)):
            raise UsageError("points must be 1..|H| (point i is the group element at carrier index i)")
        action_maps = [{x: group.mul[a][x] for x in G.points} for a in group.nonzero]
        if not incidence_group_check(G, action_maps):
            print("translations are not collineations")
            return 1
        partition = [frozenset({0, group.one})]
        for L in G.lines:
            if group.one in L:
                partition.append(frozenset(L) - {group.one})
        _out(args, emit_structure(rebuild_addition_from_relation(group, partition)))
        return 0
    raise UsageError(f"unknown geometry action {action}")


def cmd_classify(args):
    if args.action == "dim2":
        if not args.input:
            raise UsageError("classify dim2 needs a structure")
        variant, spec = classify_dimension2(load_structure(args.input))
        print(f"{variant} on {spec}")
        return 0
    if args.n is None:
        raise UsageError(f"classify {args.action} needs --n")
    bound = args.bound
    if args.action == "kext":
        entries = enumerate_K_extensions(args.n, strategy=args.strategy, jobs=args.jobs, bound=bound)
        print("\n".join(classification_table(args.n, entries)))
        return 0
    found = enumerate_S_extensions(args.n, jobs=args.jobs, bound=bound)
    print(f"n = {args.n}: {len(found)} structures")
    return 0 if not found else 1


def cmd_sandbox(args):
    if args.q is None or not args.sizes:
        raise UsageError("sandbox needs --q and --sizes")
    S = build_semilocal(PlaceSystem.from_sizes(args.q, _ints(args.sizes)))
    if args.action == "build":
        print(f"classes {S.H.n}, units {S.units_count()}, K contained")
    elif args.action == "ideals":
        ideals = classify_ideals(S)
        print(f"{len(ideals)} ideals, one per subset of places")
        for Z, I in ideals.items():
            print(f"  Z = {_fmt_set(Z)}: {len(I)} classes")
    elif args.action == "primes":
        primes = prime_spectrum(S)
        print(f"{len(primes)} prime ideals")
        for w, p in primes:
            print(f"  place {w}: {len(p)} classes")
    else:
        P = prime_elements(S)
        print("\n".join(sandbox_report(S, P)))
        laws = check_groupoid_laws(P)
        for name, ok in laws.items():
            print(f"{name}: {'pass' if ok else 'FAIL'}")
        return 0 if all(laws.values()) else 1
    return 0


# -- parser ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="hyperforge", description="Finite hyperrings, hyperfields and their geometries.")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for enumerations")
    p.add_argument("--bound", type=int, default=None, help="override the classification size bound")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check the axioms of a structure")
    v.add_argument("structure")
    v.add_argument("--level", default="hyperfield", choices=["hypergroup", "kvector", "hyperring", "hyperfield"])
    v.set_defaults(func=cmd_validate)

    b = sub.add_parser("build", help="emit a structure document")
    b.add_argument("kind", choices=["kras", "sign", "quotient", "lyndon", "fieldq", "product"])
    b.add_argument("--ring")
    b.add_argument("--subgroup")
    b.add_argument("--group")
    b.add_argument("--variant", default="plain", choices=["plain", "nilpotent", "idempotent_pair"])
    b.add_argument("--q", type=int)
    b.add_argument("--m", type=int)
    b.add_argument("--sizes")
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_build)

    s = sub.add_parser("spec", help="ideals, primes and homs to K")
    s.add_argument("structure")
    s.set_defaults(func=cmd_spec)

    h = sub.add_parser("homs", help="enumerate homomorphisms")
    h.add_argument("source")
    h.add_argument("target")
    h.add_argument("--lift", action="store_true", help="lift maps between field quotients")
    h.add_argument("--budget", type=int, default=config.HOM_SEARCH_BUDGET)
    h.set_defaults(func=cmd_homs)

    g = sub.add_parser("geometry", help="projective geometry tools")
    g.add_argument("action", choices=["of", "axioms", "desargues", "relations", "rebuild", "diffset"])
    g.add_argument("input", nargs="?")
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--group")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_geometry)

    c = sub.add_parser("classify", help="enumerate small extensions")
    c.add_argument("action", choices=["kext", "sext", "dim2"])
    c.add_argument("input", nargs="?")
    c.add_argument("--n", type=int)
    c.add_argument("--strategy", default="lines", choices=["lines", "raw"])
    c.set_defaults(func=cmd_classify)

    x = sub.add_parser("sandbox", help="semi-local class space model")
    x.add_argument("action", choices=["build", "ideals", "primes", "groupoid"])
    x.add_argument("--q", type=int)
    x.add_argument("--sizes")
    x.set_defaults(func=cmd_sandbox)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, StructureParseError, BoundError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PreconditionError, StructureError, LiftError, BudgetExhausted) as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 1
    except HyperforgeError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
