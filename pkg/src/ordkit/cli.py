"""Command-line front end.

Subcommands: ordinal calculator (eval, cmp), coding utilities (pair,
unpair, fincode, cnfbij), the reduction instance runner (reduce), the
refuter demos (refute), the well-order code decoder (decode-wo), and
selftest.  Output is deterministic and line-oriented; ordinals cross the
boundary as grammar strings.  Exit status: 0 success, 1 domain error
(first line carries the error name), 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from .carriers import QueryableSet, load_instance, preimage_of
from .coding import fin_encode, omega_power_bijection, pair_decode, pair_encode
from .core import Ordinal, ZERO, compare, fmt, parse
from .errors import CertificateError, ToolkitError
from .intervals import OrdinalSet
from .oracle import exhaustive_check
from .reduction import (
    reduce_omega_product,
    refute_infinite_powerset,
    refute_powerset,
    verify_surjective,
    wellorder_decode,
)

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ordkit", description="constructive ordinal computation below epsilon-0"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="normalize an ordinal expression")
    p.add_argument("expr")

    p = sub.add_parser("cmp", help="compare two ordinal expressions")
    p.add_argument("left")
    p.add_argument("right")

    p = sub.add_parser("pair", help="encode a pair below alpha")
    p.add_argument("--alpha", required=True)
    p.add_argument("x")
    p.add_argument("y")

    p = sub.add_parser("unpair", help="decode a pair code below alpha")
    p.add_argument("--alpha", required=True)
    p.add_argument("z")

    p = sub.add_parser("fincode", help="encode a finite set below alpha")
    p.add_argument("--alpha", required=True)
    p.add_argument("elements", help="comma-separated ordinal expressions (empty for {})")

    p = sub.add_parser("cnfbij", help="apply the omega-power bijection")
    p.add_argument("--alpha", required=True)
    p.add_argument("--dir", required=True, choices=["down", "up"], dest="direction")
    p.add_argument("value")
    p.add_argument("--fuel", type=int, default=10_000)

    p = sub.add_parser("reduce", help="run the reduction engine on an instance file")
    p.add_argument("--instance", required=True)
    p.add_argument("--verify-below", required=True, dest="verify_below")

    p = sub.add_parser("refute", help="one refutation step against a listing instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--mode", required=True, choices=["pset", "infpset"])
    p.add_argument("--check", type=int, default=100)

    p = sub.add_parser("decode-wo", help="decode a well-order code file")
    p.add_argument("path")

    p = sub.add_parser("selftest", help="run the exhaustive oracle checks")
    p.add_argument("--size", type=int, default=3)

    return parser


def _fiber_listing(fam):
    """phi(n, x) = the row-n fiber of x, as an exactly certified set."""

    def phi(n: int, x) -> QueryableSet:
        value = fam.row(n)(fam.carrier, x)
        restriction = preimage_of(fam.row(n), fam.carrier, OrdinalSet.point(value))

        def membership(y) -> bool:
            label, pos = y
            part = restriction.get(label)
            return part is not None and part.contains(pos)

        total_finite = True
        infinite_label = None
        for label in fam.carrier.labels:
            part = restriction.get(label)
            if part is not None and not part.order_type().is_nat():
                total_finite = False
                infinite_label = label
                break
        if total_finite:
            members = []
            for label in fam.carrier.labels:
                part = restriction.get(label)
                if part is None:
                    continue
                size = part.order_type().nat_value()
                members.extend((label, p) for p in part.iter_prefix(size))
            certificate = ("finite", tuple(members))
        else:
            part = restriction[infinite_label]
            certificate = (
                "infinite",
                lambda k, label=infinite_label, part=part: (label, part.enumerate(Ordinal(k))),
            )
        return QueryableSet(membership, certificate)

    return phi


def _distinct_table(fam, phi, limit: int = 8, scan: int = 24):
    """The first pairwise sample-distinct listed sets, in listing order."""
    points = fam.carrier.sample_elements(16)
    table = []
    index = 0
    while len(table) < limit and index < scan:
        n, i = index % 4, index // 4
        if i < len(points):
            candidate = phi(n, points[i])
            if all(
                any(candidate.contains(w) != entry.contains(w) for w in points)
                for entry in table
            ):
                table.append(candidate)
        index += 1
    return table


def _run(args) -> int:
    out = sys.stdout
    if args.command == "eval":
        out.write(fmt(parse(args.expr)) + "\n")
    elif args.command == "cmp":
        c = compare(parse(args.left), parse(args.right))
        out.write(("less", "equal", "greater")[c + 1] + "\n")
    elif args.command == "pair":
        alpha = parse(args.alpha)
        out.write(fmt(pair_encode(alpha, parse(args.x), parse(args.y))) + "\n")
    elif args.command == "unpair":
        alpha = parse(args.alpha)
        decoded = pair_decode(alpha, parse(args.z))
        if decoded is None:
            out.write("none\n")
        else:
            out.write(fmt(decoded[0]) + "\n")
            out.write(fmt(decoded[1]) + "\n")
    elif args.command == "fincode":
        alpha = parse(args.alpha)
        text = args.elements.strip()
        elements = [parse(part) for part in text.split(",")] if text else []
        out.write(fmt(fin_encode(alpha, elements)) + "\n")
    elif args.command == "cnfbij":
        alpha = parse(args.alpha)
        value = omega_power_bijection(alpha, args.direction, parse(args.value), args.fuel)
        out.write(fmt(value) + "\n")
    elif args.command == "reduce":
        fam = load_instance(args.instance)
        fam.check_coverage(value_bound=_coverage_bound(fam))
        result = reduce_omega_product(fam)
        case, k = result.case_taken
        head = f"case={case}" + (f" k={k}" if case == "case1" else "")
        out.write(head + f" delta={fmt(result.delta)}\n")
        report = verify_surjective(result, parse(args.verify_below))
        for line in report.lines():
            out.write(line + "\n")
    elif args.command == "refute":
        fam = load_instance(args.instance)
        phi = _fiber_listing(fam)
        table = _distinct_table(fam, phi)
        if args.mode == "pset":
            witness = refute_powerset(phi, fam.carrier, table, check_bound=args.check)
        else:
            for entry in table:
                if entry.certificate is None or entry.certificate[0] != "infinite":
                    raise CertificateError("infpset mode needs infinite listed sets")
            witness = refute_infinite_powerset(
                phi, fam.carrier, table, check_bound=args.check
            )
        out.write(f"mode={args.mode} table={len(table)}\n")
        out.write(
            f"distinguishers={len(witness.distinguishers)} recheck="
            + ("ok" if witness.recheck() else "FAILED")
            + "\n"
        )
        for tag, index, point, in_missed, in_listed, _ in witness.distinguishers[:10]:
            name = f"table:{index}" if tag == "table" else f"phi:{tag[0]},{tag[1]}"
            label, pos = point
            out.write(
                f"index={name} point={label}:{fmt(pos)} "
                f"missed={str(in_missed).lower()} listed={str(in_listed).lower()}\n"
            )
    elif args.command == "decode-wo":
        with open(args.path, "r", encoding="ascii") as handle:
            content = handle.read()
        out.write(fmt(wellorder_decode(_parse_wo_file(content))) + "\n")
    elif args.command == "selftest":
        size = args.size
        for name, cap in (
            ("csb_bijective", 5),
            ("diagonal_missed", 3),
            ("transfer_surjective", 4),
        ):
            report = exhaustive_check(name, min(size, cap))
            out.write(report.summary() + "\n")
        _law_spot_checks(out)
    return 0


def _coverage_bound(fam):
    # tails cover alpha only in the limit; check a solid finite prefix
    if fam.tail_rule is None:
        return fam.alpha
    span = OrdinalSet()
    for n in range(12):
        span = span.union(fam.row_image(n))
    covered = span.intersect(OrdinalSet.interval(ZERO, fam.alpha))
    if covered.is_empty():
        return fam.alpha
    return covered.intervals[0][1] if covered.intervals[0][0] == ZERO else fam.alpha


def _parse_wo_file(content: str):
    pairs = []
    bits = None
    for raw in content.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("bits:"):
            body = line[len("bits:"):].strip()
            bits = [int(part) for part in body.split(",")] if body else []
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise ToolkitError(f"bad well-order line: {line!r}")
        pairs.append((int(parts[0]), int(parts[1])))
    if bits is not None:
        return bits
    return pairs


def _law_spot_checks(out):
    import random

    from .core import add, left_subtract, multiply

    rng = random.Random(20_24)
    failures = 0
    for _ in range(500):
        a, b, c = (_random_ordinal(rng) for _ in range(3))
        if add(add(a, b), c) != add(a, add(b, c)):
            failures += 1
        if multiply(multiply(a, b), c) != multiply(a, multiply(b, c)):
            failures += 1
        if multiply(a, add(b, c)) != add(multiply(a, b), multiply(a, c)):
            failures += 1
        low, high = (a, b) if compare(a, b) <= 0 else (b, a)
        if add(low, left_subtract(low, high)) != high:
            failures += 1
    out.write(f"arithmetic laws: 500 random triples, {failures} failures\n")


def _random_ordinal(rng) -> Ordinal:
    terms = []
    for exponent in sorted(rng.sample(range(6), rng.randrange(4)), reverse=True):
        terms.append((Ordinal(exponent), rng.randrange(1, 20)))
    return Ordinal.from_terms(terms)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except ToolkitError as error:
        sys.stdout.write(error.name + "\n")
        sys.stdout.write(str(error) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
