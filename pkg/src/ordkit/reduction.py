"""Reduction engines and refuters.

The centerpiece turns a presented surjection f: omega x M -> alpha into an
evaluable surjection M -> alpha.  Case 1 (some row's order type attains the
supremum delta) composes the row isomorphism with the pairing-based step
from delta onto alpha.  Case 2 realizes the stage recursion at the order-type
level: q_n is the unique isomorphism from a peeled chunk of the carrier onto
[0, beta_n), the chunks live in a reserve zone [beta, beta*2) of the carrier
so that row strength (the coverage condition) survives every stage, and the
glued map sends everything outside the chunks to zero.

Also here: the diagonal set operation, the finite-to-one transfer, the
one-step refuters for listings of (infinite) subsets, the fiber witness of
power Dedekind infiniteness, and the well-order code surrogate decoder.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional

from .carriers import (
    BlockwiseMap,
    Carrier,
    CarrierMap,
    Piece,
    QueryableSet,
    SurjectionFamily,
    image_of,
    preimage_of,
)
from .coding import OmegaPowerBijection, pair_decode, pair_encode
from .core import (
    OMEGA,
    ONE,
    ZERO,
    Ordinal,
    add,
    compare,
    fmt,
    left_subtract,
    multiply,
    omega_power,
    parse,
)
from .errors import (
    BoundViolation,
    CertificateError,
    CoverageBroken,
    EmptyFiber,
    FuelExhausted,
    PreconditionViolated,
    TableNotInjective,
    TailLimitUndecided,
    WitnessNotFound,
)
from .intervals import OrdinalSet

__all__ = [
    "cantor_diagonal",
    "ordinal_sequence_limit",
    "ReductionResult",
    "Stage",
    "reduce_omega_product",
    "verify_surjective",
    "VerificationReport",
    "finite_to_one_transfer",
    "TransferResult",
    "fiber_family_values",
    "RefutationWitness",
    "refute_powerset",
    "refute_infinite_powerset",
    "kuratowski_witness",
    "wellorder_decode",
    "ordinal_to_bits",
    "bits_to_ordinal",
]


# -- Cantor's diagonal ---------------------------------------------------------


def cantor_diagonal(listing: Callable, carrier: Carrier) -> QueryableSet:
    """The set {x : x not in listing(x)}; never in the listing's range."""

    def membership(x) -> bool:
        carrier.check_element(x)
        return not listing(x).contains(x)

    return QueryableSet(membership)


# -- limits of weakly monotone ordinal sequences ---------------------------------


def _strict_limit(values: List[Ordinal]) -> Ordinal:
    """Limit candidate for a strictly increasing window of CNF values."""
    first = values[0].terms
    prefix_len = 0
    while prefix_len < len(first) and all(
        len(v.terms) > prefix_len and v.terms[prefix_len] == first[prefix_len]
        for v in values
    ):
        prefix_len += 1
    prefix = Ordinal.from_terms(first[:prefix_len])
    remainders = [Ordinal.from_terms(v.terms[prefix_len:]) for v in values]
    remainders = [r for r in remainders if not r.is_zero()]
    if not remainders:
        raise TailLimitUndecided("window collapsed to its common prefix")
    exponents = [r.degree for r in remainders]
    if all(compare(e, exponents[0]) == 0 for e in exponents):
        return add(prefix, omega_power(add(exponents[0], ONE)))
    e_limit, e_attained = _window_limit(exponents)
    if e_attained:
        return add(prefix, omega_power(add(e_limit, ONE)))
    return add(prefix, omega_power(e_limit))


def _window_limit(values: List[Ordinal]) -> tuple:
    """(limit, attained) for one window of a weakly monotone sequence."""
    for a, b in zip(values, values[1:]):
        if compare(a, b) > 0:
            raise TailLimitUndecided("sequence is not weakly monotone")
    strict = []
    for v in values:
        if not strict or compare(strict[-1], v) < 0:
            strict.append(v)
    if len(strict) == 1:
        return strict[0], True
    candidate = _strict_limit(strict)
    for v in values:
        if compare(v, candidate) >= 0:
            raise TailLimitUndecided("window value reaches its own limit candidate")
    return candidate, False


def ordinal_sequence_limit(
    seq: Callable[[int], Ordinal], start: int = 0, max_window: int = 128
) -> tuple:
    """Supremum of a weakly monotone sequence, with attainment flag.

    Evaluates growing late windows until two consecutive window analyses
    agree; undecidable windows raise.  Sound for sequences whose CNF
    structure eventually stabilizes (all instance-template tails do).
    """
    previous = None
    width = 8
    while width <= max_window:
        window = [seq(start + i) for i in range(width // 2, width)]
        current = _window_limit(window)
        if previous is not None and previous == current:
            return current
        previous = current
        width *= 2
    raise TailLimitUndecided(f"no stable window limit within width {max_window}")


# -- the omega-product reduction --------------------------------------------------


@dataclass
class Stage:
    """One step of the peeling recursion."""

    index: int
    k: int  # qualifying row (kept numbering)
    beta: Ordinal  # beta_n = w**delta_n
    chunk_lo: Ordinal  # global positions [chunk_lo, chunk_hi) feed q_n
    chunk_hi: Ordinal
    b_restriction: dict  # B_n as per-block position sets
    q_map: BlockwiseMap  # the iso from the chunk onto [0, beta_n)
    coverage: list  # [(kept row m, delta_m, qualifies)]


class ReductionResult:
    """An evaluable surjection M -> [0, alpha) with its construction record."""

    def __init__(self, fam: SurjectionFamily, kept, delta, attained_at, fuel):
        self.fam = fam
        self.carrier = fam.carrier
        self.alpha = fam.alpha
        self.delta = delta
        self.fuel = fuel
        self._kept = kept  # _KeptRows view
        self.stages: list = []
        if attained_at is not None:
            self.case_taken = ("case1", attained_at)
            self.beta = None
            self._bij = None
        else:
            self.case_taken = ("case2", None)
            self.beta = omega_power(delta)
            self._bij = OmegaPowerBijection(delta, fuel=fuel)
            theta = self.carrier.order_type
            if compare(theta, multiply(self.beta, Ordinal(2))) < 0:
                raise PreconditionViolated(
                    "carrier order type must reach w**delta * 2 "
                    f"(need {fmt(multiply(self.beta, Ordinal(2)))}, have {fmt(theta)})"
                )
            self._peeled = [ZERO]  # cumulative chunk lengths

    # -- case 2 stages --------------------------------------------------

    def _stage_coverage(self, restriction: dict, window: int) -> list:
        report = []
        for m in range(window):
            delta_m = self._kept.delta(m)
            row = self._kept.row(m)
            image = image_of(row, self.carrier, restriction)
            a_m = self._kept.image(m)
            strength = a_m.positions_of(image.intersect(a_m)).order_type()
            report.append((m, delta_m, compare(strength, delta_m) == 0))
        return report

    def _coverage_ok(self, report: list) -> bool:
        best = ZERO
        best_qual = ZERO
        for _, delta_m, qualifies in report:
            if compare(delta_m, best) > 0:
                best = delta_m
            if qualifies and compare(delta_m, best_qual) > 0:
                best_qual = delta_m
        return compare(best, best_qual) == 0

    def ensure_stage(self, n: int, coverage_window: int = 6, search_bound: int = 64):
        if self.case_taken[0] != "case2":
            raise PreconditionViolated("stages exist only in case 2")
        while len(self.stages) <= n:
            index = len(self.stages)
            beta_n = omega_power(self._kept.delta(index))
            b_lo = add(self.beta, self._peeled[index])
            b_restriction = self._b_restriction(index)
            # least k with beta_index < beta_k and full row strength on B_n
            k = None
            for cand in range(max(search_bound, index + 8)):
                delta_c = self._kept.delta(cand)
                if compare(self._kept.delta(index), delta_c) >= 0:
                    continue
                row = self._kept.row(cand)
                image = image_of(row, self.carrier, b_restriction)
                a_c = self._kept.image(cand)
                strength = a_c.positions_of(image.intersect(a_c)).order_type()
                if compare(strength, delta_c) == 0:
                    k = cand
                    break
            if k is None:
                raise CoverageBroken(
                    f"no qualifying row above beta_{index} within {search_bound} rows"
                )
            beta_k = omega_power(self._kept.delta(k))
            if compare(multiply(beta_n, Ordinal(2)), beta_k) >= 0:
                raise CoverageBroken(f"beta_{index}*2 < beta_k fails at stage {index}")
            chunk_lo = b_lo
            chunk_hi = add(chunk_lo, beta_n)
            chunk = self.carrier.global_range_restriction(chunk_lo, chunk_hi)
            # Branch order: first ask whether coverage survives keeping only
            # the candidate chunk.  Reserve-zone chunks never carry row
            # strength, so the complement branch is always the one taken; a
            # pass here means the instance left the structured class.
            if self._coverage_ok(self._stage_coverage(chunk, coverage_window)):
                raise CoverageBroken(
                    "reserve chunk unexpectedly carries full row strength"
                )
            after = self._stage_coverage(
                self._restriction_difference(b_restriction, chunk), coverage_window
            )
            if not self._coverage_ok(after):
                raise CoverageBroken(f"coverage condition fails after stage {index}")
            q_map = self._chunk_iso(chunk_lo, chunk_hi)
            self.stages.append(
                Stage(index, k, beta_n, chunk_lo, chunk_hi, b_restriction, q_map, after)
            )
            self._peeled.append(add(self._peeled[index], beta_n))

    def _b_restriction(self, n: int) -> dict:
        full = self.carrier.full_restriction()
        if n == 0:
            return full
        lo = self.beta
        hi = add(self.beta, self._peeled[n])
        peeled = self.carrier.global_range_restriction(lo, hi)
        return {
            label: full[label].difference(peeled.get(label, OrdinalSet()))
            for label in self.carrier.labels
        }

    @staticmethod
    def _restriction_difference(a: dict, b: dict) -> dict:
        return {label: a[label].difference(b.get(label, OrdinalSet())) for label in a}

    def _chunk_iso(self, lo: Ordinal, hi: Ordinal) -> BlockwiseMap:
        """The unique order isomorphism from global positions [lo, hi)
        onto [0, hi - lo), as block-wise monotone pieces."""
        pieces = []
        acc = ZERO
        restriction = self.carrier.global_range_restriction(lo, hi)
        for label in self.carrier.labels:
            dom = restriction.get(label, OrdinalSet())
            if dom.is_empty():
                continue
            length = dom.order_type()
            target = OrdinalSet.interval(acc, add(acc, length))
            pieces.append(Piece(label, "monotone", target=target, dom=dom))
            acc = add(acc, length)
        return BlockwiseMap(pieces)

    # -- evaluation -------------------------------------------------------

    def evaluate_point(self, element, fuel: Optional[int] = None) -> tuple:
        """('determined', value) or ('unresolved', None) under the fuel."""
        fuel = self.fuel if fuel is None else fuel
        if self.case_taken[0] == "case1":
            return ("determined", self._alpha_value(self._case1_delta(element)))
        p = self.carrier.global_position(element)
        if compare(p, self.beta) < 0:
            # provably inside every B_n: the glued map sends it to zero
            return ("determined", self._alpha_value(self._bij.down(ZERO)))
        offset = left_subtract(self.beta, p)
        if compare(offset, self.beta) >= 0:
            return ("determined", self._alpha_value(self._bij.down(ZERO)))
        for n in range(fuel):
            self.ensure_stage(n)
            if compare(offset, self._peeled[n + 1]) < 0:
                w = left_subtract(self._peeled[n], offset)
                z = self._bij.down(w)
                return ("determined", self._alpha_value(z))
        return ("unresolved", None)

    def surjection(self, element) -> Ordinal:
        status, value = self.evaluate_point(element)
        if status != "determined":
            raise FuelExhausted(f"point {element!r} unresolved within fuel {self.fuel}")
        return value

    def _case1_delta(self, element) -> Ordinal:
        k = self.case_taken[1]
        value = self._kept.row(k)(self.carrier, element)
        return self._kept.image(k).locate(value)

    def m_to_delta(self, element) -> Ordinal:
        """The intermediate surjection M -> [0, delta)."""
        if self.case_taken[0] == "case1":
            return self._case1_delta(element)
        p = self.carrier.global_position(element)
        if compare(p, self.beta) < 0:
            return self._bij.down(ZERO)
        offset = left_subtract(self.beta, p)
        if compare(offset, self.beta) >= 0:
            return self._bij.down(ZERO)
        for n in range(self.fuel):
            self.ensure_stage(n)
            if compare(offset, self._peeled[n + 1]) < 0:
                return self._bij.down(left_subtract(self._peeled[n], offset))
        raise FuelExhausted(f"point {element!r} unresolved within fuel {self.fuel}")

    def _alpha_value(self, z: Ordinal) -> Ordinal:
        """The pairing-decoded step from delta onto alpha, extended by zero."""
        decoded = pair_decode(self.delta, z)
        if decoded is None:
            return ZERO
        n, gamma = decoded
        if not n.is_nat():
            return ZERO
        n_int = n.nat_value()
        if not self.fam.has_row(n_int):
            return ZERO
        image = self.fam.row_image(n_int)
        if compare(gamma, image.order_type()) >= 0:
            return ZERO
        return image.enumerate(gamma)

    # -- witnesses ---------------------------------------------------------

    def delta_witness(self, z: Ordinal):
        """A carrier element that the M -> delta stage sends to z < delta."""
        if compare(z, self.delta) >= 0:
            raise BoundViolation(f"{fmt(z)} is not below delta = {fmt(self.delta)}")
        if self.case_taken[0] == "case1":
            k = self.case_taken[1]
            row = self._kept.row(k)
            target_value = self._kept.image(k).enumerate(z)
            restriction = preimage_of(row, self.carrier, OrdinalSet.point(target_value))
            for label in self.carrier.labels:
                positions = restriction.get(label)
                if positions is None or positions.is_empty():
                    continue
                candidate = (label, positions.min_element())
                if compare(row(self.carrier, candidate), target_value) == 0:
                    return candidate
            raise WitnessNotFound(f"row {k} has no preimage of {fmt(target_value)}")
        w = self._bij.up(z)
        for n in range(self.fuel):
            self.ensure_stage(n)
            if compare(w, self.stages[n].beta) < 0:
                p = add(add(self.beta, self._peeled[n]), w)
                return self.carrier.element_at(p)
        raise FuelExhausted(f"no stage reaches {fmt(w)} within fuel {self.fuel}")

    def witness_for(self, gamma: Ordinal, row_scan: int = 64):
        """A carrier element mapped to gamma by the surjection."""
        if compare(gamma, self.alpha) >= 0:
            raise BoundViolation(f"target {fmt(gamma)} is not below alpha")
        for n in range(row_scan):
            if not self.fam.has_row(n):
                break
            image = self.fam.row_image(n)
            if image.contains(gamma):
                z = pair_encode(self.delta, Ordinal(n), image.locate(gamma))
                return self.delta_witness(z)
        raise WitnessNotFound(f"no row covers {fmt(gamma)} within {row_scan} rows")


class _KeptRows:
    """Renumbered view of the family with finite-order-type rows dropped."""

    def __init__(self, fam: SurjectionFamily, scan_budget: int = 512):
        self.fam = fam
        self.scan_budget = scan_budget
        self._kept: list = []
        self._next_original = 0

    def _extend_to(self, j: int):
        scanned = 0
        while len(self._kept) <= j:
            n = self._next_original
            if not self.fam.has_row(n):
                raise CoverageBroken(f"fewer than {j + 1} rows with infinite order type")
            if self.fam.delta(n).is_infinite():
                self._kept.append(n)
            self._next_original += 1
            scanned += 1
            if scanned > self.scan_budget:
                raise CoverageBroken(
                    f"no further infinite rows within {self.scan_budget} originals"
                )

    def original(self, j: int) -> int:
        self._extend_to(j)
        return self._kept[j]

    def row(self, j: int) -> BlockwiseMap:
        return self.fam.row(self.original(j))

    def image(self, j: int) -> OrdinalSet:
        return self.fam.row_image(self.original(j))

    def delta(self, j: int) -> Ordinal:
        return self.fam.delta(self.original(j))

    def explicit_count(self) -> int:
        """Kept rows among the explicit (non-tail) originals."""
        count = 0
        for n in range(len(self.fam.rows)):
            if self.fam.delta(n).is_infinite():
                count += 1
        return count


def _compute_delta(fam: SurjectionFamily, kept: _KeptRows) -> tuple:
    """(delta, attained_kept_index or None) over the filtered rows."""
    explicit_kept = kept.explicit_count()
    best = ZERO
    best_at = None
    for j in range(explicit_kept):
        d = kept.delta(j)
        if compare(d, best) > 0:
            best, best_at = d, j
    if fam.tail_rule is None:
        if best_at is None:
            raise PreconditionViolated("no rows with infinite order type")
        return best, best_at
    limit, attained = ordinal_sequence_limit(kept.delta, start=explicit_kept)
    if compare(best, limit) > 0:
        return best, best_at
    if compare(best, limit) == 0 and best_at is not None:
        return best, best_at
    if attained:
        for j in range(explicit_kept, explicit_kept + 512):
            if compare(kept.delta(j), limit) == 0:
                return limit, j
        raise TailLimitUndecided("attained tail limit has no witness row in range")
    return limit, None


def reduce_omega_product(fam: SurjectionFamily, fuel: int = 10_000) -> ReductionResult:
    """Turn the presented surjection omega x M -> alpha into M -> alpha.

    Rows with finite order type are dropped and the rest renumbered; the
    supremum delta of the remaining order types must exceed omega.  Case 1
    (delta attained) inverts the attaining row; case 2 peels one chunk per
    stage from the carrier's reserve zone, each chunk isomorphic to
    [0, beta_n), and glues the stage maps with zero on the intersection.
    """
    kept = _KeptRows(fam)
    delta, attained_at = _compute_delta(fam, kept)
    if compare(delta, OMEGA) <= 0:
        raise PreconditionViolated(
            f"delta = {fmt(delta)} must exceed w for the reduction"
        )
    result = ReductionResult(fam, kept, delta, attained_at, fuel)
    if result.case_taken[0] == "case2":
        result.ensure_stage(2)  # materialize the first stages eagerly
    return result


# -- bounded surjectivity verification ------------------------------------------


@dataclass
class VerificationReport:
    bound: Ordinal
    entries: list = field(default_factory=list)  # (interval, row, samples)

    def ok(self) -> bool:
        return all(ok for _, _, samples in self.entries for *_, ok in samples)

    def lines(self) -> list:
        out = []
        for (lo, hi), row, samples in self.entries:
            out.append(f"interval=[{fmt(lo)},{fmt(hi)}) row={row}")
            for target, (label, pos), value, ok in samples:
                status = "" if ok else " MISMATCH"
                out.append(
                    f"target={fmt(target)} witness={label}:{fmt(pos)} value={fmt(value)}{status}"
                )
        return out


_SPREAD = ("1", "2", "5", "w", "w*2+1", "w^2", "w^2+w+1", "w^3")


def _interval_samples(lo: Ordinal, hi: Ordinal) -> list:
    samples = [lo]
    for text in _SPREAD:
        candidate = add(lo, parse(text))
        if compare(candidate, hi) < 0:
            samples.append(candidate)
    seen = set()
    out = []
    for s in samples:
        if s not in seen:
            seen.add(s)
            out.append(s)
    return out


def verify_surjective(
    result: ReductionResult, bound: Ordinal, row_scan: int = 64
) -> VerificationReport:
    """Witness search over every first-cover target interval below bound.

    Targets are partitioned by the least row whose image covers them;
    each interval gets a deterministic spread of sample targets, every
    sample is inverted through the construction and the resulting witness
    re-evaluated.
    """
    if compare(bound, result.alpha) > 0:
        raise BoundViolation("bound must be at most alpha")
    report = VerificationReport(bound)
    want = OrdinalSet.interval(ZERO, bound)
    covered = OrdinalSet()
    for n in range(row_scan):
        if want.difference(covered).is_empty():
            break
        if not result.fam.has_row(n):
            raise WitnessNotFound(
                f"targets below {fmt(bound)} not covered by {row_scan} rows"
            )
        fresh = result.fam.row_image(n).intersect(want).difference(covered)
        for lo, hi in fresh.intervals:
            samples = []
            for target in _interval_samples(lo, hi):
                witness = result.witness_for(target, row_scan=row_scan)
                value = result.surjection(witness)
                samples.append((target, witness, value, compare(value, target) == 0))
            report.entries.append(((lo, hi), n, samples))
        covered = covered.union(fresh)
    if not want.difference(covered).is_empty():
        raise WitnessNotFound(f"rows 0..{row_scan} do not cover [0, {fmt(bound)})")
    if not report.ok():
        raise WitnessNotFound("a witness failed re-evaluation")
    return report


# -- finite-to-one transfer -------------------------------------------------------


def _compose_monotone(f_piece, g_piece, source: Carrier) -> list:
    """Pieces (over the destination carrier) of g restricted to one
    monotone f-piece composed with one g-piece."""
    fdom = f_piece.domain_in(source)
    iso_len = fdom.order_type()
    t_len = f_piece.target.order_type()
    if compare(t_len, iso_len) < 0:
        iso_len = t_len
    gdom = g_piece.domain_in(source)
    part = fdom.intersect(gdom)
    if part.is_empty():
        return []
    idx = fdom.positions_of(part).intersect(OrdinalSet.interval(ZERO, iso_len))
    if idx.is_empty():
        return []
    m_dom = f_piece.target.select_positions(idx)
    out = []
    if g_piece.kind == "constant":
        out.append(
            Piece(f_piece.target_label, "constant", value=g_piece.value, dom=m_dom)
        )
        return out
    n_set = fdom.select_positions(idx)
    g_idx = gdom.positions_of(n_set)
    g_len = g_piece.target.order_type()
    live = g_idx.intersect(OrdinalSet.interval(ZERO, g_len))
    if not live.is_empty():
        values = g_piece.target.select_positions(live)
        live_n = gdom.select_positions(live)
        live_dom = f_piece.target.select_positions(
            fdom.positions_of(live_n).intersect(OrdinalSet.interval(ZERO, iso_len))
        )
        out.append(
            Piece(f_piece.target_label, "monotone", target=values, dom=live_dom)
        )
    dead = g_idx.difference(OrdinalSet.interval(ZERO, g_len))
    if not dead.is_empty():
        dead_n = gdom.select_positions(dead)
        dead_dom = f_piece.target.select_positions(
            fdom.positions_of(dead_n).intersect(OrdinalSet.interval(ZERO, iso_len))
        )
        out.append(Piece(f_piece.target_label, "constant", value=ZERO, dom=dead_dom))
    return out


def _fiber_rows(f: CarrierMap, g: BlockwiseMap) -> list:
    """Rows of the induced family omega x M -> alpha: one row per monotone
    piece composition, one singleton row per point of each finite fiber
    chunk (constant pieces and zero-extension overflow)."""
    source = f.source
    rows = []
    for fp in f.pieces:
        fdom = fp.domain_in(source)
        if fp.kind == "constant":
            total = fdom.order_type()
            if not total.is_nat():
                raise PreconditionViolated(
                    f"infinite fiber: constant carrier piece on {fp.label!r}"
                )
            for q in fdom.iter_prefix(total.nat_value()):
                value = g(source, (fp.label, q))
                rows.append(
                    BlockwiseMap(
                        [
                            Piece(
                                fp.target_label,
                                "constant",
                                value=value,
                                dom=OrdinalSet.point(fp.value),
                            )
                        ]
                    )
                )
            continue
        for gp in g.pieces:
            if gp.label != fp.label:
                continue
            pieces = _compose_monotone(fp, gp, source)
            if pieces:
                rows.append(BlockwiseMap(pieces))
        # zero-extension overflow: positions beyond the target length all
        # land on position 0 of the target block
        t_len = fp.target.order_type()
        total = fdom.order_type()
        if compare(t_len, total) < 0:
            overflow = left_subtract(t_len, total)
            if not overflow.is_nat():
                raise PreconditionViolated(
                    f"infinite fiber over zero on {fp.label!r}"
                )
            for kk in range(overflow.nat_value()):
                q = fdom.enumerate(add(t_len, Ordinal(kk)))
                value = g(source, (fp.label, q))
                rows.append(
                    BlockwiseMap(
                        [
                            Piece(
                                fp.target_label,
                                "constant",
                                value=value,
                                dom=OrdinalSet.point(ZERO),
                            )
                        ]
                    )
                )
    return rows


def fiber_family_values(n_size: int, m_size: int, f_vals, g_vals) -> list:
    """Finite-model view of the induced family, for exhaustive checks.

    Builds one-block carriers of the given sizes, presents f and g by
    per-point pieces, and returns the value of every induced row at every
    destination point (None where a row is silent).
    """
    n_carrier = Carrier([("n", OrdinalSet.interval(ZERO, Ordinal(n_size)))])
    m_carrier = Carrier([("m", OrdinalSet.interval(ZERO, Ordinal(m_size)))])
    from .carriers import CarrierPiece

    f_pieces = [
        CarrierPiece(
            "n", "m", "constant", value=Ordinal(f_vals[i]), dom=OrdinalSet.point(Ordinal(i))
        )
        for i in range(n_size)
    ]
    g_pieces = [
        Piece("n", "constant", value=Ordinal(g_vals[i]), dom=OrdinalSet.point(Ordinal(i)))
        for i in range(n_size)
    ]
    f_map = CarrierMap(n_carrier, m_carrier, f_pieces)
    g_map = BlockwiseMap(g_pieces)
    rows = _fiber_rows(f_map, g_map)
    out = []
    for row in rows:
        out.append(
            [
                (lambda v: v.nat_value() if v is not None else None)(
                    row.evaluate(m_carrier, ("m", Ordinal(i)))
                )
                for i in range(m_size)
            ]
        )
    return out


@dataclass
class TransferResult:
    carrier: Carrier
    alpha: Ordinal
    family: SurjectionFamily
    route: str  # 'reduce' | 'row' | 'sweep'
    reduction: Optional[ReductionResult]
    row_index: int = 0

    def surjection(self, element) -> Ordinal:
        if self.route == "reduce":
            return self.reduction.surjection(element)
        if self.route == "row":
            return self.family.row(self.row_index)(self.carrier, element)
        theta = self.carrier.order_type
        p = self.carrier.global_position(element)
        decoded = pair_decode(theta, p)
        if decoded is None:
            return ZERO
        j, q = decoded
        if not j.is_nat() or j.nat_value() >= len(self.family.rows):
            return ZERO
        if compare(q, theta) >= 0:
            return ZERO
        return self.family.row(j.nat_value())(self.carrier, self.carrier.element_at(q))

    def witness_for(self, gamma: Ordinal):
        if self.route == "reduce":
            return self.reduction.witness_for(gamma)
        rows = (
            [self.row_index] if self.route == "row" else range(len(self.family.rows))
        )
        for j in rows:
            image = self.family.row_image(j)
            if not image.contains(gamma):
                continue
            restriction = preimage_of(
                self.family.row(j), self.carrier, OrdinalSet.point(gamma)
            )
            for label in self.carrier.labels:
                positions = restriction.get(label)
                if positions is None or positions.is_empty():
                    continue
                y = (label, positions.min_element())
                if compare(self.family.row(j)(self.carrier, y), gamma) != 0:
                    continue
                if self.route == "row":
                    return y
                theta = self.carrier.order_type
                code = pair_encode(theta, Ordinal(j), self.carrier.global_position(y))
                return self.carrier.element_at(code)
        raise WitnessNotFound(f"no row reaches {fmt(gamma)}")

    def verify(self, bound: Ordinal) -> list:
        """Sampled bounded surjectivity check; returns report lines."""
        if self.route == "reduce":
            return verify_surjective(self.reduction, bound).lines()
        lines = []
        covered = OrdinalSet()
        want = OrdinalSet.interval(ZERO, bound)
        rows = (
            [self.row_index] if self.route == "row" else range(len(self.family.rows))
        )
        for j in rows:
            fresh = self.family.row_image(j).intersect(want).difference(covered)
            for lo, hi in fresh.intervals:
                for target in _interval_samples(lo, hi):
                    witness = self.witness_for(target)
                    value = self.surjection(witness)
                    if compare(value, target) != 0:
                        raise WitnessNotFound(f"re-evaluation failed at {fmt(target)}")
                    label, pos = witness
                    lines.append(
                        f"target={fmt(target)} witness={label}:{fmt(pos)} value={fmt(value)}"
                    )
            covered = covered.union(fresh)
        if not want.difference(covered).is_empty():
            raise WitnessNotFound(f"family does not cover [0, {fmt(bound)})")
        return lines


def finite_to_one_transfer(
    f: CarrierMap, g: BlockwiseMap, alpha: Ordinal, fuel: int = 10_000
) -> TransferResult:
    """From finite-to-one f: N -> M and surjective g: N -> [0, alpha),
    an evaluable surjection M -> [0, alpha).

    The fiber values are laid out as a presented family omega x M -> alpha
    and reduced when the reduction's precondition holds; otherwise the
    family is swept through the carrier's pairing enumeration (still a
    definable surjection, verified by bounded search).
    """
    if compare(alpha, OMEGA) < 0:
        raise PreconditionViolated("alpha must be infinite")
    if not g.is_total_on(f.source):
        raise PreconditionViolated("g must be total on the source carrier")
    rows = _fiber_rows(f, g)
    defaults = [Piece(label, "constant", value=ZERO) for label in f.dest.labels]
    rows = [BlockwiseMap(tuple(row.pieces) + tuple(defaults)) for row in rows]
    fam = SurjectionFamily(f.dest, alpha, rows)
    fam.check_coverage(row_bound=len(rows))
    try:
        reduction = reduce_omega_product(fam, fuel=fuel)
        return TransferResult(f.dest, alpha, fam, "reduce", reduction)
    except PreconditionViolated:
        pass
    span = OrdinalSet.interval(ZERO, alpha)
    for j in range(len(rows)):
        if span.is_subset(fam.row_image(j)):
            # a single fiber row already surjects (e.g. singleton fibers)
            return TransferResult(f.dest, alpha, fam, "row", None, row_index=j)
    if not f.dest.order_type.is_infinite():
        raise PreconditionViolated("cannot surject a finite carrier onto alpha")
    return TransferResult(f.dest, alpha, fam, "sweep", None)


# -- refuters ----------------------------------------------------------------------


@dataclass
class RefutationWitness:
    missed_set: QueryableSet
    distinguishers: list  # (tag, index, point, in_missed, in_listed)

    def recheck(self) -> bool:
        for _, _, point, in_missed, in_listed, set_ref in self.distinguishers:
            if self.missed_set.contains(point) != in_missed:
                return False
            if set_ref.contains(point) != in_listed:
                return False
            if in_missed == in_listed:
                return False
        return True


def _distinct_point(a: QueryableSet, b: QueryableSet, points: Iterable):
    for w in points:
        if a.contains(w) != b.contains(w):
            return w
    return None


def _listing_pairs(bound: int):
    """The first `bound` pairs (n, i) in diagonal order."""
    out = []
    level = 0
    while len(out) < bound:
        for n in range(level + 1):
            out.append((n, level - n))
            if len(out) >= bound:
                break
        level += 1
    return out


def refute_powerset(
    phi: Callable,
    carrier: Carrier,
    table: list,
    check_bound: int = 1000,
    sample_size: int = 64,
) -> RefutationWitness:
    """One extension step against a listing of subsets.

    The finite table plays the injective stage; the listing induces a
    family onto the table indices, the carrier's pairing enumeration
    collapses it to a single listing M -> P(M), and the diagonal of that
    listing is returned together with re-checkable distinguishers against
    every table entry and every listed set below the check bound.
    """
    points = carrier.sample_elements(sample_size)
    size = len(table)
    if size == 0:
        raise PreconditionViolated("table must be nonempty")
    for i in range(size):
        for j in range(i + 1, size):
            if _distinct_point(table[i], table[j], points) is None:
                raise TableNotInjective(f"table entries {i} and {j} agree on all samples")
    theta = carrier.order_type
    if not theta.is_infinite():
        raise PreconditionViolated("carrier must be infinite")

    induced_cache: dict = {}

    def induced(n: int, x) -> int:
        key = (n, x)
        if key not in induced_cache:
            candidate = phi(n, x)
            index = 0  # extended by zero
            for i in range(size):
                if _distinct_point(candidate, table[i], points) is None:
                    index = i
                    break
            induced_cache[key] = index
        return induced_cache[key]

    collapse_cache: dict = {}

    def collapse(x) -> int:
        if x in collapse_cache:
            return collapse_cache[x]
        p = carrier.global_position(x)
        decoded = pair_decode(theta, p)
        value = 0
        if decoded is not None:
            n, q = decoded
            if n.is_nat() and compare(q, theta) < 0:
                value = induced(n.nat_value(), carrier.element_at(q))
        collapse_cache[x] = value
        return value

    def listing(x) -> QueryableSet:
        return table[collapse(x)]

    missed = cantor_diagonal(listing, carrier)

    distinguishers = []
    pairs = _listing_pairs(check_bound)
    # guaranteed distinguishers against table entries: find a point whose
    # collapsed index is i, which then separates the diagonal from table[i]
    for i in range(size):
        found = None
        for n, q_idx in pairs:
            if q_idx >= len(points):
                continue
            y = points[q_idx]
            if induced(n, y) == i:
                code = pair_encode(theta, Ordinal(n), carrier.global_position(y))
                found = carrier.element_at(code)
                break
        if found is None:
            found = _distinct_point(missed, table[i], points)
        if found is None:
            raise WitnessNotFound(f"cannot separate the diagonal from table entry {i}")
        distinguishers.append(
            ("table", i, found, missed.contains(found), table[i].contains(found), table[i])
        )
    for n, q_idx in pairs:
        if q_idx >= len(points):
            continue
        listed = phi(n, points[q_idx])
        w = _distinct_point(missed, listed, points)
        if w is None:
            raise WitnessNotFound(
                f"cannot separate the diagonal from phi({n}, sample {q_idx})"
            )
        distinguishers.append(
            ((n, q_idx), None, w, missed.contains(w), listed.contains(w), listed)
        )
    witness = RefutationWitness(missed, distinguishers)
    if not witness.recheck():
        raise WitnessNotFound("a recorded distinguisher failed re-evaluation")
    return witness


def refute_infinite_powerset(
    phi: Callable,
    carrier: Carrier,
    table: list,
    check_bound: int = 1000,
    sample_size: int = 64,
    certificate_members: int = 100,
) -> RefutationWitness:
    """One extension step against a listing of infinite subsets.

    Runs the step at stage omega: a padded sweep surjection g: M -> omega
    carries subsets of omega into infinite subsets of M (pair codes tagged
    0 for members of an infinite set, 1 for non-members of a finite one);
    the table pulls back through that injection, the diagonal set B below
    omega is provably infinite (it contains every index beyond the table),
    and its image is returned with an infinite certificate.
    """
    from .coding import QueryableOrdinalSet, pset_to_infpset

    points = carrier.sample_elements(sample_size)
    size = len(table)
    if size == 0:
        raise PreconditionViolated("table must be nonempty")
    for i, entry in enumerate(table):
        if entry.certificate is None or entry.certificate[0] != "infinite":
            raise CertificateError(f"table entry {i} lacks an infinite certificate")
        entry.validate_certificate(carrier, samples=8)
    for i in range(size):
        for j in range(i + 1, size):
            if _distinct_point(table[i], table[j], points) is None:
                raise TableNotInjective(f"table entries {i} and {j} agree on all samples")
    theta = carrier.order_type
    if not theta.is_infinite():
        raise PreconditionViolated("carrier must be infinite")

    induced_cache: dict = {}

    def induced(n: int, x) -> int:
        key = (n, x)
        if key not in induced_cache:
            candidate = phi(n, x)
            if candidate.certificate is not None and candidate.certificate[0] == "finite":
                raise CertificateError("listed sets must be infinite")
            index = 0
            for i in range(size):
                if _distinct_point(candidate, table[i], points) is None:
                    index = i
                    break
            induced_cache[key] = index
        return induced_cache[key]

    g_cache: dict = {}

    def g_value(x) -> Ordinal:
        """Padded sweep M -> omega: tag 0 routes through the listing,
        tag 1 enumerates omega directly."""
        if x in g_cache:
            return g_cache[x]
        value = ZERO
        p = carrier.global_position(x)
        decoded = pair_decode(theta, p)
        if decoded is not None:
            j, q = decoded
            if compare(j, ZERO) == 0:
                inner = pair_decode(theta, q)
                if inner is not None:
                    n, y_pos = inner
                    if n.is_nat() and compare(y_pos, theta) < 0:
                        value = Ordinal(
                            induced(n.nat_value(), carrier.element_at(y_pos))
                        )
            elif compare(j, ONE) == 0 and q.is_nat():
                value = q
        g_cache[x] = value
        return value

    def g_witness(v: Ordinal):
        """An element with g_value == v, via the padding lane."""
        return carrier.element_at(pair_encode(theta, ONE, v))

    def carry(ordinal_set: QueryableOrdinalSet) -> QueryableSet:
        """t: subsets of omega -> infinite subsets of M."""
        image = pset_to_infpset(OMEGA, ordinal_set)

        def membership(x) -> bool:
            return image.contains(g_value(x))

        _, enum = image.certificate

        def enumerator(k: int):
            return g_witness(enum(k))

        return QueryableSet(membership, ("infinite", enumerator))

    def table_pullback(z: int) -> QueryableOrdinalSet:
        """u(z): the subset of omega whose carried image matches table[z],
        read through the tagged codes; garbage off the carried range."""
        entry = table[z]

        def zero_read(zeta: Ordinal) -> bool:
            return entry.contains(g_witness(pair_encode(OMEGA, zeta, ZERO)))

        def one_read(zeta: Ordinal) -> bool:
            return not entry.contains(g_witness(pair_encode(OMEGA, zeta, ONE)))

        for probe in range(sample_size):
            if zero_read(Ordinal(probe)):
                return QueryableOrdinalSet(zero_read, None)
        return QueryableOrdinalSet(one_read, None)

    pullbacks = [table_pullback(z) for z in range(size)]

    def diag_membership(zeta: Ordinal) -> bool:
        if not zeta.is_nat():
            return False
        z = zeta.nat_value()
        if z >= size:
            return True  # beyond the table: u(z) is empty, so z enters B
        return not pullbacks[z].contains(zeta)

    diagonal = QueryableOrdinalSet(
        diag_membership, ("infinite", lambda k: Ordinal(size + k))
    )
    missed = carry(diagonal)
    kind, enum = missed.certificate
    seen = set()
    for k in range(certificate_members):
        x = enum(k)
        if not carrier.is_element(x) or not missed.contains(x) or x in seen:
            raise CertificateError("infinite certificate construction failed")
        seen.add(x)

    distinguishers = []
    for i in range(size):
        w = None
        for probe in range(sample_size):
            zeta = Ordinal(probe + size)
            candidate = g_witness(pair_encode(OMEGA, zeta, ZERO))
            if missed.contains(candidate) != table[i].contains(candidate):
                w = candidate
                break
        if w is None:
            w = _distinct_point(missed, table[i], points)
        if w is None:
            raise WitnessNotFound(f"cannot separate the missed set from table entry {i}")
        distinguishers.append(
            ("table", i, w, missed.contains(w), table[i].contains(w), table[i])
        )
    pairs = _listing_pairs(check_bound)
    for n, q_idx in pairs:
        if q_idx >= len(points):
            continue
        listed = phi(n, points[q_idx])
        if listed.certificate is not None and listed.certificate[0] == "finite":
            raise CertificateError("listed sets must be infinite")
        search_points = list(points)
        for probe in range(sample_size):
            search_points.append(g_witness(Ordinal(probe)))
            search_points.append(
                g_witness(pair_encode(OMEGA, Ordinal(probe + size), ZERO))
            )
        w = _distinct_point(missed, listed, search_points)
        if w is None:
            raise WitnessNotFound(
                f"cannot separate the missed set from phi({n}, sample {q_idx})"
            )
        distinguishers.append(
            ((n, q_idx), None, w, missed.contains(w), listed.contains(w), listed)
        )
    witness = RefutationWitness(missed, distinguishers)
    if not witness.recheck():
        raise WitnessNotFound("a recorded distinguisher failed re-evaluation")
    return witness


# -- power Dedekind infiniteness witness ---------------------------------------------


def kuratowski_witness(
    g: Callable, carrier: Carrier, bound: int, sample_size: int = 256
) -> list:
    """From an evaluable surjection M -> omega (surjective below ``bound``),
    the disjoint fiber family n -> g^{-1}({n}) witnessing that the power
    set is Dedekind infinite.  Raises on an empty fiber below the bound."""
    points = carrier.sample_elements(sample_size)
    fibers = []
    for n in range(bound):
        target = Ordinal(n)
        witness = None
        for x in points:
            if compare(g(x), target) == 0:
                witness = x
                break
        if witness is None:
            raise EmptyFiber(f"no sampled preimage of {n}; g is not surjective")
        fibers.append(
            QueryableSet(lambda x, target=target: compare(g(x), target) == 0)
        )
    return fibers


# -- well-order code surrogate ---------------------------------------------------------


def ordinal_to_bits(x: Ordinal) -> tuple:
    """Canonical code: the set of set-bit indices of the rendering's bytes."""
    text = fmt(x)
    bits = []
    for i, ch in enumerate(text.encode("ascii")):
        for j in range(8):
            if ch >> j & 1:
                bits.append(8 * i + j)
    return tuple(bits)


def bits_to_ordinal(bits: Iterable) -> Ordinal:
    """Inverse of :func:`ordinal_to_bits`; non-codes decode to 0."""
    bit_set = set(bits)
    if not bit_set:
        return ZERO
    if any(not isinstance(b, int) or b < 0 for b in bit_set):
        return ZERO
    size = max(bit_set) // 8 + 1
    chars = []
    for i in range(size):
        byte = sum(1 << j for j in range(8) if 8 * i + j in bit_set)
        if not (32 <= byte < 127):
            return ZERO
        chars.append(chr(byte))
    text = "".join(chars)
    try:
        value = parse(text)
    except Exception:
        return ZERO
    if fmt(value) != text:
        return ZERO  # only canonical renderings count as codes
    return value


def _finite_strict_order_type(pairs: list) -> int:
    field_points = set()
    relation = set()
    for a, b in pairs:
        field_points.add(a)
        field_points.add(b)
        relation.add((a, b))
    for a in field_points:
        if (a, a) in relation:
            return 0
    for a in field_points:
        for b in field_points:
            if a == b:
                continue
            if ((a, b) in relation) == ((b, a) in relation):
                return 0  # not total (or both directions present)
    for a, b in relation:
        for c in field_points:
            if (b, c) in relation and (a, c) not in relation:
                return 0  # not transitive
    return len(field_points)


def wellorder_decode(code) -> Ordinal:
    """Total decoder from codes to ordinals below epsilon-0.

    A list of pairs of naturals is read as a finite strict order (its
    size is the order type); a collection of naturals is read as the
    bit-set code of a canonical rendering.  Everything else decodes to 0.
    """
    items = list(code)
    if items and all(
        isinstance(item, (tuple, list)) and len(item) == 2 for item in items
    ):
        pairs = [(int(a), int(b)) for a, b in items]
        return Ordinal(_finite_strict_order_type(pairs))
    if all(isinstance(item, int) for item in items):
        return bits_to_ordinal(items)
    return ZERO
