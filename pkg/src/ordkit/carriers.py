"""Abstract countable carriers and piecewise maps into ordinals.

A :class:`Carrier` presents a countable set as finitely many labeled
blocks; an element is ``(label, position)`` with the position below the
block shape's order type.  Maps out of a carrier are block-wise monotone
or constant (:class:`BlockwiseMap`); a monotone piece is the unique order
isomorphism from (an initial segment of) its domain onto its target set,
extended by zero beyond the target's length.  This class is closed under
image, preimage, restriction and difference, with computable order types.

:class:`SurjectionFamily` presents a surjection f: omega x M -> alpha by
rows (finitely many explicit rows plus an optional parametric tail), and
:class:`QueryableSet` is a membership-oracle subset of a carrier.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .core import ZERO, Ordinal, add, compare, fmt, left_subtract, parse, parse_template
from .errors import (
    BoundViolation,
    CertificateError,
    CoverageBroken,
    OutOfRangeError,
    ParseError,
    RowUndefined,
)
from .intervals import OrdinalSet, parse_interval_set

__all__ = [
    "Carrier",
    "Piece",
    "BlockwiseMap",
    "CarrierMap",
    "SurjectionFamily",
    "QueryableSet",
    "image_of",
    "preimage_of",
    "family_row_image",
    "parse_instance",
]


class Carrier:
    """Labeled blocks; elements are (label, position < block order type)."""

    def __init__(self, blocks: Iterable):
        blocks = [(label, shape) for label, shape in blocks]
        labels = [label for label, _ in blocks]
        if len(set(labels)) != len(labels):
            raise BoundViolation("block labels must be distinct")
        for label, shape in blocks:
            if shape.is_empty():
                raise BoundViolation(f"block {label!r} has an empty shape")
        self.blocks = tuple(blocks)
        self._ot = {label: shape.order_type() for label, shape in blocks}
        offsets = {}
        cum = ZERO
        for label, _ in blocks:
            offsets[label] = cum
            cum = add(cum, self._ot[label])
        self._offsets = offsets
        self.order_type = cum

    @property
    def labels(self) -> tuple:
        return tuple(label for label, _ in self.blocks)

    def block_order_type(self, label: str) -> Ordinal:
        return self._ot[label]

    def block_positions(self, label: str) -> OrdinalSet:
        return OrdinalSet.interval(ZERO, self._ot[label])

    def full_restriction(self) -> dict:
        return {label: self.block_positions(label) for label in self.labels}

    def is_element(self, element) -> bool:
        label, pos = element
        return label in self._ot and compare(pos, self._ot[label]) < 0

    def check_element(self, element):
        if not self.is_element(element):
            raise OutOfRangeError(f"{element!r} is not a carrier element")

    def global_position(self, element) -> Ordinal:
        self.check_element(element)
        label, pos = element
        return add(self._offsets[label], pos)

    def element_at(self, global_pos: Ordinal):
        for label, _ in self.blocks:
            off = self._offsets[label]
            end = add(off, self._ot[label])
            if compare(global_pos, end) < 0:
                if compare(off, global_pos) <= 0:
                    return (label, left_subtract(off, global_pos))
                break
        raise OutOfRangeError(f"global position {global_pos} out of range")

    def global_range_restriction(self, lo: Ordinal, hi: Ordinal) -> dict:
        """Per-block position sets for the global position window [lo, hi)."""
        out = {}
        for label, _ in self.blocks:
            off = self._offsets[label]
            end = add(off, self._ot[label])
            s_lo = lo if compare(lo, off) >= 0 else off
            s_hi = hi if compare(hi, end) <= 0 else end
            if compare(s_lo, s_hi) < 0:
                out[label] = OrdinalSet.interval(
                    left_subtract(off, s_lo), left_subtract(off, s_hi)
                )
            else:
                out[label] = OrdinalSet()
        return out

    def sample_elements(self, count: int) -> list:
        """A deterministic spread of elements: small naturals plus a few
        limit-scale positions per block, round-robin across blocks."""
        ladders = []
        for label, _ in self.blocks:
            theta = self._ot[label]
            ladder = []
            for k in range(count):
                p = Ordinal(k)
                if compare(p, theta) < 0:
                    ladder.append((label, p))
            for text in ("w", "w+1", "w*2", "w^2", "w^2+w", "w^3"):
                p = parse(text)
                if compare(p, theta) < 0:
                    ladder.append((label, p))
            ladders.append(ladder)
        out = []
        i = 0
        while len(out) < count and any(ladders):
            progressed = False
            for ladder in ladders:
                if i < len(ladder):
                    out.append(ladder[i])
                    progressed = True
                    if len(out) >= count:
                        break
            if not progressed:
                break
            i += 1
        return out


@dataclass(frozen=True)
class Piece:
    """One block-wise piece of a map into ordinals.

    ``dom`` is the position set the piece covers (None means the whole
    block).  A monotone piece maps the initial segment of its domain
    isomorphically onto ``target`` and positions beyond the target's
    order type to 0; a constant piece maps everything to ``value``.
    """

    label: str
    kind: str  # 'monotone' | 'constant'
    target: Optional[OrdinalSet] = None
    value: Optional[Ordinal] = None
    dom: Optional[OrdinalSet] = None

    def domain_in(self, carrier: Carrier) -> OrdinalSet:
        if self.dom is None:
            return carrier.block_positions(self.label)
        return self.dom


class BlockwiseMap:
    """A finite list of pieces; evaluation picks the covering piece."""

    def __init__(self, pieces: Iterable):
        self.pieces = tuple(pieces)

    def evaluate(self, carrier: Carrier, element) -> Optional[Ordinal]:
        carrier.check_element(element)
        label, pos = element
        for piece in self.pieces:
            if piece.label != label:
                continue
            dom = piece.domain_in(carrier)
            if not dom.contains(pos):
                continue
            if piece.kind == "constant":
                return piece.value
            r = dom.locate(pos)
            if compare(r, piece.target.order_type()) < 0:
                return piece.target.enumerate(r)
            return ZERO
        return None

    def __call__(self, carrier: Carrier, element) -> Ordinal:
        value = self.evaluate(carrier, element)
        if value is None:
            raise OutOfRangeError(f"map undefined at {element!r}")
        return value

    def is_total_on(self, carrier: Carrier) -> bool:
        for label in carrier.labels:
            covered = OrdinalSet()
            for piece in self.pieces:
                if piece.label == label:
                    covered = covered.union(piece.domain_in(carrier))
            if not carrier.block_positions(label).is_subset(covered):
                return False
        return True


def image_of(
    map_: BlockwiseMap, carrier: Carrier, restriction: Optional[dict] = None
) -> OrdinalSet:
    """Exact image of the per-block restriction (None = full carrier)."""
    if restriction is None:
        restriction = carrier.full_restriction()
    out = OrdinalSet()
    for piece in map_.pieces:
        r = restriction.get(piece.label)
        if r is None or r.is_empty():
            continue
        dom = piece.domain_in(carrier)
        part = dom.intersect(r)
        if part.is_empty():
            continue
        if piece.kind == "constant":
            out = out.union(OrdinalSet.point(piece.value))
            continue
        positions = dom.positions_of(part)
        length = piece.target.order_type()
        below = positions.intersect(OrdinalSet.interval(ZERO, length))
        out = out.union(piece.target.select_positions(below))
        if not positions.difference(OrdinalSet.interval(ZERO, length)).is_empty():
            out = out.union(OrdinalSet.point(ZERO))
    return out


def preimage_of(map_: BlockwiseMap, carrier: Carrier, target_set: OrdinalSet) -> dict:
    """Exact preimage as a per-block position-set restriction."""
    out = {label: OrdinalSet() for label in carrier.labels}
    for piece in map_.pieces:
        dom = piece.domain_in(carrier)
        if piece.kind == "constant":
            if target_set.contains(piece.value):
                out[piece.label] = out[piece.label].union(dom)
            continue
        length = piece.target.order_type()
        hit = piece.target.positions_of(target_set.intersect(piece.target))
        hit = hit.intersect(OrdinalSet.interval(ZERO, length))
        out[piece.label] = out[piece.label].union(dom.select_positions(hit))
        if target_set.contains(ZERO):
            total = dom.order_type()
            if compare(length, total) < 0:
                overflow = OrdinalSet.interval(length, total)
                out[piece.label] = out[piece.label].union(dom.select_positions(overflow))
    return out


# -- carrier-to-carrier maps --------------------------------------------------


@dataclass(frozen=True)
class CarrierPiece:
    """A piece of a map between carriers: source block to target block."""

    label: str
    target_label: str
    kind: str  # 'monotone' | 'constant'
    target: Optional[OrdinalSet] = None  # positions in the target block
    value: Optional[Ordinal] = None  # constant target position
    dom: Optional[OrdinalSet] = None

    def domain_in(self, carrier: Carrier) -> OrdinalSet:
        if self.dom is None:
            return carrier.block_positions(self.label)
        return self.dom


class CarrierMap:
    """A block-wise map N -> M between carriers."""

    def __init__(self, source: Carrier, dest: Carrier, pieces: Iterable):
        self.source = source
        self.dest = dest
        self.pieces = tuple(pieces)

    def evaluate(self, element):
        self.source.check_element(element)
        label, pos = element
        for piece in self.pieces:
            if piece.label != label:
                continue
            dom = piece.domain_in(self.source)
            if not dom.contains(pos):
                continue
            if piece.kind == "constant":
                return (piece.target_label, piece.value)
            r = dom.locate(pos)
            if compare(r, piece.target.order_type()) < 0:
                return (piece.target_label, piece.target.enumerate(r))
            return (piece.target_label, ZERO)
        raise OutOfRangeError(f"map undefined at {element!r}")

    def fiber(self, element) -> list:
        """All source elements mapping to ``element``; requires finiteness."""
        self.dest.check_element(element)
        label, pos = element
        out = []
        for piece in self.pieces:
            if piece.target_label != label:
                continue
            dom = piece.domain_in(self.source)
            if piece.kind == "constant":
                if compare(piece.value, pos) == 0:
                    total = dom.order_type()
                    if not total.is_nat():
                        raise BoundViolation(
                            f"infinite fiber: constant piece on block {piece.label!r}"
                        )
                    for p in dom.iter_prefix(total.nat_value()):
                        out.append((piece.label, p))
                continue
            length = piece.target.order_type()
            if piece.target.contains(pos):
                r = piece.target.locate(pos)
                if compare(r, dom.order_type()) < 0:
                    out.append((piece.label, dom.enumerate(r)))
            if pos.is_zero():
                # zero-extension overflow: positions beyond the target length
                total = dom.order_type()
                if compare(length, total) < 0:
                    overflow = left_subtract(length, total)
                    if not overflow.is_nat():
                        raise BoundViolation(
                            f"infinite fiber over 0 on block {piece.label!r}"
                        )
                    for k in range(overflow.nat_value()):
                        out.append((piece.label, dom.enumerate(add(length, Ordinal(k)))))
        return out


# -- queryable subsets ---------------------------------------------------------


@dataclass
class QueryableSet:
    """A subset of a carrier given by a membership test.

    ``certificate`` is optional: ``('finite', tuple_of_elements)`` for an
    exactly listed set, or ``('infinite', enumerator)`` with an injective
    enumerator from naturals to members.
    """

    membership: Callable
    certificate: Optional[tuple] = None

    def contains(self, element) -> bool:
        return bool(self.membership(element))

    def validate_certificate(self, carrier: Carrier, samples: int = 16):
        if self.certificate is None:
            return
        kind, payload = self.certificate
        if kind == "finite":
            for x in payload:
                if not self.contains(x):
                    raise CertificateError(f"listed member {x!r} fails membership")
            listed = set(payload)
            for x in carrier.sample_elements(samples):
                if x not in listed and self.contains(x):
                    raise CertificateError(f"unlisted member {x!r} under a finite certificate")
        elif kind == "infinite":
            seen = set()
            for k in range(samples):
                x = payload(k)
                if not carrier.is_element(x) or not self.contains(x):
                    raise CertificateError(f"enumerated point {x!r} is not a member")
                if x in seen:
                    raise CertificateError("enumerator repeated a point")
                seen.add(x)
        else:
            raise CertificateError(f"unknown certificate kind {kind!r}")


# -- surjection families --------------------------------------------------------


class SurjectionFamily:
    """A presented surjection f: omega x M -> alpha given by rows."""

    def __init__(
        self,
        carrier: Carrier,
        alpha: Ordinal,
        rows: Iterable,
        tail: Optional[tuple] = None,
    ):
        self.carrier = carrier
        self.alpha = alpha
        self.rows = tuple(rows)
        if tail is not None:
            start, rule = tail
            if start > len(self.rows):
                raise BoundViolation("tail must start right after the explicit rows")
            self.tail_start = start
            self.tail_rule = rule
        else:
            self.tail_start = None
            self.tail_rule = None
        self._row_cache: dict = {}
        self._image_cache: dict = {}

    def has_row(self, n: int) -> bool:
        return n < len(self.rows) or self.tail_rule is not None

    def row(self, n: int) -> BlockwiseMap:
        if n < len(self.rows):
            return self.rows[n]
        if self.tail_rule is None:
            raise RowUndefined(f"row {n} is not defined (no tail rule)")
        if n not in self._row_cache:
            if n < self.tail_start:
                raise RowUndefined(f"row {n} below the tail start {self.tail_start}")
            self._row_cache[n] = self.tail_rule(n)
        return self._row_cache[n]

    def row_image(self, n: int) -> OrdinalSet:
        if n not in self._image_cache:
            self._image_cache[n] = image_of(self.row(n), self.carrier)
        return self._image_cache[n]

    def delta(self, n: int) -> Ordinal:
        return self.row_image(n).order_type()

    def evaluate(self, n: int, element) -> Ordinal:
        return self.row(n)(self.carrier, element)

    def check_coverage(self, row_bound: int = 16, value_bound: Optional[Ordinal] = None):
        """Row images must stay inside [0, alpha) and jointly cover it
        (coverage checked below ``value_bound``, default alpha, using the
        first ``row_bound`` rows)."""
        span = OrdinalSet.interval(ZERO, self.alpha)
        union = OrdinalSet()
        n = 0
        while n < row_bound and self.has_row(n):
            image = self.row_image(n)
            if not image.is_subset(span):
                raise CoverageBroken(f"row {n} maps outside [0, {fmt(self.alpha)})")
            union = union.union(image)
            n += 1
        bound = value_bound if value_bound is not None else self.alpha
        want = OrdinalSet.interval(ZERO, bound)
        if not want.is_subset(union):
            missing = want.difference(union)
            raise CoverageBroken(
                f"rows 0..{n - 1} do not cover [0, {fmt(bound)}); missing {missing}"
            )


def family_row_image(fam: SurjectionFamily, n: int) -> OrdinalSet:
    """Image of row ``n`` over the full carrier."""
    return fam.row_image(n)


# -- instance files --------------------------------------------------------------


def _parse_piece(text: str, template: bool):
    head, sep, rest = text.partition("->")
    if not sep:
        raise ParseError(f"piece needs 'label -> kind ...': {text!r}")
    label = head.strip()
    rest = rest.strip()
    if rest.startswith("monotone"):
        body = rest[len("monotone"):].strip()
        target = parse_interval_set(body, template=template)
        if template:
            return lambda n, label=label, target=target: Piece(
                label, "monotone", target=target(n)
            )
        return Piece(label, "monotone", target=target)
    if rest.startswith("constant"):
        body = rest[len("constant"):].strip()
        if template:
            value = parse_template(body)
            return lambda n, label=label, value=value: Piece(label, "constant", value=value(n))
        return Piece(label, "constant", value=parse(body))
    raise ParseError(f"unknown piece kind in {text!r}")


def _parse_row(text: str, template: bool):
    parts = [p for p in (s.strip() for s in text.split(";")) if p]
    pieces = [_parse_piece(p, template) for p in parts]
    if template:
        return lambda n, pieces=pieces: BlockwiseMap(p(n) for p in pieces)
    return BlockwiseMap(pieces)


def parse_instance(text: str) -> SurjectionFamily:
    """Parse the line-oriented instance format.

    ::

        carrier: a:[0,w); b:[w,w*2)
        alpha: w^2
        row 0: a -> monotone [0,w) ; b -> constant 5
        tail: n >= 1: a -> monotone [0,w*(n+1)) ; b -> constant n

    Lines starting with ``#`` are comments.
    """
    carrier = None
    alpha = None
    rows: dict = {}
    tail = None
    for raw_line in text.splitlines():
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise ParseError(f"expected 'key: value' line, got {line!r}")
        key = key.strip()
        if key == "carrier":
            blocks = []
            for part in value.split(";"):
                part = part.strip()
                if not part:
                    continue
                label, bsep, shape_text = part.partition(":")
                if not bsep:
                    raise ParseError(f"block needs 'label:intervals': {part!r}")
                blocks.append((label.strip(), parse_interval_set(shape_text.strip())))
            carrier = Carrier(blocks)
        elif key == "alpha":
            alpha = parse(value.strip())
        elif key.startswith("row"):
            index_text = key[len("row"):].strip()
            if not index_text.isdigit():
                raise ParseError(f"bad row index in {key!r}")
            rows[int(index_text)] = _parse_row(value, template=False)
        elif key == "tail":
            spec, tsep, row_text = value.partition(":")
            if not tsep:
                raise ParseError(f"tail needs 'n >= N: row': {value!r}")
            spec = spec.replace(" ", "")
            if not spec.startswith("n>="):
                raise ParseError(f"tail condition must be 'n >= N': {spec!r}")
            start = int(spec[len("n>="):])
            tail = (start, _parse_row(row_text, template=True))
        else:
            raise ParseError(f"unknown instance key {key!r}")
    if carrier is None or alpha is None:
        raise ParseError("instance needs 'carrier:' and 'alpha:' lines")
    row_maps = []
    for i in range(len(rows)):
        if i not in rows:
            raise ParseError(f"row {i} is missing (rows must be consecutive from 0)")
        row_maps.append(rows[i])
    if tail is not None and tail[0] != len(row_maps):
        raise ParseError(
            f"tail starts at {tail[0]} but explicit rows end at {len(row_maps) - 1}"
        )
    fam = SurjectionFamily(carrier, alpha, row_maps, tail)
    probe = [*range(len(row_maps))] + ([len(row_maps)] if tail else [])
    for n in probe:
        row = fam.row(n)
        for piece in row.pieces:
            if piece.label not in carrier.labels:
                raise ParseError(f"row {n} names unknown block {piece.label!r}")
        if not row.is_total_on(carrier):
            raise ParseError(f"row {n} does not cover every block")
    return fam


def load_instance(path) -> SurjectionFamily:
    with open(path, "r", encoding="ascii") as handle:
        return parse_instance(handle.read())
