"""Explicit codings below epsilon-0.

Digit maps (the finite-support view of CNF), a digit-wise Cantor pairing
injection alpha x alpha -> alpha, a finite-set coding fin(alpha) -> alpha,
a constructive bijection combinator from two opposing injections, the
omega-power bijection w**alpha <-> alpha built from those pieces, and the
injection P(alpha) -> P_inf(alpha) on queryable sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .core import OMEGA, ONE, ZERO, Ordinal, add, compare, left_subtract, multiply, omega_power
from .errors import BoundViolation, CertificateError, FuelExhausted, InconsistentMapSpec

__all__ = [
    "DigitMap",
    "to_digits",
    "from_digits",
    "digitmap_rightlex_cmp",
    "cantor_pair",
    "cantor_unpair",
    "pair_encode",
    "pair_decode",
    "fin_encode",
    "fin_decode",
    "MapSpec",
    "CsbBijection",
    "csb_bijection",
    "OmegaPowerBijection",
    "omega_power_bijection",
    "QueryableOrdinalSet",
    "pset_to_infpset",
]


# -- digit maps --------------------------------------------------------------


class DigitMap:
    """A finite-support function from exponents (ordinals) to digits >= 1."""

    __slots__ = ("_digits",)

    def __init__(self, digits: Optional[dict] = None):
        cleaned = {}
        for exp, digit in (digits or {}).items():
            if digit < 0:
                raise BoundViolation("digits must be naturals")
            if digit:
                cleaned[exp] = digit
        self._digits = cleaned

    def digit(self, exp: Ordinal) -> int:
        return self._digits.get(exp, 0)

    @property
    def support(self) -> list:
        return sorted(self._digits, key=_OrdKey, reverse=True)

    def items_desc(self) -> list:
        return [(e, self._digits[e]) for e in self.support]

    def __eq__(self, other):
        if not isinstance(other, DigitMap):
            return NotImplemented
        return self._digits == other._digits

    def __hash__(self):
        return hash(frozenset(self._digits.items()))

    def __len__(self):
        return len(self._digits)

    def __repr__(self):
        body = ", ".join(f"{e}:{d}" for e, d in self.items_desc())
        return f"DigitMap({{{body}}})"


class _OrdKey:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def __lt__(self, other):
        return compare(self.value, other.value) < 0


def to_digits(x: Ordinal) -> DigitMap:
    return DigitMap(dict(x.terms))


def from_digits(d: DigitMap) -> Ordinal:
    return Ordinal.from_terms(d.items_desc())


def digitmap_rightlex_cmp(a: DigitMap, b: DigitMap) -> int:
    """Compare at the largest exponent where the digit maps differ."""
    exps = set(a._digits) | set(b._digits)
    for e in sorted(exps, key=_OrdKey, reverse=True):
        da, db = a.digit(e), b.digit(e)
        if da != db:
            return -1 if da < db else 1
    return 0


# -- natural-number pairing ---------------------------------------------------


def cantor_pair(a: int, b: int) -> int:
    """Cantor pairing (a+b)(a+b+1)/2 + b, a bijection of pairs onto naturals."""
    s = a + b
    return s * (s + 1) // 2 + b


def cantor_unpair(z: int) -> tuple:
    s = (math.isqrt(8 * z + 1) - 1) // 2
    b = z - s * (s + 1) // 2
    return s - b, b


def _tuple_code(digits: tuple) -> int:
    """Right-nested Cantor coding of a fixed-arity tuple of naturals."""
    if not digits:
        return 0
    code = digits[-1]
    for d in reversed(digits[:-1]):
        code = cantor_pair(d, code)
    return code


def _tuple_decode(code: int, arity: int) -> tuple:
    if arity == 0:
        return ()
    out = []
    for _ in range(arity - 1):
        d, code = cantor_unpair(code)
        out.append(d)
    out.append(code)
    return tuple(out)


# -- degree reduction: embed [0, alpha) into [0, w**mu), mu = degree(alpha) --


def _require_infinite(alpha: Ordinal):
    if compare(alpha, OMEGA) < 0:
        raise BoundViolation(f"alpha must be infinite, got {alpha}")


def _is_omega_power(alpha: Ordinal) -> bool:
    return len(alpha.terms) == 1 and alpha.terms[0][1] == 1


def _embed(alpha: Ordinal, x: Ordinal) -> Ordinal:
    """Injection [0, alpha) -> [0, w**mu); identity when alpha = w**mu."""
    if compare(x, alpha) >= 0:
        raise BoundViolation(f"{x} is not below {alpha}")
    if _is_omega_power(alpha):
        return x
    mu = alpha.degree
    power = omega_power(mu)
    # x = w**mu * q + r with q a natural (alpha < w**(mu+1) forces q < w)
    q = 0
    r = x
    for e, c in x.terms:
        if compare(e, mu) == 0:
            q = c
            r = left_subtract(multiply(power, Ordinal(c)), x)
            break
        if compare(e, mu) < 0:
            break
    digits = dict(r.terms)
    d0 = digits.pop(ZERO, 0)
    digits[ZERO] = cantor_pair(q, d0)
    return from_digits(DigitMap(digits))


def _unembed(alpha: Ordinal, u: Ordinal) -> Optional[Ordinal]:
    """Inverse of :func:`_embed` on its range; None off the range."""
    if _is_omega_power(alpha):
        return u if compare(u, alpha) < 0 else None
    mu = alpha.degree
    if u.terms and compare(u.degree, mu) >= 0:
        return None
    digits = dict(u.terms)
    q, d0 = cantor_unpair(digits.pop(ZERO, 0))
    if d0:
        digits[ZERO] = d0
    r = from_digits(DigitMap(digits))
    x = add(multiply(omega_power(mu), Ordinal(q)), r)
    if compare(x, alpha) >= 0:
        return None
    return x


# -- pairing on ordinals -------------------------------------------------------


def pair_encode(alpha: Ordinal, x: Ordinal, y: Ordinal) -> Ordinal:
    """Injective pairing: [0, alpha) x [0, alpha) -> [0, alpha), alpha infinite.

    Both components are embedded into w**degree(alpha) and paired
    digit-wise with the Cantor pairing.
    """
    _require_infinite(alpha)
    if compare(x, alpha) >= 0 or compare(y, alpha) >= 0:
        raise BoundViolation("pair components must lie below alpha")
    u, v = _embed(alpha, x), _embed(alpha, y)
    digits = {}
    for e in set(dict(u.terms)) | set(dict(v.terms)):
        du = dict(u.terms).get(e, 0)
        dv = dict(v.terms).get(e, 0)
        digits[e] = cantor_pair(du, dv)
    return from_digits(DigitMap(digits))


def pair_decode(alpha: Ordinal, z: Ordinal) -> Optional[tuple]:
    """Inverse of :func:`pair_encode` on its range; None off the range."""
    _require_infinite(alpha)
    if compare(z, alpha) >= 0:
        return None
    mu = alpha.degree
    if z.terms and compare(z.degree, mu) >= 0:
        return None  # pair codes live strictly below w**mu
    u_digits, v_digits = {}, {}
    for e, c in z.terms:
        du, dv = cantor_unpair(c)
        if du:
            u_digits[e] = du
        if dv:
            v_digits[e] = dv
    x = _unembed(alpha, from_digits(DigitMap(u_digits)))
    y = _unembed(alpha, from_digits(DigitMap(v_digits)))
    if x is None or y is None:
        return None
    return x, y


# -- finite-set coding ---------------------------------------------------------


def fin_encode(alpha: Ordinal, elements: Iterable) -> Ordinal:
    """Injective coding of finite subsets of [0, alpha) into [0, alpha).

    Per exponent column the member digits are tuple-coded; the arity is
    prefixed into the constant slot.  The empty set maps to 0.
    """
    _require_infinite(alpha)
    members = sorted(elements, key=_OrdKey, reverse=True)
    for a, b in zip(members, members[1:]):
        if compare(a, b) == 0:
            raise BoundViolation("finite-set coding needs distinct elements")
    if not members:
        return ZERO
    embedded = [_embed(alpha, x) for x in members]
    embedded.sort(key=_OrdKey, reverse=True)
    arity = len(embedded)
    support = set()
    for u in embedded:
        support.update(dict(u.terms))
    digits = {}
    for e in support:
        column = tuple(dict(u.terms).get(e, 0) for u in embedded)
        digits[e] = _tuple_code(column)
    digits[ZERO] = cantor_pair(arity, digits.get(ZERO, 0))
    return from_digits(DigitMap(digits))


def fin_decode(alpha: Ordinal, z: Ordinal) -> Optional[list]:
    """Inverse of :func:`fin_encode` on its range; None off the range.

    Returns the strictly decreasing list of members.
    """
    _require_infinite(alpha)
    if z.is_zero():
        return []
    if compare(z, alpha) >= 0:
        return None
    digits = dict(z.terms)
    arity, d0 = cantor_unpair(digits.pop(ZERO, 0))
    if arity < 1:
        return None
    if d0:
        digits[ZERO] = d0
    per_member: list = [dict() for _ in range(arity)]
    for e, code in digits.items():
        column = _tuple_decode(code, arity)
        for u_digits, d in zip(per_member, column):
            if d:
                u_digits[e] = d
    members = []
    for u_digits in per_member:
        x = _unembed(alpha, from_digits(DigitMap(u_digits)))
        if x is None:
            return None
        members.append(x)
    if len(set(members)) != len(members):
        return None
    members.sort(key=_OrdKey, reverse=True)
    if compare(fin_encode(alpha, members), z) != 0:
        return None
    return members


# -- constructive bijection from two injections ---------------------------------


@dataclass
class MapSpec:
    """An evaluable injection with range test and inverse-on-range."""

    apply: Callable
    in_range: Callable
    invert: Callable
    label: str = ""


class CsbBijection:
    """Bijection built from injections f: A -> B and g: B -> A.

    Elements whose backward chain terminates on the A side (or never
    terminates, including cycles) map through f; the rest map through
    the inverse of g.  Chain chasing is fuel-bounded and memoized per
    instance; instances are single-owner.
    """

    def __init__(self, f: MapSpec, g: MapSpec, fuel: int = 10_000):
        self.f = f
        self.g = g
        self.fuel = fuel
        self._side_a: dict = {}
        self._side_b: dict = {}

    def _checked_invert(self, spec: MapSpec, value):
        pre = spec.invert(value)
        back = spec.apply(pre)
        if back != value and not _same(back, value):
            raise InconsistentMapSpec(
                f"inverse check failed for {spec.label or 'map'}: {pre!r} -> {back!r} != {value!r}"
            )
        return pre

    def _classify_a(self, a):
        if a in self._side_a:
            return self._side_a[a]
        seen = {}
        trail = []
        value = a
        for _ in range(self.fuel):
            if value in self._side_a:
                side = self._side_a[value]
                break
            if value in seen:
                side = "A"  # cyclic chain: route through f
                break
            seen[value] = True
            trail.append(value)
            if not self.g.in_range(value):
                side = "A"
                break
            b = self._checked_invert(self.g, value)
            if not self.f.in_range(b):
                side = "B"
                break
            value = self._checked_invert(self.f, b)
        else:
            raise FuelExhausted(f"chain classification undecided after {self.fuel} steps")
        for visited in trail:
            self._side_a[visited] = side
        return side

    def _classify_b(self, b):
        if b in self._side_b:
            return self._side_b[b]
        seen = {}
        trail = []
        value = b
        for _ in range(self.fuel):
            if value in self._side_b:
                side = self._side_b[value]
                break
            if value in seen:
                side = "A"
                break
            seen[value] = True
            trail.append(value)
            if not self.f.in_range(value):
                side = "B"
                break
            a = self._checked_invert(self.f, value)
            if not self.g.in_range(a):
                side = "A"
                break
            value = self._checked_invert(self.g, a)
        else:
            raise FuelExhausted(f"chain classification undecided after {self.fuel} steps")
        for visited in trail:
            self._side_b[visited] = side
        return side

    def forward(self, a):
        if self._classify_a(a) == "A":
            return self.f.apply(a)
        return self._checked_invert(self.g, a)

    def backward(self, b):
        if self._classify_b(b) == "B":
            return self.g.apply(b)
        return self._checked_invert(self.f, b)


def _same(a, b) -> bool:
    if isinstance(a, Ordinal) and isinstance(b, Ordinal):
        return compare(a, b) == 0
    return a == b


def csb_bijection(f: MapSpec, g: MapSpec, fuel: int = 10_000) -> CsbBijection:
    """Build the bijection evaluator for injections f: A -> B, g: B -> A."""
    return CsbBijection(f, g, fuel)


# -- the omega-power bijection ----------------------------------------------------


class OmegaPowerBijection:
    """Bijection between [0, w**alpha) and [0, alpha) for infinite alpha.

    Forward (down) codes a value's digit map as a finite set of paired
    (exponent, digit) codes inside alpha; the opposing injection sends
    each ordinal below alpha to its omega power.  The two are glued by
    the two-sided-injection combinator.
    """

    def __init__(self, alpha: Ordinal, fuel: int = 10_000):
        _require_infinite(alpha)
        self.alpha = alpha
        self.bound = omega_power(alpha)

        def encode(v: Ordinal) -> Ordinal:
            pairs = [pair_encode(alpha, e, Ordinal(c)) for e, c in v.terms]
            return fin_encode(alpha, pairs)

        def in_encode_range(z: Ordinal) -> bool:
            return self._decode(z) is not None

        def decode(z: Ordinal) -> Ordinal:
            v = self._decode(z)
            if v is None:
                raise InconsistentMapSpec(f"{z} is not an encoded digit map")
            return v

        def power(g: Ordinal) -> Ordinal:
            return omega_power(g)

        def in_power_range(v: Ordinal) -> bool:
            return (
                len(v.terms) == 1
                and v.terms[0][1] == 1
                and compare(v.terms[0][0], alpha) < 0
            )

        def log(v: Ordinal) -> Ordinal:
            return v.degree

        self._csb = CsbBijection(
            MapSpec(encode, in_encode_range, decode, "digit-code"),
            MapSpec(power, in_power_range, log, "omega-power"),
            fuel=fuel,
        )

    def _decode(self, z: Ordinal) -> Optional[Ordinal]:
        if compare(z, self.alpha) >= 0:
            return None
        codes = fin_decode(self.alpha, z)
        if codes is None:
            return None
        digits = {}
        for code in codes:
            decoded = pair_decode(self.alpha, code)
            if decoded is None:
                return None
            e, c = decoded
            if not c.is_nat() or c.nat_value() < 1 or e in digits:
                return None
            digits[e] = c.nat_value()
        v = from_digits(DigitMap(digits))
        if compare(v, self.bound) >= 0:
            return None
        return v

    def down(self, v: Ordinal) -> Ordinal:
        if compare(v, self.bound) >= 0:
            raise BoundViolation(f"{v} is not below w**alpha = {self.bound}")
        return self._csb.forward(v)

    def up(self, z: Ordinal) -> Ordinal:
        if compare(z, self.alpha) >= 0:
            raise BoundViolation(f"{z} is not below alpha = {self.alpha}")
        return self._csb.backward(z)


def omega_power_bijection(
    alpha: Ordinal, direction: str, v: Ordinal, fuel: int = 10_000
) -> Ordinal:
    """One application of the w**alpha <-> alpha bijection.

    ``direction`` is ``down`` (from below w**alpha) or ``up`` (from
    below alpha).  Use :class:`OmegaPowerBijection` directly to reuse the
    memoized evaluator.
    """
    bij = OmegaPowerBijection(alpha, fuel=fuel)
    if direction == "down":
        return bij.down(v)
    if direction == "up":
        return bij.up(v)
    raise BoundViolation(f"direction must be 'down' or 'up', got {direction!r}")


# -- P(alpha) -> P_inf(alpha) -----------------------------------------------------


@dataclass
class QueryableOrdinalSet:
    """A subset of [0, alpha) given by a membership test plus a certificate.

    ``certificate`` is ``('finite', tuple_of_members)`` for an exactly
    listed finite set or ``('infinite', enumerator)`` where the
    enumerator is an injective function from naturals to members.
    """

    membership: Callable
    certificate: Optional[tuple] = None

    def contains(self, x: Ordinal) -> bool:
        return bool(self.membership(x))


def _validate_certificate(alpha: Ordinal, qset: QueryableOrdinalSet, samples: int):
    if qset.certificate is None:
        raise CertificateError("a finiteness certificate is required")
    kind, payload = qset.certificate
    if kind == "finite":
        for x in payload:
            if not qset.contains(x):
                raise CertificateError(f"listed member {x} fails the membership test")
        listed = set(payload)
        probe = ZERO
        checked = 0
        while checked < samples and compare(probe, alpha) < 0:
            if probe not in listed and qset.contains(probe):
                raise CertificateError(f"unlisted member {probe} found for a finite certificate")
            checked += 1
            probe = add(probe, ONE)
        return
    if kind == "infinite":
        seen = set()
        for k in range(samples):
            x = payload(k)
            if compare(x, alpha) >= 0 or not qset.contains(x):
                raise CertificateError(f"enumerated point {x} is not a member below alpha")
            if x in seen:
                raise CertificateError("enumerator repeated a point")
            seen.add(x)
        return
    raise CertificateError(f"unknown certificate kind {kind!r}")


def pset_to_infpset(
    alpha: Ordinal, qset: QueryableOrdinalSet, samples: int = 32
) -> QueryableOrdinalSet:
    """Injective map from subsets of [0, alpha) to infinite subsets.

    An infinite input A becomes the set of pair codes (z, 0) with z in A;
    a finite input becomes the codes (z, 1) with z outside A.  The output
    carries an infinite-enumerator certificate.
    """
    _require_infinite(alpha)
    _validate_certificate(alpha, qset, samples)
    kind, payload = qset.certificate

    if kind == "infinite":
        def membership(y: Ordinal) -> bool:
            decoded = pair_decode(alpha, y)
            if decoded is None:
                return False
            z, tag = decoded
            return tag == ZERO and qset.contains(z)

        def enumerate_member(k: int) -> Ordinal:
            return pair_encode(alpha, payload(k), ZERO)
    else:
        listed = set(payload)

        def membership(y: Ordinal) -> bool:
            decoded = pair_decode(alpha, y)
            if decoded is None:
                return False
            z, tag = decoded
            return tag == ONE and not qset.contains(z)

        def enumerate_member(k: int) -> Ordinal:
            # complement members among the naturals, skipping the listed set
            x = ZERO
            remaining = k
            while True:
                if x not in listed:
                    if remaining == 0:
                        return pair_encode(alpha, x, ONE)
                    remaining -= 1
                x = add(x, ONE)

    return QueryableOrdinalSet(membership, ("infinite", enumerate_member))
