"""Cantor-normal-form ordinal notations below epsilon-0.

An :class:`Ordinal` is an immutable list of ``(exponent, coefficient)``
terms with exponents themselves ordinals, strictly decreasing, and
coefficients positive integers.  The empty list denotes 0 and a natural
number is the single term with exponent 0.  All operations are total,
pure, and safe to share across threads.

Expression grammar (ASCII, whitespace-insensitive)::

    expr := term ("+" term)*
    term := "w" ("^" atom)? ("*" nat)? | nat
    atom := nat | "w" | "(" expr ")"
    nat  := decimal >= 0   (0 forbidden as a coefficient)

Template parsing (used by instance files) extends ``nat`` positions with
the variable ``n`` and allows a parenthesized expression as a multiplier.
"""

from __future__ import annotations

import functools
from typing import Callable, Iterable, Optional

from .errors import BoundViolation, OutOfRangeError, ParseError

__all__ = [
    "Ordinal",
    "ZERO",
    "ONE",
    "OMEGA",
    "parse",
    "parse_template",
    "fmt",
    "compare",
    "add",
    "multiply",
    "omega_power",
    "power_nat",
    "left_subtract",
    "classify",
]


class Ordinal:
    """An ordinal below epsilon-0 in Cantor normal form."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, value: int | Iterable = 0):
        if isinstance(value, int):
            if value < 0:
                raise BoundViolation("ordinals are non-negative")
            terms = ((_ZERO_SENTINEL, value),) if value else ()
            object.__setattr__(self, "_terms", _fix_zero_exponents(terms))
        else:
            object.__setattr__(self, "_terms", _validate(tuple(value)))
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _raw(cls, terms: tuple) -> "Ordinal":
        self = object.__new__(cls)
        object.__setattr__(self, "_terms", terms)
        object.__setattr__(self, "_hash", None)
        return self

    @classmethod
    def from_terms(cls, terms: Iterable) -> "Ordinal":
        """Build from ``(exponent, coefficient)`` pairs; validates CNF shape."""
        return cls(terms)

    # -- structure ---------------------------------------------------------

    @property
    def terms(self) -> tuple:
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def is_nat(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and self._terms[0][0].is_zero())

    def nat_value(self) -> int:
        if not self.is_nat():
            raise OutOfRangeError(f"{self} is not a natural number")
        return self._terms[0][1] if self._terms else 0

    @property
    def degree(self) -> "Ordinal":
        """Leading exponent; 0 for naturals (error on 0 itself)."""
        if not self._terms:
            raise OutOfRangeError("0 has no degree")
        return self._terms[0][0]

    @property
    def leading_coeff(self) -> int:
        if not self._terms:
            return 0
        return self._terms[0][1]

    def is_infinite(self) -> bool:
        return bool(self._terms) and not self._terms[0][0].is_zero()

    # -- comparisons -------------------------------------------------------

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __lt__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return compare(self, other) < 0

    def __le__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return compare(self, other) <= 0

    def __gt__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return compare(self, other) > 0

    def __ge__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return compare(self, other) >= 0

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(tuple((hash(e), c) for e, c in self._terms))
            object.__setattr__(self, "_hash", h)
        return h

    def __bool__(self):
        return bool(self._terms)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return add(self, other)

    def __radd__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return add(other, self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return multiply(self, other)

    def __rmul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return multiply(other, self)

    def __int__(self):
        return self.nat_value()

    def __str__(self):
        return fmt(self)

    def __repr__(self):
        return f"Ordinal({fmt(self)!r})"


def _coerce(value) -> "Ordinal":
    if isinstance(value, Ordinal):
        return value
    if isinstance(value, int):
        return Ordinal(value)
    return NotImplemented


def _validate(terms: tuple) -> tuple:
    fixed = []
    prev = None
    for item in terms:
        if len(item) != 2:
            raise BoundViolation("terms must be (exponent, coefficient) pairs")
        exp, coeff = item
        exp = _coerce(exp)
        if exp is NotImplemented or not isinstance(coeff, int):
            raise BoundViolation("bad term component types")
        if coeff < 1:
            raise BoundViolation("coefficients must be >= 1")
        if prev is not None and compare(prev, exp) <= 0:
            raise BoundViolation("exponents must be strictly decreasing")
        fixed.append((exp, coeff))
        prev = exp
    return tuple(fixed)


# Bootstrap: Ordinal(0) needs an exponent before ZERO exists.
class _Sentinel:
    pass


_ZERO_SENTINEL = _Sentinel()


def _fix_zero_exponents(terms):
    if terms and terms[0][0] is _ZERO_SENTINEL:
        return ((ZERO, terms[0][1]),)
    return terms


ZERO = Ordinal._raw(())
ONE = Ordinal._raw(((ZERO, 1),))
OMEGA = Ordinal._raw(((ONE, 1),))


def compare(a: Ordinal, b: Ordinal) -> int:
    """Standard ordinal order: -1, 0, or 1."""
    for (ea, ca), (eb, cb) in zip(a._terms, b._terms):
        c = compare(ea, eb)
        if c:
            return c
        if ca != cb:
            return -1 if ca < cb else 1
    la, lb = len(a._terms), len(b._terms)
    return 0 if la == lb else (-1 if la < lb else 1)


def add(a: Ordinal, b: Ordinal) -> Ordinal:
    """Ordinal sum; terms of ``a`` below the degree of ``b`` are absorbed."""
    if not b._terms:
        return a
    if not a._terms:
        return b
    eb = b._terms[0][0]
    i = 0
    ta = a._terms
    while i < len(ta) and compare(ta[i][0], eb) > 0:
        i += 1
    if i < len(ta) and compare(ta[i][0], eb) == 0:
        merged = (eb, ta[i][1] + b._terms[0][1])
        return Ordinal._raw(ta[:i] + (merged,) + b._terms[1:])
    return Ordinal._raw(ta[:i] + b._terms)


def multiply(a: Ordinal, b: Ordinal) -> Ordinal:
    """Ordinal product, distributing over the right argument's terms."""
    if not a._terms or not b._terms:
        return ZERO
    lead_e, lead_c = a._terms[0]
    result = ZERO
    for e, c in b._terms:
        if e.is_zero():
            part = Ordinal._raw(((lead_e, lead_c * c),) + a._terms[1:])
        else:
            part = Ordinal._raw(((add(lead_e, e), c),))
        result = add(result, part)
    return result


def omega_power(a: Ordinal) -> Ordinal:
    """The ordinal w**a."""
    return Ordinal._raw(((a, 1),))


def power_nat(a: Ordinal, n: int) -> Ordinal:
    """Iterated product ``a * a * ... * a`` (n factors); a**0 = 1."""
    if n < 0:
        raise BoundViolation("exponent must be a natural number")
    result = ONE
    base = a
    while n:
        if n & 1:
            result = multiply(result, base)
        base = multiply(base, base)
        n >>= 1
    return result


def left_subtract(a: Ordinal, b: Ordinal) -> Ordinal:
    """The unique g with a + g = b; requires a <= b."""
    c = compare(a, b)
    if c > 0:
        raise OutOfRangeError(f"cannot left-subtract: {a} > {b}")
    if c == 0:
        return ZERO
    ta, tb = a._terms, b._terms
    i = 0
    while i < len(ta) and i < len(tb) and ta[i] == tb[i]:
        i += 1
    if i == len(ta):
        return Ordinal._raw(tb[i:])
    ea, ca = ta[i]
    eb, cb = tb[i]
    if compare(ea, eb) < 0:
        return Ordinal._raw(tb[i:])
    # compare(a, b) < 0 forces ea == eb with ca < cb here
    return Ordinal._raw(((eb, cb - ca),) + tb[i + 1:])


def classify(x: Ordinal) -> tuple:
    """Return ('zero', None), ('successor', pred), or ('limit', degree)."""
    if not x._terms:
        return ("zero", None)
    last_e, last_c = x._terms[-1]
    if last_e.is_zero():
        if last_c == 1:
            pred = Ordinal._raw(x._terms[:-1])
        else:
            pred = Ordinal._raw(x._terms[:-1] + ((last_e, last_c - 1),))
        return ("successor", pred)
    return ("limit", x._terms[0][0])


# -- parsing ---------------------------------------------------------------


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self) -> Optional[str]:
        self._skip_ws()
        if self.pos >= len(self.text):
            return None
        ch = self.text[self.pos]
        if ch.isdigit():
            return "nat"
        return ch

    def take_nat(self) -> tuple:
        self._skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        return int(self.text[start:self.pos]), start

    def expect(self, ch: str):
        self._skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            raise ParseError(f"expected {ch!r}", self.pos)
        self.pos += 1


# AST nodes: ('nat', k, pos), ('var', pos), ('w',), ('term', exp_ast|None,
# coeff_ast|None, pos), ('add', [term_asts])


def _parse_expr(lx: _Lexer, template: bool):
    terms = [_parse_term(lx, template)]
    while lx.peek() == "+":
        lx.expect("+")
        terms.append(_parse_term(lx, template))
    return ("add", terms)


def _parse_term(lx: _Lexer, template: bool):
    tok = lx.peek()
    pos = lx.pos
    if tok == "w":
        lx.expect("w")
        exp_ast = None
        coeff_ast = None
        if lx.peek() == "^":
            lx.expect("^")
            exp_ast = _parse_atom(lx, template)
        if lx.peek() == "*":
            lx.expect("*")
            coeff_ast = _parse_multiplier(lx, template)
        return ("term", exp_ast, coeff_ast, pos)
    if tok == "nat":
        value, npos = lx.take_nat()
        return ("nat", value, npos)
    if template and tok == "n":
        lx.expect("n")
        return ("var", pos)
    raise ParseError("expected a term", lx.pos)


def _parse_atom(lx: _Lexer, template: bool):
    tok = lx.peek()
    pos = lx.pos
    if tok == "nat":
        value, npos = lx.take_nat()
        return ("nat", value, npos)
    if tok == "w":
        lx.expect("w")
        return ("w", pos)
    if template and tok == "n":
        lx.expect("n")
        return ("var", pos)
    if tok == "(":
        lx.expect("(")
        inner = _parse_expr(lx, template)
        lx.expect(")")
        return inner
    raise ParseError("expected an exponent atom", lx.pos)


def _parse_multiplier(lx: _Lexer, template: bool):
    tok = lx.peek()
    if tok == "nat":
        value, npos = lx.take_nat()
        if value == 0:
            raise ParseError("coefficient 0 is not allowed", npos)
        return ("nat", value, npos)
    if template and tok == "n":
        pos = lx.pos
        lx.expect("n")
        return ("var", pos)
    if template and tok == "(":
        lx.expect("(")
        inner = _parse_expr(lx, template)
        lx.expect(")")
        return inner
    raise ParseError("expected a coefficient", lx.pos)


def _eval_ast(ast, n: Optional[int]) -> Ordinal:
    kind = ast[0]
    if kind == "nat":
        return Ordinal(ast[1])
    if kind == "w":
        return OMEGA
    if kind == "var":
        if n is None:
            raise ParseError("variable n outside template", ast[1])
        return Ordinal(n)
    if kind == "add":
        value = ZERO
        for term in ast[1]:
            value = add(value, _eval_ast(term, n))
        return value
    if kind == "term":
        _, exp_ast, coeff_ast, pos = ast
        exp = ONE if exp_ast is None else _eval_ast(exp_ast, n)
        base = omega_power(exp)
        if coeff_ast is None:
            return base
        coeff = _eval_ast(coeff_ast, n)
        if not coeff.is_nat() or coeff.nat_value() < 1:
            raise ParseError("coefficient must be a natural number >= 1", pos)
        return multiply(base, coeff)
    raise AssertionError(f"unknown node {kind}")


def _parse_to_ast(text: str, template: bool):
    lx = _Lexer(text)
    ast = _parse_expr(lx, template)
    lx._skip_ws()
    if lx.pos != len(lx.text):
        raise ParseError("trailing input", lx.pos)
    return ast


def parse(text: str) -> Ordinal:
    """Parse an ordinal expression; non-canonical input is normalized."""
    return _eval_ast(_parse_to_ast(text, template=False), None)


def parse_template(text: str) -> Callable[[int], Ordinal]:
    """Parse an expression that may use the variable ``n``."""
    ast = _parse_to_ast(text, template=True)
    return functools.partial(_eval_ast, ast)


# -- formatting ------------------------------------------------------------


def _atom_str(e: Ordinal) -> str:
    if e == OMEGA:
        return "w"
    if e.is_nat():
        return str(e.nat_value())
    return f"({fmt(e)})"


def fmt(x: Ordinal) -> str:
    """Canonical rendering; ``parse(fmt(x)) == x``."""
    if not x._terms:
        return "0"
    parts = []
    for e, c in x._terms:
        if e.is_zero():
            parts.append(str(c))
            continue
        if e == ONE:
            body = "w"
        else:
            body = f"w^{_atom_str(e)}"
        if c > 1:
            body += f"*{c}"
        parts.append(body)
    return " + ".join(parts)
