import itertools
import random

import pytest
from hypothesis import given
import hypothesis.strategies as st

from ordkit.coding import (
    DigitMap,
    MapSpec,
    OmegaPowerBijection,
    QueryableOrdinalSet,
    cantor_pair,
    cantor_unpair,
    csb_bijection,
    digitmap_rightlex_cmp,
    fin_decode,
    fin_encode,
    from_digits,
    omega_power_bijection,
    pair_decode,
    pair_encode,
    pset_to_infpset,
    to_digits,
)
from ordkit.core import OMEGA, ONE, ZERO, Ordinal, compare, omega_power, parse
from ordkit.errors import BoundViolation, CertificateError, FuelExhausted, InconsistentMapSpec

from strategies import nested_ordinals


def o(text):
    return parse(text)


class TestDigits:
    def test_zero(self):
        assert to_digits(ZERO) == DigitMap()

    def test_reading(self):
        d = to_digits(o("w^2*3+5"))
        assert d.digit(Ordinal(2)) == 3 and d.digit(ZERO) == 5

    def test_from_digits(self):
        assert from_digits(DigitMap({OMEGA: 1})) == o("w^w")

    @given(nested_ordinals())
    def test_roundtrip(self, x):
        assert from_digits(to_digits(x)) == x

    @given(nested_ordinals(), nested_ordinals())
    def test_rightlex_matches_ordinal_order(self, a, b):
        assert digitmap_rightlex_cmp(to_digits(a), to_digits(b)) == compare(a, b)


class TestCantorPairing:
    @given(st.integers(0, 10_000), st.integers(0, 10_000))
    def test_bijective(self, a, b):
        assert cantor_unpair(cantor_pair(a, b)) == (a, b)

    @given(st.integers(0, 1_000_000))
    def test_surjective(self, z):
        a, b = cantor_unpair(z)
        assert cantor_pair(a, b) == z


class TestPairEncode:
    def test_zero_pair(self):
        assert pair_encode(OMEGA, ZERO, ZERO) == ZERO

    def test_naturals_match_cantor(self):
        assert pair_encode(OMEGA, ONE, Ordinal(2)) == Ordinal(cantor_pair(1, 2))

    def test_digitwise_at_omega_squared(self):
        z = pair_encode(o("w^2"), OMEGA, ONE)
        expected = Ordinal.from_terms(
            [(ONE, cantor_pair(1, 0)), (ZERO, cantor_pair(0, 1))]
        )
        assert z == expected

    def test_bounds_checked(self):
        with pytest.raises(BoundViolation):
            pair_encode(Ordinal(5), ONE, ONE)
        with pytest.raises(BoundViolation):
            pair_encode(OMEGA, OMEGA, ZERO)

    def test_exhaustive_injectivity_below_fifty(self):
        seen = set()
        for x in range(50):
            for y in range(50):
                z = pair_encode(OMEGA, Ordinal(x), Ordinal(y))
                assert compare(z, OMEGA) < 0
                assert z not in seen
                seen.add(z)
                assert pair_decode(OMEGA, z) == (Ordinal(x), Ordinal(y))

    @pytest.mark.parametrize("alpha_text", ["w", "w^2", "w^w", "w*2", "w^2*3+w"])
    def test_sampled_injectivity(self, alpha_text):
        alpha = o(alpha_text)
        rng = random.Random(11)
        values = _sample_below(alpha, rng, 40)
        codes = {}
        for x in values:
            for y in values:
                z = pair_encode(alpha, x, y)
                assert compare(z, alpha) < 0
                key = z
                assert codes.setdefault(key, (x, y)) == (x, y)
                assert pair_decode(alpha, z) == (x, y)

    def test_decode_off_range(self):
        # w^2's own degree slot cannot appear in a pair code below w^2
        assert pair_decode(o("w^2"), o("w^2")) is None


def _sample_below(alpha, rng, count):
    """Deterministic spread of ordinals below alpha."""
    out = [ZERO]
    terms = alpha.terms
    lead_exp = terms[0][0]
    for _ in range(count):
        value = Ordinal(rng.randrange(50))
        if not lead_exp.is_zero():
            # random two-term value below w**lead * coeff
            e2 = rng.randrange(0, 3)
            exp_pool = [e for e in (lead_exp, Ordinal(e2)) if not e.is_zero()]
            exp = exp_pool[rng.randrange(len(exp_pool))]
            coeff = rng.randrange(1, 6)
            candidate = Ordinal.from_terms([(exp, coeff)])
            if compare(candidate, alpha) < 0:
                value = candidate + Ordinal(rng.randrange(9))
        if compare(value, alpha) < 0:
            out.append(value)
    seen = set()
    unique = []
    for v in out:
        if v not in seen:
            seen.add(v)
            unique.append(v)
    return unique


class TestFinEncode:
    def test_empty_set(self):
        assert fin_encode(OMEGA, []) == ZERO
        assert fin_decode(OMEGA, ZERO) == []

    def test_singleton_zero(self):
        code = fin_encode(OMEGA, [ZERO])
        assert code != ZERO
        assert fin_decode(OMEGA, code) == [ZERO]

    def test_exhaustive_subsets_of_ten(self):
        codes = set()
        for r in range(11):
            for subset in itertools.combinations(range(10), r):
                members = [Ordinal(v) for v in reversed(subset)]
                code = fin_encode(OMEGA, members)
                assert compare(code, OMEGA) < 0
                assert code not in codes
                codes.add(code)
                assert fin_decode(OMEGA, code) == members

    def test_larger_alpha_samples(self):
        alpha = o("w^w")
        sets = [
            [o("w^3"), o("w*2"), Ordinal(7)],
            [o("w^3"), o("w*2")],
            [o("w^2+1")],
            [o("w^2"), ONE, ZERO],
        ]
        codes = [fin_encode(alpha, s) for s in sets]
        assert len(set(codes)) == len(codes)
        for code, members in zip(codes, sets):
            assert fin_decode(alpha, code) == members

    def test_duplicates_rejected(self):
        with pytest.raises(BoundViolation):
            fin_encode(OMEGA, [ONE, ONE])

    def test_decode_junk(self):
        # arity header of 0 members is not a valid nonzero code
        assert fin_decode(OMEGA, Ordinal(2)) in (None, [ZERO], [ONE])  # decoded or rejected
        assert fin_decode(OMEGA, fin_encode(OMEGA, [Ordinal(3)])) == [Ordinal(3)]


class TestCsb:
    def test_singletons(self):
        f = MapSpec(lambda a: 5, lambda b: b == 5, lambda b: 0)
        g = MapSpec(lambda b: 0, lambda a: a == 0, lambda a: 5)
        h = csb_bijection(f, g)
        assert h.forward(0) == 5
        assert h.backward(5) == 0

    def test_identity(self):
        f = MapSpec(lambda a: a, lambda b: b in (0, 1, 2), lambda b: b)
        h = csb_bijection(f, f)
        assert [h.forward(a) for a in (0, 1, 2)] == [0, 1, 2]

    def test_shifted_chain(self):
        # f: n -> n on omega; g: n -> n + 1: stoppers classify correctly
        f = MapSpec(lambda a: a, lambda b: True, lambda b: b)
        g = MapSpec(lambda b: b + 1, lambda a: a >= 1, lambda a: a - 1)
        h = csb_bijection(f, g, fuel=100)
        for a in range(10):
            assert h.backward(h.forward(a)) == a

    def test_fuel_exhaustion(self):
        # backward chain never terminates: f, g shift in opposite directions
        f = MapSpec(lambda a: a - 1, lambda b: True, lambda b: b + 1)
        g = MapSpec(lambda b: b - 1, lambda a: True, lambda a: a + 1)
        with pytest.raises(FuelExhausted):
            csb_bijection(f, g, fuel=50).forward(0)

    def test_inconsistent_mapspec(self):
        f = MapSpec(lambda a: a, lambda b: True, lambda b: b + 1)  # wrong inverse
        g = MapSpec(lambda b: b, lambda a: True, lambda a: a)
        with pytest.raises(InconsistentMapSpec):
            csb_bijection(f, g, fuel=50).forward(3)


class TestOmegaPowerBijection:
    def test_zero_roundtrip(self):
        bij = OmegaPowerBijection(OMEGA)
        assert bij.up(bij.down(ZERO)) == ZERO

    @pytest.mark.parametrize("alpha_text", ["w", "w^2"])
    def test_roundtrips(self, alpha_text):
        alpha = o(alpha_text)
        bij = OmegaPowerBijection(alpha)
        rng = random.Random(5)
        for value in _sample_below(omega_power(alpha), rng, 60):
            assert bij.up(bij.down(value)) == value
        for value in _sample_below(alpha, rng, 60):
            assert bij.down(bij.up(value)) == value

    def test_deeper_alpha_roundtrips(self):
        alpha = o("w^w")
        bij = OmegaPowerBijection(alpha)
        for text in ("0", "7", "w", "w^3*2+w", "w^(w^2)", "w^(w^3+1)*4 + w^w + 2"):
            value = o(text)
            assert bij.up(bij.down(value)) == value
        for text in ("0", "5", "w*2", "w^5+w^2"):
            value = o(text)
            assert bij.down(bij.up(value)) == value

    def test_bound_violations(self):
        bij = OmegaPowerBijection(OMEGA)
        with pytest.raises(BoundViolation):
            bij.down(o("w^w"))
        with pytest.raises(BoundViolation):
            bij.up(OMEGA)

    def test_direction_dispatch(self):
        value = omega_power_bijection(OMEGA, "down", o("w*2+1"))
        assert omega_power_bijection(OMEGA, "up", value) == o("w*2+1")
        with pytest.raises(BoundViolation):
            omega_power_bijection(OMEGA, "sideways", ZERO)


class TestPsetToInfpset:
    def test_empty_set_goes_to_tagged_complement(self):
        alpha = OMEGA
        empty = QueryableOrdinalSet(lambda x: False, ("finite", ()))
        image = pset_to_infpset(alpha, empty)
        assert image.contains(pair_encode(alpha, Ordinal(9), ONE))
        assert not image.contains(pair_encode(alpha, Ordinal(9), ZERO))

    def test_infinite_set_keeps_members(self):
        alpha = o("w*2")
        evens = QueryableOrdinalSet(
            lambda x: x.is_nat() and x.nat_value() % 2 == 0,
            ("infinite", lambda k: Ordinal(2 * k)),
        )
        image = pset_to_infpset(alpha, evens)
        assert image.contains(pair_encode(alpha, Ordinal(4), ZERO))
        assert not image.contains(pair_encode(alpha, Ordinal(3), ZERO))
        kind, enum = image.certificate
        assert kind == "infinite"
        members = {enum(k) for k in range(30)}
        assert len(members) == 30 and all(image.contains(m) for m in members)

    def test_injectivity_witness(self):
        alpha = OMEGA
        a = QueryableOrdinalSet(lambda x: x == ZERO, ("finite", (ZERO,)))
        b = QueryableOrdinalSet(lambda x: False, ("finite", ()))
        fa, fb = pset_to_infpset(alpha, a), pset_to_infpset(alpha, b)
        probe = pair_encode(alpha, ZERO, ONE)
        assert fa.contains(probe) != fb.contains(probe)

    def test_bad_certificate(self):
        alpha = OMEGA
        liar = QueryableOrdinalSet(lambda x: False, ("finite", (ONE,)))
        with pytest.raises(CertificateError):
            pset_to_infpset(alpha, liar)
        repeater = QueryableOrdinalSet(lambda x: True, ("infinite", lambda k: ZERO))
        with pytest.raises(CertificateError):
            pset_to_infpset(alpha, repeater)
        with pytest.raises(CertificateError):
            pset_to_infpset(alpha, QueryableOrdinalSet(lambda x: True, None))
