import random
from fractions import Fraction

import pytest

from scmatroid.services.errors import PoleError, SpaceMismatchError, SymbolicZeroDivisionError
from scmatroid.services.symbolicCore import (
    ParamSpace,
    Polynomial,
    RationalFunction,
    gcd_in_s,
    prem_in_s,
    probabilistic_zero_test,
    random_point,
)
from scmatroid.tests.conftest import random_polynomial, random_rational


def test_param_space_rejects_bad_names():
    with pytest.raises(ValueError):
        ParamSpace(["z1", "z1"])
    with pytest.raises(ValueError):
        ParamSpace(["z1", "s"])
    with pytest.raises(ValueError):
        ParamSpace(["2z"])


def test_param_space_equality_ignores_threshold():
    assert ParamSpace(["z1"], reduce_threshold=4) == ParamSpace(["z1"])
    assert ParamSpace(["z1"]) != ParamSpace(["z1", "z2"])


def test_mixing_spaces_raises(space):
    other = ParamSpace(["z1"])
    with pytest.raises(SpaceMismatchError):
        space.var("z1") + other.var("z1")


def test_field_laws_on_random_elements(space, rng):
    for _ in range(500):
        a, b, c = (random_rational(space, rng) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        assert a - a == RationalFunction.zero(space)
        if not a.is_zero:
            assert a * a.inverse() == RationalFunction.one(space)


def test_evaluation_is_a_homomorphism(space, rng):
    checked = 0
    for _ in range(200):
        a, b = random_rational(space, rng), random_rational(space, rng)
        point = random_point(space, rng)
        try:
            va, vb = a.evaluate(point), b.evaluate(point)
        except PoleError:
            continue
        assert (a + b).evaluate(point) == va + vb
        assert (a * b).evaluate(point) == va * vb
        checked += 1
    assert checked > 150


def test_polynomial_exact_quotient(space):
    z1, s = space.var("z1"), space.s()
    p = (s - z1) * (s + 2)
    assert p.exact_quotient(s + 2) == s - z1
    with pytest.raises(ArithmeticError):
        p.exact_quotient(s + 3)
    with pytest.raises(SymbolicZeroDivisionError):
        p.exact_quotient(space.zero())


def test_degrees_and_coefficients(space):
    z1, z2, s = space.var("z1"), space.var("z2"), space.s()
    p = 3 * z1 * s ** 2 - z2 * s + 7
    assert p.s_degree == 2
    assert p.degree("z1") == 1
    assert space.zero().s_degree == float("-inf")
    coeffs = p.s_coefficients()
    assert coeffs[2] == 3 * z1
    assert coeffs[1] == -z2
    assert coeffs[0] == space.constant(7)


def test_render_uses_the_expression_grammar(space):
    z1, z2, s = space.var("z1"), space.var("z2"), space.s()
    assert (Fraction(3, 2) * z1 ** 2 * s - z2 + 1).render() == "3/2*z1^2*s - z2 + 1"
    assert space.zero().render() == "0"
    assert RationalFunction(z1, z2 + 1).render() == "z1/(z2 + 1)"
    assert RationalFunction(space.one(), 2 * z1 * z2).render() == "1/2/(z1*z2)"


def test_rational_function_normalization(space):
    z1, z2 = space.var("z1"), space.var("z2")
    x = RationalFunction(2 * z1, -4 * z2)
    assert x.den.leading_coefficient > 0
    assert x == RationalFunction(-z1, 2 * z2)
    assert RationalFunction(z1 * z2, z2 * z1).reduced().den == 1
    assert RationalFunction(z1 * z2, z2).is_polynomial


def test_zero_denominator_raises(space):
    with pytest.raises(SymbolicZeroDivisionError):
        RationalFunction(space.one(), space.zero())
    with pytest.raises(SymbolicZeroDivisionError):
        RationalFunction.one(space) / RationalFunction.zero(space)


def test_evaluate_at_a_pole(space):
    z1 = space.var("z1")
    x = RationalFunction(space.one(), z1 - 1)
    with pytest.raises(PoleError):
        x.evaluate({"z1": 1})
    assert x.evaluate({"z1": 3}) == Fraction(1, 2)


def test_substitute_keeps_free_variables(space):
    z1, z2, s = space.var("z1"), space.var("z2"), space.s()
    x = RationalFunction(z1 * s + z2, z1 + 1)
    y = x.substitute({"z1": 1})
    assert y == RationalFunction(s + z2, space.constant(2))


def test_s_freeness(space):
    z1, s = space.var("z1"), space.s()
    assert RationalFunction(z1 + 1).is_unit_in_s()
    assert not RationalFunction(s - z1).is_s_free()
    assert not RationalFunction.zero(space).is_unit_in_s()
    # s cancels out after reduction
    assert RationalFunction(s * z1, s).is_unit_in_s()


def _same_up_to_sign(a: Polynomial, b: Polynomial) -> bool:
    return a == b or a == -b


def test_gcd_in_s_known_cases(space):
    z1, z2, s = space.var("z1"), space.var("z2"), space.s()
    assert _same_up_to_sign(gcd_in_s((s - z1) ** 2, (s - z1) * (s + z2)), s - z1)
    assert gcd_in_s(s - z1, s - z2) == space.one()
    assert gcd_in_s(z1 * (s - 1), z2 * (s - 1)) in (s - 1, 1 - s)
    assert gcd_in_s(space.zero(), space.zero()).is_zero
    assert gcd_in_s(z1 + 3, (s - z1) ** 2) == space.one()
    assert _same_up_to_sign(gcd_in_s(space.zero(), 2 * z1 * (s - z2)), s - z2)


def test_gcd_in_s_divides_both_and_keeps_common_factor(space, rng):
    s = space.s()

    def coefficient():
        return random_polynomial(space, rng, terms=2, max_degree=1).substitute({"s": 0})

    for _ in range(40):
        h = s + coefficient()
        f = s ** 2 + coefficient()
        g = s + coefficient() + 1
        p, q = h * f, h * g
        d = gcd_in_s(p, q)
        assert d.divides(p)
        assert d.divides(q)
        assert h.divides(d)


def test_prem_in_s_degree_drops(space):
    z1, s = space.var("z1"), space.s()
    r = prem_in_s(s ** 3 + z1 * s + 1, z1 * s - 1)
    assert r.s_degree < 1
    # z1^2*s^2 = (z1*s - 1)*(z1*s + 1) + 1
    assert prem_in_s(s ** 2, z1 * s - 1) == 1
    with pytest.raises(SymbolicZeroDivisionError):
        prem_in_s(s, space.zero())


def test_gcd_in_s_with_a_large_degree_gap(space):
    z1, z2, s = space.var("z1"), space.var("z2"), space.s()
    common = z1 * s - z2
    p = common * (s ** 4 + z2 * s + 1)
    q = common * (s + z1)
    assert _same_up_to_sign(gcd_in_s(p, q), common)
    assert _same_up_to_sign(gcd_in_s(q * z2, p * (z1 + 1)), common)
    assert gcd_in_s(s ** 5 - z1, s ** 2 - z2) == space.one()


def test_probabilistic_zero_test(space, rng):
    assert probabilistic_zero_test(space.zero(), trials=5, seed=1)
    for seed in range(20):
        p = random_polynomial(space, random.Random(seed))
        if not p.is_zero:
            assert not probabilistic_zero_test(p, trials=3, seed=seed)
    with pytest.raises(ValueError):
        probabilistic_zero_test(space.one(), trials=0, seed=0)


def test_probabilistic_zero_test_on_products(space, rng):
    z1, s = space.var("z1"), space.s()
    assert not probabilistic_zero_test(s - z1, trials=3, seed=7)
    for _ in range(20):
        p, q = random_polynomial(space, rng), random_polynomial(space, rng)
        if p.is_zero or q.is_zero:
            continue
        assert not probabilistic_zero_test(p * q, trials=3, seed=7)
        assert probabilistic_zero_test(p * q - q * p, trials=3, seed=7)
