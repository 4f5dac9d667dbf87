"""Exact scalar layer: directed square roots and complex rational pairs."""

import math
import random

import pytest

from fuchsian.rational import CRat, Frac, crat_sqrt_exact, frac_sqrt_exact, sqrt_upper

# sqrt_upper promises: sqrt(s) <= sqrt_upper(s), exact whenever sqrt(s) is
# rational, and never looser than one part in 2**47 (the directed bias is
# 2**-48 with a far smaller integer-sqrt rounding term on top).
ENCLOSURE = Frac((1 << 47) + 1, 1 << 47)


def test_sqrt_upper_exact_on_squares():
    for k in [0, 1, 2, 3, 7, 12, 100]:
        assert sqrt_upper(Frac(k * k)) == Frac(k)
    assert sqrt_upper(Frac(9, 4)) == Frac(3, 2)
    assert sqrt_upper(Frac(49, 121)) == Frac(7, 11)


def test_sqrt_upper_rejects_negative():
    with pytest.raises(ValueError):
        sqrt_upper(Frac(-1, 4))


def test_sqrt_upper_enclosure_random():
    rng = random.Random(20260815)
    for _ in range(400):
        s = Frac(rng.randint(0, 10**6), rng.randint(1, 10**6))
        u = sqrt_upper(s)
        # s <= u^2  (upper bound) and u^2 <= s * ENCLOSURE^2 (tightness)
        assert u * u >= s
        assert u * u <= s * ENCLOSURE * ENCLOSURE


def test_sqrt_upper_agrees_with_float():
    rng = random.Random(7)
    for _ in range(200):
        s = Frac(rng.randint(1, 10**9), rng.randint(1, 10**9))
        u = sqrt_upper(s)
        assert math.isclose(float(u), math.sqrt(float(s)), rel_tol=1e-12)


def test_frac_sqrt_exact():
    assert frac_sqrt_exact(Frac(25, 16)) == Frac(5, 4)
    assert frac_sqrt_exact(Frac(0)) == Frac(0)
    assert frac_sqrt_exact(Frac(2)) is None
    assert frac_sqrt_exact(Frac(1, 3)) is None


def test_crat_field_axioms_sampled():
    rng = random.Random(99)

    def rand():
        return CRat(Frac(rng.randint(-9, 9), rng.randint(1, 9)),
                    Frac(rng.randint(-9, 9), rng.randint(1, 9)))

    one = CRat(Frac(1))
    for _ in range(200):
        a, b, c = rand(), rand(), rand()
        assert a + b == b + a
        assert a * b == b * a
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        if a.abs2() != 0:
            assert a * a.inverse() == one
            assert (one / a) * a == one
        assert a - a == CRat()
        assert a * one == a


def test_crat_pow_matches_repeated_product():
    z = CRat(Frac(2, 3), Frac(-1, 5))
    acc = CRat(Frac(1))
    for n in range(8):
        assert z ** n == acc
        acc = acc * z
    assert z ** -2 == (z * z).inverse()


def test_crat_mixed_arithmetic_with_int_and_fraction():
    z = CRat(Frac(1, 2), Frac(3))
    assert z + 1 == CRat(Frac(3, 2), Frac(3))
    assert 2 * z == CRat(Frac(1), Frac(6))
    assert z - Frac(1, 2) == CRat(Frac(0), Frac(3))
    assert Frac(1) / CRat(Frac(0), Frac(1)) == CRat(Frac(0), Frac(-1))


def test_abs_upper_exact_on_axis_values():
    assert CRat(Frac(-3, 7)).abs_upper() == Frac(3, 7)
    assert CRat(Frac(0), Frac(5, 2)).abs_upper() == Frac(5, 2)
    # pythagorean pair: |3/5 + 4/5 i| = 1 exactly
    assert CRat(Frac(3, 5), Frac(4, 5)).abs_upper() == Frac(1)


def test_abs_upper_is_sound_and_tight():
    rng = random.Random(4242)
    for _ in range(300):
        z = CRat(Frac(rng.randint(-50, 50), rng.randint(1, 50)),
                 Frac(rng.randint(-50, 50), rng.randint(1, 50)))
        u = z.abs_upper()
        assert u * u >= z.abs2()
        assert u * u <= z.abs2() * ENCLOSURE * ENCLOSURE


def test_crat_sqrt_exact_roundtrip():
    rng = random.Random(31337)
    for _ in range(200):
        w = CRat(Frac(rng.randint(-9, 9), rng.randint(1, 9)),
                 Frac(rng.randint(-9, 9), rng.randint(1, 9)))
        s = crat_sqrt_exact(w * w)
        assert s is not None
        assert s * s == w * w
    # a complex rational with no rational square root
    assert crat_sqrt_exact(CRat(Frac(2))) is None
    assert crat_sqrt_exact(CRat(Frac(0), Frac(1))) is None


def test_crat_sqrt_exact_negative_real():
    s = crat_sqrt_exact(CRat(Frac(-9, 4)))
    assert s is not None and s * s == CRat(Frac(-9, 4))
