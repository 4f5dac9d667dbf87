"""Equation validation, characteristic exponents, indicial values."""

import random

import pytest

from fuchsian.builtin import load_equation
from fuchsian.equation import FuchsianEquation, applicability
from fuchsian.errors import A2Violation, A3Violation, IndicialZero
from fuchsian.rational import CRat, Frac
from fuchsian.series import SeriesTX, SeriesTXZ, ZKey


def linear_equation(beta0, beta1, n=1, k_t=6, k_x=8, k_z=4):
    """t d/dt-squared u = beta1 * (t d/dt u) + beta0 * u  (constant betas)."""
    F = SeriesTXZ.z_var(n, 2, k_t, k_x, k_z, ZKey(1, (0,) * n)).scale(beta1) \
        + SeriesTXZ.z_var(n, 2, k_t, k_x, k_z, ZKey(0, (0,) * n)).scale(beta0)
    return FuchsianEquation(2, n, F)


def test_builtin_exponents_first_example():
    eq = load_equation("remark2")
    cd = eq.char_exponents()
    assert cd.roots_exact is not None
    assert [(r.re, r.im) for r in cd.roots_exact] == [(-1, 0), (0, 0)]
    # one root sits on the imaginary axis: no decay rate
    assert cd.h is None


def test_builtin_exponents_second_example():
    eq = load_equation("remark3")
    cd = eq.char_exponents()
    assert cd.roots_exact is not None
    assert [(r.re, r.im) for r in cd.roots_exact] == [(-2, 0), (-1, 0)]
    assert cd.h == Frac(9, 20)          # (9/20) * min(1, 2)
    assert cd.neg_re_lower == (Frac(2), Frac(1))


def test_char_exponents_match_quadratic_residual():
    rng = random.Random(17)
    for _ in range(60):
        b1 = Frac(rng.randint(-12, 4), rng.randint(1, 6))
        b0 = Frac(rng.randint(-12, 4), rng.randint(1, 6))
        eq = linear_equation(b0, b1)
        cd = eq.char_exponents()
        b0c, b1c = complex(0), complex(0)
        for lam in cd.roots:
            # root residual for lambda^2 - b1 lambda - b0
            res = lam * lam - complex(float(b1)) * lam - complex(float(b0))
            assert abs(res) <= 1e-12 * (1.0 + abs(lam) ** 2)
        # ordering contract: ascending by (re, im)
        assert (cd.roots[0].real, cd.roots[0].imag) \
            <= (cd.roots[1].real, cd.roots[1].imag)


def test_exact_roots_when_discriminant_is_a_square():
    # lambda^2 + 3 lambda + 2 = 0 -> roots -2, -1
    eq = linear_equation(Frac(-2), Frac(-3))
    cd = eq.char_exponents()
    assert cd.roots_exact == (CRat(Frac(-2)), CRat(Frac(-1)))
    assert cd.h == Frac(9, 20)


def test_irrational_roots_reported_as_floats_only():
    # lambda^2 - lambda - 1: golden ratio pair, not rational
    eq = linear_equation(Frac(1), Frac(1))
    cd = eq.char_exponents()
    assert cd.roots_exact is None
    assert cd.roots[1].real == pytest.approx(1.6180339887498949, rel=1e-12)
    # positive real part: no decay bound
    assert cd.h is None


def test_complex_root_pair():
    # lambda^2 + 2 lambda + 5 -> -1 +/- 2i
    eq = linear_equation(Frac(-5), Frac(-2))
    cd = eq.char_exponents()
    assert cd.roots[0] == pytest.approx(complex(-1, -2))
    assert cd.roots[1] == pytest.approx(complex(-1, 2))
    assert cd.h == Frac(9, 20)


def test_indicial_value_matches_brute_quadratic():
    eq = load_equation("remark3")
    # P(s) = s^2 + 3 s + 2 once the linear jet terms move to the left side
    for s in range(1, 9):
        v = eq.indicial_value(s)
        assert v == CRat(Frac(s * s + 3 * s + 2))


def test_require_nonresonant_flags_positive_integer_root():
    # lambda^2 - lambda - 2 = (lambda - 2)(lambda + 1): root at +2
    eq = linear_equation(Frac(2), Frac(1))
    assert eq.indicial_value(2) == CRat()
    with pytest.raises(IndicialZero):
        eq.require_nonresonant(8)


def test_a2_violation_detected():
    F = SeriesTXZ.from_tx(SeriesTX.one(1, 4, 4), 2, 4)
    with pytest.raises(A2Violation):
        FuchsianEquation(2, 1, F)


def test_a3_violation_detected():
    # t-free term linear in a spatial-derivative jet slot
    F = SeriesTXZ.z_var(1, 2, 4, 4, 4, ZKey(0, (1,)))
    with pytest.raises(A3Violation):
        FuchsianEquation(2, 1, F)


def test_t_carrying_linear_derivative_term_is_allowed():
    F = SeriesTXZ.z_var(1, 2, 4, 4, 4, ZKey(0, (1,))) \
        * SeriesTXZ.from_tx(SeriesTX.var_t(1, 4, 4), 2, 4)
    eq = FuchsianEquation(2, 1, F)     # must not raise
    assert eq.n == 1


def test_quadratic_derivative_terms_are_allowed_at_t0():
    z = SeriesTXZ.z_var(1, 2, 4, 4, 4, ZKey(0, (2,)))
    eq = FuchsianEquation(2, 1, z * z)
    assert eq.char_exponents().roots_exact == (CRat(Frac(0)), CRat(Frac(0)))


def test_applicability_report_remark3():
    eq = load_equation("remark3")
    app = eq.applicability(K=10)
    assert app.unique_formal
    assert app.resonances == ()
    assert app.decay_applicable
    assert app.h == Frac(9, 20)
    assert app.exact_roots is True


def test_applicability_report_remark2():
    eq = load_equation("remark2")
    app = eq.applicability(K=10)
    assert app.unique_formal          # indicial values nonzero for k >= 1
    assert not app.decay_applicable   # root zero blocks any decay exponent
    assert app.h is None


def test_applicability_function_agrees_with_method():
    for name in ("remark2", "remark3"):
        eq = load_equation(name)
        a = eq.applicability(K=7)
        b = applicability(eq.char_exponents(), K=7)
        assert a == b


def test_resonant_equation_reported():
    eq = linear_equation(Frac(2), Frac(1))   # root +2
    app = eq.applicability(K=10)
    assert not app.unique_formal
    assert 2 in app.resonances
