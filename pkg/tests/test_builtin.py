"""Bundled instances: schema validation, closed forms, residual grids."""

import json

import pytest

from fuchsian.builtin import (BUILTIN_NAMES, closed_form_eval,
                              closed_form_series, load_equation,
                              parse_equation, remark2_jets,
                              remark2_residual_grid)
from fuchsian.errors import IndexOutOfLambda, InputError
from fuchsian.rational import Frac
from fuchsian.solver import residual


def valid_doc():
    return {
        "name": "toy",
        "m": 2,
        "n": 1,
        "terms": [
            {"coeff": [-3, 1, 0, 1], "t_pow": 0, "x_pows": [0],
             "z_pows": [{"i": 1, "alpha": [0], "pow": 1}]},
        ],
        "truncation": {"K_t": 6, "K_x": 8, "K_z": 3},
    }


def test_all_builtins_load_and_validate():
    for name in BUILTIN_NAMES:
        eq = load_equation(name)
        assert eq.m == 2 and eq.n == 1
        assert eq.F.k_t >= 8


def test_load_equation_from_path(tmp_path):
    p = tmp_path / "toy.json"
    p.write_text(json.dumps(valid_doc()))
    eq = load_equation(p)
    assert eq.n == 1


def test_load_equation_unknown_name():
    with pytest.raises(InputError):
        load_equation("no_such_instance")


def test_load_equation_bad_json(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(InputError):
        load_equation(p)


@pytest.mark.parametrize("mutate,fragment", [
    (lambda d: d.pop("terms"), "terms"),
    (lambda d: d.update(m="two"), "m"),
    (lambda d: d["terms"][0].update(coeff=[1, 0, 0, 1]), "coeff"),
    (lambda d: d["terms"][0].update(x_pows=[0, 0]), "x_pows"),
    (lambda d: d["terms"][0]["z_pows"][0].update(alpha=[0, 0]), "alpha"),
    (lambda d: d.update(truncation={"K_t": 6}), "truncation"),
])
def test_parse_equation_rejects_malformed(mutate, fragment):
    doc = valid_doc()
    mutate(doc)
    with pytest.raises(InputError) as exc:
        parse_equation(doc)
    assert fragment in str(exc.value)


def test_parse_equation_rejects_out_of_range_jet_index():
    doc = valid_doc()
    doc["terms"][0]["z_pows"][0]["i"] = 2          # i must stay below m
    with pytest.raises(IndexOutOfLambda):
        parse_equation(doc)


def test_closed_form_series_is_exact_solution():
    for name in ("remark3", "remark3_forced"):
        eq = load_equation(name)
        u = closed_form_series(name, k_t=eq.F.k_t, k_x=eq.F.k_x)
        r = residual(eq, u, eq.F.k_t)
        assert r.truncate(k_x=eq.F.k_x - 2).is_zero()


def test_closed_form_eval_agrees_with_series():
    for name in ("remark3", "remark3_forced"):
        ev = closed_form_eval(name)
        u = closed_form_series(name)
        for t, x in [(0.5, 0.25), (1e-3, -0.4)]:
            assert ev(t, (x,)) == pytest.approx(u.eval_numeric(t, (x,)),
                                                rel=1e-14, abs=1e-300)


def test_logarithmic_jets_satisfy_equation_pointwise():
    # the closed form with a log cannot be a power series; its jets still
    # satisfy the equation identically, which the residual grid measures
    eq = load_equation("remark2")
    rep = remark2_residual_grid(eq, nt=20, nx=11)
    assert rep["points"] == 220
    assert rep["max_abs_residual"] < 1e-10


def test_remark2_jets_internal_consistency():
    # z01 must be the x-derivative of z00, z11 of z10, z02 of z01
    t, x = 1e-3, 0.3
    _, jets = remark2_jets(t, x)
    dx = 1e-7
    _, up = remark2_jets(t, x + dx)
    _, dn = remark2_jets(t, x - dx)
    pairs = [((0, (0,)), (0, (1,))),
             ((1, (0,)), (1, (1,))),
             ((0, (1,)), (0, (2,)))]
    for src_key, der_key in pairs:
        fd = (up[src_key] - dn[src_key]) / (2 * dx)
        assert fd == pytest.approx(jets[der_key], rel=1e-6)

    # the Euler pairs: z10 = t d/dt z00 and lhs = t d/dt z10
    dt = t * 1e-7
    _, up_t = remark2_jets(t + dt, x)
    _, dn_t = remark2_jets(t - dt, x)
    fd = t * (up_t[(0, (0,))] - dn_t[(0, (0,))]) / (2 * dt)
    assert fd == pytest.approx(jets[(1, (0,))], rel=1e-5)
