"""Bundled equation instances, their JSON loader, and closed-form checks.

The JSON schema is flat: {"m", "n", "terms": [...], "truncation":
{"K_t", "K_x", "K_z"}}, each term {"coeff": [num_re, den_re, num_im,
den_im], "t_pow": int, "x_pows": [n ints], "z_pows": [{"i", "alpha",
"pow"}, ...]}.  Anything malformed raises InputError with the offending
field named.
"""

from __future__ import annotations

import cmath
import json
from importlib import resources
from pathlib import Path

from .equation import FuchsianEquation
from .errors import InputError
from .rational import CRat, Frac
from .series import SeriesTX, SeriesTXZ, ZKey

BUILTIN_NAMES = ("remark2", "remark3", "remark3_forced")


def _require(cond: bool, msg: str):
    if not cond:
        raise InputError(msg)


def parse_equation(doc: dict, name: str = "") -> FuchsianEquation:
    _require(isinstance(doc, dict), "document must be a JSON object")
    for field in ("m", "n", "terms", "truncation"):
        _require(field in doc, f"missing field {field!r}")
    m, n = doc["m"], doc["n"]
    _require(isinstance(m, int) and m >= 1, "m must be a positive integer")
    _require(isinstance(n, int) and n >= 1, "n must be a positive integer")
    tr = doc["truncation"]
    for field in ("K_t", "K_x", "K_z"):
        _require(isinstance(tr.get(field), int) and tr[field] >= 0,
                 f"truncation.{field} must be a nonnegative integer")
    terms = {}
    _require(isinstance(doc["terms"], list), "terms must be a list")
    for pos, term in enumerate(doc["terms"]):
        where = f"terms[{pos}]"
        _require(isinstance(term, dict), f"{where} must be an object")
        co = term.get("coeff")
        _require(isinstance(co, list) and len(co) == 4
                 and all(isinstance(v, int) for v in co),
                 f"{where}.coeff must be four integers")
        _require(co[1] != 0 and co[3] != 0,
                 f"{where}.coeff has a zero denominator")
        coeff = CRat(Frac(co[0], co[1]), Frac(co[2], co[3]))
        tp = term.get("t_pow", 0)
        _require(isinstance(tp, int) and tp >= 0,
                 f"{where}.t_pow must be a nonnegative integer")
        xp = term.get("x_pows", [0] * n)
        _require(isinstance(xp, list) and len(xp) == n
                 and all(isinstance(v, int) and v >= 0 for v in xp),
                 f"{where}.x_pows must be {n} nonnegative integers")
        nu = []
        for jpos, zp in enumerate(term.get("z_pows", [])):
            zwhere = f"{where}.z_pows[{jpos}]"
            _require(isinstance(zp, dict), f"{zwhere} must be an object")
            i = zp.get("i")
            al = zp.get("alpha")
            p = zp.get("pow", 1)
            _require(isinstance(i, int) and i >= 0,
                     f"{zwhere}.i must be a nonnegative integer")
            _require(isinstance(al, list) and len(al) == n
                     and all(isinstance(v, int) and v >= 0 for v in al),
                     f"{zwhere}.alpha must be {n} nonnegative integers")
            _require(isinstance(p, int) and p >= 1,
                     f"{zwhere}.pow must be a positive integer")
            nu.append((ZKey(i, tuple(al)), p))
        key = (tp, tuple(xp), tuple(nu))
        acc = terms.get(key)
        terms[key] = coeff if acc is None else acc + coeff
    F = SeriesTXZ(n, m, tr["K_t"], tr["K_x"], tr["K_z"], terms)
    return FuchsianEquation(m, n, F, name=name or doc.get("name", ""))


def load_equation(source) -> FuchsianEquation:
    """Load an equation from a builtin name or a JSON file path."""
    if isinstance(source, str) and source in BUILTIN_NAMES:
        text = (resources.files("fuchsian.data") / f"{source}.json").read_text()
        label = source
    else:
        path = Path(source)
        if not path.exists():
            raise InputError(f"no such equation file or builtin: {source!r} "
                             f"(builtins: {', '.join(BUILTIN_NAMES)})")
        text = path.read_text()
        label = path.stem
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {label}: {exc}") from None
    return parse_equation(doc, name=label)


# -- closed forms ------------------------------------------------------

def closed_form_eval(name: str):
    """Float evaluator (t, xs) -> complex of the known nonzero solution."""
    if name == "remark2":
        def u(t, xs):
            # valid on 0 < t <= 1/e where log t < 0
            return -(xs[0] ** 2) / (4.0 * cmath.log(t))
        return u
    if name in ("remark3",):
        def u(t, xs):
            return xs[0] ** 4 / 72.0
        return u
    if name == "remark3_forced":
        def u(t, xs):
            return t / 6.0
        return u
    raise InputError(f"no closed form for {name!r}")


def closed_form_series(name: str, k_t: int = 10, k_x: int = 12) -> SeriesTX:
    """Exact series of the known solution, where one exists as a series."""
    if name == "remark3":
        return SeriesTX.monomial(1, k_t, k_x, Frac(1, 72), 0, (4,))
    if name == "remark3_forced":
        return SeriesTX.monomial(1, k_t, k_x, Frac(1, 6), 1, (0,))
    raise InputError(f"no series closed form for {name!r}")


def remark2_jets(t: float, x: complex) -> tuple:
    """Exact jets of -x^2/(4 log t): ((Euler^2 u), {(i, alpha): value})."""
    L = cmath.log(t)
    lhs = -x ** 2 / (2.0 * L ** 3)
    z = {
        (0, (0,)): -x ** 2 / (4.0 * L),
        (1, (0,)): x ** 2 / (4.0 * L ** 2),
        (0, (1,)): -x / (2.0 * L),
        (1, (1,)): x / (2.0 * L ** 2),
        (0, (2,)): -1.0 / (2.0 * L),
    }
    return lhs, z


def remark2_residual_grid(eq: FuchsianEquation, nt: int = 40,
                          nx: int = 25) -> dict:
    """|Euler^2 u - F(jets)| for the nonzero remark2 solution on a
    deterministic grid with arg t = 0, |t| in [1e-6, 1/e], |x| <= 1/2."""
    import math as _m
    t_lo, t_hi = 1e-6, _m.exp(-1.0)
    worst = 0.0
    count = 0
    for it in range(nt):
        frac = it / (nt - 1) if nt > 1 else 0.0
        t = t_lo * (t_hi / t_lo) ** frac
        for jx in range(nx):
            x = -0.5 + jx / (nx - 1) if nx > 1 else 0.0
            lhs, z = remark2_jets(t, x)
            rhs = eq.F.eval_numeric(t, (x,), {ZKey(i, al): v
                                              for (i, al), v in z.items()})
            worst = max(worst, abs(lhs - rhs))
            count += 1
    return {"points": count, "max_abs_residual": worst}
