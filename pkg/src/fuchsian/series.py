"""Truncated formal power series over exact complex rationals.

Two containers:

* SeriesTX  -- series in the time variable t and spatial variables
  x = (x_1, ..., x_n), truncated at t-order k_t and total x-degree k_x.
* SeriesTXZ -- the same with additional polynomial dependence on a finite
  family of jet variables z[i, alpha], used to hold right-hand sides of
  equations before the jet of an actual series is substituted in.

Truncation caps are part of the value but not of equality: two series are
equal when they have the same variable count and the same term map.  All
binary operations join caps with min, which is the largest region on which
both operands are reliable.  Operations never mutate; every method returns
a fresh object.

t-powers k and multi-indices alpha are ordered graded-lexicographically,
key (k + |alpha|, k, alpha); jet keys by (i + |alpha|, i, alpha).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, NamedTuple

from .errors import (
    DimensionMismatch,
    IndexOutOfLambda,
    MissingSubstitution,
    NotInvertible,
    TruncationExhausted,
)
from .rational import CRat, Frac


def _coeff(c) -> CRat:
    if isinstance(c, CRat):
        return c
    if isinstance(c, (int, Fraction)):
        return CRat(Frac(c), Frac(0))
    if isinstance(c, complex) and c.imag == 0 and float(c.real).is_integer():
        return CRat(Frac(int(c.real)), Frac(0))
    raise TypeError(f"cannot use {c!r} as an exact coefficient")


def _alpha_key(alpha: tuple) -> tuple:
    return (sum(alpha), alpha)


def _tx_key(key: tuple) -> tuple:
    k, alpha = key
    return (k + sum(alpha), k, alpha)


def alphas_of_degree(n: int, d: int) -> Iterable[tuple]:
    """All n-variable multi-indices of total degree d, lex ascending."""
    if n == 1:
        yield (d,)
        return
    for first in range(0, d + 1):
        for rest in alphas_of_degree(n - 1, d - first):
            yield (first,) + rest


class ZKey(NamedTuple):
    """Index of a jet variable: i Euler derivatives, alpha spatial ones."""

    i: int
    alpha: tuple


def _zkey_sort(zk: ZKey) -> tuple:
    return (zk.i + sum(zk.alpha), zk.i, zk.alpha)


def lambda_keys(m: int, n: int) -> list[ZKey]:
    """Admissible jet indices for an order-m equation in n spatial variables:
    i + |alpha| <= m and i < m, sorted graded-lexicographically."""
    out = []
    for i in range(m):
        for d in range(m - i + 1):
            for alpha in alphas_of_degree(n, d):
                out.append(ZKey(i, alpha))
    out.sort(key=_zkey_sort)
    return out


def _norm_nu(nu) -> tuple:
    """Canonical jet-monomial: sorted tuple of (ZKey, power), powers >= 1."""
    acc: dict[ZKey, int] = {}
    items = nu.items() if isinstance(nu, dict) else nu
    for zk, p in items:
        zk = ZKey(int(zk[0]), tuple(int(a) for a in zk[1]))
        p = int(p)
        if p < 0:
            raise ValueError("negative jet power")
        if p:
            acc[zk] = acc.get(zk, 0) + p
    return tuple(sorted(acc.items(), key=lambda kv: _zkey_sort(kv[0])))


def _nu_degree(nu: tuple) -> int:
    return sum(p for _, p in nu)


class SeriesTX:
    """Series in t and x, truncated at (k_t, k_x)."""

    __slots__ = ("n", "k_t", "k_x", "terms")

    def __init__(self, n: int, k_t: int, k_x: int, terms=None):
        if n < 1:
            raise DimensionMismatch("need at least one spatial variable")
        if k_t < 0 or k_x < 0:
            raise ValueError("truncation caps must be nonnegative")
        self.n = n
        self.k_t = k_t
        self.k_x = k_x
        store: dict[tuple, CRat] = {}
        for (k, alpha), c in (terms or {}).items():
            k = int(k)
            alpha = tuple(int(a) for a in alpha)
            if k < 0 or any(a < 0 for a in alpha):
                raise ValueError("negative exponent in term key")
            if len(alpha) != n:
                raise DimensionMismatch(
                    f"multi-index {alpha} has length {len(alpha)}, expected {n}")
            if k > k_t or sum(alpha) > k_x:
                continue
            c = _coeff(c)
            key = (k, alpha)
            acc = store.get(key)
            c = c if acc is None else acc + c
            if c.is_zero():
                store.pop(key, None)
            else:
                store[key] = c
        self.terms = store

    # -- constructors -----------------------------------------------

    @classmethod
    def zero(cls, n: int, k_t: int, k_x: int) -> "SeriesTX":
        return cls(n, k_t, k_x, {})

    @classmethod
    def const(cls, n: int, k_t: int, k_x: int, c) -> "SeriesTX":
        return cls(n, k_t, k_x, {(0, (0,) * n): c})

    @classmethod
    def one(cls, n: int, k_t: int, k_x: int) -> "SeriesTX":
        return cls.const(n, k_t, k_x, 1)

    @classmethod
    def monomial(cls, n: int, k_t: int, k_x: int, c, k: int, alpha) -> "SeriesTX":
        return cls(n, k_t, k_x, {(k, tuple(alpha)): c})

    @classmethod
    def var_t(cls, n: int, k_t: int, k_x: int) -> "SeriesTX":
        return cls.monomial(n, k_t, k_x, 1, 1, (0,) * n)

    @classmethod
    def var_x(cls, n: int, k_t: int, k_x: int, j: int) -> "SeriesTX":
        alpha = tuple(1 if i == j else 0 for i in range(n))
        return cls.monomial(n, k_t, k_x, 1, 0, alpha)

    # -- queries ----------------------------------------------------

    def coeff(self, k: int, alpha) -> CRat:
        return self.terms.get((k, tuple(alpha)), CRat())

    def is_zero(self) -> bool:
        return not self.terms

    def t_order(self) -> int | None:
        """Smallest t-power present, or None for the zero series."""
        if not self.terms:
            return None
        return min(k for k, _ in self.terms)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: _tx_key(kv[0]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SeriesTX):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    __hash__ = None  # mutable-adjacent container; keyed use is a bug

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return (f"SeriesTX(n={self.n}, k_t={self.k_t}, k_x={self.k_x}, "
                f"{len(self.terms)} terms)")

    # -- ring operations ---------------------------------------------

    def _join(self, other: "SeriesTX") -> tuple[int, int]:
        if self.n != other.n:
            raise DimensionMismatch(
                f"operands over {self.n} and {other.n} spatial variables")
        return min(self.k_t, other.k_t), min(self.k_x, other.k_x)

    def __add__(self, other):
        if isinstance(other, (int, Fraction, CRat)):
            other = SeriesTX.const(self.n, self.k_t, self.k_x, other)
        if not isinstance(other, SeriesTX):
            return NotImplemented
        kt, kx = self._join(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            acc = out.get(key)
            out[key] = c if acc is None else acc + c
        return SeriesTX(self.n, kt, kx, out)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(CRat(Frac(-1)))

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, CRat)):
            other = SeriesTX.const(self.n, self.k_t, self.k_x, other)
        if not isinstance(other, SeriesTX):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "SeriesTX":
        c = _coeff(c)
        if c.is_zero():
            return SeriesTX.zero(self.n, self.k_t, self.k_x)
        return SeriesTX(self.n, self.k_t, self.k_x,
                        {key: v * c for key, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CRat)):
            return self.scale(other)
        if not isinstance(other, SeriesTX):
            return NotImplemented
        kt, kx = self._join(other)
        out: dict[tuple, CRat] = {}
        for (k1, a1), c1 in self.terms.items():
            if k1 > kt:
                continue
            for (k2, a2), c2 in other.terms.items():
                k = k1 + k2
                if k > kt:
                    continue
                alpha = tuple(a + b for a, b in zip(a1, a2))
                if sum(alpha) > kx:
                    continue
                key = (k, alpha)
                acc = out.get(key)
                c = c1 * c2
                out[key] = c if acc is None else acc + c
        return SeriesTX(self.n, kt, kx, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, CRat)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, p: int) -> "SeriesTX":
        if not isinstance(p, int) or p < 0:
            raise ValueError("series powers must be nonnegative integers")
        out = SeriesTX.one(self.n, self.k_t, self.k_x)
        for _ in range(p):
            out = out * self
        return out

    # -- calculus ----------------------------------------------------

    def dx(self, j: int) -> "SeriesTX":
        """Partial derivative in x_j.  Costs one unit of x-cap: degree
        k_x + 1 terms, which are not tracked, would land at degree k_x."""
        if not 0 <= j < self.n:
            raise DimensionMismatch(f"no spatial variable {j}")
        if self.k_x == 0:
            raise TruncationExhausted(
                "x-truncation too small to differentiate once more")
        out = {}
        for (k, alpha), c in self.terms.items():
            if alpha[j] == 0:
                continue
            na = alpha[:j] + (alpha[j] - 1,) + alpha[j + 1:]
            out[(k, na)] = c * alpha[j]
        return SeriesTX(self.n, self.k_t, self.k_x - 1, out)

    def dx_multi(self, alpha) -> "SeriesTX":
        out = self
        for j, a in enumerate(alpha):
            for _ in range(a):
                out = out.dx(j)
        return out

    def euler_t(self) -> "SeriesTX":
        """Apply t d/dt.  Exact on the tracked terms; caps unchanged."""
        return SeriesTX(self.n, self.k_t, self.k_x,
                        {(k, a): c * k for (k, a), c in self.terms.items() if k})

    def shift_t(self, k: int) -> "SeriesTX":
        """Multiply by t**k; the t-cap grows by k."""
        if k < 0:
            raise ValueError("shift_t needs k >= 0")
        return SeriesTX(self.n, self.k_t + k, self.k_x,
                        {(kk + k, a): c for (kk, a), c in self.terms.items()})

    def x_section(self, k: int) -> "SeriesTX":
        """Coefficient of t**k as a t-free series."""
        if k > self.k_t:
            raise TruncationExhausted(f"t-order {k} beyond cap {self.k_t}")
        return SeriesTX(self.n, 0, self.k_x,
                        {(0, a): c for (kk, a), c in self.terms.items() if kk == k})

    def truncate(self, k_t: int | None = None, k_x: int | None = None) -> "SeriesTX":
        kt = self.k_t if k_t is None else min(self.k_t, k_t)
        kx = self.k_x if k_x is None else min(self.k_x, k_x)
        return SeriesTX(self.n, kt, kx, self.terms)

    def invert_unit(self) -> "SeriesTX":
        """Multiplicative inverse; the constant coefficient must be nonzero.

        Writes self = c0 (1 - r) with r vanishing at the origin and sums the
        geometric series.  Every term of r has total degree >= 1, so k_t + k_x
        rounds exhaust the truncated ring.
        """
        c0 = self.coeff(0, (0,) * self.n)
        if c0.is_zero():
            raise NotInvertible("constant coefficient is zero")
        inv0 = c0.inverse()
        r = SeriesTX.one(self.n, self.k_t, self.k_x) - self.scale(inv0)
        out = SeriesTX.one(self.n, self.k_t, self.k_x)
        power = out
        for _ in range(self.k_t + self.k_x):
            power = power * r
            if power.is_zero():
                break
            out = out + power
        return out.scale(inv0)

    # -- evaluation ---------------------------------------------------

    def eval_numeric(self, t, xs) -> complex:
        """Evaluate at numeric t and xs (length n), Horner in t.

        Within each t-slice, monomials are accumulated in graded-lex order so
        repeated calls round identically.
        """
        xs = tuple(xs)
        if len(xs) != self.n:
            raise DimensionMismatch(f"expected {self.n} spatial values")
        slices: dict[int, list] = {}
        for (k, alpha), c in self.terms.items():
            slices.setdefault(k, []).append((alpha, c))
        acc = 0j
        for k in range(max(slices, default=0), -1, -1):
            v = 0j
            for alpha, c in sorted(slices.get(k, ()), key=lambda ac: _alpha_key(ac[0])):
                mono = 1.0 + 0j
                for xj, a in zip(xs, alpha):
                    mono *= xj ** a
                v += c.as_complex() * mono
            acc = acc * t + v
        return acc


class SeriesTXZ:
    """Series in t, x and the jet variables z[i, alpha], (i, alpha) in the
    admissible set for an order-m equation.  Jet monomials are truncated at
    total z-degree k_z; z_clipped records whether that truncation has ever
    dropped a term, because substitution can only be trusted to a finite
    t-order afterwards."""

    __slots__ = ("n", "m", "k_t", "k_x", "k_z", "terms", "z_clipped")

    def __init__(self, n: int, m: int, k_t: int, k_x: int, k_z: int,
                 terms=None, z_clipped: bool = False):
        if n < 1:
            raise DimensionMismatch("need at least one spatial variable")
        if m < 1:
            raise ValueError("equation order m must be positive")
        if min(k_t, k_x, k_z) < 0:
            raise ValueError("truncation caps must be nonnegative")
        self.n = n
        self.m = m
        self.k_t = k_t
        self.k_x = k_x
        self.k_z = k_z
        admissible = set(lambda_keys(m, n))
        clipped = bool(z_clipped)
        store: dict[tuple, CRat] = {}
        for (k, alpha, nu), c in (terms or {}).items():
            k = int(k)
            alpha = tuple(int(a) for a in alpha)
            if k < 0 or any(a < 0 for a in alpha):
                raise ValueError("negative exponent in term key")
            if len(alpha) != n:
                raise DimensionMismatch(
                    f"multi-index {alpha} has length {len(alpha)}, expected {n}")
            nu = _norm_nu(nu)
            for zk, _ in nu:
                if len(zk.alpha) != n:
                    raise DimensionMismatch(
                        f"jet index {zk} has {len(zk.alpha)} spatial slots, expected {n}")
                if zk not in admissible:
                    raise IndexOutOfLambda(
                        f"jet index {zk} not admissible for order {m}")
            c = _coeff(c)
            if c.is_zero():
                continue
            if _nu_degree(nu) > k_z:
                clipped = True
                continue
            if k > k_t or sum(alpha) > k_x:
                continue
            key = (k, alpha, nu)
            acc = store.get(key)
            c = c if acc is None else acc + c
            if c.is_zero():
                store.pop(key, None)
            else:
                store[key] = c
        self.terms = store
        self.z_clipped = clipped

    # -- constructors -----------------------------------------------

    @classmethod
    def zero(cls, n, m, k_t, k_x, k_z) -> "SeriesTXZ":
        return cls(n, m, k_t, k_x, k_z, {})

    @classmethod
    def from_tx(cls, f: SeriesTX, m: int, k_z: int) -> "SeriesTXZ":
        return cls(f.n, m, f.k_t, f.k_x, k_z,
                   {(k, a, ()): c for (k, a), c in f.terms.items()})

    @classmethod
    def z_var(cls, n, m, k_t, k_x, k_z, key) -> "SeriesTXZ":
        zk = ZKey(int(key[0]), tuple(int(a) for a in key[1]))
        if k_z < 1:
            raise TruncationExhausted("k_z = 0 cannot hold a jet variable")
        return cls(n, m, k_t, k_x, k_z, {(0, (0,) * n, ((zk, 1),)): 1})

    # -- queries ----------------------------------------------------

    def coeff(self, k: int, alpha, nu) -> CRat:
        return self.terms.get((int(k), tuple(alpha), _norm_nu(nu)), CRat())

    def is_zero(self) -> bool:
        return not self.terms

    def jet_keys_used(self) -> set[ZKey]:
        return {zk for (_, _, nu) in self.terms for zk, _ in nu}

    def sorted_terms(self) -> list:
        def key(kv):
            (k, alpha, nu), _ = kv
            return (k + sum(alpha) + _nu_degree(nu), _nu_degree(nu), k, alpha,
                    tuple((_zkey_sort(zk), p) for zk, p in nu))
        return sorted(self.terms.items(), key=key)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SeriesTXZ):
            return NotImplemented
        return (self.n, self.m) == (other.n, other.m) and self.terms == other.terms

    __hash__ = None

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return (f"SeriesTXZ(n={self.n}, m={self.m}, k_t={self.k_t}, "
                f"k_x={self.k_x}, k_z={self.k_z}, {len(self.terms)} terms"
                + (", z_clipped" if self.z_clipped else "") + ")")

    # -- ring operations ---------------------------------------------

    def _join(self, other: "SeriesTXZ") -> tuple[int, int, int]:
        if (self.n, self.m) != (other.n, other.m):
            raise DimensionMismatch(
                f"operands have (n, m) = {(self.n, self.m)} and {(other.n, other.m)}")
        return (min(self.k_t, other.k_t), min(self.k_x, other.k_x),
                min(self.k_z, other.k_z))

    def __add__(self, other):
        if isinstance(other, (int, Fraction, CRat)):
            other = SeriesTXZ(self.n, self.m, self.k_t, self.k_x, self.k_z,
                              {(0, (0,) * self.n, ()): other})
        if not isinstance(other, SeriesTXZ):
            return NotImplemented
        kt, kx, kz = self._join(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            acc = out.get(key)
            out[key] = c if acc is None else acc + c
        return SeriesTXZ(self.n, self.m, kt, kx, kz, out,
                         z_clipped=self.z_clipped or other.z_clipped)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(CRat(Frac(-1)))

    def __sub__(self, other):
        if isinstance(other, SeriesTXZ):
            return self + (-other)
        if isinstance(other, (int, Fraction, CRat)):
            return self + (-_coeff(other))
        return NotImplemented

    def scale(self, c) -> "SeriesTXZ":
        c = _coeff(c)
        if c.is_zero():
            return SeriesTXZ.zero(self.n, self.m, self.k_t, self.k_x, self.k_z)
        return SeriesTXZ(self.n, self.m, self.k_t, self.k_x, self.k_z,
                         {key: v * c for key, v in self.terms.items()},
                         z_clipped=self.z_clipped)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CRat)):
            return self.scale(other)
        if not isinstance(other, SeriesTXZ):
            return NotImplemented
        kt, kx, kz = self._join(other)
        out: dict[tuple, CRat] = {}
        for (k1, a1, n1), c1 in self.terms.items():
            for (k2, a2, n2), c2 in other.terms.items():
                k = k1 + k2
                if k > kt:
                    continue
                alpha = tuple(a + b for a, b in zip(a1, a2))
                if sum(alpha) > kx:
                    continue
                merged: dict[ZKey, int] = dict(n1)
                for zk, p in n2:
                    merged[zk] = merged.get(zk, 0) + p
                nu = _norm_nu(merged)
                key = (k, alpha, nu)
                acc = out.get(key)
                c = c1 * c2
                out[key] = c if acc is None else acc + c
        return SeriesTXZ(self.n, self.m, kt, kx, kz, out,
                         z_clipped=self.z_clipped or other.z_clipped)

    __rmul__ = __mul__

    def __pow__(self, p: int) -> "SeriesTXZ":
        if not isinstance(p, int) or p < 0:
            raise ValueError("series powers must be nonnegative integers")
        out = SeriesTXZ(self.n, self.m, self.k_t, self.k_x, self.k_z,
                        {(0, (0,) * self.n, ()): 1})
        for _ in range(p):
            out = out * self
        return out

    # -- structure access ---------------------------------------------

    def z_free_part(self) -> SeriesTX:
        return SeriesTX(self.n, self.k_t, self.k_x,
                        {(k, a): c for (k, a, nu), c in self.terms.items()
                         if not nu})

    # -- substitution ---------------------------------------------------

    def substitute_z(self, values: dict) -> SeriesTX:
        """Replace every jet variable by the given SeriesTX and expand.

        When z-truncation dropped terms (z_clipped), the result is reliable
        only while the dropped part cannot reach the tracked t-orders: every
        substituted value must then vanish at t = 0, and the t-cap shrinks to
        (k_z + 1) * ord_min - 1 with ord_min the least t-order among values.
        """
        vals: dict[ZKey, SeriesTX] = {}
        for key, v in values.items():
            zk = ZKey(int(key[0]), tuple(int(a) for a in key[1]))
            if not isinstance(v, SeriesTX):
                raise TypeError("substitute_z expects SeriesTX values")
            if v.n != self.n:
                raise DimensionMismatch(
                    f"value for {zk} has n = {v.n}, expected {self.n}")
            vals[zk] = v
        used = self.jet_keys_used()
        missing = sorted(used - set(vals), key=_zkey_sort)
        if missing:
            raise MissingSubstitution(f"no value for jet variables {missing}")
        used_vals = [vals[zk] for zk in sorted(used, key=_zkey_sort)]

        kt = min([self.k_t] + [v.k_t for v in used_vals])
        kx = min([self.k_x] + [v.k_x for v in used_vals])
        if self.z_clipped:
            orders = [o for v in used_vals if (o := v.t_order()) is not None]
            ord_min = min(orders) if orders else None
            if ord_min == 0:
                raise TruncationExhausted(
                    "dropped jet terms reach t-order 0: substitution values "
                    "must vanish at t = 0 after z-truncation")
            if ord_min is not None:
                kt = min(kt, (self.k_z + 1) * ord_min - 1)

        # cache powers of each value at the output caps
        max_pow: dict[ZKey, int] = {}
        for (_, _, nu) in self.terms:
            for zk, p in nu:
                max_pow[zk] = max(max_pow.get(zk, 0), p)
        powers: dict[ZKey, list[SeriesTX]] = {}
        for zk, top in max_pow.items():
            base = vals[zk].truncate(kt, kx)
            cache = [SeriesTX.one(self.n, kt, kx)]
            for _ in range(top):
                cache.append(cache[-1] * base)
            powers[zk] = cache

        out = SeriesTX.zero(self.n, kt, kx)
        for (k, alpha, nu), c in self.terms.items():
            if k > kt or sum(alpha) > kx:
                continue
            piece = SeriesTX.monomial(self.n, kt, kx, c, k, alpha)
            for zk, p in nu:
                piece = piece * powers[zk][p]
            out = out + piece
        return out

    def shift_z(self, shifts: dict) -> "SeriesTXZ":
        """Substitute z[zk] -> z[zk] + s_zk(t, x) for the given shifts.

        Needs an exact jet polynomial: a z-clipped series would have lost
        high z-degree terms whose shifted expansion reaches low z-degrees.
        """
        if self.z_clipped:
            raise TruncationExhausted("cannot shift jet variables after z-clipping")
        sh: dict[ZKey, SeriesTX] = {}
        for key, s in shifts.items():
            zk = ZKey(int(key[0]), tuple(int(a) for a in key[1]))
            if not isinstance(s, SeriesTX):
                raise TypeError("shift_z expects SeriesTX shifts")
            if s.n != self.n:
                raise DimensionMismatch(
                    f"shift for {zk} has n = {s.n}, expected {self.n}")
            sh[zk] = s

        out = SeriesTXZ.zero(self.n, self.m, self.k_t, self.k_x, self.k_z)
        for (k, alpha, nu), c in self.terms.items():
            piece = SeriesTXZ(self.n, self.m, self.k_t, self.k_x, self.k_z,
                              {(k, alpha, ()): c})
            for zk, p in nu:
                var = SeriesTXZ.z_var(self.n, self.m, self.k_t, self.k_x,
                                      self.k_z, zk)
                s = sh.get(zk)
                factor = var if s is None or s.is_zero() \
                    else var + SeriesTXZ.from_tx(s, self.m, self.k_z)
                for _ in range(p):
                    piece = piece * factor
            out = out + piece
        return out

    def substitute_z_linear(self, mapping: dict) -> "SeriesTXZ":
        """Replace jet variables by linear combinations of jet variables.

        mapping: ZKey -> iterable of (coefficient, ZKey).  Keys absent from
        the mapping are left alone.  Degrees in z are preserved, so this is
        safe on z-clipped series: whatever was dropped stays above the cap.
        """
        lin: dict[ZKey, list] = {}
        for key, combo in mapping.items():
            zk = ZKey(int(key[0]), tuple(int(a) for a in key[1]))
            lin[zk] = [(_coeff(c), ZKey(int(k2[0]), tuple(int(a) for a in k2[1])))
                       for c, k2 in combo]

        out = SeriesTXZ.zero(self.n, self.m, self.k_t, self.k_x, self.k_z)
        for (k, alpha, nu), c in self.terms.items():
            piece = SeriesTXZ(self.n, self.m, self.k_t, self.k_x, self.k_z,
                              {(k, alpha, ()): c})
            for zk, p in nu:
                if zk in lin:
                    factor = SeriesTXZ.zero(self.n, self.m, self.k_t,
                                            self.k_x, self.k_z)
                    for cc, zk2 in lin[zk]:
                        factor = factor + SeriesTXZ.z_var(
                            self.n, self.m, self.k_t, self.k_x,
                            self.k_z, zk2).scale(cc)
                else:
                    factor = SeriesTXZ.z_var(self.n, self.m, self.k_t,
                                             self.k_x, self.k_z, zk)
                for _ in range(p):
                    piece = piece * factor
            out = out + piece
        if self.z_clipped:
            out = SeriesTXZ(out.n, out.m, out.k_t, out.k_x, out.k_z,
                            out.terms, z_clipped=True)
        return out

    # -- evaluation ---------------------------------------------------

    def eval_numeric(self, t, xs, zvals: dict) -> complex:
        xs = tuple(xs)
        if len(xs) != self.n:
            raise DimensionMismatch(f"expected {self.n} spatial values")
        zc = {ZKey(int(k[0]), tuple(int(a) for a in k[1])): complex(v)
              for k, v in zvals.items()}
        missing = sorted(self.jet_keys_used() - set(zc), key=_zkey_sort)
        if missing:
            raise MissingSubstitution(f"no numeric value for {missing}")
        slices: dict[int, list] = {}
        for (k, alpha, nu), c in self.terms.items():
            slices.setdefault(k, []).append((alpha, nu, c))
        acc = 0j
        for k in range(max(slices, default=0), -1, -1):
            v = 0j
            part = sorted(slices.get(k, ()),
                          key=lambda anc: (_alpha_key(anc[0]),
                                           tuple((_zkey_sort(zk), p)
                                                 for zk, p in anc[1])))
            for alpha, nu, c in part:
                mono = 1.0 + 0j
                for xj, a in zip(xs, alpha):
                    mono *= xj ** a
                for zk, p in nu:
                    mono *= zc[zk] ** p
                v += c.as_complex() * mono
            acc = acc * t + v
        return acc
