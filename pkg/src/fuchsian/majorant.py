"""Majorant arithmetic: one-variable comparison series with nonnegative
rational coefficients.

The weighted norm of a spatial series f(x) = sum_alpha f_alpha x^alpha is

    sum_alpha |f_alpha| (alpha! / |alpha|!) rho^|alpha|,

a polynomial in rho >= 0 with nonnegative coefficients (RhoPoly).  Applied
slice by slice in t this produces a SectorMajorant, sum_k P_k(rho) t^k,
optionally carrying a fractional global power t^t_shift.  Right-hand sides
with jet variables map to NormProfileZ, which keeps the jet monomials
symbolic so they can later be filled with norm bounds of actual profiles.

|f_alpha| is the directed bound CRat.abs_upper, so every coefficient here
is an exact rational upper bound and all comparisons are certificates.
"""

from __future__ import annotations

from math import factorial

from .errors import DimensionMismatch, NegativeCoefficient, NonpositiveExponent
from .rational import Frac
from .series import SeriesTX, SeriesTXZ, ZKey, _norm_nu, _nu_degree, _zkey_sort


def weight(alpha) -> Frac:
    """Combinatorial weight alpha!/|alpha|! of a multi-index."""
    alpha = tuple(int(a) for a in alpha)
    num = 1
    for a in alpha:
        num *= factorial(a)
    return Frac(num, factorial(sum(alpha)))


class RhoPoly:
    """Polynomial in rho with nonnegative Fraction coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [Frac(c) for c in coeffs]
        for c in cs:
            if c < 0:
                raise NegativeCoefficient(f"majorant coefficient {c} < 0")
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls) -> "RhoPoly":
        return cls(())

    @classmethod
    def monomial(cls, c, d: int) -> "RhoPoly":
        return cls((0,) * d + (c,))

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else -1

    def coeff(self, d: int) -> Frac:
        return self.coeffs[d] if 0 <= d < len(self.coeffs) else Frac(0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RhoPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    __hash__ = None

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return f"RhoPoly({list(self.coeffs)})"

    def __add__(self, other: "RhoPoly") -> "RhoPoly":
        if not isinstance(other, RhoPoly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return RhoPoly(tuple(c + (b[i] if i < len(b) else 0)
                             for i, c in enumerate(a)))

    def __mul__(self, other):
        if isinstance(other, RhoPoly):
            if self.is_zero() or other.is_zero():
                return RhoPoly.zero()
            out = [Frac(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return RhoPoly(out)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c) -> "RhoPoly":
        c = Frac(c)
        if c < 0:
            raise NegativeCoefficient(f"scale factor {c} < 0")
        return RhoPoly(tuple(v * c for v in self.coeffs))

    def d_rho(self) -> "RhoPoly":
        return RhoPoly(tuple(c * d for d, c in enumerate(self.coeffs))[1:])

    def eval(self, rho: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * rho + float(c)
        return acc

    def eval_frac(self, rho: Frac) -> Frac:
        acc = Frac(0)
        for c in reversed(self.coeffs):
            acc = acc * rho + c
        return acc

    def leq(self, other: "RhoPoly") -> bool:
        """Coefficientwise comparison; implies pointwise for rho >= 0."""
        top = max(len(self.coeffs), len(other.coeffs))
        return all(self.coeff(d) <= other.coeff(d) for d in range(top))


class SectorMajorant:
    """t^t_shift * sum_k P_k(rho) t^k with nonnegative coefficients."""

    __slots__ = ("coeffs", "t_shift")

    def __init__(self, coeffs=None, t_shift=0):
        shift = Frac(t_shift)
        if shift < 0:
            raise ValueError("t_shift must be nonnegative")
        store: dict[int, RhoPoly] = {}
        for k, p in (coeffs or {}).items():
            k = int(k)
            if k < 0:
                raise ValueError("negative t-power in majorant")
            if not isinstance(p, RhoPoly):
                p = RhoPoly(p)
            if not p.is_zero():
                store[k] = p
        self.coeffs = store
        self.t_shift = shift

    @classmethod
    def zero(cls) -> "SectorMajorant":
        return cls({})

    def is_zero(self) -> bool:
        return not self.coeffs

    def slice(self, k: int) -> RhoPoly:
        return self.coeffs.get(k, RhoPoly.zero())

    def sorted_items(self) -> list:
        return sorted(self.coeffs.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, SectorMajorant):
            return NotImplemented
        return self.t_shift == other.t_shift and self.coeffs == other.coeffs

    __hash__ = None

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        body = ", ".join(f"t^{k}: {list(p.coeffs)}" for k, p in self.sorted_items())
        sh = f", shift={self.t_shift}" if self.t_shift else ""
        return f"SectorMajorant({{{body}}}{sh})"

    def __add__(self, other: "SectorMajorant") -> "SectorMajorant":
        if not isinstance(other, SectorMajorant):
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.t_shift != other.t_shift:
            raise ValueError("cannot add majorants with different t shifts")
        out = dict(self.coeffs)
        for k, p in other.coeffs.items():
            out[k] = out[k] + p if k in out else p
        return SectorMajorant(out, self.t_shift)

    def __mul__(self, other):
        if isinstance(other, SectorMajorant):
            out: dict[int, RhoPoly] = {}
            for k1, p1 in self.coeffs.items():
                for k2, p2 in other.coeffs.items():
                    k = k1 + k2
                    p = p1 * p2
                    out[k] = out[k] + p if k in out else p
            return SectorMajorant(out, self.t_shift + other.t_shift)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c) -> "SectorMajorant":
        return SectorMajorant({k: p.scale(c) for k, p in self.coeffs.items()},
                              self.t_shift)

    def shifted(self, extra) -> "SectorMajorant":
        """Multiply by t**extra (extra >= 0, possibly fractional)."""
        return SectorMajorant(self.coeffs, self.t_shift + Frac(extra))

    def euler(self) -> "SectorMajorant":
        """Apply t d/dt: each power picks up its exponent k + t_shift."""
        return SectorMajorant(
            {k: p.scale(Frac(k) + self.t_shift) for k, p in self.coeffs.items()},
            self.t_shift)

    def d_rho(self) -> "SectorMajorant":
        return SectorMajorant({k: p.d_rho() for k, p in self.coeffs.items()},
                              self.t_shift)

    def integral_transform(self, a) -> "SectorMajorant":
        """Divide the t^k coefficient by k + a; needs a > 0 and no t shift.

        This is the comparison-series image of the weighted time integral
        t^-a int_0^t s^(a-1) (.) ds used to undo one Euler factor."""
        a = Frac(a)
        if a <= 0:
            raise NonpositiveExponent(f"transform exponent {a} <= 0")
        if self.t_shift != 0:
            raise ValueError("transform defined for unshifted majorants")
        return SectorMajorant({k: p.scale(Frac(1, 1) / (k + a))
                               for k, p in self.coeffs.items()})

    def leq(self, other: "SectorMajorant") -> bool:
        if self.t_shift != other.t_shift and not self.is_zero():
            return False
        for k in set(self.coeffs) | set(other.coeffs):
            if not self.slice(k).leq(other.slice(k)):
                return False
        return True

    def eval(self, t: float, rho: float) -> float:
        if not self.coeffs:
            return 0.0
        acc = 0.0
        for k in range(max(self.coeffs), -1, -1):
            acc = acc * t + self.slice(k).eval(rho)
        if self.t_shift:
            acc *= t ** float(self.t_shift)
        return acc

    def eval_frac(self, t: Frac, rho: Frac) -> Frac:
        if self.t_shift.denominator != 1:
            raise ValueError("exact evaluation needs an integer t shift")
        acc = Frac(0)
        for k in range(max(self.coeffs, default=0), -1, -1):
            acc = acc * t + self.slice(k).eval_frac(rho)
        return acc * t ** int(self.t_shift) if self.t_shift else acc


def norm_x(f: SeriesTX) -> SectorMajorant:
    """Weighted norm of every t-slice of f, as a majorant in (t, rho)."""
    slices: dict[int, list] = {}
    for (k, alpha), c in f.terms.items():
        d = sum(alpha)
        slices.setdefault(k, [])
        while len(slices[k]) <= d:
            slices[k].append(Frac(0))
        slices[k][d] += c.abs_upper() * weight(alpha)
    return SectorMajorant({k: RhoPoly(cs) for k, cs in slices.items()})


class NormProfileZ:
    """Majorant of a jet-dependent right-hand side.

    Stores, for each (t-power k, jet monomial nu), the rho-polynomial that
    bounds the weighted norm of the matching coefficient series.  The jet
    slots are later filled with nonnegative numbers (norms of profiles).
    """

    __slots__ = ("profiles",)

    def __init__(self, profiles=None):
        store: dict[tuple, RhoPoly] = {}
        for (k, nu), p in (profiles or {}).items():
            k = int(k)
            if k < 0:
                raise ValueError("negative t-power in norm profile")
            nu = _norm_nu(nu)
            if not isinstance(p, RhoPoly):
                p = RhoPoly(p)
            if p.is_zero():
                continue
            store[(k, nu)] = store[(k, nu)] + p if (k, nu) in store else p
        self.profiles = store

    def is_zero(self) -> bool:
        return not self.profiles

    def sorted_items(self) -> list:
        def key(kv):
            (k, nu), _ = kv
            return (k + _nu_degree(nu), k,
                    tuple((_zkey_sort(zk), p) for zk, p in nu))
        return sorted(self.profiles.items(), key=key)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NormProfileZ):
            return NotImplemented
        return self.profiles == other.profiles

    __hash__ = None

    def __add__(self, other: "NormProfileZ") -> "NormProfileZ":
        if not isinstance(other, NormProfileZ):
            return NotImplemented
        out = dict(self.profiles)
        for key, p in other.profiles.items():
            out[key] = out[key] + p if key in out else p
        return NormProfileZ(out)

    def scale(self, c) -> "NormProfileZ":
        return NormProfileZ({key: p.scale(c) for key, p in self.profiles.items()})

    def d_rho(self) -> "NormProfileZ":
        return NormProfileZ({key: p.d_rho() for key, p in self.profiles.items()})

    def dz(self, key) -> "NormProfileZ":
        """Formal partial derivative in one jet slot (power rule)."""
        zk = ZKey(int(key[0]), tuple(int(a) for a in key[1]))
        out: dict[tuple, RhoPoly] = {}
        for (k, nu), p in self.profiles.items():
            nd = dict(nu)
            if zk not in nd:
                continue
            power = nd[zk]
            nd[zk] -= 1
            nkey = (k, _norm_nu(nd))
            q = p.scale(power)
            out[nkey] = out[nkey] + q if nkey in out else q
        return NormProfileZ(out)

    def eval(self, t: float, rho: float, z: dict) -> float:
        zc = {ZKey(int(k[0]), tuple(int(a) for a in k[1])): float(v)
              for k, v in z.items()}
        acc = 0.0
        for (k, nu), p in self.sorted_items():
            v = p.eval(rho) * t ** k
            for zk, power in nu:
                v *= zc[zk] ** power
            acc += v
        return acc

    def z_linear_bound(self, R, L) -> Frac:
        """Exact constant C with value <= C * max_z |z| whenever rho <= R,
        t dependence absent, and every jet slot is bounded by L.

        Pulls one factor out of each jet monomial; hence every stored term
        must be t-free and of jet degree >= 1."""
        R, L = Frac(R), Frac(L)
        acc = Frac(0)
        for (k, nu), p in self.profiles.items():
            if k != 0:
                raise ValueError("z_linear_bound needs a t-free profile")
            deg = _nu_degree(nu)
            if deg < 1:
                raise ValueError("z_linear_bound needs jet degree >= 1")
            acc += p.eval_frac(R) * L ** (deg - 1)
        return acc

    def z_total_bound(self, R, L) -> Frac:
        """Exact bound for the value itself when rho <= R, t <= 1 ignored
        (profiles must be t-free) and every jet slot is bounded by L."""
        R, L = Frac(R), Frac(L)
        acc = Frac(0)
        for (k, nu), p in self.profiles.items():
            if k != 0:
                raise ValueError("z_total_bound needs a t-free profile")
            acc += p.eval_frac(R) * L ** _nu_degree(nu)
        return acc


def norm_xz(F: SeriesTXZ) -> NormProfileZ:
    """Normwise majorant of a jet-dependent series, jet monomials kept."""
    slices: dict[tuple, list] = {}
    for (k, alpha, nu), c in F.terms.items():
        d = sum(alpha)
        key = (k, nu)
        slices.setdefault(key, [])
        while len(slices[key]) <= d:
            slices[key].append(Frac(0))
        slices[key][d] += c.abs_upper() * weight(alpha)
    return NormProfileZ({key: RhoPoly(cs) for key, cs in slices.items()})


# thin functional aliases, handy in scripts and tests

def integral_transform(M: SectorMajorant, a) -> SectorMajorant:
    return M.integral_transform(a)


def d_rho(M):
    return M.d_rho()


def eval_majorant(M: SectorMajorant, t: float, rho: float) -> float:
    return M.eval(t, rho)
