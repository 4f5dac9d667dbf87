"""Recursive construction of the formal solution.

Writing u = sum_{k>=1} u_k(x) t^k, applying (t d/dt)^m to u and matching
the t^k coefficient against the right-hand side evaluated on the partial
sum gives, order by order,

    P_k(x) u_k(x) = G_k(x),

where P_k(x) = k^m - sum_i beta*_i(x) k^i is a unit x-series whenever its
value at x = 0 is nonzero (positive-integer non-resonance), and G_k only
involves u_1 .. u_{k-1}.  Every step is exact rational arithmetic; the
optional verification re-substitutes the result and insists the residual
vanishes identically within the tracked truncation.

Truncation budget: each jet evaluation consumes up to m orders of x-cap,
once per step, so producing x-degree x_order at t-order K needs the
right-hand side to carry k_x >= x_order + m*K and k_t >= K.
"""

from __future__ import annotations

from dataclasses import dataclass

from .equation import FuchsianEquation
from .errors import A2Violation, IndicialZero, TruncationExhausted
from .rational import CRat
from .series import SeriesTX, SeriesTXZ, ZKey


def derivative_tuple(u: SeriesTX, keys) -> dict[ZKey, SeriesTX]:
    """Jet of u on the given keys: alpha spatial derivatives, then i Euler
    derivatives (the two commute)."""
    out: dict[ZKey, SeriesTX] = {}
    by_alpha: dict[tuple, SeriesTX] = {}
    for zk in keys:
        d = by_alpha.get(zk.alpha)
        if d is None:
            d = u.dx_multi(zk.alpha)
            by_alpha[zk.alpha] = d
        for _ in range(zk.i):
            d = d.euler_t()
        out[zk] = d
    return out


@dataclass(frozen=True)
class FormalSolution:
    """Result of the order-by-order construction."""

    u: SeriesTX
    order: int
    x_order: int
    indicial: dict          # step k -> exact indicial value at x = 0
    verified: bool


def solve_formal(eq: FuchsianEquation, order: int, x_order: int | None = None,
                 verify: bool = True) -> FormalSolution:
    """Unique formal solution with u(0, x) = 0, through t-order `order` and
    x-degree `x_order`."""
    if order < 1:
        raise ValueError("order must be at least 1")
    F = eq.F
    if F.k_t < order:
        raise TruncationExhausted(
            f"right-hand side tracks t-order {F.k_t} < requested {order}")
    budget = eq.m * order
    if x_order is None:
        x_order = F.k_x - budget
    if x_order < 0 or F.k_x < x_order + budget:
        raise TruncationExhausted(
            f"need k_x >= {x_order + budget} on the right-hand side for "
            f"x-degree {x_order} at t-order {order} (have {F.k_x})")

    n = eq.n
    u = SeriesTX.zero(n, order, F.k_x)
    indicial: dict[int, CRat] = {}
    for k in range(1, order + 1):
        jet = derivative_tuple(u, eq.keys)
        rhs = F.substitute_z(jet)
        if rhs.k_t < k:
            raise TruncationExhausted(
                f"substitution reliable only to t-order {rhs.k_t} < {k}")
        section = rhs.x_section(k)
        p0 = eq.indicial_value(k)
        indicial[k] = p0
        if p0.is_zero():
            raise IndicialZero(
                f"indicial polynomial vanishes at s = {k}; the recursion "
                f"cannot be solved at this order")
        Pk = eq.indicial_series(k).truncate(k_x=section.k_x)
        uk_x = Pk.invert_unit() * section
        # lift the t-free slice to t^k; the slice is exact so the t-cap of
        # the running sum is kept rather than min-joined away
        uk = SeriesTX(n, u.k_t, uk_x.k_x,
                      {(k, a): c for (_, a), c in uk_x.terms.items()})
        u = u + uk

    verified = False
    # re-substitution needs m more x-derivatives than construction did, so
    # it only runs when that much budget is left over
    if verify and u.k_x >= eq.m:
        res = residual(eq, u, order)
        assert res.is_zero(), (
            "internal error: formal solution leaves a nonzero residual")
        verified = True
    return FormalSolution(u=u.truncate(k_x=x_order), order=order,
                          x_order=x_order, indicial=indicial, verified=verified)


def residual(eq: FuchsianEquation, u: SeriesTX, K: int) -> SeriesTX:
    """(t d/dt)^m u - F(jet of u), truncated at t-order K."""
    lhs = u
    for _ in range(eq.m):
        lhs = lhs.euler_t()
    rhs = eq.F.substitute_z(derivative_tuple(u, eq.keys))
    return (lhs - rhs).truncate(k_t=K)


def manufactured(eq: FuchsianEquation, u_target: SeriesTX) -> FuchsianEquation:
    """Equation with the same jet structure whose solution is u_target.

    Adds the forcing g = (t d/dt)^m u_target - F(jet of u_target) to the
    right-hand side.  The forcing must vanish at t = 0, otherwise the
    result would violate the no-forcing condition."""
    g = residual(eq, u_target, u_target.k_t)
    if any(k == 0 for (k, _) in g.terms):
        raise A2Violation(
            "manufactured forcing has terms at t-order 0; pick a target "
            "that vanishes at t = 0")
    F = eq.F + SeriesTXZ.from_tx(g, eq.m, eq.F.k_z)
    return FuchsianEquation(eq.m, eq.n, F,
                            name=(eq.name + "+forcing") if eq.name else "forced")
