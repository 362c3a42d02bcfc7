"""Exact expansions of the roots of z^N = q(z-1)^N and h^N(1-h) = (-1)^(N-1) q,
and the closed forms built from symmetric functions of those roots.

The roots are Puiseux series in s = q^(1/N) with coefficients in a cyclotomic
field; the quotient-equation roots have the closed form r_j = w s/(w s - 1)
for w running over the N-th roots of unity.  Symmetric expressions in the
full root set are invariant under s -> zeta*s and therefore collapse to
honest rational q-series; that collapse is asserted coefficient by
coefficient, never assumed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import RationalityError, SeriesPrecisionError
from .exact_algebra import CycloNum, Poly, RatFunc, ratfunc_reconstruct
from .power_series import Series, binomial_series

QUOTIENT_EQ = "quotient_eq"
H_EQ = "h_eq"


@dataclass(frozen=True)
class PuiseuxSeries:
    """A series in s = q^(1/ramification); the base lives over CycloNum
    coefficients (or plain Fractions when the ramification is 1)."""

    base: Series
    ramification: int

    def to_q_series(self, var: str = "q") -> Series:
        return symmetric_to_q(self.base, self.ramification, var)


@dataclass(frozen=True)
class RootSystem:
    sections: int
    roots: tuple
    equation: str

    def base_series(self):
        return [r.base for r in self.roots]


def _cyclo_one(order: int):
    return CycloNum.const(order, 1)


def roots_quotient_eq(sections: int, order: int, pad: int = 4) -> RootSystem:
    """The N Puiseux roots of z^N - q(z-1)^N = 0 vanishing at q = 0:
    r_j = -(sum_{m>=1} w^(jm) s^m) with w a primitive N-th root of unity.

    Expanded through s-order N*(order+1)+pad-1 so that q-order ``order`` is
    reliable after symmetric collapse."""
    N = sections
    sprec = N * (order + 1) + pad
    roots = []
    for j in range(1, N + 1):
        coeffs = [-CycloNum.zeta(N, (j * m) % N) for m in range(1, sprec)]
        base = Series("s", 1, coeffs, sprec)
        roots.append(PuiseuxSeries(base, N))
    rs = RootSystem(N, tuple(roots), QUOTIENT_EQ)
    _check_quotient_roots(rs)
    return rs


def _check_quotient_roots(rs: RootSystem):
    N = rs.sections
    for r in rs.base_series():
        qs = Series("s", N, [_cyclo_one(N)], r.prec)  # s^N = q
        resid = r ** N - qs * (r - 1) ** N
        if not resid.is_zero():
            raise AssertionError("root fails its defining equation")


def symmetric_to_q(series: Series, ramification: int, var: str = "q") -> Series:
    """Collapse a series in s = q^(1/ram) with cyclotomic coefficients to a
    rational series in q.  Every surviving s-exponent must be divisible by
    the ramification and every coefficient must have vanishing non-rational
    components; violations raise RationalityError."""
    N = ramification
    vals = {}
    for n in range(series.val, series.prec):
        c = series.coeff(n)
        if isinstance(c, CycloNum):
            if c.is_zero():
                continue
            if not c.is_rational():
                raise RationalityError(
                    f"coefficient of s^{n} has cyclotomic residue {c}"
                )
            c = c.rational_value()
        elif c == 0:
            continue
        if n % N != 0:
            raise RationalityError(f"s-exponent {n} not divisible by {N}")
        vals[n // N] = Fraction(c)
    # q-orders strictly below prec/N are certain (floor division handles
    # negative valuations)
    qprec = (series.prec - 1) // N + 1
    lo = min(vals) if vals else qprec
    coeffs = [vals.get(i, Fraction(0)) for i in range(lo, qprec)]
    return Series(var, lo, coeffs, qprec)


def pair_product(rs: RootSystem, distinct_ordered: bool = False) -> Series:
    """prod over root pairs of (1 - (r_i - r_j)^2), unordered pairs by
    default; the ordered-pairs variant squares each factor and exists so the
    alternative reading can be rejected by test."""
    N = rs.sections
    bases = rs.base_series()
    prod = Series("s", 0, [_cyclo_one(N)], bases[0].prec if bases else 1)
    if not bases:
        return Series("s", 0, [Fraction(1)], 10)
    for i, j in itertools.combinations(range(N), 2):
        d = bases[i] - bases[j]
        f = 1 - d * d
        prod = prod * f
        if distinct_ordered:
            prod = prod * f
    return prod


def euler_base_series(sections: int, order: int) -> Series:
    """The universal q-series whose K_X^2 power gives the dimension-zero
    virtual Euler series: (1-q)^(2N) / (1-2^N q)^N * prod_{i<j} (1-(r_i-r_j)^2)."""
    N = sections
    rs = roots_quotient_eq(N, order)
    sym = symmetric_to_q(pair_product(rs), N)
    pref = binomial_series("q", -1, 2 * N, order) * binomial_series(
        "q", -(2 ** N), -N, order
    )
    return (pref * sym).truncate(order)


def euler_base_ratfunc(sections: int) -> RatFunc:
    """Exact rational form (1-q)^2 P_N(q) / (1-2^N q)^N with P_N integral and
    palindromic of degree 2N-2; reconstruction failures are errors."""
    N = sections
    max_deg = 2 * N
    den = Poly([1, -(2 ** N)]) ** N
    need = max_deg + den.degree() + 4
    series = euler_base_series(N, need)
    rf = ratfunc_reconstruct(series, den, max_deg)
    palin = palindromic_part(sections, rf)
    if palin.degree() != 2 * N - 2 or not palin.is_palindromic() or not palin.is_integral():
        raise RationalityError("numerator does not have the palindromic shape")
    return rf


def palindromic_part(sections: int, rf: RatFunc | None = None) -> Poly:
    """P_N = numerator / (1-q)^2 of the exact rational form."""
    if rf is None:
        rf = euler_base_ratfunc(sections)
    return rf.num.exact_div(Poly([1, -1]) ** 2)


def root_power_sums(rs: RootSystem, kmax: int) -> list:
    """Power sums p_k = sum_i r_i^k as q-series, from the Puiseux roots."""
    N = rs.sections
    out = []
    bases = rs.base_series()
    powers = [Series("s", 0, [_cyclo_one(N)], b.prec) for b in bases]
    for k in range(1, kmax + 1):
        powers = [p * b for p, b in zip(powers, bases)]
        acc = powers[0]
        for p in powers[1:]:
            acc = acc + p
        out.append(symmetric_to_q(acc, N))
    return out


def newton_power_sums(sections: int, order: int, kmax: int) -> list:
    """Power sums from the elementary symmetric functions of the monic
    polynomial (z^N - q(z-1)^N)/(1-q), via Newton's identities.  All N
    elementary symmetric functions equal -C(N,j) q/(1-q)."""
    import math

    N = sections
    base = (Series.from_coeffs("q", [0, -1], prec=order + 1)
            * binomial_series("q", -1, -1, order))
    e = [None] + [base.scale(Fraction(math.comb(N, j))) for j in range(1, N + 1)]
    p = []
    for k in range(1, kmax + 1):
        acc = Series.zero("q", order + 1)
        for i in range(1, min(k - 1, N) + 1):
            acc = acc + e[i].scale(Fraction((-1) ** (i - 1))) * p[k - 1 - i]
        if k <= N:
            acc = acc + e[k].scale(Fraction((-1) ** (k - 1) * k))
        p.append(acc.truncate(order))
    return p


def general_type_series(
    sections: int, ell: int, genus: int, chi: int, order: int
) -> Series:
    """Laurent q-series of virtual Euler characteristics for a minimal
    surface carrying a smooth canonical curve of genus g = K^2 + 1, counting
    quotients with first Chern class ell * K:

        (-1)^(ell*chi) q^(ell(1-g)) * sum over (N-ell)-subsets S of roots of
        A(S)^(1-g),

    with A as in the subset formula below.  The result is known through
    absolute q-order ``order``."""
    N = sections
    if not 0 <= ell <= N:
        raise ValueError("ell must lie between 0 and the number of sections")
    k = N - ell
    shift = ell * (1 - genus)
    pad = 4 * N * N + 2 * N * (abs(1 - genus) + 1) + 8
    while True:
        try:
            return _general_type_attempt(N, ell, genus, chi, order, k, shift, pad)
        except SeriesPrecisionError:
            pad *= 2
            if pad > 10000:
                raise


def _general_type_attempt(N, ell, genus, chi, order, k, shift, pad):
    inner = order - shift  # q-orders of the subset sum needed
    rs = roots_quotient_eq(N, max(inner, 0), pad=pad)
    bases = rs.base_series()
    sprec = bases[0].prec if bases else N * (max(inner, 0) + 1) + pad
    total = Series.zero("s", sprec)
    sign = Fraction((-1) ** ((k * (k - 1)) // 2), N ** k)
    for subset in itertools.combinations(range(N), k):
        a = Series("s", 0, [_cyclo_one(N)], sprec).scale(sign)
        for i in subset:
            x = bases[i]
            a = a * (1 + x) ** N * (1 - x)
            a = a * x ** (-(N - 1))
        for i, j in itertools.combinations(subset, 2):
            d = bases[i] - bases[j]
            dd = d * d
            a = a * dd * (1 - dd).inverse()
        total = total + a ** (1 - genus)
    qs = symmetric_to_q(total, N)
    out = qs.shift(shift).scale(Fraction((-1) ** (ell * chi)))
    if out.prec < order + 1:
        raise SeriesPrecisionError("insufficient working precision")
    return out.truncate(order)


def _h_field_order(N: int) -> int:
    return N if N % 2 == 1 else 2 * N


def roots_h_eq(sections: int, order: int, pad: int = 8):
    """All solutions of h^N (1-h) = (-1)^(N-1) q.

    Returns (RootSystem, distinguished) where the system holds the N Puiseux
    roots with h(0) = 0 (coefficients in the cyclotomic field of order N,
    resp. 2N for even N) and ``distinguished`` is the extra branch with
    h(0) = 1, equal to 1 + t(q) for q = (-1)^N t (1+t)^N."""
    N = sections
    M = _h_field_order(N)
    sprec = N * (order + 1) + pad
    work = sprec + 2 * N + 2
    one = CycloNum.const(M, 1)
    if N % 2 == 1:
        c0 = one
    else:
        c0 = CycloNum.zeta(M)  # a primitive 2N-th root: c0^N = -1
    omega = CycloNum.zeta(M, M // N)
    bcoef = -one if N % 2 == 0 else one  # (-1)^(N-1)
    roots = []
    for j in range(N):
        lead = c0 * omega ** j
        # Newton iteration at a fixed working precision; the claimed
        # coefficients become true once the residual vanishes, which is the
        # loop's exit condition, so the final series is verified, not assumed.
        h = Series("s", 1, [lead], work)
        for _ in range(2 * work + 10):
            f = (h ** N * (1 - h) - Series("s", N, [bcoef], work)).truncate(work - 1)
            if f.is_zero():
                break
            fp = h ** (N - 1) * (N - (N + 1) * h)
            h = h - f / fp
            h = Series("s", h.val, list(h.coeffs), work)
        else:
            raise AssertionError("h-root iteration failed to converge")
        roots.append(PuiseuxSeries(h.truncate(sprec - 1), N))
    work = order + 3
    cov = (Series.x("t", work + 1) * binomial_series("t", 1, N, work)).scale(
        Fraction((-1) ** N)
    ).truncate(work)
    distinguished = (1 + cov.reversion(out_var="q")).truncate(order)
    return RootSystem(N, tuple(roots), H_EQ), distinguished


def identity_ee_check(sections: int, order: int) -> bool:
    """Check that the symmetric-root expression for the rank-one genus
    factor equals h^(N+1)/((N+1)h - N) at the distinguished root h = 1+t."""
    N = sections
    rs, h_dist = roots_h_eq(N, order, pad=6 * N + 10)
    bases = rs.base_series()
    sprec = bases[0].prec
    M = _h_field_order(N)
    one = CycloNum.const(M, 1)
    lhs = Series("s", 0, [one], sprec).scale(Fraction((-1) ** ((N * (N + 1)) // 2)))
    for i, j in itertools.combinations(range(N), 2):
        d = bases[i] - bases[j]
        lhs = lhs * d * d
    prod_h = Series("s", 0, [one], sprec)
    for b in bases:
        prod_h = prod_h * b
    lhs = lhs * prod_h ** (-(N - 1))
    for b in bases:
        lhs = lhs * (1 - b) ** 2
        lhs = lhs * ((N + 1) * b - N).inverse()
    lhs_q = symmetric_to_q(lhs, N)
    rhs = h_dist ** (N + 1) / ((N + 1) * h_dist - N).truncate(order + 1)
    return lhs_q.same_through(rhs, order)
