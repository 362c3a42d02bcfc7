"""Generating series of tautological Segre integrals over Quot schemes of
curves with zero-dimensional quotients.

For a single section (symmetric products of the curve) there is a complete
closed form: after the change of variables q = t(1-x_1 t)^{r_1}...(1-x_l t)^{r_l}
the series factors into per-class degree factors A_i = 1 - x_i t and a genus
factor B = (q/t)^2 dt/dq.  For several sections and one line bundle there is
a parallel closed form with covariable q = (-1)^N t (1+t)^N.  Genus-zero
integrals reduce to coefficient extraction on projective space, which this
module also implements directly as a check path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .exact_algebra import MPoly, binom_general
from .power_series import Series, binomial_series
from .errors import UnsupportedConfigurationError


@dataclass(frozen=True)
class KClass:
    """A K-theory class on a curve: integer rank (negative allowed), integer
    degree, and a Segre twist variable which is either an exact rational or
    the name of a formal variable."""

    rank: int
    degree: int
    twist: object = 1

    def is_formal(self) -> bool:
        return isinstance(self.twist, str)


@dataclass(frozen=True)
class CurveSpec:
    genus: int
    classes: tuple
    sections: int = 1  # the N of Quot(C^N, n)

    def __post_init__(self):
        if self.sections < 1:
            raise ValueError("need at least one section")


def _twist_ring(classes):
    """Return (vars, scalars): formal twist names in order of appearance and
    one twist scalar per class (Fraction, or MPoly when formal twists occur)."""
    vars_ = []
    for c in classes:
        if c.is_formal() and c.twist not in vars_:
            vars_.append(c.twist)
    vars_ = tuple(vars_)
    scalars = []
    for c in classes:
        if c.is_formal():
            scalars.append(MPoly.var(vars_, c.twist))
        elif vars_:
            scalars.append(MPoly.const(vars_, Fraction(c.twist)))
        else:
            scalars.append(Fraction(c.twist))
    return vars_, scalars


def _binser(var: str, c, e: int, order: int) -> Series:
    """(1 + c*var)^e for a coefficient-ring scalar c and integer e."""
    coeffs = [Fraction(1)]
    ck = 1
    for k in range(1, order + 1):
        ck = ck * c
        coeffs.append(binom_general(e, k) * ck)
    return Series(var, 0, coeffs, order + 1)


def segre_class_pn(kls: KClass, n: int) -> Series:
    """Total Segre class of the induced tautological class on the n-th
    symmetric power of the projective line: (1 - x h)^(d - n r + r),
    truncated at h^n."""
    _, (x,) = _twist_ring([kls])
    e = kls.degree - n * kls.rank + kls.rank
    return _binser("h", -1 * x, e, n)


def symmetric_product_direct(classes, order: int) -> Series:
    """Genus-zero series by direct projective-space extraction:
    sum_n q^n [h^n] prod_i (1 - x_i h)^(d_i - n r_i + r_i).

    Independent of the change-of-variables path; used as an oracle."""
    _, scalars = _twist_ring(classes)
    out = []
    for n in range(order + 1):
        prod = Series.one("h", n + 1)
        for c, x in zip(classes, scalars):
            e = c.degree - n * c.rank + c.rank
            prod = prod * _binser("h", -1 * x, e, n)
        out.append(prod.coeff(n) if n < prod.prec else 0)
    return Series("q", 0, out, order + 1)


@dataclass
class CurveSeries:
    """Factored answer: series = prod_i degree_factors[i]^degree_i *
    genus_factor^(1-g), plus the covariable t(q) used to build it."""

    series: Series
    degree_factors: list
    genus_factor: Series
    covariable: Series


def symmetric_product_series(spec: CurveSpec, order: int) -> CurveSeries:
    """Closed form for a single section (N = 1), any genus, any K-classes.

    Change of variables q = t * prod_i (1 - x_i t)^(r_i); the degree factor
    for the i-th class is 1 - x_i t(q) and the genus factor is
    (q/t)^2 * dt/dq.
    """
    if spec.sections != 1:
        raise UnsupportedConfigurationError(
            "closed form implemented for a single section; use the rank-one "
            "multi-section factors instead"
        )
    classes = spec.classes
    _, scalars = _twist_ring(classes)
    work = order + 3
    cov = Series.x("t", work + 1)
    for c, x in zip(classes, scalars):
        cov = cov * _binser("t", -1 * x, c.rank, work)
    cov = cov.truncate(work)
    t_of_q = cov.reversion(out_var="q")
    factors = []
    for c, x in zip(classes, scalars):
        factors.append((1 - t_of_q.scale(x)).truncate(order))
    q_over_t = (Series.x("q", t_of_q.prec) / t_of_q)
    genus_factor = (q_over_t * q_over_t * t_of_q.deriv()).truncate(order)
    z = Series.one("q", order + 1)
    for c, f in zip(classes, factors):
        z = z * f ** c.degree
    z = (z * genus_factor ** (1 - spec.genus)).truncate(order)
    return CurveSeries(z, factors, genus_factor, t_of_q.truncate(order))


def log_degree_factor(ranks, order: int) -> Series:
    """Logarithm of the first degree factor for classes of the given ranks
    and formal twists: sum_n (-1)^n (q^n/n) a_n with

        a_n = x_1 * sum_{p_1+...+p_l = n-1} C(-n r_1 - 1, p_1)
              * prod_{j>=2} C(-n r_j, p_j) * x^p.
    """
    ranks = tuple(ranks)
    ell = len(ranks)
    vars_ = ("x",) if ell == 1 else tuple(f"x{i+1}" for i in range(ell))
    coeffs = [MPoly(vars_, {})]
    for n in range(1, order + 1):
        terms = {}
        for p in _compositions(n - 1, ell):
            c = binom_general(-n * ranks[0] - 1, p[0])
            for j in range(1, ell):
                c *= binom_general(-n * ranks[j], p[j])
            if c == 0:
                continue
            e = (p[0] + 1,) + p[1:]
            terms[e] = terms.get(e, Fraction(0)) + c
        a_n = MPoly(vars_, terms)
        coeffs.append(a_n * Fraction((-1) ** n, n))
    return Series("q", 0, coeffs, order + 1)


def log_degree_factor_coefficient(ranks, n: int, exponents) -> Fraction:
    """[x^exponents] of a_n scaled into the log series; helper for tests."""
    s = log_degree_factor(ranks, n)
    return s.coeff(n).coeff(tuple(exponents))


def _compositions(n, k):
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def log_degree_factor_rank_r(r: int, sections: int, order: int) -> Series:
    """Closed-form logarithm of the degree factor for one rank-r bundle and
    N sections: sum_n (-1)^((N+1)n+1) C((r+N)n - 1, Nn - 1) q^n / n."""
    N = sections
    coeffs = [Fraction(0)]
    for n in range(1, order + 1):
        c = binom_general((r + N) * n - 1, N * n - 1)
        coeffs.append(Fraction((-1) ** ((N + 1) * n + 1), n) * c)
    return Series("q", 0, coeffs, order + 1)


def rank_one_closed_factors(sections: int, order: int):
    """(A, B) for one line bundle and N sections, via the change of
    variables q = (-1)^N t (1+t)^N: A = (1+t)^N, B = (1+t)^(N+1)/(1+(N+1)t)."""
    N = sections
    work = order + 3
    cov = (Series.x("t", work + 1) * binomial_series("t", 1, N, work)).scale(
        Fraction((-1) ** N)
    ).truncate(work)
    t_of_q = cov.reversion(out_var="q")
    one_plus = (1 + t_of_q).truncate(order + 1)
    a = one_plus ** N
    b = one_plus ** (N + 1) / (1 + t_of_q.scale(N + 1)).truncate(order + 1)
    return a.truncate(order), b.truncate(order)


def genus_factor_binomial(sections: int, order: int) -> Series:
    """Explicit expansion of the multi-section genus factor for rank one:
    sum_n (-1)^(n(N+1)) C((n-1)(N+1), n) q^n."""
    N = sections
    coeffs = [
        Fraction((-1) ** (n * (N + 1))) * binom_general((n - 1) * (N + 1), n)
        for n in range(order + 1)
    ]
    return Series("q", 0, coeffs, order + 1)


def quot_p1_segre_closed(sections: int, degree: int, n: int) -> Fraction:
    """Segre number of the rank-Nn tautological bundle of a degree-d line
    bundle over the Quot scheme of the line: (-1)^(Nn) C(Nd - N(n-1), n)."""
    N = sections
    return Fraction((-1) ** (N * n)) * binom_general(N * degree - N * (n - 1), n)


def quot_p1_segre_symmetry(sections: int, degree: int, n: int) -> Fraction:
    """The rank/section-swapped side: (-1)^(n(N-1)) * [h^n](1-h)^(N(d-n+1)),
    an integral of the N-th power of a Segre class over the symmetric power."""
    N = sections
    pn = Fraction((-1) ** n) * binom_general(N * (degree - n + 1), n)
    return Fraction((-1) ** (n * (N - 1))) * pn


def single_class_log_factors(rank: int, order: int):
    """Log-form factors for one rank-r class at twist 1 (numerical series):
    under q = t(1-t)^r these are log(1-t) and
    (r+1)log(1-t) - log(1-(r+1)t)."""
    work = order + 3
    cov = (Series.x("t", work + 1) * binomial_series("t", -1, rank, work)).truncate(work)
    t_of_q = cov.reversion(out_var="q")
    log_a = (1 - t_of_q).truncate(order + 1).log()
    log_b = log_a.scale(rank + 1) - (1 - t_of_q.scale(rank + 1)).truncate(order + 1).log()
    return log_a.truncate(order), log_b.truncate(order)


def genus_factor_rank2_pair(order: int) -> Series:
    """Genus factor for a rank-2 bundle with two sections, from the nested
    square-root closed form.  The closed form is naturally a function of t
    with q = -t^2; only even powers of t may appear, which is asserted."""
    tw = 2 * order + 6
    s1 = binomial_series("t", -4, 1, tw).pow_frac(Fraction(1, 2))
    s2 = binomial_series("t", 4, 1, tw).pow_frac(Fraction(1, 2))
    s3 = (1 - Series.from_coeffs("t", [16], prec=tw + 1, val=2)).pow_frac(Fraction(1, 2))
    num = (1 + s1) ** 4 * (1 + s2) ** 4 * (1 - s3)
    den = (s3.shift(2)).scale(2048)
    b_of_t = num / den
    coeffs = []
    for m in range(order + 1):
        odd = b_of_t.coeff(2 * m + 1) if 2 * m + 1 < b_of_t.prec else 0
        if odd != 0:
            raise AssertionError("odd power of t survived in the rank-2 genus factor")
        coeffs.append(Fraction((-1) ** m) * b_of_t.coeff(2 * m))
    return Series("q", 0, coeffs, order + 1)
