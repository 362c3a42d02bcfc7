"""Brute-force evaluation of Quot-scheme integrals over the projective line
by resumming torus fixed-locus contributions with generic rational weights.

Every oracle here is an independent check path: it never uses the closed
forms, only the fixed-point data.  The fixed loci for n points split into
products of projective spaces indexed by compositions (n_1, ..., n_N); each
contributes a coefficient extraction of a product of linear-form powers in
the hyperplane classes h_i, with denominators from the Euler class of the
virtual normal bundle.

The weight vector (w_1, ..., w_N) is the *direction* of a one-parameter
subgroup: the actual equivariant parameters are w_i * u.  The fixed-locus
total at each q-order is a rational function of u which is regular at u = 0
and equals the underlying integral only there (the mixed-degree integrand
makes the total genuinely u-dependent away from 0).  Substituting
h_i = u * g_i turns every normal-bundle denominator h_i + (w_j - w_i) u into
u * (g_i + w_j - w_i) with an invertible constant, so all arithmetic happens
in truncated polynomials in u; the limit is the coefficient of the known
power of u, and the lower coefficients are asserted to cancel.  Totals are
independent of the chosen direction, which the test-suite asserts by
recomputing with a second vector.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import IntegrandPoleError, SeriesPrecisionError, WeightError
from .exact_algebra import binom_general
from .power_series import Series


@dataclass(frozen=True)
class WeightVector:
    values: tuple

    def __post_init__(self):
        vals = tuple(Fraction(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        for a, b in itertools.combinations(vals, 2):
            if a - b in (-1, 0, 1):
                raise WeightError(
                    f"weight difference {a - b} in {{-1, 0, 1}}: "
                    "every pairwise difference must avoid these values"
                )

    def __len__(self):
        return len(self.values)


def default_weights(n: int) -> WeightVector:
    """w_i = 2i; all pairwise differences avoid {-1, 0, 1}."""
    return WeightVector(tuple(Fraction(2 * i) for i in range(1, n + 1)))


def alt_weights(n: int) -> WeightVector:
    """Secondary check vector w_i = 3i + 1."""
    return WeightVector(tuple(Fraction(3 * i + 1) for i in range(1, n + 1)))


def _resolve_weights(n: int, weights) -> WeightVector:
    if weights is None:
        return default_weights(n)
    if not isinstance(weights, WeightVector):
        weights = WeightVector(tuple(weights))
    if len(weights) != n:
        raise WeightError(f"need {n} weights, got {len(weights)}")
    return weights


# -- truncated polynomials in u, as plain coefficient lists ----------------

def _up_mul(a, b, w):
    if not a or not b:
        return []
    out = [Fraction(0)] * min(w, len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        jmax = min(len(b), len(out) - i)
        for j in range(jmax):
            y = b[j]
            if y != 0:
                out[i + j] += x * y
    return out


def _up_add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, y in enumerate(b):
        out[i] += y
    return out


def _up_scale(a, c):
    if c == 0:
        return []
    return [x * c for x in a]


def _up_linear_pow(c, e, w):
    """(1 + c*u)^e as a truncated u-polynomial."""
    kmax = w - 1 if e < 0 else min(e, w - 1)
    return [binom_general(e, k) * Fraction(c) ** k for k in range(kmax + 1)]


# -- univariate g-series with u-polynomial coefficients --------------------

def _guni_one(gcap):
    return [[Fraction(1)]] + [[] for _ in range(gcap)]


def _guni_mul(a, b, w):
    out = [[] for _ in range(max(len(a), len(b)))]
    for i, pa in enumerate(a):
        if not pa:
            continue
        for j, pb in enumerate(b):
            if not pb or i + j >= len(out):
                continue
            out[i + j] = _up_add(out[i + j], _up_mul(pa, pb, w))
    return out


def _guni_linear_u(a, sign, e, gcap, w):
    """(1 + sign*u*(g + a))^e: coefficient of g^m u^k is
    C(e,k) sign^k C(k,m) a^(k-m)."""
    a = Fraction(a)
    out = [[] for _ in range(gcap + 1)]
    kmax = w - 1 if e < 0 else min(e, w - 1)
    for m in range(gcap + 1):
        if m > kmax:
            continue
        up = [Fraction(0)] * (kmax + 1)
        any_nz = False
        for k in range(m, kmax + 1):
            c = binom_general(e, k) * Fraction(sign) ** k * binom_general(k, m)
            if k > m:
                c *= a ** (k - m)
            if c != 0:
                up[k] = c
                any_nz = True
        out[m] = up if any_nz else []
    return out


def _guni_g_shift_pow(a, e, gcap):
    """(g + a)^e as a pure-g series (u-free); a must be nonzero for e < 0."""
    a = Fraction(a)
    if a == 0 and e < 0:
        raise IntegrandPoleError("normal-bundle factor has zero constant term")
    out = []
    for m in range(gcap + 1):
        c = binom_general(e, m) * (a ** (e - m) if e - m >= 0 else Fraction(1) / a ** (m - e))
        out.append([c] if c != 0 else [])
    return out


# -- multivariate g-series (dict exponent tuple -> u-polynomial) -----------

def _ms_one(nvars):
    return {(0,) * nvars: [Fraction(1)]}


def _ms_mul_cells(ms, cells, total, w):
    """Multiply by a factor given as a list of (exponent tuple, u-poly)."""
    out = {}
    for e1, p1 in ms.items():
        s1 = sum(e1)
        for e2, p2 in cells:
            if s1 + sum(e2) > total:
                continue
            e = tuple(x + y for x, y in zip(e1, e2))
            prod = _up_mul(p1, p2, w)
            if not prod:
                continue
            if e in out:
                out[e] = _up_add(out[e], prod)
            else:
                out[e] = prod
    return {e: p for e, p in out.items() if any(c != 0 for c in p)}


def _cells_from_guni(i, nvars, guni):
    cells = []
    for m, p in enumerate(guni):
        if p and any(c != 0 for c in p):
            e = [0] * nvars
            e[i] = m
            cells.append((tuple(e), p))
    return cells


def _cells_pair_square(i, j, nvars, a):
    """(g_i - g_j + a)^2."""
    a = Fraction(a)
    raw = {(2, 0): Fraction(1), (1, 1): Fraction(-2), (0, 2): Fraction(1),
           (1, 0): 2 * a, (0, 1): -2 * a, (0, 0): a * a}
    cells = []
    for (mi, mj), c in raw.items():
        if c == 0:
            continue
        e = [0] * nvars
        e[i] = mi
        e[j] = mj
        cells.append((tuple(e), [c]))
    return cells


def _cells_pair_mixed_inv(i, j, nvars, a, gcap_i, gcap_j, total, w):
    """(1 + u*(g_i - g_j + a))^(-1) = sum_k (-u)^k (g_i - g_j + a)^k."""
    a = Fraction(a)
    cells = {}
    import math

    for k in range(w):
        sgn = Fraction((-1) ** k)
        for alpha in range(min(k, gcap_i) + 1):
            for beta in range(min(k - alpha, gcap_j) + 1):
                if alpha + beta > total:
                    continue
                rest = k - alpha - beta
                c = sgn * Fraction(math.factorial(k),
                                   math.factorial(alpha) * math.factorial(beta)
                                   * math.factorial(rest))
                c *= Fraction(-1) ** beta
                if rest:
                    c *= a ** rest
                if c == 0:
                    continue
                key = (alpha, beta)
                p = cells.get(key)
                if p is None:
                    p = [Fraction(0)] * w
                    cells[key] = p
                p[k] += c
    out = []
    for (alpha, beta), p in cells.items():
        if any(c != 0 for c in p):
            e = [0] * nvars
            e[i] = alpha
            e[j] = beta
            out.append((tuple(e), p))
    return out


def _compositions(n, k):
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def _extract_qcoeffs(phis, psi, ushift, nvars, order, w, blocks):
    """For each q-order m, sum over compositions of
    [g^comp] Phi_1^{c_1} ... Phi_k^{c_k} * Psi, with the per-order sign
    (-1)^(m(k-1) + C(k,2)), as a u-polynomial paired with its u-valuation
    ushift - blocks*m (``blocks`` is the total number of weights, i.e. the
    u-pole order per box unit)."""
    k = nvars
    flip = (-1) ** ((k * (k - 1)) // 2)
    pow_tables = []
    for phi in phis:
        rows = [_guni_one(order)]
        for _ in range(order):
            rows.append(_guni_mul(rows[-1], phi, w))
        pow_tables.append(rows)
    psi_items = list(psi.items())
    out = []
    for m in range(order + 1):
        total = []
        sign = flip * (-1) ** (m * (k - 1))
        for comp in _compositions(m, k):
            for e, pc in psi_items:
                if any(ei > ci for ei, ci in zip(e, comp)):
                    continue
                prod = pc
                for i in range(k):
                    cell = pow_tables[i][comp[i]][comp[i] - e[i]]
                    if not cell:
                        prod = []
                        break
                    prod = _up_mul(prod, cell, w)
                    if not prod:
                        break
                if prod:
                    total = _up_add(total, prod)
        if sign < 0:
            total = _up_scale(total, Fraction(-1))
        out.append((ushift - blocks * m, total))
    return out


def _locus_qcoeffs(point_c, curve_c, order, extra_u):
    """Fixed-locus resummation over the Quot scheme of the line with one
    block of 'point' weight directions (carrying the boxes g_j) and one of
    'curve' directions.  Returns, per q-order m, the u-expansion of the
    contribution sum as (valuation, coefficient list); the underlying
    integral is the coefficient of u^0."""
    k = len(point_c)
    N = k + len(curve_c)
    if k == 0:
        return [(0, [Fraction(1)] if m == 0 else []) for m in range(order + 1)]
    w = N * order + extra_u + 1
    gcap = order
    phis = []
    for j in range(k):
        # Phi_j scaled: prod over all weights of (1 - u(g_j + c_a - c_j)),
        # times (g_j + c_a - c_j)^(-1) for a != j (u-shift -1 each, for a
        # total of -(N-1) per box unit, accounted in the extraction)
        phi = _guni_one(gcap)
        for ca in list(point_c) + list(curve_c):
            a = ca - point_c[j]
            phi = _guni_mul(phi, _guni_linear_u(a, -1, 1, gcap, w), w)
            if a != 0:
                phi = _guni_mul(phi, _guni_g_shift_pow(a, -1, gcap), w)
        phis.append(phi)
    psi = _ms_one(k)
    ushift = 0
    scalar = [Fraction(1)]
    for j in range(k):
        uni = _guni_one(gcap)
        for jp in range(k):
            a = point_c[jp] - point_c[j]
            uni = _guni_mul(uni, _guni_linear_u(a, 1, 1, gcap, w), w)
            if jp != j:
                uni = _guni_mul(uni, _guni_g_shift_pow(a, -1, gcap), w)
                ushift -= 1
        for ci in curve_c:
            a = ci - point_c[j]
            uni = _guni_mul(uni, _guni_linear_u(a, 1, 1, gcap, w), w)
            uni = _guni_mul(uni, _guni_g_shift_pow(a, -1, gcap), w)
            ushift -= 1
            ushift += 1  # the scalar (w_i - w_j) = u (c_i - c_j)
            scalar = _up_mul(scalar, _up_scale(_up_linear_pow(a, -1, w), a), w)
        psi = _ms_mul_cells(psi, _cells_from_guni(j, k, uni), order, w)
    for jp, j in itertools.combinations(range(k), 2):
        a = point_c[jp] - point_c[j]
        psi = _ms_mul_cells(psi, _cells_pair_square(j, jp, k, a), order, w)
        ushift += 2
        psi = _ms_mul_cells(
            psi, _cells_pair_mixed_inv(j, jp, k, a, gcap, gcap, order, w), order, w
        )
        psi = _ms_mul_cells(
            psi, _cells_pair_mixed_inv(jp, j, k, -a, gcap, gcap, order, w), order, w
        )
    if scalar != [Fraction(1)]:
        psi = {e: _up_mul(p, scalar, w) for e, p in psi.items()}
    return _extract_qcoeffs(phis, psi, ushift, k, order, w, blocks=N), w


def _u_limit(pairs, window, order, var="q") -> Series:
    """Evaluate the u -> 0 limit of per-order u-Laurent data, asserting that
    every coefficient below u^0 cancels.  Coefficient lists are exact
    through u-order window-1 relative to their valuation; entries beyond the
    stored length are exact zeros of the truncated product."""
    out = []
    for m in range(order + 1):
        val, coeffs = pairs[m]
        if -val >= window:
            raise SeriesPrecisionError("u-window too small for the limit")
        for t, c in enumerate(coeffs):
            if val + t < 0 and c != 0:
                raise AssertionError(
                    f"fixed-locus total has a u-pole at q-order {m}: "
                    "contribution sum failed to cancel"
                )
        idx = -val
        limit = coeffs[idx] if 0 <= idx < len(coeffs) else Fraction(0)
        out.append(limit)
    return Series(var, 0, out, order + 1)


def oracle_euler(sections: int, order: int, weights=None) -> Series:
    """sum_n (-q)^n of the total-Chern-class integral whose value is the
    reciprocal of the dimension-zero virtual Euler base series."""
    N = sections
    wv = _resolve_weights(N, weights)
    pairs, window = _locus_qcoeffs(list(wv.values), [], order, 0)
    return _u_limit(pairs, window, order).scale_var(-1)


def oracle_segre(sections: int, degrees, order: int, weights=None) -> Series:
    """sum_n q^n of the Segre integral of the tautological bundle of
    O(d_1) + ... + O(d_r) over the Quot scheme of the line with N sections.

    For a single section the fixed loci fill the whole space and the series
    is plain coefficient extraction on projective spaces, with no weights."""
    degrees = list(degrees)
    r = len(degrees)
    N = sections
    if N == 1:
        out = []
        for n in range(order + 1):
            e = sum(degrees) - r * n + r
            out.append(Fraction((-1) ** n) * binom_general(e, n))
        return Series("q", 0, out, order + 1)
    wv = _resolve_weights(N, weights)
    c = list(wv.values)
    dsum = sum(d + 1 for d in degrees)
    w = N * order + 1
    gcap = order
    phis = []
    for i in range(N):
        # Segre factor (1 - u(g_i - w_i))^(-r) and normal-bundle denominators
        phi = _guni_linear_u(-c[i], -1, -r, gcap, w)
        for j in range(N):
            if j != i:
                phi = _guni_mul(phi, _guni_g_shift_pow(c[j] - c[i], -1, gcap), w)
        phis.append(phi)
    psi = _ms_one(N)
    ushift = 0
    scalar = [Fraction(1)]
    for i in range(N):
        uni = _guni_linear_u(-c[i], -1, dsum, gcap, w)
        for j in range(N):
            if j != i:
                uni = _guni_mul(uni, _guni_g_shift_pow(c[j] - c[i], -1, gcap), w)
                ushift -= 1
        psi = _ms_mul_cells(psi, _cells_from_guni(i, N, uni), order, w)
        scalar = _up_mul(scalar, _up_linear_pow(c[i], -dsum, w), w)
    for i, j in itertools.combinations(range(N), 2):
        psi = _ms_mul_cells(psi, _cells_pair_square(i, j, N, c[j] - c[i]), order, w)
        ushift += 2
    if scalar != [Fraction(1)]:
        psi = {e: _up_mul(p, scalar, w) for e, p in psi.items()}
    pairs = _extract_qcoeffs(phis, psi, ushift, N, order, w, blocks=N)
    return _u_limit(pairs, w, order)


def oracle_general_type(
    sections: int, ell: int, genus: int, chi: int, order: int, weights=None
) -> Series:
    """Fixed-locus evaluation of the general-type series: quotients with
    first Chern class ell * K on a minimal surface with a smooth canonical
    curve of genus g.  Sums, over the C(N, N-ell) placements of the weight
    directions onto curve and point components, the (1-g)-th powers of the
    per-placement resummations; only the total has a u -> 0 limit, so all
    series arithmetic here keeps truncated u-expansions as coefficients."""
    N = sections
    if not 0 <= ell <= N:
        raise ValueError("ell must lie between 0 and the number of sections")
    k = N - ell
    wv = _resolve_weights(N, weights)
    c = list(wv.values)
    shift = ell * (1 - genus)
    inner = order - shift
    extra_u = 2 * N * (inner + 1) + 4 * ell * max(k, 1) * (abs(genus - 1) + 1) + 8
    for _ in range(6):
        try:
            return _general_type_attempt(
                N, ell, genus, chi, order, k, c, shift, inner, extra_u
            )
        except SeriesPrecisionError:
            extra_u *= 2
    raise SeriesPrecisionError("could not reach a stable u-window")


def _general_type_attempt(N, ell, genus, chi, order, k, c, shift, inner, extra_u):
    total = None
    sub = (-1) ** (ell + 1)
    for point_idx in itertools.combinations(range(N), k):
        point_c = [c[i] for i in point_idx]
        curve_c = [c[i] for i in range(N) if i not in point_idx]
        pairs = _locus_qcoeffs(point_c, curve_c, inner, extra_u)
        coeffs = []
        for m, (val, ups) in enumerate(pairs):
            # substitute q -> (-1)^(ell+1) q while packaging
            cm = Series("u", val, ups, val + max(len(ups), 1))
            if not ups:
                cm = Series("u", val, [], val + N * inner + extra_u + 1)
            else:
                cm = Series("u", val, ups, val + len(ups))
            coeffs.append(cm.scale(Fraction(sub ** m)))
        a_tilde = Series("q", 0, coeffs, inner + 1)
        pref = Series.one("u", N * inner + extra_u + 1)
        for wi in curve_c:
            for wj in point_c:
                # (1 + (w_i - w_j) u) / ((w_i - w_j) u)
                d = wi - wj
                pref = pref * Series("u", -1, [Fraction(1, 1) / d, Fraction(1)],
                                     N * inner + extra_u - 1)
        a_tilde = Series(
            "q", 0, [pref * cc for cc in a_tilde.coeffs], a_tilde.prec
        ) if ell > 0 else a_tilde
        term = a_tilde ** (1 - genus)
        total = term if total is None else total + term
    out_coeffs = []
    for n in range(inner + 1):
        cn = total.coeff(n)
        if isinstance(cn, (int, Fraction)):
            out_coeffs.append(Fraction(cn))
            continue
        for t in range(cn.val, min(0, cn.prec)):
            if cn.coeff(t) != 0:
                raise AssertionError(
                    f"placement total has a u-pole at q-order {n}"
                )
        if cn.prec <= 0:
            raise SeriesPrecisionError("u-window exhausted before the limit")
        out_coeffs.append(Fraction(cn.coeff(0)) if cn.prec > 0 else Fraction(0))
    out = Series("q", 0, out_coeffs, inner + 1)
    out = out.shift(shift).scale(Fraction((-1) ** (ell * chi)))
    return out.truncate(order)
