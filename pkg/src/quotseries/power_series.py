"""Truncated power/Laurent series over a pluggable exact coefficient ring.

A `Series` carries an explicit precision: coefficients are known exactly for
every exponent below ``prec`` and asking for anything at or above ``prec``
raises instead of silently returning zero.  Coefficients may be Fractions,
`MPoly` or `CycloNum` values; anything that mixes arithmetically with int and
Fraction works.

The module also houses compositional inversion (Newton iteration, with
classical term-by-term inversion kept as an independent check path), the
coefficient-extraction form of the Lagrange-Buermann identity, and the
multivariate extraction used to resum torus fixed-point contributions.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    ConstantTermError,
    IntegrandPoleError,
    LeadingCoefficientError,
    SeriesPrecisionError,
    ValuationError,
)
from .exact_algebra import binom_general


def _inv_coeff(c):
    """Multiplicative inverse of a coefficient-ring element."""
    if isinstance(c, (int, Fraction)):
        if c == 0:
            raise LeadingCoefficientError("zero coefficient is not invertible")
        return Fraction(1) / Fraction(c)
    return c.inverse()


def _cdiv(c, k: int):
    """c / k for an integer k, staying inside the coefficient ring."""
    return c * Fraction(1, k)


class Series:
    """Truncated series sum_{n >= val} coeffs[n - val] * var^n + O(var^prec).

    ``prec`` is the first unknown exponent.  The representation is
    normalized: leading zero coefficients are stripped (raising ``val``), so
    either ``coeffs`` is empty (the series is zero to its precision) or
    ``coeffs[0]`` is nonzero.
    """

    __slots__ = ("var", "val", "coeffs", "prec")

    def __init__(self, var: str, val: int, coeffs, prec: int):
        coeffs = list(coeffs)
        if val + len(coeffs) > prec:
            coeffs = coeffs[: prec - val]
        while coeffs and _is_zero(coeffs[0]):
            coeffs.pop(0)
            val += 1
        while coeffs and _is_zero(coeffs[-1]):
            coeffs.pop()
        if not coeffs:
            val = prec
        self.var = var
        self.val = val
        self.coeffs = tuple(coeffs)
        self.prec = prec

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, var: str, prec: int) -> "Series":
        return cls(var, prec, [], prec)

    @classmethod
    def one(cls, var: str, prec: int) -> "Series":
        return cls(var, 0, [Fraction(1)], prec)

    @classmethod
    def from_coeffs(cls, var: str, coeffs, prec: int | None = None, val: int = 0):
        coeffs = list(coeffs)
        if prec is None:
            prec = val + len(coeffs)
        return cls(var, val, coeffs, prec)

    @classmethod
    def x(cls, var: str, prec: int) -> "Series":
        return cls(var, 1, [Fraction(1)], prec)

    @classmethod
    def from_poly_dict(cls, var: str, d: dict, prec: int) -> "Series":
        if not d:
            return cls.zero(var, prec)
        lo = min(d)
        hi = max(d)
        coeffs = [d.get(i, 0) for i in range(lo, hi + 1)]
        return cls(var, lo, coeffs, prec)

    # -- basic access ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, n: int):
        if n >= self.prec:
            raise SeriesPrecisionError(
                f"coefficient of {self.var}^{n} requested, precision is O({self.var}^{self.prec})"
            )
        if n < self.val or n >= self.val + len(self.coeffs):
            return Fraction(0)
        return self.coeffs[n - self.val]

    def coeff_list(self, lo: int, hi: int):
        return [self.coeff(n) for n in range(lo, hi + 1)]

    def constant_term(self):
        return self.coeff(0)

    def _check_var(self, other: "Series"):
        if self.var != other.var:
            raise ValueError(f"variable mismatch: {self.var} vs {other.var}")

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)) or not isinstance(other, Series):
            other = Series(self.var, 0, [other], self.prec)
        self._check_var(other)
        prec = min(self.prec, other.prec)
        if self.is_zero() and other.is_zero():
            return Series.zero(self.var, prec)
        lo = min(self.val, other.val)
        hi = prec
        out = []
        for n in range(lo, hi):
            a = self.coeff(n) if n < self.prec else 0
            b = other.coeff(n) if n < other.prec else 0
            out.append(a + b)
        return Series(self.var, lo, out, prec)

    __radd__ = __add__

    def __neg__(self):
        return Series(self.var, self.val, [-c for c in self.coeffs], self.prec)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)) or not isinstance(other, Series):
            other = Series(self.var, 0, [other], self.prec)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Series):
            return self.scale(other)
        self._check_var(other)
        prec = min(self.prec + other.val, other.prec + self.val)
        if self.is_zero() or other.is_zero():
            return Series.zero(self.var, prec)
        val = self.val + other.val
        n_out = min(prec - val, len(self.coeffs) + len(other.coeffs) - 1)
        out = [Fraction(0)] * max(n_out, 0)
        for i, a in enumerate(self.coeffs):
            if _is_zero(a):
                continue
            jmax = min(len(other.coeffs), n_out - i)
            for j in range(jmax):
                b = other.coeffs[j]
                if not _is_zero(b):
                    out[i + j] = out[i + j] + a * b
        return Series(self.var, val, out, prec)

    __rmul__ = __mul__

    def scale(self, c):
        if _is_zero(c):
            return Series.zero(self.var, self.prec)
        return Series(self.var, self.val, [a * c for a in self.coeffs], self.prec)

    def __truediv__(self, other):
        if not isinstance(other, Series):
            return self.scale(_inv_coeff(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse().scale(other)

    def inverse(self) -> "Series":
        """Inverse of a series with invertible leading coefficient."""
        if self.is_zero():
            raise LeadingCoefficientError("cannot invert a series that is zero to precision")
        c0inv = _inv_coeff(self.coeffs[0])
        rel = self.prec - self.val  # relative precision of the unit part
        out = [c0inv] + [Fraction(0)] * (rel - 1)
        for k in range(1, rel):
            acc = 0
            for i in range(1, min(k, len(self.coeffs) - 1) + 1):
                acc = acc + self.coeffs[i] * out[k - i]
            out[k] = -(acc * c0inv) if not _is_zero(acc) else Fraction(0)
        return Series(self.var, -self.val, out, self.prec - 2 * self.val)

    def __pow__(self, e):
        if isinstance(e, Fraction) and e.denominator != 1:
            return self.pow_frac(e)
        e = int(e)
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            return Series.one(self.var, self.prec - self.val)
        result = None
        base = self
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def truncate(self, order: int) -> "Series":
        """Drop knowledge above the given order (prec becomes order+1)."""
        prec = min(self.prec, order + 1)
        return Series(self.var, self.val, list(self.coeffs), prec)

    def shift(self, k: int) -> "Series":
        """Multiply by var^k."""
        return Series(self.var, self.val + k, list(self.coeffs), self.prec + k)

    def scale_var(self, c) -> "Series":
        """Substitute var -> c*var for a scalar c (commonly -1)."""
        out = [a * (Fraction(c) ** (self.val + i)) for i, a in enumerate(self.coeffs)]
        return Series(self.var, self.val, out, self.prec)

    def rename(self, var: str) -> "Series":
        return Series(var, self.val, list(self.coeffs), self.prec)

    def deriv(self) -> "Series":
        out = [self.coeffs[i] * (self.val + i) for i in range(len(self.coeffs))]
        return Series(self.var, self.val - 1, out, self.prec - 1)

    # -- transcendental operations ----------------------------------------

    def log(self) -> "Series":
        """log of a series with constant term 1."""
        if self.val != 0 or not _is_one(self.coeffs[0]):
            raise ConstantTermError("log needs constant term 1")
        u = self - 1
        if u.is_zero():
            return Series.zero(self.var, u.prec)
        out = Series.zero(self.var, self.prec)
        power = Series.one(self.var, self.prec)
        kmax = (self.prec - 1) // u.val if u.val > 0 else 0
        for k in range(1, kmax + 1):
            power = power * u
            term = power.scale(Fraction((-1) ** (k + 1), k))
            out = out + term
        return Series(self.var, out.val, list(out.coeffs), self.prec)

    def exp(self) -> "Series":
        """exp of a series with constant term 0."""
        if not self.is_zero() and self.val <= 0:
            raise ConstantTermError("exp needs constant term 0")
        out = Series.one(self.var, self.prec)
        if self.is_zero():
            return out
        power = Series.one(self.var, self.prec)
        fact = 1
        kmax = (self.prec - 1) // self.val
        for k in range(1, kmax + 1):
            power = power * self
            fact *= k
            out = out + power.scale(Fraction(1, fact))
        return Series(self.var, out.val, list(out.coeffs), self.prec)

    def pow_frac(self, e: Fraction) -> "Series":
        """(1 + u)^e for rational e; needs constant term 1."""
        if self.val != 0 or not _is_one(self.coeffs[0]):
            raise ConstantTermError("fractional powers need constant term 1")
        u = self - 1
        out = Series.one(self.var, self.prec)
        if u.is_zero():
            return out
        power = Series.one(self.var, self.prec)
        kmax = (self.prec - 1) // u.val
        for k in range(1, kmax + 1):
            power = power * u
            out = out + power.scale(binom_general(e, k))
        return Series(self.var, out.val, list(out.coeffs), self.prec)

    # -- composition and reversion ----------------------------------------

    def compose(self, g: "Series") -> "Series":
        """Substitute g (valuation >= 1) for the variable of self."""
        if not g.is_zero() and g.val < 1:
            raise ValuationError("composition needs a substituted series of valuation >= 1")
        gval = g.val if not g.is_zero() else 1
        if self.val < 0:
            unit = Series(self.var, 0, list(self.coeffs), self.prec - self.val)
            return unit.compose(g) * (g ** self.val)
        target = min(self.prec * gval, g.prec)
        acc = Series.zero(g.var, target)
        for i in range(self.prec - 1, self.val - 1, -1):
            acc = acc * g
            c = self.coeff(i)
            if not _is_zero(c):
                acc = acc + Series(g.var, 0, [c], target)
            acc = acc.truncate(target - 1)
        if self.val > 0:
            acc = (acc * g ** self.val).truncate(target - 1)
        return acc

    def reversion(self, out_var: str | None = None) -> "Series":
        """Compositional inverse g with self(g) = identity, via Newton steps.

        Requires valuation exactly 1 and invertible linear coefficient.  The
        result is validated by re-substitution before being returned.
        """
        if self.is_zero() or self.val != 1:
            raise ValuationError("reversion needs valuation exactly 1")
        out_var = out_var or self.var
        target = self.prec
        c1inv = _inv_coeff(self.coeffs[0])
        g = Series(out_var, 1, [c1inv], 2)
        f = self.rename(out_var)
        fp = f.deriv()
        while g.prec < target:
            newprec = min(max(2 * (g.prec - 1), 2) + 1, target)
            g = Series(out_var, g.val, list(g.coeffs), newprec)
            q = Series.x(out_var, newprec)
            err = f.compose(g) - q
            if err.is_zero():
                g = Series(out_var, g.val, list(g.coeffs), newprec)
                continue
            g = (g - err / fp.compose(g)).truncate(newprec - 1)
        ident = Series.x(out_var, target)
        resid = f.compose(g) - ident
        if not resid.is_zero():
            raise ValuationError("reversion failed to validate by re-substitution")
        return g

    # -- comparison and display --------------------------------------------

    def same_through(self, other: "Series", order: int) -> bool:
        """Exact agreement of every coefficient up to the given order."""
        for n in range(min(self.val, other.val), order + 1):
            if self.coeff(n) != other.coeff(n):
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return (
            self.var == other.var
            and self.val == other.val
            and self.prec == other.prec
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.var, self.val, self.coeffs, self.prec))

    def __str__(self):
        parts = []
        for i, c in enumerate(self.coeffs):
            n = self.val + i
            if _is_zero(c):
                continue
            if n == 0:
                mono = ""
            elif n == 1:
                mono = self.var
            else:
                mono = f"{self.var}^{n}"
            cs = str(c)
            if isinstance(c, (int, Fraction)):
                neg = c < 0
                mag = str(abs(c))
            else:
                neg = False
                mag = f"({cs})"
            body = mono if (mono and mag == "1") else (f"{mag}*{mono}" if mono else mag)
            if not parts:
                parts.append(f"-{body}" if neg else body)
            else:
                parts.append(f"- {body}" if neg else f"+ {body}")
        head = " ".join(parts) if parts else "0"
        return f"{head} + O({self.var}^{self.prec})"

    def __repr__(self):
        return f"Series({self})"


def _is_zero(c) -> bool:
    if isinstance(c, (int, Fraction)):
        return c == 0
    if hasattr(c, "is_zero"):
        return c.is_zero()
    return c == 0


def _is_one(c) -> bool:
    return c == 1


def binomial_series(var: str, c, e, order: int) -> Series:
    """(1 + c*var)^e through the given order, for integer or Fraction e."""
    coeffs = [binom_general(e, k) * Fraction(c) ** k for k in range(order + 1)]
    return Series(var, 0, coeffs, order + 1)


def geometric_series(var: str, c, order: int) -> Series:
    """1/(1 - c*var) through the given order."""
    coeffs = [Fraction(c) ** k for k in range(order + 1)]
    return Series(var, 0, coeffs, order + 1)


def from_ratfunc(rf, var: str, order: int) -> Series:
    """Expand a RatFunc (denominator with nonzero constant term)."""
    return Series(var, 0, rf.series_coeffs(order), order + 1)


def arith(a: Series, b: Series, kind: str) -> Series:
    """Dispatch basic arithmetic by name: add, sub, mul, div."""
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    raise ValueError(f"unknown arithmetic kind {kind!r}")


def log_exp_pow(a: Series, kind: str, exponent=None) -> Series:
    """Dispatch log/exp/pow by name; pow accepts int or Fraction exponents."""
    if kind == "log":
        return a.log()
    if kind == "exp":
        return a.exp()
    if kind == "pow":
        if exponent is None:
            raise ValueError("pow needs an exponent")
        return a ** (Fraction(exponent) if not isinstance(exponent, int) else exponent)
    raise ValueError(f"unknown kind {kind!r}")


def lagrange_burmann(f: Series, g: Series, order: int) -> Series:
    """sum_{n<=order} ([t^n] f^n g) q^n by direct coefficient extraction.

    ``f`` must have invertible constant term.  The closed form
    (g/f) dt/dq under q = t/f(t) is a separate check path, see
    `lagrange_burmann_closed`.
    """
    if f.val != 0:
        raise LeadingCoefficientError("f must have invertible constant term")
    out = []
    p = g.truncate(order)
    for n in range(order + 1):
        out.append(p.coeff(n) if n < p.prec else 0)
        if n < order:
            p = (p * f).truncate(order)
    return Series("q", 0, out, order + 1)


def lagrange_burmann_closed(f: Series, g: Series, order: int) -> Series:
    """(g/f)(t(q)) * dt/dq for the change of variables q = t/f(t)."""
    cov = (Series.x(f.var, f.prec) / f).truncate(order + 1)
    t_of_q = cov.reversion(out_var="q").truncate(order + 1)
    h = (g / f).truncate(order + 1)
    return (h.compose(t_of_q) * t_of_q.deriv()).truncate(order)


def reversion_lagrange(f: Series, out_var: str | None = None) -> Series:
    """Classical term-by-term inversion; independent check for `reversion`.

    g_n = (1/n) [t^(n-1)] (t/f(t))^n for f of valuation 1.
    """
    if f.is_zero() or f.val != 1:
        raise ValuationError("reversion needs valuation exactly 1")
    out_var = out_var or f.var
    base = Series.x(f.var, f.prec) / f  # t/f(t), constant term invertible
    order = f.prec - 1
    coeffs = [Fraction(0)]
    p = Series.one(f.var, order + 1)
    for n in range(1, order + 1):
        p = (p * base).truncate(order)
        coeffs.append(_cdiv(p.coeff(n - 1), n))
    return Series(out_var, 0, coeffs, order + 1)


class MultiSeries:
    """Multivariate series truncated to per-variable caps and an optional
    total-degree cap.  Exponents are nonnegative.

    Used for the fixed-locus integrands: those are products of univariate
    linear-form powers and of pair factors (c + h_i - h_j)^e.
    """

    __slots__ = ("nvars", "caps", "total", "terms")

    def __init__(self, nvars: int, caps, total: int | None = None, terms=None):
        self.nvars = nvars
        self.caps = tuple(caps)
        if len(self.caps) != nvars:
            raise ValueError("cap arity mismatch")
        self.total = total
        clean = {}
        if terms:
            for e, c in terms.items():
                if self._inside(e) and not _is_zero(c):
                    clean[e] = c
        self.terms = clean

    def _inside(self, e) -> bool:
        if any(x < 0 or x > cap for x, cap in zip(e, self.caps)):
            return False
        return self.total is None or sum(e) <= self.total

    @classmethod
    def one(cls, nvars: int, caps, total=None) -> "MultiSeries":
        return cls(nvars, caps, total, {(0,) * nvars: Fraction(1)})

    def coeff(self, e):
        return self.terms.get(tuple(e), Fraction(0))

    def __add__(self, other: "MultiSeries") -> "MultiSeries":
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, Fraction(0)) + c
            if _is_zero(s):
                out.pop(e, None)
            else:
                out[e] = s
        return MultiSeries(self.nvars, self.caps, self.total, out)

    def scale(self, c) -> "MultiSeries":
        if _is_zero(c):
            return MultiSeries(self.nvars, self.caps, self.total, {})
        return MultiSeries(
            self.nvars, self.caps, self.total,
            {e: v * c for e, v in self.terms.items()},
        )

    def __mul__(self, other: "MultiSeries") -> "MultiSeries":
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if not self._inside(e):
                    continue
                s = out.get(e, Fraction(0)) + c1 * c2
                if _is_zero(s):
                    out.pop(e, None)
                else:
                    out[e] = s
        return MultiSeries(self.nvars, self.caps, self.total, out)

    def mul_linear_power(self, i: int, c0, c1, e: int) -> "MultiSeries":
        """Multiply by (c0 + c1*h_i)^e; negative e needs c0 != 0."""
        return self * linear_power(self.nvars, self.caps, self.total, i, c0, c1, e)

    def mul_pair_power(self, i: int, j: int, c, e: int) -> "MultiSeries":
        """Multiply by (c + h_i - h_j)^e; negative e needs c != 0."""
        return self * pair_power(self.nvars, self.caps, self.total, i, j, c, e)


def linear_power(nvars, caps, total, i, c0, c1, e) -> MultiSeries:
    """(c0 + c1*h_i)^e as a MultiSeries."""
    c0 = Fraction(c0)
    c1 = Fraction(c1)
    terms = {}
    zero = (0,) * nvars
    if c0 == 0:
        if e < 0:
            raise IntegrandPoleError("factor has zero constant term")
        if e * 1 > caps[i] and e != 0:
            return MultiSeries(nvars, caps, total, {})
        key = list(zero)
        key[i] = e
        terms[tuple(key)] = c1 ** e
        return MultiSeries(nvars, caps, total, terms)
    kmax = caps[i] if total is None else min(caps[i], total)
    if e >= 0:
        kmax = min(kmax, e)
    scale0 = c0 ** e if e >= 0 else Fraction(1) / c0 ** (-e)
    for k in range(kmax + 1):
        coeff = binom_general(e, k) * scale0 * (c1 / c0) ** k
        if coeff != 0:
            key = list(zero)
            key[i] = k
            terms[tuple(key)] = coeff
    return MultiSeries(nvars, caps, total, terms)


def pair_power(nvars, caps, total, i, j, c, e) -> MultiSeries:
    """(c + h_i - h_j)^e as a MultiSeries."""
    c = Fraction(c)
    terms = {}
    zero = (0,) * nvars
    kcap = caps[i] + caps[j] if total is None else min(caps[i] + caps[j], total)
    if c == 0:
        if e < 0:
            raise IntegrandPoleError("pair factor has zero constant term")
        kvals = [e] if e <= kcap else []
        prefactors = {e: Fraction(1)} if kvals else {}
    else:
        if e >= 0:
            kvals = list(range(min(e, kcap) + 1))
        else:
            kvals = list(range(kcap + 1))
        scale0 = c ** e if e >= 0 else Fraction(1) / c ** (-e)
        prefactors = {k: binom_general(e, k) * scale0 * Fraction(1, 1) / c ** k for k in kvals}
    for k in kvals:
        pref = prefactors[k]
        if pref == 0:
            continue
        for a in range(k + 1):
            b = k - a
            if a > caps[i] or b > caps[j]:
                continue
            coeff = pref * binom_general(k, a) * Fraction(-1) ** b
            if coeff == 0:
                continue
            key = list(zero)
            key[i] += a
            key[j] += b
            key = tuple(key)
            s = terms.get(key, Fraction(0)) + coeff
            if s == 0:
                terms.pop(key, None)
            else:
                terms[key] = s
    return MultiSeries(nvars, caps, total, terms)


def compositions(n: int, k: int):
    """All k-tuples of nonnegative integers summing to n."""
    if k == 0:
        if n == 0:
            yield ()
        return
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in compositions(n - first, k - 1):
            yield (first,) + rest


def mv_extract(phis, psi: MultiSeries, order: int, sign_rule=None) -> Series:
    """sum_n q^n sum_{n_1+...+n_k=n} sign * [h^(n_1..n_k)] Phi_1^{n_1}...Phi_k^{n_k} Psi.

    ``phis`` is a list of univariate series (one per variable of ``psi``),
    each with invertible constant term.  ``sign_rule(n, comp)`` may return a
    per-term sign; omitted means +1.
    """
    k = len(phis)
    if psi.nvars != k:
        raise ValueError("Psi arity does not match the number of Phi factors")
    for phi in phis:
        if phi.val != 0:
            raise IntegrandPoleError("integrand factor has zero constant term")
    # pow_tables[i][m] = coefficients of Phi_i^m through the requested order
    pow_tables = []
    for phi in phis:
        phi = phi.truncate(order)
        rows = [[Fraction(1)] + [Fraction(0)] * order]
        p = Series.one(phi.var, order + 1)
        for _ in range(order):
            p = (p * phi).truncate(order)
            rows.append([p.coeff(t) if t < p.prec else Fraction(0) for t in range(order + 1)])
        pow_tables.append(rows)
    psi_items = list(psi.terms.items())
    out = []
    for n in range(order + 1):
        total = Fraction(0)
        for comp in compositions(n, k):
            acc = Fraction(0)
            for e, c in psi_items:
                if any(ei > ci for ei, ci in zip(e, comp)):
                    continue
                prod = c
                for i in range(k):
                    prod *= pow_tables[i][comp[i]][comp[i] - e[i]]
                    if prod == 0:
                        break
                acc += prod
            if sign_rule is not None:
                acc *= sign_rule(n, comp)
            total += acc
        out.append(total)
    return Series("q", 0, out, order + 1)


def mv_lagrange_burmann_check(
    phi1: Series, phi2: Series, psi: MultiSeries, order: int,
    psi_closed: MultiSeries | None = None,
) -> bool:
    """Verify the two-variable Lagrange-Buermann identity through total order.

    Left side: direct double extraction as in `mv_extract`, kept bivariate.
    Right side: Psi/K(h_1, h_2) with K = prod (1 - h_i Phi_i'/Phi_i),
    re-expanded in (t_1, t_2) via t_i = h_i/Phi_i(h_i).  ``psi_closed``
    substitutes a different Psi on the closed side (for deliberate-mismatch
    tests); the identity itself holds for any shared Psi.
    """
    k = 2
    phis = [phi1, phi2]
    # left side: coefficients indexed by (n1, n2)
    pow_tables = []
    for phi in phis:
        rows = [[Fraction(1)] + [Fraction(0)] * order]
        p = Series.one(phi.var, order + 1)
        for _ in range(order):
            p = (p * phi).truncate(order)
            rows.append([p.coeff(t) if t < p.prec else Fraction(0) for t in range(order + 1)])
        pow_tables.append(rows)
    left = {}
    for n1 in range(order + 1):
        for n2 in range(order + 1 - n1):
            acc = Fraction(0)
            for e, c in psi.terms.items():
                if e[0] > n1 or e[1] > n2:
                    continue
                acc += c * pow_tables[0][n1][n1 - e[0]] * pow_tables[1][n2][n2 - e[1]]
            if acc != 0:
                left[(n1, n2)] = acc
    # right side: Psi / K as a bivariate series in h, then h_i -> H_i(t_i)
    if psi_closed is None:
        psi_closed = psi
    caps = psi_closed.caps
    total = psi_closed.total
    kfactor = MultiSeries.one(k, caps, total)
    h_of_t = []
    for i, phi in enumerate(phis):
        hi = Series.x(phi.var, phi.prec)
        ratio = (hi * phi.deriv() / phi).truncate(order + 1)  # h Phi'/Phi
        factor_uni = (1 - ratio).truncate(min(caps[i], order))
        terms = {}
        for t in range(min(caps[i], order) + 1):
            c = factor_uni.coeff(t) if t < factor_uni.prec else Fraction(0)
            if c != 0:
                key = [0] * k
                key[i] = t
                terms[tuple(key)] = c
        kfactor = kfactor * MultiSeries(k, caps, total, terms)
        cov = (hi / phi).truncate(order + 1)
        h_of_t.append(cov.reversion(out_var="t").truncate(order))
    # invert kfactor within the truncation: constant term is nonzero
    ratio_ms = _ms_divide(psi_closed, kfactor)
    # substitute h_i = H_i(t_i): powers of each H_i
    hp = []
    for i in range(k):
        rows = [Series.one("t", order + 1)]
        for _ in range(max(caps[i], order)):
            rows.append((rows[-1] * h_of_t[i]).truncate(order))
        hp.append(rows)
    right = {}
    for e, c in ratio_ms.terms.items():
        s1 = hp[0][e[0]]
        s2 = hp[1][e[1]]
        for n1 in range(s1.val, min(order + 1, s1.prec)):
            c1 = s1.coeff(n1)
            if c1 == 0:
                continue
            for n2 in range(s2.val, min(order + 1 - n1, s2.prec)):
                c2 = s2.coeff(n2)
                if c2 == 0:
                    continue
                key = (n1, n2)
                s = right.get(key, Fraction(0)) + c * c1 * c2
                if s == 0:
                    right.pop(key, None)
                else:
                    right[key] = s
    for n1 in range(order + 1):
        for n2 in range(order + 1 - n1):
            if left.get((n1, n2), Fraction(0)) != right.get((n1, n2), Fraction(0)):
                return False
    return True


def _ms_divide(num: MultiSeries, den: MultiSeries) -> MultiSeries:
    """num/den for a MultiSeries den with nonzero constant term."""
    zero = (0,) * den.nvars
    c0 = den.coeff(zero)
    if c0 == 0:
        raise IntegrandPoleError("division by MultiSeries with zero constant term")
    inv_c0 = Fraction(1) / c0
    rest = MultiSeries(den.nvars, den.caps, den.total,
                       {e: c for e, c in den.terms.items() if e != zero})
    # Neumann series: 1/den = (1/c0) sum_k (-rest/c0)^k, finite by truncation
    bound = den.total if den.total is not None else sum(den.caps)
    acc = num.scale(inv_c0)
    out = acc
    for _ in range(bound):
        acc = (acc * rest).scale(-inv_c0)
        if not acc.terms:
            break
        out = out + acc
    return out
