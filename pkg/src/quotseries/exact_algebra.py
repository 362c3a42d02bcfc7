"""Exact scalar and polynomial arithmetic.

Rational scalars are ``fractions.Fraction`` throughout.  On top of that this
module provides dense univariate polynomials (`Poly`), sparse multivariate
polynomials (`MPoly`), cyclotomic-field elements (`CycloNum`) and normalized
rational functions (`RatFunc`).  Everything is immutable after construction
and all arithmetic is exact; there is no floating point anywhere in the
package.
"""

from __future__ import annotations

import functools
from fractions import Fraction

from .errors import LeadingCoefficientError, ReconstructionError


def binom_general(a, k: int) -> Fraction:
    """Binomial coefficient a(a-1)...(a-k+1)/k! with arbitrary integer or
    rational upper index ``a`` and nonnegative integer ``k``.

    >>> binom_general(-2, 3)
    Fraction(-4, 1)
    """
    if k < 0:
        raise ValueError("lower index must be >= 0")
    num = Fraction(1)
    for i in range(k):
        num *= Fraction(a) - i
    den = 1
    for i in range(2, k + 1):
        den *= i
    return num / den


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"expected exact rational, got {type(c).__name__}")


class Poly:
    """Dense univariate polynomial over Fraction.

    ``coeffs[i]`` is the coefficient of ``var**i``; trailing zeros are
    stripped so the zero polynomial has ``coeffs == ()``.
    """

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs, var: str = "q"):
        cs = [_as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self.var = var

    @classmethod
    def const(cls, c, var: str = "q") -> "Poly":
        return cls([c], var)

    @classmethod
    def x(cls, var: str = "q") -> "Poly":
        return cls([0, 1], var)

    def degree(self) -> int:
        """Degree; the zero polynomial has degree -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> Fraction:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly([other], self.var)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            other = Poly([other], self.var)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(
            [self.coeff(i) + other.coeff(i) for i in range(n)], self.var
        )

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs], self.var)

    def __sub__(self, other) -> "Poly":
        return self + (-other if isinstance(other, Poly) else Poly([-other], self.var))

    def __rsub__(self, other) -> "Poly":
        return Poly([other], self.var) - self

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return Poly([c * other for c in self.coeffs], self.var)
        if not isinstance(other, Poly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return Poly([], self.var)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out, self.var)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly([1], self.var)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __divmod__(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = Poly([], self.var)
        r = self
        d = other.degree()
        lead = other.coeffs[-1]
        while not r.is_zero() and r.degree() >= d:
            k = r.degree() - d
            c = r.coeffs[-1] / lead
            t = Poly([0] * k + [c], self.var)
            q = q + t
            r = r - t * other
        return q, r

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ValueError("inexact polynomial division")
        return q

    def eval(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def reversed_coeffs(self) -> "Poly":
        """q^deg * p(1/q); used for palindromicity checks."""
        return Poly(list(reversed(self.coeffs)), self.var)

    def is_palindromic(self) -> bool:
        return not self.is_zero() and self.coeffs == tuple(reversed(self.coeffs))

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = self.coeffs[-1]
        return Poly([c / lead for c in self.coeffs], self.var)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def __str__(self) -> str:
        return format_poly(self.coeffs, self.var)

    def __repr__(self) -> str:
        return f"Poly({self})"


def format_poly(coeffs, var: str) -> str:
    """Ascending-power canonical string, '0' for the zero polynomial."""
    parts = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        if i == 0:
            mono = ""
        elif i == 1:
            mono = var
        else:
            mono = f"{var}^{i}"
        mag = abs(c)
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{mag}*{mono}"
        else:
            body = str(mag)
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts) if parts else "0"


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over the rationals."""
    while not b.is_zero():
        a, b = b, divmod(a, b)[1]
    return a.monic() if not a.is_zero() else a


@functools.lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> Poly:
    """The n-th cyclotomic polynomial, by exact division of x^n - 1 by the
    cyclotomic polynomials of the proper divisors of n."""
    if n < 1:
        raise ValueError("order must be >= 1")
    num = Poly([-1] + [0] * (n - 1) + [1], "x")
    for d in range(1, n):
        if n % d == 0:
            num = num.exact_div(cyclotomic_poly(d))
    assert num.is_integral()
    return num


def euler_phi(n: int) -> int:
    return cyclotomic_poly(n).degree()


class MPoly:
    """Sparse multivariate polynomial over Fraction.

    ``terms`` maps exponent tuples (one slot per variable) to nonzero
    coefficients.  Arithmetic requires both operands to carry the same
    variable tuple; scalars (int / Fraction) mix freely.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars, terms=None):
        self.vars = tuple(vars)
        clean = {}
        if terms:
            for e, c in terms.items():
                c = _as_fraction(c)
                if c != 0:
                    if len(e) != len(self.vars):
                        raise ValueError("exponent arity mismatch")
                    clean[tuple(e)] = c
        self.terms = clean

    @classmethod
    def const(cls, vars, c) -> "MPoly":
        z = (0,) * len(tuple(vars))
        return cls(vars, {z: c})

    @classmethod
    def var(cls, vars, name) -> "MPoly":
        vars = tuple(vars)
        e = [0] * len(vars)
        e[vars.index(name)] = 1
        return cls(vars, {tuple(e): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def _coerce(self, other):
        if isinstance(other, (int, Fraction)):
            return MPoly.const(self.vars, other)
        if isinstance(other, MPoly):
            if other.vars != self.vars:
                raise ValueError("variable mismatch")
            return other
        return None

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __add__(self, other) -> "MPoly":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for e, c in o.terms.items():
            s = out.get(e, Fraction(0)) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return MPoly(self.vars, out)

    __radd__ = __add__

    def __neg__(self) -> "MPoly":
        return MPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MPoly":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "MPoly":
        return (-self) + other

    def __mul__(self, other) -> "MPoly":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return MPoly(self.vars, {})
            return MPoly(self.vars, {e: c * other for e, c in self.terms.items()})
        if not isinstance(other, MPoly):
            return NotImplemented
        if other.vars != self.vars:
            raise ValueError("variable mismatch")
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, Fraction(0)) + c1 * c2
                if s == 0:
                    out.pop(e, None)
                else:
                    out[e] = s
        return MPoly(self.vars, out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "MPoly":
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, e: int) -> "MPoly":
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = MPoly.const(self.vars, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def coeff(self, exponents) -> Fraction:
        return self.terms.get(tuple(exponents), Fraction(0))

    def is_unit(self) -> bool:
        z = (0,) * len(self.vars)
        return set(self.terms) <= {z} and self.terms.get(z, 0) != 0

    def inverse(self):
        if not self.is_unit():
            raise LeadingCoefficientError(
                "only constant multivariate polynomials can be inverted"
            )
        z = (0,) * len(self.vars)
        return MPoly.const(self.vars, Fraction(1) / self.terms[z])

    def subs(self, values: dict):
        """Evaluate at rational values for every variable."""
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for name, k in zip(self.vars, e):
                if k:
                    t *= Fraction(values[name]) ** k
            total += t
        return total

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=lambda t: (sum(t), t)):
            c = self.terms[e]
            mono = "*".join(
                f"{v}^{k}" if k > 1 else v for v, k in zip(self.vars, e) if k
            )
            mag = abs(c)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = str(mag)
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"MPoly({self})"


@functools.lru_cache(maxsize=None)
def _cyclo_reduction(order: int):
    """Coordinate vectors of x^k mod Phi_order for k = 0 .. 2*phi-2."""
    phi = cyclotomic_poly(order)
    deg = phi.degree()
    rows = []
    for k in range(deg):
        row = [Fraction(0)] * deg
        row[k] = Fraction(1)
        rows.append(tuple(row))
    for k in range(deg, 2 * deg - 1):
        # x^k = x * x^(k-1), then reduce the overflow term via
        # x^deg = -(phi - x^deg).
        prev = rows[k - 1]
        shifted = [Fraction(0)] + list(prev[:-1])
        top = prev[-1]
        if top != 0:
            for i in range(deg):
                shifted[i] -= top * phi.coeffs[i]
        rows.append(tuple(shifted))
    return tuple(rows)


class CycloNum:
    """Element of Q[x]/Phi_n(x), the degree-phi(n) cyclotomic field.

    Coordinates are with respect to the power basis 1, z, ..., z^(phi-1)
    where z is a primitive n-th root of unity.
    """

    __slots__ = ("order", "coords")

    def __init__(self, order: int, coords):
        self.order = order
        phi = euler_phi(order)
        cs = [_as_fraction(c) for c in coords]
        if len(cs) != phi:
            raise ValueError("coordinate length must equal phi(order)")
        self.coords = tuple(cs)

    @classmethod
    def const(cls, order: int, c) -> "CycloNum":
        phi = euler_phi(order)
        return cls(order, [c] + [0] * (phi - 1))

    @classmethod
    def zeta(cls, order: int, power: int = 1) -> "CycloNum":
        """z^power for z a primitive root of unity of the given order."""
        power %= order
        phi = euler_phi(order)
        if phi == 1:
            val = -cyclotomic_poly(order).coeffs[0]  # x = val mod (x - val)
            return cls(order, [val ** power])
        x = cls(order, [0, 1] + [0] * (phi - 2))
        return x ** power

    def _coerce(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloNum.const(self.order, other)
        if isinstance(other, CycloNum):
            if other.order != self.order:
                raise ValueError("cyclotomic order mismatch")
            return other
        return None

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.coords == o.coords

    def __hash__(self):
        return hash((self.order, self.coords))

    def __add__(self, other) -> "CycloNum":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycloNum(self.order, [a + b for a, b in zip(self.coords, o.coords)])

    __radd__ = __add__

    def __neg__(self) -> "CycloNum":
        return CycloNum(self.order, [-c for c in self.coords])

    def __sub__(self, other) -> "CycloNum":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "CycloNum":
        return (-self) + other

    def __mul__(self, other) -> "CycloNum":
        if isinstance(other, (int, Fraction)):
            return CycloNum(self.order, [c * other for c in self.coords])
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        phi = len(self.coords)
        conv = [Fraction(0)] * (2 * phi - 1)
        for i, a in enumerate(self.coords):
            if a == 0:
                continue
            for j, b in enumerate(o.coords):
                if b != 0:
                    conv[i + j] += a * b
        red = _cyclo_reduction(self.order)
        out = [Fraction(0)] * phi
        for k, c in enumerate(conv):
            if c != 0:
                row = red[k]
                for i in range(phi):
                    out[i] += c * row[i]
        return CycloNum(self.order, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __pow__(self, e: int) -> "CycloNum":
        if e < 0:
            return self.inverse() ** (-e)
        result = CycloNum.const(self.order, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> "CycloNum":
        """Inverse via the extended Euclidean algorithm against Phi_n."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero cyclotomic number")
        a = Poly(self.coords, "x")
        b = cyclotomic_poly(self.order)
        # extended gcd: s*a + t*b = g
        s0, s1 = Poly([1], "x"), Poly([], "x")
        r0, r1 = a, b
        while not r1.is_zero():
            q, r = divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
        if r0.degree() != 0:
            raise ZeroDivisionError("element is a zero divisor (unexpected)")
        inv = s0 * (Fraction(1) / r0.coeffs[0])
        phi = len(self.coords)
        coords = [inv.coeff(i) for i in range(phi)]
        return CycloNum(self.order, coords)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coords[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"not rational: {self}")
        return self.coords[0]

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + f"; z{self.order})"

    __repr__ = __str__


class RatFunc:
    """Rational function in one variable, held in canonical form.

    The numerator/denominator pair is reduced (monic gcd divided out) and
    scaled so the denominator has constant term 1.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        g = poly_gcd(num, den)
        if not g.is_zero() and g.degree() > 0:
            num = num.exact_div(g)
            den = den.exact_div(g)
        c0 = den.coeff(0)
        if c0 == 0:
            raise ValueError("denominator must have nonzero constant term")
        if c0 != 1:
            inv = Fraction(1) / c0
            num = num * inv
            den = den * inv
        self.num = num
        self.den = den

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __mul__(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            return RatFunc(self.num * other.num, self.den * other.den)
        return RatFunc(self.num * other, self.den)

    def __pow__(self, e: int) -> "RatFunc":
        if e < 0:
            if self.num.coeff(0) == 0:
                raise ValueError("negative power needs nonzero constant term")
            return RatFunc(self.den, self.num) ** (-e)
        return RatFunc(self.num ** e, self.den ** e)

    def series_coeffs(self, order: int):
        """First order+1 Taylor coefficients, by long division."""
        out = []
        d0 = self.den.coeff(0)
        state = [self.num.coeff(i) for i in range(order + 1)]
        for n in range(order + 1):
            c = state[n] / d0
            out.append(c)
            for j in range(1, min(self.den.degree(), order - n) + 1):
                state[n + j] -= c * self.den.coeff(j)
        return out

    def __str__(self) -> str:
        num = format_poly(self.num.coeffs, self.num.var)
        den = format_poly(self.den.coeffs, self.den.var)
        if den == "1":
            return num
        return f"({num}) / ({den})"

    def __repr__(self) -> str:
        return f"RatFunc({self})"


def ratfunc_reconstruct(series, denom: Poly, max_deg: int) -> RatFunc:
    """Recognize a truncated series as p/denom with deg p <= max_deg.

    Multiplies the series by the proposed denominator and checks that every
    known coefficient above max_deg vanishes; a nonzero one means the series
    does not have the proposed shape and raises ReconstructionError.
    """
    need = max_deg + denom.degree() + 4
    if series.prec < need:
        raise ValueError(f"series precision {series.prec} < required {need}")
    prod = [Fraction(0)] * series.prec
    for n in range(series.val, series.prec):
        c = series.coeff(n)
        if c == 0:
            continue
        for j, d in enumerate(denom.coeffs):
            if d != 0 and 0 <= n + j < series.prec:
                prod[n + j] += c * d
    for n in range(max_deg + 1, series.prec):
        if prod[n] != 0:
            raise ReconstructionError(
                f"coefficient of order {n} is {prod[n]}, not 0: "
                "series is not p/denom with the requested degree bound"
            )
    if series.val < 0:
        raise ReconstructionError("series has a pole at the origin")
    num = Poly(prod[: max_deg + 1], denom.var)
    return RatFunc(num, denom)
