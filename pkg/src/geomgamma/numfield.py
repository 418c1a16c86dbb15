"""Arithmetic in Q[z]/(m(z)) with exact traces and certified real signs.

Real embeddings are isolated with Sturm sequences over Q and refined by
bisection, so every sign query is decided with exact rational interval
arithmetic.  Complex embeddings are located numerically with mpmath and
polished by Newton iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

Poly = list[Fraction]  # ascending coefficients


class SignUndecidableError(ArithmeticError):
    pass


# --- dense polynomials over Q ------------------------------------------------

def _trim(p: Poly) -> Poly:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_eval(p: Sequence, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _poly_rem(a: Poly, b: Poly) -> Poly:
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(_trim(a)) - 1 >= db:
        q = a[-1] / lb
        shift = len(a) - 1 - db
        for i, c in enumerate(b):
            a[shift + i] -= q * c
        a.pop()
    return a


def _derivative(p: Poly) -> Poly:
    return [i * c for i, c in enumerate(p)][1:]


def sturm_sequence(p: Poly) -> list[Poly]:
    seq = [list(p), _derivative(p)]
    while True:
        r = _trim(_poly_rem(seq[-2], seq[-1]))
        if not r:
            return seq
        seq.append([-c for c in r])


def _sign_changes(seq: list[Poly], x: Fraction) -> int:
    signs = [s for s in ((_poly_eval(p, x) > 0) - (_poly_eval(p, x) < 0) for p in seq) if s]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def _cauchy_bound(p: Poly) -> Fraction:
    lead = abs(p[-1])
    return 1 + max(abs(c) for c in p[:-1]) / lead


# --- interval arithmetic over Q ---------------------------------------------

@dataclass(frozen=True)
class RatInterval:
    lo: Fraction
    hi: Fraction

    @staticmethod
    def point(x) -> "RatInterval":
        x = Fraction(x)
        return RatInterval(x, x)

    def __add__(self, o):
        o = _as_interval(o)
        return RatInterval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return RatInterval(-self.hi, -self.lo)

    def __sub__(self, o):
        return self + (-_as_interval(o))

    def __rsub__(self, o):
        return _as_interval(o) - self

    def __mul__(self, o):
        o = _as_interval(o)
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return RatInterval(min(ps), max(ps))

    __rmul__ = __mul__

    def sign(self) -> int | None:
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        return None


def _as_interval(x) -> RatInterval:
    return x if isinstance(x, RatInterval) else RatInterval.point(x)


def interval_det(m: Sequence[Sequence[RatInterval]]) -> RatInterval:
    """Interval enclosure of a determinant by cofactor expansion along row 0."""
    n = len(m)
    if n == 1:
        return m[0][0]
    total = RatInterval.point(0)
    for j in range(n):
        sub = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * interval_det(sub)
        total = total + (term if j % 2 == 0 else -term)
    return total


# --- number fields -----------------------------------------------------------

class NumberField:
    """Q[z]/(m(z)) for a monic irreducible integer polynomial m."""

    def __init__(self, minpoly: Sequence[int], check_irreducible: bool = True):
        coeffs = [int(c) for c in minpoly]
        if len(coeffs) < 2 or coeffs[-1] != 1:
            raise ValueError("minimal polynomial must be monic of degree >= 1")
        self.minpoly: tuple[int, ...] = tuple(coeffs)
        self.degree = len(coeffs) - 1
        if check_irreducible and not self._irreducible():
            raise ValueError("minimal polynomial is not irreducible over Q")
        self._power_traces = self._newton_power_sums()
        self._embeddings: list[EmbeddingHandle] | None = None

    def _irreducible(self) -> bool:
        import sympy

        x = sympy.Symbol("x")
        return sympy.Poly(list(reversed(self.minpoly)), x, domain="QQ").is_irreducible

    def _newton_power_sums(self) -> list[Fraction]:
        # power sums of the roots via Newton's identities
        n = self.degree
        e = [Fraction(1)] + [Fraction((-1) ** k * self.minpoly[n - k]) for k in range(1, n + 1)]
        p = [Fraction(n)]
        for k in range(1, n):
            s = sum(((-1) ** (i - 1) * e[i] * p[k - i] for i in range(1, k)), Fraction(0))
            p.append(s + (-1) ** (k - 1) * k * e[k])
        return p

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.minpoly == other.minpoly

    def __hash__(self):
        return hash(self.minpoly)

    def __repr__(self):
        return f"NumberField({list(self.minpoly)})"

    # element constructors
    def element(self, coeffs: Iterable) -> "NFElement":
        c = [Fraction(x) for x in coeffs]
        if len(c) > self.degree:
            c = _poly_rem(c, [Fraction(x) for x in self.minpoly])
        return NFElement(self, tuple(c))._pad()

    def __call__(self, value) -> "NFElement":
        if isinstance(value, NFElement):
            return value
        return self.element([value])

    @property
    def gen(self) -> "NFElement":
        return self.element([0, 1])

    def zero(self) -> "NFElement":
        return self.element([0])

    def one(self) -> "NFElement":
        return self.element([1])

    # embeddings
    def real_embeddings(self) -> list["EmbeddingHandle"]:
        if self._embeddings is None:
            self._embeddings = _isolate_real_roots(self)
        return self._embeddings

    def is_totally_real(self) -> bool:
        return len(self.real_embeddings()) == self.degree

    def complex_embeddings(self, prec: int = 64) -> list["ComplexEmbedding"]:
        return _complex_roots(self, prec)


@dataclass(frozen=True)
class NFElement:
    field: NumberField
    coeffs: tuple[Fraction, ...]

    def _pad(self) -> "NFElement":
        n = self.field.degree
        c = tuple(self.coeffs) + (Fraction(0),) * (n - len(self.coeffs))
        return NFElement(self.field, c)

    def _coerce(self, other) -> "NFElement":
        if isinstance(other, NFElement):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.element([other])
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return NFElement(self.field, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return NFElement(self.field, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return NFElement(self.field, tuple(a * other for a in self.coeffs))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = self.field.degree
        prod = [Fraction(0)] * (2 * n - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        prod[i + j] += a * b
        m = self.field.minpoly
        for k in range(2 * n - 2, n - 1, -1):
            c = prod[k]
            if c:
                for i in range(n):
                    prod[k - n + i] -= c * m[i]
        return NFElement(self.field, tuple(prod[:n]))

    __rmul__ = __mul__

    def mult_matrix(self) -> list[list[Fraction]]:
        """Matrix of multiplication by self on the power basis (columns = images)."""
        n = self.field.degree
        cols = [(self * self.field.element([0] * k + [1])).coeffs for k in range(n)]
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    def inverse(self) -> "NFElement":
        if self.is_zero():
            raise ZeroDivisionError("inversion of 0 in a number field")
        from .exactcore import inverse as mat_inverse

        inv = mat_inverse(self.mult_matrix())
        return NFElement(self.field, tuple(row[0] for row in inv))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by 0")
            return NFElement(self.field, tuple(a / other for a in self.coeffs))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result, base = self.field.one(), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.element([other])
        if not isinstance(other, NFElement):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def trace(self) -> Fraction:
        return sum((c * p for c, p in zip(self.coeffs, self.field._power_traces)), Fraction(0))

    def __repr__(self):
        terms = []
        for k, c in reversed(list(enumerate(self.coeffs))):
            if c:
                mon = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
                terms.append(f"({c})*{mon}" if mon else f"({c})")
        return " + ".join(terms) if terms else "0"


def trace(x: NFElement) -> Fraction:
    return x.trace()


# --- real embeddings ---------------------------------------------------------

@dataclass
class EmbeddingHandle:
    """Isolating interval (lo, hi] around one real root of the minimal polynomial."""

    field: NumberField
    index: int
    lo: Fraction
    hi: Fraction
    _sign_lo: int = dc_field(default=0, repr=False)

    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def precision_bits(self) -> int:
        w = self.width()
        return 10**6 if w == 0 else max(0, -math.floor(math.log2(w)))

    def refine(self, bits: int) -> None:
        """Bisect until the interval is narrower than 2^-bits."""
        target = Fraction(1, 2**bits)
        m = [Fraction(c) for c in self.field.minpoly]
        if self._sign_lo == 0:
            self._sign_lo = _sgn(_poly_eval(m, self.lo))
        while self.hi - self.lo > target:
            mid = (self.lo + self.hi) / 2
            s = _sgn(_poly_eval(m, mid))
            if s == 0:
                self.lo = self.hi = mid
                return
            if s == self._sign_lo:
                self.lo = mid
            else:
                self.hi = mid

    def interval(self) -> RatInterval:
        return RatInterval(self.lo, self.hi)

    def value(self, prec: int) -> mpmath.mpf:
        """Root to about ``prec`` bits, Newton-polished from the isolating interval."""
        self.refine(min(prec, 48))
        with mpmath.workprec(prec + 20):
            m = [mpmath.mpf(c) for c in self.field.minpoly]
            dm = [i * c for i, c in enumerate(m)][1:]
            x = mpmath.mpf(self.lo.numerator) / self.lo.denominator
            x += (mpmath.mpf(self.hi.numerator) / self.hi.denominator - x) / 2
            lo = mpmath.mpf(self.lo.numerator) / self.lo.denominator
            hi = mpmath.mpf(self.hi.numerator) / self.hi.denominator
            for _ in range(200):
                fx = mpmath.polyval(m[::-1], x)
                step = fx / mpmath.polyval(dm[::-1], x)
                x -= step
                if not (lo <= x <= hi):
                    # Newton left the bracket; fall back to exact bisection
                    self.refine(prec + 8)
                    return +(mpmath.mpf(self.lo.numerator) / self.lo.denominator)
                if abs(step) <= abs(x) * mpmath.mpf(2) ** (-prec - 10) or step == 0:
                    break
            return +x


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


def _isolate_real_roots(field: NumberField) -> list[EmbeddingHandle]:
    p = [Fraction(c) for c in field.minpoly]
    seq = sturm_sequence(p)
    bound = _cauchy_bound(p)
    out: list[tuple[Fraction, Fraction]] = []

    def count(a, b):
        return _sign_changes(seq, a) - _sign_changes(seq, b)

    stack = [(-bound, bound)]
    while stack:
        a, b = stack.pop()
        c = count(a, b)
        if c == 0:
            continue
        if c == 1:
            out.append((a, b))
            continue
        mid = (a + b) / 2
        stack.extend([(a, mid), (mid, b)])
    out.sort()
    handles = []
    for k, (a, b) in enumerate(out):
        h = EmbeddingHandle(field, k, a, b)
        if _poly_eval(p, b) == 0:
            h.lo = h.hi = b
        handles.append(h)
    return handles


def real_embeddings(field: NumberField) -> list[EmbeddingHandle]:
    """Handles for the real roots of the minimal polynomial in ascending order."""
    return field.real_embeddings()


def embed_interval(x: NFElement, sigma: EmbeddingHandle) -> RatInterval:
    if sigma.lo == sigma.hi:
        return RatInterval.point(_poly_eval(x.coeffs, sigma.lo))
    root = sigma.interval()
    acc = RatInterval.point(0)
    for c in reversed(x.coeffs):
        acc = acc * root + c
    return acc


def sign_under_embedding(x: NFElement, sigma: EmbeddingHandle, max_bits: int = 2**14) -> int:
    """Exact sign of sigma(x)."""
    if x.is_zero():
        return 0
    bits = max(sigma.precision_bits, 16)
    while True:
        s = embed_interval(x, sigma).sign()
        if s is not None:
            return s
        if bits > max_bits:
            raise SignUndecidableError("sign undecidable at max precision")
        bits *= 2
        sigma.refine(bits)


def embed(x: NFElement, sigma, prec: int):
    """Numerical value of sigma(x) at about ``prec`` bits (real or complex handle)."""
    with mpmath.workprec(prec + 20):
        r = sigma.value(prec + 20)
        val = mpmath.polyval([mpmath.mpf(c.numerator) / c.denominator for c in reversed(x.coeffs)], r)
    # round to the requested precision, not the ambient one
    with mpmath.workprec(prec):
        return +val


def is_totally_positive(x: NFElement) -> bool:
    field = x.field
    if not field.is_totally_real():
        raise ValueError("field is not totally real")
    return all(sign_under_embedding(x, s) == 1 for s in field.real_embeddings())


# --- complex embeddings ------------------------------------------------------

@dataclass
class ComplexEmbedding:
    """A non-real root of the minimal polynomial, refined on demand by Newton."""

    field: NumberField
    index: int
    approx: mpmath.mpc
    prec: int

    def value(self, prec: int) -> mpmath.mpc:
        if prec <= self.prec:
            return self.approx
        with mpmath.workprec(prec + 20):
            m = [mpmath.mpf(c) for c in reversed(self.field.minpoly)]
            deriv = [c * (len(m) - 1 - i) for i, c in enumerate(m[:-1])]
            x = mpmath.mpc(self.approx)
            for _ in range(100):
                step = mpmath.polyval(m, x) / mpmath.polyval(deriv, x)
                x -= step
                if abs(step) <= abs(x) * mpmath.mpf(2) ** (-prec - 10):
                    break
        self.approx, self.prec = x, prec
        return x


def _complex_roots(field: NumberField, prec: int) -> list[ComplexEmbedding]:
    with mpmath.workprec(max(prec, 64) + 40):
        roots = mpmath.polyroots(list(reversed(field.minpoly)), maxsteps=400, extraprec=2 * prec + 100)
        tol = mpmath.mpf(2) ** (-(prec // 2))
        nonreal = [r for r in roots if abs(mpmath.im(r)) > tol]
    upper = sorted([r for r in nonreal if mpmath.im(r) > 0], key=lambda r: (-mpmath.im(r), mpmath.re(r)))
    lower = [mpmath.conj(r) for r in upper]
    return [ComplexEmbedding(field, k, r, prec) for k, r in enumerate(upper + lower)]


def complex_embeddings(field: NumberField, prec: int = 64) -> list[ComplexEmbedding]:
    """Non-real roots, upper half-plane first (by decreasing imaginary part), then conjugates."""
    return field.complex_embeddings(prec)
