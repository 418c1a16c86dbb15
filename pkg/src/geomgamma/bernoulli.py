"""Bernoulli numbers, multiple Bernoulli polynomials and their lattice-sum versions.

Values live in a generic field K: ``Fraction``, a number-field element, or an
mpmath number.  Everything here only uses ``+``, ``*``, ``/`` and
multiplication by rationals, so one code path serves all three.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Sequence

from .conecalc import ConeExpr
from .exactcore import (
    DependentFormsError,
    LinearForm,
    RatPoint,
    adjugate,
    det,
    kernel,
    pair,
    positive_dual_family,
    primitive_part,
    rank,
    reduce_mod_lattice,
    sign,
    transpose,
)


class PoleError(ArithmeticError):
    pass


@lru_cache(maxsize=None)
def bernoulli_number(k: int) -> Fraction:
    """B_k with t/(e^t - 1) = sum B_k t^k / k!, so B_1 = -1/2."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return Fraction(1)
    return -sum((math.comb(k + 1, j) * bernoulli_number(j) for j in range(k)), Fraction(0)) / (k + 1)


def _zero_like(x):
    return x * 0


def _diag_coefficients(omega: Sequence, m: int) -> list:
    """c_j = sum over |k| = j of prod B_{k_i} omega_i^{k_i} / k_i!, for j <= m."""
    zero = _zero_like(omega[0])
    series = [zero + 1] + [zero] * m
    for w in omega:
        factor = []
        p = zero + 1
        for k in range(m + 1):
            factor.append(p * (bernoulli_number(k) / math.factorial(k)))
            p = p * w
        new = [zero] * (m + 1)
        for i, a in enumerate(series):
            for j in range(m + 1 - i):
                new[i + j] = new[i + j] + a * factor[j]
        series = new
    return series


def multiple_bernoulli_star(n: int, m: int, z, omega: Sequence):
    """B*_{n,m}(z, omega) from the explicit Bernoulli-number expansion."""
    if len(omega) != n:
        raise ValueError("omega must have n entries")
    if any(w == 0 for w in omega):
        raise ValueError("zero period in multiple Bernoulli polynomial")
    c = _diag_coefficients(omega, m)
    total = _zero_like(z)
    zp = _zero_like(z) + 1
    for l in range(m + 1):
        total = total + zp * c[m - l] / math.factorial(l)
        zp = zp * z
    return total * math.factorial(m)


# --- fundamental parallelepipeds ---------------------------------------------

def _hermite_diagonal(m: Sequence[Sequence[int]]) -> list[int]:
    """Diagonal of a lower-triangular basis of the column lattice of m."""
    a = [list(r) for r in m]
    n = len(a)
    for i in range(n):
        for j in range(i + 1, n):
            while a[i][j] != 0:
                qq = a[i][i] // a[i][j]
                for r in range(n):
                    a[r][i] -= qq * a[r][j]
                for r in range(n):
                    a[r][i], a[r][j] = a[r][j], a[r][i]
        if a[i][i] < 0:
            for r in range(n):
                a[r][i] = -a[r][i]
    return [a[i][i] for i in range(n)]


@dataclass(frozen=True)
class ParallelepipedSet:
    """Points delta = scaled[k] / denominator of (v + L) in the half-open parallelepiped."""

    denominator: int
    scaled: tuple[tuple[int, ...], ...]
    index: int

    @property
    def points(self) -> list[RatPoint]:
        d = self.denominator
        return [tuple(Fraction(c, d) for c in p) for p in self.scaled]

    def __len__(self) -> int:
        return len(self.scaled)


def _alpha_matrix(forms: Sequence[LinearForm]):
    fam = positive_dual_family(*forms)
    return fam, transpose(fam.alphas)


def enum_parallelepiped(forms: Sequence[LinearForm], v: Sequence) -> ParallelepipedSet:
    """All delta in v + L with 0 <= a_j(delta) < a_j(alpha_j) for every j."""
    fam, mat = _alpha_matrix(forms)
    return _enum_with_alphas(mat, v)


def enum_alpha_parallelepiped(alphas: Sequence[Sequence[int]], v: Sequence) -> ParallelepipedSet:
    """Points of v + L in the half-open parallelepiped spanned by arbitrary independent vectors."""
    return _enum_with_alphas(transpose(alphas), v)


def box_volume(forms: Sequence[LinearForm]) -> int:
    """Number of lattice points scanned by ``brute_force_parallelepiped``."""
    alphas = _kernel_alphas(forms)
    n = len(forms)
    vol = 1
    for k in range(n):
        vol *= sum(abs(a[k]) for a in alphas) + 2
    return vol


def _enum_with_alphas(mat, v) -> ParallelepipedSet:
    n = len(mat)
    d = det(mat)
    index = abs(d)
    vq = [Fraction(c) for c in reduce_mod_lattice(v)]
    qden = math.lcm(*(c.denominator for c in vq)) if vq else 1
    big_v = [int(c * qden) for c in vq]
    adj = adjugate(mat)
    big_n = qden * d
    sgn = 1 if big_n > 0 else -1
    big_n = abs(big_n)
    base = [sgn * sum(adj[i][k] * big_v[k] for k in range(n)) for i in range(n)]
    cols = [[sgn * qden * adj[i][k] for i in range(n)] for k in range(n)]
    diag = _hermite_diagonal(mat)
    out = []
    for c in itertools.product(*(range(h) for h in diag)):
        t = list(base)
        for k, ck in enumerate(c):
            if ck:
                col = cols[k]
                for i in range(n):
                    t[i] += ck * col[i]
        t = [x % big_n for x in t]
        out.append(tuple(sum(mat[r][i] * t[i] for i in range(n)) for r in range(n)))
    g = math.gcd(big_n, *(x for p in out for x in p))
    return ParallelepipedSet(big_n // g, tuple(tuple(x // g for x in p) for p in out), index)


# --- moments of parallelepiped points -----------------------------------------

def _multi_indices(n: int, total: int):
    if n == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _multi_indices(n - 1, total - first):
            yield (first,) + rest


@lru_cache(maxsize=4096)
def _moments(forms: tuple, v: tuple, order: int) -> dict[tuple[int, ...], Fraction]:
    """sum over delta in F of delta^m for every multi-index |m| <= order."""
    pts = enum_parallelepiped(forms, v)
    n = len(forms)
    idx = [m for t in range(order + 1) for m in _multi_indices(n, t)]
    sums = dict.fromkeys(idx, 0)
    for p in pts.scaled:
        powers = []
        for c in p:
            row = [1]
            for _ in range(order):
                row.append(row[-1] * c)
            powers.append(row)
        for m in idx:
            val = 1
            for k, e in enumerate(m):
                if e:
                    val *= powers[k][e]
            sums[m] += val
    den = pts.denominator
    return {m: Fraction(s, den ** sum(m)) for m, s in sums.items()}


@dataclass(frozen=True)
class ValueAssignment:
    """A point (w, x): w in K and x given by its values on the basis e_1..e_n of L."""

    w: Any
    x: tuple

    def of(self, vec: Sequence):
        total = _zero_like(self.x[0])
        for c, xk in zip(vec, self.x):
            if c:
                total = total + xk * Fraction(c)
        return total


def _power_sums(forms: tuple, v: tuple, assign: ValueAssignment, order: int) -> list:
    mom = _moments(forms, v, order)
    n = len(forms)
    zero = _zero_like(assign.x[0])
    xpow = []
    for xk in assign.x:
        row = [zero + 1]
        for _ in range(order):
            row.append(row[-1] * xk)
        xpow.append(row)
    sums = []
    for i in range(order + 1):
        s = zero
        for m in _multi_indices(n, i):
            c = mom[m]
            if c:
                coef = Fraction(math.factorial(i)) * c
                for e in m:
                    coef /= math.factorial(e)
                term = zero + 1
                for k, e in enumerate(m):
                    if e:
                        term = term * xpow[k][e]
                s = s + term * coef
        sums.append(s)
    return sums


def _canon(forms, v) -> tuple[tuple, tuple]:
    return tuple(tuple(int(c) for c in f) for f in forms), tuple(reduce_mod_lattice(v))


# Families whose parallelepiped has more points than this are first split
# into smaller-index families (see _split_family).
DIRECT_LIMIT = 400


def parallelepiped_size(forms: Sequence[LinearForm]) -> int:
    """|F(a, v)| = [L : sum Z alpha_j], computed without enumerating."""
    return abs(det(positive_dual_family(*forms).alphas))


def _split_family(forms: tuple) -> tuple[tuple, list] | None:
    """Short primitive b = sum lam_j a_j with every |lam_j| < 1, oriented so some lam_j > 0.

    Returns None when no such b is found.  The orientation makes the normalized
    relation among (b, a_1..a_n) have a negative entry, so the alternating sum
    of B over that family vanishes and B(a) = sum_j B(a with a_j -> b).
    """
    from sympy import ZZ
    from sympy.polys.matrices import DomainMatrix

    n = len(forms)
    d = det(forms)
    adj = adjugate(forms)
    # d * lam = b * adj, so the candidates are the row lattice of adj
    red = DomainMatrix([[ZZ(int(c)) for c in row] for row in adj], (n, n), ZZ).lll().to_Matrix()
    rows = [[int(red[i, j]) for j in range(n)] for i in range(n)]
    cands = rows + [[x + y for x, y in zip(r1, r2)] for r1, r2 in itertools.combinations(rows, 2)]
    cands += [[x - y for x, y in zip(r1, r2)] for r1, r2 in itertools.combinations(rows, 2)]
    best = None
    for r in cands:
        if not any(r):
            continue
        lam = [Fraction(c, d) for c in r]
        size = max(abs(c) for c in lam)
        if size < 1 and (best is None or size < best[0]):
            best = (size, lam)
    if best is None:
        return None
    lam = best[1]
    if not any(c > 0 for c in lam):
        lam = [-c for c in lam]
    b = [sum(lam[j] * forms[j][k] for j in range(n)) for k in range(n)]
    if any(Fraction(c).denominator != 1 for c in b):
        raise AssertionError("split vector is not integral")
    _, b = primitive_part([int(c) for c in b])
    return b, lam


def geometric_bernoulli(forms: Sequence[LinearForm], v: Sequence, assign: ValueAssignment,
                        method: str = "auto"):
    """Rescaled geometric Bernoulli function B_{n,a}(v)(w, x); zero for dependent forms.

    ``method``: "direct" sums over the parallelepiped F(a, v); "auto" first
    splits large-index families into smaller ones.
    """
    forms_t, v_t = _canon(forms, v)
    if method not in ("auto", "direct"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto" and det(forms_t) != 0 and parallelepiped_size(forms_t) > DIRECT_LIMIT:
        split = _split_family(forms_t)
        if split is not None:
            b, lam = split
            total = _zero_like(assign.x[0])
            for j, c in enumerate(lam):
                if c:
                    sub = forms_t[:j] + (b,) + forms_t[j + 1:]
                    total = total + geometric_bernoulli(sub, v_t, assign, "auto")
            return total
    return _bernoulli_direct(forms_t, v_t, assign)


def _bernoulli_direct(forms_t: tuple, v_t: tuple, assign: ValueAssignment):
    n = len(forms_t)
    zero = _zero_like(assign.x[0])
    if det(forms_t) == 0:
        return zero
    fam = positive_dual_family(*forms_t)
    xa = [assign.of(alpha) for alpha in fam.alphas]
    if any(val == 0 for val in xa):
        raise PoleError("assignment on pole locus")
    c = _diag_coefficients(xa, n)
    p = _power_sums(forms_t, v_t, assign, n)
    w = assign.w
    wp = [zero + 1]
    for _ in range(n):
        wp.append(wp[-1] * w)
    total = zero
    for l in range(n + 1):
        # sum over delta of (w + x(delta))^l
        s = zero
        for i in range(l + 1):
            s = s + wp[l - i] * p[i] * math.comb(l, i)
        total = total + s * c[n - l] / math.factorial(l)
    denom = zero + 1
    for val in xa:
        denom = denom * val
    return total * fam.epsilon / denom


def h0(forms: Sequence[LinearForm], v: Sequence, assign: ValueAssignment):
    """Constant-term functional on the single dual cone c(a_1, ..., a_n)."""
    d = det([list(f) for f in forms])
    if d == 0:
        return _zero_like(assign.x[0])
    return geometric_bernoulli(forms, v, assign) * sign(d)


def h0_expr(expr: ConeExpr, v: Sequence, assign: ValueAssignment):
    """Extend h0 linearly to combinations of simplicial dual cones.

    Terms whose forms have rank below n contain a line and contribute 0.
    """
    n = len(assign.x)
    total = _zero_like(assign.x[0])
    for coef, factors in expr.expand().terms:
        forms = list(dict.fromkeys(h.form for h in factors))
        if len(forms) < n or rank(forms) < n:
            continue
        if len(forms) > n:
            raise NotImplementedError("h0 of a non-simplicial cone")
        total = total + h0(forms, v, assign) * coef
    return total


# --- independent oracle --------------------------------------------------------

def _kernel_alphas(forms: Sequence[LinearForm]) -> list[tuple[int, ...]]:
    n = len(forms)
    alphas = []
    for j in range(n):
        others = [forms[k] for k in range(n) if k != j]
        ker = kernel(others) if others else [[Fraction(1)]]
        if len(ker) != 1:
            raise DependentFormsError("not a basis of the dual space")
        vec = ker[0]
        den = math.lcm(*(c.denominator for c in vec))
        _, prim = primitive_part([int(c * den) for c in vec])
        if pair(forms[j], prim) < 0:
            prim = tuple(-c for c in prim)
        alphas.append(prim)
    return alphas


def brute_force_parallelepiped(forms: Sequence[LinearForm], v: Sequence) -> list[RatPoint]:
    """Box scan of the parallelepiped spanned by the kernel-derived dual vectors."""
    n = len(forms)
    alphas = _kernel_alphas(forms)
    s = [pair(forms[j], alphas[j]) for j in range(n)]
    vq = reduce_mod_lattice(v)
    lo = [sum(min(0, a[k]) for a in alphas) for k in range(n)]
    hi = [sum(max(0, a[k]) for a in alphas) for k in range(n)]
    ranges = [range(math.floor(lo[k] - vq[k]), math.ceil(hi[k] - vq[k]) + 1) for k in range(n)]
    pts = []
    for shift in itertools.product(*ranges):
        delta = tuple(vq[k] + shift[k] for k in range(n))
        if all(0 <= pair(forms[j], delta) < s[j] for j in range(n)):
            pts.append(delta)
    return pts


def h0_series_oracle(forms: Sequence[LinearForm], v: Sequence, assign: ValueAssignment):
    """t^0 coefficient of e^{wt} sum_delta e^{x(delta) t} / prod_j (1 - e^{x(alpha_j) t}).

    Uses kernel-derived dual vectors, a box scan for the parallelepiped and
    plain truncated power series; it shares no code path with ``h0``.
    """
    n = len(forms)
    zero = _zero_like(assign.x[0])
    if rank(forms) < n:
        return zero
    alphas = _kernel_alphas(forms)
    xa = [assign.of(a) for a in alphas]
    if any(val == 0 for val in xa):
        raise PoleError("assignment on pole locus")
    order = n
    num = [zero] * (order + 1)
    for delta in brute_force_parallelepiped(forms, v):
        arg = assign.w + assign.of(delta)
        term = zero + 1
        for k in range(order + 1):
            num[k] = num[k] + term
            term = term * arg / (k + 1)
    den = [zero + 1] + [zero] * order
    for c in xa:
        # (1 - e^{ct}) / t = -sum_k c^{k+1} t^k / (k+1)!
        g = []
        p = c
        for k in range(order + 1):
            g.append(-p / math.factorial(k + 1))
            p = p * c
        new = [zero] * (order + 1)
        for i, a in enumerate(den):
            for j in range(order + 1 - i):
                new[i + j] = new[i + j] + a * g[j]
        den = new
    # quotient series num / den, coefficient of t^n
    quo = [zero] * (order + 1)
    for k in range(order + 1):
        acc = num[k]
        for j in range(k):
            acc = acc - quo[j] * den[k - j]
        quo[k] = acc / den[0]
    return quo[order]


def cocycle_sum(forms: Sequence[LinearForm], v: Sequence, assign: ValueAssignment):
    """Alternating sum over omitted forms of the geometric Bernoulli functions."""
    total = _zero_like(assign.x[0])
    for j in range(len(forms)):
        rest = [f for k, f in enumerate(forms) if k != j]
        term = geometric_bernoulli(rest, v, assign)
        total = total + (term if j % 2 == 0 else -term)
    return total
