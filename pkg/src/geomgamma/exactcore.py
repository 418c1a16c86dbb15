"""Exact rational linear algebra on the lattice pair (L, Hom(L, Z)).

Lattice vectors and linear forms are plain tuples of Python ints, written in
the fixed basis e_1..e_n of L and its dual basis f_1..f_n.  Rational points
are tuples of ``Fraction``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

IntVec = tuple[int, ...]
LatticeVector = IntVec
LinearForm = IntVec
RatPoint = tuple[Fraction, ...]
Matrix = list[list]


class DependentFormsError(ValueError):
    pass


def sign(x) -> int:
    return (x > 0) - (x < 0)


def primitive_part(w: Sequence[int]) -> tuple[int, IntVec]:
    """Split ``w`` as ``g * w'`` with ``g > 0`` and ``w'`` primitive."""
    g = math.gcd(*w) if len(w) else 0
    if g == 0:
        raise ValueError("zero vector has no primitive part")
    return g, tuple(c // g for c in w)


def integral_primitive(w: Sequence) -> IntVec:
    """Primitive integer vector on the positive ray of a nonzero rational vector."""
    den = math.lcm(*(Fraction(c).denominator for c in w))
    return primitive_part([int(Fraction(c) * den) for c in w])[1]


def pair(a: Sequence, x: Sequence):
    return sum(ai * xi for ai, xi in zip(a, x))


# --- determinants, rank, kernels -------------------------------------------

def _bareiss_det(m: Matrix) -> int:
    a = [list(r) for r in m]
    n = len(a)
    if n == 0:
        return 1
    s, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    s = -s
                    break
            else:
                return 0
        piv = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * piv - aik * row_k[j]) // prev
        prev = piv
    return s * a[n - 1][n - 1]


def det(m: Sequence[Sequence]) -> Fraction | int:
    """Exact determinant; fraction-free elimination after clearing denominators."""
    rows = [list(r) for r in m]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    if all(isinstance(c, int) for r in rows for c in r):
        return _bareiss_det(rows)
    scale = Fraction(1)
    int_rows = []
    for r in rows:
        d = math.lcm(*(Fraction(c).denominator for c in r)) if r else 1
        scale /= d
        int_rows.append([int(Fraction(c) * d) for c in r])
    return Fraction(_bareiss_det(int_rows)) * scale


def det_forms(*forms: Sequence[int]) -> int:
    """Determinant of the forms' coordinate rows in the dual basis."""
    return det(forms)


def signdet(*forms: Sequence[int]) -> int:
    return sign(det(forms))


def rref(m: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    a = [[Fraction(c) for c in r] for r in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m: Sequence[Sequence]) -> int:
    if not m:
        return 0
    return len(rref(m)[1])


def kernel(m: Sequence[Sequence]) -> list[list[Fraction]]:
    """Basis of {x : m x = 0} over Q."""
    cols = len(m[0])
    a, pivots = rref(m)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * cols
        x[f] = Fraction(1)
        for i, p in enumerate(pivots):
            x[p] = -a[i][f]
        basis.append(x)
    return basis


def transpose(m: Sequence[Sequence]) -> Matrix:
    return [list(r) for r in zip(*m)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(r, c)) for c in bt] for r in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum(x * y for x, y in zip(r, v)) for r in a]


def minor(m: Sequence[Sequence], i: int, j: int) -> Matrix:
    return [list(r[:j]) + list(r[j + 1:]) for k, r in enumerate(m) if k != i]


def adjugate(m: Sequence[Sequence]) -> Matrix:
    """Classical adjoint, so that ``m @ adj(m) = det(m) * I``."""
    n = len(m)
    if n == 1:
        return [[1]]
    return [[(-1) ** (i + j) * det(minor(m, j, i)) for j in range(n)] for i in range(n)]


def inverse(m: Sequence[Sequence]) -> Matrix:
    n = len(m)
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(m)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [r[n:] for r in red[:n]]


# --- positive dual families --------------------------------------------------

@dataclass(frozen=True)
class DualFamilyResult:
    alphas: tuple[LatticeVector, ...]
    pairings: tuple[int, ...]
    epsilon: int

    def alpha_matrix(self) -> Matrix:
        """Matrix whose columns are the alpha vectors."""
        return transpose(self.alphas)


def positive_dual_family(*forms: Sequence[int]) -> DualFamilyResult:
    """Unique primitive family with a_j(alpha_j) > 0 and a_k(alpha_j) = 0 for k != j."""
    a = [list(f) for f in forms]
    n = len(a)
    d = det(a)
    if d == 0:
        raise DependentFormsError("not a basis of the dual space")
    s = sign(d)
    adj = adjugate(a)
    alphas, pairings = [], []
    for k in range(n):
        col = [s * adj[i][k] for i in range(n)]
        _, alpha = primitive_part(col)
        alphas.append(alpha)
        pairings.append(pair(a[k], alpha))
    return DualFamilyResult(tuple(alphas), tuple(pairings), sign((-1) ** n * d))


def complement_form(*forms: Sequence[int]) -> tuple[int, LatticeVector]:
    """Return (s, gamma) with det(a_1, ..., a_{n-1}, .) = s * gamma, gamma primitive, s > 0."""
    a = [list(f) for f in forms]
    n = len(a) + 1
    if any(len(f) != n for f in a):
        raise ValueError("need n-1 forms in dimension n")
    comps = []
    for k in range(n):
        fk = [int(i == k) for i in range(n)]
        comps.append(det(a + [fk]))
    if all(c == 0 for c in comps):
        raise DependentFormsError("forms are linearly dependent")
    return primitive_part(comps)


# --- relations among n+1 forms ----------------------------------------------

def standard_relation(*forms: Sequence) -> tuple[tuple[Fraction, ...], int]:
    """Normalized linear relation sum(lambda_j a_j) = 0 and its count of negative terms.

    The kernel must be one-dimensional.  Normalization: at most as many
    negative as positive coefficients; on a tie the first nonzero one is
    negative; the first nonzero coefficient has absolute value 1.
    """
    ker = kernel(transpose(forms))
    if not ker:
        raise ValueError("no relation")
    if len(ker) > 1:
        raise ValueError("relation not unique")
    lam = ker[0]
    neg = sum(1 for c in lam if c < 0)
    pos = sum(1 for c in lam if c > 0)
    first = next(c for c in lam if c != 0)
    if neg > pos or (neg == pos and first > 0):
        lam = [-c for c in lam]
        first = -first
    lam = [c / abs(first) for c in lam]
    return tuple(lam), sum(1 for c in lam if c < 0)


def bad_position(*forms: Sequence[int]) -> bool:
    n = len(forms[0])
    if len(forms) != n + 1 or rank(forms) != n:
        return False
    lam, kminus = standard_relation(*forms)
    return kminus == 0 and any(c == 0 for c in lam)


# --- V/L representatives and SL_n(Z) actions -------------------------------

def reduce_mod_lattice(v: Iterable) -> RatPoint:
    """Canonical representative of v in V/L, every coordinate in [0, 1)."""
    return tuple(Fraction(c) - math.floor(Fraction(c)) for c in v)


def act_vector(g: Sequence[Sequence[int]], alpha: Sequence) -> tuple:
    return tuple(matvec(g, alpha))


def act_form(g: Sequence[Sequence[int]], a: Sequence[int]) -> IntVec:
    ginv = inverse(g)
    return tuple(int(c) for c in matvec(transpose(ginv), a))


def random_sl(n: int, rng: random.Random, steps: int = 6, bound: int = 2) -> Matrix:
    """Random element of SL_n(Z) as a product of elementary matrices."""
    g = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = rng.choice([k for k in range(-bound, bound + 1) if k])
        e = [[int(r == s) for s in range(n)] for r in range(n)]
        e[i][j] = c
        g = matmul(g, e)
    return g


def ext_gcd_vector(w: Sequence[int]) -> IntVec:
    """Integer vector c with c . w = gcd(w)."""
    coeffs = [0] * len(w)
    g = 0
    for i, x in enumerate(w):
        if x == 0:
            continue
        if g == 0:
            g, coeffs[i] = abs(x), sign(x)
            continue
        # g = u*g + t*x via extended Euclid
        a, b = g, x
        u0, u1, t0, t1 = 1, 0, 0, 1
        while b:
            q = a // b
            a, b = b, a - q * b
            u0, u1 = u1, u0 - q * u1
            t0, t1 = t1, t0 - q * t1
        if a < 0:
            a, u0, t0 = -a, -u0, -t0
        coeffs = [c * u0 for c in coeffs]
        coeffs[i] = t0
        g = a
    return tuple(coeffs)
