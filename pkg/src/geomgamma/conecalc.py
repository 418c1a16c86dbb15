"""Indicator functions of dual-presented cones and their exact combinations."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exactcore import LinearForm, det, pair, rank, sign, standard_relation


@dataclass(frozen=True)
class HalfSpaceTerm:
    """[a(p) >= 0] (or [a(p) > 0] when strict); ``negated`` turns it into 1 - [...]."""

    form: LinearForm
    strict: bool = False
    negated: bool = False

    def __post_init__(self):
        if all(c == 0 for c in self.form):
            raise ValueError("zero linear form")

    def value(self, p: Sequence) -> int:
        t = pair(self.form, p)
        ind = int(t > 0) if self.strict else int(t >= 0)
        return 1 - ind if self.negated else ind


Term = tuple[Fraction, tuple[HalfSpaceTerm, ...]]


@dataclass(frozen=True)
class ConeExpr:
    """Formal Q-linear combination of products of half-space indicators."""

    terms: tuple[Term, ...]

    @staticmethod
    def constant(c) -> "ConeExpr":
        return ConeExpr(((Fraction(c), ()),))

    def __add__(self, other: "ConeExpr") -> "ConeExpr":
        return ConeExpr(self.terms + other.terms)

    def __neg__(self) -> "ConeExpr":
        return ConeExpr(tuple((-c, f) for c, f in self.terms))

    def __sub__(self, other: "ConeExpr") -> "ConeExpr":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, ConeExpr):
            return ConeExpr(tuple((c1 * c2, f1 + f2) for c1, f1 in self.terms for c2, f2 in other.terms))
        return ConeExpr(tuple((Fraction(other) * c, f) for c, f in self.terms))

    __rmul__ = __mul__

    def expand(self) -> "ConeExpr":
        """Rewrite every negated factor 1 - [a >= 0] as 1 - c(a); strict factors become negated ones."""
        out: list[Term] = []
        for coef, factors in self.terms:
            partial: list[Term] = [(coef, ())]
            for h in factors:
                if h.strict:
                    # [a > 0] = 1 - [-a >= 0]
                    h = HalfSpaceTerm(tuple(-c for c in h.form), False, not h.negated)
                plain = HalfSpaceTerm(h.form)
                if h.negated:
                    partial = [t for c, f in partial for t in ((c, f), (-c, f + (plain,)))]
                else:
                    partial = [(c, f + (plain,)) for c, f in partial]
            out.extend(partial)
        return ConeExpr(tuple(out))


def dual_cone(*forms: Sequence[int]) -> ConeExpr:
    """Indicator of {p : a_j(p) >= 0 for all j}; the empty family gives the constant 1."""
    return ConeExpr(((Fraction(1), tuple(HalfSpaceTerm(tuple(a)) for a in forms)),))


def open_half(form: Sequence[int]) -> ConeExpr:
    """Indicator of {a > 0}, stored as 1 - c(-a)."""
    return ConeExpr(((Fraction(1), (HalfSpaceTerm(tuple(-c for c in form), False, True),)),))


def evaluate(expr: ConeExpr, p: Sequence) -> Fraction:
    total = Fraction(0)
    for coef, factors in expr.terms:
        v = 1
        for h in factors:
            if not h.value(p):
                v = 0
                break
        total += coef * v
    return total


def eps_signs(*forms: Sequence[int]) -> list[int]:
    """eps_j = (-1)^j * sign det(a_0, ..., a_j omitted, ..., a_n)."""
    out = []
    for j in range(len(forms)):
        rest = [f for k, f in enumerate(forms) if k != j]
        out.append((-1) ** j * sign(det(rest)))
    return out


def cocycle_combo(*forms: Sequence[int]) -> ConeExpr:
    terms: list[Term] = []
    for j, e in enumerate(eps_signs(*forms)):
        rest = tuple(HalfSpaceTerm(tuple(f)) for k, f in enumerate(forms) if k != j)
        terms.append((Fraction(e), rest))
    return ConeExpr(tuple(terms))


# --- the planar kappa / delta comparison -----------------------------------

def q(k: int) -> int:
    return 1 if k == 0 else 0


def _check_general(l1, l2, l3) -> None:
    for u, v in ((l1, l2), (l2, l3), (l1, l3)):
        if u[0] * v[1] - u[1] * v[0] == 0:
            raise ValueError("not in general position")


def kappa_sv(l1: Sequence[int], l2: Sequence[int], l3: Sequence[int]) -> int:
    """Constant term of the alternating sum of planar theta-functions, from determinant signs."""
    _check_general(l1, l2, l3)
    e12 = sign(det([l1, l2]))
    e23 = sign(det([l2, l3]))
    e13 = sign(det([l1, l3]))
    _, kminus = standard_relation(tuple(l1), tuple(l2), tuple(l3))
    val = Fraction(1 - e12 - e23 + e13, 2) + e12 * q(kminus)
    if val.denominator != 1:
        raise ArithmeticError("non-integral kappa")
    return int(val)


def delta_sv(l1: Sequence[int], l2: Sequence[int], l3: Sequence[int]) -> int:
    """0 if l2 lies on the counterclockwise arc from l1 to l3, else 1."""
    _check_general(l1, l2, l3)

    def half(v) -> int:
        return 0 if det([l1, v]) > 0 else 1

    h2, h3 = half(l2), half(l3)
    first = h2 < h3 or (h2 == h3 and det([l2, l3]) > 0)
    return 0 if first else 1


def relation_counts(forms: Iterable[Sequence[int]]) -> tuple[int, int, int]:
    """(k-, k0, k+) of the standard relation."""
    lam, kminus = standard_relation(*forms)
    k0 = sum(1 for c in lam if c == 0)
    return kminus, k0, len(lam) - kminus - k0


def spans(forms: Sequence[Sequence[int]]) -> bool:
    return rank(forms) == len(forms[0])
