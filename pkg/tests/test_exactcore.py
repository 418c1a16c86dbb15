import random
from fractions import Fraction

import pytest
import sympy
from sympy.combinatorics import Permutation
from hypothesis import given, settings, strategies as st

from geomgamma.exactcore import (
    DependentFormsError,
    act_form,
    act_vector,
    bad_position,
    complement_form,
    det,
    det_forms,
    ext_gcd_vector,
    inverse,
    kernel,
    pair,
    positive_dual_family,
    primitive_part,
    random_sl,
    reduce_mod_lattice,
    standard_relation,
)

ints = st.integers(-6, 6)


def square(n):
    return st.lists(st.lists(ints, min_size=n, max_size=n), min_size=n, max_size=n)


def gcd_all(v):
    g = 0
    for c in v:
        g = sympy.gcd(g, c)
    return int(g)


@pytest.mark.parametrize("w, expected", [
    ((2, 4, 6), (2, (1, 2, 3))),
    ((0, 0, 5), (5, (0, 0, 1))),
    ((3, -6), (3, (1, -2))),
])
def test_primitive_part_examples(w, expected):
    g, p = primitive_part(w)
    assert (g, tuple(p)) == expected


def test_primitive_part_zero():
    with pytest.raises(ValueError, match="zero vector"):
        primitive_part((0, 0))


@given(st.lists(ints, min_size=1, max_size=5).filter(any))
def test_primitive_part_property(w):
    g, p = primitive_part(w)
    assert g > 0 and gcd_all(p) == 1
    assert [g * c for c in p] == list(w)


def test_det_forms_examples():
    assert det_forms((1, 0), (0, 1)) == 1
    assert det_forms((0, 1), (1, 0)) == -1
    assert det_forms((1, 2), (1, 2)) == 0


@settings(max_examples=60)
@given(st.integers(1, 4).flatmap(square))
def test_det_and_inverse_match_sympy(m):
    ref = sympy.Matrix(m)
    assert det(m) == ref.det()
    if ref.det() != 0:
        inv = inverse(m)
        refinv = ref.inv()
        assert all(Fraction(inv[i][j]) == Fraction(str(refinv[i, j]))
                   for i in range(len(m)) for j in range(len(m)))


@settings(max_examples=40)
@given(square(3), st.integers(-5, 5), st.permutations(range(3)))
def test_det_alternating_multilinear(m, c, perm):
    d = det(m)
    scaled = [list(r) for r in m]
    scaled[0] = [c * x for x in scaled[0]]
    assert det(scaled) == c * d
    permuted = [m[i] for i in perm]
    sgn = Permutation(list(perm)).signature()
    assert det(permuted) == sgn * d


def test_positive_dual_family_standard_basis():
    for n in (1, 2, 3, 4):
        forms = [tuple(int(i == j) for j in range(n)) for i in range(n)]
        fam = positive_dual_family(*forms)
        assert [tuple(a) for a in fam.alphas] == forms
        assert fam.pairings == (1,) * n
        assert fam.epsilon == (-1) ** n


def check_dual_family(forms):
    fam = positive_dual_family(*forms)
    for j, a in enumerate(forms):
        for k, alpha in enumerate(fam.alphas):
            val = pair(a, alpha)
            if j == k:
                assert val == fam.pairings[j] > 0
            else:
                assert val == 0
    assert all(gcd_all(alpha) == 1 for alpha in fam.alphas)
    assert fam.epsilon == ((-1) ** len(forms)) * sympy.sign(sympy.Matrix(forms).det())


def test_positive_dual_family_quadratic_example():
    check_dual_family([(13, 122), (13, 8)])


@settings(max_examples=80)
@given(st.integers(2, 4).flatmap(square).filter(lambda m: sympy.Matrix(m).det() != 0))
def test_positive_dual_family_property(m):
    forms = [primitive_part(r)[1] for r in m]
    check_dual_family(forms)


def test_positive_dual_family_dependent():
    with pytest.raises(DependentFormsError, match="not a basis"):
        positive_dual_family((1, 0), (2, 0))


def test_complement_form_examples():
    s, gamma = complement_form((1, 0))
    # det(a_1, .) evaluated on the basis vectors
    assert (s, tuple(gamma)) == (1, (0, 1))
    assert det([(1, 0), (0, 1)]) > 0
    s, gamma = complement_form((1, 0, 0), (0, 1, 0))
    assert (s, tuple(gamma)) == (1, (0, 0, 1))
    with pytest.raises(DependentFormsError):
        complement_form((1, 0, 0), (2, 0, 0))


@settings(max_examples=50)
@given(st.lists(st.lists(ints, min_size=3, max_size=3), min_size=2, max_size=2),
       st.lists(ints, min_size=3, max_size=3))
def test_complement_form_property(forms, probe):
    if sympy.Matrix(forms).rank() < 2:
        return
    s, gamma = complement_form(*forms)
    assert s > 0 and gcd_all(gamma) == 1
    # det(a_1, a_2, x) = s * pair(x, gamma)
    assert det(forms + [probe]) == s * pair(probe, gamma)


@pytest.mark.parametrize("forms, lam, kminus", [
    (((1, 0), (0, 1), (-1, -1)), (1, 1, 1), 0),
    (((1, 0), (0, 1), (1, -1)), (-1, 1, 1), 1),
    (((1,), (2,)), (-1, Fraction(1, 2)), 1),
])
def test_standard_relation_examples(forms, lam, kminus):
    got, k = standard_relation(*forms)
    assert got == tuple(Fraction(x) for x in lam)
    assert k == kminus


def test_standard_relation_errors():
    with pytest.raises(ValueError, match="no relation"):
        standard_relation((1, 0), (0, 1))
    with pytest.raises(ValueError, match="relation not unique"):
        standard_relation((1, 0), (2, 0), (3, 0))


@settings(max_examples=60)
@given(st.lists(st.lists(ints, min_size=2, max_size=2), min_size=3, max_size=3),
       st.fractions(min_value=Fraction(1, 7), max_value=7))
def test_standard_relation_normalization_and_scaling(forms, c):
    if sympy.Matrix(forms).rank() != 2:
        return
    lam, k = standard_relation(*forms)
    assert all(sum(l * f[i] for l, f in zip(lam, forms)) == 0 for i in range(2))
    neg = sum(1 for x in lam if x < 0)
    pos = sum(1 for x in lam if x > 0)
    first = next(x for x in lam if x != 0)
    assert neg <= pos and abs(first) == 1 and k == neg
    if neg == pos:
        assert first < 0
    scaled = [[c * x for x in f] for f in forms]
    assert standard_relation(*scaled) == (lam, k)


def test_bad_position_examples():
    # the relation of (f1, 2f1, f2) normalizes to (-1, 1/2, 0), so k- = 1
    assert standard_relation((1, 0), (2, 0), (0, 1)) == ((-1, Fraction(1, 2), 0), 1)
    assert bad_position((1, 0), (2, 0), (0, 1)) is False
    assert bad_position((1, 0), (0, 1), (-1, -1)) is False
    assert bad_position((1, 0), (2, 0), (3, 0)) is False
    # all-nonnegative relation with a zero coefficient
    assert bad_position((1, 0), (-1, 0), (0, 1)) is True


def test_kernel_matches_sympy():
    rng = random.Random(3)
    for _ in range(30):
        m = [[rng.randint(-3, 3) for _ in range(4)] for _ in range(2)]
        ker = kernel(m)
        assert len(ker) == 4 - sympy.Matrix(m).rank()
        for v in ker:
            assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in m)


def test_sl_pairing_equivariance():
    rng = random.Random(11)
    for n in (2, 3, 4):
        for _ in range(20):
            g = random_sl(n, rng)
            assert det(g) == 1
            a = [rng.randint(-9, 9) for _ in range(n)]
            alpha = [rng.randint(-9, 9) for _ in range(n)]
            assert pair(act_form(g, a), act_vector(g, alpha)) == pair(a, alpha)


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=5).filter(any))
def test_ext_gcd_vector(w):
    c = ext_gcd_vector(w)
    assert sum(x * y for x, y in zip(c, w)) == gcd_all(w)


@given(st.lists(st.fractions(min_value=-20, max_value=20), min_size=1, max_size=4))
def test_reduce_mod_lattice(v):
    r = reduce_mod_lattice(v)
    assert all(0 <= x < 1 and (x - y).denominator == 1 for x, y in zip(r, v))
