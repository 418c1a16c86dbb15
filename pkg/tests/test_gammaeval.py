import itertools
import math
import random
from fractions import Fraction

import mpmath as mp
import pytest

from geomgamma import gammaeval as ge
from geomgamma.bernoulli import PoleError
from geomgamma.exactcore import act_form, act_vector, complement_form, ext_gcd_vector, inverse, pair, random_sl

PREC = 128


@pytest.fixture(autouse=True)
def high_ambient_precision():
    # input arithmetic such as z + 1 must not round at 53 bits
    with mp.workprec(2 * PREC):
        yield


def tol(bits):
    return mp.mpf(2) ** (-bits)


def rand_tau(rng, lo=0.3, hi=1.4, allow_lower=True):
    s = -1 if allow_lower and rng.random() < 0.4 else 1
    return mp.mpc(rng.uniform(-1, 1), s * rng.uniform(lo, hi))


def rand_z(rng, scale=1.0):
    return mp.mpc(rng.uniform(-scale, scale), rng.uniform(-scale, scale))


def naive_G(z, taus, cutoff_bits=100):
    """Truncated defining product; all tau must lie in the upper half plane."""
    r = len(taus) - 1
    with mp.workprec(cutoff_bits + 40):
        z = mp.mpc(z)
        taus = [mp.mpc(t) for t in taus]
        ymin = min(mp.im(t) for t in taus)
        M = int((cutoff_bits + 10 + 2 * abs(mp.im(z)) * 10) / (2 * mp.pi * ymin * 1.4427)) + 3
        val = mp.mpc(1)
        for m in itertools.product(range(M), repeat=r + 1):
            s1 = sum((mj + 1) * t for mj, t in zip(m, taus))
            s0 = sum(mj * t for mj, t in zip(m, taus))
            f = (1 - mp.expjpi(2 * (s1 - z))) * (1 - mp.expjpi(2 * (z + s0))) ** ((-1) ** r)
            val *= f
        return val


def close(a, b, bits):
    return abs(a / b - 1) < tol(bits)


@pytest.mark.parametrize("r", [0, 1, 2])
def test_against_naive_product(r):
    rng = random.Random(40 + r)
    for _ in range(4):
        taus = [mp.mpc(rng.uniform(-1, 1), rng.uniform(0.9, 1.5)) for _ in range(r + 1)]
        z = mp.mpc(rng.uniform(-1, 1), rng.uniform(-0.4, 0.4))
        assert close(ge.G_r(z, taus, 96), naive_G(z, taus, 80), 70)


def test_G0_is_theta_and_G1_is_gamma():
    rng = random.Random(1)
    for _ in range(10):
        z, t, s = rand_z(rng), rand_tau(rng), rand_tau(rng)
        assert close(ge.G_r(z, [t], PREC), ge.theta(z, t, PREC), PREC - 16)
        assert close(ge.G_r(z, [t, s], PREC), ge.elliptic_gamma(z, t, s, PREC), PREC - 16)


def test_theta_relations():
    rng = random.Random(2)
    for _ in range(10):
        z, t = rand_z(rng), rand_tau(rng, allow_lower=False)
        th = ge.theta(z, t, PREC)
        assert close(ge.theta(z + 1, t, PREC), th, PREC - 16)
        assert close(ge.theta(z, t + 1, PREC), th, PREC - 16)
        with mp.workprec(PREC + 20):
            assert close(ge.theta(z + t, t, PREC), -mp.expjpi(-2 * z) * th, PREC - 16)
        assert ge.theta_modular_residual(z, t, PREC) < tol(PREC - 20)


def test_P2_constant_term():
    tau = mp.mpc(0.3, 0.8)
    with mp.workprec(PREC):
        assert abs(ge.P2(0, tau) - (-tau / 4 + (tau ** 2 + 1) / 12)) < tol(PREC - 4)


def test_P2_printed_constant_breaks_modularity():
    # with (tau^2 - 1)/12 the modular relation is off by exp(-2 pi i / (6 tau))
    rng = random.Random(3)
    z, t = rand_z(rng), mp.mpc(0.2, 0.9)
    with mp.workprec(PREC + 20):
        lhs = ge.theta(z / t, -1 / t, PREC)
        bad = ge.P2(z, t) - mp.mpf(2) / 12
        rhs = ge.theta(z, t, PREC) * mp.exp(2j * mp.pi * bad / t)
        assert abs(lhs / rhs - 1) > 0.1


def test_elliptic_gamma_relations():
    rng = random.Random(4)
    for _ in range(8):
        z, t, s = rand_z(rng), rand_tau(rng), rand_tau(rng)
        g = ge.elliptic_gamma(z, t, s, PREC)
        assert close(ge.elliptic_gamma(z, s, t, PREC), g, PREC - 16)
        assert close(ge.elliptic_gamma(z + t, t, s, PREC), ge.theta(z, s, PREC) * g, PREC - 20)
        assert abs(ge.elliptic_gamma(z + t + s, t, s, PREC) * ge.elliptic_gamma(-z, t, s, PREC) - 1) < tol(PREC - 20)


def test_felder_varchenko():
    rng = random.Random(5)
    for _ in range(5):
        z = rand_z(rng, 0.5)
        t = mp.mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.6, 1.2))
        s = mp.mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.6, 1.2))
        assert ge.felder_varchenko_residual(z, t, s, PREC) < tol(PREC - 20)


@pytest.mark.parametrize("r", [0, 1, 2, 3])
def test_Gr_functional_equations(r):
    rng = random.Random(10 + r)
    for _ in range(5):
        taus = [rand_tau(rng) for _ in range(r + 1)]
        z = rand_z(rng)
        g = ge.G_r(z, taus, PREC)
        assert close(ge.G_r(z + 1, taus, PREC), g, PREC - 20)
        j = rng.randrange(r + 1)
        shifted = list(taus)
        shifted[j] += 1
        assert close(ge.G_r(z, shifted, PREC), g, PREC - 20)
        assert abs(ge.G_r(-z, [-t for t in taus], PREC) * g - 1) < tol(PREC - 20)
        with mp.workprec(PREC + 20):
            refl = ge.G_r(z + mp.fsum(taus), taus, PREC)
            assert close(refl, ge.G_r(-z, taus, PREC) ** ((-1) ** r), PREC - 20)
        if r >= 1:
            rest = [t for k, t in enumerate(taus) if k != j]
            lhs = ge.G_r(z + taus[j], taus, PREC)
            assert close(lhs, ge.G_r(z, rest, PREC) * g, PREC - 20)


def test_Gr_against_expsum():
    rng = random.Random(6)
    done = 0
    while done < 100:
        r = done % 3
        taus = [rand_tau(rng, 0.4, 1.2) for _ in range(r + 1)]
        z = rand_z(rng)
        with mp.workprec(PREC):
            u = 2 * z - mp.fsum(taus)
            c = mp.fsum(abs(mp.im(t)) for t in taus) - abs(mp.im(u))
        if c < 0.3:
            continue
        a = ge.G_r(z, taus, PREC)
        b = ge.G_r_expsum(z, taus, PREC)
        assert abs(a / b - 1) < tol(PREC - 16)
        done += 1


def test_expsum_domain_error():
    with pytest.raises(ge.DomainError, match="outside exp-sum domain"):
        ge.G_r_expsum(mp.mpc(0, 5), [mp.mpc(0, 1)], PREC)
    with pytest.raises(ge.DomainError):
        ge.G_r_expsum(0.1, [mp.mpf(1)], PREC)


def test_real_tau_rejected():
    with pytest.raises(ge.DomainError):
        ge.theta(0.2, 0.5)


def test_pole_guard():
    with pytest.raises(PoleError):
        ge.G_r(0, [mp.mpc(0.1, 1), mp.mpc(0.2, 0.7)], PREC)


def test_precision_doubling():
    rng = random.Random(7)
    z, taus = rand_z(rng), [rand_tau(rng) for _ in range(3)]
    lo, hi = ge.G_r(z, taus, 100), ge.G_r(z, taus, 200)
    assert abs(lo / hi - 1) < tol(90)


def test_low_precision_rejected():
    with pytest.raises(ValueError):
        ge.G_r(0.1, [1j], 16)


# --- geometric families -------------------------------------------------------

def rand_x(rng, n):
    return [mp.mpc(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(n)]


def xval(x, vec):
    return mp.fsum(xk * (mp.mpf(Fraction(c).numerator) / Fraction(c).denominator) for xk, c in zip(x, vec))


def test_geometric_dependent_is_one():
    x = [mp.mpc(0.3, 1), mp.mpc(1, -0.2), mp.mpc(0.5, 0.5)]
    assert ge.geometric_G([(1, 2, 0), (2, 4, 0)], (0, 0, 0), 0.1, x) == 1


def test_geometric_rank2_is_theta_with_unit_alpha():
    # any beta with a(beta) = 1 is an admissible alpha; F then has one point
    rng = random.Random(8)
    checked = 0
    while checked < 10:
        a = (rng.randint(-5, 5), rng.randint(-5, 5))
        if a == (0, 0) or math.gcd(*a) != 1:
            continue
        x = rand_x(rng, 2)
        w = rand_z(rng)
        v = (Fraction(rng.randrange(4), 4), Fraction(rng.randrange(3), 3))
        _, gamma = complement_form(a)
        beta = ext_gcd_vector(a)
        assert pair(a, beta) == 1
        t = pair(a, v)
        k = -int(mp.floor(t))  # shift v so that 0 <= a(delta) < 1
        delta = tuple(vi + k * bi for vi, bi in zip(v, beta))
        with mp.workprec(PREC + 20):
            xg = xval(x, gamma)
            tau = xval(x, beta) / xg
            if abs(mp.im(tau)) < 0.05:
                continue
            expected = ge.theta((w + xval(x, delta)) / xg, tau, PREC)
        got = ge.geometric_G([a], v, w, x, PREC)
        assert close(got, expected, PREC - 24)
        checked += 1


def test_geometric_outside_U():
    # x(gamma) = 0 for gamma = e_2
    with pytest.raises(ge.DomainError, match="outside U"):
        ge.geometric_G([(1, 0)], (0, 0), 0.1, [mp.mpc(0, 1), mp.mpc(0)], PREC)
    # real ratio x(alpha)/x(gamma)
    with pytest.raises(ge.DomainError, match="outside U"):
        ge.geometric_G([(1, 0)], (0, 0), 0.1, [mp.mpf(1), mp.mpf(2)], PREC)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_geometric_equivariance(n):
    rng = random.Random(50 + n)
    done = 0
    while done < 3:
        forms = [tuple(rng.randint(-2, 2) for _ in range(n)) for _ in range(n - 1)]
        if any(not any(f) for f in forms):
            continue
        v = tuple(Fraction(rng.randrange(3), 3) for _ in range(n))
        x = rand_x(rng, n)
        w = rand_z(rng)
        g = random_sl(n, rng, steps=3, bound=1)
        ginv = inverse(g)
        gx = [mp.fsum(ginv[i][k] * x[i] for i in range(n)) for k in range(n)]
        try:
            base = ge.geometric_G(forms, v, w, x, PREC)
            moved = ge.geometric_G([act_form(g, a) for a in forms], act_vector(g, v), w, gx, PREC)
        except (ge.DomainError, ArithmeticError):
            continue
        assert close(moved, base, PREC - 30)
        done += 1


@pytest.mark.parametrize("n", [2, 3])
def test_modular_identity_examples(n):
    rng = random.Random(60 + n)
    done = 0
    while done < 3:
        forms = [tuple(rng.randint(-2, 2) for _ in range(n)) for _ in range(n)]
        try:
            res = ge.check_modular(forms, (0,) * n, rand_z(rng), rand_x(rng, n), PREC)
        except (ge.DomainError, ArithmeticError, ValueError):
            continue
        assert res < tol(PREC // 2)
        done += 1


def test_modular_needs_independent_forms():
    with pytest.raises(ValueError):
        ge.check_modular([(1, 0), (2, 0)], (0, 0), 0.1, [1j, 1])


def test_distribution_examples():
    assert ge.check_distribution("z", 2, {"z": mp.mpc(0.1, 0.2), "taus": [mp.mpc(0.2, 0.9)]}, PREC) < tol(PREC // 2)
    args = {"z": mp.mpc(0.1, 0.2), "taus": [mp.mpc(0.2, 0.9), mp.mpc(-0.3, 1.1)], "l": 1}
    assert ge.check_distribution("tau", 2, args, PREC) < tol(PREC // 2)
    geo = {"forms": [(1, 0, 1), (0, 1, -1)], "v": (Fraction(1, 2), 0, 0), "w": mp.mpc(0.2, 0.1),
           "x": [mp.mpc(0.3, 1.1), mp.mpc(-0.7, 0.4), mp.mpc(1.2, -0.5)]}
    assert ge.check_distribution("geometric", 2, geo, PREC) < tol(PREC // 2)
    with pytest.raises(ValueError):
        ge.check_distribution("z", 1, {}, PREC)


def test_unit_polynomial_is_palindromic():
    assert ge.UNIT_POLY == tuple(reversed(ge.UNIT_POLY))


def test_near_real_tau_fails_fast():
    # an iteration cap error instead of an unbounded evaluation
    with pytest.raises(ArithmeticError):
        ge.G_r(mp.mpc(0.1, 0.3), [mp.mpc(0.3, 1e-9), mp.mpc(0.2, 1e-9)], PREC)
