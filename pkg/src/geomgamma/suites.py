"""Randomized verification suites shared by the command line and the test-suite."""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Any, Callable

import mpmath as mp

from . import bernoulli as bn
from . import conecalc as cc
from . import gammaeval as ge
from .exactcore import act_form, det, primitive_part, sign, standard_relation, transpose
from .numfield import NumberField
from .shintani import RayClassInput, signed_domain, verify_signed_domain_sampling

BUNDLED = {
    "quad": "quad_sqrt19_f13.json",
    "cubic1": "cubic1_f5.json",
    "cubic2": "cubic2_f1mz.json",
}


@dataclass
class SuiteResult:
    name: str
    cases: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(1 for c in self.cases if c["ok"])

    @property
    def total(self) -> int:
        return len(self.cases)

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def add(self, ok: bool, **info) -> None:
        self.cases.append({"ok": bool(ok), **info})


# --- configs ------------------------------------------------------------------

def parse_rational(x) -> Fraction:
    if isinstance(x, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise ValueError(f"cannot read {x!r} as an exact rational")


def load_bundled(name: str) -> dict:
    fname = BUNDLED.get(name, name)
    text = resources.files("geomgamma").joinpath("configs", fname).read_text()
    return json.loads(text)


def ray_class_input(cfg: dict) -> RayClassInput:
    K = NumberField([int(c) for c in cfg["field"]["minpoly"]])
    basis = [K.element([parse_rational(c) for c in row]) for row in cfg["lattice_basis"]]
    units = [K.element([parse_rational(c) for c in row]) for row in cfg["units"]]
    inp = RayClassInput(K, basis, units, {"name": cfg.get("name", "")})
    inp.validate()
    return inp


# --- random data ----------------------------------------------------------------

def random_form(rng: random.Random, n: int, bound: int = 4) -> tuple[int, ...]:
    while True:
        f = [rng.randint(-bound, bound) for _ in range(n)]
        if any(f):
            return primitive_part(f)[1]


def random_independent_forms(rng: random.Random, n: int, bound: int = 4,
                             max_size: int | None = None) -> list[tuple[int, ...]]:
    while True:
        forms = [random_form(rng, n, bound) for _ in range(n)]
        if det(forms) == 0:
            continue
        if max_size is not None and bn.parallelepiped_size(forms) > max_size:
            continue
        return forms


def random_point(rng: random.Random, n: int, den: int = 6) -> tuple[Fraction, ...]:
    return tuple(Fraction(rng.randrange(den), den) for _ in range(n))


def random_rational(rng: random.Random, bound: int = 10**6) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def random_assignment(rng: random.Random, n: int) -> bn.ValueAssignment:
    return bn.ValueAssignment(random_rational(rng), tuple(random_rational(rng) or Fraction(1) for _ in range(n)))


def _random_complex(rng: random.Random, scale: float = 1.0):
    return mp.mpc(rng.uniform(-scale, scale), rng.uniform(-scale, scale))


# --- suites ---------------------------------------------------------------------

def suite_modular(ns=(2, 3, 4), trials: int = 20, bits: int = 256, seed: int = 0,
                  fv_bits_target: int = 100) -> SuiteResult:
    """Theorem-style modular identity for geometric G at random admissible inputs."""
    res = SuiteResult("modular")
    rng = random.Random(seed)
    tol = mp.mpf(2) ** (-bits // 2)
    for n in ns:
        done = 0
        while done < trials:
            forms = random_independent_forms(rng, n, bound=2, max_size=12)
            # for n = 3 every other case sits at v = 0, the elliptic Gamma case
            v = (0,) * n if n == 3 and done % 2 == 0 else random_point(rng, n)
            w = _random_complex(rng)
            x = [_random_complex(rng) for _ in range(n)]
            try:
                r = ge.check_modular(forms, v, w, x, bits)
            except (ge.DomainError, ArithmeticError):
                # inadmissible draw: pole, real ratio or near-real period
                continue
            done += 1
            res.add(r < tol, kind="modular", n=n, forms=[list(f) for f in forms], v=[str(c) for c in v],
                    residual=mp.nstr(r, 5))
        if n == 3:
            # classical three-term identity for the elliptic Gamma function
            tol_fv = mp.mpf(2) ** (-fv_bits_target)
            for _ in range(trials):
                z = _random_complex(rng, 0.5)
                t = mp.mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.4, 1.2))
                s = mp.mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.4, 1.2))
                if abs(mp.im(s / t)) < 0.05:
                    continue
                r = ge.felder_varchenko_residual(z, t, s, bits)
                res.add(r < tol_fv, kind="felder_varchenko", n=3, residual=mp.nstr(r, 5))
    return res


def suite_distribution(Ns=(2, 3), rs=(0, 1, 2), bits: int = 256, seed: int = 0,
                       trials: int = 2) -> SuiteResult:
    res = SuiteResult("distribution")
    rng = random.Random(seed)
    tol = mp.mpf(2) ** (-bits // 2)
    for N, r in itertools.product(Ns, rs):
        for _ in range(trials):
            taus = [mp.mpc(rng.uniform(-0.5, 0.5), rng.choice([-1, 1]) * rng.uniform(0.5, 1.2)) for _ in range(r + 1)]
            z = _random_complex(rng, 0.5)
            res.add(ge.distribution_residual_z(N, z, taus, bits) < tol, kind="z", N=N, r=r)
            l = rng.randrange(r + 1)
            res.add(ge.distribution_residual_tau(N, z, taus, l, bits) < tol, kind="tau", N=N, r=r)
        n = r + 2
        forms = random_independent_forms(rng, n, bound=1, max_size=4)[: n - 1]
        while True:
            x = [_random_complex(rng) for _ in range(n)]
            try:
                val = ge.distribution_residual_geometric(N, forms, random_point(rng, n, 2), _random_complex(rng), x, bits)
                break
            except (ge.DomainError, ArithmeticError):
                continue
        res.add(val < tol, kind="geometric", N=N, r=r, residual=mp.nstr(val, 5))
    return res


def unit_matrix(inp: RayClassInput, u) -> list[list[int]]:
    """Multiplication by u in lattice coordinates (columns are images of e_k)."""
    cols = [[int(c) for c in inp.coords(u * e)] for e in inp.lattice_basis]
    return transpose(cols)


def random_unit(inp: RayClassInput, rng: random.Random):
    while True:
        exps = [rng.randint(-1, 1) for _ in inp.units]
        if any(exps):
            u = inp.field.one()
            for e, k in zip(inp.units, exps):
                u = u * e ** k
            return u, exps


def suite_cocycle(inp: RayClassInput, trials: int = 200, seed: int = 0) -> SuiteResult:
    """Alternating sums over unit-orbit families (a, u a, u^2 a, ..., u^n a) vanish exactly."""
    res = SuiteResult("cocycle")
    rng = random.Random(seed)
    n = inp.degree
    done = 0
    while done < trials:
        u, exps = random_unit(inp, rng)
        m = unit_matrix(inp, u)
        a = random_form(rng, n, 3)
        fam = [a]
        for _ in range(n):
            fam.append(primitive_part(act_form(m, fam[-1]))[1])
        v = random_point(rng, n, 5)
        try:
            s = bn.cocycle_sum(fam, v, random_assignment(rng, n))
        except bn.PoleError:
            continue
        done += 1
        res.add(s == 0, unit_exponents=exps, a=list(a), v=[str(c) for c in v], value=str(s))
    return res


KAPPA_TABLE = [
    # eps12, eps13, eps23, lambda signs, k-, kappa1, kappa2, kappa, delta
    ((1, 1, 1), (1, -1, 1), 1, 0, 0, 0, 0),
    ((1, 1, -1), (1, 1, -1), 1, 1, 0, 1, 1),
    ((1, -1, 1), (1, 1, 1), 0, -1, 1, 0, 0),
    ((1, -1, -1), (-1, 1, 1), 1, 0, 0, 0, 0),
    ((-1, 1, 1), (-1, 1, 1), 1, 1, 0, 1, 1),
    ((-1, 1, -1), (1, 1, 1), 0, 2, -1, 1, 1),
    ((-1, -1, 1), (1, 1, -1), 1, 0, 0, 0, 0),
    ((-1, -1, -1), (1, -1, 1), 1, 1, 0, 1, 1),
]


def kappa_row(l1, l2, l3) -> tuple:
    e12, e13, e23 = sign(det([l1, l2])), sign(det([l1, l3])), sign(det([l2, l3]))
    lam, km = standard_relation(l1, l2, l3)
    k1 = (1 - e12 - e23 + e13) // 2
    k2 = e12 * cc.q(km)
    return ((e12, e13, e23), tuple(sign(c) for c in lam), km, k1, k2, cc.kappa_sv(l1, l2, l3), cc.delta_sv(l1, l2, l3))


def _witness_triple(signs) -> tuple:
    vecs = [(x, y) for x in range(-2, 3) for y in range(-2, 3) if (x, y) != (0, 0)]
    for l1, l2, l3 in itertools.permutations(vecs, 3):
        if any(det([p, q]) == 0 for p, q in ((l1, l2), (l1, l3), (l2, l3))):
            continue
        if (sign(det([l1, l2])), sign(det([l1, l3])), sign(det([l2, l3]))) == signs:
            return l1, l2, l3
    raise LookupError(f"no witness for sign pattern {signs}")


def suite_kappa(trials: int = 1000, seed: int = 0) -> SuiteResult:
    res = SuiteResult("kappa")
    for row in KAPPA_TABLE:
        triple = _witness_triple(row[0])
        got = kappa_row(*triple)
        res.add(got == row and got[5] == got[6], kind="table", signs=list(row[0]),
                triple=[list(t) for t in triple])
    rng = random.Random(seed)
    done = 0
    while done < trials:
        t = [(rng.randint(-50, 50), rng.randint(-50, 50)) for _ in range(3)]
        if any(det([p, q]) == 0 for p, q in itertools.combinations(t, 2)):
            continue
        done += 1
        k, d = cc.kappa_sv(*t), cc.delta_sv(*t)
        res.add(k == d, kind="random", triple=[list(p) for p in t], kappa=k, delta=d)
    return res


def suite_sampling(inp: RayClassInput, trials: int = 100, seed: int = 1) -> SuiteResult:
    res = SuiteResult("sampling")
    dom = signed_domain(inp)
    for s in verify_signed_domain_sampling(inp, trials, seed, dom):
        res.add(s == 1, total=s)
    return res


def mutation_detected(inp: RayClassInput, trials: int = 100, seed: int = 1) -> bool:
    """Flip one boundary weight; the sampling identity must then fail somewhere."""
    dom = signed_domain(inp)
    weights = [b.w for b in dom.blocks]
    k = next(i for i, w in enumerate(weights) if w)
    weights[k] = -weights[k]
    sums = verify_signed_domain_sampling(inp, trials, seed, dom, weights)
    return any(s != 1 for s in sums)


def suite_oracle(ns=(2, 3, 4), trials: int = 100, seed: int = 0, max_size: int = 60) -> SuiteResult:
    """Closed-form h0 against the independent series expansion."""
    res = SuiteResult("oracle")
    rng = random.Random(seed)
    for n in ns:
        done = 0
        while done < trials:
            forms = random_independent_forms(rng, n, bound=3, max_size=max_size)
            if bn.box_volume(forms) > 20_000:
                continue
            v = random_point(rng, n, 4)
            assign = random_assignment(rng, n)
            try:
                a = bn.h0(forms, v, assign)
                b = bn.h0_series_oracle(forms, v, assign)
            except bn.PoleError:
                continue
            done += 1
            res.add(a == b, n=n, forms=[list(f) for f in forms], v=[str(c) for c in v])
    return res


def suite_counts(trials: int = 50, seed: int = 0, max_index: int = 20) -> SuiteResult:
    """|F(a, v)| equals the lattice index and the brute-force box scan."""
    res = SuiteResult("counts")
    rng = random.Random(seed)
    done = 0
    while done < trials:
        n = rng.choice([2, 3, 4])
        forms = random_independent_forms(rng, n, bound=3)
        idx = bn.parallelepiped_size(forms)
        if idx > max_index or bn.box_volume(forms) > 50_000:
            continue
        v = random_point(rng, n, 3)
        fast = sorted(bn.enum_parallelepiped(forms, v).points)
        slow = sorted(bn.brute_force_parallelepiped(forms, v))
        done += 1
        res.add(len(fast) == idx and fast == slow, n=n, index=idx)
    return res


SUITES: dict[str, Callable[..., Any]] = {
    "modular": suite_modular,
    "distribution": suite_distribution,
    "cocycle": suite_cocycle,
    "kappa": suite_kappa,
    "sampling": suite_sampling,
    "oracle": suite_oracle,
    "counts": suite_counts,
}
