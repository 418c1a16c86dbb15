"""Acceptance criteria 1-13, one test each.

Every test records a PASS/FAIL line in ``RESULTS``; conftest prints them in
the terminal summary so they appear in plain ``pytest -v`` output too.
"""

import time
from fractions import Fraction

import mpmath as mp
import pytest

from geomgamma import bernoulli as bn
from geomgamma import cli, suites
from geomgamma import gammaeval as ge
from geomgamma import shintani as sh
from geomgamma.exactcore import signdet

RESULTS: dict[int, str] = {}


def record(k: int, ok: bool, detail: str) -> None:
    line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'} | {detail}"
    RESULTS[k] = line
    print(line)


def timed(fn, *args, **kw):
    t = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t


def nf(inp, *coeffs):
    return inp.field.element([Fraction(c) for c in coeffs])


def test_criterion_01_quadratic_zeta():
    cfg = suites.load_bundled("quad")
    payload, dt = timed(cli.zeta_payload, cfg, 2 ** 14)
    ok = payload["zeta"] == "33/52" and payload["zeta_quadratic_route"] == "33/52" and dt < 1
    record(1, ok, f"zeta={payload['zeta']} two-cone route={payload['zeta_quadratic_route']} in {dt:.2f}s (limit 1s)")
    assert ok


def test_criterion_02_cubic1_zeta():
    (inp, rep), dt = timed(lambda: (lambda i: (i, sh.zeta_report(i)))(suites.ray_class_input(suites.load_bundled("cubic1"))))
    e1 = nf(inp, Fraction(-1424, 120), Fraction(-4525, 120), Fraction(1975, 120))
    e2 = nf(inp, Fraction(1448, 120), Fraction(4525, 120), Fraction(-1975, 120))
    # R_1 carries the sign nu_Id = -1 in front of the sum, so the block element is E_Id itself
    ok = (rep.value == Fraction(1, 5)
          and rep.traces == {"Id": Fraction(4489, 60), "(12)": Fraction(-4453, 60)}
          and rep.elements == {"Id": e1, "(12)": e2} and dt < 5)
    record(2, ok, f"zeta={rep.value} R={ {k: str(v) for k, v in rep.traces.items()} } elements exact={rep.elements == {'Id': e1, '(12)': e2}} in {dt:.2f}s")
    assert ok


def test_criterion_03_cubic2_zeta():
    (inp, rep), dt = timed(lambda: (lambda i: (i, sh.zeta_report(i)))(suites.ray_class_input(suites.load_bundled("cubic2"))))
    ok = rep.value == Fraction(2, 3) and rep.traces == {"Id": 3, "(12)": -1} and dt < 5
    record(3, ok, f"zeta={rep.value} R={ {k: str(v) for k, v in rep.traces.items()} } in {dt:.2f}s")
    assert ok


def test_criterion_04_signed_domain_tables(cubic1, cubic2):
    d1, d2 = sh.signed_domain(cubic1), sh.signed_domain(cubic2)
    i1, s1 = d1.block("Id"), d1.block("(12)")
    i2, s2 = d2.block("Id"), d2.block("(12)")
    ok = (i1.mu == [-1, 1, -1] and s1.mu == [1, -1, 1] and i1.w == s1.w == 1
          and (i1.nu, s1.nu) == (-1, 1) and (i2.nu, s2.nu) == (1, -1))
    record(4, ok, f"cubic1 mu={i1.mu}/{s1.mu} w={i1.w},{s1.w} nu={i1.nu},{s1.nu}; cubic2 nu={i2.nu},{s2.nu}")
    assert ok


@pytest.mark.slow
def test_criterion_05_unit_orbit_cocycle(cubic1):
    res, dt = timed(suites.suite_cocycle, cubic1, trials=200, seed=0)
    ok = res.total == 200 and res.ok
    record(5, ok, f"{res.passed}/{res.total} alternating sums exactly 0 in {dt:.0f}s")
    assert ok


def test_criterion_06_prop_cocycle_value():
    rng_assign = bn.ValueAssignment(Fraction(2, 7), (Fraction(3), Fraction(-5, 2), Fraction(7, 4)))
    values = {}
    for n in (2, 3):
        fam = [tuple(int(i == j) for j in range(n)) for i in range(n)] + [(-1,) * n]
        a = bn.ValueAssignment(rng_assign.w, rng_assign.x[:n])
        values[n] = (bn.cocycle_sum(fam, (0,) * n, a), bn.cocycle_sum(fam, (Fraction(1, 3),) * n, a),
                     signdet(*fam[1:]))
    # the criterion asks for +1 at v in L for both n; the proposition's signdet(a_1..a_n) is -1 at n = 3
    ok = all(v0 == 1 and v3 == 0 for v0, v3, _ in values.values())
    detail = "; ".join(f"n={n}: v=0 -> {v0}, v=1/3 -> {v3}, signdet(a_1..a_n)={sd}"
                       for n, (v0, v3, sd) in values.items())
    record(6, ok, detail + ("" if ok else " (stated +1 is unattainable at n=3, see decisions ledger)"))
    assert ok


def test_criterion_07_oracle_equivalence():
    res, dt = timed(suites.suite_oracle, ns=(2, 3, 4), trials=100, seed=0)
    ok = res.total == 300 and res.ok
    record(7, ok, f"{res.passed}/{res.total} exact agreements in {dt:.0f}s")
    assert ok


def test_criterion_08_kappa_table():
    res = suites.suite_kappa(trials=1000, seed=0)
    table = [c for c in res.cases if c["kind"] == "table"]
    ok = len(table) == 8 and res.total == 1008 and res.ok
    record(8, ok, f"{sum(c['ok'] for c in table)}/8 table rows, {res.passed - sum(c['ok'] for c in table)}/1000 random triples")
    assert ok


@pytest.mark.slow
def test_criterion_09_modularity():
    res, dt = timed(suites.suite_modular, ns=(2, 3, 4), trials=20, bits=256, seed=0)
    mod = [c for c in res.cases if c.get("kind", "modular") == "modular"]
    fv = [c for c in res.cases if c.get("kind") == "felder_varchenko"]
    ok = res.ok and len(mod) == 60 and len(fv) > 0 and dt < 120
    record(9, ok, f"{sum(c['ok'] for c in mod)}/{len(mod)} modular (<2^-128), "
                  f"{sum(c['ok'] for c in fv)}/{len(fv)} Felder-Varchenko (<2^-100) in {dt:.0f}s (limit 120s)")
    assert ok


@pytest.mark.slow
def test_criterion_10_distribution():
    res, dt = timed(suites.suite_distribution, Ns=(2, 3), rs=(0, 1, 2), bits=256, seed=0)
    kinds = sorted({c["kind"] for c in res.cases})
    ok = res.ok and dt < 120 and kinds == ["geometric", "tau", "z"]
    record(10, ok, f"{res.passed}/{res.total} residuals < 2^-128 over kinds {kinds} in {dt:.0f}s (limit 120s)")
    assert ok


@pytest.mark.slow
def test_criterion_11_quartic_unit():
    bits = cli.digits_to_bits(60)
    res, dt = timed(ge.quartic_unit_example, bits)
    ok = res.digits >= 8 and res.poly_residual < mp.mpf(10) ** -20 and dt < 300
    record(11, ok, f"value {mp.nstr(res.value, 12)}, {res.digits} matching digits, "
                   f"|P| = {mp.nstr(res.poly_residual, 3)} in {dt:.0f}s (limit 300s)")
    assert ok


def test_criterion_12_sampling():
    parts, ok = [], True
    for name in ("quad", "cubic1", "cubic2"):
        inp = suites.ray_class_input(suites.load_bundled(name))
        res = suites.suite_sampling(inp, trials=100, seed=1)
        mutated = suites.mutation_detected(inp, trials=100, seed=1)
        ok = ok and res.total == 100 and res.ok and mutated
        parts.append(f"{name} {res.passed}/{res.total} mutation {'caught' if mutated else 'MISSED'}")
    record(12, ok, ", ".join(parts))
    assert ok


def test_criterion_13_parallelepiped_counts():
    res = suites.suite_counts(trials=50, seed=0, max_index=20)
    ok = res.total == 50 and res.ok
    record(13, ok, f"{res.passed}/{res.total} enumerations match index and box scan")
    assert ok
