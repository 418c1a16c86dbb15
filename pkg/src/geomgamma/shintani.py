"""Signed fundamental domains and exact partial zeta values at s = 0.

The cones are generated by products of fundamental totally positive units;
their geometric Bernoulli functions are evaluated once over the number field
itself (x(e_k) = -e_k) and the zeta value is the trace of the result divided
by the degree.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

from .bernoulli import ValueAssignment, geometric_bernoulli, h0
from .exactcore import (
    LinearForm,
    det,
    integral_primitive,
    inverse,
    matvec,
    positive_dual_family,
    rank,
    reduce_mod_lattice,
    sign,
    signdet,
    transpose,
)
from .numfield import (
    NFElement,
    NumberField,
    SignUndecidableError,
    embed_interval,
    interval_det,
    is_totally_positive,
)


class ValidationError(ValueError):
    pass


class SamplingError(RuntimeError):
    pass


def perm_sign(p: Sequence[int]) -> int:
    s, seen = 1, set()
    for i in range(len(p)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = p[j]
            length += 1
        if length % 2 == 0:
            s = -s
    return s


def perm_label(p: Sequence[int]) -> str:
    """Cycle notation with 1-based points, 'Id' for the identity."""
    seen, cycles = set(), []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            seen.add(i)
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j + 1)
            j = p[j]
        cycles.append("(" + "".join(str(c) for c in cyc) + ")")
    return "".join(cycles) or "Id"


@dataclass
class RayClassInput:
    field: NumberField
    lattice_basis: list[NFElement]
    units: list[NFElement]
    label: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        n = self.field.degree
        self._bmat = [[self.lattice_basis[j].coeffs[i] for j in range(n)] for i in range(n)]
        if len(self.lattice_basis) != n or det(self._bmat) == 0:
            raise ValidationError("lattice basis must be n linearly independent elements")
        self._binv = inverse(self._bmat)

    @property
    def degree(self) -> int:
        return self.field.degree

    def coords(self, x: NFElement) -> list[Fraction]:
        """Coordinates of a field element in the lattice basis."""
        return matvec(self._binv, x.coeffs)

    def from_coords(self, c: Sequence) -> NFElement:
        return self.field.element(matvec(self._bmat, c))

    def validate(self) -> None:
        f = self.field
        if not f.is_totally_real():
            raise ValidationError("field is not totally real")
        if len(self.units) != f.degree - 1:
            raise ValidationError(f"need {f.degree - 1} units, got {len(self.units)}")
        for e in self.lattice_basis:
            if not is_totally_positive(e):
                raise ValidationError(
                    f"lattice basis element {e} is not totally positive; "
                    "replace it by a totally positive basis of the same lattice"
                )
        for u in self.units:
            if not is_totally_positive(u):
                raise ValidationError(f"unit {u} is not totally positive")
            # u L = L, checked in both directions
            for e in self.lattice_basis:
                for c in self.coords(u * e):
                    if c.denominator != 1:
                        raise ValidationError(f"unit {u} does not stabilize the lattice")
                for c in self.coords(u.inverse() * e):
                    if c.denominator != 1:
                        raise ValidationError(f"unit {u} is not a unit of the lattice stabilizer")

    def one_class(self) -> tuple[Fraction, ...]:
        """Canonical representative of 1 in V/L."""
        return reduce_mod_lattice(self.coords(self.field.one()))


@dataclass
class RhoData:
    rho: tuple[int, ...]
    label: str
    f: list[NFElement]
    in_S: bool
    mu: list[int] = dc_field(default_factory=list)
    b: list[list[Fraction]] = dc_field(default_factory=list)
    a: list[LinearForm] = dc_field(default_factory=list)
    det_sign: int = 0
    w: int = 0
    nu: int = 0

    @property
    def I(self) -> list[int]:
        return [i + 1 for i, m in enumerate(self.mu) if m > 0]

    @property
    def J(self) -> list[int]:
        return [i + 1 for i, m in enumerate(self.mu) if m < 0]


@dataclass
class SignedDomain:
    input: RayClassInput
    blocks: list[RhoData]
    global_sign: int

    def block(self, label: str) -> RhoData:
        return next(b for b in self.blocks if b.label == label)


def _unit_products(inp: RayClassInput, rho: Sequence[int]) -> list[NFElement]:
    f = [inp.field.one()]
    for j in range(inp.degree - 1):
        f.append(f[-1] * inp.units[rho[j]])
    return f


def _signs_of_embedded_dets(f: list[NFElement], field: NumberField, max_bits: int) -> tuple[int, list[int]]:
    """Exact signs of det(sigma(f)) and of each cofactor along the last embedding row."""
    emb = field.real_embeddings()
    n = len(f)
    bits = max(32, max(s.precision_bits for s in emb))
    while True:
        for s in emb:
            s.refine(bits)
        m = [[embed_interval(fi, s) for fi in f] for s in emb]
        full = interval_det(m).sign()
        cof = []
        for i in range(n):
            minor = [row[:i] + row[i + 1:] for row in m[:-1]]
            d = interval_det(minor) if n > 1 else None
            cs = d.sign() if d is not None else 1
            cof.append(None if cs is None else cs * (-1) ** (n - 1 + i))
        if full is not None and all(c is not None for c in cof):
            return full, cof
        if bits > max_bits:
            raise SignUndecidableError("sign undecidable at max precision")
        bits *= 2


def _structure(inp: RayClassInput, max_sign_bits: int) -> list[RhoData]:
    n = inp.degree
    blocks = []
    for rho in itertools.permutations(range(n - 1)):
        f = _unit_products(inp, rho)
        fc = [inp.coords(x) for x in f]
        data = RhoData(rho, perm_label(rho), f, rank(fc) == n)
        if data.in_S:
            dsign, cof = _signs_of_embedded_dets(f, inp.field, max_sign_bits)
            if 0 in cof:
                # a generator lies on the distinguished hyperplane; the recipe needs a nonzero cofactor
                raise SignUndecidableError("degenerate cone: vanishing cofactor")
            data.det_sign = dsign
            data.mu = [c * dsign for c in cof]
            data.b = inverse(transpose(fc))
            data.a = [integral_primitive([m * c for c in row]) for m, row in zip(data.mu, data.b)]
        blocks.append(data)
    return blocks


def _in_cone(block: RhoData, y: Sequence[Fraction]) -> bool:
    for m, row in zip(block.mu, block.b):
        t = sum(c * yk for c, yk in zip(row, y))
        if t < 0 or (t == 0 and m < 0):
            return False
    return True


def _unit_powers(inp: RayClassInput, exps: Sequence[int]) -> NFElement:
    u = inp.field.one()
    for e, k in zip(inp.units, exps):
        if k:
            u = u * e ** k
    return u


def _membership_weights(inp: RayClassInput, blocks: list[RhoData], p: NFElement, box: int,
                        weights: Sequence[int]) -> tuple[int, int]:
    """Weighted count over the exponent box, and the part coming from its outer shell."""
    total = shell = 0
    for exps in itertools.product(range(-box, box + 1), repeat=inp.degree - 1):
        y = inp.coords(_unit_powers(inp, exps) * p)
        c = sum(w for b, w in zip(blocks, weights) if b.in_S and _in_cone(b, y))
        total += c
        if max(abs(e) for e in exps) == box:
            shell += abs(c) if c else sum(1 for b in blocks if b.in_S and _in_cone(b, y))
    return total, shell


def sampling_sum(inp: RayClassInput, blocks: list[RhoData], p: NFElement, weights: Sequence[int],
                 max_box: int = 12) -> int:
    """Sum over rho and units of w_rho [u p in C_rho], growing the exponent box until stable."""
    prev = None
    for box in range(1, max_box + 1):
        total, shell = _membership_weights(inp, blocks, p, box, weights)
        if shell == 0 and prev == total:
            return total
        prev = total
    raise SamplingError("increase unit box")


def _random_totally_positive(inp: RayClassInput, rng: random.Random) -> NFElement:
    n = inp.degree
    while True:
        c = [Fraction(rng.randint(-40, 40), rng.randint(1, 9)) for _ in range(n)]
        x = inp.field.element(c)
        if not x.is_zero() and is_totally_positive(x):
            return x


def signed_domain(inp: RayClassInput, max_sign_bits: int = 2**14, witness_seed: int = 0) -> SignedDomain:
    """Cones, boundary signs, dual forms and weights of the signed fundamental domain."""
    blocks = _structure(inp, max_sign_bits)
    raw = [b.det_sign * perm_sign(b.rho) if b.in_S else 0 for b in blocks]
    witness = _random_totally_positive(inp, random.Random(witness_seed))
    s0 = sampling_sum(inp, blocks, witness, raw)
    if s0 not in (1, -1):
        raise SamplingError(f"weights do not normalize at the witness point (sum {s0})")
    for b, r in zip(blocks, raw):
        b.w = s0 * r
        if b.in_S:
            b.nu = b.w * (-1) ** len(b.J) * signdet(*b.a)
    return SignedDomain(inp, blocks, s0)


def verify_signed_domain_sampling(inp: RayClassInput, trials: int = 100, seed: int = 1,
                                  domain: SignedDomain | None = None,
                                  weights: Sequence[int] | None = None) -> list[int]:
    """Weighted membership sums at random totally positive points (all 1 when the domain is right)."""
    domain = domain or signed_domain(inp)
    w = list(weights) if weights is not None else [b.w for b in domain.blocks]
    rng = random.Random(seed)
    return [sampling_sum(inp, domain.blocks, _random_totally_positive(inp, rng), w) for _ in range(trials)]


def _zeta_assignment(inp: RayClassInput) -> ValueAssignment:
    return ValueAssignment(inp.field.zero(), tuple(-e for e in inp.lattice_basis))


@dataclass
class ZetaReport:
    value: Fraction
    domain: SignedDomain
    elements: dict[str, NFElement]
    traces: dict[str, Fraction]


def zeta_report(inp: RayClassInput, domain: SignedDomain | None = None) -> ZetaReport:
    v = inp.one_class()
    if all(c == 0 for c in v):
        raise ValidationError("unsupported modulus: 1 lies in the lattice")
    domain = domain or signed_domain(inp)
    assign = _zeta_assignment(inp)
    elems, traces = {}, {}
    for b in domain.blocks:
        if b.nu == 0:
            continue
        e = geometric_bernoulli(b.a, v, assign) * b.nu
        elems[b.label] = e
        traces[b.label] = e.trace()
    value = sum(traces.values(), Fraction(0)) / inp.degree
    return ZetaReport(value, domain, elems, traces)


def zeta_at_zero(inp: RayClassInput) -> Fraction:
    """Exact partial zeta value at s = 0 for the narrow ray class encoded by ``inp``."""
    return zeta_report(inp).value


def zeta_cone_at_zero(forms: Sequence[LinearForm], inp: RayClassInput, v: Sequence,
                      check_positive: bool = True) -> Fraction:
    """Zeta value at s = 0 of the dual cone of ``forms`` shifted by v, as trace(E)/n."""
    if all(Fraction(c) - int(Fraction(c)) == 0 for c in v):
        raise ValidationError("v must be nonzero in V/L")
    if check_positive:
        fam = positive_dual_family(*forms)
        for alpha in fam.alphas:
            if not is_totally_positive(inp.from_coords(alpha)):
                raise ValidationError("cone leaves the totally positive orthant")
    e = h0(forms, v, _zeta_assignment(inp))
    return e.trace() / inp.degree


def quadratic_forms(inp: RayClassInput) -> tuple[LinearForm, LinearForm, int, int]:
    """Primitive forms trace((eps^j - 1) .) for j = 1, -1 and their content."""
    if inp.degree != 2:
        raise ValidationError("quadratic pipeline needs a degree 2 field")
    eps = inp.units[0]
    out, contents = [], []
    for j in (1, -1):
        row = [((eps ** j - 1) * e).trace() for e in inp.lattice_basis]
        prim = integral_primitive(row)
        contents.append(row[0] / prim[0] if prim[0] else row[1] / prim[1])
        out.append(prim)
    return out[0], out[1], contents[0], contents[1]


def quadratic_shintani(inp: RayClassInput) -> Fraction:
    """Quadratic zeta value at s = 0 from the half-open domain {a_1 >= 0, a_{-1} > 0}.

    Modulo wedges that domain equals -c(a_1, -a_{-1}), so a single
    two-dimensional Bernoulli function of (a_1, -a_{-1}) suffices.
    """
    a1, am1, _, _ = quadratic_forms(inp)
    opp = tuple(-c for c in am1)
    v = inp.one_class()
    b = geometric_bernoulli([a1, opp], v, _zeta_assignment(inp))
    return -Fraction(sign(det([a1, opp]))) * b.trace() / 2
