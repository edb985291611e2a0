"""Executable claims and seeded property checks behind ``speciallie verify``.

A claim is a named batch of exact checks over a small (n, k) grid.  Bounds
only ever shrink the grid; a claim whose grid is empty is reported as skipped.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import comb
from typing import Callable

from . import freelie as fl
from .abelianization import bracket_generators, h1_degree, mt_kernel_quotient, nonmembership_certificate
from .derivations import (apply_derivation, component_basis, der_bracket, der_element, is_special,
                          named_element, random_derivation, random_special, random_tangential,
                          special_kernel)
from .johnson import braid_lcs_rank, johnson_cokernel, johnson_degree, kernel_equality_check
from .traces import TRACES, image_lattice, morita_trace, wedge_trace, equivariance_holds


@dataclass
class Bounds:
    max_n: int = 5
    max_k: int = 6
    n: int | None = None            # pin a single n
    seed: int = 0
    cases: int = 200

    def ns(self, candidates):
        return [n for n in candidates if n <= self.max_n and (self.n is None or n == self.n)]

    def ks(self, candidates):
        return [k for k in candidates if k <= self.max_k]


@dataclass
class Check:
    label: str
    ok: bool
    detail: str = ""

    def to_json(self):
        return {"label": self.label, "ok": self.ok, "detail": self.detail}


@dataclass
class Claim:
    id: str
    tag: str
    title: str
    run: Callable[[Bounds], list]


@dataclass
class ClaimResult:
    claim: Claim
    checks: list = field(default_factory=list)

    @property
    def status(self) -> str:
        if not self.checks:
            return "skip"
        return "pass" if all(c.ok for c in self.checks) else "fail"

    def to_json(self):
        return {"id": self.claim.id, "tag": self.claim.tag, "title": self.claim.title,
                "status": self.status, "checks": [c.to_json() for c in self.checks]}


def _eq(label, got, want) -> Check:
    return Check(label, got == want, f"got {got}, expected {want}")


# --------------------------------------------------------- reference claims

def _witt(b: Bounds):
    return [_eq(f"n={n} k={k}", len(fl.lyndon_words(n, k)), fl.witt_rank(n, k))
            for n in b.ns(range(1, 7)) for k in b.ks(range(1, 9))]


def special_formula(n: int, k: int) -> int:
    return comb(n, 2) if k == 1 else n * fl.witt_rank(n, k) - fl.witt_rank(n, k + 1)


def _brank(b: Bounds):
    return [_eq(f"n={n} k={k}", special_kernel(n, k).rank, special_formula(n, k))
            for n in b.ns(range(2, 6)) for k in b.ks(range(1, 7))]


COMPONENT_TABLE = [
    (3, (2, 2), 1), (3, (2, 1, 1), 1), (3, (1, 1, 1, 1), 2),
    (4, (4, 1), 0), (4, (3, 2), 0), (4, (3, 1, 1), 1), (4, (2, 2, 1), 1),
    (4, (2, 1, 1, 1), 3), (4, (1, 1, 1, 1, 1), 6),
]


def _components(b: Bounds):
    out = []
    for k, lam, want in COMPONENT_TABLE:
        if k > b.max_k:
            continue
        for n in b.ns([max(len(lam), 2), max(len(lam), 2) + 1]):
            out.append(_eq(f"k={k} alpha={lam} n={n}", component_basis(n, k, lam).rank, want))
    return out


def _mt_image(b: Bounds):
    return [_eq(f"n={n} k={k}", image_lattice("symmetric", special_kernel(n, k)).rank,
                comb(n + k - 1, k) - n * (n + 1) // 2)
            for k in b.ks([3, 5]) for n in b.ns([3, 4, 5])]


def _exact(k, trace, ns, free_rank):
    def run(b: Bounds):
        out = []
        if k > b.max_k:
            return out
        for n in b.ns(ns):
            chk = kernel_equality_check(n, k, trace)
            coker = johnson_cokernel(n, k)
            out.append(Check(f"n={n} image=kernel", chk.equal, str(chk.quotient)))
            out.append(Check(f"n={n} cokernel free of rank {free_rank(n)}",
                             coker.is_free and coker.free_rank == free_rank(n), str(coker)))
        return out
    return run


def _johnson_ranks(b: Bounds):
    return [_eq(f"n={n} k={k}", johnson_degree(n, k).rank, braid_lcs_rank(n, k))
            for n in b.ns(range(2, 5)) for k in b.ks(range(1, 6))]


def _h1(b: Bounds):
    out = []
    for n in b.ns([3, 4]):
        if b.max_k >= 2:
            out.append(Check(f"n={n} degree 2 vanishes over Z", h1_degree(n, 2).presentation.is_trivial,
                             str(h1_degree(n, 2).presentation)))
        if b.max_k >= 3:
            p = h1_degree(n, 3).presentation
            out.append(Check(f"n={n} degree 3 free of rank {comb(n + 1, 3)}",
                             p.is_free and p.free_rank == comb(n + 1, 3), str(p)))
        if b.max_k >= 4:
            p = h1_degree(n, 4, integral=False).presentation
            out.append(_eq(f"n={n} degree 4 rational rank", p.free_rank, 0))
    return out


def _residual(b: Bounds):
    return [_eq(f"n={n}", mt_kernel_quotient(n, 5).free_rank, comb(n, 3) + comb(n, 4))
            for n in b.ns([3, 4, 5]) if b.max_k >= 5]


def _nonmember(b: Bounds):
    out = []
    if b.max_k < 5:
        return out
    for tag, n in (("n3", 3), ("n4", 4)):
        if not b.ns([n]):
            continue
        f = named_element(tag, tuple(range(1, n + 1)), n)
        cert = nonmembership_certificate(f, n, 5)
        gens = bracket_generators(n, 5, [(4, 1)])
        out.append(Check(f"{tag}{tuple(range(1, n + 1))} outside [b(4), b(1)]",
                         not cert.member and cert.check(f, gens), f"covector value {cert.value}"))
    return out


def mt5_closed_form(i, j, l, p, q, r) -> dict:
    """Closed form of the Morita trace of the six-index degree-5 element."""
    out: dict = {}

    def add(c, *a):
        key = tuple(sorted(a))
        out[key] = out.get(key, 0) + c
    if i == r:
        add(2, i, j, l, p, q)
    if i == q:
        add(-2, j, l, p, q, r)
    if j == r:
        add(-2, i, j, l, p, q)
    if j == q:
        add(2, i, l, p, q, r)
    return {a: c for a, c in out.items() if c}


def bracket_example():
    """The displayed degree (3, 1) bracket and its expected normal form."""
    f = der_element(3, 3, [(1, 1, fl.left_normed(1, 2, 3, 2))])
    g = der_element(3, 1, [(1, 2, (3, 1))])
    want = der_element(3, 4, [(1, 1, fl.left_normed(1, (3, 1), 3, 2)),
                              (1, 1, fl.left_normed(1, 2, 3, (3, 1))),
                              (-1, 2, (3, fl.left_normed(1, 2, 3, 2)))])
    return der_bracket(f, g), want


def _bracket_display(b: Bounds):
    if not (b.ns([3]) and b.max_k >= 4):
        return []
    got, want = bracket_example()
    return [Check("bracket example", got == want, repr(got))]


def _mt5_display(b: Bounds):
    out = []
    ns = b.ns([3, 4, 5])
    if b.max_k < 5 or not ns:
        return out
    rng = random.Random(b.seed)
    for _ in range(10):
        n = rng.choice(ns)
        idx = tuple(rng.randint(1, n) for _ in range(6))
        got = morita_trace(named_element("b6", idx, n)).terms
        out.append(_eq(f"n={n} {idx}", got, mt5_closed_form(*idx)))
    return out


def _wedge_display(b: Bounds):
    if not (b.ns([3]) and b.max_k >= 4):
        return []
    v = wedge_trace(named_element("b5", (2, 1, 1, 1, 3), 3)).terms
    return [_eq("wedge trace of b(2,1,1,1,3)", v, {(1, (1, 2, 3)): 4})]


CLAIMS = [
    Claim("witt-rank", "ex-witt", "Lyndon count equals the necklace formula", _witt),
    Claim("special-rank", "rank-bnk", "rank of special derivations", _brank),
    Claim("component-ranks", "components", "ranks of composition components", _components),
    Claim("morita-image", "T-im-mtr", "rank of the Morita trace image", _mt_image),
    Claim("exact-3", "T-John-1", "degree 3 Johnson image equals the Morita kernel",
          _exact(3, "symmetric", [3, 4, 5], lambda n: comb(n + 1, 3))),
    Claim("exact-4", "T-John-2", "degree 4 Johnson image equals the wedge-trace kernel",
          _exact(4, "wedge", [4, 5], lambda n: 3 * comb(n + 1, 4))),
    Claim("johnson-ranks", "braid-lcs", "Johnson image ranks match the pure braid LCS", _johnson_ranks),
    Claim("h1-low", "P-ab-1", "abelianization in degrees 2 to 4", _h1),
    Claim("residual-5", "R-ab-5-5", "degree 5 Morita kernel modulo brackets", _residual),
    Claim("non-membership", "n-elements", "separating covectors for n(1,2,3) and n(1,2,3,4)", _nonmember),
    Claim("bracket-example", "eq-der-cal", "displayed derivation bracket", _bracket_display),
    Claim("mt5-closed-form", "L-ab-5-1", "Morita trace of the degree 5 elements", _mt5_display),
    Claim("wedge-display", "wedge-b21113", "wedge trace of b(2,1,1,1,3) equals 4 x1(x)x1^x2^x3", _wedge_display),
]


def find_claim(name: str) -> Claim:
    for c in CLAIMS:
        if name in (c.id, c.tag):
            return c
    raise KeyError(name)


def run_claims(bounds: Bounds, only: str | None = None) -> list[ClaimResult]:
    claims = [find_claim(only)] if only else CLAIMS
    return [ClaimResult(c, c.run(bounds)) for c in claims]


# --------------------------------------------------------- property checks

def _rand_lie(rng, n, k, terms=3):
    words = fl.lyndon_words(n, k)
    t: dict = {}
    for _ in range(terms):
        w = words[rng.randrange(len(words))]
        t[w] = t.get(w, 0) + rng.choice([-2, -1, 1, 2])
    return fl.LieElement(n, k, t)


def _p_lie(rng):
    n = rng.randint(2, 4)
    p, q, r = (rng.randint(1, 3) for _ in range(3))
    a, b, c = _rand_lie(rng, n, p), _rand_lie(rng, n, q), _rand_lie(rng, n, r)
    br = fl.lie_bracket
    anti = (br(a, b) + br(b, a)).is_zero()
    jac = (br(a, br(b, c)) + br(b, br(c, a)) + br(c, br(a, b))).is_zero()
    return anti and jac


def _p_der(rng):
    n = rng.randint(2, 3)
    p, q, r = (rng.randint(1, 2) for _ in range(3))
    f, g, h = (random_derivation(rng, n, d) for d in (p, q, r))
    br = der_bracket
    anti = (br(f, g) + br(g, f)).is_zero()
    jac = (br(f, br(g, h)) + br(g, br(h, f)) + br(h, br(f, g))).is_zero()
    return anti and jac


def _p_equivariance(rng):
    n = rng.randint(3, 4)
    k = rng.randint(2, 4)
    f = random_special(rng, n, k)
    sigma = list(range(1, n + 1))
    rng.shuffle(sigma)
    flavors = [fl_ for fl_ in TRACES if fl_ != "wedge" or k >= 3]
    return all(equivariance_holds(x, sigma, f) for x in flavors)


def _p_closure(rng):
    n = rng.randint(2, 4)
    p, q = rng.randint(1, 3), rng.randint(1, 2)
    return is_special(der_bracket(random_special(rng, n, p), random_special(rng, n, q)))


def _p_leibniz(rng):
    n = rng.randint(2, 3)
    k = rng.randint(1, 3)
    f = random_tangential(rng, n, k)
    a, b = _rand_lie(rng, n, rng.randint(1, 3)), _rand_lie(rng, n, rng.randint(1, 2))
    lhs = apply_derivation(f, fl.lie_bracket(a, b))
    rhs = fl.lie_bracket(apply_derivation(f, a), b) + fl.lie_bracket(a, apply_derivation(f, b))
    return (lhs - rhs).is_zero()


PROPERTIES = {
    "lie-antisymmetry-jacobi": _p_lie,
    "der-antisymmetry-jacobi": _p_der,
    "trace-equivariance": _p_equivariance,
    "special-closure": _p_closure,
    "leibniz": _p_leibniz,
}


def run_properties(bounds: Bounds, only: str | None = None) -> list[ClaimResult]:
    out = []
    for name, prop in PROPERTIES.items():
        if only and name != only:
            continue
        rng = random.Random(f"{bounds.seed}:{name}")
        fails = sum(1 for _ in range(bounds.cases) if not prop(rng))
        out.append(ClaimResult(Claim(name, name, f"{bounds.cases} random cases", prop),
                               [Check(name, fails == 0, f"{fails} failures in {bounds.cases}")]))
    return out
