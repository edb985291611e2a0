"""Contractions and trace maps out of H* (x) L_n(k+1).

``phi`` pairs x_i^* with the first tensor slot, ``psi`` with the second one.
Both are evaluated through closed formulas for left-normed commutators; every
Lyndon monomial is first rewritten as a combination of left-normed
commutators.  ``contract_slot`` is the plain tensor contraction and serves as
an independent check.

Trace values are :class:`TraceValue` objects whose keys are canonical forms:

* cyclic:   lexicographically minimal rotation of a word
* symmetric: sorted tuple
* wedge:    (head, strictly increasing tail) with the sign moved into the coefficient
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb, gcd
from typing import Callable, Mapping

from . import freelie as fl
from .derivations import DerElement, DerSubspace, sym_action, tangential_from_brackets, expand_right
from .exactlin import Echelon, IntEchelon, Lattice, QuotientPresentation, kernel_lattice, \
    quotient_from_relations

__all__ = [
    "contract_phi", "contract_psi", "contract_slot", "cyclic_trace", "cyclic_rank",
    "reduced_cyclic_trace", "morita_trace", "wedge_trace", "image_lattice", "TraceValue",
    "ImageReport", "TRACES", "necklace", "wedge_sort", "ideal_I", "ideal_J", "target_basis",
    "doubled_preimage", "t_prime_preimage", "j_preimage", "left_normed_expansion",
]


# -------------------------------------------------- left-normed forms

def _ln_right(u: tuple, b) -> dict:
    # [left-normed u, tree b] as a combination of left-normed words
    if isinstance(b, int):
        return {u + (b,): 1}
    c, d = b
    out: dict = {}
    for w, a in _ln_right(u, c).items():
        for w2, a2 in _ln_right(w, d).items():
            out[w2] = out.get(w2, 0) + a * a2
    for w, a in _ln_right(u, d).items():
        for w2, a2 in _ln_right(w, c).items():
            out[w2] = out.get(w2, 0) - a * a2
    return {w: a for w, a in out.items() if a}


@lru_cache(maxsize=None)
def _ln_tree(t) -> tuple:
    if isinstance(t, int):
        return (((t,), 1),)
    out: dict = {}
    for u, a in _ln_tree(t[0]):
        for w, b in _ln_right(u, t[1]).items():
            out[w] = out.get(w, 0) + a * b
    return tuple((w, a) for w, a in out.items() if a)


def left_normed_expansion(t) -> dict:
    """{word: coeff} such that t = sum coeff * [x_w1, ..., x_wm]."""
    return dict(_ln_tree(t))


# ------------------------------------------------------ contractions

@lru_cache(maxsize=None)
def _phi_ln(i: int, w: tuple) -> tuple:
    # phi(x_i^* (x) [w_1, ..., w_m]) for a left-normed commutator
    out: dict = {}
    if w[0] == i:
        out[w[1:]] = 1
    for l in range(1, len(w)):
        if w[l] != i:
            continue
        post = w[l + 1:]
        head = fl.embed_tree(fl.left_normed(*w[:l]))
        for u, a in head.items():
            key = u + post
            out[key] = out.get(key, 0) - a
    return tuple((u, a) for u, a in out.items() if a)


@lru_cache(maxsize=None)
def _psi_ln(i: int, w: tuple) -> tuple:
    # psi(x_i^* (x) [w_1, ..., w_m]) for a left-normed commutator
    out: dict = {}
    if w[1] == i:
        out[(w[0],) + w[2:]] = 1
    for l in range(1, len(w)):
        post = w[l + 1:]
        for u, a in _phi_ln(i, w[:l]):
            key = (w[l],) + u + post
            out[key] = out.get(key, 0) - a
    return tuple((u, a) for u, a in out.items() if a)


@lru_cache(maxsize=None)
def _contract_basis(which: str, i: int, word: tuple) -> tuple:
    rule = _phi_ln if which == "phi" else _psi_ln
    out: dict = {}
    for w, a in _ln_tree(fl.standard_bracketing(word)):
        for u, b in rule(i, w):
            out[u] = out.get(u, 0) + a * b
    return tuple((u, a) for u, a in out.items() if a)


def _contract(which: str, f: DerElement) -> dict:
    out: dict = {}
    for (i, w), c in f.terms.items():
        for u, a in _contract_basis(which, i, w):
            out[u] = out.get(u, 0) + c * a
    return {u: c for u, c in out.items() if c}


def contract_phi(f: DerElement) -> fl.TensorElement:
    """Contraction of the dual slot with the first tensor slot."""
    return fl.TensorElement(f.n, f.degree, _contract("phi", f))


def contract_psi(f: DerElement) -> fl.TensorElement:
    """Contraction of the dual slot with the second tensor slot."""
    return fl.TensorElement(f.n, f.degree, _contract("psi", f))


def contract_slot(f: DerElement, slot: int) -> fl.TensorElement:
    """Direct contraction of x_i^* against tensor slot ``slot`` (0-based) of f(x_i)."""
    out: dict = {}
    for i, t in f.tensors().items():
        for w, c in t.items():
            if w[slot] == i:
                key = w[:slot] + w[slot + 1:]
                out[key] = out.get(key, 0) + c
    return fl.TensorElement(f.n, f.degree, out)


# ---------------------------------------------------------- targets

def necklace(w: tuple) -> tuple:
    """Lexicographically minimal rotation."""
    return min(w[r:] + w[:r] for r in range(len(w))) if w else w


def wedge_sort(tail: tuple):
    """(sign, sorted tail) or (0, None) when a letter repeats."""
    if len(set(tail)) != len(tail):
        return 0, None
    sign, t = 1, list(tail)
    for a in range(len(t)):
        for b in range(len(t) - 1 - a):
            if t[b] > t[b + 1]:
                t[b], t[b + 1] = t[b + 1], t[b]
                sign = -sign
    return sign, tuple(t)


def _euler_phi(d: int) -> int:
    return sum(1 for a in range(1, d + 1) if gcd(a, d) == 1)


def cyclic_rank(n: int, k: int) -> int:
    """Number of necklaces of length k over n letters."""
    total = sum(_euler_phi(d) * n ** (k // d) for d in fl.divisors(k))
    return total // k


@dataclass
class TraceValue:
    flavor: str
    n: int
    k: int
    terms: dict

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, TraceValue):
            return NotImplemented
        return (self.flavor, self.n, self.k, self.terms) == (other.flavor, other.n, other.k, other.terms)

    def __add__(self, other):
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0) + c
        return TraceValue(self.flavor, self.n, self.k, {a: c for a, c in out.items() if c})

    def __rmul__(self, s):
        return TraceValue(self.flavor, self.n, self.k, {a: s * c for a, c in self.terms.items() if s * c})

    def to_json(self) -> dict:
        def key(a):
            if self.flavor == "wedge":
                return {"head": a[0], "tail": list(a[1])}
            return list(a)
        return {"flavor": self.flavor, "n": self.n, "k": self.k,
                "terms": [{"key": key(a), "coeff": str(c)} for a, c in sorted(self.terms.items())]}

    def __repr__(self):
        if not self.terms:
            return "0"
        if self.flavor == "wedge":
            fmt = lambda a: f"x{a[0]}(x)" + "^".join(f"x{b}" for b in a[1])
        elif self.flavor == "symmetric":
            fmt = lambda a: "e" + ",".join(map(str, a))
        else:
            fmt = lambda a: "".join(f"x{b}" for b in a)
        return " + ".join(f"{c}*{fmt(a)}" for a, c in sorted(self.terms.items()))


def _collect(flavor, f: DerElement, pairs) -> TraceValue:
    out: dict = {}
    for key, c in pairs:
        if key is not None:
            out[key] = out.get(key, 0) + c
    return TraceValue(flavor, f.n, f.degree, {a: c for a, c in out.items() if c})


def cyclic_trace(f: DerElement) -> TraceValue:
    return _collect("cyclic", f, ((necklace(w), c) for w, c in _contract("phi", f).items()))


def reduced_cyclic_trace(f: DerElement) -> TraceValue:
    """Cyclic trace modulo the powers x_i^k."""
    return _collect("reduced", f, ((necklace(w), c) for w, c in _contract("phi", f).items()
                                   if len(set(w)) > 1))


def morita_trace(f: DerElement) -> TraceValue:
    return _collect("symmetric", f, ((tuple(sorted(w)), c) for w, c in _contract("phi", f).items()))


def wedge_trace(f: DerElement) -> TraceValue:
    """Psi contraction followed by antisymmetrizing the last k-1 slots."""
    if f.degree < 3:
        raise ValueError("wedge_trace is defined for k >= 3")

    def pairs():
        for w, c in _contract("psi", f).items():
            s, tail = wedge_sort(w[1:])
            if s:
                yield (w[0], tail), s * c
    return _collect("wedge", f, pairs())


TRACES: dict[str, Callable] = {
    "cyclic": cyclic_trace,
    "reduced": reduced_cyclic_trace,
    "symmetric": morita_trace,
    "wedge": wedge_trace,
}


@lru_cache(maxsize=None)
def target_basis(flavor: str, n: int, k: int) -> tuple:
    """Ordered basis keys of the target of a trace map."""
    if flavor in ("cyclic", "reduced"):
        keys = sorted({necklace(w) for w in itertools.product(range(1, n + 1), repeat=k)})
        if flavor == "reduced":
            keys = [w for w in keys if len(set(w)) > 1]
        return tuple(keys)
    if flavor == "symmetric":
        return tuple(itertools.combinations_with_replacement(range(1, n + 1), k))
    if flavor == "wedge":
        return tuple((h, t) for h in range(1, n + 1)
                     for t in itertools.combinations(range(1, n + 1), k - 1))
    raise ValueError(f"unknown trace target {flavor!r}")


def _permute_value(sigma: Mapping, v: TraceValue) -> TraceValue:
    out: dict = {}
    for a, c in v.terms.items():
        if v.flavor == "wedge":
            s, tail = wedge_sort(tuple(sigma[b] for b in a[1]))
            key, c = (sigma[a[0]], tail), s * c
        elif v.flavor == "symmetric":
            key = tuple(sorted(sigma[b] for b in a))
        else:
            key = necklace(tuple(sigma[b] for b in a))
        out[key] = out.get(key, 0) + c
    return TraceValue(v.flavor, v.n, v.k, {a: c for a, c in out.items() if c})


def permute_trace(sigma, v: TraceValue) -> TraceValue:
    """Action of a permutation (images of 1..n) on a trace value."""
    s = {i + 1: x for i, x in enumerate(sigma)} if not isinstance(sigma, Mapping) else dict(sigma)
    return _permute_value(s, v)


# -------------------------------------------------------- image lattices

@dataclass
class ImageReport:
    flavor: str
    n: int
    k: int
    target_dim: int
    image: Lattice
    rank: int
    quotient: QuotientPresentation        # target / image
    kernel: list                          # Z-basis of the kernel in domain coordinates

    @property
    def saturated(self) -> bool:
        return self.quotient.is_free

    def to_json(self) -> dict:
        return {"flavor": self.flavor, "n": self.n, "k": self.k, "target_dim": self.target_dim,
                "image_rank": self.rank, "kernel_rank": len(self.kernel),
                "cokernel": self.quotient.to_json()}


def trace_matrix(flavor: str, domain: DerSubspace) -> list[dict]:
    """Columns of the restricted trace map, one sparse target vector per basis element."""
    fn = TRACES[flavor]
    pos = {a: j for j, a in enumerate(target_basis(flavor, domain.n, domain.k))}
    return [{pos[a]: c for a, c in fn(b).terms.items()} for b in domain.basis]


def image_lattice(flavor: str, domain: DerSubspace) -> ImageReport:
    """Exact image of a trace map restricted to ``domain`` with its cokernel and kernel."""
    n, k = domain.n, domain.k
    dim = len(target_basis(flavor, n, k))
    cols = trace_matrix(flavor, domain)
    rows: list[dict] = [dict() for _ in range(dim)]
    for j, col in enumerate(cols):
        for r, c in col.items():
            rows[r][j] = c
    kern = kernel_lattice([r for r in rows if r], ncols=len(cols)) if cols else []
    image = Lattice(dim, [c for c in cols if c])
    e = Echelon()
    e.extend(image.generators)
    return ImageReport(flavor, n, k, dim, image, e.rank,
                       quotient_from_relations(dim, image.generators), kern)


# ----------------------------------------------- the modules I and J

def _wedge_vec(n, k, head, tail, coeff, pos, out):
    s, t = wedge_sort(tuple(tail))
    if s:
        key = pos[(head, t)]
        out[key] = out.get(key, 0) + s * coeff


def ideal_I(n: int, k: int) -> Lattice:
    """x (x) z.. ^ y + y (x) z.. ^ x over basis vectors, in wedge-target coordinates."""
    pos = {a: j for j, a in enumerate(target_basis("wedge", n, k))}
    gens = []
    seen = set()
    for x in range(1, n + 1):
        for y in range(x, n + 1):
            for z in itertools.combinations(range(1, n + 1), k - 2):
                v: dict = {}
                _wedge_vec(n, k, x, z + (y,), 1, pos, v)
                _wedge_vec(n, k, y, z + (x,), 1, pos, v)
                v = {a: c for a, c in v.items() if c}
                key = tuple(sorted(v.items()))
                if v and key not in seen:
                    seen.add(key)
                    gens.append(v)
    return Lattice(len(pos), gens)


def ideal_J(n: int, k: int) -> Lattice:
    """w(i, j; i_1, ..., i_{k-2}) with all indices distinct."""
    pos = {a: j for j, a in enumerate(target_basis("wedge", n, k))}
    gens = []
    for idx in itertools.permutations(range(1, n + 1), k):
        i, j, z = idx[0], idx[1], idx[2:]
        if i > j:
            continue
        v: dict = {}
        _wedge_vec(n, k, i, z + (j,), 1, pos, v)
        _wedge_vec(n, k, j, z + (i,), 1, pos, v)
        v = {a: c for a, c in v.items() if c}
        if v:
            gens.append(v)
    return Lattice(len(pos), gens)


# -------------------------------------------- explicit preimages

def doubled_preimage(n: int, j: int, idx: tuple) -> DerElement:
    """Special element of odd degree k whose Morita trace is 2 e_{j, idx}.

    ``idx`` = (i_1, ..., i_{k-1}) with j, i_1, i_2 distinct.
    """
    i1 = idx[0]
    if len({j, idx[0], idx[1]}) < 3:
        raise ValueError("j, i_1, i_2 must be distinct")
    x = fl.left_normed(*idx)
    pieces = [(1, ((x, j), i1)), (-1, ((x, i1), j))] + expand_right((j, i1), x)
    return tangential_from_brackets(n, pieces)


def t_prime_preimage(n: int, i: int, j: int, rest: tuple) -> DerElement:
    """Special element of degree k = len(rest) + 3 built from a Jacobi identity.

    Its Morita trace is expected to be -(e_{i,i,j,rest} + e_{j,j,i,rest}).
    """
    if i == j:
        raise ValueError("i and j must differ")
    y = fl.left_normed(i, j, *rest)
    pieces = [(1, ((y, i), j)), (1, ((j, y), i))] + expand_right((i, j), y)
    return tangential_from_brackets(n, pieces)


def t_prime_literal(n: int, i: int, j: int, rest: tuple) -> DerElement:
    """The three-part sum as literally printed (the middle sum may omit terms for k >= 5)."""
    k = len(rest) + 3
    idx = {t + 3: r for t, r in enumerate(rest)}        # i_3, ..., i_{k-1}
    pieces = [(1, fl.left_normed(i, j, *rest, i, j))]
    for l in range(1, k - 2):
        inner = fl.left_normed(i, j, *[idx[t] for t in range(3, k - l)])
        mid = [idx[t] for t in range(k - 1, k - l, -1)]
        pieces.append(((-1) ** (l - 1), fl.left_normed(i, j, *mid, inner, idx[k - l])))
    pieces.append((1, ((j, fl.left_normed(i, j, *rest)), i)))
    return tangential_from_brackets(n, pieces, check=False)


def j_preimage(n: int, i: int, j: int, idx: tuple) -> DerElement:
    """Special element of degree k = len(idx) + 2 (k = 0 mod 4) whose wedge trace is a multiple of w(i,j;idx).

    With the contraction conventions used here the multiple is 2^{k/2}.
    """
    k = len(idx) + 2
    if k % 4:
        raise ValueError("needs k divisible by 4")
    if len({i, j, *idx}) != k:
        raise ValueError("indices must be distinct")
    p = fl.left_normed(idx[0], idx[1], i, *[(idx[t], idx[t + 1]) for t in range(2, k - 2, 2)])
    pieces = [(1, ((p, j), i)), (-1, ((p, i), j))] + expand_right((j, i), p)
    return tangential_from_brackets(n, pieces)


def equivariance_holds(flavor: str, sigma, f: DerElement) -> bool:
    fn = TRACES[flavor]
    return fn(sym_action(sigma, f)) == permute_trace(sigma, fn(f))


def i_rank(n: int, k: int) -> int:
    return (k - 1) * comb(n + 1, k)


def z_span_contains(lat: Lattice, v: Mapping) -> bool:
    h = IntEchelon()
    h.extend(lat.generators)
    return h.contains(dict(v))
