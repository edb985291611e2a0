"""Degree-k abelianization of the special algebra and separating certificates.

Everything is done in the coordinates of the special-kernel basis of b_n(k):
brackets [u, v] are expressed there, and quotients are computed with Smith
normal form.  Non-membership certificates live in full Der coordinates so
they can be checked without trusting that basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .derivations import DerElement, DerSubspace, der_bracket, is_special, special_kernel
from .exactlin import Echelon, IntEchelon, Lattice, QuotientPresentation, dot, \
    quotient_from_relations, quotient_presentation, separating_covector
from .traces import image_lattice

__all__ = ["bracket_generators", "bracket_subspace", "h1_degree", "mt_kernel_quotient",
           "nonmembership_certificate", "H1Report", "Certificate", "BracketSpan", "bracket_span"]


def _splits(k: int, splits=None) -> list[tuple[int, int]]:
    if splits is None:
        return [(p, k - p) for p in range(k - 1, 0, -1) if p >= k - p]
    out = []
    for p, q in splits:
        if p + q != k or p < 1 or q < 1:
            raise ValueError(f"split ({p},{q}) does not add up to {k}")
        out.append((max(p, q), min(p, q)))
    return out


def bracket_generators(n: int, k: int, splits=None) -> list[DerElement]:
    """[u, v] for basis vectors u of b_n(p), v of b_n(q), p + q = k, p >= q."""
    if k < 2:
        return []
    out = []
    for p, q in _splits(k, splits):
        bp, bq = special_kernel(n, p).basis, special_kernel(n, q).basis
        for a, u in enumerate(bp):
            for c, v in enumerate(bq):
                if p == q and c <= a:
                    continue
                g = der_bracket(u, v)
                if not g.is_zero():
                    out.append(g)
    return out


@dataclass
class BracketSpan:
    """Bracket generators of degree k with their coordinates in the special basis."""

    n: int
    k: int
    splits: tuple
    generators: list
    coords: list                  # sparse dicts over the special basis

    @property
    def q_rank(self) -> int:
        e = Echelon()
        e.extend(self.coords)
        return e.rank


@lru_cache(maxsize=None)
def _bracket_span(n: int, k: int, splits: tuple) -> BracketSpan:
    gens = bracket_generators(n, k, list(splits))
    b = special_kernel(n, k)
    coords = []
    for g in gens:
        x = b.coordinates(g)
        if x is None:
            raise ArithmeticError("bracket of special derivations left the special algebra")
        if any(isinstance(c, Fraction) for c in x):
            raise ArithmeticError("bracket is not in the special lattice")
        coords.append({j: c for j, c in enumerate(x) if c})
    return BracketSpan(n, k, splits, gens, coords)


def bracket_span(n: int, k: int, splits=None) -> BracketSpan:
    return _bracket_span(n, k, tuple(_splits(k, splits)) if k >= 2 else ())


def bracket_subspace(n: int, k: int, splits=None) -> DerSubspace:
    """Z-basis of the degree-k part of [b_n, b_n] (or of the chosen splits)."""
    if k < 2:
        raise ValueError("bracket_subspace needs k >= 2")
    span = bracket_span(n, k, splits)
    b = special_kernel(n, k)
    h = IntEchelon()
    h.extend(span.coords)
    basis = [b.element([v.get(j, 0) for j in range(b.rank)]) for v in h.hermite()]
    return DerSubspace(n, k, basis, name="[b,b]")


@dataclass
class H1Report:
    n: int
    k: int
    rank_b: int
    bracket_rank: int
    presentation: QuotientPresentation
    mt_detected_rank: int
    residual: QuotientPresentation
    residual_q_dim: int

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "rank_b": self.rank_b, "bracket_rank": self.bracket_rank,
                "h1": self.presentation.to_json(), "mt_detected_rank": self.mt_detected_rank,
                "residual": self.residual.to_json(), "residual_q_dim": self.residual_q_dim}


def _kernel_modulo(n: int, k: int, span: BracketSpan, integral: bool):
    rep = image_lattice("symmetric", special_kernel(n, k))
    kern = rep.kernel
    e = Echelon()
    e.extend(span.coords)
    q_dim = len(kern) - e.rank
    if integral:
        residual = quotient_presentation(Lattice(special_kernel(n, k).rank, kern),
                                         Lattice(special_kernel(n, k).rank, span.coords))
    else:
        residual = QuotientPresentation(q_dim)
    return rep, q_dim, residual


def h1_degree(n: int, k: int, integral: bool = True) -> H1Report:
    """b_n(k) modulo all brackets, with the part seen by the Morita trace.

    With ``integral=False`` only ranks are computed (torsion left empty).
    """
    if k < 1:
        raise ValueError("degree must be >= 1")
    b = special_kernel(n, k)
    if k == 1:
        free = QuotientPresentation(b.rank)
        return H1Report(n, 1, b.rank, 0, free, b.rank, QuotientPresentation(0), 0)
    span = bracket_span(n, k)
    e = Echelon()
    e.extend(span.coords)
    if integral:
        pres = quotient_from_relations(b.rank, span.coords)
    else:
        pres = QuotientPresentation(b.rank - e.rank)
    rep, q_dim, residual = _kernel_modulo(n, k, span, integral)
    return H1Report(n, k, b.rank, e.rank, pres, rep.rank, residual, q_dim)


def mt_kernel_quotient(n: int, k: int, integral: bool = False) -> QuotientPresentation:
    """Kernel of the Morita trace on b_n(k) modulo the bracket subspace."""
    if k < 3 or k % 2 == 0:
        raise ValueError("mt_kernel_quotient needs odd k >= 3")
    return _kernel_modulo(n, k, bracket_span(n, k), integral)[2]


@dataclass
class Certificate:
    n: int
    k: int
    member: bool
    covector: dict = field(default_factory=dict)      # over flat Der coordinates
    value: int = 0                                  # covector . element
    generators: int = 0

    def check(self, elem: DerElement, gens) -> bool:
        """Independent verification: kills every generator, not the element."""
        if self.member:
            return False
        return dot(self.covector, elem.vector()) != 0 and \
            all(dot(self.covector, g.vector()) == 0 for g in gens)

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "member": self.member, "value": str(self.value),
                "generators": self.generators,
                "covector": [{"index": i, "coeff": str(c)} for i, c in sorted(self.covector.items())]}


def nonmembership_certificate(elem: DerElement, n: int, k: int, splits=None) -> Certificate:
    """Decide Q-membership of elem in the bracket span; emit a covector when outside.

    ``splits`` defaults to [(k-1, 1)].
    """
    if (elem.n, elem.degree) != (n, k):
        raise ValueError("element does not live in degree k")
    if not is_special(elem):
        raise ValueError("element is not special")
    gens = bracket_generators(n, k, splits if splits is not None else [(k - 1, 1)])
    y = separating_covector(elem.vector(), [g.vector() for g in gens])
    if y is None:
        return Certificate(n, k, True, {}, 0, len(gens))
    return Certificate(n, k, False, y, dot(y, elem.vector()), len(gens))
