"""Lie subalgebra generated by the degree-one elements t_ij, and its cokernels.

The degree-k piece V_k is the Z-span of brackets [v, t] with v running over a
Z-basis of V_{k-1} and t over the t_ij.  Ranks are compared with the
lower-central-series ranks of the pure braid group.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import freelie as fl
from .derivations import DerElement, DerSubspace, der_bracket, named_element, special_kernel
from .exactlin import Echelon, IntEchelon, Lattice, QuotientPresentation, quotient_from_relations, \
    quotient_presentation
from .traces import image_lattice

__all__ = ["braid_lcs_rank", "johnson_image", "johnson_degree", "johnson_cokernel",
           "kernel_equality_check", "GradedSubalgebra", "KernelCheck", "special_coordinates"]


def braid_lcs_rank(n: int, k: int) -> int:
    """Rank of the k-th lower central series quotient of the pure braid group P_n."""
    if n < 2 or k < 1:
        raise ValueError("braid_lcs_rank needs n >= 2 and k >= 1")
    total = sum(fl.mobius(d) * sum(j ** (k // d) for j in range(1, n)) for d in fl.divisors(k))
    assert total % k == 0
    return total // k


def t_generators(n: int) -> list[DerElement]:
    return [named_element("t", (i, j), n) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def _zbasis(n: int, k: int, gens) -> list[DerElement]:
    h = IntEchelon()
    for g in gens:
        h.add(g.vector())
    return [DerElement.from_vector(n, k, v) for v in h.hermite()]


@lru_cache(maxsize=None)
def johnson_degree(n: int, k: int) -> DerSubspace:
    """Degree-k part of the Lie ring generated by the t_ij (as a Z-basis)."""
    if k == 1:
        return DerSubspace(n, 1, _zbasis(n, 1, t_generators(n)), name="V1")
    prev = johnson_degree(n, k - 1)
    ts = t_generators(n)
    gens = (der_bracket(v, t) for v in prev.basis for t in ts)
    return DerSubspace(n, k, _zbasis(n, k, gens), name=f"V{k}")


@dataclass
class GradedSubalgebra:
    n: int
    degrees: dict

    def __getitem__(self, k: int) -> DerSubspace:
        return self.degrees[k]

    def ranks(self) -> dict:
        return {k: v.rank for k, v in sorted(self.degrees.items())}

    @property
    def top(self) -> int:
        return max(self.degrees)


def johnson_image(n: int, K: int) -> GradedSubalgebra:
    if n < 2 or K < 1:
        raise ValueError("johnson_image needs n >= 2 and K >= 1")
    return GradedSubalgebra(n, {k: johnson_degree(n, k) for k in range(1, K + 1)})


def special_coordinates(sub: DerSubspace) -> list[list]:
    """Coordinates of sub's basis in the special-kernel basis; raises if outside it."""
    b = special_kernel(sub.n, sub.k)
    out = []
    for f in sub.basis:
        x = b.coordinates(f)
        if x is None:
            raise ValueError("element is not special")
        if any(isinstance(c, Fraction) for c in x):
            raise ValueError("element is not in the special lattice")
        out.append(x)
    return out


def johnson_cokernel(n: int, k: int) -> QuotientPresentation:
    """Presentation of b_n(k) / V_k."""
    b = special_kernel(n, k)
    return quotient_from_relations(b.rank, [dict(enumerate(x)) for x in special_coordinates(johnson_degree(n, k))])


@dataclass
class KernelCheck:
    n: int
    k: int
    trace: str
    contained: bool                       # V_k inside the kernel
    kernel_rank: int
    image_rank: int
    quotient: QuotientPresentation        # kernel / V_k

    @property
    def equal(self) -> bool:
        return self.contained and self.quotient.is_trivial

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "trace": self.trace, "contained": self.contained,
                "kernel_rank": self.kernel_rank, "image_rank": self.image_rank,
                "kernel_mod_image": self.quotient.to_json(), "equal": self.equal}


def kernel_equality_check(n: int, k: int, trace: str) -> KernelCheck:
    """Compare V_k with the kernel of ``trace`` on b_n(k) as Z-lattices.

    ``trace`` is 'symmetric' (Morita trace), 'wedge', 'cyclic' or 'zero'.
    """
    b = special_kernel(n, k)
    if trace == "zero":
        kern = [{j: 1} for j in range(b.rank)]
    else:
        kern = image_lattice(trace, b).kernel
    coords = [dict((j, c) for j, c in enumerate(x) if c)
              for x in special_coordinates(johnson_degree(n, k))]
    K = Lattice(b.rank, kern)
    e = Echelon()
    e.extend(kern)
    contained = all(not e.reduce(v) for v in coords)
    if not contained:
        return KernelCheck(n, k, trace, False, len(kern), len(coords), QuotientPresentation(0))
    q = quotient_presentation(K, Lattice(b.rank, coords))
    return KernelCheck(n, k, trace, True, len(kern), len(coords), q)

