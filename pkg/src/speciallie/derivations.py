"""Degree-k derivations H* (x) L_n(k+1), the tangential and special subalgebras.

A DerElement stores ``{(i, w): c}`` meaning  sum c * x_i^* (x) b(w)  where b(w)
is the Lyndon monomial of the word w of length k+1.  The flat coordinate of
``(i, w)`` is ``(i-1) * r_n(k+1) + index(w)``.

Tangential elements are parametrized by the chart  (i, m) -> x_i^* (x) [m, x_i]
with m a Lyndon monomial of degree k (m != x_i when k = 1).  The special
condition  sum_i [m_i, x_i] = 0  respects the content of [m, x_i], so the
special algebra splits as a direct sum of small blocks indexed by compositions
of k+1; each block is the integer kernel of a small matrix.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from . import freelie as fl
from .exactlin import Echelon, Lattice, kernel_lattice
from .freelie import LieElement, canon, lie_coordinates, lyndon_tensor

__all__ = [
    "DerElement", "DerSubspace", "der_bracket", "apply_derivation", "tangential_basis",
    "special_kernel", "component_basis", "orbit_decomposition", "sym_action", "named_element",
    "der_element", "tangential_from_brackets", "expand_right", "is_special", "is_tangential",
    "compositions", "NAMED_ELEMENTS", "NotSpecialError",
]


class NotSpecialError(ValueError):
    """Raised when a constructed element fails the special condition."""


# ------------------------------------------------------------ elements

class DerElement:
    __slots__ = ("n", "degree", "terms", "_tensors")

    def __init__(self, n: int, degree: int, terms: Mapping = ()):
        if n < 1 or degree < 1:
            raise ValueError("need n >= 1 and degree >= 1")
        self.n, self.degree = n, degree
        clean = {}
        for (i, w), c in dict(terms).items():
            c = canon(c)
            if not c:
                continue
            w = tuple(w)
            if not 1 <= i <= n or len(w) != degree + 1 or not fl.is_lyndon(w) or max(w) > n:
                raise ValueError(f"({i}, {w}) is not a coordinate of Der_{n}({degree})")
            clean[(i, w)] = c
        self.terms = clean
        self._tensors = None

    @classmethod
    def from_components(cls, n: int, k: int, comps: Mapping[int, LieElement]) -> "DerElement":
        terms = {}
        for i, a in comps.items():
            if a.degree != k + 1 or a.n != n:
                raise ValueError("component has the wrong degree or rank")
            for w, c in a.terms.items():
                terms[(i, w)] = c
        return cls(n, k, terms)

    def component(self, i: int) -> LieElement:
        return LieElement(self.n, self.degree + 1,
                          {w: c for (j, w), c in self.terms.items() if j == i})

    def components(self) -> dict:
        out: dict = {}
        for (i, w), c in self.terms.items():
            out.setdefault(i, {})[w] = c
        return {i: LieElement(self.n, self.degree + 1, t) for i, t in sorted(out.items())}

    def tensors(self) -> dict:
        """{i: embedded tensor of f(x_i)}, cached."""
        if self._tensors is None:
            out: dict = {}
            for (i, w), c in self.terms.items():
                t = out.setdefault(i, {})
                for u, a in lyndon_tensor(w).items():
                    t[u] = t.get(u, 0) + c * a
            self._tensors = {i: {u: c for u, c in t.items() if c} for i, t in out.items()}
        return self._tensors

    def _check(self, other):
        if (self.n, self.degree) != (other.n, other.degree):
            raise ValueError("elements of different spaces")

    def __add__(self, other: "DerElement") -> "DerElement":
        self._check(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0) + c
        return DerElement(self.n, self.degree, out)

    def __neg__(self):
        return DerElement(self.n, self.degree, {key: -c for key, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, s):
        s = canon(s)
        return DerElement(self.n, self.degree, {key: s * c for key, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, DerElement):
            return NotImplemented
        return (self.n, self.degree, self.terms) == (other.n, other.degree, other.terms)

    def __hash__(self):
        return hash((self.n, self.degree, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def vector(self) -> dict:
        """Sparse flat coordinates in Der_n(k)."""
        r = fl.witt_rank(self.n, self.degree + 1)
        idx = fl.basis_index(self.n, self.degree + 1)
        return {(i - 1) * r + idx[w]: c for (i, w), c in self.terms.items()}

    @classmethod
    def from_vector(cls, n: int, k: int, vec: Mapping) -> "DerElement":
        words = fl.lyndon_words(n, k + 1)
        r = len(words)
        return cls(n, k, {(j // r + 1, words[j % r]): c for j, c in vec.items() if c})

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.degree,
            "terms": [{"dual": i, "word": fl.tree_to_json(fl.standard_bracketing(w)),
                       "coeff": str(c)} for (i, w), c in sorted(self.terms.items())],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "DerElement":
        n, k = int(obj["n"]), int(obj["k"])
        pieces = [(t["coeff"], int(t["dual"]), fl.tree_from_json(t["word"])) for t in obj["terms"]]
        return der_element(n, k, pieces)

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*x{i}^*(x){fl.tree_str(fl.standard_bracketing(w))}"
                          for (i, w), c in sorted(self.terms.items()))


def der_element(n: int, k: int, pieces: Iterable) -> DerElement:
    """Build  sum c * x_i^* (x) tree  from ``(c, i, tree)`` triples, normalizing each tree."""
    comps: dict = {}
    for c, i, tree in pieces:
        if fl.degree(tree) != k + 1:
            raise ValueError(f"tree {fl.tree_str(tree)} does not have degree {k + 1}")
        if not 1 <= i <= n or max(fl.leaves(tree)) > n or min(fl.leaves(tree)) < 1:
            raise ValueError("generator index out of range")
        t = comps.setdefault(i, {})
        c = canon(c)
        for w, a in fl.embed_tree(tree).items():
            t[w] = t.get(w, 0) + c * a
    terms = {}
    for i, t in comps.items():
        for w, c in lie_coordinates(t).items():
            terms[(i, w)] = c
    return DerElement(n, k, terms)


# --------------------------------------------------------- the bracket

def _apply_to_tensor(tensors: Mapping[int, dict], t: Mapping) -> dict:
    # derivation of the tensor algebra extending x_j -> tensors[j]
    out: dict = {}
    for w, c in t.items():
        for pos, a in enumerate(w):
            img = tensors.get(a)
            if not img:
                continue
            pre, post = w[:pos], w[pos + 1:]
            for u, b in img.items():
                key = pre + u + post
                out[key] = out.get(key, 0) + c * b
    return out


def apply_derivation(f: DerElement, a: LieElement) -> LieElement:
    """f(a) for a Lie element a; the result has degree a.degree + f.degree."""
    if f.n != a.n:
        raise ValueError("mismatched generator counts")
    deg = a.degree + f.degree
    if a.is_zero() or f.is_zero():
        return LieElement(f.n, deg)
    return LieElement(f.n, deg, lie_coordinates(_apply_to_tensor(f.tensors(), a.tensor())))


def der_bracket(f: DerElement, g: DerElement) -> DerElement:
    """[f, g] with [f, g](x_i) = g(f(x_i)) - f(g(x_i))."""
    if f.n != g.n:
        raise ValueError("mismatched generator counts")
    n, k = f.n, f.degree + g.degree
    ft, gt = f.tensors(), g.tensors()
    terms = {}
    for i in sorted(set(ft) | set(gt)):
        acc: dict = {}
        if i in ft:
            for w, c in _apply_to_tensor(gt, ft[i]).items():
                acc[w] = acc.get(w, 0) + c
        if i in gt:
            for w, c in _apply_to_tensor(ft, gt[i]).items():
                acc[w] = acc.get(w, 0) - c
        for w, c in lie_coordinates(acc).items():
            terms[(i, w)] = c
    return DerElement(n, k, terms)


# ----------------------------------------------------- symmetric group

def _perm_map(sigma, n: int) -> dict:
    if isinstance(sigma, Mapping):
        m = {i: sigma.get(i, i) for i in range(1, n + 1)}
    else:
        sigma = list(sigma)
        if len(sigma) != n:
            raise ValueError(f"permutation must have length {n}")
        m = {i + 1: s for i, s in enumerate(sigma)}
    if sorted(m.values()) != list(range(1, n + 1)):
        raise ValueError("not a permutation of 1..n")
    return m


def sym_action(sigma, f: DerElement) -> DerElement:
    """Relabel x_i -> x_sigma(i) everywhere (sigma given as images of 1..n)."""
    s = _perm_map(sigma, f.n)
    comps: dict = {}
    for i, t in f.tensors().items():
        comps[s[i]] = {tuple(s[a] for a in w): c for w, c in t.items()}
    terms = {}
    for i, t in comps.items():
        for w, c in lie_coordinates(t).items():
            terms[(i, w)] = c
    return DerElement(f.n, f.degree, terms)


# -------------------------------------------------- tangential chart

def compositions(total: int, parts: int):
    """All tuples of ``parts`` nonnegative ints summing to ``total`` (lex descending)."""
    if parts == 1:
        yield (total,)
        return
    for a in range(total, -1, -1):
        for rest in compositions(total - a, parts - 1):
            yield (a,) + rest


@lru_cache(maxsize=None)
def _ad_image(n: int, m: tuple, i: int) -> tuple:
    """Lyndon coordinates of [b(m), x_i] as sorted (word, coeff) pairs."""
    a = LieElement(n, len(m), {m: 1})
    return tuple(sorted(fl.lie_bracket(a, LieElement.generator(n, i)).terms.items()))


@lru_cache(maxsize=None)
def tangential_chart(n: int, k: int) -> tuple:
    """Ordered chart pairs (i, m): i in 1..n, m a Lyndon word of length k."""
    return tuple((i, m) for i in range(1, n + 1) for m in fl.lyndon_words(n, k)
                 if not (k == 1 and m == (i,)))


def _block_key(n: int, i: int, m: tuple) -> tuple:
    c = list(fl.content(m, n))
    c[i - 1] += 1
    return tuple(c)


@lru_cache(maxsize=None)
def _chart_blocks(n: int, k: int) -> dict:
    blocks: dict = {}
    for pair in tangential_chart(n, k):
        blocks.setdefault(_block_key(n, *pair), []).append(pair)
    return {a: tuple(v) for a, v in sorted(blocks.items(), reverse=True)}


def _chart_element(n: int, k: int, coeffs: Mapping) -> DerElement:
    terms: dict = {}
    for (i, m), c in coeffs.items():
        for w, a in _ad_image(n, m, i):
            key = (i, w)
            terms[key] = terms.get(key, 0) + c * a
    return DerElement(n, k, terms)


@lru_cache(maxsize=None)
def _ad_solver(n: int, k: int, i: int, beta: tuple):
    # solve C = [a, x_i] for a of content beta - e_i, within L_n(k+1)_beta
    ms = [m for (j, m) in _chart_blocks(n, k).get(beta, ()) if j == i]
    idx = fl.basis_index(n, k + 1)
    e = Echelon(track=True)
    for m in ms:
        e.add({idx[w]: c for w, c in _ad_image(n, m, i)})
    return e, ms


def tangential_coordinates(f: DerElement):
    """Chart coordinates {(i, m): c} of a tangential f, or None if f is not tangential."""
    n, k = f.n, f.degree
    idx = fl.basis_index(n, k + 1)
    pieces: dict = {}
    for (i, w), c in f.terms.items():
        pieces.setdefault((i, fl.content(w, n)), {})[idx[w]] = c
    out = {}
    for (i, beta), vec in pieces.items():
        e, ms = _ad_solver(n, k, i, beta)
        if not ms:
            return None
        x = e.solve(vec)
        if x is None:
            return None
        for j, c in x.items():
            out[(i, ms[j])] = c
    return out


def is_tangential(f: DerElement) -> bool:
    return tangential_coordinates(f) is not None


def is_special(f: DerElement) -> bool:
    """Tangential and sum_i f(x_i) = 0."""
    if not is_tangential(f):
        return False
    total: dict = {}
    for (_, w), c in f.terms.items():
        total[w] = total.get(w, 0) + c
    return not any(total.values())


# ----------------------------------------------------------- subspaces

class DerSubspace:
    """Z-submodule of Der_n(k) given by a list of independent basis elements."""

    def __init__(self, n: int, k: int, basis: Sequence[DerElement], name: str = "",
                 solver=None, blocks: Mapping | None = None):
        self.n, self.k = n, k
        self.basis = list(basis)
        self.name = name
        self._solver = solver
        self.blocks = dict(blocks or {})
        self._lattice = None
        self._echelon = None

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def dim(self) -> int:
        return len(fl.lyndon_words(self.n, self.k + 1)) * self.n

    @property
    def lattice(self) -> Lattice:
        if self._lattice is None:
            self._lattice = Lattice(self.dim, [b.vector() for b in self.basis])
        return self._lattice

    def coordinates(self, f: DerElement):
        """Rational coordinates of f in the basis (list), or None if outside the Q-span."""
        if (f.n, f.degree) != (self.n, self.k):
            raise ValueError("element is in a different degree")
        if self._solver is not None:
            return self._solver(f)
        if self._echelon is None:
            e = Echelon(track=True)
            for b in self.basis:
                e.add(b.vector())
            self._echelon = e
        x = self._echelon.solve(f.vector())
        if x is None:
            return None
        return [x.get(j, 0) for j in range(self.rank)]

    def contains(self, f: DerElement, over: str = "Z") -> bool:
        x = self.coordinates(f)
        if x is None:
            return False
        return over.upper() == "Q" or all(isinstance(c, int) for c in x)

    def element(self, coords: Sequence) -> DerElement:
        terms: dict = {}
        for c, b in zip(coords, self.basis):
            if c:
                for key, a in b.terms.items():
                    terms[key] = terms.get(key, 0) + c * a
        return DerElement(self.n, self.k, terms)

    def __iter__(self):
        return iter(self.basis)

    def __len__(self):
        return len(self.basis)

    def __repr__(self):
        return f"DerSubspace({self.name or '?'}, n={self.n}, k={self.k}, rank={self.rank})"


def tangential_basis(n: int, k: int) -> DerSubspace:
    """Z-basis x_i^* (x) [m, x_i] of the tangential derivations of degree k."""
    if n < 2 or k < 1:
        raise ValueError("tangential_basis needs n >= 2 and k >= 1")
    chart = tangential_chart(n, k)
    basis = [_chart_element(n, k, {pair: 1}) for pair in chart]
    # independence: ad_{x_i} is injective on each content block (checked by rank)
    for (i, beta) in {(i, _block_key(n, i, m)) for i, m in chart}:
        e, ms = _ad_solver(n, k, i, beta)
        if e.rank != len(ms):
            raise ArithmeticError("tangential generators are dependent")
    pos = {pair: j for j, pair in enumerate(chart)}

    def solve(f):
        x = tangential_coordinates(f)
        if x is None:
            return None
        v = [0] * len(chart)
        for pair, c in x.items():
            v[pos[pair]] = c
        return v

    return DerSubspace(n, k, basis, name="p", solver=solve)


@lru_cache(maxsize=None)
def _special_block(n: int, k: int, alpha: tuple):
    """(chart pairs, Z-basis of the kernel block as dicts over local indices)."""
    pairs = _chart_blocks(n, k).get(alpha, ())
    idx: dict = {}
    rows: dict = {}
    for col, (i, m) in enumerate(pairs):
        for w, c in _ad_image(n, m, i):
            r = rows.setdefault(idx.setdefault(w, len(idx)), {})
            r[col] = c
    kern = kernel_lattice([rows[r] for r in sorted(rows)], ncols=len(pairs)) if pairs else []
    return pairs, kern


@lru_cache(maxsize=None)
def _block_solver(n: int, k: int, alpha: tuple):
    pairs, kern = _special_block(n, k, alpha)
    e = Echelon(track=True)
    for v in kern:
        e.add(v)
    return e, {p: j for j, p in enumerate(pairs)}


def special_rank(n: int, k: int) -> int:
    """Rank of the special derivations of degree k, from the block kernels."""
    return sum(len(_special_block(n, k, a)[1]) for a in _chart_blocks(n, k))


def _special_subspace(n: int, k: int, alphas) -> DerSubspace:
    basis, blocks, start = [], {}, 0
    for a in alphas:
        pairs, kern = _special_block(n, k, a)
        for v in kern:
            basis.append(_chart_element(n, k, {pairs[j]: c for j, c in v.items()}))
        blocks[a] = (start, start + len(kern))
        start += len(kern)

    def solve(f):
        x = tangential_coordinates(f)
        if x is None:
            return None
        grouped: dict = {}
        for (i, m), c in x.items():
            grouped.setdefault(_block_key(n, i, m), {})[(i, m)] = c
        out = [0] * start
        for a, part in grouped.items():
            if a not in blocks:
                return None
            e, pos = _block_solver(n, k, a)
            y = e.solve({pos[p]: c for p, c in part.items()})
            if y is None:
                return None
            s = blocks[a][0]
            for j, c in y.items():
                out[s + j] = c
        return out

    return DerSubspace(n, k, basis, name="b", solver=solve, blocks=blocks)


@lru_cache(maxsize=None)
def special_kernel(n: int, k: int) -> DerSubspace:
    """Z-basis of the special derivations of degree k (union of block kernels)."""
    if n < 2 or k < 1:
        raise ValueError("special_kernel needs n >= 2 and k >= 1")
    return _special_subspace(n, k, list(_chart_blocks(n, k)))


def _check_composition(n: int, k: int, alpha) -> tuple:
    alpha = tuple(int(a) for a in alpha)
    if any(a < 0 for a in alpha) or sum(alpha) != k + 1:
        raise ValueError(f"{alpha} is not a composition of {k + 1}")
    if len(alpha) > n:
        if any(alpha[n:]):
            raise ValueError(f"composition {alpha} needs more than n={n} generators")
        alpha = alpha[:n]
    return alpha + (0,) * (n - len(alpha))


def component_basis(n: int, k: int, alpha) -> DerSubspace:
    """The part of the special algebra whose brackets have content alpha."""
    alpha = _check_composition(n, k, alpha)
    return _special_subspace(n, k, [alpha] if alpha in _chart_blocks(n, k) else [])


def orbit_decomposition(n: int, k: int) -> dict:
    """{partition: (component rank, orbit size)} summing to the full rank."""
    out: dict = {}
    for a in compositions(k + 1, n):
        lam = tuple(sorted((x for x in a if x), reverse=True))
        if lam not in out:
            rep = lam + (0,) * (n - len(lam))
            out[lam] = [len(_special_block(n, k, rep)[1]) if rep in _chart_blocks(n, k) else 0, 0]
        out[lam][1] += 1
    return {lam: tuple(v) for lam, v in sorted(out.items(), reverse=True)}


# ------------------------------------------------------- named elements

def expand_right(y, x) -> list:
    """[y, x] with a tree x rewritten as left-normed brackets ending in a leaf.

    Returns (coeff, tree) pairs whose trees all have a leaf as right child.
    """
    if isinstance(x, int):
        return [(1, (y, x))]
    a, b = x
    return expand_right((y, a), b) + [(-c, t) for c, t in expand_right((y, b), a)]


def tangential_from_brackets(n: int, pieces: Iterable, check: bool = True) -> DerElement:
    """sum c * x_p^* (x) [A, x_p] from pairs (c, (A, p)); the bracket sum must vanish."""
    pieces = [(canon(c), t) for c, t in pieces]
    if not pieces:
        raise ValueError("empty element")
    k = fl.degree(pieces[0][1]) - 1
    triples = []
    for c, t in pieces:
        if isinstance(t, int) or not isinstance(t[1], int):
            raise ValueError("each bracket must end in a single generator")
        triples.append((c, t[1], t))
    f = der_element(n, k, triples)
    if check and not is_special(f):
        raise NotSpecialError("bracket sum does not vanish")
    return f


def _L(*xs):
    return fl.left_normed(*xs)


def _t(i, j):
    return [(1, (j, i)), (1, (i, j))]


def _tau2(i, j, l):
    return [(1, _L(j, l, i)), (1, _L(l, i, j)), (1, _L(i, j, l))]


def _b2(i, j, l):
    return [(1, _L(l, j, i)), (-1, _L(l, i, j)), (1, _L(j, i, l))]


def _d3(i, j):
    return [(1, _L(j, i, j, i)), (1, _L(i, j, i, j))]


def _b4(i, j, l, p):
    return [(1, _L(l, j, p, i)), (1, _L(p, i, l, j)), (-1, _L(p, i, j, l)), (1, _L(j, l, i, p))]


def _b5(i, j, l, p, q):
    return [(1, _L(i, j, l, p, q)), (-1, _L(i, j, l, q, p)), (-1, _L(p, q, l, i, j)),
            (1, _L(p, q, l, j, i)), (-1, _L(i, j, (p, q), l))]


def _b6(i, j, l, p, q, r):
    return [(1, _L(r, q, p, l, j, i)), (-1, _L(r, q, p, l, i, j)), (-1, _L(r, q, p, (j, i), l)),
            (-1, _L(i, j, l, (q, r), p)), (-1, _L(i, j, l, p, r, q)), (1, _L(i, j, l, p, q, r))]


def _n3(i, j, l):
    return _b6(l, j, i, l, j, i) + [(-c, t) for c, t in _b6(l, j, l, i, j, i)]


def _n4(i, j, l, p):
    return _b6(p, j, j, i, l, i)


# tag -> (builder, arity, indices that must be pairwise distinct: 0 = all, None = free)
NAMED_ELEMENTS = {
    "t": (_t, 2, 0),
    "tau2": (_tau2, 3, 0),
    "b2": (_b2, 3, 0),
    "d3": (_d3, 2, 0),
    "b4": (_b4, 4, None),
    "b5": (_b5, 5, None),
    "b6": (_b6, 6, None),
    "n3": (_n3, 3, 0),
    "n4": (_n4, 4, 0),
}


def named_element(tag: str, indices: Sequence[int], n: int | None = None) -> DerElement:
    """Construct one of the named special derivations; asserts the special condition."""
    if tag not in NAMED_ELEMENTS:
        raise ValueError(f"unknown element {tag!r}; choose from {sorted(NAMED_ELEMENTS)}")
    build, arity, distinct = NAMED_ELEMENTS[tag]
    idx = tuple(int(i) for i in indices)
    if len(idx) != arity:
        raise ValueError(f"{tag} takes {arity} indices, got {len(idx)}")
    if min(idx) < 1:
        raise ValueError("indices are 1-based")
    if distinct == 0 and len(set(idx)) != arity:
        raise ValueError(f"{tag} needs pairwise distinct indices, got {idx}")
    if n is None:
        n = max(idx)
    elif max(idx) > n:
        raise ValueError(f"index {max(idx)} exceeds n={n}")
    f = tangential_from_brackets(n, build(*idx), check=False)
    if not is_special(f):
        raise NotSpecialError(f"{tag}{idx} fails the special condition")
    return f


def all_permutations(n: int):
    return itertools.permutations(range(1, n + 1))


def random_special(rng, n: int, k: int, terms: int = 3) -> DerElement:
    """Small random integer combination of basis vectors of the special algebra."""
    b = special_kernel(n, k)
    if not b.basis:
        return DerElement(n, k)
    coeffs = [0] * b.rank
    for _ in range(terms):
        coeffs[rng.randrange(b.rank)] += rng.choice([-2, -1, 1, 2, 3])
    return b.element(coeffs)


def random_tangential(rng, n: int, k: int, terms: int = 3) -> DerElement:
    chart = tangential_chart(n, k)
    coeffs: dict = {}
    for _ in range(terms):
        p = chart[rng.randrange(len(chart))]
        coeffs[p] = coeffs.get(p, 0) + rng.choice([-2, -1, 1, 2])
    return _chart_element(n, k, coeffs)


def random_derivation(rng, n: int, k: int, terms: int = 3) -> DerElement:
    words = fl.lyndon_words(n, k + 1)
    t: dict = {}
    for _ in range(terms):
        key = (rng.randrange(1, n + 1), words[rng.randrange(len(words))])
        t[key] = t.get(key, 0) + rng.choice([-2, -1, 1, 2, 3])
    return DerElement(n, k, t)

