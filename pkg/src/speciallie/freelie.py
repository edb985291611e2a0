"""Free Lie algebra on generators x_1, ..., x_n.

Basis elements are Lyndon words (tuples of 1-based letters) bracketed by
their standard factorization.  A bracket tree is either an ``int`` leaf or a
pair ``(left, right)``; a left-normed commutator [x_a, x_b, x_c] is the tree
``((a, b), c)``.

Coordinates are computed through the tensor embedding: the embedded Lyndon
monomial of a word ``w`` is ``w`` plus lexicographically larger words, so a Lie
polynomial is decomposed by repeatedly peeling off its smallest word.
"""
from __future__ import annotations

import heapq
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Union

Word = tuple
BracketTree = Union[int, tuple]
Scalar = Union[int, Fraction]


def canon(c) -> Scalar:
    """Return ``c`` as an ``int`` when integral, else as a reduced Fraction."""
    if isinstance(c, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(c, int):
        return c
    if isinstance(c, str):
        c = Fraction(c)
    elif not isinstance(c, Fraction):
        if not isinstance(c, Rational):
            raise TypeError(f"inexact coefficient {c!r}")
        c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


def coeff_str(c: Scalar) -> str:
    return str(c)


# ---------------------------------------------------------------- counting

def mobius(d: int) -> int:
    result, p = 1, 2
    while p * p <= d:
        if d % p == 0:
            d //= p
            if d % p == 0:
                return 0
            result = -result
        p += 1
    return -result if d > 1 else result


def divisors(k: int) -> list[int]:
    return [d for d in range(1, k + 1) if k % d == 0]


def witt_rank(n: int, k: int) -> int:
    """Rank of the degree-k part of the free Lie algebra on n generators."""
    if n < 1 or k < 1:
        raise ValueError("witt_rank needs n >= 1 and k >= 1")
    total = sum(mobius(d) * n ** (k // d) for d in divisors(k))
    assert total % k == 0
    return total // k


# ----------------------------------------------------------- Lyndon words

@lru_cache(maxsize=None)
def is_lyndon(w: Word) -> bool:
    return all(w < w[i:] + w[:i] for i in range(1, len(w))) if w else False


def _duval(n: int, k: int) -> Iterator[Word]:
    # Duval's generation of Lyndon words of length <= k in lex order.
    w = [0]
    while w:
        if len(w) <= k:
            yield tuple(x + 1 for x in w)
        m = len(w)
        while len(w) < k:
            w.append(w[len(w) - m])
        while w and w[-1] == n - 1:
            w.pop()
        if w:
            w[-1] += 1


@lru_cache(maxsize=None)
def lyndon_words(n: int, k: int) -> tuple[Word, ...]:
    """All Lyndon words of length ``k`` over ``1..n`` in lexicographic order."""
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    return tuple(w for w in _duval(n, k) if len(w) == k)


@lru_cache(maxsize=None)
def standard_bracketing(w: Word) -> BracketTree:
    if len(w) == 1:
        return w[0]
    for i in range(1, len(w)):
        if is_lyndon(w[i:]):
            return (standard_bracketing(w[:i]), standard_bracketing(w[i:]))
    raise ValueError(f"{w} is not a Lyndon word")


@lru_cache(maxsize=None)
def basis_monomials(n: int, k: int) -> tuple[BracketTree, ...]:
    """Lyndon basis of L_n(k) as bracket trees, ordered by their words."""
    return tuple(standard_bracketing(w) for w in lyndon_words(n, k))


@lru_cache(maxsize=None)
def basis_index(n: int, k: int) -> dict:
    return {w: i for i, w in enumerate(lyndon_words(n, k))}


def content(w: Iterable[int], n: int) -> tuple[int, ...]:
    counts = [0] * n
    for a in w:
        counts[a - 1] += 1
    return tuple(counts)


# ------------------------------------------------------------------ trees

def leaves(t: BracketTree) -> list[int]:
    if isinstance(t, int):
        return [t]
    return leaves(t[0]) + leaves(t[1])


def degree(t: BracketTree) -> int:
    return 1 if isinstance(t, int) else degree(t[0]) + degree(t[1])


def left_normed(*letters) -> BracketTree:
    """[a1, a2, ..., am] = [[...[a1, a2], ...], am]; entries may be trees."""
    if not letters:
        raise ValueError("empty commutator")
    t = letters[0]
    for a in letters[1:]:
        t = (t, a)
    return t


def relabel(t: BracketTree, sigma: Mapping[int, int]) -> BracketTree:
    if isinstance(t, int):
        return sigma[t]
    return (relabel(t[0], sigma), relabel(t[1], sigma))


def tree_from_json(obj) -> BracketTree:
    """Nested arrays of 1-based ints; a list of length > 2 is left-normed."""
    if isinstance(obj, bool):
        raise ValueError("invalid bracket leaf")
    if isinstance(obj, int):
        if obj < 1:
            raise ValueError(f"generator index {obj} must be >= 1")
        return obj
    if isinstance(obj, (list, tuple)):
        if len(obj) < 2:
            if len(obj) == 1:
                return tree_from_json(obj[0])
            raise ValueError("empty bracket")
        return left_normed(*(tree_from_json(x) for x in obj))
    raise ValueError(f"cannot read bracket from {obj!r}")


def tree_to_json(t: BracketTree):
    if isinstance(t, int):
        return t
    return [tree_to_json(t[0]), tree_to_json(t[1])]


def tree_str(t: BracketTree) -> str:
    if isinstance(t, int):
        return f"x{t}"
    return f"[{tree_str(t[0])},{tree_str(t[1])}]"


# ------------------------------------------------------ tensor embedding

def _mul(a: Mapping, b: Mapping) -> dict:
    out: dict = {}
    for u, x in a.items():
        for v, y in b.items():
            w = u + v
            out[w] = out.get(w, 0) + x * y
    return out


def _commutator(a: Mapping, b: Mapping) -> dict:
    out = _mul(a, b)
    for w, c in _mul(b, a).items():
        out[w] = out.get(w, 0) - c
    return {w: c for w, c in out.items() if c}


@lru_cache(maxsize=200_000)
def _embed_tree(t: BracketTree) -> dict:
    if isinstance(t, int):
        return {(t,): 1}
    return _commutator(_embed_tree(t[0]), _embed_tree(t[1]))


def embed_tree(t: BracketTree) -> dict:
    """Tensor embedding of a bracket tree as {word: int}."""
    return dict(_embed_tree(t))


@lru_cache(maxsize=None)
def lyndon_tensor(w: Word) -> dict:
    """Embedding of the Lyndon basis monomial indexed by ``w``."""
    return _embed_tree(standard_bracketing(w))


@lru_cache(maxsize=None)
def _lyndon_part(w: Word) -> tuple:
    # (word, coeff) pairs of Lyndon words occurring in the embedded monomial
    return tuple((u, c) for u, c in lyndon_tensor(w).items() if is_lyndon(u))


def lie_coordinates(tensor: Mapping[Word, Scalar], check: bool = False) -> dict:
    """Lyndon-basis coordinates of a Lie polynomial given by its embedding.

    Only coefficients of Lyndon words are read (the transition matrix is
    unitriangular).  With ``check=True`` the full tensor is re-embedded and
    compared, raising ValueError when the input is not a Lie element.
    """
    y = {w: c for w, c in tensor.items() if c and is_lyndon(w)}
    heap = list(y)
    heapq.heapify(heap)
    out = {}
    while heap:
        w = heapq.heappop(heap)
        c = y.pop(w, 0)
        if not c:
            continue
        out[w] = c
        for u, a in _lyndon_part(w):
            if u == w:
                continue
            if u in y:
                y[u] -= c * a
            else:
                y[u] = -c * a
                heapq.heappush(heap, u)
    if check:
        back: dict = {}
        for w, c in out.items():
            for u, a in lyndon_tensor(w).items():
                back[u] = back.get(u, 0) + c * a
        diff = {u for u in set(back) | set(tensor) if back.get(u, 0) != tensor.get(u, 0)}
        if diff:
            raise ValueError("tensor is not in the image of the free Lie algebra")
    return out


# ------------------------------------------------------------ elements

class TensorElement:
    """Homogeneous element of H^{(x)k}: {word: coefficient}."""

    __slots__ = ("n", "degree", "terms")

    def __init__(self, n: int, degree: int, terms: Mapping[Word, Scalar] = ()):
        self.n, self.degree = n, degree
        clean = {}
        for w, c in dict(terms).items():
            c = canon(c)
            if not c:
                continue
            if len(w) != degree or any(not 1 <= a <= n for a in w):
                raise ValueError(f"word {w} does not fit (n={n}, degree={degree})")
            clean[tuple(w)] = c
        self.terms = clean

    def __eq__(self, other):
        if not isinstance(other, TensorElement):
            return NotImplemented
        return (self.n, self.degree, self.terms) == (other.n, other.degree, other.terms)

    def __add__(self, other: "TensorElement") -> "TensorElement":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return TensorElement(self.n, self.degree, out)

    def __neg__(self):
        return TensorElement(self.n, self.degree, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, s):
        return TensorElement(self.n, self.degree, {w: s * c for w, c in self.terms.items()})

    def concat(self, other: "TensorElement") -> "TensorElement":
        return TensorElement(self.n, self.degree + other.degree, _mul(self.terms, other.terms))

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{''.join(map(str, w))}" for w, c in sorted(self.terms.items()))


class LieElement:
    """Element of L_n(k) in Lyndon-basis coordinates {Lyndon word: coeff}."""

    __slots__ = ("n", "degree", "terms")

    def __init__(self, n: int, degree: int, terms: Mapping[Word, Scalar] = ()):
        if degree < 1:
            raise ValueError("degree must be >= 1")
        self.n, self.degree = n, degree
        clean = {}
        for w, c in dict(terms).items():
            c = canon(c)
            if c:
                w = tuple(w)
                if len(w) != degree or not is_lyndon(w) or max(w) > n:
                    raise ValueError(f"{w} is not a basis monomial of L_{n}({degree})")
                clean[w] = c
        self.terms = clean

    @classmethod
    def generator(cls, n: int, i: int) -> "LieElement":
        return cls(n, 1, {(i,): 1})

    def __eq__(self, other):
        if not isinstance(other, LieElement):
            return NotImplemented
        return (self.n, self.degree, self.terms) == (other.n, other.degree, other.terms)

    def __add__(self, other: "LieElement") -> "LieElement":
        if (self.n, self.degree) != (other.n, other.degree):
            raise ValueError("cannot add elements of different spaces")
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return LieElement(self.n, self.degree, out)

    def __neg__(self):
        return LieElement(self.n, self.degree, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, s):
        s = canon(s)
        return LieElement(self.n, self.degree, {w: s * c for w, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def vector(self) -> list:
        idx = basis_index(self.n, self.degree)
        v = [0] * len(idx)
        for w, c in self.terms.items():
            v[idx[w]] = c
        return v

    def tensor(self) -> dict:
        out: dict = {}
        for w, c in self.terms.items():
            for u, a in lyndon_tensor(w).items():
                out[u] = out.get(u, 0) + c * a
        return {u: c for u, c in out.items() if c}

    def to_json(self) -> list:
        return [{"word": tree_to_json(standard_bracketing(w)), "coeff": coeff_str(c)}
                for w, c in sorted(self.terms.items())]

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{tree_str(standard_bracketing(w))}"
                          for w, c in sorted(self.terms.items()))


def _as_combination(t) -> list:
    # a list means [(coeff, tree), ...]; anything else is a single tree
    if isinstance(t, list):
        return [(canon(c), tree) for c, tree in t]
    return [(1, t)]


def normalize(t, n: int | None = None) -> LieElement:
    """Lyndon coordinates of a bracket tree, or of a list of ``(coeff, tree)`` pairs."""
    combo = _as_combination(t)
    if not combo:
        raise ValueError("empty combination; degree undefined")
    degs = {degree(tree) for _, tree in combo}
    if len(degs) != 1:
        raise ValueError("combination is not homogeneous")
    k = degs.pop()
    letters = [a for _, tree in combo for a in leaves(tree)]
    if min(letters) < 1:
        raise ValueError("generator indices are 1-based")
    if n is None:
        n = max(letters)
    elif max(letters) > n:
        raise ValueError(f"generator index exceeds n={n}")
    tensor: dict = {}
    for c, tree in combo:
        for w, a in _embed_tree(tree).items():
            tensor[w] = tensor.get(w, 0) + c * a
    return LieElement(n, k, lie_coordinates(tensor))


def from_tensor(n: int, tensor: Mapping[Word, Scalar], check: bool = False) -> LieElement:
    tensor = {w: c for w, c in tensor.items() if c}
    if not tensor:
        raise ValueError("zero tensor has no degree; construct LieElement directly")
    k = len(next(iter(tensor)))
    return LieElement(n, k, lie_coordinates(tensor, check=check))


def lie_bracket(a: LieElement, b: LieElement) -> LieElement:
    if a.n != b.n:
        raise ValueError("elements live in different free Lie algebras")
    k = a.degree + b.degree
    if a.is_zero() or b.is_zero():
        return LieElement(a.n, k)
    return LieElement(a.n, k, lie_coordinates(_commutator(a.tensor(), b.tensor())))


def tensor_embedding(a: LieElement) -> TensorElement:
    return TensorElement(a.n, a.degree, a.tensor())
