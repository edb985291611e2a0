import itertools
from collections import Counter

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from speciallie import freelie as fl


# ---- independent oracles

def brute_lyndon(n, k):
    out = []
    for w in itertools.product(range(1, n + 1), repeat=k):
        if all(w < w[i:] + w[:i] for i in range(1, k)):
            out.append(w)
    return out


def naive_embed(t):
    if isinstance(t, int):
        return Counter({(t,): 1})
    a, b = naive_embed(t[0]), naive_embed(t[1])
    out = Counter()
    for u, c in a.items():
        for v, d in b.items():
            out[u + v] += c * d
            out[v + u] -= c * d
    return {w: c for w, c in out.items() if c}


def necklace_formula(n, k):
    return sum(sympy.mobius(d) * n ** (k // d) for d in sympy.divisors(k)) // k


@pytest.mark.parametrize("n,k", [(n, k) for n in range(1, 4) for k in range(1, 7)])
def test_lyndon_words_match_brute_force(n, k):
    assert list(fl.lyndon_words(n, k)) == brute_lyndon(n, k)


def test_witt_ranks_against_necklace_formula():
    for n in range(1, 7):
        for k in range(1, 9):
            assert fl.witt_rank(n, k) == necklace_formula(n, k) == len(fl.basis_monomials(n, k))


def test_known_values():
    assert fl.witt_rank(2, 6) == 9
    assert fl.witt_rank(3, 2) == 3
    assert fl.lyndon_words(2, 3) == ((1, 1, 2), (1, 2, 2))
    assert fl.standard_bracketing((1, 1, 2)) == (1, (1, 2))


@pytest.mark.parametrize("n,k", [(2, 5), (3, 4), (4, 3)])
def test_embedding_matches_naive_expansion(n, k):
    for w in fl.lyndon_words(n, k):
        t = fl.standard_bracketing(w)
        assert fl.embed_tree(t) == naive_embed(t)


def test_lyndon_embedding_is_unitriangular():
    for w in fl.lyndon_words(3, 5):
        emb = fl.lyndon_tensor(w)
        assert emb[w] == 1
        assert all(u >= w for u in emb)


def random_tree(draw, n, k):
    if k == 1:
        return draw(st.integers(1, n))
    split = draw(st.integers(1, k - 1))
    return (random_tree(draw, n, split), random_tree(draw, n, k - split))


@st.composite
def trees(draw, n=3, max_k=6):
    return random_tree(draw, n, draw(st.integers(1, max_k)))


@settings(max_examples=200, deadline=None)
@given(trees())
def test_normalize_roundtrip(t):
    a = fl.normalize(t, 3)
    # the tensor of the normal form equals the naive tensor of the tree
    assert a.tensor() == naive_embed(t)


@settings(max_examples=200, deadline=None)
@given(trees(max_k=3), trees(max_k=3), trees(max_k=2))
def test_jacobi_and_antisymmetry(x, y, z):
    a, b, c = (fl.normalize(t, 3) for t in (x, y, z))
    br = fl.lie_bracket
    assert (br(a, b) + br(b, a)).is_zero()
    assert (br(a, br(b, c)) + br(b, br(c, a)) + br(c, br(a, b))).is_zero()


def test_bracket_matches_tree_normalization():
    a, b = fl.normalize((1, 2), 3), fl.normalize(((1, 3), 2), 3)
    assert fl.lie_bracket(a, b) == fl.normalize(((1, 2), ((1, 3), 2)), 3)


def test_lie_coordinates_rejects_non_lie_tensor():
    with pytest.raises(ValueError):
        fl.lie_coordinates({(1, 2): 1}, check=True)


def test_left_normed_and_json():
    t = fl.left_normed(1, 2, 3, 2)
    assert t == (((1, 2), 3), 2)
    assert fl.tree_from_json(fl.tree_to_json(t)) == t
    assert fl.tree_from_json([1, 2, 3, 2]) == t
    assert fl.content((1, 2, 3, 2), 3) == (1, 2, 1)
    assert fl.degree(t) == 4 and fl.leaves(t) == [1, 2, 3, 2]


def test_relabel_commutes_with_normalize():
    t = (((1, 2), 3), (1, 3))
    sigma = {1: 3, 2: 1, 3: 2}
    lhs = fl.normalize(fl.relabel(t, sigma), 3)
    emb = {tuple(sigma[x] for x in w): c for w, c in naive_embed(t).items()}
    assert lhs.tensor() == emb


def test_mobius():
    assert [fl.mobius(d) for d in range(1, 11)] == [sympy.mobius(d) for d in range(1, 11)]
