import random
from collections import Counter
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from speciallie import freelie as fl
from speciallie.derivations import (DerElement, NotSpecialError, apply_derivation, component_basis,
                                    der_bracket, der_element, is_special, is_tangential, named_element,
                                    orbit_decomposition, random_derivation, random_special,
                                    random_tangential, special_kernel, sym_action, tangential_basis)
from speciallie.exactlin import quotient_from_relations


# ---- tensor-level oracle, independent of the Lyndon machinery

def naive(t):
    if isinstance(t, int):
        return Counter({(t,): 1})
    a, b = naive(t[0]), naive(t[1])
    out = Counter()
    for u, c in a.items():
        for v, d in b.items():
            out[u + v] += c * d
            out[v + u] -= c * d
    return out


def images(f):
    """{i: tensor of f(x_i)} built from the standard bracketing of each coordinate."""
    out = {}
    for (i, w), c in f.terms.items():
        acc = out.setdefault(i, Counter())
        for u, d in naive(fl.standard_bracketing(w)).items():
            acc[u] += c * d
    return out


def act(img, tensor):
    out = Counter()
    for w, c in tensor.items():
        for pos, letter in enumerate(w):
            for u, d in img.get(letter, {}).items():
                out[w[:pos] + u + w[pos + 1:]] += c * d
    return out


def clean(t):
    return {w: c for w, c in t.items() if c}


def oracle_bracket(f, g):
    fi, gi = images(f), images(g)
    out = {}
    for i in range(1, f.n + 1):
        t = act(gi, fi.get(i, {}))
        t.subtract(act(fi, gi.get(i, {})))
        out[i] = clean(t)
    return out


def oracle_special(f):
    total = Counter()
    for t in images(f).values():
        total.update(t)
    return not clean(total)


# ---- ranks

@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_special_rank_formula(n):
    for k in range(1, 6):
        want = comb(n, 2) if k == 1 else n * fl.witt_rank(n, k) - fl.witt_rank(n, k + 1)
        assert special_kernel(n, k).rank == want


def test_tangential_ranks():
    assert tangential_basis(2, 1).rank == 2
    assert tangential_basis(3, 1).rank == 6
    assert tangential_basis(3, 2).rank == 9
    assert tangential_basis(3, 3).rank == 3 * fl.witt_rank(3, 3)


@pytest.mark.parametrize("n,k", [(3, 2), (3, 3), (4, 3), (3, 4)])
def test_special_basis_is_special_and_saturated(n, k):
    b = special_kernel(n, k)
    for f in b.basis:
        assert oracle_special(f) and is_tangential(f)
    dim = n * fl.witt_rank(n, k + 1)
    assert quotient_from_relations(dim, [f.vector() for f in b.basis]).is_free


def test_small_special_spaces():
    b = special_kernel(2, 1)
    t = named_element("t", (1, 2), 2)
    assert b.rank == 1 and b.contains(t)
    assert special_kernel(3, 2).rank == 1
    gen = der_element(3, 2, [(1, 1, fl.left_normed(3, 2, 1)), (-1, 2, fl.left_normed(3, 1, 2)),
                            (1, 3, fl.left_normed(2, 1, 3))])
    assert is_special(gen) and special_kernel(3, 2).contains(gen)
    assert special_kernel(3, 3).rank == 6


COMPONENTS = [(3, (2, 2), 1), (3, (2, 1, 1), 1), (3, (1, 1, 1, 1), 2), (4, (4, 1), 0), (4, (3, 2), 0),
              (4, (3, 1, 1), 1), (4, (2, 2, 1), 1), (4, (2, 1, 1, 1), 3), (4, (1, 1, 1, 1, 1), 6)]


@pytest.mark.parametrize("k,alpha,want", COMPONENTS)
def test_component_ranks(k, alpha, want):
    n0 = max(len(alpha), 2)
    for n in (n0, n0 + 1):
        assert component_basis(n, k, alpha).rank == want


def test_component_rejects_bad_composition():
    with pytest.raises(ValueError):
        component_basis(3, 3, (2, 1))
    with pytest.raises(ValueError):
        component_basis(2, 3, (1, 1, 1, 1))


@pytest.mark.parametrize("n,k", [(n, k) for n in range(2, 6) for k in range(1, 5)])
def test_orbit_decomposition_sums_to_rank(n, k):
    total = sum(r * size for r, size in orbit_decomposition(n, k).values())
    assert total == special_kernel(n, k).rank


# ---- bracket

def test_displayed_bracket():
    f = der_element(3, 3, [(1, 1, fl.left_normed(1, 2, 3, 2))])
    g = der_element(3, 1, [(1, 2, (3, 1))])
    want = der_element(3, 4, [(1, 1, fl.left_normed(1, (3, 1), 3, 2)),
                              (1, 1, fl.left_normed(1, 2, 3, (3, 1))),
                              (-1, 2, (3, fl.left_normed(1, 2, 3, 2)))])
    assert der_bracket(f, g) == want


def test_t_bracket_gives_tau2():
    t12, t13 = named_element("t", (1, 2), 3), named_element("t", (1, 3), 3)
    want = der_element(3, 2, [(1, 1, fl.left_normed(2, 3, 1)), (1, 2, fl.left_normed(3, 1, 2)),
                              (1, 3, fl.left_normed(1, 2, 3))])
    assert der_bracket(t12, t13) == want == named_element("tau2", (1, 2, 3))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 3), st.integers(1, 3), st.integers(1, 2))
def test_bracket_matches_oracle(seed, n, p, q):
    rng = random.Random(seed)
    f, g = random_derivation(rng, n, p), random_derivation(rng, n, q)
    got = images(der_bracket(f, g))
    want = oracle_bracket(f, g)
    for i in range(1, n + 1):
        assert clean(got.get(i, {})) == want[i]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 3))
def test_jacobi_in_der(seed, n):
    rng = random.Random(seed)
    f, g, h = (random_derivation(rng, n, rng.randint(1, 2)) for _ in range(3))
    br = der_bracket
    assert (br(f, g) + br(g, f)).is_zero()
    assert (br(f, br(g, h)) + br(g, br(h, f)) + br(h, br(f, g))).is_zero()
    assert br(f, f).is_zero()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 4))
def test_special_closure(seed, n):
    rng = random.Random(seed)
    f, g = random_special(rng, n, rng.randint(1, 3)), random_special(rng, n, rng.randint(1, 2))
    h = der_bracket(f, g)
    assert is_special(h) and oracle_special(h)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 3))
def test_leibniz(seed, n):
    rng = random.Random(seed)
    f = random_tangential(rng, n, rng.randint(1, 3))
    words_a, words_b = fl.lyndon_words(n, 2), fl.lyndon_words(n, rng.randint(1, 2))
    a = fl.LieElement(n, 2, {words_a[rng.randrange(len(words_a))]: 1})
    b = fl.LieElement(n, len(words_b[0]), {words_b[rng.randrange(len(words_b))]: rng.choice([1, -2])})
    lhs = apply_derivation(f, fl.lie_bracket(a, b))
    rhs = fl.lie_bracket(apply_derivation(f, a), b) + fl.lie_bracket(a, apply_derivation(f, b))
    assert (lhs - rhs).is_zero()
    # and against the tensor oracle
    assert lhs.tensor() == clean(act(images(f), fl.lie_bracket(a, b).tensor()))


# ---- symmetric group

def test_sym_action():
    t12 = named_element("t", (1, 2), 3)
    assert sym_action([2, 1, 3], t12) == t12
    assert sym_action([1, 2, 3], t12) == t12
    assert sym_action([3, 2, 1], t12) == named_element("t", (2, 3), 3)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.permutations([1, 2, 3, 4]))
def test_sym_action_is_automorphism(seed, sigma):
    rng = random.Random(seed)
    f, g = random_special(rng, 4, 2), random_special(rng, 4, 1)
    assert sym_action(sigma, der_bracket(f, g)) == der_bracket(sym_action(sigma, f), sym_action(sigma, g))


# ---- named elements and relations

def b(*idx, n=5):
    return named_element({4: "b4", 5: "b5", 6: "b6"}[len(idx)], idx, n)


def test_named_elements_are_special():
    for tag, idx in [("b4", (1, 2, 3, 4)), ("b5", (2, 1, 1, 1, 3)), ("b6", (1, 2, 3, 4, 5, 6)),
                     ("n3", (1, 2, 3)), ("n4", (1, 2, 3, 4)), ("d3", (1, 2)), ("b2", (1, 2, 3))]:
        f = named_element(tag, idx, 6)
        assert oracle_special(f)


def test_b5_relations():
    assert b(1, 4, 1, 2, 3) == b(1, 2, 1, 3, 4) - b(1, 3, 1, 2, 4) - 2 * b(3, 1, 4, 2, 1)
    for i, j, l, p, q in [(1, 2, 3, 4, 5), (2, 1, 1, 1, 3), (1, 2, 2, 3, 4)]:
        assert (b(i, j, l, p, q) + b(j, i, l, p, q)).is_zero()
        assert (b(i, j, l, p, q) + b(i, j, l, q, p)).is_zero()
        assert b(i, j, l, p, q) == b(p, q, l, j, i)


def t4(i, j):
    return named_element("t", (i, j), 4)


def test_relation_b4_t23():
    assert der_bracket(b(1, 2, 3, 4, n=4), t4(2, 3)) == b(3, 2, 3, 4, 1, n=4) - b(2, 3, 2, 4, 1, n=4)


def test_relation_t13_b4():
    assert der_bracket(t4(1, 3), b(1, 2, 3, 4, n=4)) == b(3, 1, 2, 4, 1, n=4) - b(3, 2, 4, 3, 1, n=4)


def test_relation_b4_t34():
    assert der_bracket(b(1, 2, 3, 4, n=4), t4(3, 4)) == b(4, 3, 2, 4, 1, n=4) + b(3, 4, 1, 3, 2, n=4)


def test_relation_b_jjip():
    assert der_bracket(b(2, 2, 1, 3, n=4), t4(3, 4)) == b(1, 2, 2, 3, 4, n=4)


def test_relation_with_tau3():
    t = {(i, j): named_element("t", (i, j), 4) for i in range(1, 5) for j in range(i + 1, 5)}
    tau3 = der_bracket(t[1, 2], der_bracket(t[1, 2], t[1, 3]))
    lhs = der_bracket(t[1, 4], tau3)
    assert lhs == b(2, 3, 2, 1, 4, n=4) + b(3, 1, 2, 4, 1, n=4) + b(2, 1, 3, 4, 1, n=4)


def test_named_element_validation():
    with pytest.raises(ValueError, match="distinct"):
        named_element("t", (1, 1), 2)
    with pytest.raises(ValueError, match="takes 4"):
        named_element("b4", (1, 2, 3), 4)
    with pytest.raises(ValueError, match="exceeds"):
        named_element("t", (1, 5), 3)
    with pytest.raises(ValueError, match="unknown"):
        named_element("zz", (1, 2), 3)


def test_der_element_checks_special_in_builder():
    with pytest.raises(NotSpecialError):
        from speciallie.derivations import tangential_from_brackets
        tangential_from_brackets(3, [(1, (2, 1))])


def test_json_roundtrip():
    f = b(2, 1, 1, 1, 3, n=3)
    assert DerElement.from_json(f.to_json()) == f
    g = named_element("n3", (1, 2, 3), 3)
    assert DerElement.from_json(g.to_json()) == g


def test_vector_roundtrip():
    f = b(1, 2, 3, 4, 5)
    assert DerElement.from_vector(f.n, f.degree, f.vector()) == f
