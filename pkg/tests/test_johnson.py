from math import comb

import pytest
import sympy

from speciallie.derivations import der_bracket, is_special, named_element, special_kernel
from speciallie.exactlin import QuotientPresentation
from speciallie.johnson import (braid_lcs_rank, johnson_cokernel, johnson_degree, johnson_image,
                                kernel_equality_check, special_coordinates, t_generators)


def lcs_oracle(n, k):
    # P_n is an iterated semidirect product of free groups F_1, ..., F_{n-1}
    return sum(sum(sympy.mobius(d) * j ** (k // d) for d in sympy.divisors(k)) // k for j in range(1, n))


def test_braid_lcs_rank_values():
    assert [braid_lcs_rank(4, k) for k in range(1, 5)] == [6, 4, 10, 21]
    for n in range(2, 7):
        for k in range(1, 8):
            assert braid_lcs_rank(n, k) == lcs_oracle(n, k)
    with pytest.raises(ValueError):
        braid_lcs_rank(1, 1)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_johnson_ranks(n):
    img = johnson_image(n, 5)
    assert img.ranks() == {k: braid_lcs_rank(n, k) for k in range(1, 6)}
    assert img.top == 5


def test_generators_are_special():
    for f in t_generators(4):
        assert is_special(f)
    for f in johnson_degree(4, 3).basis:
        assert is_special(f)


def test_degree_two_is_spanned_by_tau2():
    v2 = johnson_degree(3, 2)
    assert v2.rank == 1
    assert v2.contains(named_element("tau2", (1, 2, 3), 3))


def test_degree_three_contains_b4():
    assert johnson_degree(4, 3).contains(named_element("b4", (1, 2, 3, 4), 4))


def test_degree_four_contains_distinct_b5():
    t = {(i, j): named_element("t", (i, j), 5) for i in range(1, 6) for j in range(i + 1, 6)}
    b = named_element("b5", (1, 2, 3, 4, 5), 5)
    assert johnson_degree(5, 4).contains(b)
    # the explicit bracket realising it: b(i,j,l,p,q) = [b(l,q,p,j), t_ij]
    assert b == der_bracket(named_element("b4", (3, 5, 4, 2), 5), t[1, 2])


def test_b_ijjil_is_a_bracket_with_d3():
    d = named_element("d3", (1, 2), 3)
    assert der_bracket(d, named_element("t", (1, 3), 3)) == named_element("b5", (1, 2, 2, 1, 3), 3)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_exact_sequence_degree_three(n):
    chk = kernel_equality_check(n, 3, "symmetric")
    assert chk.contained and chk.equal
    assert johnson_cokernel(n, 3) == QuotientPresentation(comb(n + 1, 3))


@pytest.mark.parametrize("n", [4, 5])
def test_exact_sequence_degree_four(n):
    chk = kernel_equality_check(n, 4, "wedge")
    assert chk.equal
    assert johnson_cokernel(n, 4) == QuotientPresentation(3 * comb(n + 1, 4))


def test_zero_trace_gives_cokernel_only():
    chk = kernel_equality_check(3, 2, "zero")
    assert chk.kernel_rank == special_kernel(3, 2).rank
    assert chk.equal


def test_morita_kernel_is_not_the_image_in_degree_four():
    chk = kernel_equality_check(4, 4, "symmetric")
    assert chk.contained and not chk.equal


def test_special_coordinates_are_integral():
    for x in special_coordinates(johnson_degree(4, 3)):
        assert all(isinstance(c, int) for c in x)
