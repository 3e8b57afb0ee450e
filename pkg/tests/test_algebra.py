import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncspace import algebra as alg
from ncspace.algebra import (
    AXES,
    HBAR,
    IMAG,
    Generator,
    OperatorExpr,
    commutator,
    jacobi,
    multiply,
    to_coeff,
)
from ncspace.errors import UnknownParticleError

IH = IMAG * HBAR


# ---------------------------------------------------------------------------
# brute-force oracle: reorder a word by adjacent swaps


def _swap_constant(left: Generator, right: Generator):
    """``left right - right left`` when it is a scalar, else None for commuting pairs."""
    if left.mode != right.mode or left.kind == right.kind:
        return None
    c0 = IH if left.mode[0] == "xp" else IMAG
    return c0 if left.is_position else -c0


def reorder_word(word) -> OperatorExpr:
    """Normal-order a product of generators by repeated adjacent transpositions."""
    word = tuple(word)
    for i in range(len(word) - 1):
        g, h = word[i], word[i + 1]
        if g.sort_key > h.sort_key:
            swapped = word[:i] + (h, g) + word[i + 2:]
            out = reorder_word(swapped)
            c = _swap_constant(g, h)
            if c is not None:
                out = out + c * reorder_word(word[:i] + word[i + 2:])
            return out
    if not word:
        return OperatorExpr.scalar(1)
    mono = alg._make_monomial((g, 1) for g in word)
    return OperatorExpr({mono: to_coeff(1)})


def word_product(word) -> OperatorExpr:
    out = OperatorExpr.scalar(1)
    for g in word:
        out = out * OperatorExpr.generator(g)
    return out


SMALL_GENS = [Generator("x", 1, 1), Generator("p", 1, 1), Generator("x", 2, 1),
              Generator("p", 2, 1), Generator("a", 3), Generator("pa", 3), Generator("x", 1, 2)]

gen_st = st.sampled_from(SMALL_GENS)


@settings(max_examples=150, deadline=None)
@given(st.lists(gen_st, min_size=0, max_size=6))
def test_product_matches_bruteforce_reordering(word):
    assert word_product(word) == reorder_word(word)


# ---------------------------------------------------------------------------
# multiply / commutator examples


def test_multiply_swaps_canonical_pair():
    assert multiply(alg.p(1), alg.x(1)) == alg.x(1) * alg.p(1) - IH


def test_multiply_commuting_generators():
    prod = multiply(alg.x(1), alg.x(1, particle=2))
    assert prod == multiply(alg.x(1, particle=2), alg.x(1))
    assert len(prod.terms) == 1


def test_multiply_oscillator_square():
    pa2 = alg.pa(3) * alg.pa(3)
    lhs = multiply(alg.a(3), pa2)
    assert lhs == multiply(pa2, alg.a(3)) + 2 * IMAG * alg.pa(3)
    assert lhs == reorder_word([Generator("a", 3), Generator("pa", 3), Generator("pa", 3)])


def test_canonical_commutators():
    assert commutator(alg.x(1), alg.p(1)) == OperatorExpr.scalar(IH)
    assert commutator(alg.x(1), alg.p(2)).is_zero()
    assert commutator(alg.a(2), alg.pa(2)) == OperatorExpr.scalar(IMAG)


def test_dump_is_deterministic_and_canonical():
    A = alg.x(2) * alg.p(1) + alg.a(1) * 3
    B = 3 * alg.a(1) + alg.p(1) * alg.x(2)
    assert A == B
    assert A.dump() == B.dump()
    assert len(A.dump().splitlines()) == 2


def test_zero_coefficients_removed():
    expr = alg.x(1) - alg.x(1)
    assert expr.is_zero()
    assert expr.terms == {}


def test_unknown_particle_rejected():
    with pytest.raises(UnknownParticleError):
        Generator("x", 1, 99)
    with pytest.raises(ValueError):
        Generator("a", 1, 1)
    with pytest.raises(ValueError):
        Generator("x", 4, 1)


# ---------------------------------------------------------------------------
# noncommutative coordinates


def test_nc_coordinate_explicit_form():
    X1 = alg.build_nc_coordinate(1, 1)
    k1 = alg.kappa(1)
    # eps_1jk a_k p_j = a3 p2 - a2 p3
    expected = alg.x(1) - to_coeff(1) / 2 * k1 * (alg.a(3) * alg.p(2) - alg.a(2) * alg.p(3))
    assert X1 == expected


def test_nc_coordinate_commutative_limit():
    assert alg.build_nc_coordinate(1, 1).substitute("k1", 0) == alg.x(1)


@pytest.mark.parametrize("i,j,k", [(1, 2, 3), (2, 3, 1), (3, 1, 2)])
def test_nc_coordinate_commutator(i, j, k):
    X = [alg.build_nc_coordinate(n, 1) for n in AXES]
    assert commutator(X[i - 1], X[j - 1]) == IH * alg.kappa(1) * alg.a(k)


def test_coordinates_of_different_particles_commute():
    for i, j in itertools.product(AXES, AXES):
        assert commutator(alg.build_nc_coordinate(i, 1), alg.build_nc_coordinate(j, 2)).is_zero()


def test_coordinate_momentum():
    X1, P1, P2 = alg.build_nc_coordinate(1, 1), alg.build_nc_momentum(1, 1), alg.build_nc_momentum(2, 1)
    assert commutator(X1, P1) == OperatorExpr.scalar(IH)
    assert commutator(X1, P2).is_zero()


# ---------------------------------------------------------------------------
# angular momentum


def test_angular_momentum_forms_agree():
    assert alg.total_angular_momentum(1, "canonical") == alg.total_angular_momentum(1, "nc")


@pytest.mark.parametrize("i,j", list(itertools.product(AXES, AXES)))
def test_coordinates_rotate_as_vectors(i, j):
    L = alg.total_angular_momentum()
    X = [alg.build_nc_coordinate(n, 1) for n in AXES]
    rhs = sum((alg.levi_civita(i, j, k) * IH * X[k - 1] for k in AXES), OperatorExpr())
    assert commutator(X[i - 1], L[j - 1]) == rhs
    rhs_a = sum((alg.levi_civita(i, j, k) * IH * alg.a(k) for k in AXES), OperatorExpr())
    assert commutator(alg.a(i), L[j - 1]) == rhs_a


def test_angular_momentum_closes():
    L = alg.total_angular_momentum()
    assert commutator(L[0], L[1]) == IH * L[2]


# ---------------------------------------------------------------------------
# Jacobi and the squared distance


def test_jacobi_examples():
    X = [alg.build_nc_coordinate(n, 1) for n in AXES]
    assert jacobi(alg.x(1), alg.p(1), alg.p(2)).is_zero()
    assert jacobi(X[0], X[1], alg.build_nc_momentum(1, 1)).is_zero()
    assert jacobi(X[0], X[1], X[2]).is_zero()


def _random_expr(draw_terms):
    out = OperatorExpr()
    for coeff, word in draw_terms:
        out = out + coeff * word_product(word)
    return out


expr_st = st.lists(st.tuples(st.integers(-3, 3), st.lists(gen_st, max_size=3)), min_size=1, max_size=3)


@settings(max_examples=40, deadline=None)
@given(expr_st, expr_st, expr_st)
def test_jacobi_and_associativity_random(a, b, c):
    A, B, C = _random_expr(a), _random_expr(b), _random_expr(c)
    assert jacobi(A, B, C).is_zero()
    assert (A * B) * C == A * (B * C)
    assert A + B == B + A


def test_squared_distance_identity():
    assert alg.expand_Xr_squared_check("r").is_zero()


def test_squared_distance_commutative_limit():
    lhs, rhs = alg.xr_squared_sides("r")
    xr2 = alg.dot([alg.x(i, "r") for i in AXES], [alg.x(i, "r") for i in AXES])
    assert lhs.substitute("kr", 0) == xr2
    assert rhs.substitute("kr", 0) == xr2


def test_squared_distance_linear_coefficient():
    lhs, rhs = alg.xr_squared_sides("r")
    # -eps_ijk a_k x_i p_j, i.e. -(a . (x x p)) after normal ordering
    expected = -alg.dot([alg.a(k) for k in AXES],
                        alg.cross([alg.x(i, "r") for i in AXES], [alg.p(i, "r") for i in AXES]))
    assert lhs.coefficient("kr", 1) == expected
    assert rhs.coefficient("kr", 1) == expected
