"""
Exact relation suites over :mod:`ncspace.algebra`.

Every check forms ``lhs - rhs`` as an OperatorExpr and passes iff it is the
zero element. A family stops at its first failing index and reports the
residual dump there.
"""

from __future__ import annotations

import itertools

from . import algebra as alg
from .algebra import AXES, HBAR, IMAG, OperatorExpr, commutator, levi_civita
from .composite import (
    RelationCheck,
    TwoParticleSystem,
    verify_com_rel_algebra,
    verify_momentum_conservation,
)

IH = IMAG * HBAR
PAIRS = [(i, j) for i in AXES for j in AXES]


def _eps_vec(vec, i, j) -> OperatorExpr:
    return sum((levi_civita(i, j, k) * vec[k - 1] for k in AXES), OperatorExpr())


def _delta(i, j):
    return IH if i == j else 0


def _check(name, pairs) -> RelationCheck:
    for idx, residual in pairs:
        if not residual.is_zero():
            return RelationCheck(name, False, residual.dump(), idx)
    return RelationCheck(name, True)


def coordinate_algebra(particle=1) -> list:
    """``[X_i,X_j] = i hbar kappa eps_ijk a_k``, ``[X_i,P_j] = i hbar delta_ij``, ``[P_i,P_j] = 0``
    and the commuting of ``a`` with X and P."""
    X = [alg.build_nc_coordinate(i, particle) for i in AXES]
    P = [alg.build_nc_momentum(i, particle) for i in AXES]
    A = [alg.a(i) for i in AXES]
    th = [alg.theta(i, j, particle) for i, j in PAIRS]
    tag = f"({particle})"
    return [
        _check(f"[X{tag}_i,X{tag}_j] = i hbar theta_ij",
               [((i, j), commutator(X[i - 1], X[j - 1]) - IH * t) for (i, j), t in zip(PAIRS, th)]),
        _check(f"[X{tag}_i,P{tag}_j] = i hbar delta_ij",
               [((i, j), commutator(X[i - 1], P[j - 1]) - _delta(i, j)) for i, j in PAIRS]),
        _check(f"[P{tag}_i,P{tag}_j] = 0",
               [((i, j), commutator(P[i - 1], P[j - 1])) for i, j in PAIRS]),
        _check(f"[a_i,X{tag}_j] = 0", [((i, j), commutator(A[i - 1], X[j - 1])) for i, j in PAIRS]),
        _check(f"[a_i,P{tag}_j] = 0", [((i, j), commutator(A[i - 1], P[j - 1])) for i, j in PAIRS]),
    ]


def oscillator_algebra() -> list:
    A = [alg.a(i) for i in AXES]
    Pa = [alg.pa(i) for i in AXES]
    return [
        _check("[a_i,a_j] = 0", [((i, j), commutator(A[i - 1], A[j - 1])) for i, j in PAIRS]),
        _check("[a_i,pa_j] = i delta_ij",
               [((i, j), commutator(A[i - 1], Pa[j - 1]) - (IMAG if i == j else 0)) for i, j in PAIRS]),
        _check("[pa_i,pa_j] = 0", [((i, j), commutator(Pa[i - 1], Pa[j - 1])) for i, j in PAIRS]),
    ]


def two_particle_algebra() -> list:
    """Cross-particle relations: coordinates and momenta of different particles commute."""
    X = {n: [alg.build_nc_coordinate(i, n) for i in AXES] for n in (1, 2)}
    P = {n: [alg.build_nc_momentum(i, n) for i in AXES] for n in (1, 2)}
    return [
        _check("[X(1)_i,X(2)_j] = 0", [((i, j), commutator(X[1][i - 1], X[2][j - 1])) for i, j in PAIRS]),
        _check("[X(1)_i,P(2)_j] = 0", [((i, j), commutator(X[1][i - 1], P[2][j - 1])) for i, j in PAIRS]),
        _check("[X(2)_i,P(1)_j] = 0", [((i, j), commutator(X[2][i - 1], P[1][j - 1])) for i, j in PAIRS]),
        _check("[P(1)_i,P(2)_j] = 0", [((i, j), commutator(P[1][i - 1], P[2][j - 1])) for i, j in PAIRS]),
    ]


def angular_momentum_algebra(particle=1) -> list:
    """Both forms of L agree, and X, P, a and L itself transform as vectors under L."""
    L = alg.total_angular_momentum(particle, "canonical")
    L_nc = alg.total_angular_momentum(particle, "nc")
    X = [alg.build_nc_coordinate(i, particle) for i in AXES]
    P = [alg.build_nc_momentum(i, particle) for i in AXES]
    A = [alg.a(i) for i in AXES]

    def vector_rule(name, V):
        return _check(f"[{name}_i,L_j] = i hbar eps_ijk {name}_k",
                      [((i, j), commutator(V[i - 1], L[j - 1]) - IH * _eps_vec(V, i, j))
                       for i, j in PAIRS])

    return [
        _check("L canonical form = L noncommutative form",
               [((i, 0), L[i - 1] - L_nc[i - 1]) for i in AXES]),
        vector_rule("X", X),
        vector_rule("P", P),
        vector_rule("a", A),
        vector_rule("L", L),
    ]


def jacobi_identities(particle=1) -> list:
    """Jacobi identity for every unordered triple drawn from {X_1..X_3, P_1..P_3}."""
    gens = [(f"X{i}", alg.build_nc_coordinate(i, particle)) for i in AXES] + \
           [(f"P{i}", alg.build_nc_momentum(i, particle)) for i in AXES]
    pairs = []
    for (na, A), (nb, B), (nc, C) in itertools.combinations_with_replacement(gens, 3):
        pairs.append(((na, nb, nc), alg.jacobi(A, B, C)))
    return [_check("Jacobi over {X_i,P_j}", pairs)]


def distance_square_identity() -> list:
    return [_check("(X^r)^2 expansion", [((0, 0), alg.expand_Xr_squared_check("r"))])]


def run_algebra_suite(masses=(1, 3), break_proportionality: bool = False) -> list:
    """Every exact relation: single particle, two particles, composite and conservation."""
    sys = TwoParticleSystem.from_masses(*masses)
    proportional = not break_proportionality
    return (
        coordinate_algebra(1)
        + oscillator_algebra()
        + two_particle_algebra()
        + angular_momentum_algebra(1)
        + jacobi_identities(1)
        + distance_square_identity()
        + verify_com_rel_algebra(sys, proportional)
        + verify_momentum_conservation(sys, proportional)
    )

