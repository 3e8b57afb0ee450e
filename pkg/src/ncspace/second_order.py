"""
Truncated second-order correction and its large-frequency behaviour.

To order (theta^mu)^2 only the linear perturbation

    V1 = -(kappa_rel / 2) r^-3 (a . L)

enters the second-order sum; ``a_k`` moves the oscillator out of its ground
state, so every surviving intermediate carries at least one oscillator quantum
and an energy denominator of order ``-omega``. The sum is evaluated over a
finite set of bound hydrogen states (same l, n' <= truncation, all m') and
oscillator Fock states with at most ``max_quanta`` quanta.
"""

from __future__ import annotations

import functools
import itertools
import math

import numpy as np
from scipy import integrate

from .errors import TruncationTooSmall
from .spectra import PhysicalParams, QuantumNumbers, hydrogen_radial, unperturbed_energy


def angular_momentum_matrices(l: int):
    """``(Lx, Ly, Lz)`` in the basis ``m = l, l-1, ..., -l`` (hbar = 1)."""
    ms = np.arange(l, -l - 1, -1)
    dim = len(ms)
    Lp = np.zeros((dim, dim), dtype=complex)
    for col, m in enumerate(ms):
        if m < l:
            Lp[col - 1, col] = math.sqrt(l * (l + 1) - m * (m + 1))
    Lm = Lp.conj().T
    return (Lp + Lm) / 2, (Lp - Lm) / 2j, np.diag(ms).astype(complex)


def fock_states(max_quanta: int) -> list:
    return sorted(
        (s for s in itertools.product(range(max_quanta + 1), repeat=3) if sum(s) <= max_quanta),
        key=lambda s: (sum(s), tuple(-q for q in s)),
    )


def oscillator_position_matrices(states: list) -> list:
    """Matrices of ``a_k = (b_k + b_k^+) / sqrt(2)`` on a truncated Fock basis."""
    index = {s: i for i, s in enumerate(states)}
    mats = []
    for k in range(3):
        A = np.zeros((len(states), len(states)))
        for s, i in index.items():
            up = list(s)
            up[k] += 1
            j = index.get(tuple(up))
            if j is not None:
                A[j, i] = A[i, j] = math.sqrt(s[k] + 1) / math.sqrt(2.0)
        mats.append(A)
    return mats


@functools.lru_cache(maxsize=32)
def _radial_inverse_cube(l: int, n_values: tuple) -> np.ndarray:
    size = len(n_values)
    out = np.zeros((size, size))
    for i, j in itertools.combinations_with_replacement(range(size), 2):
        ni, nj = n_values[i], n_values[j]
        hi = max(ni, nj) * (2 * max(ni, nj) + 40)

        def f(r):
            return float(hydrogen_radial(ni, l, r) * hydrogen_radial(nj, l, r) / r)

        edges = np.r_[0.0, np.geomspace(1e-2, hi, 12)]
        v = sum(integrate.quad(f, lo, up, epsrel=1e-12, epsabs=1e-15, limit=400)[0]
                for lo, up in zip(edges[:-1], edges[1:]))
        out[i, j] = out[j, i] = v
    out.flags.writeable = False
    return out


def radial_inverse_cube(l: int, n_values) -> np.ndarray:
    """``<n' l | r^-3 | n l>`` for all pairs in ``n_values``."""
    return _radial_inverse_cube(l, tuple(n_values)).copy()


def _couplings(qn: QuantumNumbers, params: PhysicalParams, truncation: int,
               max_quanta: int) -> list:
    """``[(n', quanta, |<j|V1|i>|^2), ...]`` over intermediates j != i with nonzero coupling."""
    if truncation <= qn.n:
        raise TruncationTooSmall(
            f"truncation {truncation} must exceed n={qn.n} to include excited intermediates")
    if qn.l == 0:
        # a.L annihilates s-states; the r^-3 elements themselves diverge there
        return []
    n_values = list(range(qn.l + 1, truncation + 1))
    states = fock_states(max_quanta)
    A = oscillator_position_matrices(states)
    Lmats = angular_momentum_matrices(qn.l)
    R3 = radial_inverse_cube(qn.l, n_values)

    V1 = sum(np.kron(np.kron(R3, Lmats[k]), A[k]) for k in range(3))
    V1 = -0.5 * params.kappa_rel * V1

    dim_m, dim_f = 2 * qn.l + 1, len(states)
    init = (n_values.index(qn.n) * dim_m + (qn.l - qn.m)) * dim_f + states.index((0, 0, 0))
    column = V1[:, init]
    out = []
    for idx in np.flatnonzero(np.abs(column) > 0):
        if idx == init:
            continue
        n_idx, rest = divmod(idx, dim_m * dim_f)
        out.append((n_values[n_idx], states[rest % dim_f], float(abs(column[idx]) ** 2)))
    return out


def _sum_over(couplings, qn, params, omega) -> float:
    e0 = unperturbed_energy(qn.n, params, (0, 0, 0), omega)
    return float(sum(w / (e0 - unperturbed_energy(n2, params, q, omega))
                     for n2, q, w in couplings))


def second_order_estimate(qn: QuantumNumbers, params: PhysicalParams, omega: float,
                          truncation: int, max_quanta: int = 2) -> float:
    """Second-order sum at order (theta^mu)^2, truncated as described in the module."""
    return _sum_over(_couplings(qn, params, truncation, max_quanta), qn, params, omega)


def linear_term_ground_element() -> float:
    """Largest oscillator ground-state expectation of ``a_k``, the linear term's only ã factor."""
    A = oscillator_position_matrices(fock_states(2))
    return float(max(abs(A[k][0, 0]) for k in range(3)))


def second_order_scaling_check(n: int, l: int, omega_list, truncation: int,
                               params: PhysicalParams | None = None, m: int = 0,
                               max_quanta: int = 2) -> list:
    """``[(omega, estimate), ...]`` for increasing omega."""
    omega_list = list(omega_list)
    if any(b <= a for a, b in zip(omega_list, omega_list[1:])):
        raise ValueError("omega_list must be strictly increasing")
    params = params or PhysicalParams.reduced(1.0)
    qn = QuantumNumbers(n, l, m)
    couplings = _couplings(qn, params, truncation, max_quanta)
    return [(float(w), _sum_over(couplings, qn, params, w)) for w in omega_list]


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of ``log|y|`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(xs, float)), np.log(np.abs(np.asarray(ys, float))), 1)[0])
