"""
Two-particle composition in the rotationally invariant noncommutative space.

Numerically, each particle carries ``kappa_n = gamma / m_n`` where ``gamma`` is
the universal combination (Planck constants folded in, hbar = 1). The
center-of-mass and relative coordinates then feel

    kappa_com = (m1^2 kappa_1 + m2^2 kappa_2) / M^2 = gamma / M
    kappa_rel = kappa_1 + kappa_2                  = gamma / mu

Symbolically, the same quantities are built in :mod:`ncspace.algebra` and
every commutator of the center-of-mass/relative set is checked exactly, with
or without the proportionality ``m1 kappa_1 = m2 kappa_2`` imposed.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from numbers import Real

from . import algebra as alg
from .algebra import AXES, HBAR, IMAG, OperatorExpr, commutator, to_coeff

PROTON_ELECTRON_MASS_RATIO = 1836.15267343


@dataclass(frozen=True)
class ParticleSpec:
    mass: Real
    gamma_tilde: Real = 1

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass!r}")

    @property
    def kappa(self):
        return self.gamma_tilde / self.mass


@dataclass(frozen=True)
class TwoParticleSystem:
    p1: ParticleSpec
    p2: ParticleSpec

    def __post_init__(self):
        if self.p1.gamma_tilde != self.p2.gamma_tilde:
            raise ValueError("gamma_tilde must be the same for both particles")

    @classmethod
    def from_masses(cls, m1, m2, gamma_tilde=1) -> "TwoParticleSystem":
        return cls(ParticleSpec(m1, gamma_tilde), ParticleSpec(m2, gamma_tilde))

    @property
    def M(self):
        return self.p1.mass + self.p2.mass

    @property
    def mu(self):
        return self.p1.mass * self.p2.mass / self.M

    @property
    def mu1(self):
        return self.p1.mass / self.M

    @property
    def mu2(self):
        return self.p2.mass / self.M

    @property
    def gamma_tilde(self):
        return self.p1.gamma_tilde

    def swapped(self) -> "TwoParticleSystem":
        return TwoParticleSystem(self.p2, self.p1)


@dataclass(frozen=True)
class EffectiveTensors:
    kappa_com: Real
    kappa_rel: Real


def effective_theta_com(sys: TwoParticleSystem):
    """Scalar of the center-of-mass tensor, ``(m1^2 k1 + m2^2 k2) / M^2``."""
    m1, m2 = sys.p1.mass, sys.p2.mass
    return (m1 * m1 * sys.p1.kappa + m2 * m2 * sys.p2.kappa) / (sys.M * sys.M)


def effective_theta_rel(sys: TwoParticleSystem):
    """Scalar of the relative-motion tensor, ``k1 + k2``."""
    return sys.p1.kappa + sys.p2.kappa


def effective_tensors(sys: TwoParticleSystem) -> EffectiveTensors:
    return EffectiveTensors(effective_theta_com(sys), effective_theta_rel(sys))


# ---------------------------------------------------------------------------
# symbolic checks


@dataclass
class RelationCheck:
    relation: str
    passed: bool
    residual: str = "0"
    index: tuple | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["index"] = list(self.index) if self.index else None
        return d


def _exact(value) -> Fraction:
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


class CompositeOperators:
    """Center-of-mass and relative operators of particles 1 and 2."""

    def __init__(self, sys: TwoParticleSystem, proportional: bool = True):
        self.m1, self.m2 = _exact(sys.p1.mass), _exact(sys.p2.mass)
        self.M = self.m1 + self.m2
        self.proportional = proportional
        X1 = [alg.build_nc_coordinate(i, 1) for i in AXES]
        X2 = [alg.build_nc_coordinate(i, 2) for i in AXES]
        P1 = [alg.build_nc_momentum(i, 1) for i in AXES]
        P2 = [alg.build_nc_momentum(i, 2) for i in AXES]
        mu1, mu2 = self.m1 / self.M, self.m2 / self.M
        self.Xc = [(self.m1 * X1[i] + self.m2 * X2[i]) * (1 / self.M) for i in range(3)]
        self.Pc = [P1[i] + P2[i] for i in range(3)]
        self.Xr = [X2[i] - X1[i] for i in range(3)]
        self.Pr = [mu1 * P2[i] - mu2 * P1[i] for i in range(3)]
        k1, k2 = alg.kappa(1), alg.kappa(2)
        self.kappa_com = (to_coeff(self.m1 ** 2) * k1 + to_coeff(self.m2 ** 2) * k2) * to_coeff(1 / self.M ** 2)
        self.kappa_rel = k1 + k2

    def reduce(self, expr: OperatorExpr) -> OperatorExpr:
        """Impose ``kappa_n = gamma / m_n`` when proportionality is on."""
        if not self.proportional:
            return expr
        g = alg.param("gamma")
        return expr.substitute("k1", g * to_coeff(1 / self.m1)).substitute("k2", g * to_coeff(1 / self.m2))

    def theta_op(self, kappa_poly, i: int, j: int) -> OperatorExpr:
        return sum((alg.levi_civita(i, j, k) * kappa_poly * alg.a(k) for k in AXES),
                   OperatorExpr())


def _family(name, pairs, ops: CompositeOperators) -> RelationCheck:
    for (i, j), residual in pairs:
        residual = ops.reduce(residual)
        if not residual.is_zero():
            return RelationCheck(name, False, residual.dump(), (i, j))
    return RelationCheck(name, True)


def com_rel_commutator(sys: TwoParticleSystem, i: int, j: int,
                       proportional: bool = True) -> OperatorExpr:
    """``[X^c_i, X^r_j]``, reduced by the proportionality relation if requested."""
    ops = CompositeOperators(sys, proportional)
    return ops.reduce(commutator(ops.Xc[i - 1], ops.Xr[j - 1]))


def verify_com_rel_algebra(sys: TwoParticleSystem, proportional: bool = True) -> list:
    """Check the full center-of-mass / relative commutator algebra exactly."""
    ops = CompositeOperators(sys, proportional)
    ih = IMAG * HBAR
    idx = [(i, j) for i in AXES for j in AXES]
    Xc, Xr, Pc, Pr = ops.Xc, ops.Xr, ops.Pc, ops.Pr

    def delta(i, j):
        return ih if i == j else 0

    return [
        _family("[Xc_i,Xc_j] = i hbar kappa_com eps_ijk a_k",
                [((i, j), commutator(Xc[i - 1], Xc[j - 1]) - ih * ops.theta_op(ops.kappa_com, i, j))
                 for i, j in idx], ops),
        _family("[Xr_i,Xr_j] = i hbar kappa_rel eps_ijk a_k",
                [((i, j), commutator(Xr[i - 1], Xr[j - 1]) - ih * ops.theta_op(ops.kappa_rel, i, j))
                 for i, j in idx], ops),
        _family("[Xc_i,Xr_j] = 0",
                [((i, j), commutator(Xc[i - 1], Xr[j - 1])) for i, j in idx], ops),
        _family("[Xc_i,Pc_j] = i hbar delta_ij",
                [((i, j), commutator(Xc[i - 1], Pc[j - 1]) - delta(i, j)) for i, j in idx], ops),
        _family("[Xr_i,Pr_j] = i hbar delta_ij",
                [((i, j), commutator(Xr[i - 1], Pr[j - 1]) - delta(i, j)) for i, j in idx], ops),
        _family("[Xc_i,Pr_j] = 0",
                [((i, j), commutator(Xc[i - 1], Pr[j - 1])) for i, j in idx], ops),
        _family("[Xr_i,Pc_j] = 0",
                [((i, j), commutator(Xr[i - 1], Pc[j - 1])) for i, j in idx], ops),
        _family("[Pc_i,Pr_j] = 0",
                [((i, j), commutator(Pc[i - 1], Pr[j - 1])) for i, j in idx], ops),
    ]


def verify_momentum_conservation(sys: TwoParticleSystem | None = None,
                                 proportional: bool = True) -> list:
    """Total momentum commutes with the relative coordinates, their square and the oscillator.

    Any potential that is a polynomial in the relative coordinates therefore
    commutes with the total momentum; admissible potentials follow by density.
    """
    sys = sys or TwoParticleSystem.from_masses(1, 1)
    ops = CompositeOperators(sys, proportional)
    Xr2 = alg.dot(ops.Xr, ops.Xr)
    a2 = alg.dot([alg.a(i) for i in AXES], [alg.a(i) for i in AXES])
    pa2 = alg.dot([alg.pa(i) for i in AXES], [alg.pa(i) for i in AXES])
    idx = [(i, j) for i in AXES for j in AXES]
    Pc = ops.Pc
    return [
        _family("[Pc_i,Xr_j] = 0", [((i, j), commutator(Pc[i - 1], ops.Xr[j - 1])) for i, j in idx], ops),
        _family("[Pc_i,(Xr)^2] = 0", [((i, 0), commutator(Pc[i - 1], Xr2)) for i in AXES], ops),
        _family("[Pc_i,Pr_j] = 0", [((i, j), commutator(Pc[i - 1], ops.Pr[j - 1])) for i, j in idx], ops),
        _family("[Pc_i,a^2] = 0", [((i, 0), commutator(Pc[i - 1], a2)) for i in AXES], ops),
        _family("[Pc_i,(pa)^2] = 0", [((i, 0), commutator(Pc[i - 1], pa2)) for i in AXES], ops),
    ]
