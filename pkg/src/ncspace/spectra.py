"""
Hydrogen-level corrections from coordinate noncommutativity.

Reduced units throughout: hbar = e = 1 and lengths in the reduced-mass Bohr
radius, so energies are in units of e^2 / a*_B. The noncommutativity of the
relative motion is ``theta^mu = kappa_rel * a`` with ``kappa_rel = gamma / mu``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate

from .composite import PROTON_ELECTRON_MASS_RATIO
from .errors import DivergentLevel, InvalidQuantumNumbers, NonConvergedQuadrature

PAPER_NS_CONSTANT = 1.72

_ns_constant: float | None = None


def set_ns_constant(value: float | None) -> None:
    """Install the extracted ns constant (``None`` restores the stored fallback)."""
    global _ns_constant
    _ns_constant = value


def ns_constant() -> float:
    return PAPER_NS_CONSTANT if _ns_constant is None else _ns_constant


@dataclass(frozen=True)
class QuantumNumbers:
    n: int
    l: int
    m: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise InvalidQuantumNumbers(f"n must be >= 1, got {self.n}")
        if not 0 <= self.l <= self.n - 1:
            raise InvalidQuantumNumbers(f"l must lie in [0, n-1], got l={self.l} for n={self.n}")
        if abs(self.m) > self.l:
            raise InvalidQuantumNumbers(f"|m| must not exceed l, got m={self.m}")


@dataclass(frozen=True)
class PhysicalParams:
    """Masses and the universal noncommutativity combination.

    ``gamma`` stands for gamma_tilde * m_P * l_P^2 / hbar expressed in
    reduced units, so that the relative-motion strength is ``gamma / mu``.
    Masses may be given in any common unit; only ``mu`` in that unit enters.
    """

    gamma: float = 1.0
    mass1: float = PROTON_ELECTRON_MASS_RATIO
    mass2: float = 1.0

    @classmethod
    def reduced(cls, kappa_rel: float) -> "PhysicalParams":
        """Parameters with mu = 1 and the given relative strength."""
        return cls(gamma=kappa_rel, mass1=2.0, mass2=2.0)

    @classmethod
    def from_theta_sq_avg(cls, theta_sq_avg: float) -> "PhysicalParams":
        return cls.reduced(math.sqrt(theta_sq_avg / 1.5))

    @property
    def M(self) -> float:
        return self.mass1 + self.mass2

    @property
    def mu(self) -> float:
        return self.mass1 * self.mass2 / self.M

    @property
    def bohr_star(self) -> float:
        return 1.0

    @property
    def kappa_rel(self) -> float:
        return self.gamma / self.mu

    @property
    def chi(self) -> float:
        return math.sqrt(self.kappa_rel / 2.0)

    @property
    def theta_avg(self) -> float:
        return self.kappa_rel * oscillator_moment(1)

    @property
    def theta_sq_avg(self) -> float:
        return self.kappa_rel ** 2 * oscillator_moment(2)


@dataclass
class CorrectionResult:
    n: int
    l: int
    kind: str
    value: float | None
    error_estimate: float = 0.0
    divergent: bool = False
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.divergent and (self.value is None or not math.isfinite(self.value)):
            raise ValueError("a non-divergent correction must have a finite value")

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("diagnostics")
        return d


# ---------------------------------------------------------------------------
# special functions


def laguerre(k: int, alpha: float, x):
    """Generalized Laguerre polynomial ``L_k^alpha(x)`` by the three-term recurrence.

    (j+1) L_{j+1} = (2j + 1 + alpha - x) L_j - (j + alpha) L_{j-1}
    """
    x = np.asarray(x, dtype=float)
    if k < 0:
        return np.zeros_like(x)
    prev = np.ones_like(x)
    if k == 0:
        return prev
    cur = 1.0 + alpha - x
    for j in range(1, k):
        prev, cur = cur, ((2 * j + 1 + alpha - x) * cur - (j + alpha) * prev) / (j + 1)
    return cur


def _radial_norm(n: int, l: int) -> float:
    log_n = 1.5 * math.log(2.0 / n) + 0.5 * (
        math.lgamma(n - l) - math.log(2 * n) - math.lgamma(n + l + 1)
    )
    return math.exp(log_n)


def _check_nl(n, l):
    QuantumNumbers(n, l)


def hydrogen_radial(n: int, l: int, r):
    """Normalized radial function ``R_nl(r)`` (a*_B = 1)."""
    _check_nl(n, l)
    r = np.asarray(r, dtype=float)
    rho = 2.0 * r / n
    return _radial_norm(n, l) * np.exp(-r / n) * rho ** l * laguerre(n - l - 1, 2 * l + 1, rho)


def hydrogen_radial_derivatives(n: int, l: int, r):
    """``(R, R', R'')`` from analytic derivatives of the Laguerre form.

    Uses d/dx L_k^a = -L_{k-1}^{a+1}, applied twice.
    """
    _check_nl(n, l)
    r = np.asarray(r, dtype=float)
    k, alpha = n - l - 1, 2 * l + 1
    rho = 2.0 * r / n
    c = 2.0 / n
    L0 = laguerre(k, alpha, rho)
    L1 = -laguerre(k - 1, alpha + 1, rho)
    L2 = laguerre(k - 2, alpha + 2, rho)
    pw0 = rho ** l
    pw1 = l * rho ** (l - 1) if l >= 1 else np.zeros_like(rho)
    pw2 = l * (l - 1) * rho ** (l - 2) if l >= 2 else np.zeros_like(rho)
    u = pw0 * L0
    du = c * (pw1 * L0 + pw0 * L1)
    d2u = c * c * (pw2 * L0 + 2 * pw1 * L1 + pw0 * L2)
    env = _radial_norm(n, l) * np.exp(-r / n)
    return env * u, env * (du - u / n), env * (d2u - 2 * du / n + u / (n * n))


def oscillator_moment(k: int) -> float:
    """``<|a|^k>`` in the 3-D oscillator ground state ``pi^-3/4 exp(-a^2/2)``."""
    return math.gamma((3 + k) / 2) / math.gamma(1.5)


def oscillator_moments() -> tuple:
    """``(<|a|>, <|a|^2>)`` = ``(2/sqrt(pi), 3/2)``."""
    return oscillator_moment(1), oscillator_moment(2)


# ---------------------------------------------------------------------------
# first-order corrections


def correction_bracket(n: int, l: int) -> Fraction:
    """Exact rational bracket of the first-order correction (needs l >= 2)."""
    if l < 2:
        raise DivergentLevel(f"first-order expansion diverges for l={l}")
    L = l * (l + 1)
    q = 5 * n * n - 3 * L + 1
    common = (2 * l + 1) * (2 * l + 3) * (2 * l - 1)
    return (
        Fraction(1, 6 * L * (2 * l + 1))
        - Fraction(6 * n * n - 2 * L, 3 * L * common)
        + Fraction(q, 2 * (l + 2) * (l - 1) * common)
        - Fraction(5, 6) * Fraction(q, L * (l + 2) * (l - 1) * common)
    )


def delta_E1_closed(qn: QuantumNumbers, params: PhysicalParams) -> CorrectionResult:
    """First-order shift ``-<theta^2> / n^5 * bracket(n, l)`` for l >= 2."""
    if qn.l < 2:
        raise DivergentLevel(f"ns and np levels have no finite first-order shift (l={qn.l})")
    value = -params.theta_sq_avg / qn.n ** 5 * float(correction_bracket(qn.n, qn.l))
    return CorrectionResult(qn.n, qn.l, "first-order-closed", value)


@dataclass(frozen=True)
class RadialGrid:
    """Quadrature settings for radial expectation values.

    ``r_max=None`` picks a bound where the density ``r^(2n) exp(-2r/n)`` is
    below double precision relative to its peak.
    """

    r_min: float = 0.0
    r_max: float | None = None
    epsabs: float = 0.0
    epsrel: float = 1e-12
    limit: int = 500
    tolerance: float = 1e-9


def _r_max(n: int) -> float:
    return n * (2 * n + 40)


def _radial_integral(f, lo, hi, grid: RadialGrid):
    # panel edges at the nodes' scale keep QUADPACK from missing structure
    edges = np.unique(np.concatenate([[lo], np.geomspace(max(lo, 1e-3), hi, 24), [hi]]))
    edges = edges[(edges >= lo) & (edges <= hi)]
    total, err = 0.0, 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        v, e = integrate.quad(f, a, b, epsabs=grid.epsabs, epsrel=grid.epsrel, limit=grid.limit)
        total += v
        err += e
    return total, err


def first_order_integrand(n: int, l: int):
    """Radial integrand of the ``<theta^2>``-coefficient of the first-order shift.

    After the oscillator average, <theta_i theta_j> = <theta^2>/3 delta_ij turns
    (theta.L)^2 into l(l+1)<theta^2>/3 and both cross-product squares into
    2<theta^2>/3 times p^2 or r^2. The symmetrised p^2 sandwich between r^-2
    and r^-1 reduces radially to -R R''/r + l(l+1) R^2 / r^3.
    """
    L = l * (l + 1)

    def f(r):
        R, _, d2R = hydrogen_radial_derivatives(n, l, r)
        inv_r5 = R * R / r ** 3
        sandwich = -R * d2R / r + L * R * R / r ** 3
        return float(-L / 8.0 * inv_r5 + (2.0 * sandwich + inv_r5) / 24.0)

    return f


def delta_E1_oracle(qn: QuantumNumbers, params: PhysicalParams,
                    grid: RadialGrid = RadialGrid()) -> CorrectionResult:
    """First-order shift evaluated directly as ``<psi|V|psi>`` by radial quadrature."""
    if qn.l < 2:
        raise DivergentLevel(f"radial matrix elements diverge at r=0 for l={qn.l}")
    hi = grid.r_max if grid.r_max is not None else _r_max(qn.n)
    coeff, err = _radial_integral(first_order_integrand(qn.n, qn.l), grid.r_min, hi, grid)
    if err > max(grid.epsabs, grid.tolerance * abs(coeff)):
        raise NonConvergedQuadrature(f"radial quadrature error {err:.3g} exceeds tolerance")
    value = params.theta_sq_avg * coeff
    return CorrectionResult(qn.n, qn.l, "first-order-oracle", value,
                            error_estimate=params.theta_sq_avg * err)


def cutoff_sweep(n: int, l: int, cutoffs, quantity: str = "first-order") -> list:
    """Would-be matrix elements integrated over ``[eps, r_max]`` for each inner cutoff.

    ``quantity`` is ``"first-order"`` (the full <theta^2> coefficient) or
    ``"inv_r5"`` (the <r^-5> piece alone). Used to exhibit the divergence of the
    expansion for l = 0 and l = 1.
    """
    _check_nl(n, l)
    if quantity == "first-order":
        f = first_order_integrand(n, l)
    elif quantity == "inv_r5":
        def f(r):
            return float(hydrogen_radial(n, l, r) ** 2 / r ** 3)
    else:
        raise ValueError(f"unknown quantity {quantity!r}")
    grid = RadialGrid(epsrel=1e-11)
    out = []
    for eps in cutoffs:
        v, _ = _radial_integral(f, eps, _r_max(n), grid)
        out.append((float(eps), v))
    return out


def delta_E_ns_asymptotic(n: int, params: PhysicalParams,
                          constant: float | None = None) -> CorrectionResult:
    """Leading ns shift ``C <theta> pi / (8 n^3)`` (hbar = e = a*_B = 1)."""
    if n < 1:
        raise InvalidQuantumNumbers(f"n must be >= 1, got {n}")
    c = ns_constant() if constant is None else constant
    value = c * params.theta_avg * math.pi / (8.0 * n ** 3)
    return CorrectionResult(n, 0, "ns-asymptotic", value, diagnostics={"constant": c})


def unperturbed_energy(n: int, params: PhysicalParams, osc_quanta=(0, 0, 0),
                       omega: float = 0.0) -> float:
    """Hydrogen level plus oscillator energy, ``-1/(2 n^2) + omega (sum + 3/2)``."""
    if n < 1:
        raise InvalidQuantumNumbers(f"n must be >= 1, got {n}")
    if any(q < 0 for q in osc_quanta):
        raise ValueError("oscillator quanta must be nonnegative")
    return -1.0 / (2.0 * params.bohr_star * n * n) + omega * (sum(osc_quanta) + 1.5)
