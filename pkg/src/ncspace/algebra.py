"""
Exact operator algebra over canonical generators.

Operators are finite linear combinations of normal-ordered monomials in the
generators ``x_i, p_i`` (one canonical set per particle) and the auxiliary
oscillator pair ``a_i`` (coordinates) and ``pa_i`` (conjugate momenta), which
is shared by all particles. Coefficients live in the polynomial ring
``Q(i)[hbar, gamma, k1, k2, k3, k4, kr, kc]``, so every identity is checked
exactly.

The only nonvanishing elementary commutators are

    [x_i, p_j] = i hbar delta_ij      (same particle)
    [a_i, pa_j] = i delta_ij

Normal order sorts generators by kind (x < p < a < pa), then particle, then
axis. Because the algebra factorises into independent one-mode Weyl algebras,
a product of two monomials is reordered mode by mode with the closed formula

    p^b q^c = sum_k k! C(b,k) C(c,k) (-c0)^k q^(c-k) p^(b-k),   c0 = [q, p].
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Mapping, Union

from sympy.polys.domains import QQ_I
from sympy.polys.rings import PolyElement, ring

from .errors import UnknownParticleError

PARAMETERS = ("hbar", "gamma", "k1", "k2", "k3", "k4", "kr", "kc")
COEFF_RING, *_PARAM_GENS = ring(",".join(PARAMETERS), QQ_I)
_PARAM = dict(zip(PARAMETERS, _PARAM_GENS))

KINDS = ("x", "p", "a", "pa")
_KIND_ORDER = {k: i for i, k in enumerate(KINDS)}

# particle labels that own a kappa parameter in the coefficient ring
PARTICLES = {1: "k1", 2: "k2", 3: "k3", 4: "k4", "r": "kr", "c": "kc"}

Scalar = Union[int, Fraction, complex, PolyElement]


def to_coeff(value) -> PolyElement:
    if isinstance(value, PolyElement):
        return value
    if isinstance(value, complex):
        re, im = Fraction(value.real), Fraction(value.imag)
        return COEFF_RING(QQ_I(QQ_I.dom.convert(re), QQ_I.dom.convert(im)))
    if isinstance(value, float):
        value = Fraction(str(value))
    return COEFF_RING(QQ_I.convert(Fraction(value)))


ONE = to_coeff(1)
IMAG = COEFF_RING(QQ_I(0, 1))


def param(name: str) -> PolyElement:
    """Coefficient-ring generator for a named symbolic parameter."""
    try:
        return _PARAM[name]
    except KeyError:
        raise KeyError(f"unknown parameter {name!r}; expected one of {PARAMETERS}") from None


def kappa(particle) -> PolyElement:
    """The scalar ``kappa_n`` in ``theta^(n)_ij = kappa_n eps_ijk a_k``."""
    try:
        return _PARAM[PARTICLES[particle]]
    except KeyError:
        raise UnknownParticleError(f"particle {particle!r} has no registered kappa") from None


HBAR = param("hbar")


@dataclass(frozen=True)
class Generator:
    kind: str
    axis: int
    particle: object = None

    def __post_init__(self):
        if self.kind not in _KIND_ORDER:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.axis not in (1, 2, 3):
            raise ValueError(f"axis must be 1, 2 or 3, got {self.axis!r}")
        if self.kind in ("x", "p"):
            if self.particle is None:
                raise ValueError(f"{self.kind} generators need a particle label")
            if self.particle not in PARTICLES:
                raise UnknownParticleError(f"particle {self.particle!r} is not registered")
        elif self.particle is not None:
            raise ValueError("oscillator generators are shared and take no particle label")

    @property
    def sort_key(self):
        if self.particle is None:
            pkey = (0, "")
        elif isinstance(self.particle, int):
            pkey = (1, f"{self.particle:06d}")
        else:
            pkey = (2, str(self.particle))
        return (_KIND_ORDER[self.kind], pkey, self.axis)

    @property
    def mode(self):
        """Identifier of the canonical pair this generator belongs to."""
        if self.kind in ("x", "p"):
            return ("xp", self.particle, self.axis)
        return ("a", None, self.axis)

    @property
    def is_position(self) -> bool:
        return self.kind in ("x", "a")

    def __str__(self):
        if self.particle is None:
            return f"{self.kind}{self.axis}"
        return f"{self.kind}{self.axis}({self.particle})"


def _mode_constant(mode) -> PolyElement:
    # [q, p] for the pair
    return IMAG * HBAR if mode[0] == "xp" else IMAG


# A monomial is a tuple of (Generator, exponent) pairs sorted by Generator.sort_key.
Monomial = tuple


def _split_modes(mono: Monomial) -> dict:
    modes: dict = {}
    for g, e in mono:
        q, p, qe, pe = modes.get(g.mode, (None, None, 0, 0))
        if g.is_position:
            q, qe = g, e
        else:
            p, pe = g, e
        modes[g.mode] = (q, p, qe, pe)
    return modes


def _partner(g: Generator) -> Generator:
    kind = {"x": "p", "p": "x", "a": "pa", "pa": "a"}[g.kind]
    return Generator(kind, g.axis, g.particle)


def _make_monomial(factors: Iterable) -> Monomial:
    merged: dict = {}
    for g, e in factors:
        if e:
            merged[g] = merged.get(g, 0) + e
    return tuple(sorted(merged.items(), key=lambda ge: ge[0].sort_key))


def _multiply_monomials(m1: Monomial, m2: Monomial) -> dict:
    """Normal-ordered product of two normal-ordered monomials."""
    modes1, modes2 = _split_modes(m1), _split_modes(m2)
    # per mode: list of (coeff, [(gen, exp), ...])
    pieces = []
    for mode in set(modes1) | set(modes2):
        q1, p1, a, b = modes1.get(mode, (None, None, 0, 0))
        q2, p2, c, d = modes2.get(mode, (None, None, 0, 0))
        q = q1 or q2 or (_partner(p1 or p2))
        p = p1 or p2 or _partner(q)
        if b == 0 or c == 0:
            pieces.append([(ONE, [(q, a + c), (p, b + d)])])
            continue
        c0 = _mode_constant(mode)
        terms = []
        for k in range(min(b, c) + 1):
            coeff = to_coeff(factorial(k) * comb(b, k) * comb(c, k)) * (-c0) ** k
            terms.append((coeff, [(q, a + c - k), (p, b + d - k)]))
        pieces.append(terms)
    out: dict = {}
    for combo in itertools.product(*pieces):
        coeff = ONE
        factors = []
        for cf, fs in combo:
            coeff = coeff * cf
            factors.extend(fs)
        mono = _make_monomial(factors)
        out[mono] = out.get(mono, COEFF_RING.zero) + coeff
    return out


class OperatorExpr:
    """Immutable exact operator in canonical normal form."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping | None = None):
        clean = {}
        for mono, c in (terms or {}).items():
            c = to_coeff(c)
            if c:
                clean[mono] = c
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("OperatorExpr is immutable")

    # construction helpers
    @classmethod
    def scalar(cls, value: Scalar) -> "OperatorExpr":
        return cls({(): value})

    @classmethod
    def generator(cls, g: Generator) -> "OperatorExpr":
        return cls({((g, 1),): ONE})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def _coerce(self, other) -> "OperatorExpr":
        if isinstance(other, OperatorExpr):
            return other
        return OperatorExpr.scalar(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for mono, c in other._terms.items():
            out[mono] = out.get(mono, COEFF_RING.zero) + c
        return OperatorExpr(out)

    __radd__ = __add__

    def __neg__(self):
        return OperatorExpr({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, OperatorExpr):
            c = to_coeff(other)
            return OperatorExpr({m: v * c for m, v in self._terms.items()})
        return multiply(self, other)

    def __rmul__(self, other):
        c = to_coeff(other)
        return OperatorExpr({m: c * v for m, v in self._terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are outside the polynomial algebra")
        out = OperatorExpr.scalar(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, OperatorExpr):
            try:
                other = OperatorExpr.scalar(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self._terms == other._terms

    __hash__ = None

    def substitute(self, name: str, value) -> "OperatorExpr":
        """Replace a coefficient parameter by a polynomial or number."""
        gen = param(name)
        value = to_coeff(value)
        return OperatorExpr({m: c.compose(gen, value) for m, c in self._terms.items()})

    def coefficient(self, name: str, power: int) -> "OperatorExpr":
        """Part of the operator proportional to ``name**power`` (coefficient stripped of it)."""
        gen = param(name)
        return OperatorExpr({m: c.coeff_wrt(gen, power) for m, c in self._terms.items()})

    def dump(self) -> str:
        """One monomial per line, ``(coeff) * gen^exp ...``, deterministic order."""
        if not self._terms:
            return "0"
        lines = []
        for mono in sorted(self._terms, key=_mono_sort_key):
            coeff = self._terms[mono].as_expr()
            gens = " ".join(str(g) if e == 1 else f"{g}^{e}" for g, e in mono) or "1"
            lines.append(f"({coeff}) * {gens}")
        return "\n".join(lines)

    def __repr__(self):
        return f"OperatorExpr({self.dump()!r})"


def _mono_sort_key(mono):
    return (sum(e for _, e in mono), [(g.sort_key, e) for g, e in mono])


def multiply(A: OperatorExpr, B: OperatorExpr) -> OperatorExpr:
    """Normal-ordered product ``A B``."""
    out: dict = {}
    for m1, c1 in A._terms.items():
        for m2, c2 in B._terms.items():
            for mono, c in _multiply_monomials(m1, m2).items():
                out[mono] = out.get(mono, COEFF_RING.zero) + c1 * c2 * c
    return OperatorExpr(out)


def commutator(A: OperatorExpr, B: OperatorExpr) -> OperatorExpr:
    return multiply(A, B) - multiply(B, A)


def jacobi(A: OperatorExpr, B: OperatorExpr, C: OperatorExpr) -> OperatorExpr:
    return (
        commutator(commutator(A, B), C)
        + commutator(commutator(B, C), A)
        + commutator(commutator(C, A), B)
    )


def levi_civita(i: int, j: int, k: int) -> int:
    return (i - j) * (j - k) * (k - i) // 2


# generator shorthands (axes are 1-based)
def x(i: int, particle=1) -> OperatorExpr:
    return OperatorExpr.generator(Generator("x", i, particle))


def p(i: int, particle=1) -> OperatorExpr:
    return OperatorExpr.generator(Generator("p", i, particle))


def a(i: int) -> OperatorExpr:
    return OperatorExpr.generator(Generator("a", i))


def pa(i: int) -> OperatorExpr:
    return OperatorExpr.generator(Generator("pa", i))


AXES = (1, 2, 3)


def cross(u, v) -> list:
    """Operator-valued cross product keeping the left-right order of factors."""
    return [
        sum((levi_civita(i, j, k) * (u[j - 1] * v[k - 1]) for j in AXES for k in AXES),
            OperatorExpr())
        for i in AXES
    ]


def dot(u, v) -> OperatorExpr:
    return sum((u[i] * v[i] for i in range(3)), OperatorExpr())


def theta(i: int, j: int, particle=1) -> OperatorExpr:
    """Tensor of noncommutativity ``kappa_n eps_ijk a_k`` as an operator."""
    k_n = kappa(particle)
    return sum((levi_civita(i, j, k) * k_n * a(k) for k in AXES), OperatorExpr())


def build_nc_coordinate(axis: int, particle=1) -> OperatorExpr:
    """``X_i = x_i - 1/2 theta_ij p_j`` for the given particle."""
    k_n = kappa(particle)
    shift = OperatorExpr()
    for j in AXES:
        for k in AXES:
            e = levi_civita(axis, j, k)
            if e:
                shift = shift + e * (a(k) * p(j, particle))
    return x(axis, particle) - Fraction(1, 2) * k_n * shift


def build_nc_momentum(axis: int, particle=1) -> OperatorExpr:
    return p(axis, particle)


def total_angular_momentum(particle=1, form: str = "canonical") -> list:
    """Components of ``L^t = [x x p] + hbar [a x pa]``.

    ``form="nc"`` assembles the same operator from the noncommutative
    coordinates, ``[X x P] + kappa/2 [P x [a x P]] + hbar [a x pa]``.
    """
    avec = [a(i) for i in AXES]
    pavec = [pa(i) for i in AXES]
    osc = [HBAR * c for c in cross(avec, pavec)]
    if form == "canonical":
        orb = cross([x(i, particle) for i in AXES], [p(i, particle) for i in AXES])
        return [orb[i] + osc[i] for i in range(3)]
    if form == "nc":
        X = [build_nc_coordinate(i, particle) for i in AXES]
        P = [build_nc_momentum(i, particle) for i in AXES]
        XP = cross(X, P)
        PaP = cross(P, cross(avec, P))
        half_k = Fraction(1, 2) * kappa(particle)
        return [XP[i] + half_k * PaP[i] + osc[i] for i in range(3)]
    raise ValueError(f"unknown form {form!r}")


def xr_squared_sides(particle="r"):
    """Both sides of the identity for the squared relative distance operator.

    Returns ``(lhs, rhs)`` with ``lhs = sum_i X_i X_i`` built from the
    representation, and ``rhs = x^2 - (theta.L) + 1/4 [theta x p]^2`` where
    ``theta = kappa a`` and ``L = x x p``.
    """
    k = kappa(particle)
    X = [build_nc_coordinate(i, particle) for i in AXES]
    xs = [x(i, particle) for i in AXES]
    ps = [p(i, particle) for i in AXES]
    avec = [a(i) for i in AXES]
    lhs = dot(X, X)
    L = cross(xs, ps)
    axp = cross(avec, ps)
    rhs = dot(xs, xs) - k * dot(avec, L) + Fraction(1, 4) * k ** 2 * dot(axp, axp)
    return lhs, rhs


def expand_Xr_squared_check(particle="r") -> OperatorExpr:
    """Difference of the two sides of the squared-distance identity (zero when it holds)."""
    lhs, rhs = xr_squared_sides(particle)
    return lhs - rhs
