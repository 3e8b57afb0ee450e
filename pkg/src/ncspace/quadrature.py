"""
Non-perturbative ns-level integral at vanishing chi.

With the oscillator coordinate aligned along z, the squared distance operator
in scaled relative coordinates is

    A = x^2 + a^2 (p_x^2 + p_y^2) = H_perp + z^2,

where ``H_perp`` is a planar oscillator with levels ``2 a (2N + 1)`` (shell N
collects the even Hermite pairs with k1 + k2 = 2N). As chi -> 0 the hydrogen
state flattens to its value at the origin, ``psi(0)^2 = 1/(pi n^3)``, so

    I_ns(0, a) = psi(0)^2 * integral d^3x [1/|x| - (A^-1/2 1)(x)].

The z integral of each piece diverges logarithmically; combined pointwise it
equals ``sum_N P_N(rho) ln(lambda_N) - ln(rho^2)``, where ``P_N`` is the shell
projection of the constant function. The radial integral of that difference
is summed shell by shell and the alternating partial sums are averaged and
Richardson-extrapolated.

Two independent evaluations are provided: the spectral shell sum and a
finite-difference grid in (rho, z) with a dense eigendecomposition.
"""

from __future__ import annotations

import functools
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import special

from . import spectra
from .errors import GridTooCoarse, InconsistentScaling, NonConverged


@dataclass(frozen=True)
class SpectralConfig:
    """Truncation and quadrature settings for the spectral evaluation.

    hermite_truncation
        Largest total Hermite degree k1 + k2 kept; shells N <= K/2 enter.
    panel_nodes
        Gauss-Legendre nodes per radial panel.
    tolerance
        Relative bound on the Richardson error estimate.
    """

    hermite_truncation: int = 512
    panel_nodes: int = 20
    tolerance: float = 1e-4

    def __post_init__(self):
        if self.hermite_truncation < 8:
            raise ValueError("hermite_truncation must be at least 8")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")

    @property
    def shells(self) -> int:
        return self.hermite_truncation // 2 + 1


@dataclass
class InsResult:
    value: float
    a_tilde: float
    n: int
    k_sequence: list = field(default_factory=list)
    richardson: float = float("nan")
    error_estimate: float = float("nan")

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# modes


def hermite_functions(kmax: int, x) -> np.ndarray:
    """Normalized Hermite functions ``phi_0 .. phi_kmax`` at ``x`` (rows)."""
    x = np.asarray(x, dtype=float)
    out = np.empty((kmax + 1,) + x.shape)
    out[0] = math.pi ** -0.25 * np.exp(-x * x / 2)
    if kmax >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(2, kmax + 1):
        out[k] = math.sqrt(2.0 / k) * x * out[k - 1] - math.sqrt((k - 1) / k) * out[k - 2]
    return out


def constant_overlaps(kmax: int) -> np.ndarray:
    """``d_k = integral phi_k(x) dx``; zero for odd k, positive for even k."""
    d = np.zeros(kmax + 1)
    for k in range(0, kmax + 1, 2):
        j = k // 2
        log_d = 0.25 * math.log(math.pi) + 0.5 * math.log(2.0) + 0.5 * math.lgamma(k + 1) \
            - j * math.log(2.0) - math.lgamma(j + 1)
        d[k] = math.exp(log_d)
    return d


def hermite_shell_projection(N: int, x, y, a_tilde: float = 1.0) -> np.ndarray:
    """Projection of the constant function onto shell N, summed over Cartesian modes."""
    s = math.sqrt(a_tilde)
    fx = hermite_functions(2 * N, np.asarray(x) / s)
    fy = hermite_functions(2 * N, np.asarray(y) / s)
    d = constant_overlaps(2 * N)
    return sum(d[k] * d[2 * N - k] * fx[k] * fy[2 * N - k] for k in range(0, 2 * N + 1, 2))


def shell_projection(N: int, rho, a_tilde: float = 1.0) -> np.ndarray:
    """Same projection in closed radial form, ``2 (-1)^N exp(-t/2) L_N(t)``, t = rho^2/a."""
    t = np.asarray(rho, dtype=float) ** 2 / a_tilde
    return 2.0 * (-1) ** N * np.exp(-t / 2) * special.eval_laguerre(N, t)


def shell_eigenvalue(N: int, a_tilde: float) -> float:
    return 2.0 * a_tilde * (2 * N + 1)


def _shell_term(N: int, a_tilde: float, nodes: int) -> float:
    """``integral d^2rho P_N(rho) (ln lambda_N - ln rho^2)``."""
    s = math.sqrt(a_tilde)
    log_lam = math.log(shell_eigenvalue(N, a_tilde))
    # past the turning point t = 4N + 2 the Laguerre tail decays on an N^(1/3) scale
    u_max = math.sqrt(4 * N + 2 + 40 * (N + 1) ** (1 / 3) + 60)
    n_panels = N + 32
    edges = np.linspace(0.0, u_max, n_panels + 1) * s

    def f(rho):
        return 2 * math.pi * rho * shell_projection(N, rho, a_tilde) * (log_lam - np.log(rho * rho))

    g, w = special.roots_legendre(nodes)
    # first panel in t = rho^2, where the integrand is smooth apart from ln t;
    # geometric subpanels towards t = 0 resolve the logarithm
    t_edges = edges[1] ** 2 * np.r_[0.0, 0.5 ** np.arange(48, -1, -1)]
    tl, th = t_edges[:-1], t_edges[1:]
    th_half = 0.5 * (th - tl)
    tp = (0.5 * (th + tl))[:, None] + th_half[:, None] * g[None, :]
    ft = math.pi * shell_projection(N, np.sqrt(tp), a_tilde) * (log_lam - np.log(tp))
    first = float(np.sum(ft * w[None, :] * th_half[:, None]))
    lo, hi = edges[1:-1], edges[2:]
    half = 0.5 * (hi - lo)
    pts = (0.5 * (hi + lo))[:, None] + half[:, None] * g[None, :]
    rest = float(np.sum(f(pts) * w[None, :] * half[:, None]))
    return first + rest


@functools.lru_cache(maxsize=64)
def _shell_partial_sums(a_tilde: float, shells: int, nodes: int) -> np.ndarray:
    terms = np.array([_shell_term(N, a_tilde, nodes) for N in range(shells)])
    return np.cumsum(terms)


def _averaged(S: np.ndarray, K: int) -> float:
    return 0.5 * (S[K] + S[K - 1])


def origin_density(n: int) -> float:
    """``psi_n00(0)^2`` from the Laguerre form of the s-state."""
    return float(spectra.laguerre(n - 1, 1, 0.0)) ** 2 / (math.pi * n ** 5)


def universal_integral(a_tilde: float, cfg: SpectralConfig = SpectralConfig()) -> dict:
    """Spectral value of ``integral d^3x [1/|x| - A^-1/2 1]`` with diagnostics."""
    if a_tilde <= 0:
        raise ValueError("a_tilde must be positive")
    S = _shell_partial_sums(float(a_tilde), cfg.shells, cfg.panel_nodes)
    K = cfg.shells - 1
    K2, K4 = K // 2, K // 4
    T = {k: _averaged(S, k) for k in (K4, K2, K)}
    # averaged sums converge like 1/K with a 1/K^2 correction: two Richardson levels
    r_coarse = 2 * T[K2] - T[K4]
    r_fine = 2 * T[K] - T[K2]
    r2 = (4 * r_fine - r_coarse) / 3
    seq = [(2 * k, _averaged(S, k)) for k in sorted({8, 16, 32, 64, 128, 256, 512, K4, K2, K} )
           if 1 <= k <= K]
    return {
        "value": float(r2),
        "error": float(abs(r2 - r_fine)),
        "k_sequence": [(int(k), float(v)) for k, v in seq],
        "partial_sums": S,
    }


def ins_fixed_a(n: int, a_tilde: float, cfg: SpectralConfig = SpectralConfig()) -> InsResult:
    """``I_ns(0, a)`` by the spectral shell sum."""
    if n < 1:
        raise ValueError("n must be >= 1")
    u = universal_integral(a_tilde, cfg)
    if u["error"] > cfg.tolerance * abs(u["value"]):
        raise NonConverged(
            f"shell sum not converged: Richardson error {u['error']:.3g} at K={cfg.hermite_truncation}")
    rho0 = origin_density(n)
    return InsResult(
        value=rho0 * u["value"],
        a_tilde=float(a_tilde),
        n=n,
        k_sequence=[(k, rho0 * v) for k, v in u["k_sequence"]],
        richardson=rho0 * u["value"],
        error_estimate=rho0 * u["error"],
    )


@dataclass
class ConstantResult:
    constant: float
    max_deviation: float
    error_estimate: float
    points: list

    def to_dict(self) -> dict:
        return {
            "constant": self.constant,
            "max_deviation": self.max_deviation,
            "error_estimate": self.error_estimate,
            "points": [p.to_dict() for p in self.points],
        }


def constant_from(result: InsResult) -> float:
    return result.value * 4 * result.n ** 3 / (math.pi * result.a_tilde)


def extract_constant(n_list, a_list, cfg: SpectralConfig = SpectralConfig(),
                     scaling_tolerance: float = 1e-3, inject: bool = True) -> ConstantResult:
    """Fit ``I_ns(0, a) = C pi a / (4 n^3)`` over a grid of (n, a)."""
    n_list, a_list = list(n_list), list(a_list)
    if not n_list or not a_list:
        raise ValueError("n_list and a_list must be nonempty")
    points = [ins_fixed_a(n, a, cfg) for a in a_list for n in n_list]
    cs = np.array([constant_from(p) for p in points])
    c = float(cs.mean())
    dev = float(np.max(np.abs(cs - c)) / abs(c))
    if dev > scaling_tolerance:
        raise InconsistentScaling(f"constant varies by {dev:.3g} across the grid")
    err = max(p.error_estimate * 4 * p.n ** 3 / (math.pi * p.a_tilde) for p in points)
    if inject:
        spectra.set_ns_constant(c)
    return ConstantResult(c, dev, float(err), points)


def oscillator_average(f, nodes: int = 24, a_max: float = 6.5) -> float:
    """``<f(|a|)>`` over the 3-D oscillator ground state.

    Gauss-Legendre in |a| on ``[0, a_max]``; the weight ``a^2 exp(-a^2)`` is
    below 1e-16 beyond the default cutoff.
    """
    g, w = special.roots_legendre(nodes)
    a = 0.5 * a_max * (g + 1)
    weight = 4 / math.sqrt(math.pi) * a * a * np.exp(-a * a)
    return float(0.5 * a_max * sum(wi * wti * f(ai) for ai, wi, wti in zip(a, w, weight)))


def ins_gaussian_avg(n: int, cfg: SpectralConfig = SpectralConfig(),
                     method: str = "linear", nodes: int = 24) -> float:
    """``I_ns(0)``: ``I_ns(0, a)`` averaged over the oscillator ground state.

    ``method="linear"`` uses exact linearity in |a| (slope times <|a|>);
    ``method="quadrature"`` averages ``ins_fixed_a`` over quadrature nodes in |a|.
    """
    if method == "linear":
        return ins_fixed_a(n, 1.0, cfg).value * spectra.oscillator_moment(1)
    if method == "quadrature":
        return oscillator_average(lambda a: ins_fixed_a(n, a, cfg).value, nodes)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# finite-difference oracle


@dataclass(frozen=True)
class GridConfig:
    """Cell-centred radial grid on ``[0, rho_max]`` with a zero-flux outer wall.

    The z direction needs no grid: z^2 is diagonal, so each radial eigenvector
    contributes ``ln(mu_k)`` after the z integral of the difference.
    """

    rho_max: float = 20.0
    n_rho: int = 400

    def __post_init__(self):
        if self.rho_max <= 0 or self.n_rho < 10:
            raise ValueError("rho_max must be positive and n_rho >= 10")
        if self.n_rho > 400:
            raise ValueError("n_rho is limited to 400 for the dense oracle")


def _radial_operator(grid: GridConfig, m: int = 0, outer: str = "neumann"):
    """Symmetrised ``-(1/rho) d/drho rho d/drho + m^2/rho^2`` in the sqrt(rho)-weighted basis."""
    h = grid.rho_max / grid.n_rho
    rho = (np.arange(grid.n_rho) + 0.5) * h
    faces = np.arange(grid.n_rho + 1) * h
    diag_faces = faces[1:] + faces[:-1]
    if outer == "neumann":
        diag_faces[-1] = faces[-2]
    sw = np.sqrt(rho)
    main = diag_faces / (h * h * rho) + m * m / rho ** 2
    off = -faces[1:-1] / (h * h * sw[:-1] * sw[1:])
    op = np.diag(main) + np.diag(off, 1) + np.diag(off, -1)
    return rho, h, op


def grid_oracle(n: int, a_tilde: float, grid: GridConfig = GridConfig()) -> float:
    """``I_ns(0, a)`` from a dense finite-difference discretisation of A."""
    if a_tilde < 0:
        raise ValueError("a_tilde must be nonnegative")
    rho, h, lap = _radial_operator(grid)
    if a_tilde > 0 and (h > math.sqrt(a_tilde) / 4 or grid.rho_max < 8 * math.sqrt(a_tilde)):
        raise GridTooCoarse(
            f"grid (h={h:.3g}, rho_max={grid.rho_max}) cannot resolve a_tilde={a_tilde}")
    H = a_tilde ** 2 * lap + np.diag(rho ** 2)
    mu, Q = np.linalg.eigh(H)
    if mu[0] <= 0:
        raise GridTooCoarse("discrete operator is not positive definite")
    sw = np.sqrt(rho)
    log_h_one = (Q @ (np.log(mu) * (Q.T @ sw))) / sw
    diff = log_h_one - np.log(rho ** 2)
    return origin_density(n) * float(np.sum(2 * math.pi * rho * h * diff))


# ---------------------------------------------------------------------------
# expansion remainder


@dataclass(frozen=True)
class ExpansionGrid:
    rho_max: float = 8.0
    n_rho: int = 200
    z_half_width: float = 6.0
    n_z: int = 241


@dataclass(frozen=True)
class TestState:
    """``rho^|m| exp(-((rho - rho0)^2 + (z - z0)^2) / width2) e^{i m phi}``."""

    m: int = 1
    rho0: float = 3.0
    z0: float = 0.0
    width2: float = 0.8

    __test__ = False

    def __call__(self, rho, z):
        return rho ** abs(self.m) * np.exp(-((rho - self.rho0) ** 2 + (z - self.z0) ** 2) / self.width2)


def _expansion_residuals(scales, state: TestState, grid: ExpansionGrid, order: int) -> list:
    g = GridConfig.__new__(GridConfig)
    object.__setattr__(g, "rho_max", grid.rho_max)
    object.__setattr__(g, "n_rho", grid.n_rho)
    rho, h, lap = _radial_operator(g, state.m, outer="dirichlet")
    z = np.linspace(-grid.z_half_width, grid.z_half_width, grid.n_z)
    hz = z[1] - z[0]
    R, Z = np.meshgrid(rho, z, indexing="ij")
    r = np.sqrt(R * R + Z * Z)
    sw = np.sqrt(rho)[:, None]
    u = state(R, Z) * sw
    m = state.m

    def norm(v):
        return math.sqrt(float(np.sum(np.abs(v) ** 2)) * 2 * math.pi * h * hz)

    out = []
    for s in scales:
        # X^2 in the m sector: rho^2 - s m + (s^2/4) p_perp^2, plus z^2 (diagonal)
        H = np.diag(rho ** 2) - s * m * np.eye(len(rho)) + 0.25 * s * s * lap
        mu, Q = np.linalg.eigh(H)
        if mu[0] < -1e-12:
            raise GridTooCoarse("discretised squared distance has negative eigenvalues")
        exact = Q @ (np.sqrt(np.clip(mu[:, None] + z[None, :] ** 2, 0.0, None)) * (Q.T @ u))
        approx = r * u - s * m / (2 * r) * u
        if order >= 2:
            approx = approx - (s * m) ** 2 / (8 * r ** 3) * u + s * s / 16 * (
                lap @ u / r + lap @ (u / r) + R * R / r ** 5 * u)
        out.append(norm(exact - approx))
    return out


def expansion_consistency_check(theta_scales, test_state: TestState | None = None,
                                grid: ExpansionGrid | None = None, order: int = 2,
                                check_refinement: bool = False) -> list:
    """Norm of ``(exact X - expansion of X)`` applied to a test state, per theta scale.

    ``theta^mu`` points along z with magnitude ``s``; in the azimuthal sector m
    every operator in the expansion reduces to (rho, z), with
    theta.L = s m, [theta x p]^2 = s^2 p_perp^2 and [theta x x]^2 = s^2 rho^2.
    The second-order remainder should shrink as s^3; ``order=1`` drops the
    second-order terms and leaves an s^2 remainder.
    """
    state = test_state or TestState()
    grid = grid or ExpansionGrid()
    res = _expansion_residuals(list(theta_scales), state, grid, order)
    if check_refinement:
        fine = ExpansionGrid(grid.rho_max, 2 * grid.n_rho, grid.z_half_width, 2 * grid.n_z - 1)
        res_fine = _expansion_residuals(list(theta_scales), state, fine, order)
        pos = [i for i, s in enumerate(theta_scales) if s > 0]
        if len(pos) >= 2:
            xs = [theta_scales[i] for i in pos]
            s1 = np.polyfit(np.log(xs), np.log([res[i] for i in pos]), 1)[0]
            s2 = np.polyfit(np.log(xs), np.log([res_fine[i] for i in pos]), 1)[0]
            if abs(s1 - s2) > 0.1:
                raise GridTooCoarse(f"remainder slope moved from {s1:.3f} to {s2:.3f} under refinement")
    return res
