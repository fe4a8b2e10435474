"""Imaginary-time lattice path integrals: short-time kernels, transfer matrices, quantum potentials."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import optimize

from .geometry import CONFORMAL, Chart, NonConformalChart, SpaceId, SpaceParams, SystemId, metric_diag
from .kernels import UNITS, BoundaryNodeZero, MptParams, PhysicalConstants, linear_green_halfspace, mpt_bound_energy
from .verify import StencilOutsideDomain


class LatticeError(ArithmeticError):
    pass


class GridTooCoarse(LatticeError, ValueError):
    pass


class NotConverged(LatticeError):
    pass


class DerivativeSingularity(LatticeError, ZeroDivisionError):
    pass


@dataclass(frozen=True)
class Slicing:
    """Grid and imaginary-time step; ``n_slices`` bounds the number of kernel applications."""
    grid_lo: float
    grid_hi: float
    n_points: int
    epsilon: float
    n_slices: int = 4000

    def __post_init__(self):
        if not self.grid_hi > self.grid_lo:
            raise ValueError("grid_hi must exceed grid_lo")
        if self.n_points < 16:
            raise ValueError("n_points must be at least 16")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.n_slices < 1:
            raise ValueError("n_slices must be at least 1")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.grid_lo, self.grid_hi, self.n_points)

    @property
    def dx(self) -> float:
        return (self.grid_hi - self.grid_lo) / (self.n_points - 1)

    @property
    def total_time(self) -> float:
        return self.epsilon * self.n_slices

    def with_epsilon(self, epsilon: float) -> "Slicing":
        return Slicing(self.grid_lo, self.grid_hi, self.n_points, epsilon, self.n_slices)

    def with_points(self, n_points: int) -> "Slicing":
        return Slicing(self.grid_lo, self.grid_hi, n_points, self.epsilon, self.n_slices)


class PotentialId(str, Enum):
    LINEAR = "LINEAR"
    HARMONIC = "HARMONIC"
    RADIAL_HO = "RADIAL_HO"
    MORSE = "MORSE"
    MPT = "MPT"
    QUARTIC_DI = "QUARTIC_DI"
    LIOUVILLE = "LIOUVILLE"


_REQUIRED = {
    PotentialId.LINEAR: ("k",),
    PotentialId.HARMONIC: ("omega",),
    PotentialId.RADIAL_HO: ("omega", "lam"),
    PotentialId.MORSE: ("V0", "alpha"),
    PotentialId.MPT: ("eta", "nu"),
    PotentialId.QUARTIC_DI: ("E", "a"),
    PotentialId.LIOUVILLE: ("kappa",),
}


@dataclass(frozen=True)
class Potential1D:
    """A one-dimensional potential.

    LINEAR        k x
    HARMONIC      m omega^2 x^2 / 2
    RADIAL_HO     m omega^2 x^2 / 2 + hbar^2 (lam^2 - 1/4) / (2 m x^2)
    MORSE         (V0^2 hbar^2 / 2m) (e^{-2x} - 2 alpha e^{-x})
    MPT           (hbar^2 / 2m) [(eta^2 - 1/4)/sinh^2 x - (nu^2 - 1/4)/cosh^2 x]
    QUARTIC_DI    -E (x^4 + 2 a x^2); E < 0 makes it confining
    LIOUVILLE     (hbar^2 / 2m) kappa^2 e^{2x}
    """
    id: PotentialId
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        pid = PotentialId(self.id)
        object.__setattr__(self, "id", pid)
        missing = [k for k in _REQUIRED[pid] if k not in self.params]
        if missing:
            raise ValueError(f"{pid.value} needs parameters {missing}")
        object.__setattr__(self, "params", {k: float(v) for k, v in self.params.items()})

    def __call__(self, x, pc: PhysicalConstants = UNITS):
        x = np.asarray(x, dtype=float)
        p, m, hb = self.params, pc.mass, pc.hbar
        c = hb * hb / (2 * m)
        if self.id == PotentialId.LINEAR:
            return p["k"] * x
        if self.id == PotentialId.HARMONIC:
            return 0.5 * m * p["omega"] ** 2 * x * x
        if self.id == PotentialId.RADIAL_HO:
            return 0.5 * m * p["omega"] ** 2 * x * x + c * (p["lam"] ** 2 - 0.25) / (x * x)
        if self.id == PotentialId.MORSE:
            return c * p["V0"] ** 2 * (np.exp(-2 * x) - 2 * p["alpha"] * np.exp(-x))
        if self.id == PotentialId.MPT:
            return c * ((p["eta"] ** 2 - 0.25) / np.sinh(x) ** 2 - (p["nu"] ** 2 - 0.25) / np.cosh(x) ** 2)
        if self.id == PotentialId.QUARTIC_DI:
            return -p["E"] * (x ** 4 + 2 * p["a"] * x * x)
        return c * p["kappa"] ** 2 * np.exp(2 * x)


def exact_ground_energy(pot: Potential1D, pc: PhysicalConstants = UNITS) -> float | None:
    """Closed-form lowest level where one is known, else None.

    LINEAR is taken on x >= 0 with a Dirichlet wall at 0 (see
    ``linear_halfspace_pole``).
    """
    p, hb, m = pot.params, pc.hbar, pc.mass
    if pot.id == PotentialId.HARMONIC:
        return 0.5 * hb * p["omega"]
    if pot.id == PotentialId.RADIAL_HO:
        return hb * p["omega"] * (abs(p["lam"]) + 1)
    if pot.id == PotentialId.MORSE:
        s = p["alpha"] * p["V0"]
        if s <= 0.5:
            return None
        return -hb * hb / (2 * m) * (s - 0.5) ** 2
    if pot.id == PotentialId.MPT:
        return mpt_bound_energy(0, MptParams(p["eta"], p["nu"]), pc)
    if pot.id == PotentialId.LINEAR:
        return linear_halfspace_pole(p["k"], 0.0, pc)
    return None


def linear_halfspace_pole(k: float, boundary_a: float, pc: PhysicalConstants = UNITS) -> float:
    """Lowest pole in E of the Dirichlet half-space Green's function of V = k x."""
    if k <= 0:
        raise ValueError("the half-space problem is confining only for k > 0")
    scale = (pc.hbar ** 2 * k * k / (2 * pc.mass)) ** (1 / 3)
    x1 = boundary_a + 0.7 * scale / k
    x2 = boundary_a + 1.1 * scale / k

    def inv(e):
        try:
            return (1.0 / linear_green_halfspace(x1, x2, e, k, boundary_a, pc)).real
        except BoundaryNodeZero:
            return 0.0

    # scan upward from the wall energy until 1/G changes sign
    e0 = k * boundary_a
    step = 0.05 * scale
    lo, flo = e0 + 0.1 * scale, inv(e0 + 0.1 * scale)
    for _ in range(400):
        hi = lo + step
        fhi = inv(hi)
        if np.sign(fhi) != np.sign(flo):
            return optimize.brentq(inv, lo, hi, xtol=1e-14 * scale, rtol=1e-14)
        lo, flo = hi, fhi
    raise NotConverged("no pole found")


# ---------------------------------------------------------------------------
# Transfer matrices


class Prescription(str, Enum):
    MIDPOINT = "midpoint"      # V((x + y)/2): energies carry an O(eps) error
    SYMMETRIC = "symmetric"    # (V(x) + V(y))/2, the symmetric split: O(eps^2)


_ORDER = {Prescription.MIDPOINT: 1, Prescription.SYMMETRIC: 2}


def short_time_kernel(pot: Potential1D, slicing: Slicing, pc: PhysicalConstants = UNITS,
                      dirichlet: bool = False, prescription: Prescription | str = "midpoint") -> np.ndarray:
    """Euclidean short-time kernel times dx, symmetric in its indices.

    The potential enters at the midpoint by default.  ``dirichlet`` zeroes
    the first and last rows and columns.
    """
    prescription = Prescription(prescription)
    x = slicing.grid
    eps, m, hb = slicing.epsilon, pc.mass, pc.hbar
    dx = slicing.dx
    # 1/e half-width of the Gaussian
    if math.sqrt(2 * hb * eps / m) <= 2 * dx:
        raise GridTooCoarse(f"kernel width {math.sqrt(2 * hb * eps / m):.4g} does not exceed 2 dx = {2 * dx:.4g}")
    d = x[:, None] - x[None, :]
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        if prescription is Prescription.MIDPOINT:
            v = np.asarray(pot(0.5 * (x[:, None] + x[None, :]), pc), dtype=float)
        else:
            vx = np.asarray(pot(x, pc), dtype=float)
            v = 0.5 * (vx[:, None] + vx[None, :])
        expo = -m * d * d / (2 * hb * eps) - eps * v / hb
    expo = np.where(np.isfinite(expo), expo, -np.inf)
    M = math.sqrt(m / (2 * math.pi * hb * eps)) * np.exp(expo) * dx
    if dirichlet:
        M[0, :] = M[-1, :] = 0.0
        M[:, 0] = M[:, -1] = 0.0
    return M


def lattice_energy(pot: Potential1D, slicing: Slicing, pc: PhysicalConstants = UNITS,
                   dirichlet: bool = False, prescription: Prescription | str = "symmetric",
                   tol: float = 1e-12) -> float:
    """-(hbar/eps) ln lambda_max at a single step, by repeated kernel application."""
    M = short_time_kernel(pot, slicing, pc, dirichlet, prescription)
    v = np.ones(slicing.n_points)
    if dirichlet:
        v[0] = v[-1] = 0.0
    v /= np.linalg.norm(v)
    prev = None
    for _ in range(slicing.n_slices):
        w = M @ v
        lam = float(v @ w)  # ratio of successive powers (M is symmetric)
        nrm = np.linalg.norm(w)
        if not nrm > 0:
            raise NotConverged("transfer matrix annihilated the trial vector")
        v = w / nrm
        if prev is not None and abs(lam - prev) <= tol * abs(lam):
            return -pc.hbar / slicing.epsilon * math.log(lam)
        prev = lam
    raise NotConverged(f"power iteration not converged after {slicing.n_slices} slices")


def ground_energy(pot: Potential1D, slicing: Slicing, pc: PhysicalConstants = UNITS,
                  dirichlet: bool = False, prescription: Prescription | str = "symmetric") -> float:
    """Lowest level from the lattice at eps and eps/2, extrapolated to eps = 0.

    The extrapolation assumes the leading error order: that of the
    prescription, or 1/2 with Dirichlet edges, where paths that cross the
    wall between two slices go unseen.
    """
    prescription = Prescription(prescription)
    e1 = lattice_energy(pot, slicing, pc, dirichlet, prescription)
    e2 = lattice_energy(pot, slicing.with_epsilon(0.5 * slicing.epsilon), pc, dirichlet, prescription)
    w = math.sqrt(2.0) if dirichlet else 2 ** _ORDER[prescription]
    return (w * e2 - e1) / (w - 1)


def trotter_order(pot: Potential1D, slicing: Slicing, exact: float, epsilons,
                  pc: PhysicalConstants = UNITS, dirichlet: bool = False,
                  prescription: Prescription | str = "symmetric") -> float:
    """Slope of log|E(eps) - exact| against log eps."""
    eps = np.asarray(list(epsilons), dtype=float)
    err = [abs(lattice_energy(pot, slicing.with_epsilon(e), pc, dirichlet, prescription) - exact) for e in eps]
    return float(np.polyfit(np.log(eps), np.log(err), 1)[0])


def fluctuation_identity_check(epsilon: float, n_samples: int, seed: int,
                               pc: PhysicalConstants = UNITS) -> float:
    """Sample mean of dy^4 over 3 (eps hbar/m)^2 for Euclidean short-time steps.

    The standard error of the result is FLUCTUATION_SE / sqrt(n_samples).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    var = epsilon * pc.hbar / pc.mass
    dy = np.random.default_rng(seed).normal(0.0, math.sqrt(var), n_samples)
    return float(np.mean(dy ** 4) / (3 * var * var))


# sqrt(Var z^4)/3 for a standard normal z: sqrt(105 - 9)/3
FLUCTUATION_SE = math.sqrt(96.0) / 3.0


# ---------------------------------------------------------------------------
# Quantum potentials and time transformation


def _d12(fun, x: float, h: float) -> tuple[float, float]:
    v = [fun(x + o * h) for o in (-2, -1, 0, 1, 2)]
    d1 = (v[0] - 8 * v[1] + 8 * v[3] - v[4]) / (12 * h)
    d2 = (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * h * h)
    return d1, d2


def _d12_rich(fun, x: float, h: float) -> tuple[float, float]:
    a1, a2 = _d12(fun, x, h)
    b1, b2 = _d12(fun, x, 0.5 * h)
    return (16 * b1 - a1) / 15, (16 * b2 - a2) / 15


def conformal_quantum_potential(f, q, pc: PhysicalConstants = UNITS, step: float = 1e-2) -> float:
    """hbar^2 (D-2)/(8m) sum_a [(4-D) f_a^2 + 2 f f_aa] / f^4 for g = f^2 delta.

    ``f`` maps a length-D sequence to a float.  In D = 2 this is zero.
    """
    q = [float(x) for x in q]
    D = len(q)
    if D == 2:
        return 0.0
    f0 = f(q)
    total = 0.0
    for a in range(D):
        def along(t, a=a):
            y = list(q)
            y[a] = t
            return f(y)
        h = step * max(1.0, abs(q[a]))
        d1, d2 = _d12_rich(along, q[a], h)
        total += ((4 - D) * d1 * d1 + 2 * f0 * d2) / f0 ** 4
    return pc.hbar ** 2 * (D - 2) / (8 * pc.mass) * total


def diagonal_quantum_potential(chart: Chart, q, pc: PhysicalConstants = UNITS, step: float = 1e-2) -> float:
    """Product-form quantum potential of an orthogonal 2D chart with h = diag(sqrt g_aa).

    For g = diag(g_1, g_2) and L = ln sqrt|g| the general expression reduces
    to (hbar^2/8m) sum_a [L_a^2 + 2 L_aa - 2 L_a g_a,a / g_a
    + 3 (g_a,a / g_a)^2 - 2 g_a,aa / g_a] / g_a, derivatives taken along axis a.
    """
    q = (float(q[0]), float(q[1]))
    total = 0.0
    for a in (0, 1):
        h = step * max(1.0, abs(q[a]))
        for o in (-2, 2):
            y = list(q)
            y[a] += o * h
            if not chart.in_domain(y):
                raise StencilOutsideDomain(f"stencil around {q} leaves the chart domain")

        def comp(t, a=a):
            y = list(q)
            y[a] = t
            return chart.metric_components(y[0], y[1])[a]

        def logsq(t, a=a):
            y = list(q)
            y[a] = t
            g1, g2 = chart.metric_components(y[0], y[1])
            return 0.5 * math.log(abs(g1 * g2))

        g = comp(q[a])
        g1, g2 = _d12_rich(comp, q[a], h)
        L1, L2 = _d12_rich(logsq, q[a], h)
        total += (L1 * L1 + 2 * L2 - 2 * L1 * g1 / g + 3 * (g1 / g) ** 2 - 2 * g2 / g) / g
    return pc.hbar ** 2 / (8 * pc.mass) * total


def quantum_potential_pf(chart: Chart, q, pc: PhysicalConstants = UNITS) -> float:
    """Product-form quantum potential at q.

    Conformal charts use the conformal formula with D = 2; other orthogonal
    charts use the diagonal product form.
    """
    if not chart.in_domain(q):
        raise StencilOutsideDomain(f"{tuple(q)} is outside the chart domain")
    if (chart.space.space_id, chart.system_id) in CONFORMAL:
        return conformal_quantum_potential(lambda y: math.sqrt(chart.metric_components(y[0], y[1])[0]), q, pc)
    return diagonal_quantum_potential(chart, q, pc)


def schwarz_quantum_potential(F, q: float, pc: PhysicalConstants = UNITS, step: float = 1e-2) -> float:
    """(hbar^2/8m) (3 F''^2/F'^2 - 2 F'''/F') by central differences."""
    q = float(q)
    h = step * max(1.0, abs(q))

    def derivs(h):
        v = [F(q + o * h) for o in (-2, -1, 0, 1, 2)]
        d1 = (v[0] - 8 * v[1] + 8 * v[3] - v[4]) / (12 * h)
        d2 = (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * h * h)
        d3 = (-v[0] + 2 * v[1] - 2 * v[3] + v[4]) / (2 * h ** 3)
        return d1, d2, d3

    a = derivs(h)
    b = derivs(0.5 * h)
    d1 = (16 * b[0] - a[0]) / 15
    d2 = (16 * b[1] - a[1]) / 15
    d3 = (4 * b[2] - a[2]) / 3  # the third-derivative stencil is second order
    scale = max(abs(F(q + h) - F(q - h)) / (2 * h), abs(F(q)), 1e-300)
    if abs(d1) <= 1e-10 * scale:
        raise DerivativeSingularity(f"F'({q}) vanishes")
    return pc.hbar ** 2 / (8 * pc.mass) * (3 * d2 * d2 / (d1 * d1) - 2 * d3 / d1)


# The time-transformation functions as written for each chart with a closed
# form; horospherical follows the metric (a+ with the second coordinate).
_STATED_F = {
    (SpaceId.DI, SystemId.UV): lambda s, x, y: 2 * x,
    (SpaceId.DI, SystemId.DISPLACED_PARABOLIC): lambda s, x, y: (x * x - y * y + 2 * s.a) * (x * x + y * y),
    (SpaceId.DII, SystemId.UV): lambda s, x, y: (s.b * x * x - s.a) / (x * x),
    (SpaceId.DII, SystemId.PARABOLIC): lambda s, x, y: (s.b * x * x * y * y - s.a) * (x * x + y * y) / (x * x * y * y),
    (SpaceId.DIII, SystemId.UV): lambda s, x, y: s.a * math.exp(-x) + s.b * math.exp(-2 * x),
    (SpaceId.DIII, SystemId.POLAR): lambda s, x, y: s.a + 0.25 * s.b * x * x,
    (SpaceId.DIII, SystemId.PARABOLIC): lambda s, x, y: s.a + 0.25 * s.b * (x * x + y * y),
    (SpaceId.DIV, SystemId.HOROSPHERICAL): lambda s, x, y: s.a_plus / (y * y) + s.a_minus / (x * x),
}


def time_transform_factor(space: SpaceParams, system_id, q, theta: float = 0.0) -> float:
    """Time-transformation function of a chart: the factor f in ds^2 = f (dq1^2 + h^2 dq2^2).

    On conformal charts this is sqrt(g); on polar-type charts it is
    g_11 = sqrt(g)/h.  Lorentzian charts raise NonConformalChart.
    """
    chart = Chart(space, SystemId(system_id), domain=(-1e300, 1e300, -1e300, 1e300), theta=theta)
    ms = metric_diag(chart, q)
    if ms.g22 < 0:
        raise NonConformalChart("the Lorentzian chart has no time-transformation function")
    conformal = (space.space_id, chart.system_id) in CONFORMAL
    val = ms.sqrt_abs_g if conformal else ms.g11
    stated = _STATED_F.get((space.space_id, chart.system_id))
    if stated is not None:
        ref = stated(space, float(q[0]), float(q[1]))
        if abs(ref - val) > 1e-12 * max(1.0, abs(ref)):
            raise LatticeError(f"time-transformation function {ref} disagrees with the metric value {val}")
    return val
