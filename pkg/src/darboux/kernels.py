"""Basic one-dimensional propagators and Green's functions.

Conventions: every Green's function G(x1, x2; E) solves (H - E) G = delta(x1 - x2)
in its first argument, with H = -hbar^2/(2m) d^2/dx^2 + V.  Resolvents are
meant to be evaluated at Im E > 0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

from . import specfun as sf


class KernelError(ArithmeticError):
    pass


class CausticSingularity(KernelError):
    """sin(omega T) = 0: the oscillator kernel is singular."""


class PoleAtBoundState(KernelError):
    """The energy sits on a pole of the Green's function."""


class BranchCutHit(KernelError, ValueError):
    pass


class BoundaryNodeZero(KernelError):
    """G(a, a) = 0, so E is a Dirichlet eigenvalue and the subtraction fails."""


class NoBoundStates(KernelError, ValueError):
    pass


class IndexBeyondNM(KernelError, ValueError):
    pass


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and self.mass > 0):
            raise ValueError("hbar and mass must be strictly positive")


UNITS = PhysicalConstants()

_POLE_TOL = 1e-13


def _check_gamma_arg(z: complex, what: str) -> None:
    n = round(-z.real)
    if n >= 0 and abs(z + n) < _POLE_TOL * max(1.0, abs(z)):
        raise PoleAtBoundState(f"{what} = {z} is a pole of the Gamma function")


# ---------------------------------------------------------------------------
# Radial harmonic oscillator


def rho_kernel(r1: float, r2: float, T: float, omega: complex, lam: complex,
               pc: PhysicalConstants = UNITS, euclidean: bool = False) -> complex:
    """Radial oscillator propagator with centrifugal term hbar^2(lam^2 - 1/4)/2mr^2.

    With ``euclidean=True`` T is an imaginary time T_E (T = -i T_E) and the
    heat-kernel form is returned.  omega = 0 gives the free radial kernel.
    """
    if r1 <= 0 or r2 <= 0:
        raise ValueError("radial arguments must be positive")
    m, hb = pc.mass, pc.hbar
    omega = complex(omega)
    if euclidean:
        if omega == 0:
            s = complex(T)
            c = 1.0 / s
        else:
            s = cmath.sinh(omega * T) / omega
            c = cmath.cosh(omega * T) / s
        if s == 0:
            raise CausticSingularity("sinh(omega T_E) = 0")
        arg = m * r1 * r2 / (hb * s)
        return (m * math.sqrt(r1 * r2) / (hb * s) * cmath.exp(-m * (r1 * r1 + r2 * r2) * c / (2 * hb))
                * sf.bessel_i(lam, arg))
    if omega == 0:
        s = complex(T)
        c = 1.0 / s
    else:
        sn = cmath.sin(omega * T)
        if abs(sn) < 1e-14:
            raise CausticSingularity("sin(omega T) = 0")
        s = sn / omega
        c = cmath.cos(omega * T) / s
    arg = m * r1 * r2 / (1j * hb * s)
    return (m * math.sqrt(r1 * r2) / (1j * hb * s) * cmath.exp(-m * (r1 * r1 + r2 * r2) * c / (2j * hb))
            * sf.bessel_i(lam, arg))


def rho_green(r1: float, r2: float, E: complex, omega: complex, lam: complex,
              pc: PhysicalConstants = UNITS) -> complex:
    """Energy Green's function of the radial oscillator (Whittaker form)."""
    if r1 <= 0 or r2 <= 0:
        raise ValueError("radial arguments must be positive")
    m, hb = pc.mass, pc.hbar
    hw = hb * complex(omega)
    ga = 0.5 * (1 + lam - E / hw)
    _check_gamma_arg(ga, "1/2(1 + lambda - E/hbar omega)")
    rl, rg = min(r1, r2), max(r1, r2)
    kap, mu = E / (2 * hw), 0.5 * lam
    c = m * omega / hb
    pref = sf.gamma(ga) * sf.rgamma(1 + lam) / (hw * math.sqrt(r1 * r2))
    return pref * sf.whittaker_w(kap, mu, c * rg * rg) * sf.whittaker_m(kap, mu, c * rl * rl)


# ---------------------------------------------------------------------------
# Linear potential V = k x


class LeftBoundary(str, Enum):
    REGULAR = "regular"
    OUTGOING = "outgoing"


_AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
_W = cmath.exp(2j * math.pi / 3)


def _ai_log(y: complex) -> tuple[complex, complex]:
    """Ai(y) as (mantissa, exponent): Ai = mantissa * exp(exponent)."""
    s, zeta = sf.airy_ai_scaled(y)
    return s, -zeta


def _lsum(terms) -> tuple[complex, complex]:
    terms = [(c, e) for c, e in terms if c != 0]
    if not terms:
        return 0j, 0j
    ref = max(terms, key=lambda t: t[1].real)[1]
    return sum(c * cmath.exp(e - ref) for c, e in terms), ref


class _Linear:
    """Solutions of -hbar^2/2m g'' + (k x - Ecal) g = 0 in log-scaled form."""

    def __init__(self, Ecal: complex, k: complex, pc: PhysicalConstants, left: LeftBoundary):
        k = complex(k)
        if k == 0:
            raise BranchCutHit("k = 0 is not a linear potential")
        self.Ecal, self.k = complex(Ecal), k
        self.gamma = (2 * pc.mass * k / pc.hbar ** 2) ** (1.0 / 3.0)
        th = cmath.phase(self.gamma)
        if abs(th) >= math.pi / 3 - 1e-15:
            raise BranchCutHit("k lies on the negative real axis; give E a small imaginary part")
        self.left = LeftBoundary(left)
        if self.left is LeftBoundary.REGULAR:
            wr = _AI0
        else:
            # Ai(w y) decays (or is outgoing) as x -> -infinity.
            up = th > 1e-15 or (abs(th) <= 1e-15 and self.Ecal.imag >= 0)
            self.w = _W if up else _W ** 2
            wr = cmath.exp(-1j * math.pi / 6 if up else 1j * math.pi / 6) / (2 * math.pi)
        # Jump condition G'(x+) - G'(x-) = -2m/hbar^2.
        self.C = 2 * pc.mass / (pc.hbar ** 2 * self.gamma * wr)

    def y(self, x: float) -> complex:
        return self.gamma * (x - self.Ecal / self.k)

    def right(self, x: float):
        return _ai_log(self.y(x))

    def leftsol(self, x: float):
        y = self.y(x)
        if self.left is LeftBoundary.OUTGOING:
            return _ai_log(self.w * y)
        # g(y) = pi Ai(0) [Bi(y) - sqrt3 Ai(y)], the solution vanishing at y = 0;
        # equal to sqrt(z) I_{1/3}(zeta) up to a constant.
        a1, e1 = _ai_log(_W * y)
        a2, e2 = _ai_log(_W ** 2 * y)
        a0, e0 = _ai_log(y)
        c = math.pi * _AI0
        return _lsum([(c * cmath.exp(1j * math.pi / 6) * a1, e1),
                      (c * cmath.exp(-1j * math.pi / 6) * a2, e2),
                      (-c * math.sqrt(3.0) * a0, e0)])


def linear_green(x1: float, x2: float, Ecal: complex, k: complex,
                 pc: PhysicalConstants = UNITS, left: LeftBoundary | str = "regular") -> complex:
    """Green's function of V(x) = k x at energy Ecal.

    The right-hand solution is the one decaying as x -> +infinity.  With
    ``left="regular"`` the left solution is sqrt(x - Ecal/k) I_{1/3}, which
    vanishes at the turning point, giving

        (4m/3hbar^2) [(x1 - Ecal/k)(x2 - Ecal/k)]^{1/2} I_{1/3}(zeta_<) K_{1/3}(zeta_>),
        zeta = sqrt(8mk)/(3 hbar) (x - Ecal/k)^{3/2}.

    ``left="outgoing"`` gives the full-line resolvent instead.  Both are
    evaluated through Airy functions so large arguments do not overflow.
    """
    sol = _Linear(Ecal, k, pc, left)
    xl, xg = (x1, x2) if x1 <= x2 else (x2, x1)
    a, ea = sol.leftsol(xl)
    b, eb = sol.right(xg)
    return sol.C * a * b * cmath.exp(ea + eb)


def linear_green_halfspace(x1: float, x2: float, Ecal: complex, k: complex, boundary_a: float,
                           pc: PhysicalConstants = UNITS,
                           left: LeftBoundary | str = "outgoing") -> complex:
    """Dirichlet Green's function on x >= a:

        G(x1, x2) - G(x1, a) G(a, x2) / G(a, a).

    Evaluated in log-scaled form; the result does not depend on ``left``.
    """
    if x1 < boundary_a or x2 < boundary_a:
        raise ValueError("arguments must lie in x >= a")
    sol = _Linear(Ecal, k, pc, left)
    xl, xg = (x1, x2) if x1 <= x2 else (x2, x1)
    ra, era = sol.right(boundary_a)
    # Ai has envelope ~ |y|^{-1/4}; a mantissa this far below it is a node up to rounding
    if abs(ra) <= 1e-12 * max(1.0, abs(sol.y(boundary_a))) ** -0.25:
        raise BoundaryNodeZero("G(a, a) vanishes: E is a Dirichlet eigenvalue")
    la, ela = sol.leftsol(boundary_a)
    ll, ell = sol.leftsol(xl)
    rl, erl = sol.right(xl)
    rg, erg = sol.right(xg)
    full = (ll * rg, ell + erg)
    corr = (-la * rl * rg / ra, ela + erl + erg - era)
    c, e = _lsum([full, corr])
    return sol.C * c * cmath.exp(e)


# ---------------------------------------------------------------------------
# Harmonic oscillator


def ho_green(x1: float, x2: float, E: complex, omega: float,
             pc: PhysicalConstants = UNITS) -> complex:
    """Oscillator Green's function in parabolic cylinder functions."""
    m, hb = pc.mass, pc.hbar
    hw = hb * omega
    g = 0.5 - E / hw
    _check_gamma_arg(g, "1/2 - E/hbar omega")
    nu = -0.5 + E / hw
    c = math.sqrt(2 * m * omega / hb)
    xl, xg = min(x1, x2), max(x1, x2)
    return (math.sqrt(m / (math.pi * hb ** 3 * omega)) * sf.gamma(g)
            * sf.pcf_d(nu, c * xg) * sf.pcf_d(nu, -c * xl))


def ho_kernel_euclidean(x1: float, x2: float, T: float, omega: float,
                        pc: PhysicalConstants = UNITS) -> float:
    """Mehler kernel in imaginary time."""
    m, hb = pc.mass, pc.hbar
    s = math.sinh(omega * T)
    return (math.sqrt(m * omega / (2 * math.pi * hb * s))
            * math.exp(-m * omega / (2 * hb * s) * ((x1 * x1 + x2 * x2) * math.cosh(omega * T) - 2 * x1 * x2)))


# ---------------------------------------------------------------------------
# Modified Poeschl-Teller potential
#   V(r) = hbar^2/2m [(eta^2 - 1/4)/sinh^2 r - (nu^2 - 1/4)/cosh^2 r]


class Sign(str, Enum):
    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class MptParams:
    eta: complex
    nu: complex
    sign_choice: tuple[Sign, Sign] = (Sign.PLUS, Sign.PLUS)

    def __post_init__(self):
        object.__setattr__(self, "sign_choice", tuple(Sign(s) for s in self.sign_choice))

    @property
    def k1(self) -> complex:
        s = 1 if self.sign_choice[0] is Sign.PLUS else -1
        return 0.5 * (1 + s * self.nu)

    @property
    def k2(self) -> complex:
        s = 1 if self.sign_choice[1] is Sign.PLUS else -1
        return 0.5 * (1 + s * self.eta)

    @property
    def n_max(self) -> int:
        """Largest n with n < k1 - k2 - 1/2, or -1 if there are no bound states."""
        d = complex(self.k1 - self.k2 - 0.5)
        if abs(d.imag) > 0 or d.real <= 0:
            return -1
        return int(math.ceil(d.real) - 1)

    def potential(self, r: float, pc: PhysicalConstants = UNITS) -> complex:
        return pc.hbar ** 2 / (2 * pc.mass) * ((self.eta ** 2 - 0.25) / math.sinh(r) ** 2
                                               - (self.nu ** 2 - 0.25) / math.cosh(r) ** 2)


def _signed_pow(x: float, p: complex) -> complex:
    # integer exponents keep the sign, which gives the odd/even continuation
    if isinstance(p, complex) and p.imag == 0:
        p = p.real
    if isinstance(p, float) and p.is_integer():
        return x ** int(p)
    if x <= 0:
        raise ValueError("non-integer power of a non-positive base")
    return x ** p


def mpt_bound_energy(n: int, params: MptParams, pc: PhysicalConstants = UNITS) -> float:
    k1, k2 = complex(params.k1).real, complex(params.k2).real
    return -pc.hbar ** 2 / (2 * pc.mass) * (2 * (k1 - k2 - n) - 1) ** 2


def mpt_bound(n: int, params: MptParams, r: float,
              pc: PhysicalConstants = UNITS) -> tuple[float, float, float]:
    """Bound state Psi_n(r); returns (value, energy factor, normalization).

    The energy factor [2(k1 - k2 - n) - 1]^2 gives E_n = -hbar^2/2m times it.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    k1, k2 = complex(params.k1), complex(params.k2)
    if k1.imag or k2.imag:
        raise NoBoundStates("bound states need real k1, k2")
    k1, k2 = k1.real, k2.real
    if params.n_max < 0:
        raise NoBoundStates("k1 - k2 - 1/2 <= 0")
    if n > params.n_max:
        raise IndexBeyondNM(f"n = {n} exceeds N_M = {params.n_max}")
    kap = k1 - k2 - n
    lg = (sf.log_gamma(k1 + k2 - kap) + sf.log_gamma(k1 + k2 + kap - 1)
          - sf.log_gamma(k1 - k2 + kap) - sf.log_gamma(k1 - k2 - kap + 1))
    norm = (2 * (2 * kap - 1) * cmath.exp(lg)) ** 0.5 / sf.gamma(2 * k2)
    norm = norm.real
    if abs(r) > 300:
        return 0.0, (2 * kap - 1) ** 2, norm
    sh = math.sinh(r)
    f = sf.hyp2f1(-k1 + k2 + kap, -k1 + k2 - kap + 1, 2 * k2, -sh * sh)
    val = norm * _signed_pow(sh, 2 * k2 - 0.5) * math.cosh(r) ** (-2 * k1 + 1.5) * f
    return complex(val).real, (2 * kap - 1) ** 2, norm


def mpt_scatter_norm(p: float, params: MptParams) -> complex:
    k1, k2 = complex(params.k1), complex(params.k2)
    kap = 0.5 * (1 + 1j * p)
    g = (sf.gamma(k1 + k2 - kap) * sf.gamma(-k1 + k2 + kap)
         * sf.gamma(k1 + k2 + kap - 1) * sf.gamma(-k1 + k2 - kap + 1))
    return cmath.sqrt(p * math.sinh(math.pi * p) / (2 * math.pi ** 2) * cmath.sqrt(g)) / sf.gamma(2 * k2)


def mpt_scatter(p: float, params: MptParams, r: float, pc: PhysicalConstants = UNITS) -> complex:
    """Scattering state Psi_p(r) at energy hbar^2 p^2/2m."""
    if p <= 0 or r <= 0:
        raise ValueError("p and r must be positive")
    k1, k2 = complex(params.k1), complex(params.k2)
    kap = 0.5 * (1 + 1j * p)
    sh = math.sinh(r)
    f = sf.hyp2f1(k1 + k2 - kap, k1 + k2 + kap - 1, 2 * k2, -sh * sh)
    return (mpt_scatter_norm(p, params) * math.cosh(r) ** (2 * k1 - 0.5)
            * sh ** (2 * k2 - 0.5) * f)


def mpt_green(r1: float, r2: float, E: complex, params: MptParams,
              pc: PhysicalConstants = UNITS) -> complex:
    """Green's function of the modified Poeschl-Teller potential.

    In this formula the two indices are energy dependent,
    m1,2 = (eta' +- eps)/2 with eps = sqrt(-2mE)/hbar (Re eps > 0) and
    eta' = 2 k2 - 1, while L = (nu - 1)/2.  The poles of Gamma(m1 - L) sit
    at eps = nu - eta' - 1 - 2n, i.e. at the bound-state energies.  The
    tanh^2 factor (regular at r = 0) carries r_< and the 1/cosh^2 factor
    (decaying as r -> infinity) carries r_>.
    """
    if r1 <= 0 or r2 <= 0:
        raise ValueError("radial arguments must be positive")
    m, hb = pc.mass, pc.hbar
    E = complex(E)
    eps = cmath.sqrt(-2 * m * E) / hb
    if eps.real < 0:
        eps = -eps
    etap = 2 * complex(params.k2) - 1
    L = 0.5 * (complex(params.nu) - 1)
    m1, m2 = 0.5 * (etap + eps), 0.5 * (etap - eps)
    _check_gamma_arg(m1 - L, "m1 - L")
    _check_gamma_arg(L + m1 + 1, "L + m1 + 1")
    rl, rg = min(r1, r2), max(r1, r2)
    a, b = -L + m1, L + m1 + 1
    pref = (m / hb ** 2 * sf.gamma(m1 - L) * sf.gamma(L + m1 + 1)
            * sf.rgamma(m1 + m2 + 1) * sf.rgamma(m1 - m2 + 1))
    return (pref * (math.cosh(r1) * math.cosh(r2)) ** (-(m1 - m2))
            * (math.tanh(r1) * math.tanh(r2)) ** (m1 + m2 + 0.5)
            * sf.hyp2f1(a, b, m1 - m2 + 1, 1 / math.cosh(rg) ** 2)
            * sf.hyp2f1(a, b, m1 + m2 + 1, math.tanh(rl) ** 2))
