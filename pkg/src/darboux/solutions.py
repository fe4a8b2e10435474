"""Wave functions, spectra and Green's functions on the Darboux spaces.

Points are given in the coordinates of the named chart.  Green's functions
solve (H - E) G = delta / sqrt(g) with H = -hbar^2/(2m) Laplace-Beltrami, so
in a conformal chart (-hbar^2/2m Delta - E f) G = delta(q - q').  Because a
Green's function is a biscalar, charts without their own implementation
are evaluated by mapping both points to a chart that has one.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import integrate

from . import specfun as sf
from .geometry import Chart, PointOutsideDomain, SpaceId, SpaceParams, SystemId
from .kernels import (UNITS, MptParams, PhysicalConstants, linear_green, linear_green_halfspace,
                      mpt_green, mpt_scatter)


class SolutionError(ArithmeticError):
    pass


class UnsolvedSystem(SolutionError, ValueError):
    pass


class TruncationNotConverged(SolutionError):
    pass


class QuadratureFailure(SolutionError):
    pass


class Status(str, Enum):
    FULL = "FULL"
    GREEN_ONLY = "GREEN_ONLY"
    WAVE_ONLY = "WAVE_ONLY"
    UNSOLVED = "UNSOLVED"
    OUT_OF_SCOPE = "OUT_OF_SCOPE"


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"
    NONE = "none"


@dataclass(frozen=True)
class QuantumNumbers:
    """Labels of a solution family; each chart reads only the ones it needs.

    ``k`` doubles as the Whittaker index lambda on the D_III hyperbolic chart
    and as sqrt(kappa) on the D_IV horospherical chart.
    """
    p: float = 1.0
    k: float = 0.0
    l: int = 0
    n: int = 0
    zeta: float = 0.0
    parity: Parity = Parity.NONE
    eps_signs: tuple[int, int] = (1, 1)

    def __post_init__(self):
        object.__setattr__(self, "parity", Parity(self.parity))
        if self.p < 0:
            raise ValueError("p must be non-negative")
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if any(s not in (1, -1) for s in self.eps_signs):
            raise ValueError("eps_signs entries must be +1 or -1")


@dataclass(frozen=True)
class SpectralParams:
    lam: complex = 0j
    lam_tilde: complex = 0j
    p_tilde: float = 0.0
    kappa_tilde: complex = 0j
    omega_eff: complex = 0j


@dataclass(frozen=True)
class SolutionEntry:
    space_id: SpaceId
    system_id: SystemId
    wave_ref: str
    energy_ref: str
    green_ref: str | None
    status: Status
    labels: tuple[str, ...] = ()


_S, _C = SpaceId, SystemId
_CATALOG = (
    SolutionEntry(_S.DI, _C.UV, "", "", "2.22", Status.GREEN_ONLY),
    SolutionEntry(_S.DI, _C.ROTATED, "", "", "2.34", Status.GREEN_ONLY),
    SolutionEntry(_S.DI, _C.DISPLACED_PARABOLIC, "", "", None, Status.UNSOLVED),
    SolutionEntry(_S.DII, _C.UV, "3.21", "3.22", "3.19", Status.FULL, ("p", "k")),
    SolutionEntry(_S.DII, _C.POLAR, "3.40", "3.22", "3.38", Status.FULL, ("p", "k", "eps_signs")),
    SolutionEntry(_S.DII, _C.PARABOLIC, "3.58", "3.22", "3.57", Status.FULL, ("p", "zeta")),
    SolutionEntry(_S.DII, _C.ELLIPTIC, "", "", None, Status.OUT_OF_SCOPE),
    SolutionEntry(_S.DIII, _C.UV, "4.24", "6", "4.20", Status.FULL, ("p", "l")),
    SolutionEntry(_S.DIII, _C.POLAR, "4.34", "6", "4.32", Status.FULL, ("p", "l")),
    SolutionEntry(_S.DIII, _C.PARABOLIC, "4.44", "6", "4.42", Status.FULL, ("p", "zeta", "parity")),
    SolutionEntry(_S.DIII, _C.ELLIPTIC, "", "", None, Status.UNSOLVED),
    SolutionEntry(_S.DIII, _C.HYPERBOLIC, "4.68", "6", None, Status.FULL, ("p", "k")),
    SolutionEntry(_S.DIV, _C.UV, "5.21", "5.22", None, Status.FULL, ("p", "k")),
    SolutionEntry(_S.DIV, _C.EQUIDISTANT, "5.21", "5.22", None, Status.FULL, ("p", "k")),
    SolutionEntry(_S.DIV, _C.HOROSPHERICAL, "5.37", "5.49", "5.36", Status.FULL, ("p", "k")),
    SolutionEntry(_S.DIV, _C.ELLIPTIC, "5.48", "5.49", None, Status.FULL, ("p", "k")),
)


def catalog() -> list[SolutionEntry]:
    return list(_CATALOG)


def entry(space_id, system_id) -> SolutionEntry:
    key = (SpaceId(space_id), SystemId(system_id))
    for e in _CATALOG:
        if (e.space_id, e.system_id) == key:
            return e
    raise KeyError(key)


def _require(space: SpaceParams, system_id, need: str) -> SolutionEntry:
    e = entry(space.space_id, system_id)
    ok = e.status is Status.FULL if need == "wave" else e.green_ref is not None
    if not ok:
        raise UnsolvedSystem(f"no {need} solution for {e.space_id.value} {e.system_id.value}"
                             f" (status {e.status.value})")
    return e


# Natural coordinate ranges; the metric must also be finite and definite there.
_INF = math.inf
_RANGES = {
    (_S.DI, _C.UV): (0.0, _INF, -_INF, _INF),
    (_S.DI, _C.ROTATED): (-_INF, _INF, -_INF, _INF),
    (_S.DII, _C.UV): (0.0, _INF, -_INF, _INF),
    (_S.DII, _C.POLAR): (0.0, _INF, -0.5 * math.pi, 0.5 * math.pi),
    (_S.DII, _C.PARABOLIC): (0.0, _INF, 0.0, _INF),
    (_S.DIII, _C.UV): (-_INF, _INF, -_INF, _INF),
    (_S.DIII, _C.POLAR): (0.0, _INF, -_INF, _INF),
    (_S.DIII, _C.PARABOLIC): (-_INF, _INF, -_INF, _INF),
    (_S.DIII, _C.HYPERBOLIC): (0.0, _INF, 0.0, _INF),
    (_S.DIV, _C.UV): (0.0, 0.5 * math.pi, -_INF, _INF),
    (_S.DIV, _C.EQUIDISTANT): (-_INF, _INF, -_INF, _INF),
    (_S.DIV, _C.HOROSPHERICAL): (0.0, _INF, 0.0, _INF),
    (_S.DIV, _C.ELLIPTIC): (0.0, _INF, 0.0, 0.5 * math.pi),
}


def _check_point(chart: Chart, q) -> tuple[float, float]:
    q1, q2 = float(q[0]), float(q[1])
    lo1, hi1, lo2, hi2 = _RANGES[chart.key]
    bad = not (lo1 < q1 < hi1 and lo2 < q2 < hi2)
    if not bad:
        with np.errstate(all="ignore"):
            g11, g22 = chart.metric_components(q1, q2)
        bad = not (np.isfinite(g11) and np.isfinite(g22) and g11 > 0 and g22 != 0)
        if chart.key == (_S.DI, _C.UV) or chart.key == (_S.DI, _C.ROTATED):
            wall = chart.space.a if chart.half_space else 0.0
            bad = bad or not chart.to_uv(q1, q2)[0] > wall
    if bad:
        raise PointOutsideDomain(f"{(q1, q2)} is outside the {chart.key[0].value} "
                                 f"{chart.key[1].value} chart")
    return q1, q2


# ---------------------------------------------------------------------------
# Spectra


def energy(space: SpaceParams, system_id, qn: QuantumNumbers, pc: PhysicalConstants = UNITS) -> float:
    _require(space, system_id, "wave")
    hb2m = pc.hbar ** 2 / (2 * pc.mass)
    p2 = qn.p * qn.p
    if space.space_id == SpaceId.DII:
        return hb2m * (p2 + 0.25) / abs(space.a)
    if space.space_id == SpaceId.DIV:
        return hb2m * (p2 + 0.25) / space.a_plus
    return hb2m * p2


def spectral_params(space: SpaceParams, E: complex, pc: PhysicalConstants = UNITS) -> SpectralParams:
    """Auxiliary indices at energy E (principal square roots)."""
    m, hb = pc.mass, pc.hbar
    E = complex(E)
    if space.space_id == SpaceId.DII:
        lam = cmath.sqrt(0.25 - 2 * m * abs(space.a) * E / hb ** 2)
        pt = math.sqrt(space.b * max(E.real, 0.0) * 2 * m) / hb
        return SpectralParams(lam=lam, p_tilde=pt, kappa_tilde=cmath.sqrt(-2 * m * space.b * E) / hb,
                              omega_eff=1j * hb / m * pt)
    if space.space_id == SpaceId.DIV:
        ap, am = space.a_plus, space.a_minus
        lam = cmath.sqrt(0.25 - 2 * m * E * ap / hb ** 2)
        lt = cmath.sqrt(0.25 - 2 * m * E * am / hb ** 2)
        p2 = (2 * m * ap * E.real / hb ** 2) - 0.25
        pt2 = am / ap * (p2 + 0.25) - 0.25
        return SpectralParams(lam=lam, lam_tilde=lt, p_tilde=math.copysign(math.sqrt(abs(pt2)), pt2))
    return SpectralParams()


# ---------------------------------------------------------------------------
# Wave functions


def _chart(space: SpaceParams, system_id, theta: float = 0.0, half_space: bool = True) -> Chart:
    return Chart(space, SystemId(system_id), domain=(-1e300, 1e300, -1e300, 1e300),
                 theta=theta, half_space=half_space)


def _div_radial(space: SpaceParams, p: float, k: float, u: float) -> complex:
    """Solution of Phi'' + [2mE/hbar^2 (a+/sin^2 u + a-/cos^2 u) - k^2] Phi = 0.

    With cos u = tanh tau it is (cosh tau)^{-1/2} times the modified
    Poeschl-Teller scattering state of label p, eta^2 = 1/4 - 2m a- E/hbar^2
    and nu = ik.  The hbar, m dependence cancels: 2m a+ E/hbar^2 = p^2 + 1/4.
    """
    ap, am = space.a_plus, space.a_minus
    eta = cmath.sqrt(0.25 - am / ap * (p * p + 0.25))
    tau = math.atanh(math.cos(u))
    return mpt_scatter(p, MptParams(eta, 1j * k), tau) / math.sqrt(math.cosh(tau))


def wavefunction(space: SpaceParams, system_id, qn: QuantumNumbers, q,
                 pc: PhysicalConstants = UNITS) -> complex:
    """Eigenfunction Psi(q) of the Laplace-Beltrami Hamiltonian at energy(space, system_id, qn)."""
    e = _require(space, system_id, "wave")
    chart = _chart(space, system_id)
    q1, q2 = _check_point(chart, q)
    m, hb = pc.mass, pc.hbar
    E = energy(space, system_id, qn, pc)
    p, k, l = qn.p, qn.k, qn.l
    a, b = space.a, space.b
    key = (e.space_id, e.system_id)

    if key == (_S.DII, _C.UV):
        u, v = q1, q2
        kap = cmath.sqrt(k * k - 2 * m * b * E / hb ** 2)
        return (cmath.exp(1j * k * v) / math.sqrt(2 * math.pi)
                * math.sqrt(2 * p * math.sinh(math.pi * p)) / math.pi
                * math.sqrt(u) * sf.bessel_k(1j * p, kap * u))

    if key == (_S.DII, _C.POLAR):
        rho, th = q1, q2
        pt = math.sqrt(2 * m * b * E) / hb
        sign = qn.eps_signs[0]
        radial = sf.bessel_k(1j * k, 1j * pt * rho) if pt > 0 else rho ** (1j * k)
        norm = (math.sqrt(2.0) / math.pi * math.sqrt(k * math.sinh(math.pi * k))
                * math.sqrt(p * math.sinh(math.pi * p)
                            / (math.cosh(math.pi * k) ** 2 + math.sinh(math.pi * p) ** 2)))
        return (norm * math.sqrt(math.cos(th)) * radial
                * sf.legendre_p(1j * k - 0.5, 1j * p, sign * math.sin(th)))

    if key == (_S.DII, _C.PARABOLIC):
        xi, eta = q1, q2
        pt = math.sqrt(2 * m * b * E) / hb
        if pt == 0:
            raise UnsolvedSystem("the parabolic wave function needs b > 0")
        kap = 1j * m * qn.zeta / (2 * hb ** 2 * pt)
        mu = 0.5j * p
        g = abs(sf.gamma(0.5 + mu - kap) * sf.gamma(0.5 + mu + kap))
        return (math.sqrt(p * math.sinh(math.pi * p) / (2 * math.pi * xi * eta)) * g / pt
                * sf.whittaker_w(kap, mu, 1j * pt * xi * xi)
                * sf.whittaker_w(-kap, mu, 1j * pt * eta * eta))

    if key == (_S.DIII, _C.UV):
        u, v = q1, q2
        if b <= 0:
            raise UnsolvedSystem("the (u, v) wave function needs b > 0")
        kap = 1j * a * p / (2 * math.sqrt(b))
        mu = abs(l)
        z = -2j * p * math.sqrt(b) * math.exp(-u)
        pref = (math.exp(0.25 * math.pi * p) / (2 * math.pi)
                * sf.gamma(0.5 + mu + kap) * sf.rgamma(1 + 2 * mu))
        return cmath.exp(1j * l * v) * pref * math.exp(0.5 * u) * sf.whittaker_m(kap, mu, z)

    if key == (_S.DIII, _C.POLAR):
        rho, phi = q1, q2
        if b <= 0:
            raise UnsolvedSystem("the polar wave function needs b > 0")
        kap = 1j * a * p / (2 * math.sqrt(b))
        mu = 0.5 * abs(l)
        z = -0.5j * p * math.sqrt(b) * rho * rho
        pref = (math.exp(0.5 * math.pi * p) / (2 * math.pi * math.sqrt(b))
                * sf.gamma(0.5 + mu + kap) * sf.rgamma(1 + abs(l)))
        return cmath.exp(1j * l * phi) * pref / rho * sf.whittaker_m(kap, mu, z)

    if key == (_S.DIII, _C.PARABOLIC):
        xi, eta = q1, q2
        if b <= 0 or p <= 0:
            raise UnsolvedSystem("the parabolic wave function needs b > 0 and p > 0")
        zs = 2 * m * qn.zeta / hb ** 2
        p2 = p * p
        c = cmath.exp(-0.25j * math.pi) * math.sqrt(p) * b ** 0.25
        nu_x = -0.5 + 1j * (0.5 * p2 * a + zs) / (p * math.sqrt(b))
        nu_y = -0.5 + 1j * (0.5 * p2 * a - zs) / (p * math.sqrt(b))
        pref = math.exp(0.5 * math.pi / (a * p)) / (math.sqrt(2.0) * 4 * math.pi ** 2)
        if qn.parity is Parity.ODD:
            return (pref * abs(sf.gamma(0.5 * (1 - nu_x))) ** 2
                    * sf.pcf_e1(nu_x, c * xi) * sf.pcf_e1(nu_y, c * eta))
        return (pref * abs(sf.gamma(-0.5 * nu_x)) ** 2
                * sf.pcf_e0(nu_x, c * xi) * sf.pcf_e0(nu_y, c * eta))

    if key == (_S.DIII, _C.HYPERBOLIC):
        mu_, nu_ = q1, q2
        if b <= 0 or p <= 0:
            raise UnsolvedSystem("the hyperbolic wave function needs b > 0 and p > 0")
        lam = k
        c = -1j * p * math.sqrt(2 * b)
        kap = 1j * p * a / math.sqrt(2 * b)
        pref = (math.sqrt(lam / (4 * math.pi * mu_ * nu_))
                * abs(sf.gamma(0.5 + lam + 1j * p)) ** 2 * sf.rgamma(1 + 2 * lam) ** 2
                * math.exp(math.pi * p) / p)
        return pref * sf.whittaker_m(kap, lam, c * mu_) * sf.whittaker_m(-kap, lam, c * nu_)

    if key in ((_S.DIV, _C.UV), (_S.DIV, _C.EQUIDISTANT)):
        u, v = chart.to_uv(q1, q2)
        return (cmath.exp(1j * k * v) / math.sqrt(2 * math.pi * space.a_plus)
                * _div_radial(space, p, k, u))

    if key == (_S.DIV, _C.HOROSPHERICAL):
        mu_, nu_ = q1, q2
        ap, am = space.a_plus, space.a_minus
        pt = cmath.sqrt(am / ap * (p * p + 0.25) - 0.25)
        s = k
        first = sf.bessel_k(1j * p, s * nu_) * sf.hankel1(-1j * pt, s * mu_)
        second = sf.bessel_k(1j * pt, s * mu_) * sf.hankel1(-1j * p, s * nu_)
        pref = (math.sqrt(mu_ * nu_) / (2 * math.sqrt(2.0) * math.pi)
                * cmath.sqrt(p * math.sinh(math.pi * p) * cmath.sinh(math.pi * pt)))
        return pref * (first + second)

    if key == (_S.DIV, _C.ELLIPTIC):
        om, ph = q1, q2
        ap, am = space.a_plus, space.a_minus
        x = p * p + 0.25
        eta_w = cmath.sqrt(0.25 - x)
        nu_w = cmath.sqrt(0.25 - am / ap * x)
        return mpt_scatter(k, MptParams(eta_w, nu_w), om) * _div_radial(space, p, k, ph)

    raise UnsolvedSystem(f"no wave function for {key}")  # pragma: no cover


# ---------------------------------------------------------------------------
# Green's functions


@dataclass(frozen=True)
class GreenOptions:
    """Truncation and quadrature controls.

    ``l_max`` bounds cyclic sums; ``k_envelope`` is the relative size of the
    integrand envelope at which k-integrals are cut; ``tail_tol`` is the
    accepted tail bound of a truncated sum relative to |G|.  ``v_mode``
    selects the treatment of v on D_I: "sum" (2pi-periodic) or "integral"
    (v on the real line).  ``period`` is the period in v of D_III (u, v).
    """
    l_max: int = 30
    k_envelope: float = 1e-10
    tail_tol: float = 1e-6
    epsrel: float = 1e-10
    epsabs: float = 0.0
    quad_limit: int = 400
    v_mode: str = "sum"
    period: float = 2 * math.pi
    theta: float = 0.0
    half_space: bool = True


def _kmax(du: float, opts: GreenOptions, floor: float = 0.0) -> float:
    if du < 1e-3:
        raise TruncationNotConverged("points too close in the decaying direction for a k-integral")
    return (math.log(1.0 / opts.k_envelope) + 3.0) / du + floor


def _cos_transform(fun, dv: float, kmax: float, opts: GreenOptions) -> complex:
    """(1/pi) int_0^kmax cos(k dv) fun(k) dk for complex-valued fun."""
    cache: dict[float, complex] = {}

    def f(k):
        v = cache.get(k)
        if v is None:
            v = complex(fun(k))
            cache[k] = v
        return v

    kw = dict(limit=opts.quad_limit, epsrel=opts.epsrel, epsabs=opts.epsabs, full_output=1)
    out = []
    for part in (lambda k: f(k).real, lambda k: f(k).imag):
        if abs(dv) * kmax > 1.0:
            res = integrate.quad(part, 0.0, kmax, weight="cos", wvar=abs(dv), **kw)
        else:
            res = integrate.quad(lambda k: part(k) * math.cos(k * dv), 0.0, kmax, **kw)
        val, err = res[0], res[1]
        if len(res) > 3 and res[3] and "roundoff" not in str(res[3]) and err > 1e-6 * max(abs(val), 1e-300):
            raise QuadratureFailure(f"k-integral did not converge: {res[3]}")
        out.append(val)
    return complex(out[0], out[1]) / math.pi


def _green_di(u1, v1, u2, v2, E, space, pc, opts, mode):
    hb2m = pc.hbar ** 2 / (2 * pc.mass)
    a = space.a
    slope = -2 * E

    def gk(kk):
        Ecal = -hb2m * kk * kk
        if opts.half_space:
            return linear_green_halfspace(u1, u2, Ecal, slope, a, pc)
        return linear_green(u1, u2, Ecal, slope, pc, left="outgoing")

    if mode == "sum":
        terms = [gk(l) for l in range(opts.l_max + 1)]
        dv = v1 - v2
        s = terms[0] + sum(2 * math.cos(l * dv) * t for l, t in enumerate(terms) if l > 0)
        tail = abs(terms[-1])
        if tail > opts.tail_tol * abs(s):
            raise TruncationNotConverged(f"l-sum tail {tail:.3g} vs |G| = {abs(s):.3g}")
        return s / (2 * math.pi)
    return _cos_transform(gk, v1 - v2, _kmax(abs(u1 - u2), opts), opts)


def _green_dii_uv(u1, v1, u2, v2, E, space, pc, opts):
    m, hb = pc.mass, pc.hbar
    lam = cmath.sqrt(0.25 - 2 * m * abs(space.a) * E / hb ** 2)
    if lam.real < 0:
        lam = -lam
    ul, ug = min(u1, u2), max(u1, u2)
    shift = -2 * m * space.b * E / hb ** 2
    kmax = _kmax(ug - ul, opts)
    if kmax * ug > 650.0:
        raise TruncationNotConverged("k-integral reaches Bessel arguments beyond the overflow guard")

    def gk(kk):
        kap = cmath.sqrt(kk * kk + shift)
        if abs(kap) * ug < 1e-12:
            return (ul / ug) ** lam / (2 * lam)  # small-argument limit of I K
        return sf.bessel_i(lam, kap * ul) * sf.bessel_k(lam, kap * ug)

    return 2 * m / hb ** 2 * math.sqrt(u1 * u2) * _cos_transform(gk, v1 - v2, kmax, opts)


def _green_diii_uv(u1, v1, u2, v2, E, space, pc, opts, period):
    m, hb = pc.mass, pc.hbar
    a, b = space.a, space.b
    if b <= 0:
        raise UnsolvedSystem("the (u, v) Green's function needs b > 0")
    B = cmath.sqrt(-2 * m * b * E) / hb
    if B.real < 0:
        B = -B
    kap = -a * B / (2 * b)
    ul, ug = min(u1, u2), max(u1, u2)
    zl, zg = 2 * B * math.exp(-ul), 2 * B * math.exp(-ug)
    scale = 2 * math.pi / period
    nmax = int(math.ceil(opts.l_max / scale))
    dv = v1 - v2
    pref = m / (hb * hb * B) * math.exp(0.5 * (u1 + u2))
    terms = []
    for n in range(nmax + 1):
        mu = n * scale
        lg = (sf.log_gamma(0.5 + mu - kap) - sf.log_gamma(1 + 2 * mu)
              + sf.log_whittaker_w(kap, mu, zl) + sf.log_whittaker_m(kap, mu, zg))
        terms.append(cmath.exp(lg))
    s = terms[0] + sum(2 * math.cos(n * scale * dv) * t for n, t in enumerate(terms) if n > 0)
    s *= pref / period
    tail = 2 * abs(terms[-1] * pref / period)
    if tail > opts.tail_tol * abs(s):
        raise TruncationNotConverged(f"l-sum tail {tail:.3g} vs |G| = {abs(s):.3g}")
    return s


def _green_div_uv(u1, v1, u2, v2, E, space, pc, opts):
    m, hb = pc.mass, pc.hbar
    ap, am = space.a_plus, space.a_minus
    eta = cmath.sqrt(0.25 - 2 * m * am * E / hb ** 2)
    if eta.real < 0:
        eta = -eta
    Ecal = ap * E - hb * hb / (8 * m)
    t1, t2 = math.atanh(math.cos(u1)), math.atanh(math.cos(u2))
    c = 1.0 / math.sqrt(math.cosh(t1) * math.cosh(t2))

    def gk(kk):
        return c * mpt_green(t1, t2, Ecal, MptParams(eta, 1j * kk), pc)

    return _cos_transform(gk, v1 - v2, _kmax(abs(u1 - u2), opts), opts)


def green(space: SpaceParams, system_id, E: complex, q1, q2, pc: PhysicalConstants = UNITS,
          opts: GreenOptions | None = None) -> complex:
    """Resolvent kernel G(q1, q2; E) in the coordinates of ``system_id``."""
    o = opts or GreenOptions()
    e = _require(space, system_id, "green")
    E = complex(E)
    if E.imag < 0:
        raise ValueError("the resolvent is evaluated at Im E >= 0")
    chart = _chart(space, system_id, o.theta, o.half_space)
    x1, y1 = _check_point(chart, q1)
    x2, y2 = _check_point(chart, q2)
    s, c = e.space_id, e.system_id
    if s == _S.DI:
        u1, v1 = chart.to_uv(x1, y1)
        u2, v2 = chart.to_uv(x2, y2)
        mode = o.v_mode if c == _C.UV else "integral"
        return _green_di(u1, v1, u2, v2, E, space, pc, o, mode)
    (u1, v1), (u2, v2) = chart.to_uv(x1, y1), chart.to_uv(x2, y2)
    if s == _S.DII:
        return _green_dii_uv(u1, v1, u2, v2, E, space, pc, o)
    if s == _S.DIII:
        # polar and parabolic points map to v = 2 phi, so v has period 4 pi there
        period = o.period if c == _C.UV else 4 * math.pi
        return _green_diii_uv(u1, v1, u2, v2, E, space, pc, o, period)
    return _green_div_uv(u1, v1, u2, v2, E, space, pc, o)
