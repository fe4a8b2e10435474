"""Special functions of complex order and argument in double precision.

The evaluators here are deliberately elementary: ascending series with a
ratio-based tail bound, trapezoidal quadrature of integrands that decay
double-exponentially, and connection formulas between the two. Gamma-function
prefactors are assembled in log space and exponentiated last.

All public functions take Python scalars (real or complex) and return
``complex``.  Branch cuts follow the principal branch with the cut along the
negative real axis.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

EPS = float(np.finfo(float).eps)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


class SpecialFunctionError(ArithmeticError):
    """Base class for evaluation failures."""


class NonConvergence(SpecialFunctionError):
    """A series or quadrature did not reach its tolerance within budget."""


class DomainError(SpecialFunctionError, ValueError):
    """Argument lies on a branch point or outside the supported region."""


class PoleError(SpecialFunctionError):
    """A gamma-function pole was hit by a parameter."""


# Names used by callers that think of these as parameter poles.
ParameterPole = PoleError
PoleAtParameter = PoleError


@dataclass(frozen=True)
class EvalOptions:
    target_abs_tol: float = 1e-12
    target_rel_tol: float = 1e-10
    max_terms: int = 20000
    quadrature_limit: int = 1 << 17

    def __post_init__(self):
        if not (self.target_abs_tol > 0 and self.target_rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_terms <= 0 or self.quadrature_limit <= 0:
            raise ValueError("budgets must be positive")


DEFAULT_OPTIONS = EvalOptions()


def _opts(opts: EvalOptions | None) -> EvalOptions:
    return DEFAULT_OPTIONS if opts is None else opts


def _is_nonpositive_int(z: complex, tol: float = 0.0) -> bool:
    z = complex(z)
    if abs(z.imag) > tol or z.real > tol:
        return False
    return abs(z.real - round(z.real)) <= tol


def _near_int(z: complex, tol: float) -> bool:
    z = complex(z)
    return abs(z.imag) <= tol and abs(z.real - round(z.real)) <= tol


# ---------------------------------------------------------------------------
# Gamma function

_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)


def log_gamma(z: complex) -> complex:
    """Principal branch of log Gamma(z).

    The argument is shifted upward by the recurrence until its real part
    exceeds 20 and the Stirling series is applied there.  Summing principal
    logarithms of z, z+1, ... keeps the result on the branch continued from
    the positive real axis, and no intermediate quantity overflows.
    """
    z = complex(z)
    if _is_nonpositive_int(z):
        raise PoleError(f"Gamma has a pole at {z}")
    acc = 0j
    w = z
    while w.real < 20.0:
        acc += cmath.log(w)
        w += 1.0
    s = (w - 0.5) * cmath.log(w) - w + _LOG_SQRT_2PI
    w2 = w * w
    p = 1.0 / w
    for c in _STIRLING:
        s += c * p
        p /= w2
    return s - acc


def gamma(z: complex) -> complex:
    return cmath.exp(log_gamma(z))


def rgamma(z: complex) -> complex:
    """1/Gamma(z), equal to zero at the poles."""
    if _is_nonpositive_int(z):
        return 0j
    return cmath.exp(-log_gamma(z))


def _gamma_ratio(num: tuple, den: tuple) -> complex:
    """prod Gamma(num) / prod Gamma(den), built in log space."""
    for d in den:
        if _is_nonpositive_int(d):
            return 0j
    s = 0j
    for n in num:
        s += log_gamma(n)
    for d in den:
        s -= log_gamma(d)
    return cmath.exp(s)


# ---------------------------------------------------------------------------
# Generic series summation


def _sum_series(t0: complex, ratio: Callable[[int], complex], opts: EvalOptions,
                kmin: int = 0, name: str = "series") -> complex:
    """Sum t0 + t1 + ... where t_{k+1} = t_k * ratio(k).

    Stops once the geometric tail bound falls below machine precision
    relative to the partial sum.  Raises NonConvergence if the term budget
    runs out or cancellation has destroyed the requested accuracy.
    """
    s = complex(t0)
    t = complex(t0)
    mag = abs(t)
    if t == 0:
        return 0j
    for k in range(opts.max_terms):
        r = ratio(k)
        t = t * r
        s += t
        at = abs(t)
        if at > mag:
            mag = at
        if r == 0:
            break
        ar = abs(r)
        if k >= kmin and ar < 1.0:
            tail = at * ar / (1.0 - ar)
            if tail <= 0.5 * EPS * abs(s) or tail < 1e-300:
                break
    else:
        raise NonConvergence(f"{name}: no convergence in {opts.max_terms} terms")
    err = 4.0 * EPS * mag
    if err > opts.target_rel_tol * abs(s) and err > opts.target_abs_tol:
        raise NonConvergence(
            f"{name}: cancellation, estimated error {err:.3g} vs value {abs(s):.3g}")
    return s


def _even_limit(f: Callable[[complex], complex], x0: complex, delta: float = 0.01) -> complex:
    """Value of an analytic f at x0 from symmetric samples that avoid x0.

    Used at removable singularities of connection formulas; the three-level
    Richardson combination cancels the delta^2 and delta^4 terms.
    """
    a = [0.5 * (f(x0 + j * delta) + f(x0 - j * delta)) for j in (1, 2, 3)]
    return (15.0 * a[0] - 6.0 * a[1] + a[2]) / 10.0


_INT_GUARD = 1e-3


def _order_step(z: complex) -> float:
    # Derivatives in the order grow like log(z)^n near the origin.
    return 0.01 / (1.0 + abs(math.log(abs(z) / 2.0)) / 3.0)


# ---------------------------------------------------------------------------
# Hypergeometric functions


def hyp1f1(a: complex, b: complex, z: complex, opts: EvalOptions | None = None) -> complex:
    """Kummer confluent hypergeometric function 1F1(a; b; z)."""
    o = _opts(opts)
    a, b, z = complex(a), complex(b), complex(z)
    if _is_nonpositive_int(b) and not (_is_nonpositive_int(a) and a.real > b.real):
        raise PoleError(f"1F1 lower parameter {b} is a non-positive integer")
    if z == 0:
        return 1 + 0j
    polynomial = _is_nonpositive_int(a)
    if z.real < 0 and not polynomial:
        return cmath.exp(z) * hyp1f1(b - a, b, -z, o)
    kmin = int(abs(a) + abs(b) + abs(z)) + 2
    return _sum_series(1.0, lambda k: (a + k) / ((b + k) * (k + 1)) * z, o, kmin, "1F1")


def _f21_series(a, b, c, z, o):
    kmin = int(abs(a) + abs(b) + abs(c)) + 2
    return _sum_series(1.0, lambda k: (a + k) * (b + k) / ((c + k) * (k + 1)) * z, o, kmin, "2F1")


def _f21_one_minus(a, b, c, z, o):
    """Connection formula around z = 1 (needs c - a - b away from integers)."""
    s = c - a - b
    if _near_int(s, _INT_GUARD):
        return _even_limit(lambda cc: _f21_one_minus(a, b, cc, z, o), c, 0.005)
    w = 1.0 - z
    t1 = _gamma_ratio((c, s), (c - a, c - b))
    t2 = _gamma_ratio((c, -s), (a, b))
    parts = []
    if t1 != 0:
        parts.append(t1 * _f21_series(a, b, 1.0 - s, w, o))
    if t2 != 0:
        parts.append(t2 * cmath.exp(s * cmath.log(w)) * _f21_series(c - a, c - b, 1.0 + s, w, o))
    out = sum(parts, 0j)
    big = max((abs(p) for p in parts), default=0.0)
    if 8 * EPS * big > o.target_rel_tol * abs(out) and 8 * EPS * big > o.target_abs_tol:
        raise NonConvergence(f"2F1 connection: cancellation, terms {big:.3g} vs value {abs(out):.3g}")
    return out


def hyp2f1(a: complex, b: complex, c: complex, z: complex,
           opts: EvalOptions | None = None) -> complex:
    """Gauss hypergeometric function 2F1(a, b; c; z).

    Direct series for |z| <= 0.8, and for |z| < 0.995 when it converges
    without cancellation.  Otherwise the Pfaff map z -> z/(z-1)
    and the connection around z = 1 are used, which covers the real line
    below 1 (in particular the large negative arguments -sinh^2 r).
    """
    o = _opts(opts)
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    if _is_nonpositive_int(c):
        raise PoleError(f"2F1 lower parameter {c} is a non-positive integer")
    if z == 0:
        return 1 + 0j
    if _is_nonpositive_int(a) or _is_nonpositive_int(b):
        if abs(z) <= 1.0:
            return _f21_series(a, b, c, z, o)
    if abs(z) <= 0.8:
        return _f21_series(a, b, c, z, o)
    if abs(z) < 0.995:
        # the connection formula cancels badly for large parameters, so the
        # direct series is tried first; it reports its own cancellation
        try:
            return _f21_series(a, b, c, z, o)
        except NonConvergence:
            pass
    if z == 1:
        if (c - a - b).real > 0:
            return _gamma_ratio((c, c - a - b), (c - a, c - b))
        raise DomainError("2F1 diverges at z = 1")
    if abs(1.0 - z) <= 0.8:
        return _f21_one_minus(a, b, c, z, o)
    w = z / (z - 1.0)
    pref = cmath.exp(-a * cmath.log(1.0 - z))
    if abs(w) <= 0.8:
        return pref * _f21_series(a, c - b, c, w, o)
    if abs(1.0 - w) <= 0.8:
        return pref * _f21_one_minus(a, c - b, c, w, o)
    if abs(z) < 1.0:
        return _f21_series(a, b, c, z, o)
    raise DomainError(f"2F1 argument {z} outside the supported region")


def hypergeometric(kind: str, a, b, c=None, z=None, opts: EvalOptions | None = None) -> complex:
    """Dispatch: ``kind='F11'`` takes (a, b, z); ``kind='F21'`` takes (a, b, c, z)."""
    if kind == "F11":
        if z is None:
            z, c = c, None
        return hyp1f1(a, b, z, opts)
    if kind == "F21":
        return hyp2f1(a, b, c, z, opts)
    raise ValueError(f"unknown hypergeometric kind {kind!r}")


# ---------------------------------------------------------------------------
# Bessel functions


def _bessel_series(nu: complex, z: complex, sign: float, o: EvalOptions) -> complex:
    """(z/2)^nu * sum_k (sign z^2/4)^k / (k! Gamma(nu+k+1))."""
    if z == 0:
        if nu == 0:
            return 1 + 0j
        if nu.real > 0:
            return 0j
        raise DomainError("Bessel series is singular at z = 0 for this order")
    log_t0 = nu * cmath.log(z / 2.0)
    if _is_nonpositive_int(nu + 1.0):
        raise PoleError("negative integer order must be reduced first")
    log_t0 -= log_gamma(nu + 1.0)
    if log_t0.real > 709.0:
        raise DomainError("Bessel series overflows for this argument")
    q = sign * z * z / 4.0
    return _sum_series(cmath.exp(log_t0), lambda k: q / ((k + 1) * (nu + k + 1)), o,
                       int(abs(z)) + 2, "Bessel series")


def bessel_i(nu: complex, z: complex, opts: EvalOptions | None = None) -> complex:
    """Modified Bessel function I_nu(z).

    Ascending series; where it cancels (|z| > 20 away from the positive
    axis) I_nu(z) = M_{0,nu}(2z) / (2^{2nu+1/2} Gamma(1+nu) sqrt z) is used.
    """
    o = _opts(opts)
    nu, z = complex(nu), complex(z)
    if abs(z) > 700:
        raise DomainError("|z| beyond the overflow guard")
    if _is_nonpositive_int(nu) and nu != 0:
        nu = -nu
    try:
        return _bessel_series(nu, z, 1.0, o)
    except NonConvergence:
        if abs(z) <= 20.0 or nu.real <= -0.25 or abs(cmath.phase(z)) >= 0.5 * math.pi + 0.5:
            raise
    return (whittaker_m(0.0, nu, 2.0 * z, o) * rgamma(1.0 + nu)
            * cmath.exp(-(2.0 * nu + 0.5) * math.log(2.0) - 0.5 * cmath.log(z)))


def bessel_j(nu: complex, z: complex, opts: EvalOptions | None = None) -> complex:
    """Bessel function J_nu(z) from its ascending series."""
    o = _opts(opts)
    nu, z = complex(nu), complex(z)
    if _is_nonpositive_int(nu) and nu != 0:
        n = int(round(-nu.real))
        return (-1) ** n * _bessel_series(-nu, z, -1.0, o)
    return _bessel_series(nu, z, -1.0, o)


def _k_integral(nu: complex, z: complex, o: EvalOptions) -> complex:
    """K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt for Re z > 0.

    The integrand is even and entire in t and decays double-exponentially,
    so the trapezoidal rule converges geometrically in the node count.
    """
    x = z.real
    anu = abs(nu.real)
    T = 1.0
    for _ in range(8):
        T = math.acosh(1.0 + (46.0 + anu * T) / x)
    # exp(-z) is factored out so the stopping test is relative even when
    # K_nu(z) itself is far below the absolute tolerance.
    h = min(0.25, 1.0 / math.sqrt(x))
    prev = None
    while True:
        n = int(math.ceil(T / h))
        if n + 1 > o.quadrature_limit:
            raise NonConvergence("K integral exceeded the quadrature budget")
        t = np.arange(n + 1) * h
        f = np.exp(-z * (2.0 * np.sinh(0.5 * t) ** 2)) * np.cosh(nu * t)
        s = h * (f.sum() - 0.5 * f[0])
        if prev is not None:
            scale = h * np.abs(f).sum()
            tol = max(o.target_rel_tol * 1e-3 * abs(s), 64 * EPS * scale)
            if abs(s - prev) <= tol:
                return complex(s) * cmath.exp(-z)
        prev = s
        h *= 0.5


def _k_imag_order(nu: complex, x: float, o: EvalOptions) -> complex:
    """K_nu(x) for real x > 0 and large |Im nu|, to full relative accuracy.

    K_nu(x) = 1/2 int exp(-x cosh t - nu t) dt over the real line, moved to
    Im t = -beta.  With p = Im nu the saddle lies at t = -i arcsin(p/x) for
    p < x, so beta = arcsin(p/x) there, and beta = pi/2 - 3/p otherwise.
    The factor exp(-p beta - x cos beta) comes out analytically and the rest
    has modulus exp(-x cos(beta) (cosh t - 1) - Re(nu) t).
    """
    if nu.imag < 0:
        nu = -nu
    p, sig = nu.imag, nu.real
    beta = min(0.5 * math.pi - min(1.0, 3.0 / p), math.asin(min(1.0, p / x)))
    c = x * math.cos(beta)
    T = 1.0
    for _ in range(8):
        T = math.acosh(1.0 + (46.0 + abs(sig) * T) / c)
    h = min(0.25, 0.5 / math.sqrt(x * math.cosh(T)))
    shift = cmath.exp(-1j * beta)
    prev = None
    while True:
        n = int(math.ceil(T / h))
        if 2 * n + 1 > o.quadrature_limit:
            raise NonConvergence("K integral exceeded the quadrature budget")
        t = np.arange(-n, n + 1) * h
        ch = np.cosh(t) * shift.real + 1j * np.sinh(t) * shift.imag
        f = np.exp(-x * ch + c - nu * t + 1j * sig * beta)
        s = 0.5 * h * f.sum()
        if prev is not None:
            tol = max(o.target_rel_tol * 1e-3 * abs(s), 64 * EPS * 0.5 * h * np.abs(f).sum())
            if abs(s - prev) <= tol:
                return complex(s) * math.exp(-p * beta - c)
        prev = s
        h *= 0.5


def _k_connection(nu: complex, z: complex, o: EvalOptions) -> complex:
    if _near_int(nu, _INT_GUARD):
        return _even_limit(lambda v: _k_connection(v, z, o), complex(round(nu.real)), _order_step(z))
    return 0.5 * math.pi * (bessel_i(-nu, z, o) - bessel_i(nu, z, o)) / cmath.sin(nu * math.pi)


def bessel_k(nu: complex, z: complex, opts: EvalOptions | None = None) -> complex:
    """Modified Bessel function K_nu(z).

    For arguments in the sector |Im z| <= 2 Re z the cosh integral is used;
    for real x and large imaginary order it is taken along a shifted line so
    that the exponentially small K_{ip}(x) keeps its relative accuracy.  Elsewhere the connection formula
    through I_{+-nu} is applied, with a limiting evaluation at integer order.
    """
    o = _opts(opts)
    nu, z = complex(nu), complex(z)
    if z == 0:
        raise DomainError("K_nu has a branch point at z = 0")
    if z.imag == 0 and z.real > 0 and abs(nu.imag) > 4.0 and abs(nu.real) < 1.0:
        return _k_imag_order(nu, z.real, o)
    if z.real > 0 and abs(z.imag) <= 2.0 * z.real:
        return _k_integral(nu, z, o)
    return _k_connection(nu, z, o)


def hankel1(nu: complex, z: complex, opts: EvalOptions | None = None) -> complex:
    """Hankel function H1_nu(z) = i[exp(-i nu pi) J_nu - J_{-nu}] / sin(nu pi)."""
    o = _opts(opts)
    nu, z = complex(nu), complex(z)
    if z == 0:
        raise DomainError("H1 is singular at z = 0")
    if _near_int(nu, _INT_GUARD):
        return _even_limit(lambda v: hankel1(v, z, o), complex(round(nu.real)), _order_step(z))
    jp = bessel_j(nu, z, o)
    jm = bessel_j(-nu, z, o)
    return 1j * (cmath.exp(-1j * nu * math.pi) * jp - jm) / cmath.sin(nu * math.pi)


def bessel_modified(kind: str, order: complex, arg: complex,
                    opts: EvalOptions | None = None) -> complex:
    if kind == "I":
        return bessel_i(order, arg, opts)
    if kind == "K":
        return bessel_k(order, arg, opts)
    raise ValueError(f"unknown modified Bessel kind {kind!r}")


def bessel_oscillatory(kind: str, order: complex, arg: complex,
                       opts: EvalOptions | None = None) -> complex:
    if kind == "J":
        return bessel_j(order, arg, opts)
    if kind == "H1":
        return hankel1(order, arg, opts)
    raise ValueError(f"unknown Bessel kind {kind!r}")


# ---------------------------------------------------------------------------
# Airy function

_AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
_AIP0 = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)
_OMEGA = cmath.exp(2j * math.pi / 3)


def _airy_maclaurin(z: complex) -> complex:
    # Ai(z) = Ai(0) f(z) + Ai'(0) g(z) with the two power series of w'' = z w.
    z3 = z ** 3
    f = t = 1.0 + 0j
    k = 0
    while True:
        t = t * z3 / ((3 * k + 2) * (3 * k + 3))
        f += t
        k += 1
        if abs(t) < 1e-17 * abs(f) or k > 200:
            break
    g = t = z
    k = 0
    while True:
        t = t * z3 / ((3 * k + 3) * (3 * k + 4))
        g += t
        k += 1
        if abs(t) < 1e-17 * abs(g) or k > 200:
            break
    return _AI0 * f + _AIP0 * g


def _airy_saddle(z: complex, o: EvalOptions) -> complex:
    """Ai(z) exp(zeta), zeta = 2/3 z^{3/2}, from the contour through the saddle.

    Ai(z) = exp(-zeta)/pi * int_0^inf exp(-sqrt(z) s^2) cos(s^3/3) ds, valid
    for |arg z| < pi; used here for |arg z| <= 3pi/4 and |z| >= 1.
    """
    rz = cmath.sqrt(z)
    smax = math.sqrt(46.0 / rz.real)
    h = min(0.25, 0.5 / abs(rz) ** 0.5)
    prev = None
    while True:
        n = int(math.ceil(smax / h))
        if n + 1 > o.quadrature_limit:
            raise NonConvergence("Airy contour integral exceeded the quadrature budget")
        t = np.arange(n + 1) * h
        f = np.exp(-rz * t * t) * np.cos(t ** 3 / 3.0)
        val = h * (f.sum() - 0.5 * f[0]) / math.pi
        if prev is not None and abs(val - prev) <= 1e-15 * max(abs(val), 1e-300) + 1e-300:
            return complex(val)
        if prev is not None and abs(val - prev) <= 64 * EPS * h * np.abs(f).sum():
            return complex(val)
        prev = val
        h *= 0.5


def airy_ai_scaled(z: complex, opts: EvalOptions | None = None) -> tuple[complex, complex]:
    """Return (s, zeta) with Ai(z) = s * exp(-zeta).

    Large arguments would overflow or underflow Ai itself; the split keeps
    the exponential growth in ``zeta`` so callers can combine factors in
    log space.  zeta = 2/3 z^{3/2} on the principal branch wherever the
    saddle-point integral is used, and zero otherwise.
    """
    o = _opts(opts)
    z = complex(z)
    if abs(z) <= 2.0:
        return _airy_maclaurin(z), 0j
    if abs(cmath.phase(z)) <= 0.75 * math.pi:
        return _airy_saddle(z, o), 2.0 / 3.0 * z ** 1.5
    # Near the negative axis: Ai(z) = -w Ai(w z) - w^2 Ai(w^2 z), both
    # rotated arguments lying inside the saddle-point sector.
    out = 0j
    for c, w in ((-_OMEGA, _OMEGA), (-_OMEGA ** 2, _OMEGA ** 2)):
        zz = w * z
        out += c * _airy_saddle(zz, o) * cmath.exp(-2.0 / 3.0 * zz ** 1.5)
    return out, 0j


def airy_ai(z: complex, opts: EvalOptions | None = None) -> complex:
    """Airy function Ai(z).

    Moderate arguments use the Bessel forms: (1/pi) sqrt(z/3) K_{1/3}(zeta)
    for Re z >= 0 and (sqrt(w)/3)[J_{1/3}(xi) + J_{-1/3}(xi)] with w = -z for
    Re z < 0.  For |z| > 4 off the positive axis a saddle-point contour
    integral replaces the ascending series, which lose accuracy there.
    """
    o = _opts(opts)
    z = complex(z)
    if abs(z) <= 1.0:
        # the Bessel forms hit their branch point as z -> 0; the power series is well conditioned here
        return _airy_maclaurin(z)
    ph = abs(cmath.phase(z))
    if abs(z) > 4.0 and ph > 0.25 * math.pi:
        s, zeta = airy_ai_scaled(z, o)
        return s * cmath.exp(-zeta)
    if z.real >= 0:
        zeta = 2.0 / 3.0 * z ** 1.5
        return cmath.sqrt(z / 3.0) * bessel_k(1.0 / 3.0, zeta, o) / math.pi
    w = -z
    xi = 2.0 / 3.0 * w ** 1.5
    return cmath.sqrt(w) / 3.0 * (bessel_j(1.0 / 3.0, xi, o) + bessel_j(-1.0 / 3.0, xi, o))


def airy_bi(z: complex, opts: EvalOptions | None = None) -> complex:
    """Bi(z) = exp(i pi/6) Ai(w z) + exp(-i pi/6) Ai(w^2 z), w = exp(2 pi i/3)."""
    z = complex(z)
    return (cmath.exp(1j * math.pi / 6) * airy_ai(_OMEGA * z, opts)
            + cmath.exp(-1j * math.pi / 6) * airy_ai(_OMEGA ** 2 * z, opts))


# ---------------------------------------------------------------------------
# Whittaker functions


def whittaker_m(kappa: complex, mu: complex, z: complex, opts: EvalOptions | None = None) -> complex:
    """M_{kappa,mu}(z) = exp(-z/2) z^{mu+1/2} 1F1(mu-kappa+1/2; 1+2mu; z)."""
    o = _opts(opts)
    kappa, mu, z = complex(kappa), complex(mu), complex(z)
    if _is_nonpositive_int(1.0 + 2.0 * mu):
        raise PoleError(f"M is undefined for 1 + 2mu = {1 + 2 * mu}")
    if z == 0:
        if (mu + 0.5).real > 0:
            return 0j
        raise DomainError("M is singular at z = 0 for this mu")
    sgn = 1 if cmath.phase(z) <= 0 else -1
    via_w = (mu.real >= 0 and (0.5 + mu - kappa).real > 0.25 and (0.5 + mu + kappa).real > 0.25)
    if via_w and abs(z) > 20.0:
        return _whittaker_m_connection(kappa, mu, z, sgn, o)
    pre = cmath.exp(-0.5 * z + (mu + 0.5) * cmath.log(z))
    try:
        return pre * hyp1f1(mu - kappa + 0.5, 1.0 + 2.0 * mu, z, o)
    except NonConvergence:
        if not via_w:
            raise
    return _whittaker_m_connection(kappa, mu, z, sgn, o)


def _whittaker_m_connection(kappa, mu, z, sgn, o):
    """M from two W functions, avoiding the cancelling series at large |z|.

    M/Gamma(1+2mu) = e^{s(kappa-mu-1/2)pi i} W_{kappa,mu}(z)/Gamma(1/2+mu+kappa)
                   + e^{s kappa pi i} W_{-kappa,mu}(e^{s pi i} z)/Gamma(1/2+mu-kappa),  s = +-1.
    """
    zr = z * cmath.exp(sgn * 1j * math.pi)
    t1 = (cmath.exp(sgn * (kappa - mu - 0.5) * math.pi * 1j) * rgamma(0.5 + mu + kappa)
          * _whittaker_w_laplace(kappa, mu, z, o))
    t2 = (cmath.exp(sgn * kappa * math.pi * 1j) * rgamma(0.5 + mu - kappa)
          * _whittaker_w_laplace(-kappa, mu, zr, o))
    return gamma(1.0 + 2.0 * mu) * (t1 + t2)


def _whittaker_w_laplace(kappa: complex, mu: complex, z: complex, o: EvalOptions,
                         log: bool = False) -> complex:
    """W from its Laplace integral, trapezoidal rule in x = log t.

    W = z^{mu+1/2} e^{-z/2}/Gamma(1/2+mu-kappa)
        * int_0^inf e^{-zt} t^{mu-kappa-1/2} (1+t)^{mu+kappa-1/2} dt,
    with the ray rotated to t = s e^{-i arg z} so that zt is real.
    """
    th = cmath.phase(z)
    r = abs(z)
    alpha = mu - kappa + 0.5
    beta = mu + kappa - 0.5
    c = alpha.real
    rot = cmath.exp(-1j * th)
    # left end: e^{c x} below 1e-18 of the peak; right end: past the e^{-rs} decay
    x_hi = math.log((50.0 + 2 * abs(mu) + 2 * abs(kappa)) / r) + 2.0
    x_lo = min(x_hi - 4.0, math.log(min(1.0, 1.0 / r)) - 42.0 / c)
    h = 0.125
    prev = None
    while True:
        n = int(math.ceil((x_hi - x_lo) / h))
        if n + 1 > o.quadrature_limit:
            raise NonConvergence("Whittaker W integral exceeded the quadrature budget")
        x = x_lo + h * np.arange(n + 1)
        s = np.exp(x)
        lf = -r * s + alpha * (x - 1j * th) + beta * np.log1p(s * rot)
        if prev is None:
            top = lf.real.max()  # fixed scale so successive sums are comparable
        terms = np.exp(lf - top)
        val = h * terms.sum()
        # stop at 1e-14 relative, or at the rounding floor: cancelling terms,
        # or an exponent so large that its own rounding exceeds 1e-14
        floor = 1e-15 * h * np.abs(terms).sum()
        rel = max(1e-14, 8e-16 * float(np.abs(lf).max()))
        if prev is not None and abs(val - prev) <= max(rel * abs(val), floor):
            break
        prev = val
        h *= 0.5
    lw = ((mu + 0.5) * cmath.log(z) - 0.5 * z - log_gamma(alpha) + top
          + cmath.log(val))
    return lw if log else cmath.exp(lw)


def whittaker_w(kappa: complex, mu: complex, z: complex, opts: EvalOptions | None = None) -> complex:
    """W_{kappa,mu}(z).

    Where Re(1/2 + mu - kappa) > 0 (using W_{kappa,mu} = W_{kappa,-mu}) and
    |arg z| < pi, the Laplace integral is used.  Otherwise W is assembled from
    W = Gamma(-2mu)/Gamma(1/2-mu-kappa) M_{kappa,mu}
      + Gamma(2mu)/Gamma(1/2+mu-kappa) M_{kappa,-mu},
    with integer 2mu taken as a limit in mu.
    """
    o = _opts(opts)
    kappa, mu, z = complex(kappa), complex(mu), complex(z)
    if z == 0:
        raise DomainError("W has a branch point at z = 0")
    if mu.real < 0:
        mu = -mu
    if (0.5 + mu - kappa).real > 0.25 and abs(cmath.phase(z)) < math.pi - 0.05:
        return _whittaker_w_laplace(kappa, mu, z, o)
    if _near_int(2.0 * mu, 2 * _INT_GUARD):
        return _even_limit(lambda m: whittaker_w(kappa, m, z, o), complex(round(2 * mu.real) / 2),
                           _order_step(z))
    c1 = _gamma_ratio((-2.0 * mu,), (0.5 - mu - kappa,))
    c2 = _gamma_ratio((2.0 * mu,), (0.5 + mu - kappa,))
    out = 0j
    if c1 != 0:
        out += c1 * whittaker_m(kappa, mu, z, o)
    if c2 != 0:
        out += c2 * whittaker_m(kappa, -mu, z, o)
    return out


def whittaker(kind: str, kappa: complex, mu: complex, z: complex,
              opts: EvalOptions | None = None) -> complex:
    if kind == "M":
        return whittaker_m(kappa, mu, z, opts)
    if kind == "W":
        return whittaker_w(kappa, mu, z, opts)
    raise ValueError(f"unknown Whittaker kind {kind!r}")


def log_whittaker_m(kappa: complex, mu: complex, z: complex, opts: EvalOptions | None = None) -> complex:
    """log M_{kappa,mu}(z), usable where M itself over- or underflows (large mu)."""
    o = _opts(opts)
    kappa, mu, z = complex(kappa), complex(mu), complex(z)
    if abs(z) <= 20.0:
        try:
            return (-0.5 * z + (mu + 0.5) * cmath.log(z)
                    + cmath.log(hyp1f1(mu - kappa + 0.5, 1.0 + 2.0 * mu, z, o)))
        except NonConvergence:
            pass
    return cmath.log(whittaker_m(kappa, mu, z, o))


def log_whittaker_w(kappa: complex, mu: complex, z: complex, opts: EvalOptions | None = None) -> complex:
    """log W_{kappa,mu}(z); the Laplace route keeps it finite for large mu."""
    o = _opts(opts)
    kappa, mu, z = complex(kappa), complex(mu), complex(z)
    if mu.real < 0:
        mu = -mu
    if z != 0 and (0.5 + mu - kappa).real > 0.25 and abs(cmath.phase(z)) < math.pi - 0.05:
        return _whittaker_w_laplace(kappa, mu, z, o, log=True)
    return cmath.log(whittaker_w(kappa, mu, z, o))


# ---------------------------------------------------------------------------
# Parabolic cylinder functions


def pcf_e0(nu: complex, z: complex, opts: EvalOptions | None = None) -> complex:
    """Even solution sqrt(2) exp(-z^2/4) 1F1(-nu/2; 1/2; z^2/2)."""
    nu, z = complex(nu), complex(z)
    return math.sqrt(2.0) * cmath.exp(-0.25 * z * z) * hyp1f1(-0.5 * nu, 0.5, 0.5 * z * z, opts)


def pcf_e1(nu: complex, z: complex, opts: EvalOptions | None = None) -> complex:
    """Odd solution 2z exp(-z^2/4) 1F1((1-nu)/2; 3/2; z^2/2)."""
    nu, z = complex(nu), complex(z)
    return 2.0 * z * cmath.exp(-0.25 * z * z) * hyp1f1(0.5 * (1.0 - nu), 1.5, 0.5 * z * z, opts)


def pcf_d(nu: complex, z: complex, opts: EvalOptions | None = None) -> complex:
    """Weber function D_nu(z) from the even and odd solutions."""
    nu, z = complex(nu), complex(z)
    pre = cmath.exp(0.5 * nu * math.log(2.0)) * math.sqrt(0.5 * math.pi)
    out = 0j
    ga = rgamma(0.5 * (1.0 - nu))
    gb = rgamma(-0.5 * nu)
    if ga != 0:
        out += ga * pcf_e0(nu, z, opts)
    if gb != 0:
        out -= gb * pcf_e1(nu, z, opts)
    return pre * out


def parabolic_cylinder(kind: str, nu: complex, z: complex, opts: EvalOptions | None = None) -> complex:
    if kind == "D":
        return pcf_d(nu, z, opts)
    if kind == "E0":
        return pcf_e0(nu, z, opts)
    if kind == "E1":
        return pcf_e1(nu, z, opts)
    raise ValueError(f"unknown parabolic cylinder kind {kind!r}")


# ---------------------------------------------------------------------------
# Legendre functions


def legendre_p(degree: complex, order: complex, x: float, opts: EvalOptions | None = None) -> complex:
    """Ferrers function P^mu_nu(x) on the cut -1 < x < 1."""
    nu, mu = complex(degree), complex(order)
    x = float(x)
    if not -1.0 < x < 1.0:
        raise DomainError("P is evaluated on the cut -1 < x < 1")
    if _is_nonpositive_int(1.0 - mu):
        raise PoleError("integer positive order is not supported")
    pre = rgamma(1.0 - mu) * cmath.exp(0.5 * mu * math.log((1.0 + x) / (1.0 - x)))
    return pre * hyp2f1(-nu, nu + 1.0, 1.0 - mu, 0.5 * (1.0 - x), opts)


def _q_integral(nu: complex, x: float, o: EvalOptions) -> complex:
    """Q_nu(x) = sqrt(pi/2) int_0^inf exp(-t x) I_{nu+1/2}(t) dt / sqrt(t)."""
    from scipy import integrate

    order = nu + 0.5
    gap = x - 1.0
    if 60.0 / gap > 680.0:
        raise DomainError("integral route needs x - 1 >= 0.09")

    def f(t, part):
        if t == 0.0:
            return 0.0
        v = cmath.exp(-t * x) * bessel_i(order, t, o) / math.sqrt(t)
        return v.real if part == 0 else v.imag

    # Substitute t = s^2 to remove the t^{-1/2} behaviour at the origin.
    def g(s, part):
        return 2.0 * s * f(s * s, part)

    smax = math.sqrt(60.0 / gap + 10.0)
    re = integrate.quad(g, 0.0, smax, args=(0,), limit=o.quadrature_limit // 64,
                        epsabs=o.target_abs_tol * 1e-2, epsrel=o.target_rel_tol * 1e-2)[0]
    im = integrate.quad(g, 0.0, smax, args=(1,), limit=o.quadrature_limit // 64,
                        epsabs=o.target_abs_tol * 1e-2, epsrel=o.target_rel_tol * 1e-2)[0]
    return math.sqrt(0.5 * math.pi) * complex(re, im)


def legendre_q(degree: complex, order: complex, x: float, opts: EvalOptions | None = None,
               method: str = "series") -> complex:
    """Legendre function of the second kind Q_nu(x), x > 1, order zero.

    ``method='series'`` uses Q_nu(cosh d) = sqrt(pi) Gamma(nu+1)/Gamma(nu+3/2)
    exp(-(nu+1)d) 2F1(1/2, nu+1; nu+3/2; exp(-2d)); ``method='integral'``
    uses the Laplace transform of I_{nu+1/2}(t)/sqrt(t).
    """
    o = _opts(opts)
    nu, mu = complex(degree), complex(order)
    x = float(x)
    if mu != 0:
        raise DomainError("only order zero is supported for Q")
    if not x > 1.0:
        raise DomainError("Q is evaluated for x > 1")
    if method == "integral":
        if (nu + 1.0).real <= 0:
            raise DomainError("integral route needs Re(nu) > -1")
        return _q_integral(nu, x, o)
    if method != "series":
        raise ValueError(f"unknown method {method!r}")
    d = math.acosh(x)
    pre = math.sqrt(math.pi) * _gamma_ratio((nu + 1.0,), (nu + 1.5,)) * cmath.exp(-(nu + 1.0) * d)
    return pre * _f21_series(0.5 + 0j, nu + 1.0, nu + 1.5, math.exp(-2.0 * d), o)


def legendre(kind: str, degree: complex, order: complex, x: float,
             opts: EvalOptions | None = None) -> complex:
    if kind == "P":
        return legendre_p(degree, order, x, opts)
    if kind == "Q":
        return legendre_q(degree, order, x, opts)
    raise ValueError(f"unknown Legendre kind {kind!r}")
