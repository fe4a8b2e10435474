"""Darboux spaces, their coordinate charts, metrics and Gaussian curvature.

Every chart used here is orthogonal, ds^2 = g11 dq1^2 + g22 dq2^2.  Conformal
charts have g11 = g22 = f, the conformal factor.  The D_IV (u, v) chart is
stored in the rescaled coordinates for which f = a+/sin^2 u + a-/cos^2 u.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class SpaceId(str, Enum):
    DI = "DI"
    DII = "DII"
    DIII = "DIII"
    DIV = "DIV"


class SystemId(str, Enum):
    UV = "UV"
    ROTATED = "ROTATED"
    DISPLACED_PARABOLIC = "DISPLACED_PARABOLIC"
    POLAR = "POLAR"
    PARABOLIC = "PARABOLIC"
    ELLIPTIC = "ELLIPTIC"
    HYPERBOLIC = "HYPERBOLIC"
    HOROSPHERICAL = "HOROSPHERICAL"
    EQUIDISTANT = "EQUIDISTANT"


class Signature(str, Enum):
    RIEMANNIAN = "RIEMANNIAN"
    LORENTZIAN = "LORENTZIAN"


class LimitKind(str, Enum):
    FLAT = "FLAT"
    HYPERBOLIC = "HYPERBOLIC"
    NONE = "NONE"


class GeometryError(ValueError):
    pass


class InvalidSpace(GeometryError):
    pass


class InvalidChart(GeometryError):
    pass


class PointOutsideDomain(GeometryError):
    pass


class NonConformalChart(GeometryError):
    pass


SYSTEMS = {
    SpaceId.DI: (SystemId.UV, SystemId.ROTATED, SystemId.DISPLACED_PARABOLIC),
    SpaceId.DII: (SystemId.UV, SystemId.POLAR, SystemId.PARABOLIC, SystemId.ELLIPTIC),
    SpaceId.DIII: (SystemId.UV, SystemId.POLAR, SystemId.PARABOLIC, SystemId.ELLIPTIC,
                   SystemId.HYPERBOLIC),
    SpaceId.DIV: (SystemId.UV, SystemId.EQUIDISTANT, SystemId.HOROSPHERICAL, SystemId.ELLIPTIC),
}

# Charts whose metric is g11 = g22.
CONFORMAL = {
    (SpaceId.DI, SystemId.UV), (SpaceId.DI, SystemId.ROTATED),
    (SpaceId.DI, SystemId.DISPLACED_PARABOLIC),
    (SpaceId.DII, SystemId.UV), (SpaceId.DII, SystemId.PARABOLIC), (SpaceId.DII, SystemId.ELLIPTIC),
    (SpaceId.DIII, SystemId.UV), (SpaceId.DIII, SystemId.PARABOLIC),
    (SpaceId.DIII, SystemId.ELLIPTIC),
    (SpaceId.DIV, SystemId.UV), (SpaceId.DIV, SystemId.HOROSPHERICAL),
    (SpaceId.DIV, SystemId.ELLIPTIC),
}


@dataclass(frozen=True)
class SpaceParams:
    """A Darboux space and its metric parameters.

    D_I ignores ``b``; its ``a`` is the position of the half-space wall.
    The boundary values b = 0 (D_II, D_III, D_IV) and a = 2b (D_IV) are
    admitted because they are the constant-curvature limits.
    """
    space_id: SpaceId
    a: float
    b: float = 0.0

    def __post_init__(self):
        sid = SpaceId(self.space_id)
        object.__setattr__(self, "space_id", sid)
        a, b = float(self.a), float(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        ok = {
            SpaceId.DI: a > 0,
            SpaceId.DII: (a < 0 and b >= 0) or (a == 0 and b > 0),
            SpaceId.DIII: a > 0 and b >= 0,
            SpaceId.DIV: a > 0 and a >= 2 * b >= 0,
        }[sid]
        if not ok:
            raise InvalidSpace(f"parameters a={a}, b={b} are not admissible for {sid.value}")

    @property
    def a_plus(self) -> float:
        return (self.a + 2 * self.b) / 4

    @property
    def a_minus(self) -> float:
        return (self.a - 2 * self.b) / 4


@dataclass(frozen=True)
class MetricSample:
    g11: float
    g22: float
    sqrt_abs_g: float
    conformal: bool
    signature: Signature


HALF_PI = 0.5 * math.pi


def _default_domain(space: SpaceParams, system: SystemId) -> tuple:
    a = space.a
    s = space.space_id
    if s == SpaceId.DI:
        if system == SystemId.UV:
            return (a + 0.1, a + 5.0, -5.0, 5.0)
        if system == SystemId.ROTATED:
            return (-6.0, 6.0, -6.0, 6.0)
        return (-3.0, 3.0, 0.1, 3.0)
    if s == SpaceId.DII:
        if system == SystemId.UV:
            return (0.2, 5.0, -5.0, 5.0)
        if system == SystemId.POLAR:
            return (0.2, 5.0, -HALF_PI + 0.1, HALF_PI - 0.1)
        if system == SystemId.PARABOLIC:
            return (0.2, 3.0, 0.2, 3.0)
        return (0.1, 2.5, -HALF_PI + 0.1, HALF_PI - 0.1)
    if s == SpaceId.DIII:
        if system == SystemId.UV:
            return (-3.0, 3.0, -5.0, 5.0)
        if system == SystemId.POLAR:
            return (0.1, 5.0, 0.0, 2 * math.pi)
        if system == SystemId.PARABOLIC:
            return (-3.0, 3.0, 0.1, 3.0)
        if system == SystemId.ELLIPTIC:
            return (0.1, 2.5, -math.pi, math.pi)
        return (0.2, 3.0, 0.2, 3.0)
    if system == SystemId.UV:
        return (0.1, HALF_PI - 0.1, -5.0, 5.0)
    if system == SystemId.EQUIDISTANT:
        return (-3.0, 3.0, -5.0, 5.0)
    if system == SystemId.HOROSPHERICAL:
        return (0.2, 5.0, 0.2, 5.0)
    return (0.1, 3.0, 0.1, HALF_PI - 0.1)


@dataclass(frozen=True)
class Chart:
    """A coordinate system on a Darboux space.

    ``domain`` is the box (lo1, hi1, lo2, hi2); ``d`` is the interfocal
    half-distance of elliptic charts and ``theta`` the angle of the D_I
    rotated chart.  ``half_space`` restricts D_I charts to u >= a; with
    ``half_space=False`` only positivity of the metric (u > 0) is required.
    """
    space: SpaceParams
    system_id: SystemId
    domain: tuple | None = None
    d: float = 1.0
    theta: float = 0.0
    half_space: bool = True

    def __post_init__(self):
        sys_id = SystemId(self.system_id)
        object.__setattr__(self, "system_id", sys_id)
        if sys_id not in SYSTEMS[self.space.space_id]:
            raise InvalidChart(f"{sys_id.value} is not a chart on {self.space.space_id.value}")
        if self.d < 0:
            raise InvalidChart("d must be non-negative")
        if sys_id == SystemId.ELLIPTIC and self.d == 0:
            raise InvalidChart("elliptic charts need d > 0")
        if not 0.0 <= self.theta <= math.pi:
            raise InvalidChart("theta must lie in [0, pi]")
        dom = self.domain if self.domain is not None else _default_domain(self.space, sys_id)
        dom = tuple(float(x) for x in dom)
        if len(dom) != 4 or not (dom[0] < dom[1] and dom[2] < dom[3]):
            raise InvalidChart(f"bad domain box {dom}")
        object.__setattr__(self, "domain", dom)

    @property
    def key(self) -> tuple:
        return (self.space.space_id, self.system_id)

    @property
    def conformal(self) -> bool:
        return self.key in CONFORMAL

    @property
    def signature(self) -> Signature:
        if self.key == (SpaceId.DIII, SystemId.HYPERBOLIC):
            return Signature.LORENTZIAN
        return Signature.RIEMANNIAN

    # -- raw formulas, no validation; numpy-broadcastable ------------------

    def metric_components(self, q1, q2):
        """(g11, g22) at (q1, q2) without any domain check."""
        sp = self.space
        a, b = sp.a, sp.b
        s, c = sp.space_id, self.system_id
        if s == SpaceId.DI:
            if c == SystemId.UV:
                f = 2 * q1
            elif c == SystemId.ROTATED:
                f = 2 * (q1 * np.cos(self.theta) + q2 * np.sin(self.theta))
            else:
                f = (q1 ** 2 - q2 ** 2 + 2 * a) * (q1 ** 2 + q2 ** 2)
            return f, f
        if s == SpaceId.DII:
            if c == SystemId.UV:
                f = (b * q1 ** 2 - a) / q1 ** 2
                return f, f
            if c == SystemId.POLAR:
                u2 = (q1 * np.cos(q2)) ** 2
                f = (b * u2 - a) / u2
                return f, f * q1 ** 2
            if c == SystemId.PARABOLIC:
                p = (q1 * q2) ** 2
                f = (b * p - a) / p * (q1 ** 2 + q2 ** 2)
                return f, f
            cc = (np.cosh(q1) * np.cos(q2)) ** 2
            f = (b * self.d ** 2 * cc - a) / cc * (np.sinh(q1) ** 2 + np.sin(q2) ** 2)
            return f, f
        if s == SpaceId.DIII:
            if c == SystemId.UV:
                f = a * np.exp(-q1) + b * np.exp(-2 * q1)
                return f, f
            if c == SystemId.POLAR:
                f = a + 0.25 * b * q1 ** 2
                return f, f * q1 ** 2
            if c == SystemId.PARABOLIC:
                f = a + 0.25 * b * (q1 ** 2 + q2 ** 2)
                return f, f
            if c == SystemId.ELLIPTIC:
                d2 = self.d ** 2
                f = (a + 0.25 * b * d2 * (np.sinh(q1) ** 2 + np.cos(q2) ** 2)) * d2 * (
                    np.sinh(q1) ** 2 + np.sin(q2) ** 2)
                return f, f
            h = (a + 0.5 * b * (q1 - q2)) * (q1 + q2)
            return h / q1 ** 2, -h / q2 ** 2
        ap, am = sp.a_plus, sp.a_minus
        if c == SystemId.UV:
            f = ap / np.sin(q1) ** 2 + am / np.cos(q1) ** 2
            return f, f
        if c == SystemId.EQUIDISTANT:
            # a - 2b tanh(alpha), written without cancellation for large alpha
            f = ((a - 2 * b) + 4 * b / (np.exp(2 * q1) + 1)) / 4
            return f, f * np.cosh(q1) ** 2
        if c == SystemId.HOROSPHERICAL:
            f = ap / q2 ** 2 + am / q1 ** 2
            return f, f
        f = (ap / np.sin(q2) ** 2 + am / np.cos(q2) ** 2 + ap / np.sinh(q1) ** 2
             - am / np.cosh(q1) ** 2)
        return f, f

    def to_uv(self, q1, q2):
        """Image of (q1, q2) in the space's (u, v) chart; None for the Lorentzian chart."""
        s, c = self.space.space_id, self.system_id
        if c == SystemId.UV:
            return q1, q2
        if s == SpaceId.DI:
            if c == SystemId.ROTATED:
                ct, st = math.cos(self.theta), math.sin(self.theta)
                return q1 * ct + q2 * st, -q1 * st + q2 * ct
            return 0.5 * (q1 ** 2 - q2 ** 2) + self.space.a, q1 * q2
        if s == SpaceId.DII:
            if c == SystemId.POLAR:
                return q1 * np.cos(q2), q1 * np.sin(q2)
            if c == SystemId.PARABOLIC:
                return q1 * q2, 0.5 * (q1 ** 2 - q2 ** 2)
            return self.d * np.cosh(q1) * np.cos(q2), self.d * np.sinh(q1) * np.sin(q2)
        if s == SpaceId.DIII:
            if c == SystemId.HYPERBOLIC:
                return None
            if c == SystemId.POLAR:
                xi, eta = q1 * np.cos(q2), q1 * np.sin(q2)
            elif c == SystemId.PARABOLIC:
                xi, eta = q1, q2
            else:
                xi = self.d * np.cosh(q1) * np.cos(q2)
                eta = self.d * np.sinh(q1) * np.sin(q2)
            return np.log(4.0 / (xi ** 2 + eta ** 2)), 2.0 * np.arctan2(eta, xi)
        if c == SystemId.EQUIDISTANT:
            return np.arctan(np.exp(q1)), 0.5 * q2
        if c == SystemId.HOROSPHERICAL:
            mu, nu = q1, q2
        else:
            mu = self.d * np.cosh(q1) * np.cos(q2)
            nu = self.d * np.sinh(q1) * np.sin(q2)
        return np.arctan2(nu, mu), np.log(0.5 * np.hypot(mu, nu))

    # -- validated access ---------------------------------------------------

    def in_domain(self, q) -> bool:
        q1, q2 = float(q[0]), float(q[1])
        lo1, hi1, lo2, hi2 = self.domain
        if not (lo1 <= q1 <= hi1 and lo2 <= q2 <= hi2):
            return False
        if self.space.space_id == SpaceId.DI:
            u = self.to_uv(q1, q2)[0]
            wall = self.space.a if self.half_space else 0.0
            if not u > wall:
                return False
        with np.errstate(all="ignore"):
            g11, g22 = self.metric_components(q1, q2)
        if not (np.isfinite(g11) and np.isfinite(g22)) or g11 == 0 or g22 == 0:
            return False
        if self.signature == Signature.RIEMANNIAN and not (g11 > 0 and g22 > 0):
            return False
        return True

    def check(self, q):
        if not self.in_domain(q):
            raise PointOutsideDomain(
                f"point {tuple(q)} is outside the {self.key[0].value} {self.key[1].value} chart")

    def grid(self, n1: int, n2: int, margin: float = 0.05) -> np.ndarray:
        """Interior grid points of the domain box that pass the domain check."""
        lo1, hi1, lo2, hi2 = self.domain
        m1, m2 = margin * (hi1 - lo1), margin * (hi2 - lo2)
        pts = [(x, y) for x in np.linspace(lo1 + m1, hi1 - m1, n1)
               for y in np.linspace(lo2 + m2, hi2 - m2, n2)]
        return np.array([p for p in pts if self.in_domain(p)])

    def sample(self, n: int, rng: np.random.Generator, margin: float = 0.05) -> np.ndarray:
        lo1, hi1, lo2, hi2 = self.domain
        m1, m2 = margin * (hi1 - lo1), margin * (hi2 - lo2)
        out = []
        while len(out) < n:
            p = (rng.uniform(lo1 + m1, hi1 - m1), rng.uniform(lo2 + m2, hi2 - m2))
            if self.in_domain(p):
                out.append(p)
        return np.array(out)


def metric_diag(chart: Chart, q) -> MetricSample:
    chart.check(q)
    g11, g22 = chart.metric_components(float(q[0]), float(q[1]))
    g11, g22 = float(g11), float(g22)
    return MetricSample(g11=g11, g22=g22, sqrt_abs_g=math.sqrt(abs(g11 * g22)),
                        conformal=chart.conformal, signature=chart.signature)


def _derivs(fun, x, h):
    """First and second derivatives from five-point central stencils.

    Two step sizes are combined by one Richardson level, so both results
    are sixth-order accurate in h.
    """
    def level(s):
        f2, f1, f0, fm1, fm2 = fun(x + 2 * s), fun(x + s), fun(x), fun(x - s), fun(x - 2 * s)
        d1 = (-f2 + 8 * f1 - 8 * fm1 + fm2) / (12 * s)
        d2 = (-f2 + 16 * f1 - 30 * f0 + 16 * fm1 - fm2) / (12 * s * s)
        return d1, d2
    d1a, d2a = level(h)
    d1b, d2b = level(h / 2)
    return (16 * d1b - d1a) / 15, (16 * d2b - d2a) / 15


def _length_scale(chart: Chart, q1: float, q2: float) -> float:
    """Length over which ln g varies by about 0.2, capped at 1."""
    e = 1e-6
    rate = 0.0
    for k in (0, 1):
        for dq in ((e, 0.0), (0.0, e)):
            gp = chart.metric_components(q1 + dq[0], q2 + dq[1])[k]
            gm = chart.metric_components(q1 - dq[0], q2 - dq[1])[k]
            rate = max(rate, abs(math.log(abs(gp / gm))) / (2 * e))
    if rate == 0:
        return 1.0
    return min(1.0, max(0.2 / rate, 1e-4))


def gaussian_curvature_numeric(chart: Chart, q, step: float | None = None) -> float:
    """Gaussian curvature from finite differences of the metric.

    For an orthogonal metric E dq1^2 + G dq2^2 with E = exp(2A), G = exp(2B),
    K = -[(B1 - A1) B1 + B11]/E - [(A2 - B2) A2 + A22]/G, which for a
    conformal chart is -(1/2f) Laplacian(ln f).  Derivatives use central
    differences (five-point stencils) with one Richardson level, evaluated
    in extended precision.
    """
    if chart.signature != Signature.RIEMANNIAN:
        raise NonConformalChart("curvature is only evaluated on Riemannian charts")
    chart.check(q)
    q1, q2 = np.longdouble(q[0]), np.longdouble(q[1])
    h = np.longdouble(step if step is not None else 0.02 * _length_scale(chart, float(q1), float(q2)))

    # Extended precision keeps the rounding error of the second differences
    # well below the truncation error.
    def lnE(x, y):
        return 0.5 * np.log(chart.metric_components(x, y)[0])

    def lnG(x, y):
        return 0.5 * np.log(chart.metric_components(x, y)[1])

    A1, _ = _derivs(lambda t: lnE(t, q2), q1, h)
    A2, A22 = _derivs(lambda t: lnE(q1, t), q2, h)
    B1, B11 = _derivs(lambda t: lnG(t, q2), q1, h)
    B2, _ = _derivs(lambda t: lnG(q1, t), q2, h)
    E, G = chart.metric_components(q1, q2)
    return float(-((B1 - A1) * B1 + B11) / E - ((A2 - B2) * A2 + A22) / G)


def gaussian_curvature_closed(space: SpaceParams, q) -> float:
    """Closed-form curvature at a point of the (u, v) chart.

    D_I:   1/(4u^3)
    D_II:  a(a - 3bu^2)/(a - bu^2)^3
    D_III: -ab e^{-3u} / (2 (a e^{-u} + b e^{-2u})^3)
    D_IV:  -(a+^2/s^6 + a-^2/c^6 + 3 a+ a-/(s^4 c^4)) / (a+/s^2 + a-/c^2)^3
    """
    Chart(space, SystemId.UV).check(q)
    u = float(q[0])
    a, b = space.a, space.b
    s = space.space_id
    if s == SpaceId.DI:
        return 1.0 / (4.0 * u ** 3)
    if s == SpaceId.DII:
        return a * (a - 3 * b * u * u) / (a - b * u * u) ** 3
    if s == SpaceId.DIII:
        f = a * math.exp(-u) + b * math.exp(-2 * u)
        return -a * b * math.exp(-3 * u) / (2 * f ** 3)
    ap, am = space.a_plus, space.a_minus
    sn, cs = math.sin(u), math.cos(u)
    num = ap ** 2 / sn ** 6 + am ** 2 / cs ** 6 + 3 * ap * am / (sn ** 4 * cs ** 4)
    return -num / (ap / sn ** 2 + am / cs ** 2) ** 3


def limiting_space(space: SpaceParams) -> LimitKind:
    s, a, b = space.space_id, space.a, space.b
    if s == SpaceId.DII:
        if b == 0:
            return LimitKind.HYPERBOLIC
        if a == 0:
            return LimitKind.FLAT
    elif s == SpaceId.DIII:
        if b == 0:
            return LimitKind.FLAT
    elif s == SpaceId.DIV:
        if b == 0 or a == 2 * b:
            return LimitKind.HYPERBOLIC
    return LimitKind.NONE


def limit_curvature(space: SpaceParams) -> float | None:
    """Constant curvature of a limiting space, or None."""
    kind = limiting_space(space)
    if kind == LimitKind.NONE:
        return None
    if kind == LimitKind.FLAT:
        return 0.0
    if space.space_id == SpaceId.DII:
        return 1.0 / space.a
    # D_IV: f = a+/sin^2 u + a-/cos^2 u with a+ = a- or a- = 0 has K = -1/a+.
    return -1.0 / space.a_plus


def all_charts(space: SpaceParams) -> list[Chart]:
    return [Chart(space, s) for s in SYSTEMS[space.space_id]]
