import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from darboux.kernels import (BoundaryNodeZero, CausticSingularity, IndexBeyondNM, MptParams, NoBoundStates,
                             PhysicalConstants, PoleAtBoundState, ho_green, ho_kernel_euclidean, linear_green,
                             linear_green_halfspace, mpt_bound, mpt_bound_energy, mpt_green, rho_green,
                             rho_kernel)
from darboux.verify import ode_residual

PC = PhysicalConstants(hbar=2.0, mass=3.0)
MPT = MptParams(1.5, 4.5)


def _jump(g, x, h=1e-4):
    right = (-3 * g(x) + 4 * g(x + h) - g(x + 2 * h)) / (2 * h)
    left = (3 * g(x) - 4 * g(x - h) + g(x - 2 * h)) / (2 * h)
    return right - left


KERNELS = {
    "radial_oscillator": (lambda x, y, E: rho_green(x, y, E, 1.0, 0.6, PC),
                          lambda x: 0.5 * PC.mass * x * x + PC.hbar ** 2 * (0.36 - 0.25) / (2 * PC.mass * x * x)),
    "linear": (lambda x, y, E: linear_green(x, y, E, 1.0, PC), lambda x: x),
    "linear_halfspace": (lambda x, y, E: linear_green_halfspace(x, y, E, 1.0, 0.0, PC), lambda x: x),
    "oscillator": (lambda x, y, E: ho_green(x, y, E, 1.0, PC), lambda x: 0.5 * PC.mass * x * x),
    "poeschl_teller": (lambda x, y, E: mpt_green(x, y, E, MPT, PC), lambda x: MPT.potential(x, PC).real),
}


@pytest.mark.parametrize("name", sorted(KERNELS))
def test_green_solves_ode_off_diagonal(name):
    g, pot = KERNELS[name]
    E = 0.7 + 0.05j
    r = ode_residual(lambda t: g(t, 1.1, E), pot, E, [0.4, 0.7, 1.6, 2.3], PC)
    assert r.rel < 1e-8


@pytest.mark.parametrize("name", sorted(KERNELS))
def test_green_derivative_jump(name):
    # (H - E) G = delta  =>  G' jumps by -2m/hbar^2 across x1 = x2
    g, _ = KERNELS[name]
    E = -0.7 + 0.0j if name != "poeschl_teller" else -3.0 + 0.0j
    jump = _jump(lambda t: g(t, 0.9, E), 0.9)
    assert abs(jump - (-2 * PC.mass / PC.hbar ** 2)) < 1e-6


@pytest.mark.parametrize("name", sorted(KERNELS))
@settings(max_examples=15, deadline=None)
@given(x=st.floats(0.2, 3.0), y=st.floats(0.2, 3.0), er=st.floats(-2.0, 3.0), ei=st.floats(0.01, 1.0))
def test_green_symmetry(name, x, y, er, ei):
    g, _ = KERNELS[name]
    E = complex(er, ei)
    a, b = g(x, y, E), g(y, x, E)
    assert abs(a - b) <= 1e-12 * abs(a) + 1e-300


def test_ho_green_is_laplace_transform_of_mehler():
    E = -0.4
    x, y = 0.3, 1.1
    val = integrate.quad(lambda T: ho_kernel_euclidean(x, y, T, 1.0, PC).real * math.exp(E * T / PC.hbar),
                         0, 80.0, epsabs=1e-13, epsrel=1e-12, limit=400)[0] / PC.hbar
    assert abs(ho_green(x, y, E, 1.0, PC) - val) < 1e-9 * abs(val)


def test_rho_green_is_laplace_transform_of_heat_kernel():
    E, lam = -0.5, 0.6
    x, y = 0.6, 2.6
    # below T = 0.05 the integrand is ~exp(-3/T), and the Bessel argument would pass the overflow guard
    val = integrate.quad(lambda T: rho_kernel(x, y, T, 1.0, lam, PC, euclidean=True).real * math.exp(E * T / PC.hbar),
                         0.05, 80.0, epsabs=1e-13, epsrel=1e-12, limit=400)[0] / PC.hbar
    assert abs(rho_green(x, y, E, 1.0, lam, PC) - val) < 1e-8 * abs(val)


def test_mehler_matches_eigenfunction_sum():
    x, y, T = 0.4, -0.9, 0.8
    m, hb, w = PC.mass, PC.hbar, 1.0
    c = m * w / hb
    total = mp.mpf(0)
    for n in range(80):
        norm = (c / mp.pi) ** 0.25 / mp.sqrt(2 ** n * mp.factorial(n))
        psi = lambda s: norm * mp.hermite(n, mp.sqrt(c) * s) * mp.exp(-c * s * s / 2)
        total += psi(x) * psi(y) * mp.exp(-(n + 0.5) * w * T)
    assert abs(ho_kernel_euclidean(x, y, T, w, PC) - float(total)) < 1e-12


def test_free_radial_kernel_at_half_order_is_image_sum():
    # lam = 1/2 makes the centrifugal term vanish: Dirichlet free kernel on r > 0
    r1, r2, T = 0.7, 1.3, 0.9
    m, hb = PC.mass, PC.hbar
    pre = math.sqrt(m / (2 * math.pi * hb * T))
    ref = pre * (math.exp(-m * (r1 - r2) ** 2 / (2 * hb * T)) - math.exp(-m * (r1 + r2) ** 2 / (2 * hb * T)))
    assert abs(rho_kernel(r1, r2, T, 0.0, 0.5, PC, euclidean=True) - ref) < 1e-13


def test_halfspace_vanishes_at_wall():
    for E in (0.3 + 0.1j, -1.0 + 0j, 2.0 + 0.5j):
        free = linear_green(0.0, 1.3, E, 1.0, PC, left="outgoing")
        assert abs(linear_green_halfspace(0.0, 1.3, E, 1.0, 0.0, PC)) <= 1e-14 * abs(free)
        assert abs(linear_green_halfspace(1e-9, 1.3, E, 1.0, 0.0, PC)) < 1e-8


def test_mpt_bound_states_normalized_and_energies():
    assert mpt_bound_energy(0, MPT, PC) == pytest.approx(-PC.hbar ** 2 / (2 * PC.mass) * 4.0)
    for n in range(MPT.n_max + 1):
        norm = integrate.quad(lambda r: mpt_bound(n, MPT, r, PC)[0] ** 2, 0, 40, limit=200)[0]
        assert norm == pytest.approx(1.0, abs=1e-9)


def test_mpt_bound_state_solves_ode():
    E = mpt_bound_energy(0, MPT, PC)
    pot = lambda r: MPT.potential(r, PC).real
    r = ode_residual(lambda t: mpt_bound(0, MPT, t, PC)[0], pot, E, [0.5, 1.0, 1.7], PC)
    assert r.rel < 1e-8


def test_kernel_errors():
    with pytest.raises(PoleAtBoundState):
        ho_green(0.1, 0.2, 0.5 * PC.hbar, 1.0, PC)
    with pytest.raises(CausticSingularity):
        rho_kernel(0.5, 0.6, math.pi, 1.0, 0.5, PC)
    with pytest.raises(IndexBeyondNM):
        mpt_bound(MPT.n_max + 1, MPT, 1.0, PC)
    with pytest.raises(NoBoundStates):
        mpt_bound(0, MptParams(1.5, 1.6), 1.0, PC)
    with pytest.raises(ValueError):
        linear_green_halfspace(-0.1, 1.0, 0.5, 1.0, 0.0, PC)


def test_dirichlet_eigenvalue_raises():
    # zeros of Ai on the wall: Ecal = -a_1 (hbar^2 k^2 / 2m)^{1/3} with boundary at 0
    a1 = float(mp.airyaizero(1))
    Ecal = -a1 * (PC.hbar ** 2 / (2 * PC.mass)) ** (1 / 3)
    with pytest.raises(BoundaryNodeZero):
        linear_green_halfspace(0.5, 1.0, Ecal, 1.0, 0.0, PC)
