"""Command-line front end: runs the verification suites and writes CSV reports.

    darboux <command> [--space dII --a -1 --b 0 ...] [--config run.cfg]

Commands: curvature, residual, green, identity, lattice, limits, report.
Exit codes: 0 all rows pass, 1 some row fails, 2 invalid configuration,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import lattice as lat
from . import solutions as sol
from . import verify
from .geometry import (CONFORMAL, Chart, GeometryError, SpaceId, SpaceParams, SystemId, all_charts,
                       gaussian_curvature_closed, gaussian_curvature_numeric, limit_curvature)
from .kernels import (KernelError, MptParams, PhysicalConstants, ho_green, linear_green, linear_green_halfspace,
                      mpt_green, rho_green)
from .specfun import SpecialFunctionError

COMMANDS = ("curvature", "residual", "green", "identity", "lattice", "limits", "report")
HEADER = ("test_id", "inputs", "observed", "expected", "tolerance", "pass")

DEFAULT_TOLS = {
    "curvature_rel": 1e-6,
    "curvature_limit": 1e-8,
    "qpot": 1e-9,
    "residual": 1e-5,
    "residual_order": 3.5,
    "wrong_e_factor": 100.0,
    "green_symmetry": 1e-10,
    "green_residual": 1e-5,
    "dirichlet": 1e-12,
    "identity_single": verify.SINGLE_TOL,
    "identity_truncated": verify.TRUNCATED_TOL,
    "limit_curvature": 1e-8,
    "limit_green": 1e-5,
    "k_structure": 1e-3,
    "limit_residual": 1e-5,
    "plane_wave": 1e-7,
    "lattice_rel": 0.01,
    "trotter": 0.5,
    "fluctuation_se": 3.0,
    "quartic_drift": 0.01,
    "dirichlet_pole": 0.02,
}

DEFAULT_SPACES = {
    SpaceId.DI: (1.0, 0.0),
    SpaceId.DII: (-1.0, 1.0),
    SpaceId.DIII: (1.0, 1.0),
    SpaceId.DIV: (3.0, 1.2),
}

LIMIT_POINTS = (
    (SpaceId.DII, -1.0, 0.0),
    (SpaceId.DII, 0.0, 1.0),
    (SpaceId.DIII, 1.0, 0.0),
    (SpaceId.DIV, 2.0, 1.0),
    (SpaceId.DIV, 3.0, 0.0),
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str = "report"
    space: SpaceId | None = None
    system: SystemId | None = None
    a: float | None = None
    b: float | None = None
    d: float = 1.0
    theta: float = 0.0
    hbar: float = 1.0
    mass: float = 1.0
    epsilon: float = 0.05
    seed: int = 0
    identity_id: str | None = None
    output_dir: str = field(default_factory=lambda: os.environ.get("DARBOUX_OUTPUT_DIR", "darboux-output"))
    svg: bool = False
    tolerances: tuple = ()

    @property
    def pc(self) -> PhysicalConstants:
        return PhysicalConstants(hbar=self.hbar, mass=self.mass)

    def tol(self, name: str) -> float:
        return dict(self.tolerances).get(name, DEFAULT_TOLS[name])

    def spaces(self) -> list[SpaceParams]:
        if self.space is None:
            return [SpaceParams(s, *ab) for s, ab in DEFAULT_SPACES.items()]
        a0, b0 = DEFAULT_SPACES[self.space]
        return [SpaceParams(self.space, a0 if self.a is None else self.a, b0 if self.b is None else self.b)]


@dataclass(frozen=True)
class ReportRow:
    test_id: str
    inputs: str
    observed: float | None
    expected: float | None
    tolerance: float
    passed: bool | None  # None marks a skipped row


# ---------------------------------------------------------------------------
# Configuration


_FLOAT_KEYS = ("a", "b", "d", "theta", "hbar", "mass", "epsilon")


def _space(value: str) -> SpaceId:
    try:
        return SpaceId(value.strip().upper().replace("D_", "D"))
    except ValueError:
        raise ConfigError(f"unknown space {value!r}; expected one of dI, dII, dIII, dIV") from None


def _system(value: str) -> SystemId:
    try:
        return SystemId(value.strip().upper())
    except ValueError:
        raise ConfigError(f"unknown coordinate system {value!r}") from None


def _convert(key: str, value: str):
    if key in _FLOAT_KEYS:
        return float(value)
    if key == "seed":
        return int(value)
    if key == "svg":
        v = value.strip().lower()
        if v not in ("true", "false", "1", "0", "yes", "no"):
            raise ValueError(f"not a boolean: {value!r}")
        return v in ("true", "1", "yes")
    if key == "command":
        if value not in COMMANDS:
            raise ValueError(f"unknown command {value!r}")
        return value
    return value


def read_config_file(path) -> dict:
    """``key = value`` lines with ``#`` comments; tolerance keys are ``tol.<name>``."""
    out: dict = {}
    tols: dict = {}
    for n, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.count("=") != 1:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", n)
        key, value = (s.strip() for s in line.split("="))
        if not key or not value:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", n)
        key = {"m": "mass", "id": "identity_id", "output-dir": "output_dir"}.get(key, key)
        try:
            if key.startswith("tol."):
                name = key[4:]
                if name not in DEFAULT_TOLS:
                    raise ValueError(f"unknown tolerance {name!r}")
                tols[name] = float(value)
            elif key in ("space", "system", "identity_id", "output_dir") or key in _FLOAT_KEYS \
                    or key in ("seed", "svg", "command"):
                out[key] = _convert(key, value)
            else:
                raise ValueError(f"unknown key {key!r}")
        except ValueError as exc:
            raise ParseError(str(exc), n) from None
    if tols:
        out["tolerances"] = tols
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="darboux", description="Verification suites for quantum motion on Darboux spaces.")
    p.add_argument("command", nargs="?", choices=COMMANDS)
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--space", help="dI, dII, dIII or dIV")
    p.add_argument("--system", help="coordinate system, e.g. uv or parabolic")
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--d", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--hbar", type=float)
    p.add_argument("--m", "--mass", dest="mass", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--id", dest="identity_id")
    p.add_argument("--output-dir", dest="output_dir")
    p.add_argument("--svg", action="store_true", default=None)
    p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE")
    return p


def parse_config(argv=None, config_file=None) -> RunConfig:
    """Flags override the configuration file, which overrides the defaults."""
    args = _parser().parse_args(list(argv or []))
    path = args.config or config_file
    merged: dict = read_config_file(path) if path else {}
    tols = dict(merged.pop("tolerances", {}))
    for key in ("command", "space", "system", "identity_id", "output_dir", "seed", "svg") + _FLOAT_KEYS:
        val = getattr(args, key)
        if val is not None:
            merged[key] = val
    for item in args.tol:
        name, sep, value = item.partition("=")
        if not sep or name not in DEFAULT_TOLS:
            raise ParseError(f"bad tolerance override {item!r}")
        try:
            tols[name] = float(value)
        except ValueError:
            raise ParseError(f"bad tolerance override {item!r}") from None
    if "space" in merged:
        merged["space"] = _space(str(merged["space"]))
    if "system" in merged:
        merged["system"] = _system(str(merged["system"]))
    if merged.get("identity_id"):
        try:
            merged["identity_id"] = verify.IdentityId(merged["identity_id"].upper()).value
        except ValueError:
            raise ConfigError(f"unknown identity {merged['identity_id']!r}") from None
    cfg = RunConfig(**merged, tolerances=tuple(sorted(tols.items())))
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.hbar <= 0 or cfg.mass <= 0 or cfg.epsilon <= 0:
        raise ConfigError("hbar, mass and epsilon must be positive")
    if (cfg.a is not None or cfg.b is not None) and cfg.space is None:
        raise ConfigError("--a/--b need --space")
    try:
        spaces = cfg.spaces()
        if cfg.system is not None:
            for sp in spaces:
                Chart(sp, cfg.system, d=cfg.d if cfg.d > 0 else 1.0, theta=cfg.theta)
    except GeometryError as exc:
        raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------------------
# Rows and CSV


def _fmt(x) -> str:
    return "" if x is None else format(float(x), ".17g")


def _inputs(**kw) -> str:
    parts = []
    for k, v in kw.items():
        if isinstance(v, float):
            v = _fmt(v)
        elif isinstance(v, tuple):
            v = "(" + " ".join(_fmt(t) for t in v) + ")"
        parts.append(f"{k}={getattr(v, 'value', v)}")
    return ";".join(parts)


def _row(test_id, inputs, observed, expected, tolerance, passed=None) -> ReportRow:
    observed = None if observed is None else float(observed)
    if passed is None and expected is not None:
        passed = abs(observed - expected) <= tolerance
    return ReportRow(test_id, inputs, observed, expected, float(tolerance), bool(passed))


def _skip(test_id, inputs, tolerance=0.0) -> ReportRow:
    return ReportRow(test_id, inputs, None, None, tolerance, None)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in rows:
        flag = "SKIPPED" if r.passed is None else ("true" if r.passed else "false")
        w.writerow((r.test_id, r.inputs, _fmt(r.observed), _fmt(r.expected), _fmt(r.tolerance), flag))
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Suites


def _grid(chart: Chart, n: int, margin: float = 0.05) -> list[tuple[float, float]]:
    lo1, hi1, lo2, hi2 = chart.domain
    m1, m2 = margin * (hi1 - lo1), margin * (hi2 - lo2)
    pts = [(float(x), float(y)) for x in np.linspace(lo1 + m1, hi1 - m1, n)
           for y in np.linspace(lo2 + m2, hi2 - m2, n)]
    return [p for p in pts if chart.in_domain(p)]


def curvature_rows(cfg: RunConfig) -> list[ReportRow]:
    rows = []
    for sp in cfg.spaces():
        system = cfg.system or SystemId.UV
        chart = Chart(sp, system, d=cfg.d, theta=cfg.theta)
        limit = limit_curvature(sp)
        for i, q in enumerate(_grid(chart, 10)):
            K = gaussian_curvature_numeric(chart, q)
            if limit is not None:
                exp, tol = limit, cfg.tol("curvature_limit")
            else:
                exp = gaussian_curvature_closed(sp, chart.to_uv(*q))
                tol = cfg.tol("curvature_rel") * abs(exp)
            rows.append(_row(f"curvature/{sp.space_id.value}/{system.value.lower()}/{i:03d}",
                             _inputs(a=sp.a, b=sp.b, q1=q[0], q2=q[1]), K, exp, tol))
    return rows


_WAVE_QN = {
    (SpaceId.DII, SystemId.UV): [dict(p=1.0, k=2.0)],
    (SpaceId.DII, SystemId.POLAR): [dict(p=1.0, k=0.7), dict(p=1.0, k=0.7, eps_signs=(-1, 1))],
    (SpaceId.DII, SystemId.PARABOLIC): [dict(p=1.0, zeta=0.6)],
    (SpaceId.DIII, SystemId.UV): [dict(p=1.3, l=2)],
    (SpaceId.DIII, SystemId.POLAR): [dict(p=1.3, l=2)],
    (SpaceId.DIII, SystemId.PARABOLIC): [dict(p=1.3, zeta=0.4, parity="even"),
                                         dict(p=1.3, zeta=0.4, parity="odd")],
    (SpaceId.DIII, SystemId.HYPERBOLIC): [dict(p=1.3, k=0.8)],
}


def _wave_cases(sp: SpaceParams, system: SystemId):
    if sp.space_id == SpaceId.DIV:
        return [dict(p=1.0, k=0.8)]
    return _WAVE_QN.get((sp.space_id, system), [])


def _residual_steps(chart, psi, E, pts, pc, steps):
    return [verify.lb_residual(chart, psi, E, pts, pc, step=h, richardson=False).max_abs for h in steps]


def residual_rows(cfg: RunConfig, n_points: int = 20) -> list[ReportRow]:
    rows = []
    pc = cfg.pc
    for sp in cfg.spaces():
        rng = np.random.default_rng(cfg.seed)
        for entry in sol.catalog():
            if entry.space_id != sp.space_id or (cfg.system and entry.system_id != cfg.system):
                continue
            tag = f"residual/{sp.space_id.value}/{entry.system_id.value.lower()}"
            if entry.status not in (sol.Status.FULL, sol.Status.WAVE_ONLY):
                rows.append(_skip(tag, _inputs(status=entry.status.value)))
                continue
            chart = Chart(sp, entry.system_id)
            pts = chart.sample(n_points, rng, margin=0.1)
            for j, qd in enumerate(_wave_cases(sp, entry.system_id)):
                qn = sol.QuantumNumbers(**qd)
                E = sol.energy(sp, entry.system_id, qn, pc)

                def psi(q, qn=qn, system=entry.system_id):
                    return sol.wavefunction(sp, system, qn, q, pc)
                inputs = _inputs(a=sp.a, b=sp.b, hbar=pc.hbar, m=pc.mass,
                                 **{k: (v if not isinstance(v, (int, float)) else float(v)) for k, v in qd.items()})
                r = verify.lb_residual(chart, psi, E, pts, pc, step=0.01)
                rows.append(_row(f"{tag}/{j}", inputs, r.rel, None, cfg.tol("residual"),
                                 passed=r.rel < cfg.tol("residual")))
                r1, r2 = _residual_steps(chart, psi, E, pts, pc, (0.04, 0.02))
                order = math.log2(r1 / r2)
                rows.append(_row(f"{tag}/{j}/order", inputs, order, None, cfg.tol("residual_order"),
                                 passed=order >= cfg.tol("residual_order")))
                wrong = verify.lb_residual(chart, psi, 1.1 * E, pts, pc, step=0.01).max_abs
                ratio = wrong / max(r.max_abs, 1e-300)
                rows.append(_row(f"{tag}/{j}/wrong_energy", inputs, ratio, None, cfg.tol("wrong_e_factor"),
                                 passed=ratio >= cfg.tol("wrong_e_factor")))
    return rows


# kernels on the Darboux spaces: (space, a, b, system, E, q1, q2, options)
_GREEN_CASES = (
    (SpaceId.DI, 1.0, 0.0, SystemId.UV, 0.7 + 0.05j, (1.8, 0.3), (2.6, 1.1), {}),
    (SpaceId.DI, 1.0, 0.0, SystemId.UV, 0.7 + 0.05j, (1.8, 0.3), (2.6, 1.1), dict(v_mode="integral")),
    (SpaceId.DI, 1.0, 0.0, SystemId.ROTATED, 0.7 + 0.05j, (1.8, 0.3), (2.6, 1.1), dict(theta=0.3)),
    (SpaceId.DI, 1.0, 0.0, SystemId.ROTATED, 0.7 + 0.05j, (1.8, 0.3), (2.6, 1.1),
     dict(theta=0.3, half_space=False)),
    (SpaceId.DII, -1.0, 1.0, SystemId.UV, 0.6 + 0.01j, (1.0, 0.0), (1.5, 0.7), {}),
    (SpaceId.DII, -1.0, 1.0, SystemId.POLAR, 0.6 + 0.01j, (1.0, 0.2), (1.6, 0.7), {}),
    (SpaceId.DII, -1.0, 1.0, SystemId.PARABOLIC, 0.6 + 0.01j, (0.8, 1.0), (1.6, 0.9), {}),
    (SpaceId.DIII, 1.0, 1.0, SystemId.UV, -0.3 + 0.01j, (0.2, 0.3), (0.9, 1.4), {}),
    (SpaceId.DIII, 1.0, 1.0, SystemId.POLAR, -0.3 + 0.01j, (0.8, 0.3), (1.5, 1.4), {}),
    (SpaceId.DIII, 1.0, 1.0, SystemId.PARABOLIC, -0.3 + 0.01j, (0.8, 0.3), (1.5, 1.4), {}),
    (SpaceId.DIV, 3.0, 0.5, SystemId.HOROSPHERICAL, 0.6 + 0.01j, (1.0, 1.2), (1.6, 0.7), {}),
)
_PAIR_SHIFTS = ((0.0, 0.0), (0.1, -0.1), (-0.1, 0.15), (0.15, 0.05), (-0.05, -0.15))


def _green_1d_cases(pc: PhysicalConstants):
    E = 0.7 + 0.05j
    mp = MptParams(1.5, 4.5)
    lam = 0.6
    return (
        ("radial_oscillator", lambda x, y: rho_green(x, y, E, 1.0, lam, pc),
         lambda x: 0.5 * pc.mass * x * x + pc.hbar ** 2 * (lam * lam - 0.25) / (2 * pc.mass * x * x), 2.0),
        ("linear", lambda x, y: linear_green(x, y, E, 1.0, pc), lambda x: x, 1.0),
        ("linear_halfspace", lambda x, y: linear_green_halfspace(x, y, E, 1.0, 0.0, pc), lambda x: x, 1.0),
        ("oscillator", lambda x, y: ho_green(x, y, E, 1.0, pc), lambda x: 0.5 * pc.mass * x * x, 0.4),
        ("poeschl_teller", lambda x, y: mpt_green(x, y, E, mp, pc), lambda x: mp.potential(x, pc).real, 1.0),
    ), E


def green_rows(cfg: RunConfig) -> list[ReportRow]:
    rows = []
    pc = cfg.pc
    for sid, a, b, system, E, q1, q2, extra in _GREEN_CASES:
        if cfg.space is not None and sid != cfg.space:
            continue
        if cfg.system is not None and system != cfg.system:
            continue
        if cfg.space is not None:
            a = a if cfg.a is None else cfg.a
            b = b if cfg.b is None else cfg.b
        sp = SpaceParams(sid, a, b)
        opts = sol.GreenOptions(**extra)
        chart = Chart(sp, system, theta=opts.theta, half_space=opts.half_space)
        variant = "".join(f"/{k}={v}" for k, v in sorted(extra.items()))
        tag = f"green/{sid.value}/{system.value.lower()}{variant}"
        g12 = sol.green(sp, system, E, q1, q2, pc, opts)
        g21 = sol.green(sp, system, E, q2, q1, pc, opts)
        inputs = _inputs(a=a, b=b, E_re=E.real, E_im=E.imag, q1=q1, q2=q2)
        rows.append(_row(f"{tag}/symmetry", inputs, abs(g12 - g21) / abs(g12), 0.0, cfg.tol("green_symmetry")))
        for j, (s1, s2) in enumerate(_PAIR_SHIFTS):
            p = (q1[0] + s1, q1[1] + s2)
            g = sol.green(sp, system, E, p, q2, pc, opts)
            r = verify.lb_residual(chart, lambda q: sol.green(sp, system, E, q, q2, pc, opts), E, [p], pc,
                                   step=0.02)
            rel = r.max_abs / abs(g)
            rows.append(_row(f"{tag}/residual/{j}", _inputs(a=a, b=b, q1=p, q2=q2), rel, None,
                             cfg.tol("green_residual"), passed=rel < cfg.tol("green_residual")))
    if cfg.space is None:
        cases, E = _green_1d_cases(pc)
        for name, g, pot, x2 in cases:
            rows.append(_row(f"green/1d/{name}/symmetry", _inputs(x1=0.8, x2=x2),
                             abs(g(0.8, x2) - g(x2, 0.8)) / abs(g(0.8, x2)), 0.0, cfg.tol("green_symmetry")))
            for j, x in enumerate((0.3, 0.55, 1.6, 2.2, 2.7)):
                if abs(x - x2) < 0.1:
                    continue
                r = verify.ode_residual(lambda t: g(t, x2), pot, E, [x], pc)
                rows.append(_row(f"green/1d/{name}/residual/{j}", _inputs(x1=x, x2=x2), r.rel, None,
                                 cfg.tol("green_residual"), passed=r.rel < cfg.tol("green_residual")))
    if cfg.space in (None, SpaceId.DI):
        rows.extend(_dirichlet_rows(cfg))
    return rows


def _dirichlet_rows(cfg: RunConfig) -> list[ReportRow]:
    """D_I wall value of every mode of the subtracted kernel, relative to the unsubtracted one."""
    pc = cfg.pc
    a = 1.0 if cfg.space is None or cfg.a is None else cfg.a
    E = 0.7 + 0.05j
    hb2m = pc.hbar ** 2 / (2 * pc.mass)
    rows = []
    for i, u2 in enumerate((a + 0.8, a + 1.6)):
        for l in (0, 1, 5, 30):
            Ecal = -hb2m * l * l
            sub = linear_green_halfspace(a, u2, Ecal, -2 * E, a, pc)
            free = linear_green(a, u2, Ecal, -2 * E, pc, left="outgoing")
            rows.append(_row(f"green/DI/dirichlet/{i}/{l}", _inputs(a=a, u2=u2, l=float(l)), abs(sub) / abs(free),
                             0.0, cfg.tol("dirichlet")))
    return rows


def identity_rows(cfg: RunConfig) -> list[ReportRow]:
    ids = [cfg.identity_id] if cfg.identity_id else None
    rows = []
    counter: dict = {}
    for case in verify.identity_suite(ids):
        k = counter.get(case.identity_id, 0)
        counter[case.identity_id] = k + 1
        name = "identity_single" if case.tolerance == verify.SINGLE_TOL else "identity_truncated"
        rows.append(_row(f"identity/{case.identity_id.value}/{k}",
                         _inputs(**{n: float(v) for n, v in case.params}),
                         case.abs_diff, 0.0, cfg.tol(name)))
    return rows


def lattice_rows(cfg: RunConfig) -> list[ReportRow]:
    pc = cfg.pc
    eps = cfg.epsilon
    rows = []

    def energy_row(name, pot, slicing, exact, dirichlet=False, tol_name="lattice_rel"):
        e = lat.ground_energy(pot, slicing, pc, dirichlet=dirichlet)
        rows.append(_row(f"lattice/{name}", _inputs(eps=slicing.epsilon, n=slicing.n_points, **pot.params),
                         e, exact, cfg.tol(tol_name) * abs(exact)))

    harm = lat.Potential1D("HARMONIC", {"omega": 1.0})
    energy_row("harmonic", harm, lat.Slicing(-8.0, 8.0, 200, eps), lat.exact_ground_energy(harm, pc))
    morse = lat.Potential1D("MORSE", {"V0": 5.0, "alpha": 1.0})
    energy_row("morse", morse, lat.Slicing(-1.5, 6.0, 300, 0.01), lat.exact_ground_energy(morse, pc))
    mpt = lat.Potential1D("MPT", {"eta": 1.5, "nu": 4.5})
    energy_row("poeschl_teller", mpt, lat.Slicing(0.02, 8.0, 300, 0.01), lat.exact_ground_energy(mpt, pc))
    lin = lat.Potential1D("LINEAR", {"k": 1.0})
    energy_row("linear_dirichlet", lin, lat.Slicing(0.0, 10.0, 300, 0.01, 8000),
               lat.linear_halfspace_pole(1.0, 0.0, pc), dirichlet=True, tol_name="dirichlet_pole")

    slope = lat.trotter_order(harm, lat.Slicing(-8.0, 8.0, 400, 0.2), lat.exact_ground_energy(harm, pc),
                              (0.2, 0.1, 0.05, 0.025), pc)
    rows.append(_row("lattice/trotter_order", _inputs(eps=(0.2, 0.1, 0.05, 0.025)), slope, 2.0, cfg.tol("trotter")))

    n = 10 ** 6
    ratio = lat.fluctuation_identity_check(0.01, n, cfg.seed, pc)
    rows.append(_row("lattice/fluctuation", _inputs(eps=0.01, samples=float(n), seed=float(cfg.seed)), ratio, 1.0,
                     cfg.tol("fluctuation_se") * lat.FLUCTUATION_SE / math.sqrt(n)))

    quart = lat.Potential1D("QUARTIC_DI", {"E": -1.0, "a": 0.5})
    e1 = lat.ground_energy(quart, lat.Slicing(-4.0, 4.0, 64, 0.15), pc)
    e2 = lat.ground_energy(quart, lat.Slicing(-4.0, 4.0, 128, 0.15), pc)
    drift = abs(e2 - e1) / abs(e2)
    rows.append(_row("lattice/quartic_drift", _inputs(E=-1.0, a=0.5, n=(64.0, 128.0)), drift, 0.0,
                     cfg.tol("quartic_drift")))

    rows.extend(qpot_rows(cfg))
    return rows


def qpot_rows(cfg: RunConfig, n_points: int = 100) -> list[ReportRow]:
    rows = []
    pc = cfg.pc
    for sp in cfg.spaces():
        rng = np.random.default_rng(cfg.seed)
        for chart in all_charts(sp):
            if (sp.space_id, chart.system_id) not in CONFORMAL:
                continue
            pts = chart.sample(n_points, rng, margin=0.1)
            worst = max(abs(lat.quantum_potential_pf(chart, p, pc)) for p in pts)
            tag = f"qpot/{sp.space_id.value}/{chart.system_id.value.lower()}"
            rows.append(_row(tag, _inputs(a=sp.a, b=sp.b, points=float(len(pts))), worst, 0.0, cfg.tol("qpot")))
            # the same quantity from the general diagonal formula, by finite differences
            diag = []
            while len(diag) < n_points:
                try:
                    p = chart.sample(1, rng, margin=0.1)[0]
                    diag.append(abs(lat.diagonal_quantum_potential(chart, p, pc, step=5e-3)))
                except verify.StencilOutsideDomain:
                    continue
            rows.append(_row(f"{tag}/diagonal", _inputs(a=sp.a, b=sp.b, points=float(len(diag))),
                             max(diag), 0.0, cfg.tol("qpot")))
    return rows


_LIMIT_TOL = {"curvature": "limit_curvature", "legendre Q": "limit_green",
              verify.AsymptoticId.EQ3_41.value: "k_structure",
              "plane wave": "plane_wave"}


def limit_rows(cfg: RunConfig) -> list[ReportRow]:
    if cfg.space is not None:
        spaces = cfg.spaces()
    else:
        spaces = [SpaceParams(s, a, b) for s, a, b in LIMIT_POINTS]
    rows = []
    for sp in spaces:
        for r in verify.limit_suite(sp, cfg.pc, cfg.seed):
            tol = cfg.tol(_LIMIT_TOL.get(r.label, "limit_residual"))
            rows.append(_row(f"limits/{sp.space_id.value}/{_fmt(sp.a)}/{_fmt(sp.b)}/{r.label.replace(' ', '_')}",
                             _inputs(a=sp.a, b=sp.b, points=float(r.points_tested)), r.rel, 0.0, tol))
    return rows


SUITES = {
    "curvature": curvature_rows,
    "residual": residual_rows,
    "green": green_rows,
    "identity": identity_rows,
    "lattice": lattice_rows,
    "limits": limit_rows,
}


# ---------------------------------------------------------------------------
# SVG


def _svg_heatmap(path: Path, values: np.ndarray, title: str) -> None:
    n1, n2 = values.shape
    cell = 24
    lo, hi = float(np.nanmin(values)), float(np.nanmax(values))
    span = hi - lo if hi > lo else 1.0
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{n1 * cell}" height="{n2 * cell + 30}">',
             f'<text x="4" y="18" font-size="14">{title} [{_fmt(lo)}, {_fmt(hi)}]</text>']
    for i in range(n1):
        for j in range(n2):
            t = (values[i, j] - lo) / span
            r, bl = int(255 * t), int(255 * (1 - t))
            parts.append(f'<rect x="{i * cell}" y="{30 + (n2 - 1 - j) * cell}" width="{cell}" height="{cell}" '
                         f'fill="rgb({r},0,{bl})"/>')
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n", encoding="utf-8")


def _svg_loglog(path: Path, series: dict, title: str) -> None:
    w, h, pad = 480, 320, 40
    xs = [x for xs_, _ in series.values() for x in xs_]
    ys = [y for _, ys_ in series.values() for y in ys_ if y > 0]
    lx0, lx1 = math.log10(min(xs)), math.log10(max(xs))
    ly0, ly1 = math.log10(min(ys)), math.log10(max(ys))

    def px(x):
        return pad + (math.log10(x) - lx0) / max(lx1 - lx0, 1e-12) * (w - 2 * pad)

    def py(y):
        return h - pad - (math.log10(y) - ly0) / max(ly1 - ly0, 1e-12) * (h - 2 * pad)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">',
             f'<text x="4" y="18" font-size="14">{title}</text>']
    for k, (name, (xs_, ys_)) in enumerate(sorted(series.items())):
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs_, ys_) if y > 0)
        parts.append(f'<polyline fill="none" stroke="hsl({(37 * k) % 360},70%,40%)" points="{pts}"/>')
        parts.append(f'<text x="{w - pad}" y="{30 + 12 * k}" font-size="9" text-anchor="end">{name}</text>')
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n", encoding="utf-8")


def write_plots(cfg: RunConfig, out: Path) -> None:
    for sp in cfg.spaces():
        chart = Chart(sp, SystemId.UV)
        lo1, hi1, lo2, hi2 = chart.domain
        us = np.linspace(lo1 + 0.05 * (hi1 - lo1), hi1 - 0.05 * (hi1 - lo1), 16)
        vs = np.linspace(lo2 + 0.05 * (hi2 - lo2), hi2 - 0.05 * (hi2 - lo2), 16)
        vals = np.array([[gaussian_curvature_closed(sp, (u, v)) for v in vs] for u in us])
        _svg_heatmap(out / f"curvature_{sp.space_id.value}.svg", vals, f"K on {sp.space_id.value}")
    steps = (0.08, 0.04, 0.02, 0.01, 0.005)
    series = {}
    for sp in cfg.spaces():
        rng = np.random.default_rng(cfg.seed)
        for entry in sol.catalog():
            if entry.space_id != sp.space_id or entry.status != sol.Status.FULL:
                continue
            chart = Chart(sp, entry.system_id)
            pts = chart.sample(4, rng, margin=0.2)
            qn = sol.QuantumNumbers(**_wave_cases(sp, entry.system_id)[0])
            E = sol.energy(sp, entry.system_id, qn, cfg.pc)
            try:
                ys = _residual_steps(chart, lambda q: sol.wavefunction(sp, entry.system_id, qn, q, cfg.pc),
                                     E, pts, cfg.pc, steps)
            except (verify.StencilOutsideDomain, GeometryError):
                continue
            series[f"{sp.space_id.value} {entry.system_id.value.lower()}"] = (steps, ys)
    if series:
        _svg_loglog(out / "residual_vs_step.svg", series, "|(H-E)psi| against stencil step")


# ---------------------------------------------------------------------------
# Running


def _write(out: Path, name: str, rows) -> None:
    (out / f"{name}.csv").write_text(rows_to_csv(rows), encoding="utf-8")


def _failed(rows) -> int:
    return sum(1 for r in rows if r.passed is False)


def run(cfg: RunConfig) -> int:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    if cfg.command != "report":
        rows = SUITES[cfg.command](cfg)
        _write(out, cfg.command, rows)
        bad = _failed(rows)
        print(f"{cfg.command}: {len(rows)} rows, {bad} failed -> {out / (cfg.command + '.csv')}")
        return 1 if bad else 0
    summary = []
    total_bad = 0
    for name, suite in SUITES.items():
        rows = suite(cfg)
        _write(out, name, rows)
        bad = _failed(rows)
        skipped = sum(1 for r in rows if r.passed is None)
        total_bad += bad
        summary.append((name, len(rows), len(rows) - bad - skipped, bad, skipped, "true" if not bad else "false"))
        print(f"{name}: {len(rows)} rows, {bad} failed, {skipped} skipped")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("command", "rows", "passed", "failed", "skipped", "pass"))
    w.writerows(summary)
    (out / "summary.csv").write_text(buf.getvalue(), encoding="utf-8")
    if cfg.svg:
        write_plots(cfg, out)
    return 1 if total_bad else 0


_NUMERIC_ERRORS = (SpecialFunctionError, sol.SolutionError, KernelError, lat.LatticeError, verify.VerifyError,
                   ArithmeticError)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except (ParseError, ConfigError) as exc:
        print(f"darboux: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"darboux: cannot read configuration: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except verify.NotALimitPoint as exc:
        print(f"darboux: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except GeometryError as exc:
        print(f"darboux: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except _NUMERIC_ERRORS as exc:
        print(f"darboux: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
