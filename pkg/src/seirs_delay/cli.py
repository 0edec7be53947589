"""Command-line front end.

Usage:

    seirs-delay <command> --config <path> [--out <path>] [--seed <u64>] [--reps <n>]

with command one of equilibria, simulate, simulate-sde, stability,
delay-margin, concentration, lyapunov. The config is a flat key/value
document with dotted sections::

    # transmission/recovery/immunity-loss rates, latency scale and delay
    params.beta = 0.4
    params.mu = 0.2
    params.gamma = 0.1
    params.k_r = 2.0
    params.r = 0.5
    params.epsilon = 0.0

    init.e0 = 0.05        # constant exposed history on [-r, 0]
    init.s0 = 0.9
    init.i0 = 0.05
    init.r0 = 0.0

    run.horizon = 100.0
    run.step = 0.01       # optional; default min(0.01, r/50) made to divide r
    run.trajectory = out.csv   # optional CSV destination

    ensemble.n_rep = 200
    ensemble.seed = 0
    ensemble.rho_grid = 0.01, 0.02, 0.05   # optional

Reports are deterministic "key = value" lines (floats with 17 significant
digits) so byte-level golden comparisons work. Exit codes: 0 ok, 2 parse
error, 3 validation error, 4 numerical failure. SEIRS_DELAY_LOG selects
diagnostic verbosity (quiet, info, debug).
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .delay_margin import (NoCrossingError, deg2_crossing, deg2_instability_possible,
                           deg3_abc, deg3_crossing, deg3_instability_possible,
                           free_disease_margin)
from .det_integrator import (IntegrationError, Trajectory, default_step,
                             integrate_dde, integrate_ode)
from .equilibria import equilibrium_residual, equilibrium_set
from .linear_stability import (char_poly_delay_coexistence, char_poly_delay_free,
                               free_disease_eigenvalues_closed_form,
                               jacobian_free_disease, matrix_eigenvalues,
                               routh_hurwitz_coexistence)
from .model_core import (InitialCondition, Params, ValidationError,
                         make_initial_condition, validate_params)
from .sde_simulator import (InsufficientExceedances, Seed, concentration_check,
                            lyapunov_certificate, lyapunov_condition,
                            simulate_sde)

__all__ = [
    "ParseError",
    "RunConfig",
    "Report",
    "parse_config",
    "serialize_config",
    "run",
    "main",
    "EXIT_OK",
    "EXIT_PARSE",
    "EXIT_VALIDATION",
    "EXIT_NUMERICAL",
]

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4

COMMANDS = ("equilibria", "simulate", "simulate-sde", "stability",
            "delay-margin", "concentration", "lyapunov")


class ParseError(ValueError):
    """The config document is malformed; the message carries the line."""


@dataclass(frozen=True)
class RunConfig:
    """Everything one command invocation needs.

    step = None means "pick the default": the largest step <= min(0.01, r/50)
    that divides the delay exactly. Explicit steps are checked for
    divisibility at parse time. warnings carries unknown-key notices and is
    excluded from equality so round-trips compare clean.
    """

    params: Params
    initial: InitialCondition
    horizon: float = 100.0
    step: Optional[float] = None
    trajectory: Optional[str] = None
    n_rep: int = 200
    seed: int = 0
    rho_grid: Optional[tuple[float, ...]] = None
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def resolved_step(self) -> float:
        return self.step if self.step is not None else default_step(self.params.r)


_PARAM_KEYS = {
    "params.beta": None,
    "params.mu": None,
    "params.gamma": None,
    "params.k_r": None,
    "params.r": 0.0,
    "params.epsilon": 0.0,
}
_INIT_DEFAULTS = {"init.e0": 0.05, "init.s0": 0.9, "init.i0": 0.05,
                  "init.r0": 0.0}
_KNOWN_KEYS = (set(_PARAM_KEYS) | set(_INIT_DEFAULTS)
               | {"run.horizon", "run.step", "run.trajectory",
                  "ensemble.n_rep", "ensemble.seed", "ensemble.rho_grid"})


def _scan(text: str) -> dict[str, tuple[str, int]]:
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise ParseError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ParseError(f"line {lineno}: empty key")
        if not value:
            raise ParseError(f"line {lineno}: empty value for key {key!r}")
        if key in entries:
            raise ParseError(f"line {lineno}: duplicate key {key!r} "
                             f"(first set on line {entries[key][1]})")
        entries[key] = (value, lineno)
    return entries


def _as_float(entries, key: str) -> Optional[float]:
    if key not in entries:
        return None
    value, lineno = entries[key]
    try:
        return float(value)
    except ValueError:
        raise ParseError(f"line {lineno}: {key}: expected a number, got {value!r}") from None


def _as_int(entries, key: str) -> Optional[int]:
    if key not in entries:
        return None
    value, lineno = entries[key]
    try:
        return int(value)
    except ValueError:
        raise ParseError(f"line {lineno}: {key}: expected an integer, got {value!r}") from None


def _as_float_list(entries, key: str) -> Optional[tuple[float, ...]]:
    if key not in entries:
        return None
    value, lineno = entries[key]
    out = []
    for part in value.split(","):
        part = part.strip()
        if not part:
            raise ParseError(f"line {lineno}: {key}: empty list entry")
        try:
            out.append(float(part))
        except ValueError:
            raise ParseError(f"line {lineno}: {key}: expected a number, got {part!r}") from None
    return tuple(out)


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a config document.

    Unknown keys become warnings on the returned RunConfig; missing required
    keys (the four core rates) and constraint violations raise
    ValidationError, malformed lines and values raise ParseError.
    """
    entries = _scan(text)
    warnings = tuple(f"unknown key {k!r} ignored (line {entries[k][1]})"
                     for k in entries if k not in _KNOWN_KEYS)
    for msg in warnings:
        log.info("%s", msg)

    values = {}
    for key, default in _PARAM_KEYS.items():
        v = _as_float(entries, key)
        if v is None:
            if default is None:
                raise ValidationError(f"missing required key {key!r}")
            v = default
        values[key.split(".", 1)[1]] = v
    params = Params(beta=values["beta"], mu=values["mu"], gamma=values["gamma"],
                    k_r=values["k_r"], r=values["r"], epsilon=values["epsilon"])
    rep = validate_params(params)
    if not rep.ok:
        raise ValidationError(rep.message())

    init_vals = {key.split(".", 1)[1]: (_as_float(entries, key) if key in entries
                                        else default)
                 for key, default in _INIT_DEFAULTS.items()}
    initial = make_initial_condition(**init_vals)

    horizon = _as_float(entries, "run.horizon")
    horizon = 100.0 if horizon is None else horizon
    if not (math.isfinite(horizon) and horizon > 0.0):
        raise ValidationError(f"run.horizon: must be a positive finite time, got {horizon!r}")
    step = _as_float(entries, "run.step")
    if step is not None:
        if not (math.isfinite(step) and step > 0.0):
            raise ValidationError(f"run.step: must be a positive finite step, got {step!r}")
        _check_divisibility(params, horizon, step)
    trajectory = entries["run.trajectory"][0] if "run.trajectory" in entries else None

    n_rep = _as_int(entries, "ensemble.n_rep")
    n_rep = 200 if n_rep is None else n_rep
    if n_rep < 1:
        raise ValidationError(f"ensemble.n_rep: must be >= 1, got {n_rep!r}")
    seed = _as_int(entries, "ensemble.seed")
    seed = 0 if seed is None else seed
    if not 0 <= seed < 2 ** 64:
        raise ValidationError(f"ensemble.seed: must fit in 64 unsigned bits, got {seed!r}")
    rho_grid = _as_float_list(entries, "ensemble.rho_grid")
    if rho_grid is not None:
        if any(not (math.isfinite(v) and v > 0.0) for v in rho_grid):
            raise ValidationError("ensemble.rho_grid: entries must be positive and finite")
        rho_grid = tuple(sorted(rho_grid))

    return RunConfig(params=params, initial=initial, horizon=horizon,
                     step=step, trajectory=trajectory, n_rep=n_rep, seed=seed,
                     rho_grid=rho_grid, warnings=warnings)


def _check_divisibility(params: Params, horizon: float, step: float) -> None:
    if params.r > 0.0:
        k = params.r / step
        if abs(k - round(k)) > 1e-12 * max(1.0, abs(k)) or round(k) < 1:
            raise ValidationError(
                f"run.step: {step!r} does not divide the delay r={params.r!r}")
        if horizon < params.r:
            raise ValidationError(
                f"run.horizon: {horizon!r} must be at least the delay r={params.r!r}")
    else:
        k = horizon / step
        if abs(k - round(k)) > 1e-12 * max(1.0, abs(k)) or round(k) < 1:
            raise ValidationError(
                f"run.step: {step!r} does not divide run.horizon={horizon!r}")


def _fnum(x: float) -> str:
    return repr(float(x))


def serialize_config(cfg: RunConfig) -> str:
    """Canonical config document; parse_config(serialize_config(c)) == c."""
    p, ic = cfg.params, cfg.initial
    lines = [
        f"params.beta = {_fnum(p.beta)}",
        f"params.mu = {_fnum(p.mu)}",
        f"params.gamma = {_fnum(p.gamma)}",
        f"params.k_r = {_fnum(p.k_r)}",
        f"params.r = {_fnum(p.r)}",
        f"params.epsilon = {_fnum(p.epsilon)}",
        f"init.e0 = {_fnum(ic.e0)}",
        f"init.s0 = {_fnum(ic.s0)}",
        f"init.i0 = {_fnum(ic.i0)}",
        f"init.r0 = {_fnum(ic.r0)}",
        f"run.horizon = {_fnum(cfg.horizon)}",
    ]
    if cfg.step is not None:
        lines.append(f"run.step = {_fnum(cfg.step)}")
    if cfg.trajectory is not None:
        lines.append(f"run.trajectory = {cfg.trajectory}")
    lines.append(f"ensemble.n_rep = {cfg.n_rep}")
    lines.append(f"ensemble.seed = {cfg.seed}")
    if cfg.rho_grid is not None:
        lines.append("ensemble.rho_grid = " + ", ".join(_fnum(v) for v in cfg.rho_grid))
    return "\n".join(lines) + "\n"


def _fmt(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


class Report:
    """Ordered key/value lines with deterministic rendering."""

    def __init__(self, command: str):
        self._items: list[tuple[str, object]] = [("command", command)]
        self._warnings: list[str] = []

    def add(self, key: str, value) -> None:
        self._items.append((key, value))

    def warn(self, message: str) -> None:
        self._warnings.append(message)

    def get(self, key: str):
        for k, v in self._items:
            if k == key:
                return v
        raise KeyError(key)

    def render(self) -> str:
        lines = [f"{k} = {_fmt(v)}" for k, v in self._items]
        lines.extend(f"warning.{j} = {w}" for j, w in enumerate(self._warnings))
        return "\n".join(lines) + "\n"


def _echo(rep: Report, cfg: RunConfig, with_run: bool = False,
          with_ensemble: bool = False) -> None:
    p, ic = cfg.params, cfg.initial
    for name in ("beta", "mu", "gamma", "k_r", "r", "epsilon"):
        rep.add(f"params.{name}", getattr(p, name))
    for name in ("e0", "s0", "i0", "r0"):
        rep.add(f"init.{name}", getattr(ic, name))
    if with_run:
        rep.add("run.horizon", cfg.horizon)
        rep.add("run.step", cfg.resolved_step())
    if with_ensemble:
        rep.add("ensemble.n_rep", cfg.n_rep)
        rep.add("ensemble.seed", cfg.seed)
    for w in cfg.warnings:
        rep.warn(w)


def _write_trajectory(path: str, traj: Trajectory) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("t,S,E,I,R\n")
        for t, row in zip(traj.times, traj.states):
            fh.write(f"{float(t)!r},{float(row[0])!r},{float(row[1])!r},"
                     f"{float(row[2])!r},{float(row[3])!r}\n")


def _add_state(rep: Report, prefix: str, values) -> None:
    for name, v in zip(("s", "e", "i", "rcv"), values):
        rep.add(f"{prefix}.{name}", float(v))


def _cmd_equilibria(cfg: RunConfig) -> Report:
    rep = Report("equilibria")
    _echo(rep, cfg)
    eqs = equilibrium_set(cfg.params)
    rep.add("r0", eqs.r0)
    _add_state(rep, "x_free", (eqs.x_free.s, eqs.x_free.e, eqs.x_free.i,
                               eqs.x_free.rcv))
    rep.add("x_free.residual", equilibrium_residual(cfg.params, eqs.x_free))
    rep.add("x_star.present", eqs.x_star is not None)
    if eqs.x_star is not None:
        _add_state(rep, "x_star", (eqs.x_star.s, eqs.x_star.e, eqs.x_star.i,
                                   eqs.x_star.rcv))
        rep.add("x_star.residual", equilibrium_residual(cfg.params, eqs.x_star))
    return rep


def _simulate_common(rep: Report, cfg: RunConfig, traj: Trajectory) -> None:
    rep.add("nodes", len(traj))
    _add_state(rep, "final", traj.states[-1])
    rep.add("max_sum_defect", traj.max_sum_defect())
    rep.add("min_component", traj.min_component())
    if cfg.trajectory is not None:
        _write_trajectory(cfg.trajectory, traj)
    rep.add("trajectory_file", cfg.trajectory)


def _cmd_simulate(cfg: RunConfig) -> Report:
    rep = Report("simulate")
    _echo(rep, cfg, with_run=True)
    h = cfg.resolved_step()
    if cfg.params.r > 0.0:
        traj = integrate_dde(cfg.params, cfg.initial, cfg.horizon, h)
    else:
        traj = integrate_ode(cfg.params, cfg.initial.state0(), cfg.horizon, h)
    _simulate_common(rep, cfg, traj)
    return rep


def _cmd_simulate_sde(cfg: RunConfig) -> Report:
    rep = Report("simulate-sde")
    _echo(rep, cfg, with_run=True, with_ensemble=True)
    h = cfg.resolved_step()
    traj = simulate_sde(cfg.params, cfg.initial, cfg.horizon, h,
                        Seed(cfg.seed), replica=0)
    _simulate_common(rep, cfg, traj)
    return rep


def _cmd_stability(cfg: RunConfig) -> Report:
    rep = Report("stability")
    _echo(rep, cfg)
    p = cfg.params
    lam = free_disease_eigenvalues_closed_form(p)
    for j, v in enumerate(lam, 1):
        rep.add(f"free.eig{j}", v)
    numeric = matrix_eigenvalues(jacobian_free_disease(p))
    gap = max(abs(a - b) for a, b in
              zip(sorted(lam), sorted(v.real for v in numeric)))
    rep.add("free.eig_crosscheck_gap", gap)
    rep.add("free.stable", max(lam) < 0.0)
    rep.add("coexistence.present", p.beta > p.mu)
    if p.beta > p.mu:
        verdict = routh_hurwitz_coexistence(p)
        for j, c in enumerate(verdict.criteria, 1):
            rep.add(f"coexistence.criterion{j}.name", c.name)
            rep.add(f"coexistence.criterion{j}.value", c.value)
            rep.add(f"coexistence.criterion{j}.satisfied", c.satisfied)
        rep.add("coexistence.verdict", verdict.verdict)
    return rep


def _cmd_delay_margin(cfg: RunConfig) -> Report:
    rep = Report("delay-margin")
    _echo(rep, cfg)
    p = cfg.params
    if p.beta < p.mu:
        q = char_poly_delay_free(p)
        rep.add("branch", "free-disease (degree 2)")
        for j, v in enumerate(q.a):
            rep.add(f"qp.a{j}", v)
        for j, v in enumerate(q.b):
            rep.add(f"qp.b{j}", v)
        rep.add("instability_possible", deg2_instability_possible(q))
        cr = deg2_crossing(q)
        rep.add("omega", cr.omega)
        rep.add("theta", cr.theta)
        rep.add("r_star", cr.r_star)
        rep.add("residual", cr.residual)
        margin = free_disease_margin(p)
        rep.add("margin", margin)
        rep.add("half_pi_k_r", 0.5 * math.pi * p.k_r)
        rep.add("max_admissible_delay", p.k_r / math.e)
        rep.add("verdict", "stable for all admissible delays")
    elif p.beta > p.mu:
        q = char_poly_delay_coexistence(p)
        rep.add("branch", "coexistence (degree 3)")
        for j, v in enumerate(q.a):
            rep.add(f"qp.a{j}", v)
        for j, v in enumerate(q.b):
            rep.add(f"qp.b{j}", v)
        abc = deg3_abc(q)
        rep.add("abc.A", abc.A)
        rep.add("abc.B", abc.B)
        rep.add("abc.C", abc.C)
        rep.add("abc.delta", abc.delta)
        rep.add("instability_possible", deg3_instability_possible(q))
        cr = deg3_crossing(q)
        rep.add("crossing.found", cr is not None)
        if cr is None:
            rep.add("verdict", "inconclusive (discriminant >= 0)")
        else:
            rep.add("omega", cr.omega)
            rep.add("theta", cr.theta)
            rep.add("r_star", cr.r_star)
            rep.add("residual", cr.residual)
            if p.r < cr.r_star:
                rep.add("verdict", "stable below critical delay")
            else:
                rep.add("verdict", "delay at or beyond critical delay")
    else:
        raise ValidationError("delay-margin analysis is undefined on the "
                              "beta = mu boundary")
    return rep


def _cmd_concentration(cfg: RunConfig) -> Report:
    rep = Report("concentration")
    _echo(rep, cfg, with_run=True, with_ensemble=True)
    p = cfg.params
    if cfg.rho_grid is not None:
        grid = cfg.rho_grid
    else:
        # sup deviations scale roughly linearly in epsilon; cover the bulk
        # and the tail of that range
        grid = tuple(p.epsilon * f for f in (0.5, 0.75, 1.0, 1.5, 2.0, 3.0)) \
            if p.epsilon > 0.0 else (0.01,)
    rep.add("rho_grid", ", ".join(_fmt(v) for v in grid))
    out = concentration_check(p, cfg.initial, cfg.horizon, cfg.resolved_step(),
                              cfg.n_rep, grid, Seed(cfg.seed))
    rep.add("degenerate", out.degenerate)
    for j, rho in enumerate(out.rho_grid):
        rep.add(f"tail.{j}.rho", rho)
        rep.add(f"tail.{j}.p", out.tail[j])
        rep.add(f"tail.{j}.count", out.exceed_counts[j])
    rep.add("c_hat", out.c_hat)
    rep.add("n_fit_points", out.n_fit_points)
    rep.add("eps_transfer", out.eps_transfer)
    for j, rho in enumerate(out.rho_grid if not out.degenerate else ()):
        rep.add(f"transfer.{j}.p", out.transfer_tail[j])
        rep.add(f"transfer.{j}.bound", out.transfer_bound[j])
    rep.add("transfer_ok", out.transfer_ok)
    rep.add("safety", out.safety)
    return rep


def _cmd_lyapunov(cfg: RunConfig) -> Report:
    rep = Report("lyapunov")
    _echo(rep, cfg)
    p = cfg.params
    ok = lyapunov_condition(p)
    rep.add("condition", ok)
    rep.add("condition_value", p.mu - p.beta - p.epsilon ** 2 / (2.0 * p.mu * p.k_r))
    rep.add("certificate.present", ok)
    if ok:
        cert = lyapunov_certificate(p)
        for name in ("v2", "v3", "lambda1_sq", "lambda3_sq", "alpha0",
                     "ineq1", "ineq2", "ineq3", "lv_bound", "holds"):
            rep.add(f"certificate.{name}", getattr(cert, name))
    return rep


_DISPATCH = {
    "equilibria": _cmd_equilibria,
    "simulate": _cmd_simulate,
    "simulate-sde": _cmd_simulate_sde,
    "stability": _cmd_stability,
    "delay-margin": _cmd_delay_margin,
    "concentration": _cmd_concentration,
    "lyapunov": _cmd_lyapunov,
}


def run(command: str, cfg: RunConfig) -> Report:
    """Execute one command against a validated RunConfig."""
    if command not in _DISPATCH:
        raise ValidationError(f"unknown command {command!r}; "
                              f"expected one of {', '.join(COMMANDS)}")
    return _DISPATCH[command](cfg)


def _setup_logging() -> None:
    level_name = os.environ.get("SEIRS_DELAY_LOG", "quiet").strip().lower()
    levels = {"quiet": logging.WARNING, "info": logging.INFO,
              "debug": logging.DEBUG}
    level = levels.get(level_name)
    if level is None:
        level = logging.WARNING
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s %(name)s: %(message)s")
    if level_name not in levels:
        log.warning("SEIRS_DELAY_LOG=%r not recognized; using quiet", level_name)


def main(argv: Optional[Sequence[str]] = None) -> int:
    _setup_logging()
    ap = argparse.ArgumentParser(
        prog="seirs-delay",
        description="Simulation and stability analysis of a latency-delayed "
                    "SEIRS model")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="config document path")
    ap.add_argument("--out", help="write the report here instead of stdout")
    ap.add_argument("--seed", type=int, help="override ensemble.seed")
    ap.add_argument("--reps", type=int, help="override ensemble.n_rep")
    ap.add_argument("--version", action="version", version=__version__)
    args = ap.parse_args(argv)

    try:
        try:
            with open(args.config, "r") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read config {args.config!r}: {exc}") from exc
        cfg = parse_config(text)
        if args.seed is not None:
            if not 0 <= args.seed < 2 ** 64:
                raise ValidationError(
                    f"--seed must fit in 64 unsigned bits, got {args.seed!r}")
            cfg = dataclasses.replace(cfg, seed=args.seed)
        if args.reps is not None:
            if args.reps < 1:
                raise ValidationError(f"--reps must be >= 1, got {args.reps!r}")
            cfg = dataclasses.replace(cfg, n_rep=args.reps)
        report = run(args.command, cfg)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (IntegrationError, NoCrossingError, InsufficientExceedances,
            ArithmeticError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    text = report.render()
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK
