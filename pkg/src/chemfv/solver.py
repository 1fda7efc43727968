"""Positivity-aware explicit finite-volume solver for the coupled system.

    u_t = div( (u+1)^(m-1) grad u - (u+1)^alpha chi(v) grad v ) + k u - mu u^2
    v_t = lap v - u v

on a zero-flux rectangular grid.  Time stepping is forward Euler with an
adaptive step bounded by diffusive, advective and reaction limits; the
advective flux upwinds its transported factor by the drift sign.  Fluxes are
assembled face-wise with zero boundary faces, so with k = mu = 0 the total
mass of u is conserved to round-off regardless of the nonlinearity.

Loss of boundedness is detected numerically: a run ends with
``blowup_detected`` when sup u exceeds a threshold or the stable step
underflows, and with ``corrupted`` when the update violates positivity or the
signal maximum principle beyond round-off tolerances.  Negative values of u
are never clipped; a scheme defect must surface as ``corrupted`` rather than
masquerade as physics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .certificates import ModelParams, chi_prototype
from .errors import ChemfvError, CorruptionError, DomainError
from .grid import Grid, ScalarField, _div_axis, _lr, _with_zero_boundary, laplacian

# Tolerances for the scheme-level invariants: u may dip to -1e-12 from
# round-off; v may exceed its initial sup by 1e-10 relative.  Anything worse
# is a corrupted state.
U_NEG_TOL = 1e-12
V_SUP_REL_TOL = 1e-10

ADVANCED = "advanced"
BLOWUP = "blowup_detected"
DT_UNDERFLOW = "dt_underflow"
CORRUPTED = "corrupted"
COMPLETED = "completed"


@dataclass
class SolverConfig:
    t_end: float
    safety: float = 0.4
    dt_min: float = 1e-12
    u_max: float = 1e6
    max_steps: int = 50_000_000
    output_every_steps: int | None = None
    output_every_time: float | None = None

    def __post_init__(self):
        if not self.t_end > 0.0:
            raise DomainError("t_end must be positive")
        if not 0.0 < self.safety <= 1.0:
            raise DomainError("safety must lie in (0, 1]")
        if not self.dt_min > 0.0:
            raise DomainError("dt_min must be positive")
        if not self.u_max > 0.0:
            raise DomainError("u_max must be positive")
        if self.output_every_steps is not None and self.output_every_steps < 1:
            raise DomainError("output_every_steps must be >= 1")
        if self.output_every_time is not None and not self.output_every_time > 0.0:
            raise DomainError("output_every_time must be positive")


@dataclass
class SimState:
    t: float
    u: ScalarField
    v: ScalarField


@dataclass
class StepOutcome:
    status: str
    dt_used: float
    sup_u: float = math.nan


@dataclass
class RunResult:
    status: str
    state: SimState
    steps: int
    sup_u_max: float


def _diffusive_interior(u: np.ndarray, grid: Grid, m: float, axis: int) -> np.ndarray:
    """Interior-face diffusive flux D_face (u_R - u_L)/h, arithmetic-mean D."""
    h = grid.spacing[axis]
    du = np.diff(u, axis=axis) / h
    if m == 1.0:
        return du
    coef = (u + 1.0) ** (m - 1.0)
    left, right = _lr(coef, axis)
    return 0.5 * (left + right) * du


def _drift_interior(u: np.ndarray, v: np.ndarray, grid: Grid, params: ModelParams,
                    axis: int) -> tuple[np.ndarray, np.ndarray]:
    """Interior-face chemotactic flux and its CFL speed along one axis.

    The drift w = chi(v_face) (v_R - v_L)/h uses the arithmetic face mean of
    v; the transported factor (u+1)^alpha comes from the upwind cell (the one
    the drift points away from).  The speed bound is |w| (u+1)^max(alpha, 0)
    maximized over the two adjacent cells.
    """
    h = grid.spacing[axis]
    v_l, v_r = _lr(v, axis)
    w = chi_prototype(0.5 * (v_l + v_r), params.chi0, params.a) * ((v_r - v_l) / h)
    if params.alpha == 0.0:
        return w, np.abs(w)
    trans = (u + 1.0) ** params.alpha
    t_l, t_r = _lr(trans, axis)
    flux = np.where(w > 0.0, t_l, t_r) * w
    if params.alpha > 0.0:
        speed = np.abs(w) * np.maximum(t_l, t_r)
    else:
        speed = np.abs(w)
    return flux, speed


def diffusive_flux_u(u: ScalarField, m: float) -> tuple[np.ndarray, ...]:
    """Per-axis face fluxes of (u+1)^(m-1) grad u; boundary faces are 0."""
    if np.any(u.values < 0.0):
        raise DomainError("diffusive_flux_u requires u >= 0")
    if not np.isfinite(u.values).all():
        raise CorruptionError("non-finite u")
    return tuple(
        _with_zero_boundary(_diffusive_interior(u.values, u.grid, m, axis), axis)
        for axis in range(u.grid.dim)
    )


def chemotactic_flux(u: ScalarField, v: ScalarField, params: ModelParams) -> tuple[np.ndarray, ...]:
    """Per-axis face fluxes of (u+1)^alpha chi(v) grad v; boundary faces are 0.

    This flux enters the u update with a minus sign relative to the diffusive
    one, matching the divergence form of the equation.
    """
    if np.any(u.values < 0.0) or np.any(v.values < 0.0):
        raise DomainError("chemotactic_flux requires u >= 0 and v >= 0")
    if not (np.isfinite(u.values).all() and np.isfinite(v.values).all()):
        raise CorruptionError("non-finite input fields")
    return tuple(
        _with_zero_boundary(
            _drift_interior(u.values, v.values, u.grid, params, axis)[0], axis
        )
        for axis in range(u.grid.dim)
    )


def reaction_u(u: ScalarField, k: float, mu: float) -> ScalarField:
    """Pointwise logistic source k u - mu u^2."""
    return ScalarField(u.grid, k * u.values - mu * u.values**2)


def rhs_v(u: ScalarField, v: ScalarField) -> ScalarField:
    """Signal right-hand side lap v - u v."""
    return ScalarField(v.grid, laplacian(v).values - u.values * v.values)


def _dt_candidates(u: np.ndarray, v: np.ndarray, grid: Grid, params: ModelParams,
                   speeds_max: float | None = None) -> tuple[float, float, float]:
    """Diffusive, advective and reaction step-size candidates (unscaled).

    The diffusive limit covers both equations, so the coefficient is
    max(1, max (u+1)^(m-1)): the signal always diffuses with unit diffusivity.
    The reaction limit includes sup u (the signal consumption rate) on top of
    the logistic rates, keeping the v update a convex combination.
    """
    sup_u = float(u.max())
    sup_v = float(v.max())
    d_max = 1.0 if params.m == 1.0 else float(((u + 1.0) ** (params.m - 1.0)).max())
    d_eff = max(1.0, d_max)
    inv_h2 = sum(1.0 / h**2 for h in grid.spacing)
    dt_diff = 1.0 / (2.0 * d_eff * inv_h2)
    if speeds_max is None:
        speeds_max = 0.0
        for axis in range(grid.dim):
            _, speed = _drift_interior(u, v, grid, params, axis)
            if speed.size:
                speeds_max = max(speeds_max, float(speed.max()))
    if speeds_max > 0.0:
        dt_adv = min(grid.spacing) / (2.0 * grid.dim * speeds_max)
    else:
        dt_adv = math.inf
    rate = abs(params.k) + 2.0 * params.mu * sup_u + sup_u + sup_v + 1.0
    dt_react = 1.0 / rate
    return dt_diff, dt_adv, dt_react


def stable_dt(state: SimState, params: ModelParams, config: SolverConfig) -> float:
    """Largest stable step at the current state, already scaled by ``safety``."""
    u, v = state.u.values, state.v.values
    if not (np.isfinite(u).all() and np.isfinite(v).all()):
        raise CorruptionError("non-finite state")
    dt_diff, dt_adv, dt_react = _dt_candidates(u, v, state.u.grid, params)
    return config.safety * min(dt_diff, dt_adv, dt_react)


def _zero_boundary_div(interior_faces: np.ndarray, axis: int, h: float,
                       out: np.ndarray | None = None) -> np.ndarray:
    """Divergence contribution of interior-face fluxes with zero boundary faces.

    Equivalent to ``_div_axis(_with_zero_boundary(F, axis), axis, h)`` but
    assembled with slice arithmetic (np.pad is slow on small arrays).
    """
    nd = interior_faces.ndim
    shape = list(interior_faces.shape)
    shape[axis] += 1
    div = np.zeros(shape) if out is None else out
    first = [slice(None)] * nd
    last = [slice(None)] * nd
    first[axis] = slice(0, -1)
    last[axis] = slice(1, None)
    scaled = interior_faces / h
    div[tuple(first)] += scaled   # each cell's right face
    div[tuple(last)] -= scaled    # each cell's left face
    return div


def step(state: SimState, params: ModelParams, config: SolverConfig, *,
         v0_sup: float, t_target: float | None = None) -> tuple[SimState, StepOutcome]:
    """Advance one forward-Euler step.

    The step size is the stability bound, clipped so the run lands exactly on
    ``t_target`` (end time or next output time) when one is given.  Underflow
    is judged on the unclipped stability bound.  The returned state is a new
    snapshot; the input is never mutated.
    """
    grid = state.u.grid
    u = state.u.values
    v = state.v.values
    if not (np.isfinite(u).all() and np.isfinite(v).all()):
        return state, StepOutcome(CORRUPTED, 0.0, float(np.max(u)))

    h = grid.spacing
    chi0, a_sat, alpha, m = params.chi0, params.a, params.alpha, params.m
    fluxes = []
    v_grads = []
    speeds_max = 0.0
    trans = None if alpha == 0.0 else (u + 1.0) ** alpha
    diff_coef = None if m == 1.0 else (u + 1.0) ** (m - 1.0)
    for axis in range(grid.dim):
        du = np.diff(u, axis=axis) / h[axis]
        dv = np.diff(v, axis=axis) / h[axis]
        if diff_coef is None:
            f_u = du
        else:
            c_l, c_r = _lr(diff_coef, axis)
            f_u = 0.5 * (c_l + c_r) * du
        if chi0 != 0.0:
            v_l, v_r = _lr(v, axis)
            w = (chi0 / (1.0 + a_sat * 0.5 * (v_l + v_r)) ** 2) * dv
            if trans is None:
                f_chem = w
                speed = np.abs(w)
            else:
                t_l, t_r = _lr(trans, axis)
                f_chem = np.where(w > 0.0, t_l, t_r) * w
                speed = np.abs(w) * np.maximum(t_l, t_r) if alpha > 0.0 else np.abs(w)
            if speed.size:
                speeds_max = max(speeds_max, float(speed.max()))
            f_u = f_u - f_chem
        fluxes.append(f_u)
        v_grads.append(dv)

    sup_u = float(u.max())
    sup_v = float(v.max())
    d_eff = 1.0 if diff_coef is None else max(1.0, float(diff_coef.max()))
    dt_diff = 1.0 / (2.0 * d_eff * sum(1.0 / hx**2 for hx in h))
    dt_adv = min(h) / (2.0 * grid.dim * speeds_max) if speeds_max > 0.0 else math.inf
    dt_react = 1.0 / (abs(params.k) + 2.0 * params.mu * sup_u + sup_u + sup_v + 1.0)
    dt_stable = config.safety * min(dt_diff, dt_adv, dt_react)
    if dt_stable < config.dt_min:
        return state, StepOutcome(DT_UNDERFLOW, dt_stable, sup_u)

    dt = dt_stable
    t_new = state.t + dt
    if t_target is not None and t_new >= t_target:
        dt = t_target - state.t
        t_new = t_target

    du_dt = _zero_boundary_div(fluxes[0], 0, h[0])
    lap_v = _zero_boundary_div(v_grads[0], 0, h[0])
    for axis in range(1, grid.dim):
        _zero_boundary_div(fluxes[axis], axis, h[axis], out=du_dt)
        _zero_boundary_div(v_grads[axis], axis, h[axis], out=lap_v)
    du_dt += params.k * u - params.mu * u * u
    u_new = u + dt * du_dt
    v_new = v + dt * (lap_v - u * v)

    new_state = SimState(t_new, ScalarField(grid, u_new), ScalarField(grid, v_new))
    sup_u_new = float(u_new.max())
    if not (np.isfinite(u_new).all() and np.isfinite(v_new).all()):
        return new_state, StepOutcome(CORRUPTED, dt, sup_u_new)
    if float(u_new.min()) < -U_NEG_TOL or float(v_new.min()) < -U_NEG_TOL:
        return new_state, StepOutcome(CORRUPTED, dt, sup_u_new)
    if float(v_new.max()) > v0_sup * (1.0 + V_SUP_REL_TOL):
        return new_state, StepOutcome(CORRUPTED, dt, sup_u_new)
    if sup_u_new > config.u_max:
        return new_state, StepOutcome(BLOWUP, dt, sup_u_new)
    return new_state, StepOutcome(ADVANCED, dt, sup_u_new)


MonitorHook = Callable[[SimState, float], None]


def run(initial: SimState, params: ModelParams, config: SolverConfig,
        monitor_hook: MonitorHook | None = None) -> RunResult:
    """March the system to t_end, blow-up, step underflow, or corruption.

    The hook fires on the initial state, at the configured cadence (every N
    steps or at exact multiples of the output interval), on the final state,
    and on a blow-up state.  Initial data must be nonnegative and finite.
    """
    u0 = initial.u.values
    v0 = initial.v.values
    if not (np.isfinite(u0).all() and np.isfinite(v0).all()):
        raise CorruptionError("non-finite initial data")
    if float(u0.min()) < 0.0 or float(v0.min()) < 0.0:
        raise DomainError("initial data must be nonnegative")
    v0_sup = float(v0.max())
    t_end = config.t_end

    sup_u_max = float(u0.max())
    last_hook_t = math.nan

    def hook(state: SimState, dt: float) -> None:
        nonlocal last_hook_t
        if monitor_hook is not None and state.t != last_hook_t:
            monitor_hook(state, dt)
            last_hook_t = state.t

    hook(initial, 0.0)
    if sup_u_max > config.u_max:
        return RunResult(BLOWUP, initial, 0, sup_u_max)

    state = initial
    steps = 0
    out_index = 1
    while state.t < t_end:
        if steps >= config.max_steps:
            raise ChemfvError(f"step budget exceeded ({config.max_steps} steps)")
        t_target = t_end
        if config.output_every_time is not None:
            t_target = min(t_end, out_index * config.output_every_time)
        state, outcome = step(state, params, config, v0_sup=v0_sup, t_target=t_target)
        if outcome.status == DT_UNDERFLOW:
            return RunResult(DT_UNDERFLOW, state, steps, sup_u_max)
        steps += 1
        sup_u_max = max(sup_u_max, outcome.sup_u)
        if outcome.status == CORRUPTED:
            return RunResult(CORRUPTED, state, steps, sup_u_max)
        if outcome.status == BLOWUP:
            hook(state, outcome.dt_used)
            return RunResult(BLOWUP, state, steps, sup_u_max)
        if config.output_every_time is not None and state.t == out_index * config.output_every_time:
            hook(state, outcome.dt_used)
            out_index += 1
        elif config.output_every_steps is not None and steps % config.output_every_steps == 0:
            hook(state, outcome.dt_used)
        if state.t == t_end:
            hook(state, outcome.dt_used)
            break
    return RunResult(COMPLETED, state, steps, sup_u_max)
