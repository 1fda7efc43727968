"""Named initial-data profiles, nonnegative by construction.

Profiles are specified as strings such as ``constant(1.0)``,
``gaussian-bump(center=0.5, width=0.1, amplitude=1.0, floor=0.0)`` or
``cosine(amplitude=1.0, mode=1, floor=1.0)``.  ``center`` is a fraction of
each axis extent; combinations whose minimum would be negative are rejected.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import ConfigError
from .grid import Grid, ScalarField, constant_field

_PROFILE_DEFAULTS = {
    "constant": {"value": None},
    "gaussian-bump": {"center": 0.5, "width": 0.1, "amplitude": 1.0, "floor": 0.0},
    "cosine": {"amplitude": 1.0, "mode": 1, "floor": 0.0},
}


def parse_profile(text: str) -> tuple[str, dict[str, float]]:
    """Parse ``name(key=value, ...)``; ``constant`` also accepts one bare value."""
    text = text.strip()
    if "(" not in text or not text.endswith(")"):
        raise ConfigError(f"malformed profile {text!r}; expected name(key=value, ...)")
    name, _, arg_text = text.partition("(")
    name = name.strip()
    if name not in _PROFILE_DEFAULTS:
        raise ConfigError(f"unknown profile {name!r}; known: {sorted(_PROFILE_DEFAULTS)}")
    args = dict(_PROFILE_DEFAULTS[name])
    body = arg_text[:-1].strip()
    if body:
        for part in body.split(","):
            part = part.strip()
            if "=" in part:
                key, _, raw = part.partition("=")
                key = key.strip()
            elif name == "constant" and part:
                key, raw = "value", part
            else:
                raise ConfigError(f"profile argument {part!r} must be key=value")
            if key not in args:
                raise ConfigError(f"profile {name!r} has no parameter {key!r}")
            try:
                args[key] = float(raw)
            except ValueError:
                raise ConfigError(f"profile parameter {key}={raw.strip()!r} is not a number")
    if name == "constant" and args["value"] is None:
        raise ConfigError("constant profile needs a value")
    return name, args


def build_profile(grid: Grid, text: str) -> ScalarField:
    name, args = parse_profile(text)
    if name == "constant":
        value = args["value"]
        if value < 0.0:
            raise ConfigError(f"constant profile must be nonnegative, got {value}")
        return constant_field(grid, value)

    floor = args["floor"]
    amplitude = args["amplitude"]
    if floor < 0.0:
        raise ConfigError(f"profile floor must be nonnegative, got {floor}")

    if name == "gaussian-bump":
        width = args["width"]
        if not width > 0.0:
            raise ConfigError(f"gaussian-bump width must be positive, got {width}")
        if floor + min(amplitude, 0.0) < 0.0:
            raise ConfigError("gaussian-bump would go negative (floor + amplitude < 0)")
        centers = grid.centers()
        r_sq = np.zeros(grid.shape)
        for axis in range(grid.dim):
            c = args["center"] * grid.extents[axis]
            r_sq = r_sq + (centers[axis] - c) ** 2
        values = floor + amplitude * np.exp(-r_sq / (2.0 * width**2))
        return ScalarField(grid, np.broadcast_to(values, grid.shape).copy())

    # cosine: floor + amplitude * prod_a cos(mode pi x_a / L_a)
    mode = int(args["mode"])
    if floor - abs(amplitude) < 0.0:
        raise ConfigError("cosine would go negative (floor < |amplitude|)")
    centers = grid.centers()
    values = np.full(grid.shape, 1.0)
    for axis in range(grid.dim):
        values = values * np.cos(mode * math.pi * centers[axis] / grid.extents[axis])
    return ScalarField(grid, floor + amplitude * values)


def build_initial_data(grid: Grid, u0_spec: str, v0_spec: str) -> tuple[ScalarField, ScalarField]:
    return build_profile(grid, u0_spec), build_profile(grid, v0_spec)
