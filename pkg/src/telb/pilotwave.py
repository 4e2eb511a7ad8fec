"""Particle dynamics guided by the full two-particle wave function.

The actual configuration (X1, X2) moves with the velocity field carried by
Psi: v_i = (hbar/m_i) Im(d_i Psi / Psi) evaluated at the configuration
point.  This module owns that guidance law, trajectory integration, the
extraction of single-particle conditional fields Psi(x, X2) / Psi(X1, x)
and their companion-axis derivatives, and the squared-projection density
eta kept around as a contrast ontology.

Everything here works on immutable snapshots; time dependence enters
through `psi_at` callables mapping a stage time to a WaveFunction2D.
"""

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .errors import ConfigurationError, DomainError, NodeError
from .numerics import (ComplexField1D, RealField1D, _readonly, phase_weights,
                       rk4_step)

# Guidance is singular at nodes of Psi; below this fraction of max|Psi| a
# configuration counts as node-adjacent and the integrator backs off.
NODE_EPSILON_REL = 1e-10


@dataclass(frozen=True)
class ParticleConfig:
    """Actual particle positions at one instant."""

    X1: float
    X2: float
    t: float = 0.0

    def __post_init__(self):
        for name in ("X1", "X2", "t"):
            if not np.isfinite(getattr(self, name)):
                raise ConfigurationError(f"{name} must be finite")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time series of configurations and their guidance velocities.

    positions and velocities are (M, 2) arrays with columns (particle 1,
    particle 2); times is (M,) and strictly increasing.
    """

    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        x = np.asarray(self.positions, dtype=np.float64)
        v = np.asarray(self.velocities, dtype=np.float64)
        m = t.shape[0]
        if t.ndim != 1 or x.shape != (m, 2) or v.shape != (m, 2):
            raise ConfigurationError(
                f"inconsistent trajectory shapes {t.shape}, {x.shape}, {v.shape}")
        if m > 1 and not np.all(np.diff(t) > 0.0):
            raise ConfigurationError("times must be strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(x))
                and np.all(np.isfinite(v))):
            raise ConfigurationError("trajectory entries must be finite")
        object.__setattr__(self, "times", _readonly(t))
        object.__setattr__(self, "positions", _readonly(x))
        object.__setattr__(self, "velocities", _readonly(v))

    def __len__(self):
        return self.times.shape[0]

    def config(self, i):
        return ParticleConfig(float(self.positions[i, 0]),
                              float(self.positions[i, 1]),
                              float(self.times[i]))

    def to_text(self):
        """Columnar export: header, then t X1 X2 v1 v2 rows at 17 digits."""
        lines = ["t X1 X2 v1 v2"]
        for i in range(len(self)):
            row = (self.times[i], self.positions[i, 0], self.positions[i, 1],
                   self.velocities[i, 0], self.velocities[i, 1])
            lines.append(" ".join(f"{v:.17g}" for v in row))
        return "\n".join(lines) + "\n"


def _wrap(grid, x):
    """Map a coordinate onto the periodic domain [x_min, x_max)."""
    return grid.x_min + (x - grid.x_min) % grid.length


def _check_inside(grid, cfg):
    if not (grid.contains(cfg.X1) and grid.contains(cfg.X2)):
        raise DomainError(
            f"configuration ({cfg.X1:.6g}, {cfg.X2:.6g}) outside "
            f"[{grid.x_min}, {grid.x_max})")


def bohm_velocity(psi, cfg):
    """Guidance velocities (v1, v2) at the configuration point.

    v_i = (hbar/m_i) Im(d_i Psi / Psi)|_(X1, X2), with the value and both
    partials obtained by band-limited interpolation of the spectral
    representation.  Raises NodeError when |Psi| at the point is below
    NODE_EPSILON_REL * max|Psi|.
    """
    grid, params = psi.grid, psi.params
    _check_inside(grid, cfg)
    psihat = sfft.fft2(psi.values)
    w1 = phase_weights(grid, cfg.X1)
    w2 = phase_weights(grid, cfg.X2)
    col = psihat @ w2
    val = w1 @ col
    floor = NODE_EPSILON_REL * np.max(np.abs(psi.values))
    if abs(val) <= floor:
        raise NodeError(
            f"|Psi| = {abs(val):.3e} at the configuration is below the node "
            f"floor {floor:.3e}", config=cfg, time=cfg.t)
    d1 = phase_weights(grid, cfg.X1, order=1) @ col
    d2 = (w1 @ psihat) @ phase_weights(grid, cfg.X2, order=1)
    h = params.hbar
    return (h / params.m1 * float(np.imag(d1 / val)),
            h / params.m2 * float(np.imag(d2 / val)))


def advance_configuration(psi_at, cfg, dt, max_halvings=6):
    """One RK4 step of the configuration under the guidance law.

    psi_at maps a stage time to the WaveFunction2D at that time; it is
    queried at t, t + h/2, and t + h for each attempted local step h.  On a
    NodeError the local step is halved (each half may halve again) up to
    `max_halvings` levels; after that the NodeError propagates and the
    caller flags the trajectory as aborted.

    Positions wrap periodically, matching the spectral evolution's
    topology.
    """

    def velocity(state):
        psi = psi_at(state[2])
        c = ParticleConfig(_wrap(psi.grid, state[0]),
                           _wrap(psi.grid, state[1]), state[2])
        v1, v2 = bohm_velocity(psi, c)
        return np.array([v1, v2, 1.0])

    def attempt(state, h, depth):
        try:
            out = rk4_step(state, velocity, h)
        except NodeError:
            if depth >= max_halvings:
                raise
            mid = attempt(state, 0.5 * h, depth + 1)
            mid[2] = state[2] + 0.5 * h
            return attempt(mid, 0.5 * h, depth + 1)
        return out

    state = np.array([cfg.X1, cfg.X2, cfg.t])
    out = attempt(state, dt, 0)
    grid = psi_at(cfg.t + dt).grid
    return ParticleConfig(_wrap(grid, float(out[0])),
                          _wrap(grid, float(out[1])), cfg.t + dt)


def conditional_wf(psi, cfg, which):
    """Single-particle wave function conditioned on the other's position.

    particle 1: psi_1(x) = Psi(x, X2); particle 2: psi_2(x) = Psi(X1, x).
    The companion coordinate is evaluated by band-limited interpolation,
    so the result is exact for the trigonometric interpolant of Psi.
    """
    return conditional_derivative_field(psi, cfg, which, 0)


def conditional_derivative_field(psi, cfg, which, n):
    """Companion-axis derivative field d^n Psi / d x_other^n at X_other.

    n = 0 reduces to conditional_wf.  The derivative acts along the OTHER
    particle's axis before that axis is collapsed at its actual position;
    the result remains a field over particle `which`'s own coordinate.
    """
    grid = psi.grid
    _check_inside(grid, cfg)
    if n < 0:
        raise ConfigurationError(f"derivative order must be >= 0, got {n}")
    if which == 1:
        w = phase_weights(grid, cfg.X2, order=n)
        vals = sfft.fft(psi.values, axis=1) @ w
    elif which == 2:
        w = phase_weights(grid, cfg.X1, order=n)
        vals = w @ sfft.fft(psi.values, axis=0)
    else:
        raise ConfigurationError(f"particle index must be 1 or 2, got {which}")
    return ComplexField1D(grid, vals)


def velocity_from_conditional(f, X, m, hbar=1.0):
    """Guidance velocity (hbar/m) Im(f'(X)/f(X)) from a conditional field.

    Definitionally equal to the matching bohm_velocity component when f is
    the extracted conditional wave function.
    """
    grid = f.grid
    if not grid.contains(X):
        raise DomainError(f"X={X:.6g} outside [{grid.x_min}, {grid.x_max})")
    fhat = sfft.fft(f.values)
    val = phase_weights(grid, X) @ fhat
    floor = NODE_EPSILON_REL * np.max(np.abs(f.values))
    if abs(val) <= floor:
        raise NodeError(
            f"|f| = {abs(val):.3e} at X is below the node floor {floor:.3e}",
            time=None)
    d = phase_weights(grid, X, order=1) @ fhat
    return float(hbar / m * np.imag(d / val))


def eta_projection(psi, which):
    """Squared-and-projected single-particle density.

    eta_1(x) = integral |Psi(x, x2)|^2 dx2 (the trapezoid rule coincides
    with the plain node sum on a periodic grid), and symmetrically for
    particle 2.  A historical local-density candidate: it obeys no
    autonomous dynamics and is kept for demonstrations only.
    """
    if which not in (1, 2):
        raise ConfigurationError(f"particle index must be 1 or 2, got {which}")
    return psi.marginal_density(axis=which - 1)
