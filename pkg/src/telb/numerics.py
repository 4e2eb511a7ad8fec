"""Periodic spectral grid, fields, and the shared RK4 stepper.

Everything downstream works on a uniform periodic grid of N = 2**m points over
[x_min, x_max). Derivatives are Fourier multipliers, d^n/dx^n -> (ik)^n, and
off-grid evaluation is band-limited (trigonometric) interpolation

    f(x) = (1/N) * sum_k fhat_k * exp(i k (x - x_min)),

which reproduces stored node values exactly and keeps high-order derivatives
meaningful at arbitrary points — ordinary polynomial interpolation would not.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .errors import ConfigurationError, DomainError, IntegrationError

__all__ = [
    "Grid1D",
    "PhysicsParams",
    "ComplexField1D",
    "RealField1D",
    "make_grid",
    "spectral_derivative",
    "interpolate",
    "rk4_step",
]


def _readonly(a):
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Grid1D:
    """Uniform periodic grid over [x_min, x_max).

    Attributes
    ----------
    n_points : int
        Number of nodes; a power of two, at least 8.
    x_min, x_max : float
        Domain edges. x_max is excluded (periodic wrap point).
    dx : float
        Node spacing (x_max - x_min) / n_points.
    points : ndarray
        Node coordinates x_j = x_min + j dx.
    wavenumbers : ndarray
        Angular wavenumbers in FFT ordering, 2*pi*fftfreq(n, dx).
    """

    n_points: int
    x_min: float
    x_max: float
    dx: float = field(init=False)
    points: np.ndarray = field(init=False)
    wavenumbers: np.ndarray = field(init=False)

    def __post_init__(self):
        n = self.n_points
        if n < 8 or (n & (n - 1)) != 0:
            raise ConfigurationError(
                f"n_points must be a power of two >= 8, got {n}")
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)):
            raise ConfigurationError("grid edges must be finite")
        if not self.x_min < self.x_max:
            raise ConfigurationError(
                f"need x_min < x_max, got [{self.x_min}, {self.x_max}]")
        dx = (self.x_max - self.x_min) / n
        object.__setattr__(self, "dx", dx)
        object.__setattr__(self, "points",
                           _readonly(self.x_min + dx * np.arange(n)))
        object.__setattr__(self, "wavenumbers",
                           _readonly(2.0 * np.pi * sfft.fftfreq(n, d=dx)))

    @property
    def length(self):
        return self.x_max - self.x_min

    def contains(self, x):
        return (x >= self.x_min) & (x < self.x_max)

    # Value semantics: the three constructor fields determine everything.
    def __eq__(self, other):
        if not isinstance(other, Grid1D):
            return NotImplemented
        return (self.n_points == other.n_points
                and self.x_min == other.x_min
                and self.x_max == other.x_max)

    def __hash__(self):
        return hash((self.n_points, self.x_min, self.x_max))


@dataclass(frozen=True)
class PhysicsParams:
    """Physical constants: hbar and the two particle masses."""

    hbar: float = 1.0
    m1: float = 1.0
    m2: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "m1", "m2"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0.0):
                raise ConfigurationError(f"{name} must be positive, got {v}")

    def mass(self, which):
        """Mass of particle `which` (1 or 2)."""
        if which == 1:
            return self.m1
        if which == 2:
            return self.m2
        raise ConfigurationError(f"particle index must be 1 or 2, got {which}")


@dataclass(frozen=True, eq=False)
class ComplexField1D:
    """Complex samples of a field on a Grid1D."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != (self.grid.n_points,):
            raise ConfigurationError(
                f"field length {v.shape} does not match grid "
                f"({self.grid.n_points},)")
        if not np.all(np.isfinite(v.view(np.float64))):
            raise ConfigurationError("field values must be finite")
        object.__setattr__(self, "values", _readonly(v))

    def norm(self):
        """L2 norm, sqrt(sum |f|^2 dx)."""
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.dx))


@dataclass(frozen=True, eq=False)
class RealField1D:
    """Real samples of a field on a Grid1D (potentials, densities)."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (self.grid.n_points,):
            raise ConfigurationError(
                f"field length {v.shape} does not match grid "
                f"({self.grid.n_points},)")
        if not np.all(np.isfinite(v)):
            raise ConfigurationError("field values must be finite")
        object.__setattr__(self, "values", _readonly(v))


def make_grid(n_points, x_min, x_max):
    """Build a periodic Grid1D; validates the power-of-two precondition."""
    return Grid1D(int(n_points), float(x_min), float(x_max))


def spectral_derivative(f, order=1):
    """n-th spatial derivative of a periodic field by Fourier multiplier.

    Parameters
    ----------
    f : ComplexField1D
    order : int
        Derivative order n >= 0; the spectrum is multiplied by (ik)^n.

    Returns
    -------
    ComplexField1D
    """
    if order < 0:
        raise ConfigurationError(f"derivative order must be >= 0, got {order}")
    if order == 0:
        return f
    fhat = sfft.fft(f.values)
    fhat *= (1j * f.grid.wavenumbers) ** order
    return ComplexField1D(f.grid, sfft.ifft(fhat))


def phase_weights(grid, x, order=0):
    """Row vector w with f(x) = fhat @ w for band-limited evaluation.

    w_k = (ik)^order * exp(i k (x - x_min)) / N.  `x` may be a scalar or an
    array; the trailing axis of the result runs over wavenumbers.
    """
    x = np.asarray(x, dtype=np.float64)
    k = grid.wavenumbers
    w = np.exp(1j * np.multiply.outer(x - grid.x_min, k))
    if order:
        w *= (1j * k) ** order
    return w / grid.n_points


def interpolate(f, x, order=0):
    """Evaluate a periodic field (or its n-th derivative) off-grid.

    Band-limited interpolation: exact at grid nodes, spectrally accurate in
    between. `x` must lie in [x_min, x_max).

    Parameters
    ----------
    f : ComplexField1D
    x : float
    order : int
        Optional derivative order applied before evaluation.

    Returns
    -------
    complex
    """
    if not np.all(f.grid.contains(x)):
        raise DomainError(
            f"x={x} outside [{f.grid.x_min}, {f.grid.x_max})")
    fhat = sfft.fft(f.values)
    out = phase_weights(f.grid, x, order) @ fhat
    return complex(out) if np.isscalar(x) or np.ndim(x) == 0 else out


def _stage_finite(k):
    """True when a stage derivative contains only finite numbers."""
    if isinstance(k, np.ndarray):
        if np.iscomplexobj(k):
            return bool(np.all(np.isfinite(k.view(np.float64))))
        return bool(np.all(np.isfinite(k)))
    if isinstance(k, (int, float, complex)):
        return bool(np.isfinite(k))
    finite = getattr(k, "finite", None)
    if callable(finite):
        return bool(finite())
    return True


def rk4_step(state, derivative, dt):
    """One classical Runge-Kutta step of size dt.

    Generic over any state supporting vector-space `+` and scalar `*`
    (ndarrays, numbers, or custom state objects). `derivative` maps a state to
    its time derivative. A non-finite stage derivative raises
    IntegrationError naming the stage.
    """
    ks = []
    k = derivative(state)
    for stage, weight in ((1, 0.5), (2, 0.5), (3, 1.0)):
        if not _stage_finite(k):
            raise IntegrationError("non-finite RK4 stage derivative",
                                   stage=stage)
        ks.append(k)
        k = derivative(state + (weight * dt) * k)
    if not _stage_finite(k):
        raise IntegrationError("non-finite RK4 stage derivative", stage=4)
    ks.append(k)
    k1, k2, k3, k4 = ks
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
