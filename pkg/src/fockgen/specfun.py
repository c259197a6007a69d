"""Modified Bessel functions and the radial Fourier kernels built from them.

``bessel_k`` evaluates the integral representation

    K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt

by adaptive quadrature, with closed forms for half-integer orders.  The
kernels are the Fourier transforms of ``(p^2 + m^2)**lam`` and of the
dispersion-dependent phases used by the lattice operators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import integrate


class DomainError(ValueError):
    """Argument outside the domain where a function is defined."""


class UnsupportedBranchError(ValueError):
    """Requested region needs an analytic continuation that is not provided."""


_NU_MAX = 3.0


def _half_integer_k(nu: float, z: float) -> float | None:
    """Closed form for nu in {1/2, 3/2, 5/2}; None otherwise."""
    base = math.sqrt(math.pi / (2 * z)) * math.exp(-z)
    if nu == 0.5:
        return base
    if nu == 1.5:
        return base * (1 + 1 / z)
    if nu == 2.5:
        return base * (1 + 3 / z + 3 / z**2)
    return None


def _k_quad(nu: float, z: float) -> float:
    # Work with exp(-z cosh t + nu t) scaled by exp(z) so the integrand stays O(1)
    # near the peak; the upper limit is where the log-integrand has dropped by ~60.
    def log_f(t):
        return -z * (math.cosh(t) - 1.0) + nu * t

    t_peak = math.asinh(nu / z) if nu > 0 else 0.0
    peak = log_f(t_peak)
    t_hi = max(t_peak, 1.0)
    while log_f(t_hi) > peak - 60.0:
        t_hi *= 1.5

    def f(t):
        # cosh(nu t) = (e^{nu t} + e^{-nu t}) / 2, shifted by the peak value
        return 0.5 * (math.exp(log_f(t) - peak) + math.exp(log_f(t) - 2 * nu * t - peak))

    pts = [t_peak] if 0 < t_peak < t_hi else None
    val, _ = integrate.quad(f, 0.0, t_hi, points=pts, epsabs=0.0, epsrel=1e-13, limit=400)
    return val * math.exp(peak - z)


def bessel_k(nu: float, z: float) -> float:
    """Modified Bessel function of the second kind, ``0 <= nu <= 3``, ``z > 0``."""
    nu = abs(float(nu))
    z = float(z)
    if not z > 0 or not math.isfinite(z):
        raise DomainError(f"K_nu(z) needs z > 0, got {z}")
    if nu > _NU_MAX:
        raise DomainError(f"order {nu} outside the supported range [0, {_NU_MAX}]")
    closed = _half_integer_k(nu, z)
    if closed is not None:
        return closed
    return _k_quad(nu, z)


def gamma_fn(x: float) -> float:
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise DomainError(f"Gamma has a pole at {x}")
    return math.gamma(x)


def _rgamma(x: float) -> float:
    """1/Gamma(x), zero at the poles."""
    if x <= 0 and x == math.floor(x):
        return 0.0
    return 1.0 / math.gamma(x)


def _check_r(r: float) -> float:
    r = float(r)
    if not r > 0:
        raise DomainError(f"radial kernels are singular at the origin; got r = {r}")
    return r


def power_kernel(lam: float, m: float, n: int, r: float) -> float:
    """Fourier transform of ``(|p|^2 + m^2)**lam`` in ``n`` dimensions at radius ``r``.

    ``int d^n p (p^2 + m^2)^lam exp(-i p.z)`` evaluated at ``|z| = r``, i.e.

        2^(lam+1) (2 pi)^(n/2) / Gamma(-lam) * (m/r)^(n/2 + lam) * K_(n/2 + lam)(m r)

    Nonnegative integer ``lam`` gives a polynomial symbol whose transform is
    supported at the origin, so the kernel vanishes for ``r > 0``.
    """
    r = _check_r(r)
    nu = 0.5 * n + lam
    rg = _rgamma(-lam)
    if rg == 0.0:
        return 0.0
    return 2.0 ** (lam + 1) * (2 * np.pi) ** (0.5 * n) * rg * (m / r) ** nu * bessel_k(abs(nu), m * r)


def omega_kernel(m: float, n: int, r: float) -> float:
    """Coordinate-space kernel of the energy operator, ``(2 pi)^-n * FT[omega](r)``."""
    r = _check_r(r)
    nu = 0.5 * (n + 1)
    return -2.0 * (2 * np.pi) ** (-nu) * (m / r) ** nu * bessel_k(nu, m * r)


def velocity_kernel(m: float, n: int, x) -> np.ndarray:
    """Coordinate-space kernel of the velocity operator, one entry per component.

    ``2 (2 pi)^(-(n+1)/2) (m/|x|)^((n+1)/2) K_((n+1)/2)(m|x|) x^j``, i.e.
    ``-x^j * omega_kernel(|x|)`` with ``x`` given by its contravariant
    (plain Cartesian) components.  The one-body velocity ``V^j`` then has the
    coordinate matrix ``i * velocity_kernel(x - y)`` times the cell volume.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (n,):
        raise DomainError(f"expected a {n}-vector, got shape {x.shape}")
    r = float(np.linalg.norm(x))
    if r == 0.0:
        raise DomainError("velocity kernel is singular at x = 0")
    nu = 0.5 * (n + 1)
    radial = 2.0 * (2 * np.pi) ** (-nu) * (m / r) ** nu * bessel_k(nu, m * r)
    return radial * x


def time_translation_kernel(m: float, y0: float, r: float) -> complex:
    """Kernel of the time-shifted coordinate annihilator in three dimensions.

    ``(2 pi)^-3 int d^3p exp(i p.x) exp(-i omega_p y0)`` for spacelike
    separations ``r > |y0|``:  ``(i y0 / (2 pi^2)) m^2 K_2(m s) / s^2`` with
    ``s = sqrt(r^2 - y0^2)``.
    """
    r = _check_r(r)
    if r <= abs(y0):
        raise UnsupportedBranchError(f"r = {r} is not spacelike for y0 = {y0}; only r > |y0| is supported")
    if y0 == 0:
        return 0j
    s = math.sqrt(r * r - y0 * y0)
    return 1j * y0 / (2 * np.pi**2) * m**2 * bessel_k(2.0, m * s) / s**2


class KernelKind(str, Enum):
    OMEGA = "omega"
    VELOCITY_COMPONENT = "velocity_component"
    TIME_TRANSLATION = "time_translation"
    GENERAL_POWER = "general_power"


@dataclass(frozen=True)
class Kernel:
    """A radial kernel with its parameters bound, callable on a radius."""

    kind: KernelKind
    m: float
    n: int
    lam: float | None = None
    y0: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", KernelKind(self.kind))
        if not self.m > 0:
            raise DomainError(f"mass must be positive, got {self.m}")
        if self.n not in (1, 2, 3):
            raise DomainError(f"dimension must be 1, 2 or 3, got {self.n}")
        if self.kind is KernelKind.TIME_TRANSLATION:
            if self.n != 3:
                raise DomainError("the time-translation kernel is only available for n = 3")
            if self.y0 is None:
                raise DomainError("time-translation kernel needs y0")
        if self.kind is KernelKind.GENERAL_POWER and self.lam is None:
            raise DomainError("general power kernel needs lam")

    def __call__(self, r: float):
        if self.kind is KernelKind.OMEGA:
            return omega_kernel(self.m, self.n, r)
        if self.kind is KernelKind.GENERAL_POWER:
            return power_kernel(self.lam, self.m, self.n, r)
        if self.kind is KernelKind.TIME_TRANSLATION:
            return time_translation_kernel(self.m, self.y0, r)
        # velocity component along the first axis
        x = np.zeros(self.n)
        x[0] = r
        return float(velocity_kernel(self.m, self.n, x)[0])
