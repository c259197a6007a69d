"""Periodic lattice, momentum grid and the unitary lattice Fourier transform.

Sites sit at ``x = a*j`` with integer coordinates ``j`` in ``[-N/2, N/2 - 1]``
per axis, momenta at ``p = 2*pi*q/(N*a)`` with ``q`` in ``[-N/2 + 1, N/2]``,
i.e. the half-open zone ``(-pi/a, pi/a]``.  Both are enumerated by the same
flat mode index (C order over the axes, ascending along each axis).

Fourier convention (standard quantum mechanics, unitary)::

    psi_mom(p)   = M**-0.5 * sum_x exp(-i p.x) psi_coord(x)
    psi_coord(x) = M**-0.5 * sum_p exp(+i p.x) psi_mom(p)

so that a one-particle momentum eigenstate has the coordinate wave function
``M**-0.5 * exp(+i p.x)`` and the coordinate annihilator reads
``a~(x) = M**-0.5 * sum_p exp(+i p.x) a(p)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np


class Basis(str, Enum):
    MOMENTUM = "momentum"
    COORDINATE = "coordinate"

    @property
    def other(self) -> "Basis":
        return Basis.COORDINATE if self is Basis.MOMENTUM else Basis.MOMENTUM


class GridError(ValueError):
    """Invalid lattice parameters."""


@dataclass(frozen=True)
class GridSpec:
    n: int
    N: int
    a: float
    m: float

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise GridError(f"spatial dimension must be 1, 2 or 3, got {self.n}")
        if int(self.N) != self.N or self.N < 2 or self.N % 2:
            raise GridError(f"points per axis must be an even integer >= 2, got {self.N}")
        if not self.a > 0:
            raise GridError(f"lattice spacing must be positive, got {self.a}")
        if not self.m > 0:
            raise GridError(f"mass must be positive, got {self.m}")

    @property
    def box(self) -> float:
        return self.N * self.a

    def to_dict(self) -> dict:
        return {"n": self.n, "N": self.N, "a": self.a, "m": self.m}

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        missing = {"n", "N", "a", "m"} - set(d)
        if missing:
            raise GridError(f"grid spec missing fields: {sorted(missing)}")
        return cls(n=int(d["n"]), N=int(d["N"]), a=float(d["a"]), m=float(d["m"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> "GridSpec":
        return cls.from_dict(json.loads(s))

    def refined(self) -> "GridSpec":
        """Same box, twice the points."""
        return GridSpec(self.n, 2 * self.N, self.a / 2, self.m)


@dataclass(frozen=True, eq=False)
class Grid:
    spec: GridSpec
    site_ints: np.ndarray = field(repr=False)  # (M, n) integer site coordinates j
    mom_ints: np.ndarray = field(repr=False)  # (M, n) integer momentum labels q

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def N(self) -> int:
        return self.spec.N

    @property
    def a(self) -> float:
        return self.spec.a

    @property
    def m(self) -> float:
        return self.spec.m

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.n

    @property
    def mode_count(self) -> int:
        return self.N**self.n

    @cached_property
    def positions(self) -> np.ndarray:
        return self.a * self.site_ints.astype(float)

    @cached_property
    def momenta(self) -> np.ndarray:
        return (2 * np.pi / (self.N * self.a)) * self.mom_ints.astype(float)

    @cached_property
    def omega(self) -> np.ndarray:
        return dispersion(self)

    def site_index(self, j) -> int:
        """Flat index of the site with integer coordinates ``j`` (wrapped)."""
        j = np.atleast_1d(np.asarray(j, dtype=int))
        if j.shape != (self.n,):
            raise GridError(f"site needs {self.n} integer coordinates, got {j.tolist()}")
        k = (j + self.N // 2) % self.N
        return int(np.ravel_multi_index(tuple(k), self.shape))

    def wrap_site(self, j) -> np.ndarray:
        j = np.asarray(j, dtype=int)
        return (j + self.N // 2) % self.N - self.N // 2

    def mode_index(self, q) -> int:
        """Flat index of the momentum with integer label ``q`` (wrapped into the zone)."""
        q = np.atleast_1d(np.asarray(q, dtype=int))
        if q.shape != (self.n,):
            raise GridError(f"momentum needs {self.n} integer labels, got {q.tolist()}")
        k = (q + self.N // 2 - 1) % self.N
        return int(np.ravel_multi_index(tuple(k), self.shape))

    def wrap_mom(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=int)
        return (q + self.N // 2 - 1) % self.N - self.N // 2 + 1

    def zero_mode(self) -> int:
        return self.mode_index(np.zeros(self.n, dtype=int))

    def origin(self) -> int:
        return self.site_index(np.zeros(self.n, dtype=int))

    def separation_ints(self, i: int, k: int) -> np.ndarray:
        """Minimum-image integer separation ``j_i - j_k``."""
        return self.wrap_site(self.site_ints[i] - self.site_ints[k])

    def to_dict(self) -> dict:
        return self.spec.to_dict()


def make_grid(spec: GridSpec) -> Grid:
    N, n = spec.N, spec.n
    axis = np.arange(N)
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    k = np.stack([g.ravel() for g in mesh], axis=1)
    return Grid(spec=spec, site_ints=k - N // 2, mom_ints=k - N // 2 + 1)


def dispersion(grid: Grid) -> np.ndarray:
    """Continuum ``sqrt(|p|^2 + m^2)`` at the grid momenta."""
    p = grid.momenta
    return np.sqrt(np.sum(p * p, axis=1) + grid.m**2)


@dataclass(frozen=True, eq=False)
class FieldVector:
    basis: Basis
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "basis", Basis(self.basis))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


# Axis-wise index maps between the ascending zone ordering and numpy's FFT ordering.
# Coordinate index k has j = k - N/2, i.e. it is numpy sample k shifted by -N/2 sites;
# momentum index k has q = k - N/2 + 1, stored in numpy slot q mod N.
def _axis_maps(N: int):
    k = np.arange(N)
    q = k - N // 2 + 1
    fft_slot = q % N
    sign = np.where(q % 2 == 0, 1.0, -1.0)  # exp(+i*pi*q) from the -N/2 site offset
    return fft_slot, sign


def _coord_to_mom_axis(arr: np.ndarray, axis: int, N: int) -> np.ndarray:
    slot, sign = _axis_maps(N)
    out = np.fft.fft(arr, axis=axis, norm="ortho")
    out = np.take(out, slot, axis=axis)
    shape = [1] * arr.ndim
    shape[axis] = N
    return out * sign.reshape(shape)


def _mom_to_coord_axis(arr: np.ndarray, axis: int, N: int) -> np.ndarray:
    slot, sign = _axis_maps(N)
    shape = [1] * arr.ndim
    shape[axis] = N
    tmp = np.empty_like(arr, dtype=complex)
    idx = [slice(None)] * arr.ndim
    idx[axis] = slot
    tmp[tuple(idx)] = arr * sign.reshape(shape)
    return np.fft.ifft(tmp, axis=axis, norm="ortho")


def transform_array(values: np.ndarray, grid: Grid, source: Basis, target: Basis) -> np.ndarray:
    """Lattice Fourier transform along the leading mode axis of ``values``.

    ``values`` has shape ``(M, ...)``; trailing axes are carried along, which is
    how whole matrices are conjugated column by column.
    """
    source, target = Basis(source), Basis(target)
    values = np.asarray(values, dtype=complex)
    if values.shape[0] != grid.mode_count:
        raise GridError(f"expected {grid.mode_count} modes on the leading axis, got {values.shape[0]}")
    if source is target:
        return values.copy()
    rest = values.shape[1:]
    arr = values.reshape(grid.shape + rest)
    step = _coord_to_mom_axis if target is Basis.MOMENTUM else _mom_to_coord_axis
    for ax in range(grid.n):
        arr = step(arr, ax, grid.N)
    return arr.reshape(values.shape)


def dft(v: FieldVector, target: Basis, grid: Grid) -> FieldVector:
    target = Basis(target)
    vals = np.asarray(v.values)
    if vals.shape != (grid.mode_count,):
        raise GridError(f"field vector has {vals.shape} entries, grid has {grid.mode_count} modes")
    return FieldVector(target, transform_array(vals, grid, v.basis, target))


def fourier_matrix(grid: Grid) -> np.ndarray:
    """Dense coordinate-to-momentum matrix ``F[p, x] = M**-0.5 exp(-i p.x)``.

    Only for small grids and for tests; production paths use FFTs.
    """
    phase = grid.momenta @ grid.positions.T
    return np.exp(-1j * phase) / np.sqrt(grid.mode_count)


def lattice_kernel(grid: Grid, symbol: np.ndarray) -> np.ndarray:
    """``K(s) = M**-1 * sum_p symbol(p) exp(+i p.s)`` for every lattice separation.

    Returned on the site enumeration: entry ``k`` is the kernel at separation
    ``positions[k]``.  This is the first column of the circulant
    ``F^dagger diag(symbol) F`` with the origin as reference site.
    """
    symbol = np.asarray(symbol, dtype=complex)
    # the origin site has x = 0, so F[p, origin] = M**-0.5 for every p
    return transform_array(symbol, grid, Basis.MOMENTUM, Basis.COORDINATE) / np.sqrt(grid.mode_count)


def fourier_matrix_row(grid: Grid, site: int) -> np.ndarray:
    """Column ``F[:, site]`` of the coordinate-to-momentum matrix."""
    return np.exp(-1j * (grid.momenta @ grid.positions[site])) / np.sqrt(grid.mode_count)
