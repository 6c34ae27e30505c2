"""Domain types: wavelength grids, spectra, observations and Gaussian beliefs.

All types are immutable after construction. Arrays handed out by them are
read-only views, so they can be shared freely between callers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy import linalg

from .errors import GridMismatch, InvalidBelief, RoleConflict, SpectralError

SYMMETRY_RTOL = 1e-10


class Role(enum.Enum):
    ILLUMINATION = "illumination"
    REFLECTANCE = "reflectance"
    SENSITIVITY = "sensitivity"

    @property
    def axis(self) -> int:
        """Axis of this role in an (I, J, K) observation tensor."""
        return _AXIS[self]

    @classmethod
    def parse(cls, value: "Role | str") -> "Role":
        if isinstance(value, Role):
            return value
        try:
            return cls(value.lower())
        except ValueError:
            raise SpectralError(f"unknown role {value!r}") from None


_AXIS = {Role.ILLUMINATION: 0, Role.REFLECTANCE: 1, Role.SENSITIVITY: 2}


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class WavelengthGrid:
    """Uniform wavelength axis ``start_nm + n * step_nm`` for ``n < count``."""

    start_nm: float
    step_nm: float
    count: int

    def __post_init__(self):
        if not np.isfinite(self.start_nm) or not np.isfinite(self.step_nm):
            raise SpectralError("grid start and step must be finite")
        if self.step_nm <= 0:
            raise SpectralError(f"grid step must be positive, got {self.step_nm}")
        if int(self.count) != self.count or self.count < 2:
            raise SpectralError(f"grid needs at least 2 samples, got {self.count}")
        object.__setattr__(self, "count", int(self.count))

    @classmethod
    def from_range(cls, start_nm: float, stop_nm: float, step_nm: float) -> "WavelengthGrid":
        """Grid from ``start_nm`` to ``stop_nm`` inclusive."""
        count = int(round((stop_nm - start_nm) / step_nm)) + 1
        return cls(float(start_nm), float(step_nm), count)

    @property
    def stop_nm(self) -> float:
        return self.start_nm + (self.count - 1) * self.step_nm

    @cached_property
    def wavelengths(self) -> np.ndarray:
        return _frozen(self.start_nm + np.arange(self.count) * self.step_nm)

    def __len__(self) -> int:
        return self.count

    def __str__(self) -> str:
        return f"{self.start_nm:g}-{self.stop_nm:g} nm step {self.step_nm:g} (N={self.count})"


DEFAULT_GRID = WavelengthGrid(400.0, 10.0, 31)


@dataclass(frozen=True)
class Spectrum:
    """One sampled spectral distribution.

    ``bounded=True`` enforces the physical range of the role: values are
    non-negative, and reflectances are at most 1. Estimated spectra may be
    signed (a raw posterior mean can dip below zero), so estimators build them
    with ``bounded=False``.
    """

    grid: WavelengthGrid
    values: np.ndarray
    role: Role
    label: str = field(default="", compare=False)
    bounded: bool = field(default=True, compare=False)

    def __post_init__(self):
        values = _frozen(self.values)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "role", Role.parse(self.role))
        if values.ndim != 1 or values.size != self.grid.count:
            raise SpectralError(
                f"spectrum has {values.size} values but grid has {self.grid.count} samples"
            )
        if not np.all(np.isfinite(values)):
            raise SpectralError(f"spectrum {self.label!r} contains NaN or Inf")
        if self.bounded:
            if values.min() < 0:
                raise SpectralError(f"spectrum {self.label!r} has negative values")
            if self.role is Role.REFLECTANCE and values.max() > 1:
                raise SpectralError(f"reflectance {self.label!r} exceeds 1")

    def __eq__(self, other):
        if not isinstance(other, Spectrum):
            return NotImplemented
        return (
            self.grid == other.grid
            and self.role is other.role
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    @property
    def wavelengths(self) -> np.ndarray:
        return self.grid.wavelengths

    def scaled(self, factor: float) -> "Spectrum":
        return Spectrum(self.grid, self.values * factor, self.role, self.label, self.bounded)

    def max_normalized(self) -> "Spectrum":
        peak = self.values.max()
        if peak <= 0:
            raise SpectralError(f"spectrum {self.label!r} has no positive value to normalize by")
        return Spectrum(self.grid, self.values / peak, self.role, self.label, self.bounded)


class SpectrumSet(Sequence):
    """Ordered family of spectra sharing one grid and one role."""

    def __init__(self, members: Sequence[Spectrum], grid: WavelengthGrid | None = None,
                 role: Role | str | None = None):
        members = tuple(members)
        if not members and (grid is None or role is None):
            raise SpectralError("an empty SpectrumSet needs an explicit grid and role")
        self.grid = grid if grid is not None else members[0].grid
        self.role = Role.parse(role) if role is not None else members[0].role
        for m in members:
            if m.grid != self.grid:
                raise GridMismatch(self.grid, m.grid)
            if m.role is not self.role:
                raise RoleConflict(f"member {m.label!r} has role {m.role.value}, set is {self.role.value}")
        self._members = members

    def __getitem__(self, index):
        return self._members[index]

    def __len__(self) -> int:
        return len(self._members)

    def __repr__(self) -> str:
        return f"SpectrumSet({self.role.value}, {len(self)} members, {self.grid})"

    @cached_property
    def matrix(self) -> np.ndarray:
        """Members stacked as rows, shape (len, N)."""
        if not self._members:
            return _frozen(np.empty((0, self.grid.count)))
        return _frozen(np.stack([m.values for m in self._members]))

    @property
    def labels(self) -> list[str]:
        return [m.label for m in self._members]

    def scaled(self, factor: float) -> "SpectrumSet":
        return SpectrumSet([m.scaled(factor) for m in self._members], self.grid, self.role)

    def max_normalized(self) -> "SpectrumSet":
        return SpectrumSet([m.max_normalized() for m in self._members], self.grid, self.role)


@dataclass(frozen=True)
class Observations:
    """Pixel-value tensor indexed (illumination i, reflectance j, channel k)."""

    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        if values.ndim != 3 or min(values.shape) < 1:
            raise SpectralError(f"observations must be a non-empty 3-d tensor, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise SpectralError("observations contain NaN or Inf")
        object.__setattr__(self, "values", values)

    @property
    def extents(self) -> tuple[int, int, int]:
        return tuple(int(n) for n in self.values.shape)

    def __eq__(self, other):
        if not isinstance(other, Observations):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class GaussianBelief:
    """Gaussian over a spectrum, parameterized by mean and precision matrix."""

    mean: np.ndarray
    precision: np.ndarray

    def __post_init__(self):
        mean = _frozen(self.mean)
        precision = _frozen(self.precision)
        if mean.ndim != 1 or precision.shape != (mean.size, mean.size):
            raise InvalidBelief(
                f"mean of length {mean.size} does not match precision of shape {precision.shape}"
            )
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(precision))):
            raise InvalidBelief("belief contains NaN or Inf")
        scale = np.abs(precision).max()
        if np.abs(precision - precision.T).max() > SYMMETRY_RTOL * scale:
            raise InvalidBelief("precision matrix is not symmetric")
        try:
            factor = linalg.cholesky(precision, lower=True)
        except linalg.LinAlgError:
            raise InvalidBelief("precision matrix is not positive definite") from None
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "precision", precision)
        object.__setattr__(self, "_cholesky", factor)

    @property
    def dim(self) -> int:
        return self.mean.size

    @property
    def cholesky(self) -> np.ndarray:
        """Lower Cholesky factor of the precision."""
        return self._cholesky

    def covariance(self) -> np.ndarray:
        return linalg.cho_solve((self._cholesky, True), np.eye(self.dim))


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """Rows are Hadamard products of two known spectra families.

    ``row_index[r]`` is the ``(a, b)`` member pair that produced row ``r``;
    rows are ordered lexicographically by that pair.
    """

    rows: np.ndarray
    row_index: tuple[tuple[int, int], ...]
    roles: tuple[Role, Role]

    def __post_init__(self):
        object.__setattr__(self, "rows", _frozen(self.rows))
        if self.rows.shape[0] != len(self.row_index):
            raise SpectralError("row_index length does not match the number of rows")

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows.shape


def elementwise_product(a: Spectrum, b: Spectrum) -> np.ndarray:
    if a.grid != b.grid:
        raise GridMismatch(a.grid, b.grid)
    return a.values * b.values


def build_design_matrix(set_a: SpectrumSet, set_b: SpectrumSet) -> DesignMatrix:
    if set_a.grid != set_b.grid:
        raise GridMismatch(set_a.grid, set_b.grid)
    if set_a.role is set_b.role:
        raise RoleConflict(f"both known families have role {set_a.role.value}")
    rows = (set_a.matrix[:, None, :] * set_b.matrix[None, :, :]).reshape(-1, set_a.grid.count)
    index = tuple((a, b) for a in range(len(set_a)) for b in range(len(set_b)))
    return DesignMatrix(rows, index, (set_a.role, set_b.role))
