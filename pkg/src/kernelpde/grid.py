"""Uniform periodic grids and nodal fields.

A 1D grid on ``[a, b]`` with ``n`` cells stores the ``n`` unique nodes
``a + i*dx`` for ``i = 0..n-1``; node ``n`` (``x = b``) is node ``0``.
2D fields are arrays of shape ``(ny, nx)`` with x varying fastest, so an
x-line is a row and a y-line is a column.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

MIN_CELLS = 6


def periodic_index(i: int, n: int) -> int:
    """Wrap ``i`` into ``[0, n)``."""
    return i % n


@dataclass(frozen=True)
class Grid1D:
    a: float
    b: float
    n: int

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError(f"need b > a, got a={self.a}, b={self.b}")
        if int(self.n) != self.n or self.n < MIN_CELLS:
            raise ValueError(f"need an integer n >= {MIN_CELLS}, got {self.n}")

    @property
    def dx(self) -> float:
        return (self.b - self.a) / self.n

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def x(self) -> np.ndarray:
        return self.a + self.dx * np.arange(self.n)

    @property
    def shape(self) -> tuple[int]:
        return (self.n,)

    @property
    def cell_volume(self) -> float:
        return self.dx

    def coords(self):
        """Node coordinates as ``(x, y)`` with ``y = 0`` for evaluator calls."""
        return self.x, 0.0


@dataclass(frozen=True)
class Grid2D:
    gx: Grid1D
    gy: Grid1D

    @classmethod
    def square(cls, a: float, b: float, n: int) -> "Grid2D":
        return cls(Grid1D(a, b, n), Grid1D(a, b, n))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.gy.n, self.gx.n)

    @property
    def cell_volume(self) -> float:
        return self.gx.dx * self.gy.dx

    def coords(self):
        """Meshgrid arrays ``(X, Y)`` of shape ``(ny, nx)``."""
        return np.meshgrid(self.gx.x, self.gy.x)


def extract_line(values: np.ndarray, axis: str, index: int) -> np.ndarray:
    """Copy one grid line out of a 2D field.

    ``axis='x'`` returns row ``index`` (fixed y), ``axis='y'`` returns column
    ``index`` (fixed x); both in increasing coordinate order.
    """
    values = np.asarray(values)
    if axis == "x":
        extent = values.shape[0]
    elif axis == "y":
        extent = values.shape[1]
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    if not 0 <= index < extent:
        raise IndexError(f"line index {index} out of range for {axis}-lines (extent {extent})")
    line = values[index, :] if axis == "x" else values[:, index]
    return np.array(line, copy=True)


def write_line(values: np.ndarray, axis: str, index: int, line) -> None:
    """Inverse of :func:`extract_line`; writes in place."""
    if axis == "x":
        extent = values.shape[0]
    elif axis == "y":
        extent = values.shape[1]
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    if not 0 <= index < extent:
        raise IndexError(f"line index {index} out of range for {axis}-lines (extent {extent})")
    if axis == "x":
        values[index, :] = line
    else:
        values[:, index] = line


@dataclass
class Field:
    grid: Grid1D | Grid2D
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(f"field shape {self.values.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")


@dataclass
class FieldSet:
    """Named fields on one grid, stored as a single ``(ncomp, *grid.shape)`` array."""

    grid: Grid1D | Grid2D
    names: tuple[str, ...]
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.shape != (len(self.names),) + self.grid.shape:
            raise ValueError(
                f"data shape {self.data.shape} does not match {len(self.names)} components on {self.grid.shape}"
            )

    @classmethod
    def from_mapping(cls, grid, fields: Mapping[str, np.ndarray]) -> "FieldSet":
        names = tuple(fields)
        data = np.stack([np.broadcast_to(np.asarray(fields[k], dtype=float), grid.shape) for k in names])
        return cls(grid, names, data)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.data[self.names.index(name)]

    def field(self, name: str) -> Field:
        return Field(self.grid, self[name])

    def copy(self) -> "FieldSet":
        return FieldSet(self.grid, self.names, self.data.copy())
