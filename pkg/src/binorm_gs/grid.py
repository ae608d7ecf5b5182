"""Periodic spectral grids and sampled fields.

All functionals in this package are evaluated on a uniform periodic box
[-L/2, L/2)^dim with the origin on a node.  Derivatives are spectral:
the Laplacian is diagonal in the discrete Fourier basis with symbol
-|k|^2, wavenumbers k in (2*pi/L) * {-n/2, ..., n/2 - 1} per axis.
Integrals are plain node sums scaled by the cell volume h^dim, which is
spectrally accurate for smooth periodic integrands.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "Grid",
    "Field",
    "State",
    "make_grid",
    "integrate",
    "inner",
    "norm_sq",
    "laplacian",
    "grad_norm_sq",
    "translate",
    "radial_profile",
    "write_field_csv",
    "read_field_csv",
]


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-L/2, L/2)^dim.

    Parameters
    ----------
    dim : int
        Spatial dimension, 1 or 2.
    n : int
        Nodes per axis; a power of two, at least 8.
    length : float
        Box edge length L.

    Attributes
    ----------
    h : float
        Node spacing L / n.
    axes : tuple of ndarray
        Node coordinates per axis, x_i = -L/2 + i h (origin on node n/2).
    k2 : ndarray
        Squared wavenumber magnitude |k|^2 on the full grid, FFT layout.
    shape : tuple of int
        Array shape of a field on this grid.
    """

    dim: int
    n: int
    length: float

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if self.n < 8 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"n must be a power of two >= 8, got {self.n}")
        if not (self.length > 0):
            raise ValueError(f"box length must be positive, got {self.length}")
        h = self.length / self.n
        axes = tuple(
            (-0.5 * self.length + h * np.arange(self.n)) for _ in range(self.dim)
        )
        k1 = 2.0 * np.pi * np.fft.fftfreq(self.n, d=h)
        if self.dim == 1:
            k2 = k1 * k1
        else:
            kx, ky = np.meshgrid(k1, k1, indexing="ij")
            k2 = kx * kx + ky * ky
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "k2", k2)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def cell_volume(self) -> float:
        return self.h**self.dim

    def meshes(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays broadcast to the full grid shape."""
        if self.dim == 1:
            return (self.axes[0],)
        return tuple(np.meshgrid(*self.axes, indexing="ij"))

    def radius(self) -> np.ndarray:
        """Distance of each node from the origin node."""
        r2 = np.zeros(self.shape)
        for x in self.meshes():
            r2 = r2 + x * x
        return np.sqrt(r2)


@dataclass(frozen=True, eq=False)
class Field:
    """Scalar field sampled on a grid.

    Values are node-ordered lexicographically (C order).  A field is
    treated as real when its array dtype is real; imaginary parts are
    then identically zero by construction.
    """

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values)
        if v.shape != self.grid.shape:
            raise ValueError(
                f"field shape {v.shape} does not match grid shape {self.grid.shape}"
            )
        if v.dtype not in (np.float64, np.complex128):
            v = v.astype(np.complex128 if np.iscomplexobj(v) else np.float64)
        object.__setattr__(self, "values", v)

    @property
    def real_valued(self) -> bool:
        return not np.iscomplexobj(self.values)

    def with_values(self, values: np.ndarray) -> "Field":
        return Field(self.grid, values)


@dataclass(frozen=True, eq=False)
class State:
    """Two-component state (u1, u2) on a shared grid."""

    u1: Field
    u2: Field

    def __post_init__(self) -> None:
        if self.u1.grid != self.u2.grid:
            raise ValueError("components must share one grid")

    @property
    def grid(self) -> Grid:
        return self.u1.grid

    def masses(self) -> tuple[float, float]:
        """Squared L2 norms of the two components."""
        return norm_sq(self.u1), norm_sq(self.u2)


def make_grid(dim: int, n: int, length: float) -> Grid:
    """Validated grid constructor; see Grid for the node layout."""
    return Grid(dim=dim, n=n, length=length)


def integrate(field: Field | np.ndarray, grid: Grid | None = None) -> float | complex:
    """Integral over the box: cell volume times the node sum.

    Raises
    ------
    ValueError
        If any sample is non-finite (the sum would silently poison
        every downstream energy).
    """
    if isinstance(field, Field):
        grid = field.grid
        values = field.values
    else:
        if grid is None:
            raise ValueError("grid required when integrating a bare array")
        values = field
    total = values.sum()
    if not np.isfinite(total):
        raise ValueError("integrate: non-finite samples")
    if not np.iscomplexobj(values):
        total = float(total)
    return grid.cell_volume * total


def inner(f: Field, g: Field) -> complex | float:
    """L2 pairing <f, g> = integral of conj(f) * g."""
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    return integrate(np.conj(f.values) * g.values, f.grid)


def norm_sq(f: Field) -> float:
    """Squared L2 norm."""
    return float(integrate(np.abs(f.values) ** 2, f.grid))


def laplacian(f: Field) -> Field:
    """Spectral Laplacian, diagonal multiplier -|k|^2."""
    g = f.grid
    if f.real_valued:
        spec = np.fft.rfftn(f.values)
        k2r = _rfft_k2(g)
        out = np.fft.irfftn(-k2r * spec, s=g.shape, axes=tuple(range(g.dim)))
    else:
        out = np.fft.ifftn(-g.k2 * np.fft.fftn(f.values))
    return Field(g, out)


def grad_norm_sq(f: Field) -> float:
    """Squared H1 seminorm, integral of |grad f|^2, via Parseval."""
    g = f.grid
    spec = np.fft.fftn(f.values)
    total = float(np.sum(g.k2 * np.abs(spec) ** 2))
    return g.cell_volume * total / g.n**g.dim


def _rfft_k2(grid: Grid) -> np.ndarray:
    """|k|^2 restricted to the real-FFT half spectrum."""
    k1 = 2.0 * np.pi * np.fft.fftfreq(grid.n, d=grid.h)
    kr = 2.0 * np.pi * np.fft.rfftfreq(grid.n, d=grid.h)
    if grid.dim == 1:
        return kr * kr
    kx, ky = np.meshgrid(k1, kr, indexing="ij")
    return kx * kx + ky * ky


def translate(f: Field, cells: int | Sequence[int]) -> Field:
    """Translate a field by whole cells along each axis (periodic).

    A positive shift moves the sample pattern toward larger coordinates,
    so translate(f, m) samples x -> f(x - m h).
    """
    g = f.grid
    if isinstance(cells, (int, np.integer)):
        shift = (int(cells),) * g.dim if g.dim == 1 else (int(cells), 0)
    else:
        shift = tuple(int(c) for c in cells)
        if len(shift) != g.dim:
            raise ValueError(f"expected {g.dim} shift components, got {len(shift)}")
    return Field(g, np.roll(f.values, shift, axis=tuple(range(g.dim))))


def radial_profile(f: Field) -> tuple[np.ndarray, np.ndarray]:
    """Shell maxima of |f| against distance from the origin node.

    Nodes are binned by rounding r / h; bin centers are multiples of h.
    Returns (radii, maxima) for the nonempty bins with radius <= L/2,
    radii strictly increasing from 0.
    """
    g = f.grid
    r = g.radius().ravel()
    mag = np.abs(f.values).ravel()
    idx = np.rint(r / g.h).astype(int)
    nbins = idx.max() + 1
    maxima = np.zeros(nbins)
    np.maximum.at(maxima, idx, mag)
    counts = np.bincount(idx, minlength=nbins)
    radii = g.h * np.arange(nbins)
    keep = (counts > 0) & (radii <= 0.5 * g.length)
    return radii[keep], maxima[keep]


def write_field_csv(f: Field, path: str) -> None:
    """Dump a field to CSV: header line '# dim,n,L', rows 'index,re,im'.

    Floats are written with repr so the dump round-trips bit-exactly.
    """
    flat = np.ravel(f.values)
    with open(path, "w", newline="") as fh:
        fh.write(f"# {f.grid.dim},{f.grid.n},{f.grid.length!r}\n")
        for i in range(flat.size):
            z = complex(flat[i])
            fh.write(f"{i},{z.real!r},{z.imag!r}\n")


def read_field_csv(path: str) -> Field:
    """Load a field written by write_field_csv."""
    with open(path, newline="") as fh:
        header = fh.readline()
        if not header.startswith("#"):
            raise ValueError("missing '# dim,n,L' header line")
        parts = header[1:].strip().split(",")
        if len(parts) != 3:
            raise ValueError(f"malformed header {header!r}")
        dim, n, length = int(parts[0]), int(parts[1]), float(parts[2])
        grid = make_grid(dim, n, length)
        re = np.empty(n**dim)
        im = np.empty(n**dim)
        seen = 0
        for row in csv.reader(fh):
            if not row:
                continue
            i = int(row[0])
            re[i] = float(row[1])
            im[i] = float(row[2])
            seen += 1
    if seen != n**dim:
        raise ValueError(f"expected {n ** dim} rows, found {seen}")
    values = re if not im.any() else re + 1j * im
    return Field(grid, values.reshape(grid.shape))
