"""Cell lattices, shifted dyadic grids, and cell-averaged grid functions.

The root box (default [-2,2)^n) is tiled by 2^(nL) cells. Dyadic cubes are
anchored at the origin: x = 0 is a cube boundary of the standard grid at every
generation. The shifted companion grids realize the one-third translation
trick on the cell lattice: the per-generation offset is the truncated base-2
expansion of 1/3 (respectively 2/3, alternating with generation parity), which
keeps every grid nested and keeps every cube a union of lattice cells. The
classical covering property, each cell-aligned cube sits inside some family
cube at most six times as wide, is exercised by the test suite rather than
assumed.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .powermass import Ball, Interval, Rect, RectInBall, power_mass

__all__ = [
    "Box",
    "default_box",
    "Lattice",
    "third_offset",
    "DyadicCube",
    "DyadicGrid",
    "ShiftedGridFamily",
    "PowerDescriptor",
    "GridFunction",
    "CellRegion",
    "cell_average",
]


@dataclass(frozen=True)
class Box:
    """Axis-aligned cube [lo, lo+side)^n serving as the root domain."""

    lo: Tuple[float, ...]
    side: float

    @property
    def n(self) -> int:
        return len(self.lo)


def default_box(n: int) -> Box:
    return Box((-2.0,) * n, 4.0)


@dataclass(frozen=True)
class Lattice:
    """The root box split into 2^L cells per axis."""

    box: Box
    L: int

    @property
    def n(self) -> int:
        return self.box.n

    @property
    def cells_per_axis(self) -> int:
        return 2**self.L

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.cells_per_axis,) * self.n

    @property
    def h(self) -> float:
        return self.box.side / self.cells_per_axis

    @property
    def cell_volume(self) -> float:
        return self.h**self.n

    def cell_bounds(self, idx: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
        lo = np.asarray(self.box.lo) + self.h * np.asarray(idx, dtype=float)
        return lo, lo + self.h

    def cube_geometry(self, cube: "DyadicCube") -> Tuple[np.ndarray, np.ndarray]:
        lo = np.asarray(self.box.lo) + self.h * np.asarray(cube.start, dtype=float)
        return lo, lo + self.h * cube.size

    def cell_region(self, idx: Sequence[int], support=None):
        """Powermass region for one cell, optionally clipped to a support set."""
        lo, hi = self.cell_bounds(idx)
        if self.n == 1:
            a, b = lo[0], hi[0]
            if support is None:
                return Interval(a, b)
            if isinstance(support, Ball):
                support = Interval(-support.radius, support.radius)
            if isinstance(support, Interval):
                a2, b2 = max(a, support.lo), min(b, support.hi)
                return Interval(a2, b2) if b2 > a2 else None
            raise TypeError("unsupported 1d support")
        if support is None:
            return Rect(tuple(lo), tuple(hi))
        if isinstance(support, Ball):
            near = np.linalg.norm(np.clip(0.0, lo, hi))
            if near >= support.radius:
                return None
            far = math.sqrt(float(np.sum(np.maximum(np.abs(lo), np.abs(hi)) ** 2)))
            if far <= support.radius:
                return Rect(tuple(lo), tuple(hi))
            return RectInBall(tuple(lo), tuple(hi), support.radius)
        raise TypeError("unsupported support type")


def third_offset(M: int, L: int) -> int:
    """Offset (in cells) of the one-third shifted grid at cube size 2^M cells.

    Bit k-1 is set when L-k is odd, so t(M)/2^M tends to 1/3 when L-M is even
    and to 2/3 when L-M is odd, matching the alternating-sign shift while
    keeping t(M) == t(M-1) (mod 2^(M-1)), which is exactly grid nesting.
    """
    t = 0
    for k in range(1, M + 1):
        if (L - k) % 2 == 1:
            t |= 1 << (k - 1)
    return t


@dataclass(frozen=True)
class DyadicCube:
    """A cube on the cell lattice: start cell per axis plus size in cells.

    Cubes from a dyadic grid carry generation g and index j; brute-force
    cell-aligned cubes carry grid_id "aligned" with g = j = None.
    """

    grid_id: str
    g: Optional[int]
    j: Optional[Tuple[int, ...]]
    start: Tuple[int, ...]
    size: int

    @classmethod
    def aligned(cls, start: Sequence[int], size: int) -> "DyadicCube":
        return cls("aligned", None, None, tuple(int(s) for s in start), int(size))

    def key(self) -> Tuple:
        return (self.start, self.size)


class DyadicGrid:
    """One dyadic grid over the lattice, shifted by beta per axis."""

    def __init__(self, lattice: Lattice, beta: Tuple[int, ...]):
        if len(beta) != lattice.n or any(b not in (0, 1) for b in beta):
            raise ValueError("beta must be a 0/1 tuple of length n")
        self.lattice = lattice
        self.beta = beta
        self.grid_id = "b" + "".join(str(b) for b in beta)

    def base(self, M: int) -> List[int]:
        """Unreduced start-cell representative per axis for size-2^M cubes."""
        L = self.lattice.L
        t = third_offset(M, L)
        return [2 ** (L - 1) + b * t for b in self.beta]

    def _check_generation(self, g: int) -> int:
        if g > self.lattice.L:
            raise ValueError(
                f"generation {g} is finer than the lattice resolution L={self.lattice.L}"
            )
        return self.lattice.L - g

    def cube(self, g: int, j: Sequence[int]) -> DyadicCube:
        M = self._check_generation(g)
        base = self.base(M)
        start = tuple(int(jj) * 2**M + b for jj, b in zip(j, base))
        return DyadicCube(self.grid_id, g, tuple(int(jj) for jj in j), start, 2**M)

    def cube_containing_cell(self, cell: Sequence[int], g: int) -> DyadicCube:
        M = self._check_generation(g)
        base = self.base(M)
        j = tuple((int(c) - b) // 2**M for c, b in zip(cell, base))
        return self.cube(g, j)

    def axis_cube_index(self, M: int) -> np.ndarray:
        """Cube index along one axis for every cell (same for all axes of a
        fixed beta bit); shape (2, N): row b is the index map for beta bit b."""
        L = self.lattice.L
        N = self.lattice.cells_per_axis
        t = third_offset(M, L)
        cells = np.arange(N)
        out = np.empty((2, N), dtype=np.int64)
        out[0] = (cells - 2 ** (L - 1)) // (2**M)
        out[1] = (cells - 2 ** (L - 1) - t) // (2**M)
        return out

    def cubes_intersecting_box(self, g: int) -> List[DyadicCube]:
        M = self._check_generation(g)
        base = self.base(M)
        N = self.lattice.cells_per_axis
        ranges = []
        for b in base:
            j_min = (1 - 2**M - b) // 2**M
            while j_min * 2**M + b + 2**M <= 0:
                j_min += 1
            j_max = (N - 1 - b) // 2**M
            ranges.append(range(j_min, j_max + 1))
        return [self.cube(g, j) for j in itertools.product(*ranges)]


class ShiftedGridFamily:
    """The 2^n shifted dyadic grids over a lattice (standard grid first)."""

    G_MIN = -2

    def __init__(self, lattice: Lattice):
        self.lattice = lattice
        betas = list(itertools.product((0, 1), repeat=lattice.n))
        self.grids: Tuple[DyadicGrid, ...] = tuple(DyadicGrid(lattice, b) for b in betas)
        self.by_id = {g.grid_id: g for g in self.grids}

    @property
    def standard(self) -> DyadicGrid:
        return self.grids[0]

    def by_beta(self, beta: Tuple[int, ...]) -> DyadicGrid:
        return self.by_id["b" + "".join(str(b) for b in beta)]

    def cover(self, start: Sequence[int], size: int) -> DyadicCube:
        """A family cube containing the aligned cube, at most 6x as wide."""
        L = self.lattice.L
        start = tuple(int(s) for s in start)
        M_lo = max(0, int(size - 1).bit_length())
        M_hi = min(L - self.G_MIN, (6 * size).bit_length() - 1)
        for M in range(M_lo, M_hi + 1):
            t = third_offset(M, L)
            beta = []
            for s in start:
                lo_cell, hi_cell = s, s + size - 1
                picked = None
                for b in (0, 1):
                    base = 2 ** (L - 1) + b * t
                    if (lo_cell - base) // 2**M == (hi_cell - base) // 2**M:
                        picked = b
                        break
                if picked is None:
                    beta = None
                    break
                beta.append(picked)
            if beta is not None:
                grid = self.by_beta(tuple(beta))
                return grid.cube_containing_cell(start, L - M)
        raise AssertionError(
            f"no covering cube within factor 6 for start={start} size={size}"
        )


@dataclass(frozen=True)
class PowerDescriptor:
    """Analytic form coeff * |x|^exponent restricted to a support set."""

    exponent: float
    support: object
    coeff: float = 1.0


def _support_to_json(support) -> dict:
    if isinstance(support, Interval):
        return {"kind": "interval", "lo": support.lo, "hi": support.hi}
    if isinstance(support, Ball):
        return {"kind": "ball", "radius": support.radius, "n": support.n}
    raise TypeError("unsupported support type for serialization")


def _support_from_json(d: dict):
    if d["kind"] == "interval":
        return Interval(d["lo"], d["hi"])
    if d["kind"] == "ball":
        return Ball(d["radius"], d["n"])
    raise ValueError(f"unknown support kind {d['kind']!r}")


class GridFunction:
    """Nonnegative function stored as one cell average per lattice cell.

    Values are treated as read-only after construction. When an analytic
    descriptor is attached, the stored values are the exact cell averages of
    the descriptor, so cube averages computed from cell masses are exact.
    """

    def __init__(
        self,
        lattice: Lattice,
        values: np.ndarray,
        descriptor: Optional[PowerDescriptor] = None,
    ):
        values = np.asarray(values, dtype=float)
        if values.shape != lattice.shape:
            raise ValueError(f"values shape {values.shape} != lattice shape {lattice.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid function values must be finite")
        if np.any(values < 0.0):
            raise ValueError("grid function values must be nonnegative")
        self.lattice = lattice
        self.values = values
        self.descriptor = descriptor
        self._prefix: Optional[np.ndarray] = None

    @classmethod
    def from_power(
        cls, lattice: Lattice, exponent: float, support, coeff: float = 1.0
    ) -> "GridFunction":
        vol = lattice.cell_volume
        values = np.zeros(lattice.shape)
        for idx in np.ndindex(*lattice.shape):
            region = lattice.cell_region(idx, support)
            if region is not None:
                values[idx] = coeff * power_mass(exponent, region) / vol
        return cls(lattice, values, PowerDescriptor(exponent, support, coeff))

    @classmethod
    def indicator(cls, lattice: Lattice, region) -> "GridFunction":
        if isinstance(region, np.ndarray):
            return cls(lattice, region.astype(float))
        return cls.from_power(lattice, 0.0, region)

    @classmethod
    def zeros(cls, lattice: Lattice) -> "GridFunction":
        return cls(lattice, np.zeros(lattice.shape))

    def prefix(self) -> np.ndarray:
        if self._prefix is None:
            n = self.lattice.n
            N = self.lattice.cells_per_axis
            P = np.zeros((N + 1,) * n)
            core = self.values
            for ax in range(n):
                core = np.cumsum(core, axis=ax)
            P[(slice(1, None),) * n] = core
            self._prefix = P
        return self._prefix

    def cells_sum(self, start: Sequence[int], size: int) -> float:
        """Sum of cell values over the cube clipped to the box."""
        N = self.lattice.cells_per_axis
        lo = [min(max(int(s), 0), N) for s in start]
        hi = [min(max(int(s) + size, 0), N) for s in start]
        if any(a >= b for a, b in zip(lo, hi)):
            return 0.0
        P = self.prefix()
        total = 0.0
        for corner in itertools.product(*[(a, b) for a, b in zip(lo, hi)]):
            sign = (-1) ** sum(c == a for c, a in zip(corner, lo))
            total += sign * float(P[corner])
        return total

    def mass_sum(self, start: Sequence[int], size: int) -> float:
        return self.cells_sum(start, size) * self.lattice.cell_volume

    def total_mass(self) -> float:
        return float(np.sum(self.values)) * self.lattice.cell_volume

    def save(self, path) -> None:
        header = {
            "n": self.lattice.n,
            "L": self.lattice.L,
            "box": {"lo": list(self.lattice.box.lo), "side": self.lattice.box.side},
            "descriptor": None
            if self.descriptor is None
            else {
                "exponent": self.descriptor.exponent,
                "coeff": self.descriptor.coeff,
                "support": _support_to_json(self.descriptor.support),
            },
        }
        flat = self.values.reshape(-1)
        with open(path, "w") as fh:
            fh.write(json.dumps(header) + "\n")
            for i, v in enumerate(flat.tolist()):
                fh.write(f"{i},{v!r}\n")

    @classmethod
    def load(cls, path) -> "GridFunction":
        with open(path) as fh:
            header = json.loads(fh.readline())
            lattice = Lattice(
                Box(tuple(header["box"]["lo"]), header["box"]["side"]), header["L"]
            )
            flat = np.zeros(lattice.cells_per_axis ** lattice.n)
            for line in fh:
                if not line.strip():
                    continue
                idx, val = line.split(",", 1)
                flat[int(idx)] = float(val)
        desc = None
        if header["descriptor"] is not None:
            d = header["descriptor"]
            desc = PowerDescriptor(d["exponent"], _support_from_json(d["support"]), d["coeff"])
        return cls(lattice, flat.reshape(lattice.shape), desc)


@dataclass
class CellRegion:
    """A set of lattice cells (boolean mask)."""

    lattice: Lattice
    mask: np.ndarray

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.mask))

    @property
    def measure(self) -> float:
        return self.count * self.lattice.cell_volume

    @classmethod
    def from_cube(cls, lattice: Lattice, cube: DyadicCube) -> "CellRegion":
        N = lattice.cells_per_axis
        mask = np.zeros(lattice.shape, dtype=bool)
        sl = tuple(slice(max(0, s), min(N, s + cube.size)) for s in cube.start)
        if all(s.start < s.stop for s in sl):
            mask[sl] = True
        return cls(lattice, mask)

    def intersect(self, other: "CellRegion") -> "CellRegion":
        return CellRegion(self.lattice, self.mask & other.mask)

    def minus(self, other: "CellRegion") -> "CellRegion":
        return CellRegion(self.lattice, self.mask & ~other.mask)

    def union(self, other: "CellRegion") -> "CellRegion":
        return CellRegion(self.lattice, self.mask | other.mask)


def cell_average(f: GridFunction, cube: DyadicCube) -> float:
    """Average of f over the cube, normalizing by the full cube volume.

    Cells outside the root box contribute zero. The cube must intersect the
    box and must not be finer than the lattice.
    """
    N = f.lattice.cells_per_axis
    if cube.size < 1:
        raise ValueError("cube is finer than the lattice resolution")
    inside = all(s < N and s + cube.size > 0 for s in cube.start)
    if not inside:
        raise ValueError(f"cube start={cube.start} size={cube.size} misses the root box")
    full_volume = (cube.size * f.lattice.h) ** f.lattice.n
    return f.mass_sum(cube.start, cube.size) / full_volume
