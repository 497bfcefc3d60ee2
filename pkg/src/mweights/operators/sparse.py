"""Sparse cube families via level-set stopping, and the operators they carry.

The construction walks one grid's cube tree under a root cube: a cube is
selected when its product of averages first exceeds ``a**k`` times the root
level for some new threshold index ``k``.  Each selected cube keeps the
cells not claimed by any deeper selected cube; the half-volume guarantee on
those kept regions is verified, never assumed.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..grid import CellRegion, DyadicCube, DyadicGrid, GridFunction, Lattice, cell_average

logger = logging.getLogger(__name__)

__all__ = ["SparseFamily", "SparsenessError", "build_sparse_family", "sparse_operator"]


class SparsenessError(RuntimeError):
    """A constructed family missed the half-volume guarantee."""


def _cube_slices(cube: DyadicCube, lat: Lattice) -> Tuple[slice, ...]:
    N = lat.cells_per_axis
    return tuple(slice(max(s, 0), min(s + cube.size, N)) for s in cube.start)


def _cube_inside_box(cube: DyadicCube, lat: Lattice) -> bool:
    N = lat.cells_per_axis
    return all(0 <= s and s + cube.size <= N for s in cube.start)


@dataclass(frozen=True)
class SparseFamily:
    """Selected cubes with their pairwise-disjoint kept regions.

    Invariants (checked at construction): every kept region lies inside its
    cube, the regions are pairwise disjoint, every cube lies inside the box,
    and each region keeps at least half of its cube's cells.
    """

    grid_id: str
    cubes: Tuple[DyadicCube, ...]
    regions: Tuple[CellRegion, ...]
    a: float
    lambda0: float
    root: DyadicCube

    def __post_init__(self):
        if len(self.cubes) != len(self.regions):
            raise ValueError("cubes and regions must pair up one to one")
        if not self.cubes:
            raise ValueError("a sparse family holds at least the root cube")
        lat = self.regions[0].lattice
        taken = np.zeros(lat.shape, dtype=bool)
        for cube, region in zip(self.cubes, self.regions):
            if region.lattice != lat:
                raise ValueError("all regions must share one lattice")
            if not _cube_inside_box(cube, lat):
                raise ValueError(f"cube {cube.key()} sticks out of the box")
            outside = np.ones(lat.shape, dtype=bool)
            outside[_cube_slices(cube, lat)] = False
            if np.any(region.mask & outside):
                raise ValueError(f"kept region of {cube.key()} leaves its cube")
            if np.any(taken & region.mask):
                raise ValueError("kept regions must be pairwise disjoint")
            taken |= region.mask
            if region.count < cube.size**lat.n / 2.0:
                raise SparsenessError(
                    f"cube {cube.key()} keeps {region.count} of "
                    f"{cube.size ** lat.n} cells, below one half"
                )

    def __len__(self) -> int:
        return len(self.cubes)

    def to_json(self) -> List[dict]:
        out = []
        for cube, region in zip(self.cubes, self.regions):
            out.append(
                {
                    "grid": self.grid_id,
                    "g": cube.g,
                    "j": None if cube.j is None else list(cube.j),
                    "eq_cells": region.count,
                }
            )
        return out


def build_sparse_family(
    gs: Sequence[GridFunction],
    grid: DyadicGrid,
    a: Optional[float] = None,
    root: Optional[DyadicCube] = None,
) -> SparseFamily:
    """Level-set stopping construction under ``root``.

    The base level is the product of root averages; threshold ``k`` is
    ``a**k`` times that.  Selected cubes are the maximal ones exceeding a
    threshold no ancestor reached, plus the root itself.  Fails loudly if
    any kept region drops below half of its cube.
    """
    if not gs:
        raise ValueError("need at least one grid function")
    lat = gs[0].lattice
    for g in gs[1:]:
        if g.lattice != lat:
            raise ValueError("all grid functions must share one lattice")
    if grid.lattice != lat:
        raise ValueError("grid and functions must share one lattice")
    if root is None:
        raise ValueError("a root cube is required")
    if root.grid_id != grid.grid_id:
        raise ValueError("root must be a cube of the same grid")
    if not _cube_inside_box(root, lat):
        raise ValueError("root cube must lie inside the box")
    m = len(gs)
    floor = 2.0 ** (m * lat.n)
    if a is None:
        a = 2.0 ** (m * lat.n + 2)
    if not a > floor:
        raise ValueError(
            f"stopping ratio a={a} must exceed 2^(m n) = {floor:g}"
        )

    outside = np.ones(lat.shape, dtype=bool)
    outside[_cube_slices(root, lat)] = False
    for g in gs:
        if np.any(g.values[outside] != 0.0):
            raise ValueError("root cube must contain the joint support")

    prefixes = [g.prefix() for g in gs]

    def cube_value(start: Tuple[int, ...], size: int) -> float:
        prod = 1.0
        for prefix in prefixes:
            block = prefix
            for axis, s in enumerate(start):
                block = block.take(
                    np.array([s + size]), axis=axis
                ) - block.take(np.array([s]), axis=axis)
            prod *= float(block.reshape(())) / float(size) ** lat.n
        return prod

    lambda0 = cube_value(root.start, root.size)
    owner = np.full(lat.shape, -1, dtype=np.int64)
    cubes: List[DyadicCube] = [root]
    owner[_cube_slices(root, lat)] = 0

    if lambda0 == 0.0:
        logger.debug("root product average is zero; family is the root alone")
    else:
        # depth-first walk: (start, size, env) where env is the largest
        # threshold index any ancestor has exceeded
        stack = [(root.start, root.size, 0)]
        while stack:
            start, size, env = stack.pop()
            if size == 1:
                continue
            half = size // 2
            for offsets in np.ndindex(*(2,) * lat.n):
                cstart = tuple(s + o * half for s, o in zip(start, offsets))
                val = cube_value(cstart, half)
                if val == 0.0:
                    continue
                exceed = 0
                tau = a * lambda0
                while val > tau:
                    exceed += 1
                    tau *= a
                if exceed > env:
                    M = half.bit_length() - 1
                    j = tuple(
                        (s - b) // half for s, b in zip(cstart, grid.base(M))
                    )
                    cube = grid.cube(lat.L - M, j)
                    owner[_cube_slices(cube, lat)] = len(cubes)
                    cubes.append(cube)
                stack.append((cstart, half, max(env, exceed)))

    regions: List[CellRegion] = []
    for idx, cube in enumerate(cubes):
        mask = owner == idx
        kept = int(np.count_nonzero(mask))
        total = cube.size**lat.n
        if kept < total / 2.0:
            raise SparsenessError(
                f"cube {cube.key()} keeps only {kept} of {total} cells; "
                f"the stopping ratio a={a:g} is too small for m={m}, "
                f"n={lat.n} — retry with a larger ratio (for example "
                f"a={4 * a:g})"
            )
        regions.append(CellRegion(lat, mask))

    return SparseFamily(
        grid_id=grid.grid_id,
        cubes=tuple(cubes),
        regions=tuple(regions),
        a=float(a),
        lambda0=float(lambda0),
        root=root,
    )


def sparse_operator(fam: SparseFamily, fs: Sequence[GridFunction]) -> GridFunction:
    """Sum over selected cubes of the product of averages times the cube."""
    if not fs:
        raise ValueError("need at least one grid function")
    lat = fs[0].lattice
    for f in fs[1:]:
        if f.lattice != lat:
            raise ValueError("all grid functions must share one lattice")
    out = np.zeros(lat.shape)
    for cube in fam.cubes:
        prod = 1.0
        for f in fs:
            prod *= cell_average(f, cube)
        out[_cube_slices(cube, lat)] += prod
    return GridFunction(lat, out)
