"""Dyadic and multilinear maximal operators over shifted grids.

Every scan walks whole generations at once: for generation ``g`` the cube
averages of all cubes meeting the box are computed from prefix sums in one
vectorized pass, then scattered back onto the cells they cover.  Averages
always divide by the full cube volume, so cubes sticking out of the box are
diluted by the mass they miss; this keeps the lower/upper bracket of
``multilinear_maximal`` valid.  The weighted variant instead divides by the
weight mass actually inside the box, which is the natural normalization for
a weight living on the box alone.
"""
from __future__ import annotations

import logging
from typing import List, Sequence, Tuple

import numpy as np

from ..grid import DyadicGrid, GridFunction, Lattice, ShiftedGridFamily
from ..weights import Weight

logger = logging.getLogger(__name__)

__all__ = ["dyadic_maximal", "multilinear_maximal", "weighted_dyadic_maximal"]


def _padded_prefix(values: np.ndarray) -> np.ndarray:
    out = values
    for axis in range(values.ndim):
        out = np.cumsum(out, axis=axis)
        pad = [(0, 0)] * values.ndim
        pad[axis] = (1, 0)
        out = np.pad(out, pad)
    return out


def _generation_layout(grid: DyadicGrid, g: int):
    """Clipped cell ranges of every generation-``g`` cube meeting the box.

    Returns per-axis arrays ``(los, his)`` of clipped cell bounds, plus the
    per-axis map from cell index to cube slot.
    """
    lat = grid.lattice
    N = lat.cells_per_axis
    size = 2 ** (lat.L - g)
    base = grid.base(lat.L - g)
    los, his, cell_slots = [], [], []
    for b in base:
        j_min = -((size + b - 1) // size)
        j_max = (N - 1 - b) // size
        starts = np.arange(j_min, j_max + 1) * size + b
        los.append(np.clip(starts, 0, N))
        his.append(np.clip(starts + size, 0, N))
        cell_slots.append((np.arange(N) - b) // size - j_min)
    return los, his, cell_slots


def _box_sums(prefix: np.ndarray, los, his) -> np.ndarray:
    """Sums of values over each clipped cube, one axis at a time."""
    out = prefix
    for axis in range(prefix.ndim):
        out = out.take(his[axis], axis=axis) - out.take(los[axis], axis=axis)
    return out


def _check_inputs(fs: Sequence[GridFunction], g_min: int) -> Lattice:
    if not fs:
        raise ValueError("need at least one grid function")
    lat = fs[0].lattice
    for f in fs[1:]:
        if f.lattice != lat:
            raise ValueError("all grid functions must share one lattice")
    if g_min > lat.L:
        raise ValueError(f"g_min={g_min} exceeds the finest generation L={lat.L}")
    return lat


def dyadic_maximal(
    fs: Sequence[GridFunction], grid: DyadicGrid, g_min: int = -2
) -> GridFunction:
    """Cellwise sup over one grid's cube chain of the product of averages.

    For each cell the scan takes every generation ``g_min..L`` cube of
    ``grid`` containing it and records the largest product of full-volume
    averages of the inputs.
    """
    lat = _check_inputs(fs, g_min)
    if grid.lattice != lat:
        raise ValueError("grid and functions must share one lattice")
    prefixes = [f.prefix() for f in fs]
    out = np.zeros(lat.shape)
    for g in range(g_min, lat.L + 1):
        size = 2 ** (lat.L - g)
        los, his, cell_slots = _generation_layout(grid, g)
        vals = np.ones([len(lo) for lo in los])
        for prefix in prefixes:
            vals = vals * (_box_sums(prefix, los, his) / float(size) ** lat.n)
        per_cell = vals[np.ix_(*cell_slots)]
        np.maximum(out, per_cell, out=out)
    return GridFunction(lat, out)


def multilinear_maximal(
    fs: Sequence[GridFunction], g_min: int = -2
) -> Tuple[GridFunction, GridFunction]:
    """Certified bracket for the maximal product of averages over all cubes.

    Returns ``(lower, upper)``: ``lower`` is the cellwise max of the dyadic
    scans over every shifted grid, a true lower bound for the sup over all
    axis-parallel cubes; ``upper`` multiplies the sum of those scans by
    ``6**(m*n)``, which covers any cube by a dyadic one of comparable size.
    """
    lat = _check_inputs(fs, g_min)
    family = ShiftedGridFamily(lat)
    per_grid: List[np.ndarray] = [
        dyadic_maximal(fs, grid, g_min=g_min).values for grid in family.grids
    ]
    lower = per_grid[0].copy()
    total = per_grid[0].copy()
    for vals in per_grid[1:]:
        np.maximum(lower, vals, out=lower)
        total += vals
    factor = 6.0 ** (len(fs) * lat.n)
    return GridFunction(lat, lower), GridFunction(lat, factor * total)


def weighted_dyadic_maximal(
    f: GridFunction, w: Weight, grid: DyadicGrid, g_min: int = -2
) -> GridFunction:
    """Cellwise sup of weighted averages ``∫_Q f w / w(Q)`` over one grid.

    Both integrals run over the part of the cube inside the box, so the
    normalization is the weight mass actually present; a cube whose inside
    weight mass underflows to zero contributes zero and is logged.
    """
    lat = _check_inputs([f], g_min)
    if w.lattice != lat or grid.lattice != lat:
        raise ValueError("function, weight, and grid must share one lattice")
    wm = w.cell_masses()
    num_prefix = _padded_prefix(f.values * wm)
    den_prefix = _padded_prefix(wm)
    out = np.zeros(lat.shape)
    for g in range(g_min, lat.L + 1):
        los, his, cell_slots = _generation_layout(grid, g)
        num = _box_sums(num_prefix, los, his)
        den = _box_sums(den_prefix, los, his)
        empty = den <= 0.0
        if np.any(empty):
            logger.debug(
                "generation %d: %d cubes carry zero weight mass; treated as zero",
                g,
                int(np.count_nonzero(empty)),
            )
        with np.errstate(invalid="ignore", divide="ignore"):
            vals = np.where(empty, 0.0, num / np.where(empty, 1.0, den))
        per_cell = vals[np.ix_(*cell_slots)]
        np.maximum(out, per_cell, out=out)
    return GridFunction(lat, out)
