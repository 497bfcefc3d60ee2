"""Exponent tuples, weights, the joint Muckenhoupt-type constant, and the
slot-duality transform.

A weight is modeled as a density ``values[cell] * |x|^exponent``: the values
array is cellwise constant and strictly positive, and the power factor is
integrated in closed form on every cell. This hybrid form is closed under the
pointwise powers and products the theory needs (joint weights, duals, the
slot-duality transform), so every cube average below is an exact mass ratio
rather than a quadrature.

Averages over a cube always divide by the full cube volume; mass outside the
root box is zero. Cube families may include cubes sticking out of the box,
whose supremand values are diluted accordingly and never dominate.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from .grid import (
    Box,
    CellRegion,
    DyadicCube,
    GridFunction,
    Lattice,
    ShiftedGridFamily,
    cell_average,
)
from .powermass import power_mass

__all__ = [
    "ExponentTuple",
    "Weight",
    "WeightVector",
    "ApReport",
    "CubeFamily",
    "per_cube_ap",
    "ap_constant",
    "dualize",
    "weight_from_config",
]

logger = logging.getLogger(__name__)

# treat p within this distance of 1 as p == 1 (dual exponent undefined)
_P_ONE_TOL = 1e-9


class ExponentTuple:
    """An m-tuple of Lebesgue exponents, each in (1, infinity).

    The harmonic combination p with 1/p = sum(1/p_i) and the per-slot
    conjugates p_i' = p_i/(p_i - 1) are derived on construction. The conjugate
    of p itself is only defined when p > 1.
    """

    def __init__(self, exponents: Sequence[float]):
        exps = tuple(float(p) for p in exponents)
        if len(exps) == 0:
            raise ValueError("exponent tuple must be nonempty")
        for p in exps:
            if not (1.0 < p < float("inf")):
                raise ValueError(f"exponent {p} is outside (1, inf)")
        self.exponents = exps
        self.m = len(exps)
        self.p = 1.0 / sum(1.0 / p for p in exps)
        self.conjugates = tuple(p / (p - 1.0) for p in exps)

    @property
    def p_conj(self) -> float:
        """Conjugate of the combined exponent p; requires p > 1."""
        if self.p <= 1.0 + _P_ONE_TOL:
            raise ValueError(f"p = {self.p} has no finite conjugate (need p > 1)")
        return self.p / (self.p - 1.0)

    def __repr__(self) -> str:
        return f"ExponentTuple({self.exponents})"

    def __eq__(self, other) -> bool:
        return isinstance(other, ExponentTuple) and self.exponents == other.exponents

    def __hash__(self) -> int:
        return hash(self.exponents)


@lru_cache(maxsize=64)
def _power_cell_masses(lattice: Lattice, exponent: float) -> np.ndarray:
    """Exact integral of |x|^exponent over every lattice cell (read-only)."""
    if exponent == 0.0:
        out = np.full(lattice.shape, lattice.cell_volume)
    else:
        out = np.zeros(lattice.shape)
        for idx in np.ndindex(*lattice.shape):
            out[idx] = power_mass(exponent, lattice.cell_region(idx))
    out.flags.writeable = False
    return out


class Weight:
    """Positive density values[cell] * |x|^exponent on a lattice.

    Construct with :meth:`power` (pure power weight, requires exponent > -n
    for local integrability), :meth:`from_values` (cellwise-constant weight),
    or :meth:`constant`. Products and pointwise powers stay in this class
    with exact exponent arithmetic; derived weights may leave the integrable
    range, in which case evaluating cell masses raises ValueError.
    """

    def __init__(
        self,
        lattice: Lattice,
        exponent: float = 0.0,
        values: Optional[np.ndarray] = None,
        _validate: bool = True,
    ):
        self.lattice = lattice
        self.exponent = float(exponent)
        if values is None:
            values = np.ones(lattice.shape)
        else:
            values = np.asarray(values, dtype=float)
        if _validate:
            if values.shape != lattice.shape:
                raise ValueError(
                    f"values shape {values.shape} != lattice shape {lattice.shape}"
                )
            if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
                raise ValueError("weight values must be finite and strictly positive")
        self.values = values
        self._masses: Optional[np.ndarray] = None
        self._density: Optional[GridFunction] = None

    # ---------------------------------------------------------- constructors
    @classmethod
    def power(cls, lattice: Lattice, a: float) -> "Weight":
        if not a > -lattice.n:
            raise ValueError(
                f"power weight |x|^{a} is not locally integrable in dimension {lattice.n}"
            )
        return cls(lattice, a)

    @classmethod
    def from_values(cls, lattice: Lattice, values: np.ndarray) -> "Weight":
        return cls(lattice, 0.0, values)

    @classmethod
    def constant(cls, lattice: Lattice, c: float = 1.0) -> "Weight":
        if not c > 0.0:
            raise ValueError("constant weight must be positive")
        return cls(lattice, 0.0, np.full(lattice.shape, float(c)))

    # --------------------------------------------------------------- algebra
    def __pow__(self, s: float) -> "Weight":
        s = float(s)
        return Weight(self.lattice, self.exponent * s, self.values**s, _validate=False)

    def __mul__(self, other: "Weight") -> "Weight":
        if self.lattice != other.lattice:
            raise ValueError("weights live on different lattices")
        return Weight(
            self.lattice,
            self.exponent + other.exponent,
            self.values * other.values,
            _validate=False,
        )

    # ------------------------------------------------------------ evaluation
    def cell_masses(self) -> np.ndarray:
        if self._masses is None:
            self._masses = self.values * _power_cell_masses(self.lattice, self.exponent)
        return self._masses

    def density(self) -> GridFunction:
        """Cell-averaged density (masses / cell volume) with prefix sums."""
        if self._density is None:
            self._density = GridFunction(
                self.lattice, self.cell_masses() / self.lattice.cell_volume
            )
        return self._density

    def average(self, cube: DyadicCube) -> float:
        return cell_average(self.density(), cube)

    def mass_on(self, region: CellRegion) -> float:
        return float(np.sum(self.cell_masses()[region.mask]))


class WeightVector:
    """Weights (w_1, ..., w_m) tied to an exponent tuple.

    Caches the joint weight prod w_i^(p/p_i) and the slot duals
    sigma_i = w_i^(1 - p_i').
    """

    def __init__(self, weights: Sequence[Weight], exponents: ExponentTuple):
        weights = tuple(weights)
        if len(weights) != exponents.m:
            raise ValueError(
                f"{len(weights)} weights for {exponents.m} exponents"
            )
        for w in weights[1:]:
            if w.lattice != weights[0].lattice:
                raise ValueError("all weights must share one lattice")
        self.weights = weights
        self.exponents = exponents
        self.lattice = weights[0].lattice
        self._joint: Optional[Weight] = None
        self._sigmas: dict = {}

    @property
    def m(self) -> int:
        return self.exponents.m

    @property
    def joint(self) -> Weight:
        if self._joint is None:
            P = self.exponents
            out = self.weights[0] ** (P.p / P.exponents[0])
            for w, p_i in zip(self.weights[1:], P.exponents[1:]):
                out = out * w ** (P.p / p_i)
            self._joint = out
        return self._joint

    def sigma(self, i: int) -> Weight:
        if i not in self._sigmas:
            self._sigmas[i] = self.weights[i] ** (1.0 - self.exponents.conjugates[i])
        return self._sigmas[i]


def per_cube_ap(wv: WeightVector, Q: DyadicCube) -> float:
    """Supremand of the joint-weight condition on one cube:
    avg_Q(joint) * prod_i avg_Q(sigma_i)^(p/p_i').

    Returns 0 (and logs) when any of the averages degenerates to zero mass,
    which can only happen through floating-point underflow of extreme
    exponents.
    """
    avg_joint = wv.joint.average(Q)
    if avg_joint == 0.0:
        logger.debug("degenerate zero joint-weight mass on %s; returning 0", Q)
        return 0.0
    out = avg_joint
    P = wv.exponents
    for i in range(P.m):
        avg_sig = wv.sigma(i).average(Q)
        if avg_sig == 0.0:
            logger.debug("degenerate zero dual-weight mass (slot %d) on %s", i, Q)
            return 0.0
        out *= avg_sig ** (P.p / P.conjugates[i])
    return out


@dataclass(frozen=True)
class CubeFamily:
    """Enumerable cube family over a lattice.

    kind "shifted": all cubes of the 2^n shifted dyadic grids with generation
    in [g_min, g_max] (default g_max = L) that intersect the root box,
    including cubes sticking out of it. kind "aligned": every cell-aligned
    cube fully inside the box, any integer size (brute force; small lattices
    only). kind "both": union of the two.
    """

    lattice: Lattice
    kind: str = "shifted"
    g_min: int = -2
    g_max: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("shifted", "aligned", "both"):
            raise ValueError(f"unknown cube family kind {self.kind!r}")

    @property
    def effective_g_max(self) -> int:
        return self.lattice.L if self.g_max is None else self.g_max

    def cubes(self) -> Iterator[DyadicCube]:
        if self.kind in ("shifted", "both"):
            family = ShiftedGridFamily(self.lattice)
            for g in range(self.g_min, self.effective_g_max + 1):
                for grid in family.grids:
                    yield from grid.cubes_intersecting_box(g)
        if self.kind in ("aligned", "both"):
            N = self.lattice.cells_per_axis
            for size in range(1, N + 1):
                for start in itertools.product(
                    range(N - size + 1), repeat=self.lattice.n
                ):
                    yield DyadicCube.aligned(start, size)

    @property
    def describe(self) -> str:
        return f"{self.kind}:g[{self.g_min},{self.effective_g_max}]:L{self.lattice.L}"


@dataclass(frozen=True)
class ApReport:
    """Result of maximizing the per-cube supremand over a cube family."""

    constant: float
    argmax: Optional[DyadicCube]
    scanned: int
    family: str

    def to_json(self) -> dict:
        arg = None
        if self.argmax is not None:
            arg = {
                "grid": self.argmax.grid_id,
                "g": self.argmax.g,
                "j": None if self.argmax.j is None else list(self.argmax.j),
                "start": list(self.argmax.start),
                "size": self.argmax.size,
            }
        return {
            "constant": self.constant,
            "argmax": arg,
            "scanned": self.scanned,
            "family": self.family,
        }


def ap_constant(wv: WeightVector, family: CubeFamily) -> ApReport:
    """Maximum of per_cube_ap over the family, with the argmax recorded.

    Deterministic: cubes are scanned in a fixed order and ties keep the first
    maximizer. A family containing no cubes is rejected.
    """
    best = float("-inf")
    arg: Optional[DyadicCube] = None
    scanned = 0
    for cube in family.cubes():
        scanned += 1
        val = per_cube_ap(wv, cube)
        if val > best:
            best, arg = val, cube
    if scanned == 0:
        raise ValueError(f"cube family {family.describe} is empty")
    return ApReport(best, arg, scanned, family.describe)


def dualize(wv: WeightVector, i: int) -> WeightVector:
    """Slot-duality transform: replace slot i by the joint weight raised to
    1 - p' and exponent p_i by p'.

    The per-cube supremand of the transformed vector equals that of the
    original raised to p_i'/p, cube by cube; this is an exact algebraic
    identity on averages and is what makes one-slot dual bounds equivalent to
    the primal ones. Requires p > 1.
    """
    P = wv.exponents
    if not 0 <= i < P.m:
        raise ValueError(f"slot {i} out of range for m={P.m}")
    p_conj = P.p_conj  # raises for p <= 1
    new_weights = list(wv.weights)
    new_weights[i] = wv.joint ** (1.0 - p_conj)
    new_exps = list(P.exponents)
    new_exps[i] = p_conj
    return WeightVector(new_weights, ExponentTuple(new_exps))


def weight_from_config(lattice: Lattice, cfg: dict) -> Weight:
    """Build a weight from a JSON-style config dict.

    {"type": "power", "a": <float>} or {"type": "grid", "path": <gridfn file>}.
    """
    kind = cfg.get("type")
    if kind == "power":
        return Weight.power(lattice, float(cfg["a"]))
    if kind == "grid":
        gf = GridFunction.load(cfg["path"])
        if gf.lattice != lattice:
            raise ValueError(
                f"grid weight lattice {gf.lattice} does not match {lattice}"
            )
        return Weight.from_values(lattice, gf.values)
    raise ValueError(f"unknown weight type {kind!r}")
