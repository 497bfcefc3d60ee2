"""Multiple-weight constants: supremands, family constants, and slot duality.

A weight vector ties m positive densities to an exponent tuple (p_1, ..., p_m)
with combined exponent 1/p = sum(1/p_i).  Its joint weight is
v = prod w_i^(p/p_i) and each slot has a dual sigma_i = w_i^(1 - p_i').  The
per-cube supremand averages v and the sigma_i over one cube; the family
constant is the sup over a whole cube family.  This demo walks those pieces
on a one-dimensional lattice.
"""
import numpy as np

from mweights import (
    CubeFamily,
    ExponentTuple,
    Lattice,
    ShiftedGridFamily,
    Weight,
    WeightVector,
    ap_constant,
    default_box,
    dualize,
    per_cube_ap,
)

lattice = Lattice(default_box(1), L=8)
print(f"lattice: box [{lattice.box.lo[0]}, {lattice.box.lo[0] + lattice.box.side}), "
      f"{lattice.shape[0]} cells of width {lattice.h}")

# --- the classical single-weight case ------------------------------------
et1 = ExponentTuple([2.0])
w = Weight.power(lattice, 0.5)          # |x|^(1/2)
wv1 = WeightVector([w], et1)
grid = ShiftedGridFamily(lattice).standard
Q = grid.cube(1, (0,))                  # the cube [0, 2) at generation 1
print("\nsingle weight |x|^(1/2), p = 2:")
print(f"  supremand on [0,2):    {per_cube_ap(wv1, Q):.6f}")
report = ap_constant(wv1, CubeFamily(lattice, kind="shifted"))
print(f"  family constant:       {report.constant:.6f}")
print(f"  attained on:           {report.argmax}")

# scanning cell-aligned cubes as well can only increase the constant
both = ap_constant(wv1, CubeFamily(lattice, kind="both"))
print(f"  with aligned cubes:    {both.constant:.6f} (supersets never decrease it)")

# --- a genuinely multilinear vector ---------------------------------------
et = ExponentTuple([2.0, 3.0])
rng = np.random.default_rng(7)
steps = Weight.from_values(lattice, 2.0 ** rng.integers(-2, 3, lattice.shape))
wv = WeightVector([Weight.power(lattice, 0.6), steps], et)
family = CubeFamily(lattice, kind="shifted")
base = ap_constant(wv, family).constant
print(f"\npair (|x|^0.6, dyadic steps), P = (2, 3), p = {et.p:.4f}:")
print(f"  family constant:       {base:.6f}")

# rescaling any component leaves every supremand untouched
scaled = WeightVector([wv.weights[0], Weight.from_values(lattice, 17.0 * steps.values)], et)
print(f"  after w_2 -> 17 w_2:   {ap_constant(scaled, family).constant:.6f} (unchanged)")

# dualizing slot i raises the constant to the power p_i'/p, exactly
for i in range(et.m):
    dual_const = ap_constant(dualize(wv, i), family).constant
    predicted = base ** (et.conjugates[i] / et.p)
    print(f"  slot-{i + 1} dual: {dual_const:.6f}  vs  base^(p_{i + 1}'/p) = {predicted:.6f}")
