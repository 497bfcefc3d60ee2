"""Bilinear Riesz transform: quadrature, symmetry, pairing, and the cone bound.

The bilinear Riesz transform integrates the kernel
    K(x, y1, y2) = ((x - y1) + (x - y2)) / (|x - y1|^2 + |x - y2|^2)^(3/2)
against two inputs.  The toolkit evaluates it by a midpoint double sum over
lattice cells, exact in the cell masses.  Three structural facts are shown:

1. odd symmetry — a symmetric input pair gives zero at the center;
2. the adjoint pairing — moving the evaluation point into the first kernel
   slot is the exact discrete adjoint;
3. the cone lower bound — for the spike pair used by the sharpness sweeps,
   epsilon times the transform stays bounded below on the evaluation side,
   which is the engine of the lower-bound experiments.
"""
import numpy as np

from mweights import (
    GridFunction,
    Lattice,
    bilinear_riesz,
    default_box,
    riesz_extremal,
)

lattice = Lattice(default_box(1), L=8)
N = lattice.shape[0]
mids = lattice.box.lo[0] + (np.arange(N) + 0.5) * lattice.h

# 1. symmetry: indicator of [-1, 1] in both slots, evaluated at the origin
sym_vals = np.zeros(lattice.shape)
sym_vals[N // 4 : 3 * N // 4] = 1.0
f_sym = GridFunction(lattice, sym_vals)
center = bilinear_riesz(f_sym, f_sym, np.array([0.0]))
print(f"symmetric pair at x = 0: {float(center.values[0]):+.2e} (odd kernel cancels)")

# 2. pairing: sum R(g1,g2) g3 = sum R*(g3,g2) g1, cell measure on both sides
rng = np.random.default_rng(5)
g1, g2, g3 = (
    GridFunction(lattice, rng.uniform(0.0, 1.0, lattice.shape)) for _ in range(3)
)
direct = bilinear_riesz(g1, g2, mids, variant="direct")
adjoint = bilinear_riesz(g3, g2, mids, variant="adjoint_slot1")
lhs = float(np.sum(direct.values * g3.values) * lattice.h)
rhs = float(np.sum(adjoint.values * g1.values) * lattice.h)
print(f"pairing identity: {lhs:.10f} vs {rhs:.10f} "
      f"(relative gap {abs(lhs - rhs) / abs(lhs):.2e})")

# 3. the cone bound under sharpening spikes: eps * R stays bounded below
print("\nspike pair |y|^(eps-1), |y|^((eps-1)/2) on [-1,0], evaluated on (0,1]:")
print("  eps        min over region of eps * R / |x|^(3(eps-1)/2)")
for k in range(2, 6):
    eps = 2.0**-k
    fs, wv, region = riesz_extremal((2.0, 2.0), eps, lattice, variant="direct")
    idx = np.nonzero(region.mask)[0]
    points = lattice.box.lo[0] + (idx + 0.5) * lattice.h
    rv = bilinear_riesz(fs[0], fs[1], points, variant="direct")
    profile = np.abs(points) ** (1.5 * (eps - 1.0))
    print(f"  2^-{k}     {np.min(eps * rv.values / profile):.4f}")
print("  (a positive, eps-uniform floor: the transform grows like 1/eps)")
