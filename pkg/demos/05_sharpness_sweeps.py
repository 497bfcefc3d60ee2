"""Sharpness sweeps: measuring growth exponents against the weight constant.

Each sweep point builds a spike family at strength eps: inputs with a
singularity of order eps at the origin and a power weight tuned so that the
weight constant blows up as eps shrinks.  The row records the constant, the
operator lower-bound norm, and the input norms; fitting log(ratio) against
log(constant) measures how fast the operator norm can grow with the weight
constant.  The measured slopes match the predicted sharp exponents:

  maximal, P = (2,2):   exponent max(p_i'/p) = 2
  maximal, P = (4,4/3): exponent max(p_i'/p) = 4
  riesz direct (2,2):   exponent max(1, p_i'/p) = 2
  riesz adjoint (4,4):  exponent 1 (the regime p > max p_i')

Outputs (CSV, fit JSON, gnuplot script) land in demos/out/.
"""
import pathlib

from mweights import (
    fit_exponent,
    maximal_problem,
    riesz_problem,
    run_sweep,
    write_fit_json,
    write_gnuplot,
    write_sweep_csv,
)

out_dir = pathlib.Path(__file__).resolve().parent / "out"
out_dir.mkdir(exist_ok=True)

eps_maximal = [2.0**-k for k in range(2, 10)]
eps_riesz = [2.0**-k for k in range(2, 8)]

runs = [
    ("maximal-2-2", maximal_problem, (2.0, 2.0), eps_maximal, 10, {}, 2.0),
    ("maximal-4-43", maximal_problem, (4.0, 4.0 / 3.0), eps_maximal, 10, {}, 4.0),
    ("riesz-direct-2-2", riesz_problem, (2.0, 2.0), eps_riesz, 9,
     {"variant": "direct"}, 2.0),
    ("riesz-adjoint-4-4", riesz_problem, (4.0, 4.0), eps_riesz, 9,
     {"variant": "adjoint_slot1"}, 1.0),
]

for name, builder, P, eps_list, L, kwargs, predicted in runs:
    rows = run_sweep(builder, P, eps_list, L=L, **kwargs)
    fit = fit_exponent(rows)
    csv_path = out_dir / f"{name}.csv"
    write_sweep_csv(rows, csv_path)
    write_fit_json(fit, out_dir / f"{name}-fit.json")
    write_gnuplot(csv_path, out_dir / f"{name}.gp", fit=fit)
    print(f"{name:22s} slope {fit.slope:+.4f}  predicted {predicted:+.4f}  "
          f"residual {fit.residual:.3f}  ({len(rows)} rows)")

print(f"\nwrote CSV / fit JSON / gnuplot scripts to {out_dir}")
print("render a plot with e.g.:  gnuplot demos/out/maximal-2-2.gp > plot.svg")
