"""Upper-bound audits and the library selftest.

The sweeps measure growth from below; the audits check the other direction.
For random inputs and random admissible weights (power laws and dyadic
steps), the quotient

    (operator norm ratio) / (weight constant)^(predicted exponent)

should stay bounded — the predicted power really is an upper bound.  The
report records the worst quotient seen.  The selftest bundles the same
cross-module identities the test suite enforces, as one quick health check.
"""
from mweights import upper_bound_audit
from mweights.selftest import run_selftest

for operator, P in (("sparse", (2.0, 2.0)), ("sparse", (4.0, 4.0)), ("maximal", (2.0, 3.0))):
    report = upper_bound_audit(P, L=6, trials=25, seed=3, operator=operator)
    print(f"{operator:8s} P={P}: target exponent {report.target_exponent:.3f}, "
          f"max quotient {report.max_quotient:.4f} over "
          f"{report.trials - report.skipped} trials ({report.skipped} degenerate)")

print("\nselftest:")
results = run_selftest(seed=0)
for name, ok, detail in results:
    print(f"  {'ok  ' if ok else 'FAIL'} {name}: {detail}")
failures = sum(1 for _, ok, _ in results if not ok)
print(f"{len(results) - failures}/{len(results)} checks passed")
