"""When does accelerated convergence come with monotone objective values?

Momentum methods overshoot: the objective can rise between iterations even
while converging fast.  On a quadratic the gradient-correction scheme
decouples per eigenvalue into a linear recursion whose characteristic
roots are real exactly when s >= (lambda - mu)/lambda^2, and real roots
mean no oscillation.  Maximizing the threshold over lambda gives 1/(4 mu),
so whenever L <= 4 mu the window [1/(4 mu), 1/L] offers acceleration and
monotonicity at once.  Below the window, a start aligned with an offending
eigenvector oscillates visibly.
"""

from accelcert import monotonic_window, monotonicity_scan

print("window for mu=1, L=3:", monotonic_window(1.0, 3.0))
print("window for mu=1, L=4:", monotonic_window(1.0, 4.0), "(degenerate)")
print("window for mu=1, L=5:", monotonic_window(1.0, 5.0), "(gone: L > 4 mu)")

print("\nscan across the window boundary (mu=1, spectrum {1, 3}):")
scan = monotonicity_scan(1.0, [1.0, 3.0], [0.20, 0.26, 0.30, 0.33], K=500,
                         x0_seed=8)
print(f"{'s':>6}  {'lambda':>7}  {'discriminant':>13}  {'predicted':>9}  "
      f"{'observed':>8}")
for row in scan.rows:
    print(f"{row.s:>6}  {row.lam:>7}  {row.discriminant:>13.4e}  "
          f"{str(row.predicted_monotone):>9}  {str(row.observed_monotone):>8}")
print("inside [0.25, 1/3] every eigenvalue has real roots and the runs are")
print("monotone; at s=0.20 the lambda=3 component has complex roots, so no")
print("monotonicity is predicted, yet this particular (misaligned) start")
print("still descends: the prediction is per eigencomponent, and only an")
print("aligned start is guaranteed to expose the oscillation, as below.")

print("\neigen-aligned start below the window (mu=0.1, lambda=2, s=0.05):")
aligned = monotonicity_scan(0.1, [0.1, 2.0], [0.05], K=500, x0=[0.0, 1.0])
for row in aligned.rows:
    r1, _ = row.roots
    kind = "real" if abs(r1.imag) < 1e-12 else "complex"
    print(f"lambda={row.lam}: roots {kind}, |root| = {abs(r1):.4f}")
(pred, obs), = aligned.per_s.values()
print(f"predicted monotone: {pred}; observed monotone: {obs} "
      "(the objective visibly oscillates)")
