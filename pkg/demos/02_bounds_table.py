"""Tabulate the truncation error bounds and probe the certification frontier.

Prints the squared Hilbert-Schmidt bound, the trace-deficit bound, and the
trace-distance bound per cutoff, then shows how the cutoff selector refuses
circuits below the depth threshold.
"""

from iqpdamp import (
    CertificationError,
    depth_threshold,
    hs_truncation_bound,
    select_k,
    td_truncation_bound,
    trace_deficit_bound,
)

n, d, p = 8, 40, 0.3
print(f"bounds for n={n} d={d} p={p} (depth threshold {depth_threshold(n, p):.1f})\n")
print(f"{'k':>3} {'hs_bound':>12} {'trace_bound':>12} {'td_bound':>12}")
for k in range(9):
    print(f"{k:>3} {hs_truncation_bound(n, d, p, k):>12.3e} "
          f"{trace_deficit_bound(n, d, p, k):>12.3e} "
          f"{td_truncation_bound(n, d, p, k):>12.3e}")

print("\ncutoff chosen per target error at this depth:")
for epsilon in (0.5, 0.2, 0.05, 0.01):
    budget = select_k(n, d, p, epsilon)
    print(f"  epsilon={epsilon:<5} -> k={budget.k}  (td bound {budget.td_bound:.2e} "
          f"<= delta {budget.delta:.3f})")

shallow = 10
print(f"\nat depth {shallow} the same request is refused:")
try:
    select_k(n, shallow, p, 0.2)
except CertificationError as exc:
    print(f"  {exc}")
