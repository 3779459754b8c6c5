"""CPU time needed to reach a given error: H3 against the prior-work operator.

Both run the heat equation u_t = u_xx to t=1 at CFL 1, each with its own
A-stability bound. At k=2 and k=3 the prior operator needs about one more
grid doubling to match the H3 error, so H3 reaches a given accuracy with
less CPU.
"""
from kernelpde.legacy import compare_efficiency, cpu_at_error

grids = (20, 40, 80, 160, 320, 640)
for k in (1, 2, 3):
    recs = compare_efficiency(k, grids, repeats=3)
    for r in recs:
        print(f"{r.variant:6s} k={k} n={r.n:4d}  cpu={r.cpu_seconds:.4f}s  err={r.linf_error:.2e}")
    target = 1e-4
    print(f"k={k}: CPU to reach {target:g}: H3 {cpu_at_error(recs, 'H3', target):.4f}s, "
          f"H_old {cpu_at_error(recs, 'H_old', target):.4f}s\n")
