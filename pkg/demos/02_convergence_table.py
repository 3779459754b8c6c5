"""Refinement study on the 1D nonlinear convection-diffusion example.

Reproduces the k=3 column block of the published table: max-norm error at
t=1 for CFL 0.5, 1 and 2, on grids 20..640. The order column is
log2(e_coarse / e_fine).
"""
from kernelpde.cli import format_convergence, paper_sci, run_convergence
from kernelpde.config import parse_config

cfg = parse_config({"command": "converge", "preset": "ex2_nonlinear", "k": 3,
                    "cfl": [0.5, 1.0, 2.0], "grids": "20..640"})

rows = run_convergence(cfg)
print(format_convergence(rows))

# %% Side by side with the published k=3 entries at n=640
published = {0.5: 1.4e-6, 1.0: 1.1e-5, 2.0: 7.8e-5}
for cfl, n, err, _ in rows:
    if n == 640:
        print(f"CFL={cfl:<4}  ours {paper_sci(err)}  published {paper_sci(published[cfl])}")
