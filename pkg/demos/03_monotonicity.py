"""Error of each diffusion variant as the kernel rate alpha grows.

A second-derivative operator built from kernel convolutions should get
more accurate as alpha increases. H3 does, for every k. The H1 and H2
baselines do not: at k=1 their error on sin 2x rises between doublings,
and on sin x the rise shows up on a finer (quarter-octave) alpha ladder.
"""
from kernelpde.legacy import (ALPHA_DOUBLINGS, ALPHA_QUARTER_OCTAVES, is_nonincreasing,
                              monotonicity_probe)

# %% Doublings alpha = 2 .. 256
for tf in ("sin_x", "sin_2x"):
    for v in ("H1", "H2", "H3"):
        errs = [e for _, e in monotonicity_probe(v, 1, tf, ALPHA_DOUBLINGS)]
        tag = "monotone" if is_nonincreasing(errs) else "NOT monotone"
        print(f"{tf:6s} {v}  k=1  {tag:13s}", " ".join(f"{e:.2e}" for e in errs))

# %% Quarter octaves for sin x
for v in ("H1", "H2", "H3"):
    errs = [e for _, e in monotonicity_probe(v, 1, "sin_x", ALPHA_QUARTER_OCTAVES)]
    rises = [a for (a, _), e0, e1 in zip(zip(ALPHA_QUARTER_OCTAVES[1:], errs[1:]), errs, errs[1:])
             if e1 > 1.01 * e0]
    print(f"sin_x {v}  first rises at alpha =", [round(a, 3) for a in rises[:4]])
