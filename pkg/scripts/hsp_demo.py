"""Hidden subgroup sampling on Z2^6 across a few theories."""
import numpy as np

from cqmkit.abgroup import FinAbGroup, generate
from cqmkit.hsp import (default_samples, hiding_function, reconstruct_subgroup, run_subroutine,
                        sample_characters, theorem_residual)
from cqmkit.semiring import COMPLEX, REAL

rng = np.random.default_rng(7)
G = FinAbGroup((2,) * 6)
H = generate(G, [(1, 1, 0, 0, 0, 0), (0, 0, 1, 1, 1, 0)])
f = hiding_function(G, H)
for t in (COMPLEX, REAL):
    outs = run_subroutine(f, t)
    ok, res = theorem_residual(outs, f, t)
    print(f"{t.name}: outcome distribution as predicted={ok} (residual {res:.1e})")

k = default_samples(G)
hits = sum(reconstruct_subgroup(sample_characters(run_subroutine(f, COMPLEX, check=False), k, rng), G).same(H)
           for _ in range(50))
print(f"{k} samples recover H in {hits}/50 runs")
