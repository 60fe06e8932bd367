"""Control sets, partial queries, and Monte-Carlo expectations.

Only the variables in the chosen control set are fixed by the caller; the
rest are drawn from known per-variable distributions.  Expectations over the
random part are bank averages with common random numbers.
"""

import numpy as np

from bocvs import (PartialQuery, SampleBank, assemble, expected_value,
                   sample_complement, truncnorm_family)

family = truncnorm_family(dim=4, sets=[(2, 4), (1, 2, 3, 4)], variance=0.02)
print("control sets:", family.sets)
print("complement of set 1:", family.complement(1))

rng = np.random.default_rng(0)
pq = PartialQuery(1, np.array([0.2, 0.9]))
comp = sample_complement(family, 1, rng)
print("assembled query:", np.round(assemble(family, pq, comp), 3))

# A shared bank makes candidate comparisons exact comparisons.
bank = SampleBank(family, count=256, seed=42)
g = lambda X: np.sin(3.0 * X).sum(axis=1)
for values in ([0.2, 0.9], [0.5, 0.5], [0.8, 0.1]):
    pq = PartialQuery(1, np.array(values))
    print(f"  E[g | controls={values}] = "
          f"{expected_value(g, family, pq, bank):+.4f}")

full = PartialQuery(2, np.array([0.2, 0.9, 0.4, 0.6]))
print("full control set is deterministic:",
      expected_value(g, family, full, bank))
