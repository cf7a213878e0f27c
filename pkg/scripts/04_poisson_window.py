"""
The critical window for free edges
==================================

With p_1 = sqrt((1.5 log n + 0.5 log log n) / n) and p_2 = 1, the number of
free edges approaches a Poisson law with mean sqrt(1.5)/2.  Convergence is
slow: at desk scale the counts are still overdispersed.
"""

import numpy as np

from sclab import harness
from sclab.theory import critical_params

cfg = harness.preset("critical-poisson").replace(trials=400)
mu = critical_params(2, [0.5, 0.0], [0.5, 0.0]).mu
res = harness.run(cfg)

print(f"limit mean {mu:.4f}")
for n, s in res.summaries.items():
    N = np.array([r.N for r in res.records if r.n == n])
    print(f"n = {n:3d}: exact mean {s.theory['N']:.4f}  sample mean {N.mean():.4f}  "
          f"var/mean {N.var(ddof=1) / N.mean():.3f}  tv {s.poisson['tv_distance']:.4f}  "
          f"E[(N)_2] {s.factorial_moments['2']['value']:.4f} (limit {mu ** 2:.4f})")
