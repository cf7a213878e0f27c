"""
Closed-form expectations against simulation
===========================================

The mean numbers of free faces, of hollow simplices with a free first face,
and of faces in each dimension are exact at every n.  A few hundred seeded
trials should land within a few standard errors of them.
"""

from sclab import harness
from sclab.sampler import ProbabilitySchedule

cfg = harness.ExperimentConfig(
    "walkthrough", n=(20, 40), schedule=ProbabilitySchedule.explicit([0.5, 0.4]), k=2,
    trials=300, master_seed=1, observables=("N", "M", "f_vector"))
res = harness.run(cfg)

for n, s in res.summaries.items():
    print(f"n = {n}")
    for name in ("N", "M", "f1", "f2"):
        m = s.observables[name]
        print(f"  {name:>3}: mean {m['mean']:9.3f} +/- {m['se']:.3f}   theory {s.theory[name]:9.3f}   z {s.z[name]:+.2f}")

# Per-trial records go to CSV, summaries to JSON.
print(res.csv().splitlines()[0])
