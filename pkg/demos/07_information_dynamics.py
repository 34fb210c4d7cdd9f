"""
Cross transfer entropy and active information storage
=====================================================

The cross estimators extend to conditional MI on time-delay embeddings: a
test recording can be scored against the dynamics learned from a reference
recording.
"""

import numpy as np

from crossmi import PairedSeries
from crossmi.estimators import (active_information_storage,
                                cross_transfer_entropy, transfer_entropy)


def driven(n, coupling, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    y = np.r_[0.0, coupling * x[:-1] + 0.3 * rng.standard_normal(n - 1)]
    return PairedSeries(x, y)


reference = driven(2000, 0.8, 0)
print(f"TE x->y of the reference: {transfer_entropy(reference).mean:.3f} nats")

for coupling in (0.8, 0.4, 0.0):
    test = driven(300, coupling, 1)
    print(f"test with coupling {coupling}: cross TE under the reference = "
          f"{cross_transfer_entropy(test, reference).mean:+.3f}")

ar = np.zeros(2000)
noise = np.random.default_rng(2).standard_normal(2000)
for t in range(1, 2000):
    ar[t] = 0.8 * ar[t - 1] + noise[t]
r1 = np.corrcoef(ar[1:], ar[:-1])[0, 1]
print(f"AIS of an AR(1) series: {active_information_storage(ar).mean:.3f} nats "
      f"(Gaussian value for the sample lag-1 correlation: {-0.5 * np.log(1 - r1 * r1):.3f})")
