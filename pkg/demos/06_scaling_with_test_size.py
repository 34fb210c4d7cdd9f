"""
Pooling test data into the reference
====================================

If the test samples are added to the reference before estimating it, the
cross MI depends on how many test samples there are. Keeping them apart
removes the dependence.
"""

from crossmi.simgen import ConditionSpec, scaling_experiment

reference = ConditionSpec(slope=0.5, noise_std=0.1, x_range=(-4, 4))
test = ConditionSpec(kind="SINUSOIDAL", amplitude=1.0, frequency=2.0,
                     noise_std=0.1, x_range=(-2, 2))
sizes = [50, 100, 200, 400, 800]

for pooled in (True, False):
    print("test pooled into reference" if pooled else "separate reference")
    for row in scaling_experiment(reference, test, sizes, pooled):
        print(f"  n_test={row.n_test:4d}  I_p={row.I_p:.2f}  I_q={row.I_q:.2f}  "
              f"CI_pq={row.CI_pq:+.2f}")
