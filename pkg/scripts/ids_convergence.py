"""Normalized eigenvalue counting functions of the Anderson model for growing
boxes, compared with each other and with a Pastur-Shubin estimate."""
import argparse

import numpy as np

from ergodic_gc.anderson import eigenvalue_counting, pastur_shubin_estimate
from ergodic_gc.field import bernoulli, product_model, sample_window
from ergodic_gc.lattice import Box
from ergodic_gc.rng import derive_seed
from ergodic_gc.stepfn import sup_distance

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--p", default="1/2")
ap.add_argument("--sizes", default="250,500,1000,2000,4000")
ap.add_argument("--R", type=int, default=500)
ap.add_argument("-S", type=int, default=200)
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("--workers", type=int, default=1)
args = ap.parse_args()

model = product_model(1, bernoulli(args.p))
ref = pastur_shubin_estimate(model, args.R, args.S, derive_seed(args.seed, "reference"), args.workers)
print(f"reference: R={args.R} S={args.S} ci={ref.ci_radius:.4f}")
print(f"{'n':>6} {'d(prev)':>9} {'d(ref)':>9}")
prev = None
for n in (int(x) for x in args.sizes.split(",")):
    f = eigenvalue_counting(sample_window(model, Box(1, n), derive_seed(args.seed, "field", n))) / n
    d_prev = sup_distance(f, prev) if prev is not None else np.nan
    print(f"{n:>6} {d_prev:>9.4f} {sup_distance(f, ref.value):>9.4f}")
    prev = f
