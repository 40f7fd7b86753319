"""Sup-distance between the empirical CDF of n uniform samples and its Monte
Carlo expectation, next to the DKW 99% radius."""
import argparse
import math

from ergodic_gc.admissible import get_spec
from ergodic_gc.empirical import gc_sup_statistic
from ergodic_gc.field import product_model, uniform

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--sizes", default="100,1000,10000")
ap.add_argument("--seeds", type=int, default=10)
ap.add_argument("-S", type=int, default=10_000)
args = ap.parse_args()

spec, model = get_spec("classical-cdf"), product_model(1, uniform())
print(f"{'n':>6} {'max stat':>9} {'dkw99':>9}")
for n in (int(x) for x in args.sizes.split(",")):
    worst = max(gc_sup_statistic(spec, model, 1, 0, n, s, args.S).stat for s in range(args.seeds))
    print(f"{n:>6} {worst:>9.4f} {math.sqrt(math.log(2 / 0.01) / (2 * n)):>9.4f}")
