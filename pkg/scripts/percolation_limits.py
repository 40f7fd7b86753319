"""Cluster statistics of site percolation on Z^d: per-vertex cluster-size
frequencies on a large box next to the censored center-cluster estimates."""
import argparse
from fractions import Fraction

from ergodic_gc.field import bernoulli, product_model, sample_window
from ergodic_gc.lattice import Box
from ergodic_gc.percolation import cluster_histograms, limit_estimates
from ergodic_gc.rng import derive_seed

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--p", default="3/10")
ap.add_argument("--d", type=int, default=2)
ap.add_argument("--n", type=int, default=400)
ap.add_argument("--m-max", type=int, default=10)
ap.add_argument("--box-side", type=int, default=41)
ap.add_argument("-S", type=int, default=2000)
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("--workers", type=int, default=1)
args = ap.parse_args()

p = Fraction(args.p)
model = product_model(args.d, bernoulli(p))
est = limit_estimates(model, args.m_max, args.box_side, args.S, derive_seed(args.seed, "reference"),
                      args.workers)
a, b, c = cluster_histograms(sample_window(model, Box(args.d, args.n), derive_seed(args.seed, "field")))
print(f"kappa_hat={est.kappa:.5f}  ci={est.ci:.4f}  edge-touch rate={est.touch_rate:.4f}")
if args.d == 2:
    print(f"c(1) closed form {float((1 - p) + p * (1 - p) ** 4):.5f}")
print(f"{'m':>3} {'a(m)':>9} {'c(m)':>9} {'pmf_hat':>9} {'theta_hat':>9}")
for m in range(1, args.m_max + 1):
    print(f"{m:>3} {float(a.get(m, 0)):>9.5f} {float(c.get(m, 0)):>9.5f} "
          f"{float(est.pmf[m - 1]):>9.5f} {float(est.theta(float(m))):>9.5f}")
