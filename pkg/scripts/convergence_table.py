"""Error decomposition over an (m, n) grid: measured distance to the limit
against the geometric bound plus the Monte Carlo statistic."""
import argparse
import sys

from ergodic_gc.cli import main


def parse():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--spec", default="classical-cdf")
    ap.add_argument("--d", default="1")
    ap.add_argument("--m-list", default="5,10,20")
    ap.add_argument("--n-list", default="200,1000,4000")
    ap.add_argument("--seeds", default="0,1,2")
    ap.add_argument("-S", default="500")
    ap.add_argument("--workers", default="1")
    ap.add_argument("--out")
    return ap.parse_args()


if __name__ == "__main__":
    a = parse()
    argv = ["decompose", "--spec", a.spec, "--d", a.d, "--m-list", a.m_list, "--n-list", a.n_list,
            "--seeds", a.seeds, "-S", a.S, "--workers", a.workers]
    if a.out:
        argv += ["--out", a.out]
    sys.exit(main(argv))
