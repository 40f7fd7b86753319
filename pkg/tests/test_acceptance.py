"""The eleven acceptance criteria, each printing one PASS/FAIL line."""
import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from scipy import linalg

from ergodic_gc.admissible import all_gating_passed, get_spec, run_all_checks
from ergodic_gc.anderson import (assemble, eigenvalue_counting, pastur_shubin_estimate,
                                 spectral_tolerance)
from ergodic_gc.bounds import (BoundInputs, anderson_bound, empmeasure_bound, geometric_bound,
                               percolation_bound)
from ergodic_gc.cli import main
from ergodic_gc.empirical import (empmeasure_lhs, full_error_decomposition, gc_sup_statistic,
                                  uniform_cdf_reference)
from ergodic_gc.field import (BaseLaw, bernoulli, marginal_pmf_bruteforce,
                              product_model, sample_window, uniform)
from ergodic_gc.lattice import Box
from ergodic_gc.monotone import discrete_graph_mass, is_monotone_graph, is_strictly_monotone_graph
from ergodic_gc.percolation import cluster_counting_function, cluster_histograms
from ergodic_gc.rng import derive_seed
from ergodic_gc.stepfn import sup_distance


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n[criterion {number:2d}] {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return emit


def test_01_classical_gc(report):
    spec, model = get_spec("classical-cdf"), product_model(1, uniform())
    stats = [gc_sup_statistic(spec, model, 1, 0, 10_000, s, 10_000).stat for s in range(10)]
    report(1, max(stats) <= 0.03, f"classical GC: max stat {max(stats):.4f} <= 0.03 over 10 seeds")


def test_02_percolation_closed_forms(report):
    p = Fraction(3, 10)
    c1_target = float((1 - p) + p * (1 - p) ** 4)
    model = product_model(2, bernoulli(p))
    c1 = np.mean([float(cluster_histograms(sample_window(model, Box(2, 400), derive_seed(7, "c", i)))[2]
                        .get(1, 0)) for i in range(5)])
    q = Fraction(1, 2)
    a2_target = float(q * 2 * q ** 2 * (1 - q) ** 2)
    chain = sample_window(product_model(1, bernoulli(q)), Box(1, 10 ** 6), 11)
    a2 = float(cluster_histograms(chain)[0].get(2, 0))
    ok = abs(c1 - c1_target) <= 0.005 and abs(a2 - a2_target) <= 0.002
    report(2, ok, f"c(1)={c1:.5f} vs {c1_target:.5f}, a(2)={a2:.5f} vs {a2_target:.5f}")


def test_03_percolation_identities(report):
    rng = np.random.default_rng(3)
    bad = 0
    for i in range(100):
        d = int(rng.integers(1, 4))
        side = int(rng.integers(1, {1: 200, 2: 40, 3: 12}[d]))
        p = Fraction(int(rng.integers(0, 11)), 10)
        conf = sample_window(product_model(d, bernoulli(p)), Box(d, side), derive_seed(3, "id", i))
        a, b, c = cluster_histograms(conf)
        f = cluster_counting_function(conf)
        ok = all(c[m] == m * a[m] for m in a) and sum(c.values()) == 1 == sum(b.values())
        acc = Fraction(0)
        for m in range(1, max(a) + 1):
            acc += a.get(m, 0)
            ok &= Fraction(int(f(float(m))), len(conf)) == acc
        bad += not ok
    report(3, bad == 0, f"exact cluster identities: {bad} violations in 100 instances")


def test_04_bound_values(report):
    g = geometric_bound(BoundInputs(9, 8, 8, 1, 0, 1, 10, 100))
    a = anderson_bound(1, 0, 10, 100)
    p = percolation_bound(2, 0, 8, 200)
    errs = [abs(g - 46.0), abs(a - 968 / 45), abs(p - 329 / 12)]
    report(4, max(errs) <= 1e-12, f"geometric={g!r} anderson={a!r} percolation={p!r}")


def test_05_empmeasure_instancewise(report):
    rng = np.random.default_rng(5)
    models = {"anderson": [bernoulli("1/2"), uniform()], "percolation": [bernoulli("3/10"),
              bernoulli("6/10")], "classical-cdf": [uniform()]}
    worst, bad = -math.inf, 0
    for t in range(50):
        name = ("anderson", "percolation", "classical-cdf")[t % 3]
        spec = get_spec(name)
        laws = models[name]
        law = laws[int(rng.integers(len(laws)))]
        d = 1 if name == "anderson" else int(rng.integers(1, 3))
        m = int(rng.integers(2, 7))
        r = int(rng.integers(0, (m - 1) // 2 + 1))
        n = 2 * m + int(rng.integers(1, 40 if d == 2 else 200))
        conf = sample_window(product_model(d, law), Box(d, n), derive_seed(5, "emp", t))
        lhs, rhs = empmeasure_lhs(spec, conf, m, r), empmeasure_bound(spec, d, m, n, r)
        worst = max(worst, lhs - rhs)
        bad += lhs > rhs
    report(5, bad == 0, f"tile-average bound: {bad} violations in 50 instances, "
                        f"max lhs-rhs {worst:.3g}")


@pytest.mark.slow
def test_06_admissibility_suites(report):
    lines, ok = [], True
    for name, d in (("anderson", 1), ("anderson", 2), ("percolation", 2), ("classical-cdf", 1)):
        spec = get_spec(name)
        reps = run_all_checks(spec, spec.model(d), 200, master_seed=6)
        ok &= all_gating_passed(reps)
        failed = [r.name for r in reps if r.gating and not r.passed]
        lines.append(f"{name}/d={d}:{'ok' if not failed else failed}")
    report(6, ok, "admissibility, 200 trials per property: " + " ".join(lines))


def _ldl_count(h: np.ndarray, x: float) -> int:
    _, dm, _ = linalg.ldl(h - x * np.eye(len(h)))
    return int(np.sum(np.linalg.eigvalsh(dm) <= 0))


def test_07_anderson_inertia(report):
    rng = np.random.default_rng(7)
    checked, bad = 0, 0
    for i in range(100):
        d = int(rng.integers(1, 3))
        side = int(rng.integers(1, 30 if d == 1 else 7))
        law = bernoulli("1/2") if i % 2 else uniform()
        conf = sample_window(product_model(d, law), Box(d, side), derive_seed(7, "inst", i))
        f, h = eigenvalue_counting(conf), assemble(conf).matrix
        ev, tol = np.linalg.eigvalsh(h), spectral_tolerance(conf)
        for x in rng.uniform(-0.5, 4 * d + 1.5, 20):
            if np.min(np.abs(ev - x)) <= tol:
                continue
            checked += 1
            bad += int(f(x)) != _ldl_count(h, x)
    report(7, bad == 0, f"counting vs LDL inertia: {bad} mismatches in {checked} energies")


@pytest.mark.slow
def test_08_anderson_convergence(report):
    model = product_model(1, bernoulli("1/2"))
    ref = pastur_shubin_estimate(model, 500, 200, derive_seed(8, "reference"))
    d_pairs, d_refs = [], []
    for seed in range(3):
        fs = {n: eigenvalue_counting(sample_window(model, Box(1, n), derive_seed(seed, "field", n))) / n
              for n in (1000, 2000)}
        d_pairs.append(sup_distance(fs[1000], fs[2000]))
        d_refs.append(sup_distance(fs[2000], ref.value))
    ok = max(d_pairs) <= 0.05 and max(d_refs) <= 0.05 + ref.ci_radius
    report(8, ok, f"IDS: max d(1000,2000)={max(d_pairs):.4f}, max d(2000,ref)={max(d_refs):.4f} "
                  f"<= 0.05+{ref.ci_radius:.4f}")


def test_09_full_decomposition(report):
    spec, model = get_spec("classical-cdf"), product_model(1, uniform())
    ref = uniform_cdf_reference(model)
    reps = [full_error_decomposition(spec, model, 10, 0, 1000, s, 1000, ref) for s in range(10)]
    margin = min(r.geom_bound + r.gc_stat + r.slack - r.lhs for r in reps)
    report(9, all(r.passed for r in reps),
           f"decomposition on 10 seeds: max lhs {max(r.lhs for r in reps):.4f}, min margin {margin:.4f}")


def _random_strict_graph(rng, candidates, s):
    pts = []
    for i in rng.permutation(len(candidates)):
        trial = pts + [candidates[i]]
        if is_strictly_monotone_graph(trial, s):
            pts = trial
    return pts


def test_10_monotone_graphs(report):
    rng = np.random.default_rng(10)
    bad = 0
    for _ in range(1000):
        k = int(rng.integers(1, 5))
        pts = [tuple(int(v) for v in rng.integers(-2, 3, k)) for _ in range(int(rng.integers(1, 9)))]
        s = tuple(int(v) for v in rng.choice([-1, 1], k))
        bad += is_strictly_monotone_graph(pts, s) and not is_monotone_graph(pts, s)
    mass_bad = 0
    for t in range(100):
        k = int(rng.integers(1, 4))
        values = sorted(set(int(v) for v in rng.integers(-3, 4, int(rng.integers(2, 4)))))
        if len(values) < 2:
            values = [0, 1]
        weights = rng.integers(1, 6, len(values))
        law = BaseLaw("discrete", values=tuple(values),
                      probs=tuple(Fraction(int(w), int(weights.sum())) for w in weights))
        pmf = marginal_pmf_bruteforce(product_model(1, law), Box(1, k))
        s = tuple(int(v) for v in rng.choice([-1, 1], k))
        grid = [tuple(Fraction(v) for v in c) for c in product(values + [max(values) + 1], repeat=k)]
        graph = _random_strict_graph(rng, grid, s)
        on_graph = set(graph)
        expected = sum((q for x, q in pmf.items() if x in on_graph), Fraction(0))
        mass_bad += discrete_graph_mass(pmf, graph, s) != expected
    report(10, bad == 0 and mass_bad == 0,
           f"monotone graphs: {bad} strict-not-monotone in 1000 sets, "
           f"{mass_bad} mass mismatches in 100 measures")


@pytest.mark.slow
def test_11_determinism(report, tmp_path):
    runs = {
        "gc-classic": ["gc-classic", "--n", "2000", "-S", "500", "--seeds", "0,1,2"],
        "ids": ["ids", "--n-list", "200,400", "--R", "40", "-S", "20", "--threshold", "1"],
        "percolation": ["percolation", "--n", "60", "-S", "3", "--m-max", "5", "--box-side", "11",
                        "--ref-samples", "60"],
        "check": ["check", "--spec", "anderson", "--trials", "20"],
        "decompose": ["decompose", "--spec", "percolation", "--d", "2", "--m", "4", "--n", "20",
                      "-S", "30", "--ref-samples", "30", "--m-max", "4", "--box-side", "9"],
    }
    same = []
    for kind, argv in runs.items():
        out = [tmp_path / f"{kind}-{w}.csv" for w in (1, 2, 3)]
        for w, path in zip((1, 2, 3), out):
            main(argv + ["--workers", str(w), "--out", str(path)])
        blobs = {p.read_bytes() for p in out}
        same.append(len(blobs) == 1)
    report(11, all(same), f"byte-identical CSV across workers 1/2/3: "
                          f"{dict(zip(runs, same))}")
