"""Command-line experiment runner.

Usage: ``ergodic-gc [run] <kind> [options]`` where kind is one of
gc-classic, ids, percolation, check, bound, decompose. Options may also come
from a JSON file given with ``--config``; command-line flags win.

Exit codes: 0 all checks passed, 1 a checked property failed, 2 invalid
configuration, 3 a resource cap was hit.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import sys
from dataclasses import dataclass, field

from . import __version__
from .errors import ConfigError, PreconditionError, ResourceCapError
from .field import FieldModel
from .parallel import resolve_workers

KINDS = ("gc-classic", "ids", "percolation", "check", "bound", "decompose")

DEFAULT_MODELS = {
    "gc-classic": {"kind": "product", "base_law": {"name": "uniform", "a": 0.0, "b": 1.0}},
    "ids": {"kind": "product", "base_law": {"name": "bernoulli", "p": "1/2"}},
    "percolation": {"kind": "product", "base_law": {"name": "bernoulli", "p": "3/10"}},
}

KIND_DEFAULTS = {
    "gc-classic": dict(spec="classical-cdf", d=1, m=1, r=0, n=10_000, samples=10_000,
                       threshold=0.03),
    "ids": dict(spec="anderson", d=1, n_list=[1000, 2000], R=500, samples=200, threshold=0.05),
    "percolation": dict(spec="percolation", d=2, n=400, samples=5, m_max=10, box_side=41,
                        ref_samples=2000),
    "check": dict(spec="anderson", d=1, trials=200),
    "bound": dict(formula="geometric", d=1, r=0, m=10, n=100),
    "decompose": dict(spec="classical-cdf", d=1, m=10, n=1000, r=0, samples=1000,
                      R=500, ref_samples=200, m_max=20, box_side=41),
}


@dataclass
class ExperimentConfig:
    kind: str
    spec: str | None = None
    model: dict | None = None
    d: int = 1
    m: int | None = None
    n: int | None = None
    r: int = 0
    m_list: list | None = None
    n_list: list | None = None
    samples: int | None = None
    ref_samples: int | None = None
    box_side: int | None = None
    R: int | None = None
    m_max: int | None = None
    trials: int | None = None
    formula: str | None = None
    K: float | None = None
    D: float | None = None
    D_prime: float | None = None
    r_prime: int | None = None
    threshold: float | None = None
    seed: int = 0
    seeds: list | None = None
    workers: int = field(default=1, compare=False)
    out: str | None = field(default=None, compare=False)

    def seed_list(self) -> list:
        return list(self.seeds) if self.seeds else [self.seed]

    def field_model(self) -> FieldModel:
        spec_default = None
        if self.model is None:
            if self.kind in DEFAULT_MODELS:
                spec_default = DEFAULT_MODELS[self.kind]
            else:
                from .admissible import get_spec
                spec_default = get_spec(self.spec).default_model
        body = dict(self.model if self.model is not None else spec_default)
        body.setdefault("dim", self.d)
        return FieldModel.from_dict(body)

    def hash(self) -> str:
        data = {k: v for k, v in dataclasses.asdict(self).items() if k not in ("workers", "out")}
        text = json.dumps(data, sort_keys=True, default=str)
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def validate(self):
        from .admissible import SPEC_NAMES
        from .bounds import FORMULAS
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if self.spec is not None and self.spec not in SPEC_NAMES:
            raise ConfigError(f"unknown spec {self.spec!r}; expected one of {SPEC_NAMES}")
        if self.kind == "bound" and self.formula not in FORMULAS:
            raise ConfigError(f"unknown formula {self.formula!r}; expected one of {FORMULAS}")
        for name in ("d", "m", "n", "samples", "trials", "R", "m_max", "box_side", "ref_samples"):
            v = getattr(self, name)
            if v is not None and (not isinstance(v, int) or v < 1):
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if not isinstance(self.r, int) or self.r < 0:
            raise ConfigError(f"r must be a non-negative integer, got {self.r!r}")
        if self.seed < 0 or any(s < 0 for s in self.seed_list()):
            raise ConfigError("seeds must be non-negative")
        if self.kind != "bound":
            model = self.field_model()
            if model.dim != self.d:
                raise ConfigError(f"model dim {model.dim} differs from d={self.d}")
        if self.kind in ("gc-classic", "decompose"):
            m, n, r = self.m, self.n, self.r
            if not n > 2 * m > 4 * r:
                raise ConfigError(f"need n > 2m > 4r (got n={n}, m={m}, r={r})")
        if self.kind == "ids" and (len(self.n_list or []) < 1):
            raise ConfigError("ids needs a non-empty n_list")


FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)}


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with experiment settings")
    common.add_argument("--workers", type=int, help="worker processes (default: $ERGODIC_GC_WORKERS or 1)")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--seeds", type=_int_list, help="comma-separated master seeds")
    common.add_argument("--out", help="CSV output path (default: stdout)")
    common.add_argument("--spec", help="anderson, percolation or classical-cdf")
    common.add_argument("--model", help="field model as inline JSON")
    common.add_argument("--p", help="shortcut for a product Bernoulli(p) field")
    for name in ("d", "m", "n", "r", "R", "trials", "m-max", "box-side", "samples",
                 "ref-samples", "r-prime"):
        common.add_argument(f"--{name}", type=int, dest=name.replace("-", "_"))
    common.add_argument("-S", type=int, dest="samples")
    for name in ("K", "D", "D-prime", "threshold"):
        common.add_argument(f"--{name}", type=float, dest=name.replace("-", "_"))
    common.add_argument("--m-list", type=_int_list, dest="m_list")
    common.add_argument("--n-list", type=_int_list, dest="n_list")
    common.add_argument("--formula", help="geometric, anderson, percolation or empmeasure")

    parser = argparse.ArgumentParser(prog="ergodic-gc", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        sub.add_parser(kind, parents=[common])
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(loaded) - FIELDS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if loaded.get("kind", args.kind) != args.kind:
            raise ConfigError(f"config kind {loaded['kind']!r} differs from subcommand {args.kind!r}")
        values.update(loaded)
    for key, v in vars(args).items():
        if key in FIELDS and v is not None and key not in ("model",):
            values[key] = v
    if args.model is not None:
        try:
            values["model"] = json.loads(args.model)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--model is not valid JSON: {exc}") from None
    if args.p is not None:
        values["model"] = {"kind": "product", "base_law": {"name": "bernoulli", "p": args.p}}
    values["kind"] = args.kind
    merged = {**KIND_DEFAULTS[args.kind], **values}
    merged["workers"] = resolve_workers(values.get("workers"))
    cfg = ExperimentConfig(**merged)
    cfg.validate()
    return cfg


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(cfg: ExperimentConfig, header: tuple, rows: list):
    buf = io.StringIO()
    buf.write(f"# config={cfg.hash()} version={__version__}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


# --- experiments ------------------------------------------------------------

def run_gc_classic(cfg: ExperimentConfig) -> int:
    from .admissible import get_spec
    from .empirical import gc_sup_statistic
    spec, model = get_spec(cfg.spec), cfg.field_model()
    rows = []
    for seed in cfg.seed_list():
        g = gc_sup_statistic(spec, model, cfg.m, cfg.r, cfg.n, seed, cfg.samples, cfg.workers)
        rows.append((spec.name, model.label(), cfg.d, cfg.m, cfg.n, cfg.r, seed, g.stat, g.ci,
                     cfg.threshold, g.stat <= cfg.threshold))
    write_csv(cfg, ("spec", "model", "d", "m", "n", "r", "seed", "gc_stat", "ci", "threshold",
                    "pass"), rows)
    return 0 if all(r[-1] for r in rows) else 1


def run_ids(cfg: ExperimentConfig) -> int:
    from .anderson import eigenvalue_counting, pastur_shubin_estimate
    from .field import sample_window
    from .lattice import Box
    from .rng import derive_seed
    from .stepfn import sup_distance
    model = cfg.field_model()
    ref = pastur_shubin_estimate(model, cfg.R, cfg.samples, derive_seed(cfg.seed, "reference"),
                                 cfg.workers)
    rows = []
    for seed in cfg.seed_list():
        prev = None
        for n in cfg.n_list:
            cfg_n = sample_window(model, Box(cfg.d, n), derive_seed(seed, "field", n))
            f = eigenvalue_counting(cfg_n) / n ** cfg.d
            d_prev = sup_distance(f, prev) if prev is not None else 0.0
            d_ref = sup_distance(f, ref.value)
            ok = d_prev <= cfg.threshold and d_ref <= cfg.threshold + ref.ci_radius
            rows.append((seed, n, d_prev, d_ref, ref.ci_radius, cfg.threshold, ok))
            prev = f
    write_csv(cfg, ("seed", "n", "dist_prev", "dist_ref", "ref_ci", "threshold", "pass"), rows)
    return 0 if all(r[-1] for r in rows) else 1


def run_percolation(cfg: ExperimentConfig) -> int:
    from fractions import Fraction
    from .field import sample_window
    from .lattice import Box
    from .percolation import cluster_counting_function, cluster_histograms, limit_estimates
    from .rng import derive_seed
    model = cfg.field_model()
    est = limit_estimates(model, cfg.m_max, cfg.box_side, cfg.ref_samples,
                          derive_seed(cfg.seed, "reference"), cfg.workers)
    sums = {"a": {}, "b": {}, "c": {}}
    exact = True
    for i in range(cfg.samples):
        conf = sample_window(model, Box(cfg.d, cfg.n), derive_seed(cfg.seed, "field", i))
        a, b, c = cluster_histograms(conf)
        f = cluster_counting_function(conf)
        exact &= all(c[m] == m * a[m] for m in a) and sum(c.values()) == 1 == sum(b.values())
        acc = Fraction(0)
        for m in sorted(a):
            acc += a[m]
            exact &= Fraction(int(f(float(m))), len(conf)) == acc
        for name, h in zip("abc", (a, b, c)):
            for m, v in h.items():
                sums[name][m] = sums[name].get(m, 0) + v
    rows = []
    for j in range(1, cfg.m_max + 1):
        avg = [float(sums[k].get(j, 0)) / cfg.samples for k in "abc"]
        rows.append((j, *avg, float(est.pmf[j - 1]), float(est.theta(float(j))),
                     float(est.psi(float(j))), est.kappa, est.ci))
    write_csv(cfg, ("m", "a", "b", "c", "pmf_hat", "theta_hat", "psi_hat", "kappa_hat", "ci"), rows)
    return 0 if exact else 1


def run_check(cfg: ExperimentConfig) -> int:
    from .admissible import all_gating_passed, get_spec, run_all_checks
    spec, model = get_spec(cfg.spec), cfg.field_model()
    reports = run_all_checks(spec, model, cfg.trials, cfg.seed)
    write_csv(cfg, ("spec", "property", "trials", "max_violation", "tolerance", "pass", "gating"),
              [(spec.name, r.name, r.trials, float(r.max_violation), float(r.tolerance), r.passed,
                r.gating) for r in reports])
    return 0 if all_gating_passed(reports) else 1


def run_bound(cfg: ExperimentConfig) -> int:
    from . import bounds
    from .admissible import get_spec
    d, r, m, n = cfg.d, cfg.r, cfg.m, cfg.n
    if cfg.formula == "anderson":
        value = bounds.anderson_bound(d, r, m, n)
    elif cfg.formula == "percolation":
        value = bounds.percolation_bound(d, r, m, n)
    else:
        spec = get_spec(cfg.spec or "anderson")
        if cfg.formula == "empmeasure":
            value = bounds.empmeasure_bound(spec, d, m, n, r)
        else:
            pick = lambda v, default: default if v is None else v
            value = bounds.geometric_bound(bounds.BoundInputs(
                pick(cfg.K, spec.K), pick(cfg.D, spec.D), pick(cfg.D_prime, spec.D_prime),
                pick(cfg.r_prime, spec.r_prime), r, d, m, n))
    if cfg.out:
        write_csv(cfg, ("formula", "d", "r", "m", "n", "value"), [(cfg.formula, d, r, m, n, value)])
    else:
        print(repr(value))
    return 0


def emit_convergence_table(cfg: ExperimentConfig, grid: list, seeds: list) -> list:
    """One decomposition row per (m, n, seed), in grid-then-seed order."""
    from .admissible import get_spec
    from .empirical import default_reference, full_error_decomposition
    if not grid:
        raise ConfigError("convergence grid is empty")
    spec, model = get_spec(cfg.spec), cfg.field_model()
    ref = default_reference(spec, model, cfg.seed, cfg.workers, R=cfg.R,
                            ref_samples=cfg.ref_samples, m_max=cfg.m_max, box_side=cfg.box_side)
    reports = []
    for m, n in grid:
        for seed in seeds:
            reports.append(full_error_decomposition(spec, model, m, cfg.r, n, seed, cfg.samples,
                                                    ref, cfg.workers))
    return reports


def run_decompose(cfg: ExperimentConfig) -> int:
    from .empirical import DECOMPOSE_COLUMNS
    if cfg.m_list and cfg.n_list:
        grid = [(m, n) for m in cfg.m_list for n in cfg.n_list]
    else:
        grid = [(cfg.m, cfg.n)]
    for m, n in grid:
        if not n > 2 * m > 4 * cfg.r:
            raise ConfigError(f"need n > 2m > 4r (got n={n}, m={m}, r={cfg.r})")
    reports = emit_convergence_table(cfg, grid, cfg.seed_list())
    write_csv(cfg, DECOMPOSE_COLUMNS, [rep.row() for rep in reports])
    return 0 if all(rep.passed for rep in reports) else 1


RUNNERS = {"gc-classic": run_gc_classic, "ids": run_ids, "percolation": run_percolation,
           "check": run_check, "bound": run_bound, "decompose": run_decompose}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "run":
        argv = argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = resolve_config(args)
        return RUNNERS[cfg.kind](cfg)
    except (ConfigError, PreconditionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
