"""Config-driven experiment runner: ``lab <task> --config FILE --out DIR``.

Each run writes CSV tables, ``summary.json`` and ``run.log`` into its output
directory.  Exit status is 0 on success, 2 on a validation error and 3 on a
numerical failure.
"""
from __future__ import annotations

import argparse
from concurrent.futures import ThreadPoolExecutor
import csv
import importlib.resources
import json
import logging
import math
import os
from pathlib import Path
import sys

import numpy as np

from . import kernels, toeplitz, weights
from ._trend import tristate
from .composition import (
    CountingFunction,
    SelfMap,
    angular_derivative_scan,
    below_index_quantity,
    classification_quantities,
    compactness_classifier,
    composition_matrix,
    condition_113,
    counting_direct,
    counting_integral,
    essential_norm_quantities,
    littlewood_check,
    schatten_criterion,
)
from .errors import ConfigError, DomainError, LabError, NotIntegrable

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3
VERDICTS = ("true", "false", "inconclusive", "evidence-only")
TASKS = ("weights-check", "kernel-verify", "toeplitz-criterion", "toeplitz-schatten",
         "compose-classify", "compose-essnorm", "compose-schatten", "compose-angular")


class Run:
    """Output sink for one experiment: CSV tables, summary values and verdicts."""

    def __init__(self, out: Path, task: str, config: dict, logger):
        self.out = out
        self.log = logger
        self.summary = {"task": task, "config": config, "values": {}, "verdicts": {}}

    def table(self, name, header, rows):
        with open(self.out / f"{name}.csv", "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(x) for x in row])

    def value(self, key, x):
        self.summary["values"][key] = _jsonable(x)

    def verdict(self, key, flag):
        v = flag if isinstance(flag, str) else tristate(flag)
        if v not in VERDICTS:
            raise ValueError(f"verdict {v!r} outside the vocabulary")
        self.summary["verdicts"][key] = v
        self.log.info("%s: %s", key, v)


def _cell(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (complex, np.complexfloating)):
        return f"{float(x.real)!r}{float(x.imag):+}j"
    return x


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


# --- config helpers ---------------------------------------------------------------------

def _weight(cfg, key="weight", default=None):
    spec = cfg.get(key, default)
    if spec is None:
        raise ConfigError(f"missing {key!r}", "config")
    return weights.RadialWeight.from_config(spec)


def _number(cfg, key, default=None, positive=True):
    x = cfg.get(key, default)
    if x is None:
        raise ConfigError(f"missing {key!r}", "config")
    try:
        x = float(x)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key!r} must be a number", "config") from exc
    if positive and not x > 0:
        raise ConfigError(f"{key!r} must be positive", "config")
    return x


def _list(cfg, key, default):
    x = cfg.get(key, default)
    return list(x) if isinstance(x, (list, tuple)) else [x]


# --- tasks ------------------------------------------------------------------------------

def task_weights_check(cfg, run):
    specs = cfg.get("weights") or [cfg.get("weight")]
    rows = []
    for spec in specs:
        if spec is None:
            raise ConfigError("missing 'weights'", "weights-check")
        w = weights.RadialWeight.from_config(spec)
        name = spec.get("name") or w.family
        rep = weights.classify_weight(w)
        tail = weights.moebius_tail_condition(w)
        rows.append([name, rep.in_D_hat, rep.is_regular, rep.reverse_doubling_C is not None,
                     rep.beta_exponent, rep.doubling_constant, tail.constant_extended, tail.holds])
        run.verdict(f"{name}.in_D_hat", rep.in_D_hat)
        run.verdict(f"{name}.regular", rep.is_regular)
        run.verdict(f"{name}.reverse_doubling", rep.reverse_doubling_C is not None)
        run.verdict(f"{name}.tail_condition", tail.holds)
    run.table("weights", ["weight", "in_D_hat", "regular", "reverse_doubling", "beta",
                          "doubling_constant", "tail_constant", "tail_condition"], rows)


def task_kernel_verify(cfg, run):
    w = _weight(cfg)
    v = _weight(cfg, "v", cfg.get("weight"))
    p = _number(cfg, "p", 2.0)
    N = int(cfg.get("N", 1))
    rep = kernels.verify_theorem21(w, v, p, N, cfg.get("a_grid"))
    rows = [[a, m, n] for a, m, n in zip(rep.norms.radii, rep.means.ratio, rep.norms.ratio)]
    run.table("ratios", ["a", "mean_ratio", "norm_ratio"], rows)
    run.value("norm_ratio_range", rep.norms.range)
    run.verdict("means_in_band", rep.means.holds)
    run.verdict("norms_in_band", rep.norms.holds)
    if w.family == "standard":
        alpha = w.params["alpha"]
        k = np.arange(20)
        a = 0.9 * (k + 1) / 20 * np.exp(0.7j * k)
        z = 0.9 * (20 - k) / 20 * np.exp(-1.3j * k)
        err = 0.0
        for x in a:
            for y in z:
                exact = (alpha + 1) / (1 - np.conj(x) * y) ** (2 + alpha)
                err = max(err, abs(kernels.bergman_kernel(w, x, y) - exact) / max(1, abs(exact)))
        run.value("bergman_oracle_error", err)
        run.verdict("bergman_oracle", err <= 1e-10)


def task_toeplitz_criterion(cfg, run):
    w = _weight(cfg)
    mu = toeplitz.MeasureSpec.from_config(cfg.get("measure") or {})
    alpha = cfg.get("alpha")
    r = _number(cfg, "r", 0.3)
    rows, level_rows = [], []
    for p in _list(cfg, "p", [1.0]):
        p = float(p)
        dy = toeplitz.criterion_dyadic(mu, w, alpha, p, int(cfg.get("n_max", 10)))
        it = toeplitz.criterion_integral(mu, w, alpha, p, r)
        ratio = it.value / dy.total if dy.finite and it.finite and dy.total > 0 else None
        rows.append([p, dy.total, dy.verdict, it.value, it.verdict, ratio])
        level_rows += [[p, n, s] for n, s in enumerate(dy.level_sums)]
        run.verdict(f"p={p:g}.dyadic_finite", _finite(dy.verdict))
        run.verdict(f"p={p:g}.integral_finite", _finite(it.verdict))
        run.verdict(f"p={p:g}.cofinite", dy.verdict == it.verdict)
        if ratio is not None:
            run.verdict(f"p={p:g}.ratio_within_10", 0.1 <= ratio <= 10)
    run.table("criterion", ["p", "dyadic", "dyadic_verdict", "integral", "integral_verdict",
                            "ratio"], rows)
    run.table("levels", ["p", "level", "level_sum"], level_rows)


def _finite(verdict):
    return None if verdict == "inconclusive" else verdict == "converging"


def task_toeplitz_schatten(cfg, run):
    w = _weight(cfg)
    mu = toeplitz.MeasureSpec.from_config(cfg.get("measure") or {"form": "radial_profile",
                                                                 "weight": cfg["weight"]})
    alpha = cfg.get("alpha")
    dim = int(cfg.get("dim", 32))
    T = toeplitz.toeplitz_matrix(mu, w, alpha, dim)
    T.to_csv(run.out / "matrix.csv")
    lam = T.eigenvalues
    run.table("eigenvalues", ["index", "eigenvalue"], list(enumerate(lam)))
    dev = float(np.max(np.abs(T.matrix - np.eye(dim))))
    run.value("identity_deviation", dev)
    run.verdict("matrix_is_identity", dev < 1e-8)
    ps = [float(p) for p in _list(cfg, "p", [1.0])]
    run.value("schatten_norms", {f"{p:g}": toeplitz.schatten_norm(T, p) for p in ps})
    dims = cfg.get("dims")
    if dims:
        rows = []
        for p in ps:
            study = toeplitz.schatten_convergence_study(mu, w, alpha, p, dims)
            rows += [[p, int(d), n] for d, n in zip(study.dims, study.norms)]
            run.value(f"p={p:g}.trend", study.trend)
            run.verdict(f"p={p:g}.consistent", study.consistent)
        run.table("study", ["p", "dim", "norm"], rows)


def _map(cfg):
    if "map" not in cfg:
        raise ConfigError("missing 'map'", "config")
    return SelfMap.from_config(cfg["map"])


def task_compose_classify(cfg, run):
    phi, w = _map(cfg), _weight(cfg)
    v = _weight(cfg, "v", cfg.get("weight"))
    p = _number(cfg, "p", 2.0)
    q = _number(cfg, "q", p)
    if q < p:
        rep = below_index_quantity(phi, w, v, p, q)
        run.value("quantity", rep.value)
        run.verdict("bounded", rep.finite)
        run.verdict("compact", rep.finite)
        run.value("verdict", "compact" if rep.finite else "unbounded")
        return
    if q == p and cfg.get("v") in (None, cfg.get("weight")):
        comp = compactness_classifier(phi, w, p)
        cls, verdict = comp.classification, comp.verdict
        run.value("angular_verdict", comp.angular.verdict)
    else:
        cls = classification_quantities(phi, w, v, p, q)
        verdict = cls.verdict
    run.table("profile", ["ring", "radius", "pointwise", "box", "disc", "angle"],
              zip(cls.rings, cls.radii, cls.pointwise, cls.box, cls.disc, cls.angles))
    run.value("verdict", verdict)
    run.value("profile_limit", cls.limit)
    run.verdict("bounded", verdict != "unbounded")
    run.verdict("compact", verdict == "compact")
    cf = CountingFunction(phi, v)
    run.verdict("littlewood", littlewood_check(cf).holds)
    if phi.has_preimages and phi.form != "lens":
        rng = np.random.default_rng(int(cfg.get("seed", 0)))
        pts = np.sqrt(rng.uniform(1e-4, 0.98, 100)) * np.exp(2j * math.pi * rng.uniform(size=100))
        pts = pts[np.abs(pts - phi.phi0) > 1e-6]
        diff = max(abs(counting_direct(cf, z) - counting_integral(cf, z)) for z in pts)
        run.value("dual_path_max_difference", diff)
        run.verdict("dual_path", diff <= 1e-6)


def task_compose_essnorm(cfg, run):
    phi, w = _map(cfg), _weight(cfg)
    v = _weight(cfg, "v", cfg.get("weight"))
    p = _number(cfg, "p", 2.0)
    rep = essential_norm_quantities(phi, w, v, p, _number(cfg, "q", p), cfg.get("eta"))
    keys = sorted(rep.profiles)
    run.table("quantities", ["ring"] + keys,
              [[k] + [rep.profiles[c][i] for c in keys] for i, k in enumerate(rep.rings)])
    run.value("eta", rep.eta)
    run.value("values", rep.values)
    for key in keys:
        run.value(f"{key}.trend", rep.verdicts[key])
        run.verdict(f"{key}.vanishing", rep.vanishing(key))


def task_compose_schatten(cfg, run):
    phi, w = _map(cfg), _weight(cfg)
    rows = []
    for p in _list(cfg, "p", [2.0]):
        p = float(p)
        rep = schatten_criterion(phi, w, p)
        rows += [[p, eps, val] for eps, val in sorted(rep.partial.items(), reverse=True)]
        run.verdict(f"p={p:g}.criterion_finite", rep.integral_finite)
        run.verdict(f"p={p:g}.dyadic_finite", _finite(rep.dyadic_verdict))
    run.table("partials", ["p", "offset", "integral"], rows)
    dim = int(cfg.get("dim", 32))
    M = composition_matrix(phi, w, dim)
    run.table("singular_values", ["index", "singular_value"], list(enumerate(M.singular_values)))
    run.value("S2_squared", M.schatten_norm(2) ** 2)
    run.value("norm_lower_bound", M.norm)
    run.verdict("truncation_evidence", "evidence-only")


def task_compose_angular(cfg, run):
    phi = _map(cfg)
    w = _weight(cfg, default={"family": "standard", "alpha": 0.0})
    rep = angular_derivative_scan(phi, w)
    rows = [[t, q, f] for t, q, f in zip(rep.angles, rep.quotients[-1], rep.finite)]
    run.table("quotients", ["angle", "quotient", "finite"], rows)
    run.value("quotient_at_1", rep.quotient_at(0.0))
    run.value("finite_angles", rep.finite_angles)
    run.verdict("compact", rep.compact)
    if cfg.get("condition_113", True):
        c = condition_113(phi, w)
        run.table("condition_113", ["ring", "value"], zip(c.rings, c.profile))
        run.value("condition_113_limit", c.limit)
        run.verdict("condition_113", c.holds)


DISPATCH = {
    "weights-check": task_weights_check,
    "kernel-verify": task_kernel_verify,
    "toeplitz-criterion": task_toeplitz_criterion,
    "toeplitz-schatten": task_toeplitz_schatten,
    "compose-classify": task_compose_classify,
    "compose-essnorm": task_compose_essnorm,
    "compose-schatten": task_compose_schatten,
    "compose-angular": task_compose_angular,
}


def _validate(task, cfg):
    if task not in DISPATCH:
        raise ConfigError(f"unknown task {task!r}", "config")
    if cfg.get("task", task) != task:
        raise ConfigError(f"config is for task {cfg['task']!r}", "config")
    alpha = cfg.get("alpha")
    if task.startswith("toeplitz") and alpha is not None:
        for p in _list(cfg, "p", [1.0]):
            if not (float(alpha) < 1 and float(p) * float(alpha) < 1):
                raise ConfigError("toeplitz tasks need alpha < 1 and p * alpha < 1", "config")


def run(task, cfg, out, verbose=False):
    """Run one experiment into ``out``; returns the exit status."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    logger = logging.getLogger(f"bergmanlab.run.{out.resolve()}")
    handler = logging.FileHandler(out / "run.log", mode="w")
    handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    sink = Run(out, task, cfg, logger)
    try:
        logger.info("task %s", task)
        try:
            _validate(task, cfg)
        except LabError as exc:
            raise _Invalid(str(exc)) from exc
        try:
            DISPATCH[task](cfg, sink)
        except (ConfigError, DomainError, NotIntegrable, KeyError, TypeError) as exc:
            raise _Invalid(str(exc)) from exc
        sink.summary["status"] = "ok"
        code = EXIT_OK
    except _Invalid as exc:
        logger.error("validation error: %s", exc)
        sink.summary["status"] = f"invalid: {exc}"
        code = EXIT_INVALID
    except LabError as exc:
        logger.error("numerical failure: %s", exc)
        sink.summary["status"] = f"numerical failure: {exc}"
        code = EXIT_NUMERIC
    finally:
        logger.removeHandler(handler)
        handler.close()
    with open(out / "summary.json", "w") as fh:
        json.dump(_jsonable(sink.summary), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return code


class _Invalid(Exception):
    pass


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise _Invalid(f"cannot read {path}: {exc}") from exc


def bundled_suite():
    """The suite shipped with the package (``data/suite.json``)."""
    text = importlib.resources.files("bergmanlab").joinpath("data/suite.json").read_text()
    return json.loads(text)


def run_suite(suite, out, verbose=False):
    """Run every experiment of a suite, each into ``out/<name>``; returns the worst status."""
    exps = suite.get("experiments", [])
    threads = max(1, int(os.environ.get("LAB_THREADS", "1")))
    out = Path(out)

    def one(exp):
        return run(exp["task"], exp.get("config", {}), out / exp["name"], verbose)

    with ThreadPoolExecutor(max_workers=min(threads, max(len(exps), 1))) as pool:
        codes = list(pool.map(one, exps))
    index = {e["name"]: c for e, c in zip(exps, codes)}
    with open(out / "suite.json", "w") as fh:
        json.dump(index, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return max(codes, default=EXIT_OK)


def main(argv=None):
    parser = argparse.ArgumentParser(prog="lab", description=__doc__.splitlines()[0])
    parser.add_argument("task", choices=TASKS + ("suite",))
    parser.add_argument("--config", help="JSON experiment config")
    parser.add_argument("--file", help="suite JSON (suite mode; defaults to the bundled suite)")
    parser.add_argument("--out", default="lab-out", help="output directory")
    parser.add_argument("--verbose", action="store_true")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    if args.verbose:
        logging.basicConfig(stream=sys.stderr, level=logging.DEBUG,
                            format="%(levelname)s %(message)s")
    try:
        if args.task == "suite":
            suite = _load_json(args.file) if args.file else bundled_suite()
            return run_suite(suite, args.out, args.verbose)
        if not args.config:
            raise _Invalid("--config is required")
        return run(args.task, _load_json(args.config), args.out, args.verbose)
    except _Invalid as exc:
        print(f"lab: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
