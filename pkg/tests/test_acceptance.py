"""Acceptance criteria, one test each; a PASS/FAIL line per criterion is printed at the end."""
import math
import time

import numpy as np
import pytest

from conftest import record

from bergmanlab.composition import (
    CountingFunction,
    SelfMap,
    compactness_classifier,
    composition_matrix,
    condition_113,
    counting_direct,
    counting_integral,
    essential_norm_quantities,
    littlewood_check,
    schatten_criterion,
)
from bergmanlab.kernels import KernelSeries, bergman_kernel, dirichlet_kernel_deriv, kernel_Lp_norm
from bergmanlab.kernels import default_anchor_grid, verify_theorem21
from bergmanlab.toeplitz import MeasureSpec, criterion_dyadic, criterion_integral, toeplitz_matrix
from bergmanlab.weights import RadialWeight, classify_weight, moebius_tail_condition

ONE = RadialWeight.standard(0.0)
STD1 = RadialWeight.standard(1.0)
LOG2 = RadialWeight.log_power(2.0)


def check(n, ok, detail):
    record(n, ok, detail)
    assert ok, detail


def test_criterion_01_reproducing_identity():
    start = time.perf_counter()
    devs = {}
    for name, w, dens in (("1", ONE, lambda z: np.ones_like(np.real(z))),
                          ("1-r^2", STD1, lambda z: 1 - np.abs(z) ** 2)):
        for form, mu in (("profile", MeasureSpec.radial_profile(w)),
                         ("density", MeasureSpec.density(dens))):
            T = toeplitz_matrix(mu, w, dim=32)
            devs[f"{name}/{form}"] = float(np.max(np.abs(T.matrix - np.eye(32))))
    elapsed = time.perf_counter() - start
    worst = max(devs.values())
    check(1, worst <= 1e-8 and elapsed < 30,
          f"max |M - I| = {worst:.2e} (<= 1e-8), {elapsed:.1f} s (< 30 s)")


def test_criterion_02_kernel_oracles():
    r = np.linspace(0.0, 0.9, 20)
    t = np.linspace(0.0, 2 * math.pi, 20, endpoint=False)
    a_grid = r * np.exp(1j * t)
    z_grid = r[::-1] * np.exp(1j * (t + 0.7))
    berg = dirich = 0.0
    for a in a_grid:
        q = np.conj(a) * z_grid
        berg = max(berg, float(np.max(np.abs(bergman_kernel(ONE, a, z_grid) - 1 / (1 - q) ** 2))))
        dk = dirichlet_kernel_deriv(ONE, 0.0, a, z_grid)
        dirich = max(dirich, float(np.max(np.abs(dk - (1 + np.log(1 / (1 - q)))))))
    check(2, berg <= 1e-10 and dirich <= 1e-9,
          f"Bergman error {berg:.2e} (<= 1e-10), Dirichlet error {dirich:.2e} (<= 1e-9)")


def _log_range(report):
    lr = np.log(report.ratio)
    return float(lr.max() - lr.min())


def test_criterion_03_kernel_asymptotics():
    a = 0.999
    norm2 = kernel_Lp_norm(KernelSeries.dirichlet(ONE, a, N=1), ONE, 2)
    oracle = math.log(1 / (1 - a * a))
    ratio = norm2 / math.log(1 / (1 - a))
    oracle_ok = abs(norm2 - oracle) <= 1e-9 * oracle
    ratio_ok = 0.9 <= ratio <= 1.1
    coarse = default_anchor_grid()
    fine = np.unique(np.concatenate([coarse, np.linspace(0.5, 0.99, 25), [0.9925, 0.9975]]))
    bands = {}
    for name, w in (("standard1", STD1), ("log_power2", LOG2)):
        rc = verify_theorem21(w, w, 2.0, 1, coarse).norms
        rf = verify_theorem21(w, w, 2.0, 1, fine).norms
        bands[name] = (rc.in_band and rf.in_band and rc.stable
                       and _log_range(rf) <= _log_range(rc) + math.log(1.25), rf.range)
    band_ok = all(v[0] for v in bands.values())
    detail = (f"oracle {'ok' if oracle_ok else 'off'} (||K_a'||^2 = {norm2:.6f}); "
              f"ratio clause {'ok' if ratio_ok else 'FAILS'}: {ratio:.4f} vs [0.9, 1.1]; "
              f"band clause {'ok' if band_ok else 'FAILS'}: "
              + ", ".join(f"{k} [{v[1][0]:.3f}, {v[1][1]:.3f}]" for k, v in bands.items()))
    check(3, oracle_ok and ratio_ok and band_ok, detail)


def test_criterion_04_weight_classes():
    start = time.perf_counter()
    got = {}
    for name, w in (("1", ONE), ("standard1", STD1), ("log_power2", LOG2),
                    ("log_minus", RadialWeight.log_minus()),
                    ("exponential1", RadialWeight.exponential(1.0))):
        rep = classify_weight(w)
        got[name] = (rep.in_D_hat, rep.is_regular, rep.reverse_doubling_C is not None,
                     moebius_tail_condition(w).holds if rep.in_D_hat else None)
    elapsed = time.perf_counter() - start
    ok = (got["1"][:3] == (True, True, True) and got["standard1"][:3] == (True, True, True)
          and got["log_power2"][0] and not got["log_power2"][2]
          and got["log_minus"][0] and got["log_minus"][3] is False
          and not got["exponential1"][0])
    check(4, ok and elapsed < 10, f"5/5 verdicts {'match' if ok else 'differ'}, {elapsed:.1f} s")


def test_criterion_05_counting_dual_path():
    rng = np.random.default_rng(5)
    maps = {"id": SelfMap.identity(), "z^2": SelfMap.polynomial([0, 0, 1]),
            "(z^2+z)/2": SelfMap.polynomial([0, 0.5, 0.5]), "moebius(0.3)": SelfMap.moebius(0.3)}
    worst = 0.0
    for phi in maps.values():
        for v in (ONE, STD1):
            cf = CountingFunction(phi, v)
            n = 0
            while n < 100:
                z = 0.99 * math.sqrt(rng.random()) * np.exp(2j * math.pi * rng.random())
                if abs(z) < 1e-6 or abs(z - phi.phi0) < 1e-6:
                    continue
                worst = max(worst, abs(counting_direct(cf, z) - counting_integral(cf, z)))
                n += 1
    check(5, worst <= 1e-6, f"max |direct - integral| = {worst:.2e} over 800 evaluations (<= 1e-6)")


def test_criterion_06_littlewood():
    maps = [SelfMap.identity(), SelfMap.polynomial([0, 0, 1]), SelfMap.polynomial([0, 0.5, 0.5]),
            SelfMap.moebius(0.3), SelfMap.lens(0.5), SelfMap.affine(0.5, 0.5), SelfMap.affine(0.5),
            SelfMap.blaschke([0.2, -0.5j])]
    violations, excess = 0, -math.inf
    for phi in maps:
        rep = littlewood_check(CountingFunction(phi, ONE))
        violations += rep.violations
        excess = max(excess, rep.max_violation)
    check(6, violations == 0,
          f"{violations} violations on the 32x64 grid for {len(maps)} maps (max excess {excess:.2e})")


def test_criterion_07_schatten_cross_validation():
    half = SelfMap.affine(0.5)
    M = composition_matrix(half, ONE, dim=32)
    diag_err = float(np.max(np.abs(np.diag(M.matrix) - 0.5 ** np.arange(32))))
    s2 = M.schatten_norm(2) ** 2
    finite = {p: schatten_criterion(half, ONE, p).integral_finite for p in (0.5, 1.0, 2.0)}
    ident = schatten_criterion(SelfMap.identity(), ONE, 2.0)
    growth = ident.partial[1e-4] / ident.partial[1e-2]
    smin = float(composition_matrix(SelfMap.identity(), ONE, dim=32).singular_values.min())
    ok = (diag_err <= 1e-8 and abs(s2 - 4 / 3) <= 1e-6 and all(finite.values())
          and growth >= 10 and smin >= 0.999)
    check(7, ok, f"diag error {diag_err:.1e}, S2^2 - 4/3 = {s2 - 4 / 3:.1e}, criterion finite "
                 f"{sorted(finite.items())}; identity growth {growth:.1f}x, min s {smin:.6f}")


def test_criterion_08_compactness_classifier():
    out, times = {}, {}
    for name, phi in (("id", SelfMap.identity()), ("lens", SelfMap.lens(0.5)),
                      ("affine", SelfMap.affine(0.5, 0.5))):
        start = time.perf_counter()
        out[name] = compactness_classifier(phi, ONE)
        times[name] = time.perf_counter() - start
    ident, lens, aff = out["id"], out["lens"], out["affine"]
    lens_k12 = float(lens.classification.pointwise[list(lens.classification.rings).index(12)])
    q = aff.angular.quotient_at(0.0)
    ok = (ident.verdict == "bounded, not compact" and 0.9 <= ident.classification.limit <= 1.1
          and lens.verdict == "compact" and lens_k12 <= 0.05
          and aff.verdict != "compact" and abs(q - 0.5) <= 0.05
          and max(times.values()) < 120)
    check(8, ok, f"id: {ident.verdict} (C = {ident.classification.limit:.4f}); lens: "
                 f"{lens.verdict} (ring 12: {lens_k12:.1e}); 0.5z+0.5: {aff.verdict} "
                 f"(quotient {q:.4f}); slowest {max(times.values()):.1f} s")


MEASURES = {
    "delta_0.7": MeasureSpec.atoms([0.7]),
    "three atoms": MeasureSpec.atoms([0.6, 0.85j, -0.5 - 0.4j], [1.0, 0.5, 2.0]),
    "area": MeasureSpec.radial_profile(ONE),
    "r^8(1-r)^3": MeasureSpec.from_config({"form": "radial_profile", "power": 3, "interior": 8}),
    "tilted density": MeasureSpec.from_config({"form": "density", "power": 3, "interior": 8,
                                               "tilt": 1}),
}


def test_criterion_09_discretization_equivalence():
    bad, ratios = [], []
    for name, mu in MEASURES.items():
        for p in (0.5, 1.0, 2.0):
            dy = criterion_dyadic(mu, ONE, p=p)
            it = criterion_integral(mu, ONE, p=p, r=0.3)
            if dy.finite != it.finite or "inconclusive" in (dy.verdict, it.verdict):
                bad.append(f"{name} p={p}: {dy.verdict}/{it.verdict}")
            elif dy.finite:
                ratio = it.value / dy.total
                ratios.append(ratio)
                if not 0.1 <= ratio <= 10:
                    bad.append(f"{name} p={p}: ratio {ratio:.3f}")
    check(9, not bad, f"15 cases co-finite, finite ratios in [{min(ratios):.2f}, {max(ratios):.2f}]"
          if not bad else "; ".join(bad))


def test_criterion_10_essential_norm_coherence():
    keys = "ABCE"
    detail, ok = [], True
    for name, phi in (("id", SelfMap.identity()), ("0.5z+0.5", SelfMap.affine(0.5, 0.5)),
                      ("lens", SelfMap.lens(0.5))):
        rep = essential_norm_quantities(phi, ONE)
        vals = {k: rep.values[k] for k in keys}
        if name == "lens":
            vanish = all(rep.vanishing(k) for k in keys)
            ok &= vanish
            detail.append(f"lens vanishing: {vanish}")
        else:
            spread = max(vals.values()) / min(vals.values())
            ok &= spread <= 100 and not any(rep.vanishing(k) for k in keys)
            detail.append(f"{name} max ratio {spread:.1f}")
    check(10, ok, ", ".join(detail))


def test_criterion_11_condition_113_counterexample():
    lens = SelfMap.lens(0.5)
    c = condition_113(lens, LOG2)
    verdict = compactness_classifier(lens, LOG2).verdict
    ok = abs(c.limit - 0.5) <= 0.05 and not c.holds and verdict == "compact"
    check(11, ok, f"condition limit {c.limit:.4f} (0.5 +- 0.05), compactness verdict {verdict!r}")
