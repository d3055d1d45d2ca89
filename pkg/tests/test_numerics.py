import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from bergmanlab.errors import NotHermitian, NumericalDiagnostic
from bergmanlab.geometry import EuclideanDisc
from bergmanlab.numerics import (
    QuadratureSpec,
    aberth_roots,
    adaptive_gl,
    count_preimages,
    gauss_legendre,
    geometric_tail_bound,
    hermitian_eigenvalues,
    integrate_disc,
    integrate_radial,
    integrate_toward_zero,
    power_series_on_circle,
    richardson_to_boundary,
    winding_number,
)
from bergmanlab.composition import SelfMap


@pytest.mark.parametrize("order", [4, 8, 15, 20])
def test_gauss_legendre_integrates_polynomials_exactly(order):
    x, w = gauss_legendre(order)
    k = 2 * order - 1
    assert np.sum(w * x ** k) == pytest.approx(1.0 / (k + 1), rel=1e-13)


@pytest.mark.parametrize("f, a, b, exact", [
    (np.sin, 0.0, math.pi, 2.0),
    (lambda x: np.log(x), 1e-12, 1.0, float(mpmath.quad(mpmath.log, [1e-12, 1]))),
    (lambda x: 1 / np.sqrt(x), 1e-10, 1.0, 2 - 2e-5),
    (lambda x: np.exp(-x * x), -3.0, 3.0, float(mpmath.sqrt(mpmath.pi) * mpmath.erf(3))),
])
def test_adaptive_gl_matches_reference(f, a, b, exact):
    value, err = adaptive_gl(f, a, b)
    assert value == pytest.approx(exact, rel=1e-9, abs=1e-11)
    assert err >= 0


def test_adaptive_gl_reversed_interval_changes_sign():
    assert adaptive_gl(np.cos, 1.0, 0.0)[0] == pytest.approx(-math.sin(1.0), rel=1e-12)


def test_integrate_radial_with_analytic_tail():
    spec = QuadratureSpec()
    # int_0^1 log(1/(1-s)) ds = 1; tail below the cut has the closed form d(1 + log(1/d))
    f = lambda s: -np.log1p(-s)
    value = integrate_radial(f, 0.0, 1.0, spec=spec, tail=lambda c: (1 - c) * (1 - math.log(1 - c)))
    assert value == pytest.approx(1.0, rel=1e-9)


def test_richardson_recovers_polynomial_limit():
    F = lambda e: 3.0 - 2 * e + 5 * e * e
    assert richardson_to_boundary(F, (1e-2, 5e-3, 1e-3)) == pytest.approx(3.0, abs=1e-12)


@pytest.mark.parametrize("scale", [1.0, 0.3])
def test_integrate_toward_zero_log_singularity(scale):
    # int_0^s log(1/d) dd = s (1 + log(1/s))
    out = integrate_toward_zero(lambda d: -np.log(d), [scale])
    assert out[0] == pytest.approx(scale * (1 - math.log(scale)), rel=1e-10)


def test_integrate_disc_area_and_moment():
    area = integrate_disc(lambda z: np.ones_like(z.real))
    assert area == pytest.approx(1.0, rel=1e-10)   # dA normalized
    m = integrate_disc(lambda z: np.abs(z) ** 4)
    assert m == pytest.approx(1 / 3, rel=1e-10)


@given(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5), st.floats(0.05, 0.4))
def test_integrate_disc_euclidean_area(x, y, r):
    value = integrate_disc(lambda z: np.ones_like(z.real), EuclideanDisc(complex(x, y), r))
    assert value == pytest.approx(r * r, rel=1e-8)


@given(st.lists(st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=8))
def test_aberth_roots_reproduce_polynomial(roots):
    coeffs = np.polynomial.polynomial.polyfromroots(roots)
    found = aberth_roots(coeffs)
    assert found.size == len(roots)
    resid = np.abs(np.polynomial.polynomial.polyval(found, coeffs))
    scale = np.polynomial.polynomial.polyval(np.abs(found), np.abs(coeffs))
    assert np.all(resid <= 1e-9 * np.maximum(scale, 1.0))


def test_aberth_batched_matches_single():
    c = np.array([[1.0, 0.0, -4.0], [2.0, -3.0, 1.0]])
    got = aberth_roots(c)
    assert np.allclose(np.sort(got[0].real), [-0.5, 0.5], atol=1e-13)
    assert np.allclose(np.sort(got[1].real), [1.0, 2.0], atol=1e-13)


@pytest.mark.parametrize("k", [0, 1, 3, 7])
def test_winding_number_of_monomial(k):
    assert round(winding_number(lambda z: z ** k, 0.7)) == k


def test_winding_counts_preimages_of_blaschke():
    phi = SelfMap.blaschke([0.3, -0.4j])
    z = 0.2 + 0.1j
    by_roots = count_preimages(phi, z, 0.95, method="roots")
    by_winding = count_preimages(phi, z, 0.95, method="winding")
    assert by_roots == by_winding == 2


def test_count_preimages_nudges_roots_on_the_circle():
    phi = SelfMap.polynomial([0, 0, 1])
    assert count_preimages(phi, 0.25, 0.5, method="roots") == 2
    assert count_preimages(phi, 0.25, 0.49, method="roots") == 0


def test_power_series_on_circle_matches_direct_sum():
    c = np.arange(1, 40) * (0.5 + 0.2j) ** np.arange(39)
    vals = power_series_on_circle(c, 0.8, 16)
    t = 2 * math.pi * np.arange(16) / 16
    z = 0.8 * np.exp(1j * t)
    direct = np.polynomial.polynomial.polyval(z, c)
    assert np.allclose(vals, direct, atol=1e-12)


@given(st.floats(0.0, 10.0), st.floats(0.0, 0.99))
def test_geometric_tail_bound_is_the_geometric_sum(t, q):
    assert geometric_tail_bound(t, q) == pytest.approx(t * q / (1 - q), rel=1e-12)
    assert geometric_tail_bound(t, 1.0) == math.inf


def test_hermitian_eigenvalues_descending_and_checked(rng):
    A = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    H = A @ A.conj().T
    lam = hermitian_eigenvalues(H, psd=True)
    assert np.all(np.diff(lam) <= 0)
    assert lam.sum() == pytest.approx(np.trace(H).real, rel=1e-12)
    with pytest.raises(NotHermitian):
        hermitian_eigenvalues(A)


def test_hermitian_eigenvalues_warns_on_negative_psd():
    with pytest.warns(NumericalDiagnostic):
        hermitian_eigenvalues(np.diag([1.0, -1.0]), psd=True)


@given(st.floats(0.05, 0.95))
def test_integrate_radial_is_additive(c):
    f = lambda s: np.cos(3 * s) / np.sqrt(1.001 - s)
    whole, err = integrate_radial(f, 0.0, 1.0, return_error=True)
    left, e1 = integrate_radial(f, 0.0, c, return_error=True)
    right, e2 = integrate_radial(f, c, 1.0, return_error=True)
    assert abs(left + right - whole) <= 2 * max(err + e1 + e2, 1e-12 * abs(whole))


@given(st.permutations(list(range(6))))
def test_hermitian_eigenvalues_permutation_invariant(perm):
    rng = np.random.default_rng(3)
    A = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    H = A + A.conj().T
    P = np.eye(6)[list(perm)]
    assert np.allclose(hermitian_eigenvalues(P @ H @ P.T), hermitian_eigenvalues(H), atol=1e-10)


@given(st.complex_numbers(max_magnitude=0.2))
def test_count_preimages_monotone_and_reaches_degree(z):
    phi = SelfMap.blaschke([0.3, -0.5j, 0.6 + 0.2j])
    counts = [count_preimages(phi, z, r, method="winding") for r in (0.2, 0.5, 0.8, 0.99, 0.999999)]
    assert counts == sorted(counts)
    assert counts[-1] == 3
