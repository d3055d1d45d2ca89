import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bergmanlab.errors import DomainError, SlowConvergence
from bergmanlab.kernels import (
    KernelSeries,
    bergman_kernel,
    corollary112_check,
    dirichlet_kernel_deriv,
    integral_mean,
    kernel_Lp_norm,
    local_constancy_check,
    star_space_weight,
    verify_theorem21,
)
from bergmanlab.numerics import integrate_disc
from bergmanlab.weights import RadialWeight


def grid_points(n=6, rmax=0.9):
    r = np.linspace(0, rmax, n)
    t = np.linspace(0, 2 * math.pi, n, endpoint=False) + 0.3
    return (r[:, None] * np.exp(1j * t)[None, :]).ravel()


@pytest.mark.parametrize("alpha", [0.0, 1.0, 2.5])
def test_standard_bergman_kernel_closed_form(alpha):
    w = RadialWeight.standard(alpha)
    for a in grid_points(5):
        z = grid_points(5)
        exact = (alpha + 1) / (1 - np.conj(a) * z) ** (2 + alpha)
        got = bergman_kernel(w, a, z)
        # truncation is certified relative to the majorant sum |b_j| |z|^j
        majorant = (alpha + 1) / (1 - np.abs(a * z)) ** (2 + alpha)
        assert np.max(np.abs(got - exact) / majorant) <= 1e-11


def test_bergman_kernel_derivative(unweighted):
    a, z = 0.6 - 0.3j, np.array([0.1, -0.5j, 0.7 + 0.1j])
    got = KernelSeries.bergman(unweighted, a, N=1)(z)
    assert np.allclose(got, 2 * np.conj(a) / (1 - np.conj(a) * z) ** 3, rtol=1e-11)


def test_dirichlet_kernel_closed_form(unweighted):
    for a in grid_points(5):
        z = grid_points(5)
        got = dirichlet_kernel_deriv(unweighted, 0.0, a, z)
        assert np.allclose(got, 1 + np.log(1 / (1 - np.conj(a) * z)), atol=1e-10)


@given(st.floats(0.0, 0.95), st.floats(0, 2 * math.pi))
def test_dirichlet_reproducing_identity(r, t):
    # ||K_a||^2 = |K_a(0)|^2 w(D) + ||K_a'||^2_{A^2_w} = K_a(a)
    w = RadialWeight.standard(1.0)
    a = r * complex(math.cos(t), math.sin(t))
    k = KernelSeries.dirichlet(w, a)
    norm2 = abs(k(0.0)) ** 2 * w.total_mass() + kernel_Lp_norm(KernelSeries.dirichlet(w, a, 1), w, 2)
    assert norm2 == pytest.approx(k(a).real, rel=1e-9)
    assert abs(k(a).imag) < 1e-12


@given(st.floats(0.0, 0.95))
def test_bergman_reproducing_identity(r):
    w = RadialWeight.log_power(2.0)
    k = KernelSeries.bergman(w, r)
    assert kernel_Lp_norm(k, w, 2) == pytest.approx(k(r).real, rel=1e-9)


@pytest.mark.parametrize("r", [0.3, 0.7, 0.9])
def test_parseval_mean_matches_trapezoid(unweighted, r):
    k = KernelSeries.bergman(unweighted, 0.8)
    assert integral_mean(k, 2, r) == pytest.approx(k.parseval_mean(r), rel=1e-8)


@pytest.mark.parametrize("a", [0.3, 0.8, 0.95])
def test_bergman_A1_norm_closed_form(unweighted, a):
    # int |1 - a z|^-2 dA = log(1/(1-a^2)) / a^2
    k = KernelSeries.bergman(unweighted, a)
    assert kernel_Lp_norm(k, unweighted, 1) == pytest.approx(math.log(1 / (1 - a * a)) / a ** 2,
                                                             rel=1e-6)


def test_integral_mean_infinity(unweighted):
    k = KernelSeries.bergman(unweighted, 0.5)
    assert integral_mean(k, math.inf, 0.8) == pytest.approx(1 / 0.6 ** 2, rel=1e-10)


def test_star_space_weight_at_zero_is_star(unweighted):
    W = star_space_weight(unweighted, 0.0)
    r = np.array([0.2, 0.5, 0.9])
    assert np.allclose(W(r), unweighted.star(r), rtol=1e-10)
    with pytest.raises(DomainError):
        star_space_weight(unweighted, 1.0)


def test_star_flag_uses_star_space(standard1):
    a, z = 0.5, np.array([0.3j, -0.4])
    direct = KernelSeries.dirichlet(star_space_weight(standard1, 0.3), a)(z)
    assert np.allclose(dirichlet_kernel_deriv(standard1, 0.3, a, z, star=True), direct)


@pytest.mark.parametrize("a, z, exc", [
    (1.0, 0.0, DomainError),
    (0.5, 1.2, DomainError),
    (1 - 1e-7, 1 - 1e-7, SlowConvergence),
])
def test_kernel_argument_checks(unweighted, a, z, exc):
    with pytest.raises(exc):
        bergman_kernel(unweighted, a, z)


def test_derivative_order_limit(unweighted):
    with pytest.raises(DomainError):
        KernelSeries.bergman(unweighted, 0.5, N=7)


@pytest.mark.parametrize("w", [RadialWeight.standard(0.0), RadialWeight.standard(1.0)],
                         ids=["one", "std1"])
@pytest.mark.parametrize("p", [1.0, 2.0, 3.0])
def test_kernel_means_comparable(w, p):
    rep = verify_theorem21(w, w, p, 1, a_grid=[0.5, 0.7, 0.9, 0.95, 0.99, 0.995])
    assert rep.means.in_band and rep.means.stable
    assert rep.norms.in_band


def test_corollary112_band(unweighted):
    rep = corollary112_check(unweighted, 0.0, 2.0, 1, a_grid=[0.5, 0.8, 0.9, 0.95])
    assert rep.in_band


def test_local_constancy(standard1):
    rep = local_constancy_check(standard1, 0.0, 1, a_grid=[0.5, 0.9], r0_grid=[0.02, 0.05, 0.1])
    assert np.all(rep.largest_radius >= 0.02)
    assert np.all(rep.low <= 1.0) and np.all(rep.high >= 1.0)


def _disc_pairing(f, g, w):
    """``<f, g>_{A^2_w}`` by polar cubature of real and imaginary parts."""
    h = lambda z: f(z) * np.conj(g(z)) * w(np.abs(z))
    return complex(integrate_disc(lambda z: h(z).real), integrate_disc(lambda z: h(z).imag))


@pytest.mark.parametrize("w", [RadialWeight.standard(0.0), RadialWeight.standard(1.0)],
                         ids=["one", "std1"])
@pytest.mark.parametrize("k", [0, 3, 8])
def test_bergman_reproduces_monomials(w, k):
    a = 0.6 * np.exp(0.7j)
    ker = KernelSeries.bergman(w, a)
    assert abs(_disc_pairing(lambda z: z ** k, ker, w) - a ** k) < 1e-8


@pytest.mark.parametrize("k", [0, 1, 4, 8])
def test_dirichlet_reproduces_monomials(standard1, k):
    a = 0.5 * np.exp(-1.1j)
    ker, dker = KernelSeries.dirichlet(standard1, a), KernelSeries.dirichlet(standard1, a, 1)
    head = (1.0 if k == 0 else 0.0) * np.conj(ker(0.0)) * standard1.total_mass()
    tail = _disc_pairing(lambda z: k * z ** max(k - 1, 0), dker, standard1) if k else 0.0
    assert abs(head + tail - a ** k) < 1e-8


@pytest.mark.parametrize("w", [RadialWeight.standard(0.0), RadialWeight.standard(1.0),
                               RadialWeight.log_power(2.0)], ids=["one", "std1", "log2"])
def test_littlewood_paley_identity(w):
    # ||f||^2 = 4 ||f'||^2_{A^2_{w*}} + w(D) |f(0)|^2 via monomial norms 2 w_n
    star = w.star_weight()
    n = np.arange(1, 60)
    lhs = np.array([2 * w.moment(k) for k in n])
    rhs = np.array([8 * k ** 2 * star.moment(k - 1) for k in n])
    assert np.allclose(lhs, rhs, rtol=1e-8, atol=0)
    geo = 0.25 ** n
    full_lhs = 2 * w.moment(0) + np.dot(geo, lhs)
    full_rhs = w.total_mass() + np.dot(geo, rhs)
    assert full_lhs == pytest.approx(full_rhs, rel=1e-8)


@pytest.mark.parametrize("p, side", [(1.0, "lower"), (4.0, "upper")])
def test_kernel_mean_one_sided_bounds(unweighted, p, side):
    rep = verify_theorem21(unweighted, unweighted, p, 1, a_grid=[0.5, 0.8, 0.9, 0.95, 0.99])
    ratio = rep.means.ratio
    assert np.all(ratio >= 1 / 100) if side == "lower" else np.all(ratio <= 100)
