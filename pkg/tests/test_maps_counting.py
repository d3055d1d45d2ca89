import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bergmanlab.composition import (
    CountingFunction,
    SelfMap,
    counting_direct,
    counting_integral,
    jump_radii,
    littlewood_check,
)
from bergmanlab.errors import ConfigError, DomainError, UnsupportedForm
from bergmanlab.numerics import count_preimages
from bergmanlab.weights import RadialWeight

MAPS = {
    "identity": SelfMap.identity(),
    "square": SelfMap.polynomial([0, 0, 1]),
    "half-sum": SelfMap.polynomial([0, 0.5, 0.5]),
    "cubic": SelfMap.polynomial([0.1, 0.3, 0, 0.4]),
    "affine": SelfMap.affine(0.5, 0.5),
    "moebius": SelfMap.moebius(0.3),
    "blaschke": SelfMap.blaschke([0.2, -0.5j]),
    "lens": SelfMap.lens(0.5),
}


def disc_points(max_modulus=0.95, min_modulus=0.0):
    return st.builds(lambda r, t: r * complex(math.cos(t), math.sin(t)),
                     st.floats(min_modulus, max_modulus), st.floats(0.0, 2 * math.pi))


@pytest.mark.parametrize("name", sorted(MAPS))
@given(z=disc_points(0.9, 0.01))
def test_preimages_solve_the_equation(name, z):
    phi = MAPS[name]
    pre = phi.preimages(z)
    pre = pre[np.isfinite(pre)]
    assert np.all(np.abs(pre) < 1)
    if pre.size:
        assert np.allclose(phi(pre), z, atol=1e-9)


@pytest.mark.parametrize("name", sorted(MAPS))
def test_derivative_matches_finite_difference(name):
    phi = MAPS[name]
    z = np.array([0.1 + 0.2j, -0.4, 0.6j])
    h = 1e-6
    fd = (phi(z + h) - phi(z - h)) / (2 * h)
    assert np.allclose(phi.derivative(z), fd, atol=1e-7)


@pytest.mark.parametrize("name", ["square", "half-sum", "blaschke", "lens", "moebius"])
@given(z=disc_points(0.9, 0.05), r=st.floats(0.1, 0.95))
def test_root_and_winding_counts_agree(name, z, r):
    phi = MAPS[name]
    pre = phi.preimages(z)
    mod = np.abs(pre[np.isfinite(pre)])
    if np.any(np.abs(mod - r) < 1e-6):
        return  # too close to the contour for a meaningful comparison
    assert count_preimages(phi, z, r, method="winding") == np.count_nonzero(mod <= r)


def test_map_leaving_the_disc_is_rejected():
    with pytest.raises(DomainError):
        SelfMap.affine(0.9, 0.2)
    with pytest.raises(DomainError):
        SelfMap.lens(1.0)


def test_chain_applies_first_map_first():
    m, sq = SelfMap.moebius(0.3), MAPS["square"]
    ch = SelfMap.chain([m, sq])
    z = np.array([0.2, -0.5j])
    assert np.allclose(ch(z), m(z) ** 2)
    assert np.allclose(ch.derivative(z), 2 * m(z) * m.derivative(z))
    assert not ch.has_preimages and ch.bounded_valent


@pytest.mark.parametrize("cfg, form", [
    ({"form": "identity"}, "polynomial"),
    ({"form": "polynomial", "coeffs": [0, [0.5, 0], 0.5]}, "polynomial"),
    ({"form": "moebius", "a": [0.3, 0.1]}, "moebius"),
    ({"form": "lens", "gamma": 0.5}, "lens"),
    ({"form": "affine", "s": 0.5, "c": 0.5}, "affine"),
    ({"form": "blaschke", "zeros": [[0.1, 0.2]]}, "blaschke"),
    ({"form": "chain", "maps": [{"form": "identity"}, {"form": "lens", "gamma": 0.5}]}, "chain"),
])
def test_from_config(cfg, form):
    assert SelfMap.from_config(cfg).form == form


@pytest.mark.parametrize("cfg", [{"form": "spiral"}, {"form": "moebius"},
                                 {"form": "moebius", "a": [0.1, 0.2, 0.3]}])
def test_from_config_rejects(cfg):
    with pytest.raises(ConfigError):
        SelfMap.from_config(cfg)


@given(z=disc_points(0.99, 1e-3))
def test_identity_counting_is_star(z):
    w = RadialWeight.standard(0.0)
    r = abs(z)
    exact = 0.5 * math.log(1 / r) - 0.25 + r * r / 4
    assert counting_direct(CountingFunction(MAPS["identity"], w), z) == pytest.approx(exact, rel=1e-9)


@given(z=disc_points(0.95, 1e-3))
def test_square_counting_doubles(z):
    w = RadialWeight.standard(1.0)
    expected = 2 * float(w.star(np.array([math.sqrt(abs(z))]))[0])
    assert counting_direct(CountingFunction(MAPS["square"], w), z) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("name", ["identity", "square", "half-sum", "moebius", "blaschke"])
@pytest.mark.parametrize("w", [RadialWeight.standard(0.0), RadialWeight.log_power(2.0)],
                         ids=["one", "log2"])
def test_dual_path(name, w, rng):
    cf = CountingFunction(MAPS[name], w)
    z = 0.9 * np.sqrt(rng.random(10)) * np.exp(2j * math.pi * rng.random(10))
    for p in z:
        if abs(p) < 1e-6 or abs(p - cf.map.phi0) < 1e-6:
            continue
        assert abs(counting_direct(cf, p) - counting_integral(cf, p)) <= 1e-6


def test_counting_direct_refuses_lens_and_chain(unweighted):
    for phi in (MAPS["lens"], SelfMap.chain([MAPS["identity"], MAPS["square"]])):
        with pytest.raises(UnsupportedForm):
            counting_direct(CountingFunction(phi, unweighted), 0.3)


def test_winding_jump_radii_match_explicit_preimages():
    m = SelfMap.moebius(0.3)
    ch = SelfMap.chain([m, MAPS["square"]])
    z = 0.2 + 0.1j
    root = np.sqrt(z)
    expected = np.sort(np.abs(m(np.array([root, -root]))))
    assert np.allclose(jump_radii(ch, z), expected, atol=1e-9)


def test_chain_counting_matches_composite(unweighted):
    ch = SelfMap.chain([SelfMap.moebius(0.3), MAPS["square"]])
    z = -0.3 + 0.2j
    root = np.sqrt(z)
    pre = SelfMap.moebius(0.3)(np.array([root, -root]))
    expected = float(np.sum(unweighted.star(np.abs(pre))))
    assert CountingFunction(ch, unweighted)(z) == pytest.approx(expected, abs=1e-7)


def test_counting_point_checks(unweighted):
    cf = CountingFunction(MAPS["affine"], unweighted)
    with pytest.raises(DomainError):
        counting_direct(cf, 1.2)
    with pytest.raises(DomainError):
        counting_direct(cf, 0.5)   # phi(0)
    with pytest.raises(DomainError):
        counting_direct(cf, 1e-9)


def test_affine_counting_vanishes_without_preimage(unweighted):
    cf = CountingFunction(MAPS["affine"], unweighted)
    assert counting_direct(cf, -0.6) == 0.0
    assert counting_integral(cf, -0.6) == 0.0


@pytest.mark.parametrize("name", sorted(MAPS))
def test_littlewood_inequality(name, unweighted):
    grid = np.concatenate([r * np.exp(1j * np.linspace(0, 2 * math.pi, 32, endpoint=False))
                           for r in np.linspace(0.05, 0.95, 8)])
    rep = littlewood_check(CountingFunction(MAPS[name], unweighted), grid)
    assert rep.holds, rep.max_violation


def test_littlewood_equality_for_automorphisms(unweighted):
    # univalent onto the disc: N(z) = w*(rho(z, phi(0))) exactly
    rep = littlewood_check(CountingFunction(MAPS["moebius"], unweighted))
    assert np.allclose(rep.counting, rep.bound, rtol=1e-9)
