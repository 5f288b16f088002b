import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp
from scipy.special import ellipe, ellipeinc

from dtnlab.errors import ConsistencyError, DomainError, RefinementError
from dtnlab.surface_geometry import (
    H_stddev,
    Roulette,
    capped_delaunay,
    commutator_symbol_sup,
    curvature_csv,
    cylinder_surface,
    diameter_with_error,
    ellipsoid_surface,
    fd_covariant_derivative,
    fd_grad_II_norm,
    fd_umbilical_deficit,
    fundamental_data,
    gauss_bonnet,
    geometry_report,
    grad_H,
    grad_II_norm,
    intrinsic_diameter,
    min_delaunay_resolution,
    nearly_umbilical_chain,
    smooth_step,
    sphere_surface,
    sup_grad_H,
    sup_grad_II,
    symbol_norm_constant,
    symbol_values,
    to_obj,
    topping_report,
    umbilical_deficit,
)
from dtnlab.surface_geometry.export import CURVATURE_COLUMNS


def prolate_area(a, c):
    e = math.sqrt(1 - a**2 / c**2)
    return 2 * math.pi * a**2 * (1 + c / (a * e) * math.asin(e))


def oblate_area(a, c):
    e = math.sqrt(1 - c**2 / a**2)
    return 2 * math.pi * a**2 * (1 + (1 - e**2) / e * math.atanh(e))


# ---------------------------------------------------------------- sphere


def test_sphere_baseline():
    s = sphere_surface()
    assert s.area == pytest.approx(4 * math.pi, abs=1e-10)
    assert intrinsic_diameter(s) == pytest.approx(math.pi, abs=1e-2)
    assert sup_grad_II(s) <= 1e-8
    assert umbilical_deficit(s).sup <= 1e-10
    assert commutator_symbol_sup(s) <= 1e-8
    assert gauss_bonnet(s) == pytest.approx(4 * math.pi, abs=1e-6)


@given(R=st.floats(0.2, 5.0))
@settings(max_examples=10, deadline=None)
def test_sphere_scaling(R):
    s = sphere_surface(radius=R)
    assert s.area == pytest.approx(4 * math.pi * R**2, rel=1e-12)
    assert np.allclose(s.samples.H, 1 / R, rtol=1e-12)
    assert gauss_bonnet(s) == pytest.approx(4 * math.pi, rel=1e-10)


def test_scaled_diameter():
    assert intrinsic_diameter(sphere_surface().scaled(2.0), 128) == pytest.approx(2 * math.pi, abs=2e-2)


def test_normalized_area():
    s = ellipsoid_surface(1.0, 2.0).normalized()
    assert s.area == pytest.approx(4 * math.pi, rel=1e-12)


# ---------------------------------------------------------------- ellipsoids


@pytest.mark.parametrize("a,c", [(1.0, 1.2), (1.0, 2.0), (1.5, 1.0)])
def test_ellipsoid_area_and_gauss_bonnet(a, c):
    s = ellipsoid_surface(a, c)
    exact = prolate_area(a, c) if c > a else oblate_area(a, c)
    assert s.area == pytest.approx(exact, rel=1e-12)
    assert gauss_bonnet(s) == pytest.approx(4 * math.pi, abs=1e-6)


def test_ellipsoid_curvatures_at_pole_and_equator():
    a, c = 1.0, 1.2
    s = ellipsoid_surface(a, c)
    L = s.length
    fd = fundamental_data(s, np.array([1e-9 * L, 0.5 * L]))
    assert fd.kappa_mu[0] == pytest.approx(c / a**2, rel=1e-6)
    assert fd.kappa_pi[0] == pytest.approx(c / a**2, rel=1e-6)
    assert fd.kappa_mu[1] == pytest.approx(a / c**2, rel=1e-10)
    assert fd.kappa_pi[1] == pytest.approx(1 / a, rel=1e-10)


def test_ellipsoid_diameter_is_half_meridian():
    a, c = 1.0, 1.2
    exact = 2 * c * ellipe(1 - a**2 / c**2)
    d, err = diameter_with_error(ellipsoid_surface(a, c), 256)
    assert d == pytest.approx(exact, abs=1e-2)
    assert d >= exact - 1e-9  # mesh paths never beat geodesics
    assert err < 5e-2


def test_meridian_length():
    a, c = 1.0, 1.2
    assert ellipsoid_surface(a, c).length == pytest.approx(2 * c * ellipe(1 - a**2 / c**2), rel=1e-12)


def test_frame_formulas_match_graph_finite_differences():
    s = ellipsoid_surface(1.0, 1.6, resolution=128)
    frame = grad_II_norm(s)
    fd = fd_grad_II_norm(s)
    assert np.max(np.abs(frame - fd)) <= 1e-4 * np.max(frame)
    assert fd_umbilical_deficit(s).sup == pytest.approx(umbilical_deficit(s).sup, rel=1e-5)


def test_codazzi_components_in_coordinates():
    # away from the poles, compare coordinate nabla II against the frame values
    s = ellipsoid_surface(1.0, 1.6, resolution=64)
    smp = s.samples
    _, _, nab = fd_covariant_derivative(s)
    jet = np.stack([s.profile.jet(int(i), np.array([p]))[:, :, 0] for i, p in zip(smp.piece, smp.p)])
    v = np.hypot(jet[:, 1, 0], jet[:, 1, 1])
    rho = np.abs(jet[:, 0, 1])
    inner = rho > 0.3
    d111 = nab[:, 0, 0, 0] / v**3
    d122 = nab[:, 0, 1, 1] / (v * rho**2)
    d212 = nab[:, 1, 0, 1] / (v * rho**2)
    scale = np.max(np.abs(smp.dkappa_mu[inner]))
    assert np.max(np.abs(d111 - smp.dkappa_mu)[inner]) < 1e-3 * scale
    assert np.max(np.abs(d122 - smp.dkappa_pi)[inner]) < 1e-3 * scale
    assert np.max(np.abs(d212 - smp.dkappa_pi)[inner]) < 1e-3 * scale


def test_umbilic_chain_and_topping_on_ellipsoids():
    for a, c in [(1.0, 1.2), (1.0, 2.0), (1.5, 1.0)]:
        s = ellipsoid_surface(a, c, resolution=256)
        d = intrinsic_diameter(s, 128)
        chain = nearly_umbilical_chain(s, d)
        assert chain.holds
        top = topping_report(s, diameter=d)
        assert top.satisfied and top.bound > d


def test_near_round_ellipsoid_in_small_regime():
    s = ellipsoid_surface(1.0, 1.001, resolution=128)
    chain = nearly_umbilical_chain(s, intrinsic_diameter(s, 64))
    assert chain.in_small_regime and chain.holds


# ---------------------------------------------------------------- symbol


def test_symbol_sup_matches_grid_oracle():
    s = ellipsoid_surface(1.0, 1.7, resolution=128)
    smp = s.samples
    psi = np.linspace(0, 2 * np.pi, 20001)
    grid = np.max(np.abs(symbol_values(smp.dkappa_mu[:, None], smp.dkappa_pi[:, None], psi[None, :])))
    assert commutator_symbol_sup(s) == pytest.approx(grid, abs=1e-4 * grid)
    assert commutator_symbol_sup(s) <= symbol_norm_constant() * np.max(grad_II_norm(s)) * (1 + 1e-12)


def test_symbol_norm_constant_against_random_tensors():
    # dual-norm constant is attained; random symmetric 3-tensors never exceed it
    C = symbol_norm_constant()
    rng = np.random.default_rng(0)
    psi = np.linspace(0, 2 * np.pi, 2001)
    for _ in range(200):
        t111, t112, t122, t222 = rng.normal(size=4)
        norm = math.sqrt(t111**2 + 3 * t112**2 + 3 * t122**2 + t222**2)
        c, s = np.cos(psi), np.sin(psi)
        # sum_i xi_i (T_ijk xi_j xi_k - tr_i T) with tr_i T = T_i11 + T_i22
        cubic = t111 * c**3 + 3 * t112 * c**2 * s + 3 * t122 * c * s**2 + t222 * s**3
        trace = c * (t111 + t122) + s * (t112 + t222)
        assert np.max(np.abs(cubic - trace)) <= C * norm * (1 + 1e-9)
    assert C == pytest.approx(1 / math.sqrt(3), rel=1e-6)


# ---------------------------------------------------------------- roulette and Delaunay


@pytest.mark.parametrize("eps", [0.05, 0.3, 0.8])
def test_roulette_sigma_against_elliptic_integrals(eps):
    rl = Roulette(eps, t_span=(-1.0, 4 * math.pi))
    a, b = 0.5, 0.5 * eps
    m = 1 - b**2 / a**2
    t = np.array([0.3, 1.0, 2.5, 6.0])
    # arc length of (a cos t, b sin t) from 0 to t: a E(t - pi/2 | m) + a E(pi/2 | m)
    exact = a * (ellipeinc(t - math.pi / 2, m) + ellipe(m))
    assert np.allclose(rl.sigma(t), exact, atol=1e-13)
    assert rl.period == pytest.approx(4 * a * ellipe(m), abs=1e-13)


def test_roulette_sigma_against_ode():
    rl = Roulette(0.2)
    sol = solve_ivp(lambda t, y: [rl._speed(t)], (0, 5.0), [0.0], rtol=1e-12, atol=1e-14, dense_output=True)
    t = np.linspace(0.1, 5.0, 7)
    assert np.allclose(rl.sigma(t), sol.sol(t)[0], atol=1e-10)


def test_roulette_is_undulary():
    rl = Roulette(0.3, t_span=(-1.0, 7.0))
    x = np.linspace(0.0, rl.period, 9)
    u = rl.graph_jet(x)
    # constant mean curvature 1 for a graph rho = u(x) about the x-axis
    w = np.sqrt(1 + u[1] ** 2)
    H = 0.5 * (1 / (u[0] * w) - u[2] / w**3)
    assert np.allclose(H, 1.0, atol=1e-10)
    assert u[0][0] == pytest.approx(0.5 + rl.c, abs=1e-12)


def test_smooth_step():
    x = np.linspace(-1.0, 1.0, 2001)
    phi = smooth_step(x, 0.0, 1.0)
    assert phi[0][0] == 0.0 and phi[0][-1] == 1.0
    assert phi[0][1000] == pytest.approx(0.5, abs=1e-14)
    assert np.all(np.diff(phi[0]) >= -1e-14)
    h = x[1] - x[0]
    for k in range(3):
        fd = np.gradient(phi[k], h)
        assert np.max(np.abs(fd[2:-2] - phi[k + 1][2:-2])) < 1e-3 * max(1, np.max(np.abs(phi[k + 1])))


@pytest.fixture(scope="module")
def delaunay():
    return capped_delaunay(0.2)


def test_delaunay_region_has_constant_H(delaunay):
    assert H_stddev(delaunay, "delaunay") <= 1e-10
    assert np.allclose(delaunay.samples.H[delaunay.region_mask("delaunay")], 1.0, atol=1e-10)
    assert sup_grad_H(delaunay, "delaunay") <= 1e-8
    assert sup_grad_H(delaunay, "blend") > 0.1


def test_delaunay_gauss_bonnet_and_symmetry(delaunay):
    assert gauss_bonnet(delaunay) == pytest.approx(4 * math.pi, abs=1e-6)
    smp = delaunay.samples
    assert np.allclose(smp.H, smp.H[::-1], atol=1e-8)


def test_delaunay_consistency_check(delaunay):
    v = sup_grad_II(delaunay, check=True)
    assert v > 1.0


def test_delaunay_refinement_guard():
    eps = 0.1
    with pytest.raises(RefinementError):
        capped_delaunay(eps, resolution=min_delaunay_resolution(eps) - 1)
    capped_delaunay(eps, resolution=min_delaunay_resolution(eps))


def test_delaunay_invalid_arguments():
    with pytest.raises(DomainError):
        capped_delaunay(1.5)
    with pytest.raises(DomainError):
        capped_delaunay(0.2, periods=0)
    with pytest.raises(DomainError):
        capped_delaunay(0.2, blend=(0.0, 3.0))


def test_delaunay_grad_H_decreases_with_eps():
    vals = [sup_grad_H(capped_delaunay(e).normalized(), "blend") for e in (0.2, 0.1)]
    assert vals[1] < vals[0]


def test_delaunay_far_from_round():
    s = capped_delaunay(0.1).normalized()
    assert umbilical_deficit(s).sup >= 0.5
    assert intrinsic_diameter(s, 128) >= 6.0


# ---------------------------------------------------------------- misc


def test_cylinder_is_open():
    c = cylinder_surface(1.0, 2.0)
    assert c.area == pytest.approx(4 * math.pi, rel=1e-13)
    assert np.allclose(grad_H(c), 0.0)
    with pytest.raises(DomainError):
        topping_report(c, diameter=1.0)


def test_consistency_error_is_raised_on_mismatch(monkeypatch):
    import dtnlab.surface_geometry.invariants as inv

    s = ellipsoid_surface(1.0, 1.5, resolution=64)
    monkeypatch.setattr(inv, "fd_grad_II_norm", lambda surf: 2.0 * inv.grad_II_norm(surf))
    with pytest.raises(ConsistencyError):
        inv.sup_grad_II(s, check=True)


def test_exports(tmp_path):
    s = sphere_surface(64)
    obj = to_obj(s, meridian=16, around=8, path=tmp_path / "s.obj")
    verts = [l for l in obj.splitlines() if l.startswith("v ")]
    faces = [l for l in obj.splitlines() if l.startswith("f ")]
    # 17 meridian samples: two poles and 15 rings of 8
    assert len(verts) == 2 + 15 * 8
    assert len(faces) == 2 * 8 + 2 * 14 * 8
    for line in verts:
        x, y, z = map(float, line.split()[1:])
        assert x**2 + y**2 + z**2 == pytest.approx(1.0, abs=1e-9)
    text = curvature_csv(s)
    rows = text.strip().splitlines()
    assert rows[0].split(",") == list(CURVATURE_COLUMNS)
    assert len(rows) == 1 + len(s.samples.p)
    rep = geometry_report(s, 64)
    assert rep["gauss_bonnet"] == pytest.approx(4 * math.pi, abs=1e-6)
