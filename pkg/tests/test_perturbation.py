import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from dtnlab.errors import DomainError, QuadratureWarning
from dtnlab.harmonics import HarmonicIndex, harmonic_basis, quadrature
from dtnlab.perturbation import (
    BallPotential,
    adaptive_rule,
    commutator_report,
    harmonic_moment,
    haar_rotations,
    parse_ball,
    perturbative_dtn_matrix,
    radial_deficit,
    radial_projection,
    rotation_average,
)
from dtnlab.radial_schrodinger import dtn_radial, parse_radial

X3 = BallPotential.monomial((0, 0, 1))


def _bump(r, r0=0.5, w=0.2):
    t = (r - r0) / w
    return math.exp(1 - 1 / (1 - t * t)) if abs(t) < 1 else 0.0


def test_monomial_x3_closed_form():
    M = perturbative_dtn_matrix(X3, 3, 2, quadrature("ball", 3, 8))
    assert M.matrix[1 + 1, 0] == pytest.approx(1 / (5 * math.sqrt(3)), abs=1e-14)  # (1,0) row is position 2
    rep = commutator_report(M)
    assert abs(rep.C[2, 0]) == pytest.approx(2 / (5 * math.sqrt(3)), abs=1e-12)
    # x3 only couples degrees of opposite parity
    for k, (a, b) in M.blocks.items():
        for l, (c, d) in M.blocks.items():
            if (k + l) % 2 == 0:
                assert np.max(np.abs(M.matrix[a:b, c:d])) < 1e-14


def test_x3_bump_against_quad_oracle():
    q = parse_ball("monomial:0,0,1 x bump:0.5,0.2")
    rule = adaptive_rule(q, 3, 6)
    with warnings.catch_warnings():
        warnings.simplefilter("error", QuadratureWarning)
        M = perturbative_dtn_matrix(q, 3, 6, rule)
    radial, _ = quad(lambda r: _bump(r) * r**4, 0.3, 0.7, epsabs=1e-14, epsrel=1e-13)
    oracle = radial / math.sqrt(3)
    assert M.matrix[2, 0] == pytest.approx(oracle, abs=1e-8)
    assert commutator_report(M).C[2, 0] == pytest.approx(-2 * oracle, abs=2e-8)


@pytest.mark.parametrize("spec", ["radial:const:1", "radial:well:1,2", "radial:bump:1,0.5,0.2",
                                  "radial:well:-2,1", "radial:bump:2,0.3,0.25"])
def test_radial_potentials_commute(spec):
    q = parse_ball(spec)
    rule = adaptive_rule(q, 3, 6)
    rep = commutator_report(perturbative_dtn_matrix(q, 3, 6, rule))
    assert rep.h1_l2_norm <= 1e-8


def test_linearization_matches_radial_solver():
    # (Lambda_{t q} - Lambda_0)/t -> M(q), with O(t) error
    well = parse_radial("well:1,2")
    M = perturbative_dtn_matrix(well, 3, 4, quadrature("ball", 3, 10, radial_level=20))
    base = dtn_radial(parse_radial("const:0"), 3, 4, rtol=1e-13)
    errs = []
    for t in (1e-3, 5e-4):
        op = dtn_radial(well.scaled(t), 3, 4, rtol=1e-13)
        errs.append(np.max(np.abs((op.matrix - base.matrix) / t - M.matrix)))
    assert errs[0] <= 1e-4
    assert errs[1] <= 2.5e-5
    assert 1.6 < errs[0] / errs[1] < 2.4


def test_coarse_rule_warns():
    q = parse_ball("monomial:0,0,1 x bump:0.5,0.2")
    with pytest.warns(QuadratureWarning):
        perturbative_dtn_matrix(q, 3, 4, quadrature("ball", 3, 4))


def test_matrix_symmetric_for_generic_potential():
    q = parse_ball("sum:[monomial:1,0,0 x monomial:0,1,0;radial:well:1,1]")
    M = perturbative_dtn_matrix(q, 3, 4, quadrature("ball", 3, 10), check=False)
    assert M.asymmetry() <= 1e-14


def test_diagonal_blocks_of_commutator_vanish():
    q = parse_ball("monomial:1,1,0")
    rep = commutator_report(perturbative_dtn_matrix(q, 3, 4, quadrature("ball", 3, 10)))
    for a, b in rep.M.blocks.values():
        assert np.all(rep.C[a:b, a:b] == 0.0)
    assert rep.max_entry > 0.01
    d = rep.to_dict()
    assert set(d) == {"basis", "K", "M", "C", "h1_l2_norm", "max_entry"}


def test_moment_lemma_radial():
    q = parse_ball("radial:well:1,1")
    rule = quadrature("ball", 3, 14, radial_level=14)
    basis = harmonic_basis(3, 6)
    worst_distinct, best_same = 0.0, 0.0
    for i, u in enumerate(basis):
        for v in basis[i:]:
            m = abs(harmonic_moment(q, u, v, rule))
            if u.k != v.k:
                worst_distinct = max(worst_distinct, m)
            else:
                best_same = max(best_same, m)
    assert worst_distinct <= 1e-10
    assert best_same > 1e-3


def test_moment_closed_form():
    # int (1 - r^2) r^{2k} dV over B^3 for an orthonormal Y
    q = parse_ball("radial:well:1,1")
    rule = quadrature("ball", 3, 10)
    for k in range(4):
        u = HarmonicIndex(3, k, 0)
        exact = 1 / (2 * k + 3) - 1 / (2 * k + 5)
        assert harmonic_moment(q, u, u, rule) == pytest.approx(exact, rel=1e-13)


def test_radial_projection_properties():
    rule = quadrature("ball", 3, 8)
    r = np.linspace(0, 1, 11)
    assert np.max(np.abs(radial_projection(X3, 3, rule)(r))) < 1e-14
    Pq = radial_projection(parse_ball("monomial:0,0,2"), 3, rule)
    assert np.allclose(Pq(r), r**2 / 3, atol=1e-13)
    P2 = radial_projection(BallPotential.from_radial(Pq), 3, rule)
    assert np.max(np.abs(P2(r) - Pq(r))) <= 1e-12
    assert radial_deficit(parse_ball("radial:well:1,2"), 3, rule) < 1e-14
    assert radial_deficit(X3, 3, rule) == pytest.approx(math.sqrt(4 * math.pi / 15), rel=1e-13)


def test_rotation_identity_x3():
    rule = quadrature("ball", 3, 4)
    runs = [rotation_average(X3, 3, 400, rule, seed=s) for s in range(10)]
    assert runs[0].target == pytest.approx(8 * math.pi / 15, rel=1e-13)
    pooled = np.mean([r.mean for r in runs])
    pooled_err = np.mean([r.stderr for r in runs]) / math.sqrt(10)
    assert abs(pooled - 8 * math.pi / 15) <= 4 * pooled_err
    # standard error scales like samples^{-1/2}
    big = [rotation_average(X3, 3, 1600, rule, seed=100 + s).stderr for s in range(10)]
    ratio = np.mean([r.stderr for r in runs]) / np.mean(big)
    assert 1.7 < ratio < 2.3


def test_rotation_average_is_seeded():
    rule = quadrature("ball", 3, 3)
    a = rotation_average(X3, 3, 50, rule, seed=7)
    b = rotation_average(X3, 3, 50, rule, seed=7)
    assert a == b


@given(seed=st.integers(0, 2**31 - 1), n=st.sampled_from([2, 3]))
@settings(max_examples=20, deadline=None)
def test_haar_samples_are_rotations(seed, n):
    R = haar_rotations(n, 5, np.random.default_rng(seed))
    eye = np.broadcast_to(np.eye(n), R.shape)
    assert np.allclose(np.einsum("sji,sjk->sik", R, R), eye, atol=1e-12)
    assert np.allclose(np.linalg.det(R), 1.0)


def test_two_dimensional_radial_commutes():
    q = parse_ball("radial:well:1,2", n=2)
    rep = commutator_report(perturbative_dtn_matrix(q, 2, 6, adaptive_rule(q, 2, 6)))
    assert rep.h1_l2_norm <= 1e-8


def test_parse_ball_errors():
    for bad in ("monomial:1,2", "monomial:a,b,c", "sum:monomial:1,0,0", "zzz:1", "monomial:-1,0,0"):
        with pytest.raises(DomainError):
            parse_ball(bad)
    with pytest.raises(DomainError):
        perturbative_dtn_matrix(X3, 3, 2, quadrature("sphere", 3, 4))
    with pytest.raises(DomainError):
        rotation_average(X3, 3, 0, quadrature("ball", 3, 2))


def test_parse_ball_products_and_sums():
    x = np.array([[0.1, 0.2, 0.3], [0.5, -0.1, 0.4]])
    q = parse_ball("sum:[monomial:1,0,0;monomial:0,0,1 * radial:const:2]")
    assert np.allclose(q(x), x[:, 0] + 2 * x[:, 2])
    assert q.polynomial_degree is None
    assert parse_ball("monomial:1,0,0 x monomial:0,1,1").polynomial_degree == 3
