import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp
from scipy.special import iv, ivp, jv, jvp, spherical_in, spherical_jn

from dtnlab.errors import DirichletEigenvalueError, DomainError
from dtnlab.radial_schrodinger import (
    ball_symbol,
    conformal_to_potential,
    dtn_radial,
    parse_radial,
    solve_radial_mode,
    symbol_table,
    symbol_table_csv,
)


def test_free_potential_reproduces_ball():
    op = dtn_radial(parse_radial("const:0"), 3, 10)
    assert np.max(np.abs(np.diag(op.matrix) - op.degrees)) <= 1e-10


@pytest.mark.parametrize("c", [0.5, 1.0, 4.0, 25.0])
def test_constant_positive_three_dims(c):
    a = math.sqrt(c)
    op = dtn_radial(parse_radial(f"const:{c}"), 3, 8)
    for k in range(9):
        exact = a * spherical_in(k, a, derivative=True) / spherical_in(k, a)
        assert op.block(k)[0, 0] == pytest.approx(exact, abs=1e-9)


@pytest.mark.parametrize("c", [1.0, 5.0])
def test_constant_negative_three_dims(c):
    a = math.sqrt(c)
    op = dtn_radial(parse_radial(f"const:{-c}"), 3, 6)
    for k in range(7):
        exact = a * spherical_jn(k, a, derivative=True) / spherical_jn(k, a)
        assert op.block(k)[0, 0] == pytest.approx(exact, abs=1e-9)


@pytest.mark.parametrize("c", [2.0, -3.0])
def test_constant_two_dims(c):
    a = math.sqrt(abs(c))
    op = dtn_radial(parse_radial(f"const:{c}"), 2, 6)
    for k in range(7):
        exact = a * ivp(k, a) / iv(k, a) if c > 0 else a * jvp(k, a) / jv(k, a)
        assert op.block(k)[0, 0] == pytest.approx(exact, abs=1e-9)


def test_closed_form_k0():
    mu0 = solve_radial_mode(parse_radial("const:1"), 3, 0).mu
    assert abs(mu0 - (1 / math.tanh(1.0) - 1.0)) <= 1e-9


def test_dirichlet_eigenvalue_raises():
    # sin(pi r)/r vanishes on the boundary
    with pytest.raises(DirichletEigenvalueError) as info:
        dtn_radial(parse_radial(f"const:{-math.pi**2}"), 3, 2)
    assert info.value.degree == 0


def test_bump_against_shooting_oracle():
    # plain solve_ivp from a small radius, no Frobenius launch
    q = parse_radial("bump:3,0.5,0.3")
    for k in (0, 1, 4):
        def rhs(r, y):
            f, df = y
            return [df, -(2 / r) * df + (k * (k + 1) / r**2 + q(r)) * f]

        r0 = 1e-3
        sol = solve_ivp(rhs, (r0, 1.0), [r0**k, k * r0 ** max(k - 1, 0) if k else 0.0],
                        rtol=1e-12, atol=1e-14, method="DOP853")
        oracle = sol.y[1, -1] / sol.y[0, -1]
        assert solve_radial_mode(q, 3, k).mu == pytest.approx(oracle, abs=1e-7)


@given(c=st.floats(0.0, 20.0), K=st.integers(1, 6))
@settings(max_examples=15, deadline=None)
def test_nonnegative_potential_raises_symbol(c, K):
    table = symbol_table(parse_radial(f"const:{c}"), 3, K)
    mus = [mu for _, mu in table]
    assert all(mu >= k - 1e-9 for k, mu in enumerate(mus))
    assert all(b > a for a, b in zip(mus, mus[1:]))


def test_symbol_table_and_csv():
    table = symbol_table(parse_radial("const:0"), 3, 3)
    assert [lam for lam, _ in table] == [0.0, 2.0, 6.0, 12.0]
    assert np.allclose([mu for _, mu in table], ball_symbol([0, 2, 6, 12], 3), atol=1e-10)
    text = symbol_table_csv(table)
    assert text.splitlines()[0] == "k,laplace_eigenvalue,mu"
    assert len(text.splitlines()) == 5


def test_ball_symbol_two_dims():
    assert np.allclose(ball_symbol(np.array([0.0, 1.0, 4.0]), 2), [0, 1, 2])


def _conductivity_dtn(phi, n, k):
    # (gamma r^{n-1} v')' = gamma k(k+n-2) r^{n-3} v, solved for v directly
    h = 1e-6

    def gamma(r):
        return np.exp((n - 2) * phi(r))

    def dgamma(r):
        return (gamma(r + h) - gamma(r - h)) / (2 * h)

    def rhs(r, y):
        v, dv = y
        return [dv, -(n - 1) / r * dv - dgamma(r) / gamma(r) * dv + k * (k + n - 2) / r**2 * v]

    r0 = 1e-3
    sol = solve_ivp(rhs, (r0, 1.0), [r0**k, k * r0 ** (k - 1) if k else 0.0],
                    rtol=1e-11, atol=1e-13, method="DOP853")
    return sol.y[1, -1] / sol.y[0, -1]


def test_conformal_potential_sign_matches_conductivity_problem():
    # phi supported away from 0 and 1, so gamma = 1 at the boundary and both DtN maps agree
    def phi(r):
        t = (np.asarray(r, dtype=float) - 0.5) / 0.3
        out = np.zeros_like(t)
        inside = np.abs(t) < 1
        out[inside] = 0.4 * np.exp(1 - 1 / (1 - t[inside] ** 2))
        return out

    q = conformal_to_potential(phi, 3)
    for k in range(4):
        mu = solve_radial_mode(q, 3, k).mu
        assert mu == pytest.approx(_conductivity_dtn(phi, 3, k), abs=2e-5)


def test_parse_radial_families():
    r = np.linspace(0, 1, 5)
    assert np.allclose(parse_radial("well:2,1")(r), 2 * (1 - r**2))
    assert np.allclose(parse_radial("const:-1.5")(r), -1.5)
    b = parse_radial("bump:0.5,0.2")
    assert b(0.5) == pytest.approx(1.0) and b(0.0) == 0.0 and b(0.8) == 0.0
    for bad in ("nope:1", "const:", "well:1", "bump:0.5,-1", "const:x"):
        with pytest.raises(DomainError):
            parse_radial(bad)


def test_table_potential(tmp_path):
    path = tmp_path / "q.csv"
    r = np.linspace(0, 1, 41)
    path.write_text("r,q\n" + "".join(f"{a},{1.0}\n" for a in r))
    mu = solve_radial_mode(parse_radial(f"tablefile:{path}"), 3, 0).mu
    assert mu == pytest.approx(1 / math.tanh(1.0) - 1.0, abs=1e-9)


def test_negative_degree_rejected():
    with pytest.raises(DomainError):
        solve_radial_mode(parse_radial("const:0"), 3, -1)
