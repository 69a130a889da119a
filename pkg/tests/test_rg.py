import math

import numpy as np
import pytest

from xplattice.exact_spectrum import exact_root, solve_spectrum_exact
from xplattice.exceptions import PoleError
from xplattice.levels import LevelSequence, ModelCouplings
from xplattice.model_core import build_inverse_model, build_rd
from xplattice.rg import (continuum_flow_g, cycle_count_estimate, discrete_s, iterated_size,
                          rd_couplings_from_inverse, rg_period, rg_step_inverse, rg_step_rd,
                          run_flow, russian_doll_scaling_check)

R2 = math.sqrt(2.0)
PURE = ModelCouplings(g=0.0, h=1.0)


def persistence_residual(lv, c, E_I):
    g1 = rg_step_inverse(c.g, c.h, E_I, lv.levels[-1])
    reduced = LevelSequence.explicit(lv.levels[:-1])
    w = np.linalg.eigvalsh(build_inverse_model(reduced, ModelCouplings(g=g1, h=c.h)))
    return np.min(np.abs(w - E_I)) / abs(E_I)


# single steps

def test_inverse_step_n2():
    g1 = rg_step_inverse(0.0, 1.0, 1 / (2 * R2), 2.0)
    assert g1 == pytest.approx(1 / R2, rel=1e-15)
    assert g1 / (2 * 1.0) == pytest.approx(1 / (2 * R2), rel=1e-15)


def test_free_fixed_point():
    assert rg_step_inverse(0.0, 0.0, 0.7, 3.0) == 0.0
    assert rg_step_rd(0.0, 0.0, 3.0) == 0.0


def test_pole_raises_with_location():
    with pytest.raises(PoleError) as info:
        rg_step_inverse(2.0, 1.0, 0.5, 2.0)
    assert info.value.location == 2.0
    with pytest.raises(PoleError):
        rg_step_rd(4.0, 1.0, 2.0)


def test_inverse_and_rd_steps_agree():
    rng = np.random.default_rng(8)
    for _ in range(100):
        g, h, E_I, eps = rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(0.1, 2), rng.uniform(0.5, 5)
        a = rg_step_inverse(g, h, E_I, eps) / E_I
        b = rg_step_rd(g / E_I, h / E_I, eps)
        assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


def test_weak_coupling_step():
    # the increment differs from (g^2 + h^2)/(2 eps) by the factor
    # 2 eps / (2 eps - g); below 1% needs |g| < 0.0198 eps
    rng = np.random.default_rng(9)
    for _ in range(50):
        eps = rng.uniform(1, 10)
        g, h = rng.uniform(-0.05, 0.05, 2) * eps
        exact = rg_step_rd(g, h, eps) - g
        approx = (g * g + h * h) / (2 * eps)
        assert abs(exact - approx) / abs(exact) == pytest.approx(abs(g) / (2 * eps), rel=1e-8)
        if abs(g) < 0.019 * eps:
            assert abs(exact - approx) < 0.01 * abs(exact)


def test_eigenvalue_persistence_one_step():
    rng = np.random.default_rng(10)
    for _ in range(20):
        N = int(rng.integers(2, 33))
        lv = LevelSequence.explicit(np.cumsum(rng.uniform(0.1, 2.0, N)))
        c = ModelCouplings(g=rng.uniform(-3, 3), h=rng.uniform(0.2, 3))
        for E_I in np.linalg.eigvalsh(build_inverse_model(lv, c)):
            assert persistence_residual(lv, c, E_I) < 1e-9


# flows

def test_flow_n2():
    st = run_flow([1.0, 2.0], PURE, E_I=1 / (2 * R2))
    assert len(st.trajectory) == 2
    assert st.g[0] == 0.0 and st.g[1] == pytest.approx(1 / R2)
    assert abs(st.closure_residual) < 1e-15
    assert st.remaining_size == 1 and st.level_cursor == 1


@pytest.mark.parametrize("direction", ["ir", "uv"])
def test_closure_vanishes_at_roots(direction):
    lv = LevelSequence.uniform(20, 0.5)
    c = ModelCouplings(g=0.3, h=1.2)
    for E in solve_spectrum_exact(lv, c).energies_bk:
        st = run_flow(lv, c, E_I=1 / E, direction=direction)
        assert abs(st.closure_residual) < 1e-9 * max(1.0, abs(st.g_current))


def test_closure_nonzero_off_root():
    lv = LevelSequence.uniform(20, 0.5)
    c = ModelCouplings(g=0.3, h=1.2)
    E = solve_spectrum_exact(lv, c).energies_bk[10]
    assert abs(run_flow(lv, c, E_I=1 / (1.05 * E)).closure_residual) > 1e-3


def test_flow_leaves_h_and_levels_untouched():
    lv = LevelSequence.uniform(30, 0.2)
    before = lv.levels.copy()
    c = ModelCouplings(g=0.1, h=0.77)
    st = run_flow(lv, c, E_I=0.4)
    assert st.h == c.h
    assert np.array_equal(lv.levels, before)


def test_pole_counts_match_cycle_estimate():
    lv = LevelSequence.uniform(10 ** 4)
    for k in range(1, 6):
        E = exact_root(lv, PURE, k)
        st = run_flow(lv, PURE, E_I=1 / E)
        assert abs(st.pole_count - round(E * math.log(lv.n) / (2 * math.pi))) <= 1


def test_rd_flow_tracks_continuum_at_fixed_length():
    dev = []
    g0, h, L = 0.2, 1.0, 2.0
    for N in (100, 1000, 10000):
        lv = LevelSequence.constant(N, N / L)
        st = run_flow(lv, ModelCouplings(g=g0, h=h), family="rd")
        ref = np.array([continuum_flow_g(s, g0, h) for s in st.s])
        dev.append(np.max(np.abs(ref - st.g)))
    assert dev[0] > dev[1] > dev[2]
    assert dev[2] < 1e-7


def test_flow_csv():
    st = run_flow([1.0, 2.0, 3.0], PURE, E_I=0.3)
    lines = st.to_csv().splitlines()
    assert lines[0] == "step,n_eliminated,s,g,pole_flag"
    assert len(lines) == 4
    assert lines[1].startswith("0,0,0.0,0.0,0")


def test_flow_rejects_bad_arguments():
    with pytest.raises(ValueError):
        run_flow([1.0, 2.0], PURE, E_I=None)
    with pytest.raises(ValueError):
        run_flow([1.0, 2.0], PURE, E_I=1.0, family="bcs")
    with pytest.raises(ValueError):
        run_flow([1.0, 2.0], PURE, E_I=1.0, direction="sideways")


# continuum flow

def test_continuum_flow_values():
    assert continuum_flow_g(0.0, 0.37, 1.3) == pytest.approx(0.37)
    assert continuum_flow_g(math.pi / 2, 0.0, 1.0) == pytest.approx(1.0)
    assert rg_period(2.0) == pytest.approx(math.pi)


def test_continuum_flow_periodic():
    rng = np.random.default_rng(12)
    g0, h = 0.4, 1.7
    lam = rg_period(h)
    for s in rng.uniform(-10, 10, 20):
        a, b = continuum_flow_g(s, g0, h), continuum_flow_g(s + lam, g0, h)
        assert b == pytest.approx(a, rel=1e-9, abs=1e-9)


def test_continuum_flow_ode():
    g0, h, ds = -0.3, 1.1, 1e-5
    for s in np.linspace(-2.0, 2.0, 41):
        g = continuum_flow_g(s, g0, h)
        if abs(g) > 20:
            continue
        d = (continuum_flow_g(s + ds, g0, h) - continuum_flow_g(s - ds, g0, h)) / (2 * ds)
        assert abs(d - 0.5 * (g * g + h * h)) < 1e-6


def test_continuum_flow_pole_is_signed_infinity():
    s_pole = math.pi  # h s / 2 = pi / 2 for h = 1, g0 = 0
    assert math.isinf(continuum_flow_g(s_pole, 0.0, 1.0))
    with pytest.raises(ValueError):
        continuum_flow_g(1.0, 0.0, 0.0)


# Russian-doll scaling and cycle counting

@pytest.mark.parametrize("n", [1, 2, 3])
def test_russian_doll_continuum_exact(n):
    assert russian_doll_scaling_check(LevelSequence.uniform(10 ** 4), PURE, n,
                                      method="continuum") < 1e-14


@pytest.mark.parametrize("n,bound", [(1, 0.12), (2, 0.03), (3, 0.012)])
def test_russian_doll_exact_frozen(n, bound):
    assert russian_doll_scaling_check(LevelSequence.uniform(10 ** 4), PURE, n) < bound


def test_russian_doll_errors():
    with pytest.raises(ValueError):
        russian_doll_scaling_check(LevelSequence.uniform(4), PURE, 1)
    with pytest.raises(ValueError):
        russian_doll_scaling_check(LevelSequence.constant(100), PURE, 1)


def test_rd_spectrum_exponential_doll_scaling():
    # deep bound states of the RD model obey E_n(N) ~ E_(n-1)(exp(-2 pi / h) N)
    h, N = 3.0, 4000
    lam = 2 * math.pi / h

    def spectrum(M):
        return np.linalg.eigvalsh(build_rd(LevelSequence.uniform(M), ModelCouplings(g=0.0, h=h)))

    a, b = spectrum(N), spectrum(int(round(N * math.exp(-lam))))
    mism = [abs(a[n] - b[n - 1]) / abs(a[n]) for n in (1, 2, 3)]
    assert mism[0] > mism[1] > mism[2]
    assert mism[2] < 0.01


def test_cycle_count_estimate():
    lv = LevelSequence.uniform(10 ** 4)
    for n in range(4):
        E = 2 * math.pi * (n + 0.5) / math.log(lv.n)
        assert cycle_count_estimate(lv, E) == pytest.approx(n + 0.5)
        assert iterated_size(lv.n, n, n + 0.5) == pytest.approx(1.0)
    assert cycle_count_estimate(lv, 0.0) == 0.0


def test_discrete_s_plus_q():
    lv = LevelSequence.uniform(50, 0.3)
    s, q, L = discrete_s(lv)
    assert np.array_equal(s + q, np.full(50, L)) or np.max(np.abs(s + q - L)) == 0.0
    assert s[-1] == 0.0


def test_rd_couplings_from_inverse():
    c = rd_couplings_from_inverse(ModelCouplings(g=0.4, h=2.0), 0.5)
    assert (c.g, c.h) == (0.8, 4.0)


def test_rd_state_is_zero_mode_of_flowed_rd():
    # the RD flow at E_I tracks the same elimination as the inverse flow
    lv = LevelSequence.uniform(12)
    E = solve_spectrum_exact(lv, PURE).energies_bk[7]
    rd = rd_couplings_from_inverse(PURE, 1 / E)
    a = run_flow(lv, PURE, E_I=1 / E)
    b = run_flow(lv, rd, family="rd")
    assert np.allclose(a.g * E, b.g, rtol=1e-10, atol=1e-12)
    assert abs(np.linalg.det(build_rd(lv, rd))) / np.prod(lv.levels) < 1e-10
