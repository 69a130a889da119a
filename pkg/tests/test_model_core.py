import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xplattice.exceptions import SingularMatrixError
from xplattice.levels import LevelSequence, ModelCouplings, boundary_phase
from xplattice.model_core import (bk_from_momentum, build_bk_regularized, build_inverse_model,
                                  build_ipm, build_lattice_xp_operators, build_rd,
                                  commutator, commutator_spectrum)

R2 = math.sqrt(2.0)


def sgn(x):
    return (x > 0) - (x < 0)


def loop_inverse(eps, g, h):
    N = len(eps)
    M = np.zeros((N, N), dtype=complex)
    for n in range(N):
        for m in range(N):
            M[n, m] = 0.5 * (g + 1j * h * sgn(n - m)) / math.sqrt(eps[n] * eps[m])
    return M


def random_instance(rng, N):
    eps = np.cumsum(rng.uniform(0.1, 2.0, N))
    return LevelSequence.explicit(eps), ModelCouplings(g=rng.uniform(-5, 5), h=rng.uniform(-5, 5))


# levels and couplings

def test_level_generators():
    assert np.array_equal(LevelSequence.uniform(4, 0.5).levels, [1.5, 2.5, 3.5, 4.5])
    assert np.allclose(LevelSequence.corrected(3, 0.0, 1.0).levels, [2.0, 2.5, 3 + 1 / 3])
    assert np.array_equal(LevelSequence.constant(3).levels, [1.0, 1.0, 1.0])
    assert np.array_equal(LevelSequence.prime_filtered(10).levels, [1, 4, 6, 8, 9, 10])


def test_nonpositive_level_reports_index():
    with pytest.raises(ValueError, match=r"levels\[3\]"):
        LevelSequence.explicit([1.0, 2.0, -1.0])
    with pytest.raises(ValueError, match=r"levels\[1\]"):
        LevelSequence.uniform(3, -1.0)


def test_non_increasing_corrected_rejected():
    with pytest.raises(ValueError, match="increasing"):
        LevelSequence.corrected(3, 0.0, 5.0)


def test_levels_are_read_only():
    lv = LevelSequence.uniform(3)
    with pytest.raises(ValueError):
        lv.levels[0] = 7.0


def test_boundary_phase_branch():
    assert boundary_phase(0.0, 1.0) == pytest.approx(math.pi / 2)
    assert boundary_phase(-1.0, 1e-300) == pytest.approx(math.pi)
    with pytest.raises(ValueError):
        boundary_phase(0.0, 0.0)
    assert ModelCouplings.from_hbar(0.5).h == 2.0


# inverse model

def test_inverse_model_n2():
    H = build_inverse_model([1.0, 2.0], ModelCouplings(g=0.0, h=1.0))
    assert np.array_equal(np.diag(H), [0, 0])
    assert H[0, 1] == pytest.approx(-1j / (2 * R2))
    assert H[1, 0] == pytest.approx(1j / (2 * R2))


@pytest.mark.parametrize("eps,g,h", [(3.0, 0.7, 2.0), (0.2, -1.0, 5.0)])
def test_inverse_model_n1(eps, g, h):
    H = build_inverse_model([eps], ModelCouplings(g=g, h=h))
    assert H.shape == (1, 1) and H[0, 0] == pytest.approx(g / (2 * eps))


def test_inverse_model_matches_loop():
    H = build_inverse_model([1.0, 2.0, 3.0], ModelCouplings(g=0.5, h=1.0))
    assert np.allclose(H, loop_inverse([1.0, 2.0, 3.0], 0.5, 1.0), atol=1e-15)


def test_builders_exactly_hermitian():
    rng = np.random.default_rng(1)
    for _ in range(10):
        lv, c = random_instance(rng, int(rng.integers(1, 20)))
        for M in (build_inverse_model(lv, c), build_rd(lv, c)):
            assert np.array_equal(M, M.conj().T)
            assert not M.flags.writeable


# Russian-doll model

def test_rd_one_site():
    H = build_rd([5.0], ModelCouplings(g=2.0, h=7.0))
    assert H[0, 0] == 4.0


def test_rd_two_sites_follows_formula():
    # entry (1,2) = -1/2 (i h sign(1 - 2)) = +i/2
    H = build_rd([1.0, 2.0], ModelCouplings(g=0.0, h=1.0))
    assert np.allclose(H, [[1, 0.5j], [-0.5j, 2]])


def test_rd_free():
    H = build_rd([1.0, 3.0, 4.0], ModelCouplings(g=0.0, h=0.0))
    assert np.array_equal(H, np.diag([1.0, 3.0, 4.0]))


# lattice xp operators

def test_lattice_operators_n2():
    X, P_inv, P = build_lattice_xp_operators(2)
    assert np.array_equal(X, np.diag([1, 2]))
    assert np.allclose(P, [[0, -2j], [2j, 0]])
    assert np.allclose(P_inv, [[0, -0.5j], [0.5j, 0]])
    assert np.allclose(P @ P_inv, np.eye(2), atol=1e-15)
    assert np.allclose(np.linalg.eigvalsh(P), [-2, 2])


@pytest.mark.parametrize("N", [2, 4, 6, 10, 30, 64])
def test_p_inverse_identity_and_trace(N):
    X, P_inv, P = build_lattice_xp_operators(N, hbar=0.7)
    assert np.max(np.abs(P @ P_inv - np.eye(N))) < 1e-12
    assert np.trace(X @ P - P @ X) == 0


def test_odd_n_has_no_p():
    X, P_inv, P = build_lattice_xp_operators(3)
    assert P is None
    with pytest.raises(SingularMatrixError, match="odd"):
        build_lattice_xp_operators(3, require_p=True)


# regularized BK Hamiltonian

def test_bk_regularized_n2():
    B = build_bk_regularized([1.0, 2.0], ModelCouplings(g=0.0, h=1.0))
    assert np.allclose(np.linalg.eigvalsh(B), [-2 * R2, 2 * R2])


def test_bk_regularized_constant_levels_is_p():
    B = build_bk_regularized(LevelSequence.constant(6), ModelCouplings(g=0.0, h=1.0))
    _, _, P = build_lattice_xp_operators(6)
    assert np.allclose(B, P, atol=1e-12)


def test_bk_regularized_equals_vpv():
    lv = LevelSequence.uniform(4)
    B = build_bk_regularized(lv, ModelCouplings(g=0.0, h=1.0))
    assert np.max(np.abs(B - bk_from_momentum(lv))) < 1e-12


def test_bk_regularized_singular_reports_condition():
    with pytest.raises(SingularMatrixError) as info:
        build_bk_regularized([1.0, 2.0, 3.0], ModelCouplings(g=0.0, h=1.0))
    assert info.value.condition > 1e13


def test_bk_eigenvalues_are_reciprocals():
    rng = np.random.default_rng(7)
    for _ in range(30):
        N = int(rng.integers(2, 33)) * 2
        lv, c = random_instance(rng, N)
        if abs(c.g) < 1e-3:
            continue
        b = np.sort(np.linalg.eigvalsh(build_bk_regularized(lv, c)))
        w = np.sort(1.0 / np.linalg.eigvalsh(build_inverse_model(lv, c)))
        assert np.max(np.abs(b - w) / np.abs(w)) < 1e-9


# I+/- models

def test_ipm_constant_vector_reduces():
    lv = LevelSequence.uniform(5, 0.3)
    c = ModelCouplings(g=0.8, h=1.3, g_vector=[0.8] * 5)
    for variant in ("plus", "minus"):
        assert np.array_equal(build_ipm(lv, c, variant), build_inverse_model(lv, c))
        assert np.array_equal(build_ipm(lv, c, variant, "rd"), build_rd(lv, c))


def test_ipm_entry_pattern():
    eps = [1.0, 2.0, 3.0]
    gv = [1.0, 2.0, 3.0]
    H = build_ipm(eps, ModelCouplings(h=0.5, g_vector=gv), "plus")
    Hm = build_ipm(eps, ModelCouplings(h=0.5, g_vector=gv), "minus")
    for n in range(3):
        for m in range(3):
            ref = 0.5 * (gv[max(n, m)] + 0.5j * sgn(n - m)) / math.sqrt(eps[n] * eps[m])
            refm = 0.5 * (gv[min(n, m)] + 0.5j * sgn(n - m)) / math.sqrt(eps[n] * eps[m])
            assert H[n, m] == pytest.approx(ref, abs=1e-15)
            assert Hm[n, m] == pytest.approx(refm, abs=1e-15)


def test_ipm_length_mismatch():
    with pytest.raises(ValueError, match="length"):
        build_ipm([1.0, 2.0], ModelCouplings(g_vector=[1.0]))


def test_ipm_duality_reversal():
    rng = np.random.default_rng(3)
    for N in (2, 5, 8, 16):
        eps = np.cumsum(rng.uniform(0.2, 1.5, N))
        gv = rng.uniform(-2, 2, N)
        h = rng.uniform(0.3, 3.0)
        plus = build_ipm(eps, ModelCouplings(h=h, g_vector=gv), "plus")
        minus = build_ipm(eps[::-1], ModelCouplings(h=-h, g_vector=gv[::-1]), "minus")
        J = np.eye(N)[::-1]
        assert np.array_equal(J @ plus @ J, minus)
        assert np.allclose(np.linalg.eigvalsh(plus), np.linalg.eigvalsh(minus), atol=1e-12)


# commutator

def test_commutator_n2_by_hand():
    # X = diag(1,2), P = [[0,-2i],[2i,0]]: [X,P]/i = [[0,2],[2,0]]
    C = commutator(2)
    assert np.allclose(C, [[0, 2], [2, 0]])
    assert np.allclose(commutator_spectrum(2), [-2, 2])


@pytest.mark.parametrize("N", [2, 8, 20, 50, 100])
def test_commutator_sum_zero(N):
    w = commutator_spectrum(N, hbar=1.3)
    assert w.size == N
    assert abs(w.sum()) < 1e-9 * N * 1.3


def test_commutator_cluster_near_one():
    def cluster_width(N, k):
        w = commutator_spectrum(N)
        return np.max(np.sort(np.abs(w - 1))[:k])
    # frozen at N = 50; the cluster tightens with N
    assert cluster_width(50, 40) < 9.6
    assert cluster_width(100, 40) < 0.6
    assert cluster_width(200, 40) < 0.12
    assert cluster_width(400, 40) < cluster_width(200, 40) < cluster_width(100, 40)


def test_commutator_odd_n():
    with pytest.raises(SingularMatrixError):
        commutator_spectrum(5)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.05, 50.0), min_size=1, max_size=12),
       st.floats(-5, 5), st.floats(-5, 5))
def test_inverse_model_hermitian_property(eps, g, h):
    M = build_inverse_model(eps, ModelCouplings(g=g, h=h))
    assert np.array_equal(M, M.conj().T)
