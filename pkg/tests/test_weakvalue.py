import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from superosc.exceptions import OrthogonalSelectionError, SuperoscError
from superosc.signal import SampledField
from superosc.weakvalue import (
    SX, SZ, UP_X, UP_Z, HermitianOperator, PointerModel, TwoStateVector,
    collective_spin_weak_value, collective_spin_weak_value_tensor, expectation,
    expectation_eigensum, fig5_selections, fig5_sweep, mean_momentum, pointer_final_state,
    pointer_momentum_shift, pointer_momentum_variance, spin_tail_exact, spin_tail_fractions,
    spin_tail_mc, spin_weak_values, superweak_probability, supershift_error, weak_value,
)

SPIN_OP = HermitianOperator((SX + SZ) / np.sqrt(2))


def random_state(rng, d):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_hermitian(rng, d):
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return HermitianOperator((m + m.conj().T) / 2)


# -- expectation and weak values -----------------------------------------------------


def test_expectation_examples():
    sz = HermitianOperator(SZ)
    assert expectation(sz, UP_Z) == pytest.approx(0.5, abs=1e-15)
    assert expectation(sz, UP_X) == pytest.approx(0.0, abs=1e-15)


def test_expectation_two_paths_and_bounds():
    rng = np.random.default_rng(0)
    for _ in range(50):
        op = random_hermitian(rng, 4)
        psi = random_state(rng, 4)
        e = expectation(op, psi)
        assert e == pytest.approx(expectation_eigensum(op, psi), abs=1e-10)
        assert op.a_min - 1e-12 <= e <= op.a_max + 1e-12


def test_operator_validation():
    with pytest.raises(SuperoscError, match="Hermitian"):
        HermitianOperator([[0, 1], [0, 0]])
    with pytest.raises(SuperoscError):
        HermitianOperator(np.ones(3))
    with pytest.raises(SuperoscError):
        TwoStateVector([1, 0], [1, 1])


def test_weak_value_reduces_to_expectation():
    rng = np.random.default_rng(1)
    op = random_hermitian(rng, 3)
    psi = random_state(rng, 3)
    aw = weak_value(TwoStateVector(psi, psi), op)
    assert aw == pytest.approx(expectation(op, psi), abs=1e-12)


def test_spin_weak_value_outside_spectrum():
    aw = weak_value(TwoStateVector(UP_Z, UP_X), SPIN_OP)
    assert aw == pytest.approx(1 / np.sqrt(2), abs=1e-14)
    assert aw.real > SPIN_OP.a_max


@pytest.mark.parametrize("eps", [1e-2, 1e-4, 1e-6])
def test_weak_value_grows_for_nearly_orthogonal_selections(eps):
    # real qubit states at angles pi/4 and -pi/4 + eps: overlap sin(eps)
    b = -np.pi / 4 + eps
    tsv = TwoStateVector.from_unnormalized([1, 1], [np.cos(b), np.sin(b)])
    aw = weak_value(tsv, HermitianOperator(SZ))
    assert aw == pytest.approx(0.5 / np.tan(eps), rel=1e-8)
    assert abs(aw) * 2 * eps == pytest.approx(1, rel=1e-3)


def test_orthogonal_selection_raises():
    with pytest.raises(OrthogonalSelectionError, match="orthogonal"):
        weak_value(TwoStateVector(UP_Z, [0, 1]), HermitianOperator(SZ))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.floats(-5, 5), st.floats(-5, 5))
def test_weak_value_linearity(seed, alpha, beta):
    rng = np.random.default_rng(seed)
    a, b = random_hermitian(rng, 3), random_hermitian(rng, 3)
    tsv = TwoStateVector(random_state(rng, 3), random_state(rng, 3))
    lhs = weak_value(tsv, alpha * a + beta * b)
    rhs = alpha * weak_value(tsv, a) + beta * weak_value(tsv, b)
    scale = 1 + abs(alpha * weak_value(tsv, a)) + abs(beta * weak_value(tsv, b))
    assert abs(lhs - rhs) < 1e-12 * scale


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_collective_weak_value_matches_tensor(n):
    assert collective_spin_weak_value(n) == pytest.approx(np.sqrt(2) / 2 * n, abs=1e-14)
    assert abs(collective_spin_weak_value_tensor(n) - np.sqrt(2) / 2 * n) < 1e-12


def test_collective_weak_value_exceeds_bound():
    assert collective_spin_weak_value(100) == pytest.approx(50 * np.sqrt(2))
    for n in (1, 10, 100, 1000):
        assert collective_spin_weak_value(n) > n / 2


# -- pointer -----------------------------------------------------------------------------


def make_pointer(width, coupling, reach=60.0, spacing=0.02):
    n = int(reach / spacing)
    return PointerModel(width, coupling, spacing * np.arange(-n, n + 1))


def test_single_eigenvalue_gives_exact_shift():
    op = HermitianOperator.diagonal([2.5])
    tsv = TwoStateVector([1.0], [1j])
    pm = make_pointer(1.5, 3.0)
    state = pointer_final_state(pm, tsv, op)
    np.testing.assert_allclose(state.values, tsv.overlap * pm.initial(pm.grid - 7.5), atol=1e-15)
    assert supershift_error(pm, tsv, op) < 1e-14


def test_zero_coupling_leaves_pointer_in_place():
    rng = np.random.default_rng(2)
    op = random_hermitian(rng, 4)
    tsv = TwoStateVector(random_state(rng, 4), random_state(rng, 4))
    pm = make_pointer(2.0, 0.0)
    state = pointer_final_state(pm, tsv, op)
    np.testing.assert_allclose(state.values, tsv.overlap * pm.initial(pm.grid), atol=1e-14)


def test_final_state_two_path_check():
    rng = np.random.default_rng(3)
    op = random_hermitian(rng, 5)
    tsv = TwoStateVector(random_state(rng, 5), random_state(rng, 5))
    pm = make_pointer(1.0, 2.0)
    state = pointer_final_state(pm, tsv, op)
    # independent diagonalization and term-by-term sum
    vals, vecs = np.linalg.eig(op.matrix)
    vecs = vecs / np.linalg.norm(vecs, axis=0)
    ref = np.zeros(pm.grid.size, dtype=complex)
    for a, v in zip(vals.real, vecs.T):
        c = np.vdot(tsv.post, v) * np.vdot(v, tsv.pre)
        ref += c * np.exp(-0.5 * ((pm.grid - 2.0 * a) / 1.0) ** 2) / np.sqrt(2 * np.pi)
    np.testing.assert_allclose(state.values, ref, atol=1e-10)


def test_grid_must_cover_shifted_copies():
    op = HermitianOperator.diagonal([-10, 10])
    tsv = TwoStateVector.from_unnormalized([1, 1], [1, 2])
    with pytest.raises(SuperoscError, match="cover"):
        pointer_final_state(make_pointer(1.0, 1.0, reach=12.0), tsv, op)
    pm = PointerModel.covering(1.0, 1.0, op)
    assert pm.grid[-1] >= 18 and pm.grid[0] <= -18


def test_supershift_example_with_weak_value_fifteen():
    op, tsv = fig5_selections(15)
    assert weak_value(tsv, op) == pytest.approx(15, rel=1e-8)
    pm = make_pointer(10.0, 1.0, reach=120.0, spacing=0.05)
    q_peak, _ = pointer_final_state(pm, tsv, op).peak()
    assert abs(q_peak) > 10
    assert q_peak == pytest.approx(15, rel=0.05)


def test_fig5_sweep_properties():
    op, tsv, rows = fig5_sweep()
    # exact analytically; cancellation in sum c_m costs about 1e-7 relative
    assert weak_value(tsv, op).real == pytest.approx(27, rel=1e-6)
    errors = [r["supershift_error"] for r in rows]
    assert np.all(np.diff(errors) < 0)
    last = rows[-1]
    assert last["peak_q"] > op.a_max and last["peak_q"] == pytest.approx(27, rel=0.05)
    ratio = last["peak_amplitude"] / rows[0]["peak_amplitude"]
    assert 1e-9 <= ratio <= 1e-7


def test_zero_norm_final_state_raises():
    op = HermitianOperator.diagonal([0.0, 1.0])
    tsv = TwoStateVector([1, 0], [0, 1])
    pm = make_pointer(1.0, 1.0)
    state = pointer_final_state(pm, tsv, op)
    assert np.all(state.values == 0) and np.isnan(state.weak_value.real)
    with pytest.raises(SuperoscError, match="zero norm"):
        supershift_error(pm, tsv, op)


def test_pointer_momentum_variance_by_quadrature():
    for width in (0.5, 1.0, 3.0):
        pm = make_pointer(width, 0.0)
        d = lambda q: (q / width ** 2) * pm.initial(q)  # -phi'(q)
        norm = quad(lambda q: pm.initial(q) ** 2, -np.inf, np.inf)[0]
        p2 = quad(lambda q: d(q) ** 2, -np.inf, np.inf)[0] / norm
        assert p2 == pytest.approx(pointer_momentum_variance(width), rel=1e-10)


def test_real_selections_give_no_kick():
    op, tsv = fig5_selections(15)
    assert pointer_momentum_shift(make_pointer(10.0, 1.0, reach=120.0), tsv, op) == 0.0


def test_momentum_kick_richardson_check():
    op = HermitianOperator.diagonal([-1.0, 0.0, 1.0])
    tsv = TwoStateVector.from_unnormalized([1, 1j, 1], [1, 0.5, 2j - 0.3])
    aw = weak_value(tsv, op)
    assert abs(aw.imag) > 0.1
    lam = 0.02
    num, formula = [], []
    for c in (lam, lam / 2):
        pm = make_pointer(1.0, c, reach=40.0, spacing=0.01)
        num.append(mean_momentum(pointer_final_state(pm, tsv, op).field))
        formula.append(pointer_momentum_shift(pm, tsv, op))
    # residuals are O(lambda^2): halving lambda quarters them
    r1, r2 = num[0] - formula[0], num[1] - formula[1]
    assert abs(r1) < 0.05 * abs(formula[0])
    assert abs(r2) < 0.3 * abs(r1) + 1e-12
    slope = (4 * num[1] / (lam / 2) - num[0] / lam) / 3
    assert slope == pytest.approx(formula[0] / lam, rel=1e-4)


def test_mean_momentum_of_plane_wave_packet():
    q = 0.01 * np.arange(-4000, 4001)
    g = np.exp(-q ** 2 / 2 + 1.7j * q)
    assert mean_momentum(SampledField((q[0],), (0.01,), g)) == pytest.approx(1.7, rel=1e-9)


# -- superweak statistics ------------------------------------------------------------


def test_superweak_examples():
    assert superweak_probability([-3, 3]) == pytest.approx(1 - 1 / np.sqrt(2), abs=1e-12)
    eps = 1e-8
    assert superweak_probability([-1, 0, 1], [eps / 2, 1 - eps, eps / 2]) < 1e-7
    # uniform density: <A^2> = A_max^2 / 3
    dense = np.linspace(-1, 1, 200001)
    w = np.full(dense.size, 1 / dense.size)
    assert superweak_probability(dense, w) == pytest.approx(1 - np.sqrt(3) / 2, abs=1e-5)
    with pytest.raises(SuperoscError):
        superweak_probability([0.0, 0.0])
    with pytest.raises(SuperoscError):
        superweak_probability([1.0, -1.0], [0.3, 0.3])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-1, 1), max_size=10), st.floats(0.1, 10))
def test_superweak_bounds(inner, a_max):
    vals = np.r_[-a_max, a_max, a_max * np.array(inner)]
    p = superweak_probability(vals)
    assert 0 < p <= 1 - 1 / np.sqrt(2) + 1e-15


def test_spin_weak_values_match_matrix_form():
    rng = np.random.default_rng(0)
    w = spin_weak_values(5, seed=9)
    # regenerate the same Bloch samples and build explicit qubit states
    from superosc.signal import make_rng
    r = make_rng(9, 2, 0)
    az, bz, dphi = r.uniform(-1, 1, 5), r.uniform(-1, 1, 5), r.uniform(0, 2 * np.pi, 5)
    for k in range(5):
        phi_a = rng.uniform(0, 2 * np.pi)
        th_a, th_b = np.arccos(az[k]), np.arccos(bz[k])
        pre = [np.cos(th_a / 2), np.exp(1j * phi_a) * np.sin(th_a / 2)]
        post = [np.cos(th_b / 2), np.exp(1j * (phi_a + dphi[k])) * np.sin(th_b / 2)]
        direct = weak_value(TwoStateVector(pre, post), HermitianOperator(SZ))
        assert w[k] == pytest.approx(direct, rel=1e-10)


def test_spin_tail_small_thresholds():
    est, err = spin_tail_fractions([0.0, 0.25, 0.5, 1.0, 3.0], 10 ** 6, seed=1)
    assert est[0] == 1.0
    assert np.all(np.diff(est) <= 0)
    exact = spin_tail_exact([0.25, 0.5, 1.0, 3.0])
    assert np.all(np.abs(est[1:] - exact) < 4 * err[1:])
    assert spin_tail_exact(0.5) == pytest.approx(1 / 3)
    assert spin_tail_exact(100) == pytest.approx(1 / 120000)


def test_spin_tail_is_reproducible():
    a = spin_tail_mc(0.5, 50_000, seed=3)
    b = spin_tail_mc(0.5, 50_000, seed=3)
    assert a == b and a.samples == 50_000


def test_modulus_variant_is_larger():
    re, _ = spin_tail_fractions([0.5, 2.0], 200_000, seed=4)
    mod, _ = spin_tail_fractions([0.5, 2.0], 200_000, seed=4, modulus=True)
    assert np.all(mod >= re)


def test_spin_tail_validation():
    with pytest.raises(SuperoscError):
        spin_tail_mc(0.5, 100, seed=0)
    with pytest.raises(SuperoscError):
        spin_tail_fractions([-1.0], 10 ** 4, seed=0)
