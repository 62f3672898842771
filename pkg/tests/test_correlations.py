import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nmcorr.channels import GadParams, apply_to_system, gad_kraus, purify
from nmcorr.correlations import (
    ae_information,
    binary_entropy,
    concurrence,
    conditional_entropy_sum,
    eof,
    eof_from_concurrence,
    info_breakdown_ae,
    measure_environment,
    measurement_oracle,
    mutual_information_sa,
    spin_flip_lambdas,
)
from nmcorr.errors import DimensionError, InconsistencyError
from nmcorr.qlinalg import DensityMatrix, PureState, haar_random_pure_state, partial_trace, von_neumann_entropy
from nmcorr.states import bell_state, witness_state

from conftest import random_density

P = GadParams(5.0, 0.25)
YY = np.fliplr(np.diag([-1.0, 1, 1, -1]))


def pure(v):
    v = np.asarray(v, dtype=complex)
    return DensityMatrix.from_pure(PureState(v / np.linalg.norm(v), (2, 2)))


def evolved(psi, t):
    return apply_to_system(gad_kraus(t, P), DensityMatrix.from_pure(psi))


def rho_ae(psi, t):
    big = DensityMatrix.from_pure(purify(gad_kraus(t, P), psi))
    return partial_trace(big, [1, 2])


def wootters_reference(m):
    # textbook route: eigenvalues of rho (YY) rho* (YY), square-rooted
    ev = np.linalg.eigvals(m @ YY @ m.conj() @ YY)
    lam = np.sort(np.sqrt(np.clip(ev.real, 0, None)))[::-1]
    return max(0.0, lam[0] - lam[1:].sum())


def test_concurrence_examples():
    assert concurrence(pure([1, 0, 0, 1])) == pytest.approx(1, abs=1e-12)
    assert concurrence(pure([1, 0, 0, 0])) == pytest.approx(0, abs=1e-12)
    rho = pure([math.sqrt(0.25), 0, 0, math.sqrt(0.75)])
    assert concurrence(rho) == pytest.approx(0.8660254, abs=1e-7)
    assert concurrence(rho, pure_fast_path=True) == pytest.approx(2 * math.sqrt(0.25 * 0.75), abs=1e-12)
    assert wootters_reference(rho.mat) == pytest.approx(0.8660254, abs=1e-6)


def test_concurrence_matches_textbook_on_mixed_states(rng):
    for _ in range(50):
        rho = DensityMatrix(random_density(rng, 4, rank=int(rng.integers(1, 5))), (2, 2))
        assert concurrence(rho) == pytest.approx(wootters_reference(rho.mat), abs=1e-6)


def test_spin_flip_lambdas_sorted(rng):
    lam = spin_flip_lambdas(DensityMatrix(random_density(rng), (2, 2)))
    assert np.all(np.diff(lam) <= 0) and lam[-1] >= 0


def test_concurrence_dimension_error():
    with pytest.raises(DimensionError):
        concurrence(DensityMatrix(np.eye(8) / 8, (2, 4)))


def test_werner_concurrence():
    # p |Phi+><Phi+| + (1 - p) I/4 has C = max(0, (3p - 1)/2)
    bell = pure([1, 0, 0, 1]).mat
    for p in (0.2, 1 / 3, 0.5, 0.9):
        rho = DensityMatrix(p * bell + (1 - p) * np.eye(4) / 4, (2, 2))
        assert concurrence(rho) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-12)


def test_eof_examples():
    assert eof(pure([1, 0, 0, 1])) == pytest.approx(1, abs=1e-12)
    assert eof(pure([0, 1, 0, 0])) == 0
    mpmath.mp.dps = 30
    x = mpmath.mpf("0.75")
    h = float(-x * mpmath.log(x, 2) - (1 - x) * mpmath.log(1 - x, 2))
    assert eof_from_concurrence(math.sqrt(0.75)) == pytest.approx(h, abs=1e-12)
    assert h == pytest.approx(0.8112781, abs=1e-7)


def test_eof_monotone_in_concurrence():
    c = np.linspace(0, 1, 1000)
    assert np.all(np.diff(eof_from_concurrence(c)) > 0)


def test_binary_entropy_edges():
    assert binary_entropy(0.0) == 0 and binary_entropy(1.0) == 0
    assert binary_entropy(0.5) == 1


def test_mutual_information_examples():
    assert mutual_information_sa(pure([1, 0, 0, 1])) == pytest.approx(2, abs=1e-12)
    assert mutual_information_sa(pure([1, 0, 0, 0])) == pytest.approx(0, abs=1e-12)
    assert mutual_information_sa(DensityMatrix(np.eye(4) / 4, (2, 2))) == pytest.approx(0, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_mutual_information_bounds(seed):
    r = np.random.default_rng(seed)
    mi = mutual_information_sa(DensityMatrix(random_density(r), (2, 2)))
    assert -1e-10 <= mi <= 2 + 1e-10


def test_breakdown_at_time_zero_is_zero():
    for psi in (bell_state(), witness_state(), haar_random_pure_state(4, 5)):
        b = info_breakdown_ae(DensityMatrix.from_pure(psi))
        assert abs(b.i_ae) <= 1e-10 and abs(b.j_ae) <= 1e-10 and abs(b.delta_ae) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 31), st.floats(0, 1))
def test_breakdown_invariants(seed, t):
    b = info_breakdown_ae(evolved(haar_random_pure_state(4, seed), t))
    assert abs(b.i_ae - b.j_ae - b.delta_ae) <= 1e-10
    assert min(b.i_ae, b.j_ae, b.delta_ae) >= -1e-10


def test_breakdown_matches_direct_entropies():
    psi, t = witness_state(), 0.2
    big = DensityMatrix.from_pure(purify(gad_kraus(t, P), psi))
    s = lambda keep: von_neumann_entropy(partial_trace(big, keep))
    b = info_breakdown_ae(evolved(psi, t))
    assert b.i_ae == pytest.approx(s([1]) + s([2]) - s([1, 2]), abs=1e-10)


def test_inconsistent_inputs_raise():
    with pytest.raises(InconsistencyError):
        ae_information(0.0, 0.0, 0.0, 0.5)
    with pytest.raises(InconsistencyError):
        ae_information(1.0, 0.2, 0.0, 0.0)


def test_koashi_winter_identity_along_grid():
    # S_A is constant under a channel on S, so Delta EoF = -Delta J exactly
    times = np.linspace(0, 0.25, 40)
    psi = witness_state()
    e = np.array([eof(evolved(psi, t)) for t in times])
    j = np.array([info_breakdown_ae(evolved(psi, t)).j_ae for t in times])
    assert np.max(np.abs(np.diff(e) + np.diff(j))) <= 1e-10


def test_measure_environment_probabilities():
    rho = rho_ae(bell_state(), 0.2)
    outs = measure_environment(rho, np.eye(4))
    assert sum(o.probability for o in outs) == pytest.approx(1, abs=1e-10)
    assert all(o.conditional_state is None or o.conditional_state.dims == (2,) for o in outs)


def test_oracle_product_state_is_zero(rng):
    rho = DensityMatrix(np.kron(random_density(rng, 2), random_density(rng, 4)), (2, 4))
    assert abs(measurement_oracle(rho, 200, seed=0)) <= 1e-10


def test_oracle_decoupled_environment_is_zero():
    assert abs(measurement_oracle(rho_ae(bell_state(), 0.0), 200, seed=0)) <= 1e-10


def test_oracle_below_and_close_to_koashi_winter():
    psi, t = bell_state(), 0.2
    kw = info_breakdown_ae(evolved(psi, t)).j_ae
    got = measurement_oracle(rho_ae(psi, t), 20_000, seed=42)
    assert got <= kw + 1e-9
    assert got >= kw - 0.05


def test_oracle_single_basis_matches_outcome_sum():
    rho = rho_ae(witness_state(), 0.15)
    q, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((4, 4)) + 0j)
    s_a = von_neumann_entropy(partial_trace(rho, [0]))
    direct = s_a - conditional_entropy_sum(measure_environment(rho, q))
    assert direct <= info_breakdown_ae(evolved(witness_state(), 0.15)).j_ae + 1e-9


def test_oracle_deterministic_and_checked():
    rho = rho_ae(witness_state(), 0.1)
    assert measurement_oracle(rho, 500, seed=3) == measurement_oracle(rho, 500, seed=3)
    with pytest.raises(DimensionError):
        measurement_oracle(DensityMatrix(np.eye(4) / 4, (2, 2)), 10, seed=0)
    with pytest.raises(ValueError):
        measurement_oracle(rho, 0, seed=0)
