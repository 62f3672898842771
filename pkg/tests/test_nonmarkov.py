import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nmcorr.channels import GadMap, GadParams, IdentityMap, SnapshotMap, gad_kraus, identity_kraus, reset_kraus
from nmcorr.correlations import eof_from_concurrence
from nmcorr.nonmarkov import (
    TimeGrid,
    Trajectory,
    check_factorization,
    cptp_deviation,
    detect_regions,
    n_e,
    n_i,
    positive_variation,
    sa_table,
    three_region_pattern,
    trajectories,
    trajectory,
)
from nmcorr.qlinalg import haar_random_amplitudes, haar_random_pure_state
from nmcorr.states import bell_state, witness_state, pure_concurrence, spin_state

YY = np.fliplr(np.diag([-1.0, 1, 1, -1]))


def brute_bell_concurrence(params, times):
    """Choi state of the channel, Wootters formula by general eigenvalues."""
    phi = np.array([1, 0, 0, 1]) / math.sqrt(2)
    out = []
    for t in times:
        rho = sum(np.kron(k, np.eye(2)) @ np.outer(phi, phi) @ np.kron(k, np.eye(2)).conj().T
                  for k in gad_kraus(t, params))
        ev = np.linalg.eigvals(rho @ YY @ rho.conj() @ YY)
        lam = np.sort(np.sqrt(np.clip(ev.real, 0, None)))[::-1]
        out.append(max(0.0, lam[0] - lam[1:].sum()))
    return np.array(out)


def test_time_grid():
    g = TimeGrid(0, 1, 4)
    assert g.spacing == 0.25
    assert np.allclose(g.times, [0, 0.25, 0.5, 0.75, 1])
    assert g.refined().steps == 8
    for bad in ((-1, 1, 4), (1, 1, 4), (0, 1, 1), (0, 1, 2.5)):
        with pytest.raises(ValueError):
            TimeGrid(*bad)


def test_trajectory_length_check():
    with pytest.raises(ValueError):
        Trajectory(TimeGrid(0, 1, 4), np.zeros(4))


def test_positive_variation_examples():
    assert positive_variation([1, 2, 1, 3]) == 3
    assert positive_variation([5, 4, 2, 0]) == 0
    assert positive_variation([1, 1, 1]) == 0
    assert positive_variation([0, 1e-13, 0, 1e-13]) == 0
    with pytest.raises(ValueError):
        positive_variation([1])


@settings(max_examples=100)
@given(st.lists(st.floats(-10, 10), min_size=2, max_size=50))
def test_positive_variation_properties(values):
    pv = positive_variation(values)
    assert pv >= 0
    assert pv >= values[-1] - values[0] - 1e-9
    if all(b <= a for a, b in zip(values, values[1:])):
        assert pv == 0


def test_unknown_functional():
    with pytest.raises(ValueError):
        trajectory(IdentityMap(), bell_state(), TimeGrid(0, 1, 4), "negativity")


def test_identity_map_constant_trajectories():
    g = TimeGrid(0, 1, 20)
    psi = haar_random_pure_state(4, 9)
    for name, tr in trajectories(IdentityMap(), psi, g).items():
        assert np.all(tr.values == tr.values[0]), name
    tr = trajectory(IdentityMap(), psi, g, "mutual_information_sa")
    assert tr.functional == "mi"


def test_identity_map_measures_are_zero():
    g = TimeGrid(0, 1, 50)
    assert n_e(IdentityMap(), g).value == 0
    r = n_i(IdentityMap(), g, n_samples=8, refine_iters=2)
    assert r.value == 0 and r.converged
    assert check_factorization(IdentityMap(), g, n_states=10) <= 1e-14


def test_bell_eof_starts_at_one(gad, grid):
    assert trajectory(gad, bell_state(), grid, "eof").values[0] == pytest.approx(1, abs=1e-12)


def test_bell_concurrence_matches_brute_force(gad):
    g = TimeGrid(0, 1, 200)
    got = trajectory(gad, bell_state(), g, "concurrence").values
    assert np.max(np.abs(got - brute_bell_concurrence(gad.params, g.times))) <= 1e-8


def test_bell_eof_monotone_nonincreasing(gad, grid):
    # Stated expectation for the cutoff channel; see the decisions ledger.
    d = np.diff(trajectory(gad, bell_state(), grid, "eof").values)
    assert np.all(d <= 1e-9)


def test_n_e_gad_is_zero(gad, grid):
    # Stated expectation for the cutoff channel; see the decisions ledger.
    assert n_e(gad, grid).value <= 1e-9


def test_n_e_matches_closed_form_revival(gad):
    # C_Bell falls to a minimum, then rises until the cutoff freezes it.
    g = TimeGrid(0, 1, 8000)
    c = brute_bell_concurrence(gad.params, g.times)
    k = int(np.argmin(c))
    assert g.times[k] < 0.25
    expected = eof_from_concurrence(c[g.times <= 0.25][-1]) - eof_from_concurrence(c[k])
    assert n_e(gad, TimeGrid(0, 1, 4000)).value == pytest.approx(expected, abs=1e-6)


def test_n_e_vanishes_with_earlier_cutoff():
    m = GadMap(GadParams(5.0, 0.23))
    assert n_e(m, TimeGrid()).value <= 1e-9
    assert n_i(m, TimeGrid(), n_samples=16, refine_iters=0).value > 0


def test_n_e_toy_revival_map():
    # identity, then reset to |0> (EoF 0), then identity again (EoF back to 1)
    m = SnapshotMap((0.0, 0.3, 0.6), (identity_kraus(), reset_kraus(), identity_kraus()))
    g = TimeGrid(0, 1, 100)
    e = trajectory(m, bell_state(), g, "eof").values
    assert e[0] == pytest.approx(1) and e[40] == 0 and e[-1] == pytest.approx(1)
    r = n_e(m, g)
    assert r.value == pytest.approx(1.0, abs=1e-12)
    assert r.converged


def test_n_i_beats_witness_state(gad, grid):
    r = n_i(gad, grid, n_samples=64, refine_iters=10)
    witness = positive_variation(trajectory(gad, witness_state(), grid, "mi"))
    assert witness > 0
    assert r.value >= witness - 1e-6
    assert r.candidates[0][1] >= r.candidates[-1][1]
    assert len(r.candidates) == 66


def test_n_i_deterministic(gad):
    g = TimeGrid(0, 1, 400)
    a = n_i(gad, g, n_samples=32, refine_iters=5, refine=False)
    b = n_i(gad, g, n_samples=32, refine_iters=5, refine=False)
    assert a.value == b.value
    assert np.array_equal(a.optimal_state.amps, b.optimal_state.amps)
    with pytest.raises(ValueError):
        n_i(gad, g, n_samples=0)


def test_witness_state_mi_revival_then_flat(gad, grid):
    tr = trajectory(gad, witness_state(), grid, "mi")
    d = np.diff(tr.values)
    t = grid.times[:-1]
    assert np.any(d[t < 0.25] > 0)
    assert np.all(np.abs(d[t >= 0.25]) <= 1e-12)


@pytest.mark.parametrize("name", ["eof", "mi", "concurrence", "j_ae", "delta_ae", "i_ae"])
def test_post_cutoff_flatness(gad, grid, name):
    tr = trajectory(gad, haar_random_pure_state(4, 21), grid, name)
    assert np.all(np.abs(np.diff(tr.values)[grid.times[:-1] >= 0.25]) <= 1e-12)


def test_factorization_gad(gad):
    assert check_factorization(gad, TimeGrid(0, 1, 49), n_states=100, seed=0) <= 1e-8


def test_factorization_product_state(gad, grid):
    prod = spin_state(0.0, 0.6, 0.0)
    assert pure_concurrence(prod) == 0
    assert np.all(trajectory(gad, prod, grid, "concurrence").values <= 1e-12)


def test_concurrence_extrema_coincide(gad, grid):
    t = grid.times
    c_bell = sa_table(gad, bell_state().amps[None], t)[0, :, 3]
    amps = haar_random_amplitudes(10, 4, np.random.default_rng(4))
    c = sa_table(gad, amps, t)[..., 3]
    db, dc = np.diff(c_bell), np.diff(c, axis=1)
    mask = np.abs(dc) > 1e-9
    assert np.all(np.sign(dc)[mask] == np.broadcast_to(np.sign(db), dc.shape)[mask])


def test_concurrence_variation_scales(gad, grid):
    pv_bell = positive_variation(trajectory(gad, bell_state(), grid, "concurrence"))
    for k in range(20):
        psi = haar_random_pure_state(4, 300 + k)
        pv = positive_variation(trajectory(gad, psi, grid, "concurrence"))
        assert abs(pv - pure_concurrence(psi) * pv_bell) <= 1e-8


def test_conservation_identity(gad, grid):
    for psi in (bell_state(), witness_state()):
        tr = trajectories(gad, psi, grid, ["mi", "i_ae"])
        s_a0 = sa_table(gad, psi.amps[None], [0.0])[0, 0, 1]
        assert np.max(np.abs(tr["mi"].values + tr["i_ae"].values - 2 * s_a0)) <= 1e-9


def test_cptp_deviation(gad, grid):
    assert cptp_deviation(gad, grid.times) <= 1e-12


def test_grid_convergence(gad):
    g, fine = TimeGrid(0, 1, 4000), TimeGrid(0, 1, 8000)
    a = positive_variation(trajectory(gad, witness_state(), g, "mi"))
    b = positive_variation(trajectory(gad, witness_state(), fine, "mi"))
    assert abs(a - b) < 1e-6
    assert abs(n_e(gad, g, refine=False).value - n_e(gad, fine, refine=False).value) < 1e-6


def test_refinement_reports_unconverged():
    # max_steps below the first doubling stops the loop at once
    r = n_e(GadMap(), TimeGrid(0, 1, 50), max_steps=50)
    assert not r.converged and r.grid_used.steps == 50


def test_three_regions(gad, grid):
    tr = trajectories(gad, witness_state(), grid, ["j_ae", "delta_ae", "i_ae"])
    regions = detect_regions(grid.times, tr["j_ae"].values, tr["delta_ae"].values, tr["i_ae"].values)
    pat = three_region_pattern(regions)
    assert pat is not None
    assert [r.signs for r in pat] == [(1, 1, 1), (1, -1, 1), (1, -1, -1)]
    assert pat[0].t_end == pat[1].t_start and pat[2].t_end <= 0.25


def test_detect_regions_synthetic():
    t = np.arange(7.0)
    j = np.array([0, 1, 2, 3, 4, 4, 4.0])
    d = np.array([0, 1, 2, 1.5, 0, 0, 0.0])
    i = j + d
    labels = [r.label for r in detect_regions(t, j, d, i)]
    assert labels == ["green", "blue", "red", "flat"]
