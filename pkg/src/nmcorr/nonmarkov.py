"""Correlation trajectories and the two non-Markovianity measures.

Both measures integrate the positive part of the time derivative of a
correlation functional of the evolved (S, A) state. On a uniform grid the
integral is the sum of the positive increments.

* ``n_e`` uses entanglement of formation and always starts from the Bell
  state, which is optimal for any single-qubit dynamics.
* ``n_i`` uses mutual information, whose optimal input is model dependent,
  so it runs a seeded random search over pure inputs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._backend import kernels
from .channels import DynamicalMap, kraus_stack
from .correlations import ae_information, eof_from_concurrence
from .qlinalg import PureState, haar_random_amplitudes
from .states import bell_state, witness_state

FUNCTIONALS = ("eof", "mi", "concurrence", "j_ae", "delta_ae", "i_ae")
ALIASES = {"mutual_information_sa": "mi", "mutual_information": "mi"}

# Increments of at most this size count as zero.
REVIVAL_THRESHOLD = 1e-12
CONVERGENCE_TOL = 1e-6
MAX_STEPS = 64000


@dataclass(frozen=True)
class TimeGrid:
    t_start: float = 0.0
    t_end: float = 1.0
    steps: int = 4000

    def __post_init__(self):
        if self.t_start < 0:
            raise ValueError(f"t_start must be nonnegative, got {self.t_start}")
        if not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")
        if int(self.steps) != self.steps or self.steps < 2:
            raise ValueError(f"steps must be an integer >= 2, got {self.steps}")

    @property
    def spacing(self) -> float:
        return (self.t_end - self.t_start) / self.steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.steps + 1)

    def refined(self) -> "TimeGrid":
        return TimeGrid(self.t_start, self.t_end, 2 * self.steps)


@dataclass(frozen=True)
class Trajectory:
    grid: TimeGrid
    values: np.ndarray
    functional: str = ""

    def __post_init__(self):
        if len(self.values) != self.grid.steps + 1:
            raise ValueError("trajectory length does not match its grid")

    @property
    def times(self) -> np.ndarray:
        return self.grid.times


@dataclass(frozen=True)
class MeasureResult:
    value: float
    optimal_state: PureState
    grid_used: TimeGrid
    converged: bool
    candidates: tuple = field(default=(), repr=False)


def _canonical(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in FUNCTIONALS:
        raise ValueError(f"unsupported functional {name!r}; choose from {FUNCTIONALS}")
    return name


def sa_table(dmap: DynamicalMap, psi, times, with_concurrence: bool = True) -> np.ndarray:
    """Kernel columns ``(S_S, S_A, S_SA, C)`` for every input state and time.

    ``psi`` is an ``(M, 4)`` array of amplitudes. Identical Kraus snapshots
    are evaluated once, so frozen stretches of a map cost nothing and give
    bit-identical values.
    """
    psi = np.atleast_2d(np.asarray(psi, dtype=complex))
    k = kraus_stack(dmap, times)
    uniq, inv = np.unique(k.reshape(k.shape[0], -1), axis=0, return_inverse=True)
    q = kernels.sa_quantities(uniq.reshape(-1, *k.shape[1:]), psi, with_concurrence)
    return q[:, inv.reshape(-1)]


def functional_values(table: np.ndarray, name: str) -> np.ndarray:
    """Evaluate one functional from an ``sa_table`` result (last axis = columns)."""
    name = _canonical(name)
    s_s, s_a, s_sa, c = (table[..., i] for i in range(4))
    if name == "concurrence":
        return c.copy()
    if name == "mi":
        return s_s + s_a - s_sa
    e = eof_from_concurrence(c)
    if name == "eof":
        return e
    i_ae, j_ae, d_ae = ae_information(s_s, s_a, s_sa, e)
    return {"i_ae": i_ae, "j_ae": j_ae, "delta_ae": d_ae}[name]


def trajectories(dmap: DynamicalMap, psi0: PureState, grid: TimeGrid,
                 functionals: Sequence[str] = FUNCTIONALS) -> dict[str, Trajectory]:
    """Several functionals along the same evolution, from one kernel pass."""
    names = [_canonical(f) for f in functionals]
    if tuple(psi0.dims) != (2, 2):
        raise ValueError(f"initial state must be two-qubit, got dims {psi0.dims}")
    need_c = any(n != "mi" for n in names)
    table = sa_table(dmap, psi0.amps[None, :], grid.times, need_c)[0]
    return {n: Trajectory(grid, functional_values(table, n), n) for n in names}


def trajectory(dmap: DynamicalMap, psi0: PureState, grid: TimeGrid, functional: str) -> Trajectory:
    """Values of ``functional`` on the evolved state at every grid time."""
    name = _canonical(functional)
    return trajectories(dmap, psi0, grid, [name])[name]


def increments(values) -> np.ndarray:
    d = np.diff(np.asarray(values, dtype=float), axis=-1)
    return np.where(np.abs(d) <= REVIVAL_THRESHOLD, 0.0, d)


def positive_variation(tr) -> float:
    """Sum of the positive increments of a trajectory (or plain sequence)."""
    values = tr.values if isinstance(tr, Trajectory) else tr
    if len(values) < 2:
        raise ValueError("need at least two samples")
    return float(np.maximum(increments(values), 0.0).sum())


def _pv_rows(values: np.ndarray) -> np.ndarray:
    return np.maximum(increments(values), 0.0).sum(axis=-1)


def _refine(evaluate, grid: TimeGrid, refine: bool, max_steps: int, tol: float):
    """Double the grid until the value moves less than ``tol``."""
    value = evaluate(grid)
    if not refine:
        return value, grid, False
    while grid.steps < max_steps:
        finer = grid.refined()
        new = evaluate(finer)
        if abs(new - value) < tol:
            return new, finer, True
        value, grid = new, finer
    return value, grid, False


def n_e(dmap: DynamicalMap, grid: TimeGrid = TimeGrid(), refine: bool = True,
        max_steps: int = MAX_STEPS, tol: float = CONVERGENCE_TOL) -> MeasureResult:
    """Entanglement-based measure: positive variation of EoF from the Bell state."""
    bell = bell_state()

    def evaluate(g):
        return positive_variation(trajectory(dmap, bell, g, "eof"))

    value, used, ok = _refine(evaluate, grid, refine, max_steps, tol)
    return MeasureResult(value, bell, used, ok)


def n_i(dmap: DynamicalMap, grid: TimeGrid = TimeGrid(), n_samples: int = 512, seed=42,
        refine_iters: int = 100, n_best: int = 5, sigma: float = 0.05,
        refine: bool = True, max_steps: int = MAX_STEPS, tol: float = CONVERGENCE_TOL,
        batch: int = 64) -> MeasureResult:
    """Mutual-information-based measure by seeded random search.

    Candidates are the Bell state, the asymmetric witness state and
    ``n_samples`` Haar-random states. The ``n_best`` leaders then get
    ``refine_iters`` rounds of Gaussian perturbation (accepted only when
    they improve). The winner is re-evaluated on doubled grids until the
    value settles.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    rng = np.random.default_rng(seed)
    times = grid.times
    fixed = np.stack([bell_state().amps, witness_state().amps])
    cands = np.concatenate([fixed, haar_random_amplitudes(n_samples, 4, rng)])

    def score(states):
        out = np.empty(len(states))
        for lo in range(0, len(states), batch):
            table = sa_table(dmap, states[lo:lo + batch], times, with_concurrence=False)
            out[lo:lo + batch] = _pv_rows(functional_values(table, "mi"))
        return out

    scores = score(cands)
    order = np.argsort(-scores, kind="stable")[:n_best]
    best_states = cands[order].copy()
    best_scores = scores[order].copy()
    for _ in range(refine_iters):
        noise = rng.standard_normal(best_states.shape) + 1j * rng.standard_normal(best_states.shape)
        prop = best_states + sigma * noise
        prop /= np.linalg.norm(prop, axis=1, keepdims=True)
        s = score(prop)
        better = s > best_scores
        best_states[better] = prop[better]
        best_scores[better] = s[better]

    k = int(np.argmax(best_scores))
    winner = PureState(best_states[k] / np.linalg.norm(best_states[k]), (2, 2))

    def evaluate(g):
        return positive_variation(trajectory(dmap, winner, g, "mi"))

    value, used, ok = _refine(evaluate, grid, refine, max_steps, tol)
    ranked = sorted(zip(scores.tolist(), range(len(cands))), key=lambda p: (-p[0], p[1]))
    candidates = tuple((idx, sc, cands[idx]) for sc, idx in ranked)
    return MeasureResult(value, winner, used, ok, candidates)


def check_factorization(dmap: DynamicalMap, grid: TimeGrid, n_states: int = 100, seed=0,
                        states=None) -> float:
    """Largest ``|C(t) - C_Bell(t) C(0)|`` over random pure inputs and grid times.

    ``states`` may supply the ``(M, 4)`` inputs directly instead of sampling.
    """
    if states is None:
        if n_states < 1:
            raise ValueError("n_states must be at least 1")
        states = haar_random_amplitudes(n_states, 4, np.random.default_rng(seed))
    states = np.atleast_2d(np.asarray(states, dtype=complex))
    times = grid.times
    c_bell = sa_table(dmap, bell_state().amps[None, :], times)[0, :, 3]
    c_t = sa_table(dmap, states, times)[..., 3]
    c0 = 2 * np.abs(states[:, 0] * states[:, 3] - states[:, 1] * states[:, 2])
    return float(np.max(np.abs(c_t - c0[:, None] * c_bell[None, :])))


def cptp_deviation(dmap: DynamicalMap, times) -> float:
    """Largest completeness deviation of the map's snapshots over ``times``."""
    k = kraus_stack(dmap, times)
    total = np.einsum("tikj,tikl->tjl", k.conj(), k)
    return float(np.abs(total - np.eye(2)).max())


REGION_LABELS = {(1, 1, 1): "green", (1, -1, 1): "blue", (1, -1, -1): "red", (0, 0, 0): "flat"}


@dataclass(frozen=True)
class Region:
    label: str
    signs: tuple[int, int, int]
    k_start: int
    k_end: int
    t_start: float
    t_end: float


def detect_regions(times, j_ae, delta_ae, i_ae, threshold: float = REVIVAL_THRESHOLD,
                   transient: float = 1e-9) -> list[Region]:
    """Split the time axis by the signs of (dJ, d delta, dI).

    Grid interval ``k`` spans ``times[k]..times[k+1]``. Adjacent intervals of
    equal sign triple are merged. Intervals before ``delta_ae`` first reaches
    ``transient`` are skipped.
    """
    times = np.asarray(times, dtype=float)
    diffs = [np.diff(np.asarray(v, dtype=float)) for v in (j_ae, delta_ae, i_ae)]
    signs = np.stack([np.where(d > threshold, 1, np.where(d < -threshold, -1, 0)) for d in diffs], axis=1)
    above = np.nonzero(np.asarray(delta_ae) >= transient)[0]
    start = int(above[0]) if above.size else len(times) - 1
    regions: list[Region] = []
    k = start
    n = len(times) - 1
    while k < n:
        key = tuple(int(s) for s in signs[k])
        e = k
        while e + 1 < n and tuple(int(s) for s in signs[e + 1]) == key:
            e += 1
        regions.append(Region(REGION_LABELS.get(key, "other"), key, k, e,
                              float(times[k]), float(times[e + 1])))
        k = e + 1
    return regions


def three_region_pattern(regions: Sequence[Region]):
    """First consecutive (green, blue, red) run, or None."""
    for a in range(len(regions) - 2):
        if [r.label for r in regions[a:a + 3]] == ["green", "blue", "red"]:
            return tuple(regions[a:a + 3])
    return None
