"""Qubit channels as time-indexed Kraus sets.

A dynamical map here is any callable ``t -> KrausSet`` giving the snapshot
Lambda(t, 0); intermediate maps Lambda(t, s) are never built. Kraus operators
act on the system qubit S only; the ancilla A is carried along by identity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .errors import DilationError, DimensionError, DomainError
from .qlinalg import DensityMatrix, PureState

ENV_DIM = 4
CPTP_TOL = 1e-10


@dataclass(frozen=True)
class KrausSet:
    """Ordered Kraus operators of one qubit channel snapshot.

    Completeness is not enforced on construction; use :func:`validate_cptp`.
    """

    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = []
        for k in self.operators:
            k = np.array(k, dtype=complex)
            if k.shape != (2, 2):
                raise DimensionError(f"Kraus operators must be 2x2, got {k.shape}")
            k.setflags(write=False)
            ops.append(k)
        if not ops:
            raise DimensionError("a Kraus set needs at least one operator")
        object.__setattr__(self, "operators", tuple(ops))

    @property
    def sys_dim(self) -> int:
        return 2

    def __len__(self) -> int:
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)

    def stacked(self, n: int = ENV_DIM) -> np.ndarray:
        """Operators as an ``(n, 2, 2)`` array, zero-padded."""
        if len(self) > n:
            raise DilationError(f"{len(self)} Kraus operators do not fit in {n} slots")
        out = np.zeros((n, 2, 2), dtype=complex)
        out[: len(self)] = self.operators
        return out


@dataclass(frozen=True)
class GadParams:
    """Generalized amplitude damping with a decoherence cutoff.

    ``omega`` sets the mixing ``s = cos^2(omega t')``; after ``t_c`` the
    channel freezes.
    """

    omega: float = 5.0
    t_c: float = 0.25

    def __post_init__(self):
        if not math.isfinite(self.omega):
            raise DomainError(f"omega must be finite, got {self.omega}")
        if not (self.t_c >= 0 and math.isfinite(self.t_c)):
            raise DomainError(f"t_c must be a finite nonnegative number, got {self.t_c}")


class DynamicalMap(Protocol):
    def __call__(self, t: float) -> KrausSet: ...


def effective_time(t: float, t_c: float) -> float:
    """Time seen by the environment: ``t`` until the cutoff, ``t_c`` after."""
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t}")
    if t_c < 0:
        raise DomainError(f"cutoff must be nonnegative, got {t_c}")
    return min(t, t_c)


def gad_kraus_stack(times, p: GadParams) -> np.ndarray:
    """Kraus operators for many times at once, shape ``(T, 4, 2, 2)``."""
    t = np.asarray(times, dtype=float).reshape(-1)
    if t.size and t.min() < 0:
        raise DomainError("times must be nonnegative")
    tp = np.minimum(t, p.t_c)
    s = np.cos(p.omega * tp) ** 2
    r = np.exp(-tp)
    ss, sc = np.sqrt(s), np.sqrt(1.0 - s)
    sr, sd = np.sqrt(r), np.sqrt(1.0 - r)
    k = np.zeros((t.size, 4, 2, 2), dtype=complex)
    k[:, 0, 0, 0] = ss
    k[:, 0, 1, 1] = ss * sr
    k[:, 1, 0, 1] = ss * sd
    k[:, 2, 0, 0] = sc * sr
    k[:, 2, 1, 1] = sc
    k[:, 3, 1, 0] = sc * sd
    return k


def gad_kraus(t: float, p: GadParams) -> KrausSet:
    """Kraus set of the cutoff amplitude-damping channel at time ``t``."""
    effective_time(t, p.t_c)
    return KrausSet(tuple(gad_kraus_stack([t], p)[0]))


@dataclass(frozen=True)
class GadMap:
    params: GadParams = GadParams()

    def __call__(self, t: float) -> KrausSet:
        return gad_kraus(t, self.params)

    def stack(self, times) -> np.ndarray:
        return gad_kraus_stack(times, self.params)


@dataclass(frozen=True)
class IdentityMap:
    def __call__(self, t: float) -> KrausSet:
        if t < 0:
            raise DomainError(f"time must be nonnegative, got {t}")
        return KrausSet((np.eye(2),))


@dataclass(frozen=True)
class SnapshotMap:
    """Piecewise-constant map: ``kraus_sets[k]`` on ``[breakpoints[k], breakpoints[k+1])``.

    Each snapshot is a valid channel from time 0, but the family as a whole
    need not be divisible, which makes it a convenient way to build revivals.
    """

    breakpoints: tuple[float, ...]
    kraus_sets: tuple[KrausSet, ...]

    def __post_init__(self):
        if len(self.breakpoints) != len(self.kraus_sets) or not self.breakpoints:
            raise DimensionError("need one breakpoint per Kraus set")
        if self.breakpoints[0] != 0 or list(self.breakpoints) != sorted(self.breakpoints):
            raise DomainError("breakpoints must start at 0 and increase")

    def __call__(self, t: float) -> KrausSet:
        if t < 0:
            raise DomainError(f"time must be nonnegative, got {t}")
        k = int(np.searchsorted(self.breakpoints, t, side="right")) - 1
        return self.kraus_sets[k]


def kraus_stack(dmap: DynamicalMap, times) -> np.ndarray:
    """Snapshots of ``dmap`` on ``times`` as a ``(T, 4, 2, 2)`` array."""
    stack = getattr(dmap, "stack", None)
    if stack is not None:
        return stack(times)
    return np.stack([dmap(float(t)).stacked() for t in times])


def _check_sa(rho: DensityMatrix):
    if tuple(rho.dims) != (2, 2):
        raise DimensionError(f"expected a two-qubit (S, A) state, got dims {rho.dims}")


def apply_to_system(ks: KrausSet, rho_sa: DensityMatrix) -> DensityMatrix:
    """Apply the channel to the first factor of a two-qubit state."""
    _check_sa(rho_sa)
    r = rho_sa.mat.reshape(2, 2, 2, 2)
    out = np.zeros((2, 2, 2, 2), dtype=complex)
    for k in ks:
        out += np.einsum("ij,jakb,lk->ialb", k, r, k.conj())
    out = out.reshape(4, 4)
    return DensityMatrix(0.5 * (out + out.conj().T), (2, 2))


def validate_cptp(ks: KrausSet) -> float:
    """Largest entrywise deviation of ``sum K^dagger K`` from the identity."""
    total = sum(k.conj().T @ k for k in ks)
    return float(np.abs(total - np.eye(ks.sys_dim)).max())


def purify(ks: KrausSet, psi_sa: PureState) -> PureState:
    """Stinespring dilation of ``psi_sa`` with a 4-level environment.

    Returns the pure state ``sum_i (K_i x 1)|psi> x |i>_E`` on factors
    (S, A, E) = (2, 2, 4).
    """
    if tuple(psi_sa.dims) != (2, 2):
        raise DimensionError(f"expected a two-qubit (S, A) state, got dims {psi_sa.dims}")
    if len(ks) > ENV_DIM:
        raise DilationError(f"at most {ENV_DIM} Kraus operators fit the environment, got {len(ks)}")
    k = ks.stacked()
    v = psi_sa.amps.reshape(2, 2)
    big = np.einsum("eij,ja->iae", k, v)
    return PureState(big.reshape(-1), (2, 2, ENV_DIM))


def random_kraus_set(n_ops: int, seed) -> KrausSet:
    """Random qubit channel with ``n_ops`` operators, cut from a random isometry."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((2 * n_ops, 2)) + 1j * rng.standard_normal((2 * n_ops, 2))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return KrausSet(tuple(q[2 * i : 2 * i + 2] for i in range(n_ops)))


def reset_kraus(level: int = 0) -> KrausSet:
    """Channel that discards the qubit and prepares ``|level>``."""
    ops = []
    for i in range(2):
        k = np.zeros((2, 2), dtype=complex)
        k[level, i] = 1.0
        ops.append(k)
    return KrausSet(tuple(ops))


def identity_kraus() -> KrausSet:
    return KrausSet((np.eye(2),))
