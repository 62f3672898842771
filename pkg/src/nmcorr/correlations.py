"""Correlation functionals of two-qubit states.

Concurrence and entanglement of formation of rho_SA, quantum mutual
information, and the split of the ancilla-environment information into an
accessible (classical) and an inaccessible (discord) part. The split uses
entropic identities of the pure S-A-E dilation; a brute-force search over
projective measurements on E is provided as an independent lower bound.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels_py
from .errors import DimensionError, InconsistencyError
from .qlinalg import DensityMatrix, entropy_from_spectrum, partial_trace, von_neumann_entropy

# Values of the breakdown within this margin below zero are rounding noise.
CLIP_TOL = 1e-10
# Beyond this, the pure-dilation identities are considered broken.
CONSISTENCY_TOL = 1e-8
PURE_TOL = 1e-10
# Magnitudes this small are rounding residue and are reported as exact zeros.
ZERO_TOL = 1e-14


def _check_two_qubit(rho: DensityMatrix):
    if tuple(rho.dims) != (2, 2):
        raise DimensionError(f"expected a two-qubit state with dims (2, 2), got {rho.dims}")


def spin_flip_lambdas(rho: DensityMatrix) -> np.ndarray:
    """Square roots of the eigenvalues of ``rho (Y x Y) rho* (Y x Y)``, descending.

    Computed as singular values of ``X^T (Y x Y) X`` for ``rho = X X^dagger``,
    which shares the spectrum but does not square-root rounding noise.
    """
    _check_two_qubit(rho)
    w, v = np.linalg.eigh(rho.mat)
    x = v * np.sqrt(np.clip(w, 0.0, None))
    return _kernels_py.spin_flip_lambdas(x)


def concurrence(rho: DensityMatrix, pure_fast_path: bool = False) -> float:
    """Wootters concurrence of a two-qubit state.

    With ``pure_fast_path`` a state of purity above ``1 - 1e-10`` is handled
    through its dominant eigenvector as ``2 |ad - bc|``.
    """
    _check_two_qubit(rho)
    if pure_fast_path and rho.purity() > 1 - PURE_TOL:
        w, v = np.linalg.eigh(rho.mat)
        a = v[:, -1]
        return float(min(1.0, 2 * abs(a[0] * a[3] - a[1] * a[2])))
    lam = spin_flip_lambdas(rho)
    return float(min(1.0, max(0.0, lam[0] - lam[1:].sum())))


def binary_entropy(x):
    """``-x log2 x - (1-x) log2 (1-x)``, elementwise, with 0 log 0 = 0."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = (x > 0) & (x < 1)
    xi = x[inside]
    out[inside] = -xi * np.log2(xi) - (1 - xi) * np.log2(1 - xi)
    return out if out.ndim else float(out)


def eof_from_concurrence(c):
    """Entanglement of formation (bits) as a function of concurrence."""
    c = np.clip(np.asarray(c, dtype=float), 0.0, 1.0)
    return binary_entropy(0.5 * (1 + np.sqrt(1 - c * c)))


def eof(rho: DensityMatrix) -> float:
    """Entanglement of formation of a two-qubit state, in bits."""
    return float(eof_from_concurrence(concurrence(rho)))


def mutual_information_sa(rho: DensityMatrix) -> float:
    """``S(rho_S) + S(rho_A) - S(rho_SA)`` in bits."""
    _check_two_qubit(rho)
    s_s = von_neumann_entropy(partial_trace(rho, [0]))
    s_a = von_neumann_entropy(partial_trace(rho, [1]))
    return s_s + s_a - von_neumann_entropy(rho)


@dataclass(frozen=True)
class InfoBreakdown:
    """Ancilla-environment information at one instant, in bits.

    ``i_ae`` is the total mutual information, ``j_ae`` the part the
    environment can extract about the ancilla by measuring itself, and
    ``delta_ae = i_ae - j_ae`` the remainder (discord).
    """

    i_ae: float
    j_ae: float
    delta_ae: float


def ae_information(s_s, s_a, s_sa, eof_sa):
    """Vectorized (I_AE, J_AE, delta_AE) from the S-A entropies and EoF.

    For a pure S-A-E state ``S(E) = S(SA)`` and ``S(AE) = S(S)``, so
    ``I_AE = S(A) + S(SA) - S(S)``; the Koashi-Winter relation gives
    ``J_AE = S(A) - EoF(SA)``.

    Raises
    ------
    InconsistencyError
        If any of the three falls below ``-1e-8``, which cannot happen for a
        pure dilation.
    """
    s_s, s_a, s_sa, eof_sa = (np.asarray(v, dtype=float) for v in (s_s, s_a, s_sa, eof_sa))
    i_raw = s_a + s_sa - s_s
    j_raw = s_a - eof_sa
    d_raw = i_raw - j_raw
    for name, v in (("J_AE", j_raw), ("I_AE", i_raw), ("delta_AE", d_raw)):
        if np.any(v < -CONSISTENCY_TOL):
            raise InconsistencyError(
                f"{name} = {np.min(v):.3e} < 0; the S-A-E state is not a pure dilation"
            )
    # clip noise, then rebuild I so that I = J + delta holds exactly
    j = np.where(j_raw > ZERO_TOL, j_raw, 0.0)
    d = i_raw - j
    d = np.where(d > ZERO_TOL, d, 0.0)
    return j + d, j, d


def info_breakdown_ae(rho_sa_t: DensityMatrix) -> InfoBreakdown:
    """Accessible and inaccessible ancilla-environment information.

    ``rho_sa_t`` must come from a pure S-A state evolved by a channel whose
    dilation keeps S-A-E pure (always true for :func:`channels.purify`).
    """
    _check_two_qubit(rho_sa_t)
    s_s = von_neumann_entropy(partial_trace(rho_sa_t, [0]))
    s_a = von_neumann_entropy(partial_trace(rho_sa_t, [1]))
    s_sa = von_neumann_entropy(rho_sa_t)
    i, j, d = ae_information(s_s, s_a, s_sa, eof(rho_sa_t))
    return InfoBreakdown(float(i), float(j), float(d))


@dataclass(frozen=True)
class MeasurementOutcome:
    probability: float
    conditional_state: DensityMatrix | None


def _check_ae(rho_ae: DensityMatrix):
    if tuple(rho_ae.dims) != (2, 4):
        raise DimensionError(f"expected an (A, E) state with dims (2, 4), got {rho_ae.dims}")


def measure_environment(rho_ae: DensityMatrix, basis) -> list[MeasurementOutcome]:
    """Outcomes of measuring E in the orthonormal ``basis`` (columns).

    Outcomes with zero probability carry ``conditional_state=None``.
    """
    _check_ae(rho_ae)
    basis = np.asarray(basis, dtype=complex)
    r = rho_ae.mat.reshape(2, 4, 2, 4)
    out = []
    for k in range(basis.shape[1]):
        e = basis[:, k]
        sigma = np.einsum("e,aebf,f->ab", e.conj(), r, e)
        p = float(np.trace(sigma).real)
        if p <= 1e-14:
            out.append(MeasurementOutcome(max(p, 0.0), None))
            continue
        sigma = sigma / p
        out.append(MeasurementOutcome(p, DensityMatrix(0.5 * (sigma + sigma.conj().T), (2,))))
    return out


def _entropy_2x2_batch(sig):
    return _kernels_py._entropy_2x2(sig)


def measurement_oracle(rho_ae: DensityMatrix, n_samples: int, seed, chunk: int = 4096) -> float:
    """Best ``S(A) - sum_k p_k S(rho_A^k)`` over random projective measurements on E.

    Each sample is a Haar-random orthonormal basis of the 4-level
    environment. The result is a lower bound on the accessible information
    and is deterministic for a fixed seed.
    """
    _check_ae(rho_ae)
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    rng = np.random.default_rng(seed)
    s_a = von_neumann_entropy(partial_trace(rho_ae, [0]))
    r = rho_ae.mat.reshape(2, 4, 2, 4)
    best = -np.inf
    done = 0
    while done < n_samples:
        n = min(chunk, n_samples - done)
        z = rng.standard_normal((n, 4, 4)) + 1j * rng.standard_normal((n, 4, 4))
        q, rr = np.linalg.qr(z)
        d = np.diagonal(rr, axis1=1, axis2=2)
        q = q * (d / np.abs(d))[:, None, :]
        # unnormalized conditional states sigma[n, k] = <e_k| rho_AE |e_k>_E
        sig = np.einsum("nek,aebf,nfk->nkab", q.conj(), r, q)
        p = np.einsum("nkaa->nk", sig).real
        # p S(sigma/p) = S_unnorm(sigma) + p log2 p
        with np.errstate(divide="ignore", invalid="ignore"):
            plogp = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
        cond = (_entropy_2x2_batch(sig) + plogp).sum(axis=-1)
        best = max(best, float(np.max(s_a - cond)))
        done += n
    return best


def conditional_entropy_sum(outcomes: list[MeasurementOutcome]) -> float:
    """``sum_k p_k S(rho_A^k)`` for a list of measurement outcomes."""
    total = 0.0
    for o in outcomes:
        if o.conditional_state is not None:
            total += o.probability * entropy_from_spectrum(np.linalg.eigvalsh(o.conditional_state.mat))
    return total
