"""Small dense linear algebra on qubit registers (dimension 2 to 16).

Subsystems are always kept in the order they were declared; for the
two-qubit register that is (S, A) and for the dilated register (S, A, E).
Entropies are in bits.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, StateError, SubsystemError, SymmetryError

MAX_DIM = 16

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
# Eigenvalues in [-CLIP_TOL, 0) are rounding noise; anything lower is an error.
CLIP_TOL = 1e-10
NORM_TOL = 1e-12


def _square(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True)
class DensityMatrix:
    """Positive, unit-trace Hermitian operator on a tensor-product space.

    Parameters
    ----------
    mat : array_like
        Square complex matrix.
    dims : sequence of int, optional
        Factor dimensions whose product equals ``mat.shape[0]``. Defaults to
        a single factor.
    """

    mat: np.ndarray
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        mat = _square(self.mat)
        dims = tuple(int(d) for d in self.dims) or (mat.shape[0],)
        if int(np.prod(dims)) != mat.shape[0]:
            raise DimensionError(f"subsystem dims {dims} do not match matrix size {mat.shape[0]}")
        if mat.shape[0] > MAX_DIM:
            raise DimensionError(f"dimension {mat.shape[0]} exceeds {MAX_DIM}")
        if np.abs(mat - mat.conj().T).max() > HERMITIAN_TOL:
            raise StateError("density matrix is not Hermitian")
        if abs(np.trace(mat) - 1.0) > TRACE_TOL:
            raise StateError(f"density matrix has trace {np.trace(mat).real:.12g}")
        lam_min = np.linalg.eigvalsh(mat)[0]
        if lam_min < -CLIP_TOL:
            raise StateError(f"density matrix has negative eigenvalue {lam_min:.3e}")
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def from_pure(cls, psi: "PureState") -> "DensityMatrix":
        v = psi.amps
        return cls(np.outer(v, v.conj()), psi.dims)

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))


@dataclass(frozen=True)
class PureState:
    """Normalized state vector with declared factor dimensions."""

    amps: np.ndarray
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        dims = tuple(int(d) for d in self.dims) or (amps.size,)
        if int(np.prod(dims)) != amps.size:
            raise DimensionError(f"subsystem dims {dims} do not match vector length {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise StateError(f"state vector has norm {norm:.15g}")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.amps.size

    @classmethod
    def normalized(cls, amps, dims: Sequence[int] = ()) -> "PureState":
        amps = np.asarray(amps, dtype=complex)
        return cls(amps / np.linalg.norm(amps), tuple(dims))

    def density(self) -> DensityMatrix:
        return DensityMatrix.from_pure(self)


def tensor(a, b) -> np.ndarray:
    """Kronecker product of two square matrices, capped at dimension 16."""
    a, b = _square(a), _square(b)
    if a.shape[0] * b.shape[0] > MAX_DIM:
        raise DimensionError(f"product dimension {a.shape[0] * b.shape[0]} exceeds {MAX_DIM}")
    return np.kron(a, b)


def _trace_out(mat: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    n = len(dims)
    row = list(range(n))
    col = [n + k if k in keep else k for k in range(n)]
    out = [k for k in keep] + [n + k for k in keep]
    t = np.einsum(mat.reshape(tuple(dims) * 2), row + col, out)
    d = int(np.prod([dims[k] for k in keep]))
    return t.reshape(d, d)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduce ``rho`` to the factors listed in ``keep``.

    The kept factors stay in their original order regardless of the order
    given in ``keep``.
    """
    n = len(rho.dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep or len(keep) == n:
        raise SubsystemError(f"keep must be a nonempty proper subset of {list(range(n))}")
    if keep[0] < 0 or keep[-1] >= n:
        raise SubsystemError(f"subsystem index out of range in {keep}")
    red = _trace_out(rho.mat, rho.dims, keep)
    red = 0.5 * (red + red.conj().T)
    return DensityMatrix(red, tuple(rho.dims[k] for k in keep))


def eig_hermitian(m, tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns
    -------
    w : ndarray
        Real eigenvalues in descending order.
    v : ndarray
        Orthonormal eigenvectors as columns, ``m = v @ diag(w) @ v.conj().T``.
    """
    m = _square(m)
    if m.shape[0] > MAX_DIM:
        raise DimensionError(f"dimension {m.shape[0]} exceeds {MAX_DIM}")
    if np.abs(m - m.conj().T).max() > tol:
        raise SymmetryError("matrix is not Hermitian")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return w[::-1].copy(), v[:, ::-1].copy()


def entropy_from_spectrum(lam) -> float:
    """Shannon entropy (bits) of a spectrum, with 0 log 0 = 0."""
    lam = np.asarray(lam, dtype=float)
    if lam.size and lam.min() < -CLIP_TOL:
        raise StateError(f"negative eigenvalue {lam.min():.3e} in entropy")
    lam = lam[lam > 0]
    return float(-(lam * np.log2(lam)).sum())


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Von Neumann entropy in bits."""
    w, _ = eig_hermitian(rho.mat)
    s = entropy_from_spectrum(w)
    # never report below 0 or above log2(dim) because of rounding
    return min(max(s, 0.0), float(np.log2(rho.dim)))


def haar_random_pure_state(dim: int, seed, dims: Sequence[int] | None = None) -> PureState:
    """Draw a Haar-distributed pure state.

    ``seed`` may be an int or a ``numpy.random.Generator`` owned by the caller.
    """
    if dim not in (2, 4):
        raise DimensionError(f"random states are supported for dim 2 or 4, not {dim}")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    if dims is None:
        dims = (2, 2) if dim == 4 else (2,)
    return PureState(z / np.linalg.norm(z), tuple(dims))


def haar_random_amplitudes(n: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """Batch of ``n`` Haar-random unit vectors as rows of an ``(n, dim)`` array."""
    z = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)
