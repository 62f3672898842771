"""Numpy implementation of the batched trajectory kernels.

Same contract as the compiled ``_kernels`` module; used when the extension
is not built or when ``NMCORR_PURE_PYTHON`` is set.

For a pure two-qubit input psi and Kraus operators K_i on S, the columns
``phi_i = (K_i x 1) psi`` form a matrix X with ``rho_SA = X X^dagger``.
Everything is read off X:

* ``X^dagger X`` is the environment state of the dilation, whose spectrum
  equals that of rho_SA;
* the spin-flip lambdas are the singular values of ``X^T (Y x Y) X``, which
  avoids square roots of tiny eigenvalues.
"""
import numpy as np

COLUMNS = ("s_s", "s_a", "s_sa", "concurrence")


def _entropy(lam):
    lam = np.where(lam > 0, lam, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(lam > 0, lam * np.log2(np.where(lam > 0, lam, 1.0)), 0.0)
    return -terms.sum(axis=-1)


def _entropy_2x2(r):
    # closed form for Hermitian 2x2 blocks, shape (..., 2, 2)
    a = r[..., 0, 0].real
    d = r[..., 1, 1].real
    b = np.abs(r[..., 0, 1])
    half = 0.5 * (a + d)
    gap = np.sqrt((0.5 * (a - d)) ** 2 + b * b)
    return _entropy(np.stack([half + gap, half - gap], axis=-1))


def branch_matrices(kraus, psi):
    """``X[m, t, sa, i]`` for every state ``m`` and time ``t``."""
    kraus = np.asarray(kraus, dtype=complex)
    psi = np.asarray(psi, dtype=complex).reshape(-1, 2, 2)
    x = np.einsum("tisj,mja->mtsai", kraus, psi)
    return x.reshape(psi.shape[0], kraus.shape[0], 4, kraus.shape[1])


def spin_flip_lambdas(x):
    """Descending spin-flip lambdas from branch matrices of shape ``(..., 4, n)``."""
    # tau = X^T (sigma_y x sigma_y) X, with the antidiagonal (-1, 1, 1, -1)
    yx = np.stack([-x[..., 3, :], x[..., 2, :], x[..., 1, :], -x[..., 0, :]], axis=-2)
    tau = np.swapaxes(x, -1, -2) @ yx
    return np.linalg.svd(tau, compute_uv=False)


def sa_quantities(kraus, psi, with_concurrence=True):
    """Entropies and concurrence of evolved two-qubit states.

    Parameters
    ----------
    kraus : ndarray, shape (T, n, 2, 2)
        Kraus operators on S for each time.
    psi : ndarray, shape (M, 4)
        Initial pure (S, A) states, row-wise.
    with_concurrence : bool
        Skip the concurrence column (left as NaN) when False.

    Returns
    -------
    ndarray, shape (M, T, 4)
        Columns ``S(rho_S), S(rho_A), S(rho_SA), C(rho_SA)``; entropies in bits.
    """
    x = branch_matrices(kraus, psi)
    m, t = x.shape[:2]
    out = np.empty((m, t, 4))
    xr = x.reshape(m, t, 2, 2, -1)
    rho_s = np.einsum("mtsai,mtrai->mtsr", xr, xr.conj())
    rho_a = np.einsum("mtsai,mtsbi->mtab", xr, xr.conj())
    gram = np.swapaxes(x.conj(), -1, -2) @ x
    out[..., 0] = _entropy_2x2(rho_s)
    out[..., 1] = _entropy_2x2(rho_a)
    out[..., 2] = _entropy(np.linalg.eigvalsh(gram))
    if with_concurrence:
        lam = spin_flip_lambdas(x)
        out[..., 3] = np.maximum(0.0, lam[..., 0] - lam[..., 1:].sum(axis=-1))
    else:
        out[..., 3] = np.nan
    return out
