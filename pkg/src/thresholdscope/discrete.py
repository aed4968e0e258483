"""Finite-dimensional models: a truncated left shift with an engineered virtual
state, and matrix nullity as the least rank of an invertibility-restoring perturbation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import mpmath
import numpy as np

from .errors import DomainError, Inconclusive


# -- shift model -------------------------------------------------------------


def left_shift(n: int) -> np.ndarray:
    """(L x)_i = x_{i+1}, truncated to n coordinates."""
    return np.eye(n, k=1, dtype=complex)


@dataclass
class TruncatedShiftModel:
    n: int
    z0: complex
    phi: np.ndarray
    resolvent_matrix: np.ndarray
    identity_defect: float


def shift_resolvent(n: int, z) -> TruncatedShiftModel:
    """Upper-triangular R with R_ij = -z^{-1-(j-i)}; (L - z) R = I except on the last row."""
    z = complex(z)
    if n < 1:
        raise ValueError("n must be positive")
    if abs(z) <= 1:
        raise DomainError(f"|z| = {abs(z)} must exceed 1")
    i, j = np.indices((n, n))
    k = j - i
    R = np.where(k >= 0, -(z ** (-1.0 - np.maximum(k, 0))), 0.0).astype(complex)
    E = (left_shift(n) - z * np.eye(n)) @ R - np.eye(n)
    defect = float(np.max(np.abs(E[:-1]))) if n > 1 else 0.0
    return TruncatedShiftModel(n, z, np.zeros(0), R, defect)


def inverse_square(i):
    return 1.0 / np.asarray(i, dtype=float) ** 2


@dataclass
class VirtualStateResult:
    A: np.ndarray
    Psi: np.ndarray
    residual: float
    degenerate: bool
    tail_product: complex  # i * Psi_i at the last index
    l2_partial: float  # sum |Psi_i|^2 over the truncation


def _tail_start(z0: complex, phi, N: int) -> complex:
    """Psi_N = -sum_{k>=0} z0^{-1-k} phi_{N+k}."""
    if phi is inverse_square:
        q = 1 / z0
        return -complex(mpmath.lerchphi(q, 2, N)) / z0
    ks = np.arange(N, N + 2**20)
    return -complex(np.sum(z0 ** (-1.0 - (ks - N)) * phi(ks)))


def engineered_virtual_state(n: int, z0=1.0, phi: Callable | np.ndarray = inverse_square) -> VirtualStateResult:
    """Build A = L - K (L - z0) with K = phi xi^T, xi = e_1 / phi_1, and Psi = (L - z0)^{-1} phi.

    Psi is obtained from the backward recursion Psi_i = (Psi_{i+1} - phi_i) / z0
    started at the exact tail value; the truncation leaves a single defect of
    size |Psi_{n+1}| in the last row of (A - z0) Psi. A finite array phi is
    treated as finitely supported, which makes Psi an honest eigenvector.
    """
    z0 = complex(z0)
    if not np.isclose(abs(z0), 1.0, atol=1e-12):
        raise DomainError("z0 must lie on the unit circle")
    idx = np.arange(1, n + 1)
    if callable(phi):
        ph = np.asarray(phi(idx), dtype=complex)
        psi_next = _tail_start(z0, phi, n + 1)
        degenerate = False
    else:
        arr = np.asarray(phi, dtype=complex)
        ph = np.zeros(n, dtype=complex)
        ph[: min(n, arr.size)] = arr[:n]
        psi_next = 0j if arr.size <= n else _tail_start(z0, lambda k: np.where(k <= arr.size, arr[np.minimum(k, arr.size) - 1], 0), n + 1)
        degenerate = True
    if ph[0] == 0:
        raise ValueError("phi_1 must be nonzero")
    Psi = np.empty(n, dtype=complex)
    nxt = psi_next
    for i in range(n - 1, -1, -1):
        nxt = (nxt - ph[i]) / z0
        Psi[i] = nxt
    L = left_shift(n)
    B = L - z0 * np.eye(n)
    A = L - np.outer(ph, B[0] / ph[0])
    res = (A - z0 * np.eye(n)) @ Psi
    return VirtualStateResult(A, Psi, float(np.max(np.abs(res))), degenerate, complex(n * Psi[-1]), float(np.sum(np.abs(Psi) ** 2)))


# -- nullity via rank-r regularizers ------------------------------------------


def svd_nullity(M, rtol: float = 1e-10) -> int:
    M = np.asarray(M, dtype=complex)
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return M.shape[0]
    return int(np.sum(s <= rtol * s[0]))


def hadamard_ratio(M) -> float:
    """|det M| / prod of row norms, a scale-free invertibility measure in [0, 1]."""
    rows = np.linalg.norm(M, axis=1)
    if np.any(rows == 0):
        return 0.0
    sign, logdet = np.linalg.slogdet(M / rows[:, None])
    return 0.0 if sign == 0 else float(np.exp(logdet))


def min_rank_regularizer(M, trials: int = 5, seed: int = 0, tol_det: float = 1e-10, agreement: float = 0.8) -> int:
    """Least r for which a random rank-r N makes M + N invertible (majority over trials)."""
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    if M.ndim != 2 or M.shape[1] != n:
        raise ValueError("M must be square")
    if n > 12:
        raise ValueError("matrix size is limited to 12")
    rng = np.random.default_rng(seed)
    scale = np.linalg.norm(M, 2) + 1.0
    for r in range(n + 1):
        votes = []
        for _ in range(trials):
            if r == 0:
                N = np.zeros_like(M)
            else:
                U = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
                W = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
                N = U @ W.conj().T
                N *= scale / np.linalg.norm(N, 2)
            votes.append(hadamard_ratio(M + N) > tol_det)
        share = sum(votes) / trials
        if share >= 0.5 and max(share, 1 - share) < agreement:
            raise Inconclusive(f"rank {r}: {sum(votes)}/{trials} trials invertible")
        if share > 0.5:
            return r
    return n


def jordan_block(n: int = 3) -> np.ndarray:
    """Nilpotent single Jordan block with ones on the superdiagonal."""
    return np.eye(n, k=1, dtype=complex)


def planted_nullity_matrix(n: int, nullity: int, seed: int) -> np.ndarray:
    """U diag(sigma) V^H with exactly ``nullity`` zero singular values."""
    rng = np.random.default_rng(seed)
    U, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    V, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    sigma = rng.uniform(0.1, 10.0, n)
    sigma[:nullity] = 0.0
    return U @ np.diag(sigma) @ V.conj().T
