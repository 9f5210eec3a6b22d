"""Shared dense linear algebra for 2n x 2n symplectic matrices.

Coordinates are ordered (x_1..x_n, y_1..y_n), so the standard form matrix is
J0 = [[0, I], [-I, 0]] and the "block" j lives on coordinates (x_j, y_j).
The rotation generator J = [[0, -I], [I, 0]] = -J0 satisfies
expm(theta*J) = block_rotation(theta); the global perturbation e^{-theta J}
therefore rotates every block clockwise by theta.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import NotSymplectic, OddDimension

TWO_PI = 2.0 * np.pi


def standard_form(n: int) -> np.ndarray:
    """J0 = [[0, I_n], [-I_n, 0]]."""
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = np.eye(n)
    J[n:, :n] = -np.eye(n)
    return J


def rotation_generator(n: int) -> np.ndarray:
    """J = [[0, -I_n], [I_n, 0]]; expm(theta*J) rotates each block by theta."""
    return -standard_form(n)


def rot2(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def block_rotation(angles) -> np.ndarray:
    """Block-diagonal orthogonal symplectic matrix [[X, -Y], [Y, X]] with
    X = diag(cos a_j), Y = diag(sin a_j)."""
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    c, s = np.cos(angles), np.sin(angles)
    n = angles.size
    O = np.zeros((2 * n, 2 * n))
    O[:n, :n] = np.diag(c)
    O[n:, n:] = np.diag(c)
    O[:n, n:] = -np.diag(s)
    O[n:, :n] = np.diag(s)
    return O


def direct_sum(M1: np.ndarray, M2: np.ndarray) -> np.ndarray:
    """Embed two symplectic matrices on complementary blocks of coordinates."""
    n1, n2 = M1.shape[0] // 2, M2.shape[0] // 2
    n = n1 + n2
    M = np.zeros((2 * n, 2 * n))
    idx1 = np.r_[0:n1, n:n + n1]
    idx2 = np.r_[n1:n, n + n1:2 * n]
    M[np.ix_(idx1, idx1)] = M1
    M[np.ix_(idx2, idx2)] = M2
    return M


def complex_to_orthosymp(U: np.ndarray) -> np.ndarray:
    """Unitary U = X + iY -> orthogonal symplectic [[X, -Y], [Y, X]]."""
    X, Y = U.real, U.imag
    return np.block([[X, -Y], [Y, X]])


def orthosymp_to_complex(O: np.ndarray) -> np.ndarray:
    n = O.shape[0] // 2
    return O[:n, :n] + 1j * O[n:, :n]


def symplecticity_residual(M: np.ndarray) -> float:
    """max-norm of M^T J0 M - J0."""
    n = M.shape[0] // 2
    J = standard_form(n)
    return float(np.max(np.abs(M.T @ J @ M - J)))


def require_even_square(M: np.ndarray) -> int:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise OddDimension(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] % 2 != 0:
        raise OddDimension(f"dimension {M.shape[0]} is odd")
    return M.shape[0] // 2


def symplectic_project(M: np.ndarray, steps: int = 3) -> np.ndarray:
    """Newton correction pushing M onto the symplectic group.

    One step M <- M (I - J0^{-1}(M^T J0 M - J0)/2) cancels the constraint
    residual to first order; a few steps converge quadratically for matrices
    already close to the group.
    """
    n = M.shape[0] // 2
    J = standard_form(n)
    Jinv = -J
    out = np.asarray(M, dtype=float).copy()
    for _ in range(steps):
        R = out.T @ J @ out - J
        out = out @ (np.eye(2 * n) - 0.5 * (Jinv @ R))
    return out


def spd_sqrt(A: np.ndarray) -> np.ndarray:
    """Principal square root of a symmetric positive definite matrix."""
    w, V = np.linalg.eigh(0.5 * (A + A.T))
    if np.any(w <= 0):
        raise NotSymplectic("matrix M M^T is not positive definite")
    return (V * np.sqrt(w)) @ V.T


def polar_factors(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """M = P O with P = (M M^T)^{1/2} symmetric positive definite and O
    orthogonal. For symplectic M both factors are symplectic."""
    P = spd_sqrt(M @ M.T)
    O = np.linalg.solve(P, M)
    return P, O


def spd_power_path(P: np.ndarray):
    """Return s -> P^s for symmetric positive definite P (cached eigh)."""
    w, V = np.linalg.eigh(0.5 * (P + P.T))
    logw = np.log(w)

    def power(s: float) -> np.ndarray:
        return (V * np.exp(s * logw)) @ V.T

    return power


def unitary_log_phases(U: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Factor a unitary U as Z diag(e^{i phi}) Z^H with phi in (-pi, pi].

    Uses a complex Schur decomposition; for a normal matrix the triangular
    factor is diagonal, which gives orthonormal eigenvectors even at repeated
    eigenvalues.
    """
    T, Z = scipy.linalg.schur(U.astype(complex), output="complex")
    phases = np.angle(np.diag(T))
    return phases, Z


def orthogonal_log_blocks(R: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Decompose R in SO(n) as Z B Z^T with B block diagonal (2x2 rotation
    angles plus fixed directions); returns (Z, angles) where angles[k] acts on
    columns (2k, 2k+1) of Z and remaining columns are fixed.

    Eigenvalue -1 appears with even multiplicity in SO(n); pairs of -1 blocks
    are fused into a rotation by pi so the real logarithm always exists.
    """
    T, Z = scipy.linalg.schur(R, output="real")
    n = R.shape[0]
    angles = []
    order = []
    fixed = []
    minus = []
    i = 0
    while i < n:
        if i + 1 < n and abs(T[i + 1, i]) > 1e-12:
            angles.append(float(np.arctan2(T[i + 1, i], T[i, i])))
            order.extend([i, i + 1])
            i += 2
        else:
            if T[i, i] < 0:
                minus.append(i)
            else:
                fixed.append(i)
            i += 1
    if len(minus) % 2 != 0:
        raise NotSymplectic("orthogonal factor has det -1; not in SO(n)")
    for a, b in zip(minus[0::2], minus[1::2]):
        angles.append(np.pi)
        order.extend([a, b])
    cols = order + fixed
    return Z[:, cols], np.asarray(angles)


def so_geodesic(R0: np.ndarray, R1: np.ndarray):
    """Return s -> path in O(n) from R0 to R1; requires det R0 = det R1."""
    Z, angles = orthogonal_log_blocks(R0.T @ R1)

    def at(s: float) -> np.ndarray:
        B = np.eye(Z.shape[0])
        for k, a in enumerate(angles):
            B[2 * k:2 * k + 2, 2 * k:2 * k + 2] = rot2(s * a)
        return R0 @ (Z @ B @ Z.T)

    return at


def random_symplectic(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    """exp of a random Hamiltonian matrix J0 S, S symmetric."""
    A = rng.standard_normal((2 * n, 2 * n)) * scale
    S = 0.5 * (A + A.T)
    return scipy.linalg.expm(standard_form(n) @ S)


def random_orthogonal_symplectic(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random U(n) element mapped to [[X, -Y], [Y, X]]."""
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, Rf = np.linalg.qr(A)
    Q = Q * (np.diag(Rf) / np.abs(np.diag(Rf)))
    return complex_to_orthosymp(Q)
