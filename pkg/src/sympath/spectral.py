"""Spectral classification of a single symplectic matrix.

Everything downstream rests on three facts about a real symplectic M:
eigenvalues come in {lambda, 1/lambda} and {lambda, conj(lambda)} pairs, the
form Q(xi1, xi2) = Im omega0(conj(xi1), xi2) splits each unit-circle
generalized eigenspace into even-dimensional positive/negative parts, and the
continuous circle map

    rho(M) = (-1)^{m0} * prod_{|lambda|=1, lambda != +-1} lambda^{m+(lambda)}

restricts to det(X + iY) on orthogonal symplectic [[X, -Y], [Y, X]].  m0
counts pairs of negative real eigenvalues; pairs {-1, -1} are included,
otherwise rho(-I_2) would be +1 and contradict the determinant rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .config import DEFAULT, Tolerances
from .errors import IllConditioned, NotSymplectic

TWO_PI = linalg.TWO_PI


@dataclass(frozen=True)
class SympMatrix:
    """A validated real 2n x 2n symplectic matrix."""

    n: int
    entries: np.ndarray
    symplecticity_residual: float

    @property
    def dim(self) -> int:
        return 2 * self.n


@dataclass
class EigenCluster:
    value: complex
    mult: int
    indices: list[int]
    on_circle: bool = False
    pm_one: int = 0        # +1, -1, or 0 when not a unit eigenvalue
    is_real: bool = False
    m_plus: int | None = None
    inv_partner: int = -1
    conj_partner: int = -1


@dataclass
class SpectralData:
    eigenvalues: list[tuple[complex, int]]
    pairs: list[tuple[int, int, int]]    # (cluster, inverse partner, conjugate partner)
    m0: int
    unit_circle_flags: list[bool]
    m_plus: dict[complex, int]
    rho: complex
    clusters: list[EigenCluster] = field(repr=False, default_factory=list)


@dataclass(frozen=True)
class FirstKindSpectrum:
    """Exactly n first-kind eigenvalues with multiplicity, plus their
    normalization angles in [0, 2pi), sorted ascending by angle."""

    entries: tuple[complex, ...]
    angles: np.ndarray
    kinds: tuple[str, ...]   # "inside", "plus_one", "minus_one", "elliptic"


def as_matrix(M) -> np.ndarray:
    if isinstance(M, SympMatrix):
        return M.entries
    return np.asarray(M, dtype=float)


def check_symplectic(M, tol: Tolerances = DEFAULT) -> SympMatrix:
    """Validate M^T J0 M = J0 (and det M = 1) and wrap the matrix."""
    A = np.asarray(M, dtype=float)
    n = linalg.require_even_square(A)
    residual = linalg.symplecticity_residual(A)
    scale = max(1.0, float(np.max(np.abs(A))) ** 2)
    if residual > tol.symp * scale:
        raise NotSymplectic(
            f"symplecticity residual {residual:.3e} exceeds {tol.symp:.1e} (scale {scale:.1e})")
    det = np.linalg.det(A)
    if abs(det - 1.0) > max(tol.symp * scale * A.shape[0], 1e-9):
        raise NotSymplectic(f"det M = {det!r} differs from 1")
    return SympMatrix(n=n, entries=A, symplecticity_residual=residual)


def _cluster_eigenvalues(w: np.ndarray, tol_cluster: float) -> list[EigenCluster]:
    """Greedy merge of eigenvalues closer than tol_cluster (absolute, desk
    scale); Jordan blocks split by roundoff land in one cluster."""
    order = np.lexsort((w.imag, w.real))
    clusters: list[EigenCluster] = []
    for idx in order:
        v = w[idx]
        for cl in clusters:
            if abs(v - cl.value) <= tol_cluster * max(1.0, abs(cl.value)):
                cl.indices.append(int(idx))
                cl.mult += 1
                cl.value = complex(np.mean(w[cl.indices]))
                break
        else:
            clusters.append(EigenCluster(value=complex(v), mult=1, indices=[int(idx)]))
    return clusters


def _classify(clusters: list[EigenCluster], tol: Tolerances) -> None:
    for cl in clusters:
        v = cl.value
        cl.is_real = abs(v.imag) <= tol.circle * max(1.0, abs(v))
        if cl.is_real:
            cl.value = complex(v.real, 0.0)
            v = cl.value
        if abs(v - 1.0) <= tol.circle:
            cl.pm_one, cl.on_circle, cl.value = 1, True, 1.0 + 0.0j
        elif abs(v + 1.0) <= tol.circle:
            cl.pm_one, cl.on_circle, cl.value = -1, True, -1.0 + 0.0j
        else:
            cl.on_circle = abs(abs(v) - 1.0) <= tol.circle


def _pair_clusters(clusters: list[EigenCluster], tol: Tolerances) -> None:
    """Match each cluster with its 1/lambda and conj(lambda) partners; the
    greedy nearest match is enough at desk scale, conflicts are loud."""

    def find(target: complex, mult: int, what: str, source: complex) -> int:
        best, best_d = -1, np.inf
        for k, cl in enumerate(clusters):
            d = abs(cl.value - target)
            if d < best_d:
                best, best_d = k, d
        if best < 0 or best_d > 1e-6 * max(1.0, abs(target)):
            raise IllConditioned(
                f"eigenvalue {source!r}: no {what} partner near {target!r} (gap {best_d:.2e})")
        if clusters[best].mult != mult:
            raise IllConditioned(
                f"eigenvalue {source!r}: {what} partner multiplicity "
                f"{clusters[best].mult} != {mult}")
        return best

    for cl in clusters:
        cl.inv_partner = find(1.0 / cl.value, cl.mult, "inverse", cl.value)
        cl.conj_partner = find(np.conj(cl.value), cl.mult, "conjugate", cl.value)


def _positive_count(values: np.ndarray, tol: Tolerances, label: str) -> int:
    """Count strictly positive entries.  The form is nondegenerate on a unit
    eigenspace, so any eigenvalue inside the ambiguous relative band is a
    sign the decision cannot be trusted; raise instead of guessing."""
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    if scale == 0.0:
        raise IllConditioned(f"{label}: zero Gram matrix")
    pos = 0
    for g in values:
        if abs(g) / scale < tol.eig_band:
            raise IllConditioned(
                f"{label}: Gram eigenvalue ratio {abs(g) / scale:.2e} below "
                f"{tol.eig_band:.1e}")
        if g > 0:
            pos += 1
    return pos


def _generalized_eigenspace(A: np.ndarray, value: complex, mult: int,
                            tol: Tolerances) -> np.ndarray:
    """Orthonormal basis of ker (A - value I)^mult via SVD, with loud rank
    decisions."""
    dim = A.shape[0]
    B = np.linalg.matrix_power(A.astype(complex) - value * np.eye(dim), mult)
    _, s, Vh = np.linalg.svd(B)
    smax = s[0] if s[0] > 0 else 1.0
    rel = s / smax
    null_mask = rel <= tol.eig
    ambiguous = (rel > tol.eig) & (rel < tol.eig_band)
    if int(np.sum(null_mask)) != mult:
        if np.any(ambiguous):
            raise IllConditioned(
                f"eigenvalue {value!r}: singular value gap ambiguous "
                f"(ratios {rel[ambiguous]})")
        raise IllConditioned(
            f"eigenvalue {value!r}: eigenspace dimension {int(np.sum(null_mask))} "
            f"!= multiplicity {mult}")
    return Vh.conj().T[:, null_mask]


def _krein_positive_count(A: np.ndarray, cl: EigenCluster, J: np.ndarray,
                          eigvecs: np.ndarray | None, tol: Tolerances) -> int:
    """m+(lambda): positive inertia of the Hermitian Gram i Xi^H J0 Xi on a
    basis Xi of the generalized eigenspace E_lambda."""
    if cl.mult == 1 and eigvecs is not None:
        xi = eigvecs[:, cl.indices[0]]
        g = (1j * (xi.conj() @ (J @ xi))).real
        return _positive_count(np.array([g]), tol, f"lambda={cl.value!r}")
    basis = _generalized_eigenspace(A, cl.value, cl.mult, tol)
    G = 1j * (basis.conj().T @ J @ basis)
    G = 0.5 * (G + G.conj().T)
    vals = np.linalg.eigvalsh(G)
    return _positive_count(vals, tol, f"lambda={cl.value!r}")


def _analyze(A: np.ndarray, tol: Tolerances) -> list[EigenCluster]:
    w, V = np.linalg.eig(A)
    clusters = _cluster_eigenvalues(w, tol.cluster)
    _classify(clusters, tol)
    J = linalg.standard_form(A.shape[0] // 2)
    for cl in clusters:
        if cl.on_circle and cl.pm_one == 0:
            cl.m_plus = _krein_positive_count(A, cl, J, V, tol)
    return clusters


def _rho_from_clusters(clusters: list[EigenCluster]) -> complex:
    neg_real = sum(cl.mult for cl in clusters if cl.is_real and cl.value.real < 0)
    if neg_real % 2 != 0:
        raise IllConditioned(f"odd number ({neg_real}) of negative real eigenvalues")
    rho = complex(-1.0 if (neg_real // 2) % 2 else 1.0)
    for cl in clusters:
        if cl.on_circle and cl.pm_one == 0 and cl.m_plus:
            unit = cl.value / abs(cl.value)
            rho *= unit ** cl.m_plus
    return rho / abs(rho)


def spectral_data(M, tol: Tolerances = DEFAULT) -> SpectralData:
    """Eigenvalue pairing, Krein counts m+(lambda), m0 and the rho value."""
    sm = M if isinstance(M, SympMatrix) else check_symplectic(M, tol)
    A = sm.entries
    clusters = _analyze(A, tol)
    _pair_clusters(clusters, tol)
    neg_real = sum(cl.mult for cl in clusters if cl.is_real and cl.value.real < 0)
    if neg_real % 2 != 0:
        raise IllConditioned(f"odd number ({neg_real}) of negative real eigenvalues")
    return SpectralData(
        eigenvalues=[(cl.value, cl.mult) for cl in clusters],
        pairs=[(k, cl.inv_partner, cl.conj_partner) for k, cl in enumerate(clusters)],
        m0=neg_real // 2,
        unit_circle_flags=[cl.on_circle for cl in clusters],
        m_plus={cl.value: cl.m_plus for cl in clusters
                if cl.on_circle and cl.pm_one == 0},
        rho=_rho_from_clusters(clusters),
        clusters=clusters,
    )


def rho(M, tol: Tolerances = DEFAULT) -> complex:
    """rho(M) without the full bookkeeping; used in phase-lift hot loops."""
    A = as_matrix(M)
    return _rho_from_clusters(_analyze(A, tol))


def first_kind(M, tol: Tolerances = DEFAULT) -> FirstKindSpectrum:
    """The n first-kind eigenvalues of M with multiplicity and their
    normalization angles.

    Angle assignment: positive real -> 0, negative real -> pi, unit-circle
    lambda -> arg lambda in [0, 2pi); a complex quadruple l e^{+-i theta}
    (l < 1) contributes theta and 2pi - theta through its two inside members.
    """
    sm = M if isinstance(M, SympMatrix) else check_symplectic(M, tol)
    clusters = _analyze(sm.entries, tol)
    _pair_clusters(clusters, tol)
    entries: list[complex] = []
    angles: list[float] = []
    kinds: list[str] = []

    def push(value: complex, angle: float, kind: str, count: int) -> None:
        for _ in range(count):
            entries.append(value)
            angles.append(angle % TWO_PI)
            kinds.append(kind)

    for cl in clusters:
        if cl.pm_one == 1:
            if cl.mult % 2 != 0:
                raise IllConditioned(f"eigenvalue +1 with odd multiplicity {cl.mult}")
            push(1.0 + 0j, 0.0, "plus_one", cl.mult // 2)
        elif cl.pm_one == -1:
            if cl.mult % 2 != 0:
                raise IllConditioned(f"eigenvalue -1 with odd multiplicity {cl.mult}")
            push(-1.0 + 0j, np.pi, "minus_one", cl.mult // 2)
        elif cl.on_circle:
            if cl.m_plus:
                unit = cl.value / abs(cl.value)
                push(unit, float(np.angle(unit)) % TWO_PI, "elliptic", cl.m_plus)
        elif abs(cl.value) < 1.0:
            if cl.is_real:
                ang = 0.0 if cl.value.real > 0 else np.pi
            else:
                ang = float(np.angle(cl.value)) % TWO_PI
            push(cl.value, ang, "inside", cl.mult)

    if len(entries) != sm.n:
        raise IllConditioned(
            f"found {len(entries)} first-kind eigenvalues, expected n = {sm.n}")
    order = np.argsort(np.asarray(angles), kind="stable")
    return FirstKindSpectrum(
        entries=tuple(entries[i] for i in order),
        angles=np.asarray(angles)[order],
        kinds=tuple(kinds[i] for i in order),
    )


def count_r(M, tol: Tolerances = DEFAULT) -> int:
    """Number of first-kind eigenvalues on S^1 \\ {-1} with Im <= 0.

    Eigenvalue +1 enters through the pair rule: first_kind already lists one
    entry per pair {1, 1}, so each entry counts once.  The fault hook restores
    full multiplicity, which deliberately breaks the rule for the
    verify-paper fault-injection check.
    """
    from . import faults

    fk = M if isinstance(M, FirstKindSpectrum) else first_kind(M, tol)
    r = 0
    for value, kind in zip(fk.entries, fk.kinds):
        if kind == "plus_one":
            r += 2 if faults.active("r-pair-rule") else 1
        elif kind == "elliptic" and value.imag < 0:
            r += 1
    return r


def polar_decompose(M, tol: Tolerances = DEFAULT) -> tuple[SympMatrix, SympMatrix]:
    """M = P O with P = (M M^T)^{1/2} positive definite symmetric symplectic
    and O orthogonal symplectic."""
    sm = M if isinstance(M, SympMatrix) else check_symplectic(M, tol)
    P, O = linalg.polar_factors(sm.entries)
    recon = float(np.max(np.abs(P @ O - sm.entries)))
    scale = max(1.0, float(np.max(np.abs(sm.entries))) ** 2)
    if recon > tol.symp * scale * 10:
        raise NotSymplectic(f"polar reconstruction residual {recon:.3e}")
    return check_symplectic(P, tol), check_symplectic(O, tol)


def normalization_matrix(M, tol: Tolerances = DEFAULT) -> tuple[SympMatrix, np.ndarray]:
    """The block-diagonal orthogonal symplectic matrix built from the
    normalization angles of the first-kind eigenvalues (sorted ascending)."""
    fk = M if isinstance(M, FirstKindSpectrum) else first_kind(M, tol)
    O = linalg.block_rotation(fk.angles)
    return check_symplectic(O, tol), fk.angles.copy()
