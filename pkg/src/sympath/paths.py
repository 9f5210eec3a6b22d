"""Construction, composition and evaluation of symplectic paths.

A path is a continuous map [0,1] -> Sp(2n, R) represented by a closed-form
generator tree (or dense samples).  Values are immutable after construction;
every evaluation re-checks the symplecticity residual so bad data fails loudly
at the point of use.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import linalg, rotation, spectral
from .config import DEFAULT, Tolerances
from .errors import (EndpointMismatch, NotSymplectic, OddRotation, OutOfDomain,
                     SchemaError)


class SympPath:
    """Base class; subclasses implement _eval(t) -> raw ndarray."""

    n: int

    def __init__(self, n: int, tol: Tolerances = DEFAULT):
        self.n = n
        self.tol = tol

    def _eval(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, t: float, validate: bool = True) -> np.ndarray:
        if not (0.0 <= t <= 1.0):
            raise OutOfDomain(f"t = {t} outside [0, 1]")
        M = self._eval(float(t))
        if validate:
            residual = linalg.symplecticity_residual(M)
            scale = max(1.0, float(np.max(np.abs(M))) ** 2)
            if residual > self.tol.path * scale:
                raise NotSymplectic(
                    f"path value at t={t} has residual {residual:.3e}")
        return M

    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        return self.evaluate(0.0), self.evaluate(1.0)


class Constant(SympPath):
    def __init__(self, M, tol: Tolerances = DEFAULT):
        M = spectral.as_matrix(M)
        super().__init__(linalg.require_even_square(M), tol)
        self.matrix = M

    def _eval(self, t):
        return self.matrix


class RotationBlocks(SympPath):
    """Block-diagonal rotations with polynomial angle functions theta_j(t),
    coefficients lowest-degree-first."""

    def __init__(self, coeffs, tol: Tolerances = DEFAULT):
        self.coeffs = [np.asarray(c, dtype=float) for c in coeffs]
        super().__init__(len(self.coeffs), tol)

    def angles(self, t: float) -> np.ndarray:
        return np.array([npoly.polyval(t, c) for c in self.coeffs])

    def _eval(self, t):
        return linalg.block_rotation(self.angles(t))


class Shear(SympPath):
    """Identity with one entry ramping as -t (the degenerate example family)."""

    def __init__(self, n: int, entry, tol: Tolerances = DEFAULT):
        super().__init__(n, tol)
        i, j = int(entry[0]), int(entry[1])
        if not (0 <= i < 2 * n and 0 <= j < 2 * n):
            raise SchemaError(f"shear entry {entry} outside a {2*n}x{2*n} matrix")
        self.entry = (i, j)
        probe = np.eye(2 * n)
        probe[i, j] = -1.0
        if linalg.symplecticity_residual(probe) > tol.path:
            raise NotSymplectic(f"ramping entry {entry} leaves the symplectic group")

    def _eval(self, t):
        M = np.eye(2 * self.n)
        M[self.entry] = -t
        return M


class Catenation(SympPath):
    def __init__(self, left: SympPath, right: SympPath, tol: Tolerances = DEFAULT):
        if left.n != right.n:
            raise EndpointMismatch("catenation of paths with different n")
        a, b = left.evaluate(1.0), right.evaluate(0.0)
        scale = max(1.0, float(np.max(np.abs(a))))
        if float(np.max(np.abs(a - b))) > max(tol.symp * scale, 1e-9) * 100:
            raise EndpointMismatch(
                f"left(1) != right(0), gap {float(np.max(np.abs(a - b))):.3e}")
        super().__init__(left.n, tol)
        self.left, self.right = left, right

    def _eval(self, t):
        if t < 0.5:
            return self.left._eval(2.0 * t)
        return self.right._eval(2.0 * t - 1.0)


class Reverse(SympPath):
    def __init__(self, path: SympPath, tol: Tolerances = DEFAULT):
        super().__init__(path.n, tol)
        self.path = path

    def _eval(self, t):
        return self.path._eval(1.0 - t)


class GlobalPerturb(SympPath):
    """t -> e^{-theta J} Phi(t); the block rotation is exact."""

    def __init__(self, path: SympPath, theta: float, tol: Tolerances = DEFAULT):
        super().__init__(path.n, tol)
        self.path = path
        self.theta = float(theta)
        self._E = linalg.block_rotation(np.full(path.n, -self.theta))

    def _eval(self, t):
        return self._E @ self.path._eval(t)


class DirectSum(SympPath):
    def __init__(self, p1: SympPath, p2: SympPath, tol: Tolerances = DEFAULT):
        super().__init__(p1.n + p2.n, tol)
        self.p1, self.p2 = p1, p2

    def _eval(self, t):
        return linalg.direct_sum(self.p1._eval(t), self.p2._eval(t))


class PolarRadial(SympPath):
    """t -> P^{1-t} O_M, from M (t=0) to its orthogonal polar factor (t=1)."""

    def __init__(self, M, tol: Tolerances = DEFAULT):
        M = spectral.as_matrix(M)
        super().__init__(linalg.require_even_square(M), tol)
        P, O = linalg.polar_factors(M)
        self._power = linalg.spd_power_path(P)
        self.orthogonal_factor = O

    def _eval(self, t):
        return self._power(1.0 - t) @ self.orthogonal_factor


class UnitaryGeodesic(SympPath):
    """Geodesic in the orthogonal symplectic group (= U(n)) between two
    orthogonal symplectic endpoints."""

    def __init__(self, O1, O2, tol: Tolerances = DEFAULT):
        O1, O2 = spectral.as_matrix(O1), spectral.as_matrix(O2)
        super().__init__(linalg.require_even_square(O1), tol)
        U1 = linalg.orthosymp_to_complex(O1)
        U2 = linalg.orthosymp_to_complex(O2)
        for O, U in ((O1, U1), (O2, U2)):
            if float(np.max(np.abs(linalg.complex_to_orthosymp(U) - O))) > tol.path:
                raise NotSymplectic("endpoint is not of orthogonal symplectic block form")
        self._U1 = U1
        self._phases, self._Z = linalg.unitary_log_phases(U1.conj().T @ U2)

    def _eval(self, t):
        D = np.exp(1j * t * self._phases)
        U = self._U1 @ ((self._Z * D) @ self._Z.conj().T)
        return linalg.complex_to_orthosymp(U)


class CorrectionLoop(SympPath):
    """Loop at the block-rotation matrix with the given angles whose first
    block turns by -2k pi; its rotation number is exactly -2k."""

    def __init__(self, k: int, angles, tol: Tolerances = DEFAULT):
        angles = np.atleast_1d(np.asarray(angles, dtype=float))
        super().__init__(angles.size, tol)
        self.k = int(k)
        self.base_angles = angles

    def _eval(self, t):
        a = self.base_angles.copy()
        a[0] -= 2.0 * self.k * np.pi * t
        return linalg.block_rotation(a)


class Samples(SympPath):
    """Piecewise-linear interpolation of validated samples, re-projected onto
    the symplectic group at every evaluation."""

    MAX_PROJECTION_MOVE = 1e-5

    def __init__(self, n: int, times, matrices, tol: Tolerances = DEFAULT):
        super().__init__(n, tol)
        times = np.asarray(times, dtype=float)
        if times.ndim != 1 or times.size < 2 or np.any(np.diff(times) <= 0):
            raise SchemaError("sample times must be strictly increasing")
        if abs(times[0]) > 1e-12 or abs(times[-1] - 1.0) > 1e-12:
            raise SchemaError("sample times must start at 0 and end at 1")
        mats = [spectral.check_symplectic(m, tol).entries for m in matrices]
        if len(mats) != times.size:
            raise SchemaError("sample count mismatch")
        if any(m.shape != (2 * n, 2 * n) for m in mats):
            raise SchemaError("sample dimension mismatch")
        self.times = times
        self.matrices = np.array(mats)
        for k in range(times.size - 1):
            self._interp(0.5 * (times[k] + times[k + 1]))

    def _interp(self, t: float) -> np.ndarray:
        k = int(np.searchsorted(self.times, t, side="right") - 1)
        k = min(max(k, 0), self.times.size - 2)
        w = (t - self.times[k]) / (self.times[k + 1] - self.times[k])
        raw = (1.0 - w) * self.matrices[k] + w * self.matrices[k + 1]
        proj = linalg.symplectic_project(raw)
        if float(np.max(np.abs(proj - raw))) > self.MAX_PROJECTION_MOVE:
            raise NotSymplectic(
                f"interpolated sample at t={t} moved more than "
                f"{self.MAX_PROJECTION_MOVE} under symplectic projection; "
                "the sample grid is too coarse")
        return proj

    def _eval(self, t):
        return self._interp(t)


class Subpath(SympPath):
    """Restriction of a path to [a, b], rescaled to [0, 1]."""

    def __init__(self, path: SympPath, a: float, b: float, tol: Tolerances = DEFAULT):
        if not (0.0 <= a < b <= 1.0):
            raise OutOfDomain(f"invalid restriction [{a}, {b}]")
        super().__init__(path.n, tol)
        self.path, self.a, self.b = path, a, b

    def _eval(self, t):
        return self.path._eval(self.a + t * (self.b - self.a))


class FuncPath(SympPath):
    """Wrap an arbitrary callable t -> matrix (conjugations,
    reparameterizations, ramped rotations in tests and heuristics)."""

    def __init__(self, n: int, fn, tol: Tolerances = DEFAULT):
        super().__init__(n, tol)
        self.fn = fn

    def _eval(self, t):
        return self.fn(t)


def catenate(p: SympPath, q: SympPath, tol: Tolerances = DEFAULT) -> SympPath:
    return Catenation(p, q, tol)


def perturb_global(p: SympPath, theta: float, tol: Tolerances = DEFAULT) -> SympPath:
    return GlobalPerturb(p, theta, tol)


def subpath(p: SympPath, a: float, b: float, tol: Tolerances = DEFAULT) -> SympPath:
    return Subpath(p, a, b, tol)


def ramped_rotation(p: SympPath, rate: float, tol: Tolerances = DEFAULT) -> SympPath:
    """t -> e^{rate * t * J} Phi(t); the rotational perturbation family used
    by the degenerate-path heuristics."""
    def fn(t: float) -> np.ndarray:
        return linalg.block_rotation(np.full(p.n, rate * t)) @ p._eval(t)
    return FuncPath(p.n, fn, tol)


def build_tail(M, tol: Tolerances = DEFAULT) -> SympPath:
    """Path from the normalization matrix of M to M with rotation number 0.

    Stages (before reversal): polar-radial contraction M -> O_M, a unitary
    geodesic O_M -> O, then a correction loop cancelling the measured (even)
    rotation number 2k of the first two stages.  An odd measured value
    violates the evenness of Delta on eigenvalue-normalizing paths and
    aborts.  The result carries the measured residual as .verified_delta.
    """
    sm = M if isinstance(M, spectral.SympMatrix) else spectral.check_symplectic(M, tol)
    O_norm, angles = spectral.normalization_matrix(sm, tol)
    if float(np.max(np.abs(sm.entries - O_norm.entries))) <= tol.path:
        out = Constant(sm.entries, tol)
        out.verified_delta = 0.0
        return out

    radial = PolarRadial(sm.entries, tol)
    stage: SympPath = radial
    if float(np.max(np.abs(radial.orthogonal_factor - O_norm.entries))) > tol.path:
        stage = Catenation(stage, UnitaryGeodesic(radial.orthogonal_factor,
                                                  O_norm.entries, tol), tol)
    delta = rotation.lift_delta(stage, tol, n0=128).delta
    k = round(delta / 2.0)
    if abs(delta - 2.0 * k) > tol.integer:
        raise OddRotation(
            f"normalization path has rotation number {delta}, not an even integer")
    if k != 0:
        stage = Catenation(stage, CorrectionLoop(k, angles, tol), tol)
    out = Reverse(stage, tol)
    out.verified_delta = -(delta - 2.0 * k)
    return out


# ---------------------------------------------------------------------------
# path-spec JSON

_KINDS = ("samples", "rotation_blocks", "shear", "constant", "catenation",
          "reverse", "perturb", "direct_sum")


def _require(doc: dict, key: str):
    if key not in doc:
        raise SchemaError(f"missing key {key!r} in {doc.get('kind', '?')} spec")
    return doc[key]


def _fold(kind, items, tol):
    out = items[0]
    for nxt in items[1:]:
        out = kind(out, nxt, tol)
    return out


def parse_spec(doc, tol: Tolerances = DEFAULT) -> SympPath:
    """Build a path from its JSON description (already parsed to a dict)."""
    if not isinstance(doc, dict):
        raise SchemaError(f"path spec must be an object, got {type(doc).__name__}")
    kind = doc.get("kind")
    if kind not in _KINDS:
        raise SchemaError(f"unknown path kind {kind!r}; expected one of {_KINDS}")

    if kind == "constant":
        return Constant(np.asarray(_require(doc, "matrix"), dtype=float), tol)
    if kind == "rotation_blocks":
        n = int(_require(doc, "n"))
        theta = _require(doc, "theta")
        if len(theta) != n:
            raise SchemaError(f"rotation_blocks needs {n} angle polynomials, got {len(theta)}")
        if any(len(c) > 9 for c in theta):
            raise SchemaError("angle polynomials are limited to degree 8")
        return RotationBlocks(theta, tol)
    if kind == "shear":
        return Shear(int(_require(doc, "n")), _require(doc, "entry"), tol)
    if kind == "samples":
        n = int(_require(doc, "n"))
        samples = _require(doc, "samples")
        try:
            times = [s["t"] for s in samples]
            mats = [np.asarray(s["matrix"], dtype=float) for s in samples]
        except (TypeError, KeyError) as exc:
            raise SchemaError(f"malformed samples payload: {exc}") from exc
        return Samples(n, times, mats, tol)
    if kind == "reverse":
        child = doc.get("path") or _require(doc, "paths")[0]
        return Reverse(parse_spec(child, tol), tol)
    if kind == "perturb":
        return GlobalPerturb(parse_spec(_require(doc, "path"), tol),
                             float(_require(doc, "theta")), tol)

    children = [parse_spec(p, tol) for p in _require(doc, "paths")]
    if len(children) < 2:
        raise SchemaError(f"{kind} needs at least two child paths")
    return _fold(Catenation if kind == "catenation" else DirectSum, children, tol)
