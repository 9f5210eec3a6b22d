"""Continuous phase lifts along symplectic paths.

The rotation number Delta is the total change of the lift alpha with
e^{i pi alpha(t)} = rho(Phi(t)).  rho is recomputed from scratch at every
grid point (it is continuous, so pointwise evaluation plus a fine grid is
robust and keeps no cross-sample state); adaptive bisection keeps every
per-step phase change under pi/2 so unwrapping is unambiguous.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spectral
from .config import DEFAULT, Tolerances
from .errors import NonIntegerResidual, NotALoop, RefinementExhausted

_PHASE_STEP = 0.5 * np.pi
_JUMP = 0.5


@dataclass
class RotationLift:
    grid: np.ndarray
    alpha: np.ndarray
    delta: float
    max_step_phase: float
    values: np.ndarray   # unit complex samples e^{i pi alpha}


def sample_phase(f, tol: Tolerances = DEFAULT, n0: int | None = None):
    """Adaptively sample a continuous map f: [0,1] -> C* and return
    (grid, unit values).  Intervals are split while the endpoint phase change
    is >= pi/2 or the endpoint values differ by >= 0.5 in modulus."""
    n0 = n0 or tol.lift_samples

    def ev(t: float) -> complex:
        z = complex(f(t))
        a = abs(z)
        if a == 0.0:
            raise RefinementExhausted(f"phase functional vanished at t={t}")
        return z / a

    ts = list(np.linspace(0.0, 1.0, n0 + 1))
    zs = [ev(t) for t in ts]
    accepted_t: list[float] = []
    accepted_z: list[complex] = []
    stack = [(ts[k], zs[k], ts[k + 1], zs[k + 1], 0) for k in range(n0)][::-1]
    while stack:
        t0, z0, t1, z1, depth = stack.pop()
        if abs(np.angle(z1 / z0)) < _PHASE_STEP and abs(z1 - z0) < _JUMP:
            accepted_t.append(t0)
            accepted_z.append(z0)
            continue
        if depth >= tol.lift_depth:
            raise RefinementExhausted(
                f"bisection depth {tol.lift_depth} hit on [{t0}, {t1}]")
        tm = 0.5 * (t0 + t1)
        zm = ev(tm)
        stack.append((tm, zm, t1, z1, depth + 1))
        stack.append((t0, z0, tm, zm, depth + 1))
    accepted_t.append(ts[-1])
    accepted_z.append(zs[-1])
    return np.asarray(accepted_t), np.asarray(accepted_z)


def lift_from_values(grid: np.ndarray, values: np.ndarray) -> RotationLift:
    steps = np.angle(values[1:] / values[:-1])
    alpha0 = float(np.angle(values[0])) / np.pi
    alpha = alpha0 + np.concatenate(([0.0], np.cumsum(steps))) / np.pi
    return RotationLift(
        grid=grid,
        alpha=alpha,
        delta=float(alpha[-1] - alpha[0]),
        max_step_phase=float(np.max(np.abs(steps))) if steps.size else 0.0,
        values=values,
    )


def lift_delta(path, tol: Tolerances = DEFAULT, n0: int | None = None) -> RotationLift:
    """Lift of rho along the path; delta = alpha(1) - alpha(0)."""
    grid, values = sample_phase(lambda t: spectral.rho(path.evaluate(t), tol), tol, n0)
    return lift_from_values(grid, values)


def delta_prime(path, tol: Tolerances = DEFAULT, n0: int | None = None) -> float:
    """Rotation number of t -> det(X(t) + iY(t)), where [[X, -Y], [Y, X]] is
    the orthogonal polar factor of Phi(t)."""
    from . import linalg

    def f(t: float) -> complex:
        _, O = linalg.polar_factors(path.evaluate(t))
        return complex(np.linalg.det(linalg.orthosymp_to_complex(O)))

    grid, values = sample_phase(f, tol, n0)
    return lift_from_values(grid, values).delta


def check_loop_integral(path, tol: Tolerances = DEFAULT) -> int:
    """Delta of a loop, snapped to the nearest integer."""
    a, b = path.evaluate(0.0), path.evaluate(1.0)
    scale = max(1.0, float(np.max(np.abs(a))))
    if float(np.max(np.abs(a - b))) > tol.symp * scale * 10:
        raise NotALoop("path endpoints differ")
    delta = lift_delta(path, tol).delta
    k = round(delta)
    if abs(delta - k) > tol.integer:
        raise NonIntegerResidual(f"loop delta {delta} is {abs(delta - k):.2e} from integer")
    return int(k)


def write_lift_csv(lift: RotationLift, fileobj) -> None:
    fileobj.write("t,rho_re,rho_im,alpha\n")
    for t, z, a in zip(lift.grid, lift.values, lift.alpha):
        fileobj.write(f"{t!r},{z.real!r},{z.imag!r},{a!r}\n")
