"""Numerical tolerances, collected in one structure so the CLI can override
them and reports can embed the values actually used."""

from __future__ import annotations

from dataclasses import dataclass, asdict


@dataclass(frozen=True)
class Tolerances:
    # max-norm of M^T J0 M - J0 accepted for a single matrix
    symp: float = 1e-9
    # relative threshold for rank / Gram-signature decisions
    eig: float = 1e-9
    # upper edge of the ambiguous band; gaps inside [eig, eig_band] are loud
    eig_band: float = 1e-6
    # | |lambda| - 1 | test and |lambda -+ 1| test
    circle: float = 1e-8
    # eigenvalues closer than this are merged before eigenspace construction
    cluster: float = 1e-7
    # residual accepted for every path evaluation
    path: float = 1e-7
    # integer / half-integer snapping
    integer: float = 1e-6
    # cap for the global perturbation angle
    theta_max: float = 1e-3
    # initial uniform sample count for phase lifts
    lift_samples: int = 256
    # maximum bisection depth during lift refinement
    lift_depth: int = 24

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT = Tolerances()
