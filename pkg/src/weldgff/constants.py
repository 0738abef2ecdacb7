"""Coupling constants shared by every module.

All functionals downstream are parametrised by a single diffusivity
``kappa`` in (0, 4].  The derived quantities are locked together by exact
algebraic relations, asserted at construction time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Constants:
    """Coupling constants derived from the SLE diffusivity ``kappa``.

    gamma = sqrt(kappa), Q = gamma/2 + 2/gamma, c_L = 1 + 6 Q^2 and the
    matter central charge c_m = 26 - c_L = 1 - 6 (2/gamma - gamma/2)^2.
    """

    kappa: float
    gamma: float
    Q: float
    c_L: float
    c_m: float

    def __post_init__(self):
        if not (0.0 < self.kappa <= 4.0):
            raise ValueError(f"kappa must lie in (0, 4], got {self.kappa}")
        g = self.gamma
        checks = [
            (self.gamma, math.sqrt(self.kappa)),
            (self.Q, g / 2 + 2 / g),
            (self.c_L, 1 + 6 * self.Q**2),
            (self.c_m, 1 - 6 * (2 / math.sqrt(self.kappa) - math.sqrt(self.kappa) / 2) ** 2),
            (self.c_L, 26 - self.c_m),
        ]
        for got, want in checks:
            if abs(got - want) > 1e-12 * max(1.0, abs(want)):
                raise ValueError(f"inconsistent constants: {got} != {want}")


def constants_from_kappa(kappa: float) -> Constants:
    """Build the full constant set from ``kappa`` in (0, 4]."""
    if not (0.0 < kappa <= 4.0):
        raise ValueError(f"kappa must lie in (0, 4], got {kappa}")
    gamma = math.sqrt(kappa)
    Q = gamma / 2 + 2 / gamma
    c_L = 1 + 6 * Q**2
    c_m = 26 - c_L
    return Constants(kappa=kappa, gamma=gamma, Q=Q, c_L=c_L, c_m=c_m)


def constants_from_gamma(gamma: float) -> Constants:
    """Build the constant set from ``gamma`` = sqrt(kappa) in (0, 2]."""
    return constants_from_kappa(gamma * gamma)
