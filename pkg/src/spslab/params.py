"""Problem parameters selecting one constrained minimization problem."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

P_MAX = 8.0 / 3.0

# kinetic-term variants: "inhomogeneous" uses sqrt(1 - Laplacian),
# "homogeneous" the multiplier |k|.
VARIANTS = ("inhomogeneous", "homogeneous")


@dataclass(frozen=True)
class Params:
    """Couplings and mass (alpha, beta, p, rho).

    The theory lives at alpha, beta > 0; zero couplings are accepted so the
    linear regime can be used as an exact diagnostic (the kinetic operator
    alone has known eigenpairs).
    """

    alpha: float
    beta: float
    p: float
    rho: float

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "p", "rho"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ConfigurationError(f"{name} must be finite, got {value}")
        if self.alpha < 0:
            raise ConfigurationError(f"alpha must be nonnegative, got {self.alpha}")
        if self.beta < 0:
            raise ConfigurationError(f"beta must be nonnegative, got {self.beta}")
        if not (2.0 < self.p <= P_MAX + 1e-12):
            raise ConfigurationError(f"p must lie in (2, 8/3], got {self.p}")
        if self.rho <= 0:
            raise ConfigurationError(f"rho must be positive, got {self.rho}")

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "p": self.p, "rho": self.rho}

    @classmethod
    def from_dict(cls, data: dict) -> "Params":
        try:
            return cls(
                alpha=float(data["alpha"]),
                beta=float(data["beta"]),
                p=float(data["p"]),
                rho=float(data["rho"]),
            )
        except KeyError as exc:
            raise ConfigurationError(f"params block missing key {exc}") from exc


def check_variant(variant: str) -> str:
    if variant not in VARIANTS:
        raise ConfigurationError(
            f"variant must be one of {VARIANTS}, got {variant!r}"
        )
    return variant
