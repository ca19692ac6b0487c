"""Blow-up and blow-down dilation experiments at the critical exponent.

Under the mass-preserving rescale phi_theta = theta^{3/2} phi(theta x) the
homogeneous energy scales exactly linearly, E_hom(phi_theta)
= theta * E_hom(phi).  Two regimes follow:

* blow-up (theta -> infinity): if E_hom(phi) < 0 the full energy
  E(phi_theta) = theta * E_hom(phi) + o(1) diverges to -infinity, with the
  o(1) term the shrinking gap between the two kinetic norms;
* blow-down (theta -> 0): for small mass E_hom stays positive and tends to
  0 while the homogeneous seminorm vanishes, an infimizing family with no
  nonzero limit.

Each experiment evaluates the rescaled family along a theta schedule,
resampling analytically when the base field has a known Gaussian profile
and by trilinear interpolation otherwise, and emits one table row per
theta with the method recorded.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .energy import energy
from .errors import ConfigurationError, ResolutionWarning
from .fields import Field, GaussianProfile
from .params import Params
from .rescale import scale_mass_preserving

P_CRITICAL = 8.0 / 3.0

# resolvability window for analytic Gaussian resampling: at least this many
# grid spacings per width, at most this fraction of the box per width
MIN_WIDTH_SPACINGS = 2.0
MAX_WIDTH_FRACTION = 1.0 / 6.0

TABLE_COLUMNS = (
    "theta",
    "energy",
    "energy_tilde",
    "hdot_half",
    "mass",
    "kinetic_gap",
    "method",
)


@dataclass(frozen=True)
class ScalingRow:
    """One theta of the schedule.

    ``kinetic_gap`` is half the difference between the inhomogeneous and
    homogeneous squared kinetic norms: the o(1) engine of the blow-up law.
    """

    theta: float
    energy: float
    energy_tilde: float
    hdot_half: float
    mass: float
    kinetic_gap: float
    method: str

    def to_list(self) -> list:
        return [
            self.theta,
            self.energy,
            self.energy_tilde,
            self.hdot_half,
            self.mass,
            self.kinetic_gap,
            self.method,
        ]


@dataclass(frozen=True)
class ScalingExperimentResult:
    kind: str  # "blowup" | "blowdown"
    e_tilde_base: float
    proceeded: bool
    rows: tuple[ScalingRow, ...]
    truncated: bool
    skipped_thetas: tuple[float, ...]

    def to_document(self) -> dict:
        return {
            "kind": self.kind,
            "e_tilde_base": self.e_tilde_base,
            "proceeded": self.proceeded,
            "truncated": self.truncated,
            "skipped_thetas": list(self.skipped_thetas),
            "columns": list(TABLE_COLUMNS),
            "rows": [r.to_list() for r in self.rows],
        }


def _check_critical(params: Params) -> None:
    if abs(params.p - P_CRITICAL) > 1.0e-12:
        raise ConfigurationError(
            f"scaling experiments require p = 8/3, got p = {params.p}"
        )


def _profile_resolvable(profile: GaussianProfile, grid, theta: float) -> bool:
    width = profile.width / theta
    return (
        width >= MIN_WIDTH_SPACINGS * grid.spacing
        and width <= MAX_WIDTH_FRACTION * grid.box_length
    )


def _rescaled_field(
    phi: Field, theta: float, profile: GaussianProfile | None
) -> tuple[Field | None, str]:
    """Rescaled field and the method used; (None, reason) when unresolvable."""
    grid = phi.grid
    if profile is not None:
        if not _profile_resolvable(profile, grid, theta):
            return None, "unresolvable"
        return profile.mass_preserving_rescaled(theta).sample(grid), "analytic"
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ResolutionWarning)
        rescaled = scale_mass_preserving(phi, theta)
    if any(issubclass(w.category, ResolutionWarning) for w in caught):
        return None, "unresolvable"
    return rescaled, "trilinear"


def _evaluate_row(field: Field, params: Params, theta: float, method: str) -> ScalingRow:
    breakdown = energy(field, params, variant="inhomogeneous")
    ns = breakdown.norms
    e_tilde = 0.5 * ns.hdot_half_sq + breakdown.hartree - breakdown.potential
    return ScalingRow(
        theta=theta,
        energy=breakdown.total,
        energy_tilde=e_tilde,
        hdot_half=float(np.sqrt(ns.hdot_half_sq)),
        mass=ns.l2_sq,
        kinetic_gap=0.5 * (ns.h_half_sq - ns.hdot_half_sq),
        method=method,
    )


def _run_schedule(
    kind: str,
    phi: Field,
    params: Params,
    thetas: list[float],
    profile: GaussianProfile | None,
) -> tuple[tuple[ScalingRow, ...], bool, tuple[float, ...]]:
    rows: list[ScalingRow] = []
    skipped: list[float] = []
    for theta in thetas:
        rescaled, method = _rescaled_field(phi, theta, profile)
        if rescaled is None:
            skipped.append(theta)
            warnings.warn(
                f"{kind}: theta = {theta} dropped, rescaled field exceeds the "
                "grid resolution or the box",
                ResolutionWarning,
                stacklevel=3,
            )
            continue
        rows.append(_evaluate_row(rescaled, params, theta, method))
    return tuple(rows), bool(skipped), tuple(skipped)


def _base_e_tilde(phi: Field, params: Params) -> float:
    breakdown = energy(phi, params, variant="homogeneous")
    return breakdown.total


def _validated_thetas(thetas, increasing: bool) -> list[float]:
    thetas = [float(t) for t in thetas]
    if not thetas:
        raise ConfigurationError("theta schedule must be non-empty")
    if any(t <= 0 for t in thetas):
        raise ConfigurationError("theta values must be positive")
    ordered = sorted(thetas) if increasing else sorted(thetas, reverse=True)
    if thetas != ordered:
        kind = "increasing" if increasing else "decreasing"
        raise ConfigurationError(f"theta schedule must be {kind}, got {thetas}")
    return thetas


def blowup_experiment(
    phi: Field,
    params: Params,
    thetas,
    profile: GaussianProfile | None = None,
) -> ScalingExperimentResult:
    """Follow theta -> infinity from a negative homogeneous-energy seed.

    When E_hom(phi) >= 0 the experiment reports the sign and stops: the
    divergence mechanism needs a negative seed.
    """
    _check_critical(params)
    phi.require_finite("blowup_experiment input")
    thetas = _validated_thetas(thetas, increasing=True)
    e_tilde = _base_e_tilde(phi, params)
    if e_tilde >= 0:
        return ScalingExperimentResult(
            kind="blowup",
            e_tilde_base=e_tilde,
            proceeded=False,
            rows=(),
            truncated=False,
            skipped_thetas=(),
        )
    rows, truncated, skipped = _run_schedule("blowup", phi, params, thetas, profile)
    return ScalingExperimentResult(
        kind="blowup",
        e_tilde_base=e_tilde,
        proceeded=True,
        rows=rows,
        truncated=truncated,
        skipped_thetas=skipped,
    )


def blowdown_experiment(
    phi: Field,
    params: Params,
    thetas,
    profile: GaussianProfile | None = None,
) -> ScalingExperimentResult:
    """Follow theta -> 0: mass stays fixed while the homogeneous energy and
    seminorm shrink linearly, exhibiting the nonattainment mechanism."""
    _check_critical(params)
    phi.require_finite("blowdown_experiment input")
    thetas = _validated_thetas(thetas, increasing=False)
    e_tilde = _base_e_tilde(phi, params)
    rows, truncated, skipped = _run_schedule("blowdown", phi, params, thetas, profile)
    return ScalingExperimentResult(
        kind="blowdown",
        e_tilde_base=e_tilde,
        proceeded=True,
        rows=rows,
        truncated=truncated,
        skipped_thetas=skipped,
    )
