"""Lower bounds for the best constant of the L^{8/3} interpolation bound.

Every field phi gives the scale-invariant quotient

    Q(phi) = ||phi||_{8/3} / ( ||phi||_{hom H^{1/2}}^{1/2} * D(phi)^{1/8} ),

and sup Q equals the best constant S of the inequality.  Maximizing Q over
grid fields therefore yields certified lower bounds s_lower <= S; the other
direction is out of reach of this estimator by design.

The boundedness threshold compares (27 alpha / beta^3)^{1/8} against
sqrt(2) S: strictly below certifies that some mass makes the p = 8/3
infimum -infinity.  With only a lower bound for S in hand the classifier
can certify the unbounded side and must otherwise return indeterminate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft as _fft

from .coulomb import coulomb_kernel, hartree_double_integral
from .energy import norms
from .errors import (
    ConfigurationError,
    DegenerateFieldError,
    NumericalFailureError,
)
from .fields import Field, boundary_mass_fraction, gaussian_field, random_field
from .grid import Grid

P_CRITICAL = 8.0 / 3.0


def weinstein_quotient(phi: Field) -> float:
    """Q(phi); invariant under amplitude scaling and dilation."""
    phi.require_finite("weinstein_quotient input")
    if phi.is_zero():
        raise DegenerateFieldError("weinstein_quotient needs a nonzero field")
    ns = norms(phi, P_CRITICAL)
    d_value = hartree_double_integral(phi)
    if ns.hdot_half_sq <= 0 or d_value <= 0:
        raise DegenerateFieldError(
            "weinstein_quotient needs nonzero seminorm and Coulomb energy"
        )
    numerator = ns.lp_p ** (3.0 / 8.0)
    return float(numerator / (ns.hdot_half_sq**0.25 * d_value**0.125))


@dataclass(frozen=True)
class AscentConfig:
    """Budget and gauge choices of the quotient ascent."""

    steps: int = 200
    step_size: float = 0.5
    seed: int = 0
    init_kind: str = "gaussian"  # "gaussian" or "random"
    init_width: float | None = None

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ConfigurationError(f"ascent budget must be >= 1, got {self.steps}")
        if self.step_size <= 0:
            raise ConfigurationError(
                f"ascent step size must be positive, got {self.step_size}"
            )
        if self.init_kind not in ("gaussian", "random"):
            raise ConfigurationError(
                f"ascent init must be gaussian or random, got {self.init_kind!r}"
            )

    def to_dict(self) -> dict:
        return {
            "steps": self.steps,
            "step_size": self.step_size,
            "seed": self.seed,
            "init_kind": self.init_kind,
            "init_width": self.init_width,
        }


@dataclass(frozen=True)
class BestConstantEstimate:
    """Certified lower bound with the trial field achieving it."""

    s_lower: float
    maximizer: Field
    ascent_trace: tuple[tuple[int, float], ...]
    grid_meta: dict

    def to_document(self, config: AscentConfig | None = None) -> dict:
        doc = {
            "s_lower": self.s_lower,
            "grid": self.grid_meta,
            "ascent_trace": [list(t) for t in self.ascent_trace],
        }
        if config is not None:
            doc["ascent_config"] = config.to_dict()
        return doc


def _log_quotient_gradient(phi: Field) -> np.ndarray:
    """L2 gradient of log Q at phi (amplitude gauge direction removed later
    by the per-step renormalization)."""
    grid = phi.grid
    kernel = coulomb_kernel(grid)
    v = phi.values
    abs_v = np.abs(v)
    lp_p = float(np.sum(abs_v**P_CRITICAL) * grid.cell_volume)
    f = _fft.fftn(v)
    hdot = float(np.sum(grid.k_abs * (f.real**2 + f.imag**2)) * grid.fourier_weight)
    density_fft = _fft.fftn(abs_v**2)
    d_value = float(
        np.sum(kernel.symbol * (density_fft.real**2 + density_fft.imag**2))
        * grid.fourier_weight
    )
    if lp_p <= 0 or hdot <= 0 or d_value <= 0:
        raise DegenerateFieldError("ascent left the admissible cone")
    kinetic_part = _fft.ifftn(grid.k_abs * f)
    potential = _fft.ifftn(kernel.symbol * density_fft).real
    # log Q = 3/8 log ||phi||_{8/3}^{8/3} - 1/4 log hdot - 1/8 log D
    return (
        (abs_v ** (P_CRITICAL - 2.0)) * v / lp_p
        - kinetic_part / (2.0 * hdot)
        - potential * v / (2.0 * d_value)
    )


def _dilation_generator(phi: Field) -> np.ndarray:
    """Generator 3/2 phi + x . grad phi of the mass-preserving dilation."""
    grid = phi.grid
    f = _fft.fftn(phi.values)
    k1 = grid.wavenumbers
    out = 1.5 * phi.values.astype(np.complex128)
    x, y, z = grid.meshgrid()
    out += x * _fft.ifftn(1j * k1[:, None, None] * f)
    out += y * _fft.ifftn(1j * k1[None, :, None] * f)
    out += z * _fft.ifftn(1j * k1[None, None, :] * f)
    return out


def _gauge_fixed_direction(phi: Field, raw: np.ndarray) -> np.ndarray:
    """Remove the flat directions of Q from the ascent direction.

    On the continuum Q is invariant under amplitude scaling and dilation, so
    the true gradient has no component along phi or along the dilation
    generator; on a periodic box the broken dilation invariance plus the
    zero mode (constants have vanishing seminorm, making Q unbounded) give
    the raw gradient spurious components that drag iterates toward the flat
    degenerate family.  Projecting those directions out keeps the ascent on
    localized shapes, where the discrete quotient is a meaningful lower
    bound for the continuum constant.
    """
    grid = phi.grid
    direction = raw - np.mean(raw)  # no pumping of the uniform mode
    for flat in (phi.values, _dilation_generator(phi)):
        overlap = np.sum(direction * np.conj(flat)).real
        norm_sq = np.sum(flat.real**2 + flat.imag**2)
        if norm_sq > 0:
            direction = direction - (overlap / norm_sq) * flat
    return direction


def _is_localized(phi: Field) -> bool:
    """Boundary-shell mass small: the quotient of a box-filling field is a
    torus artifact and must not be certified."""
    if phi.is_zero():
        return False
    return boundary_mass_fraction(phi) < 1.0e-4


def estimate_best_constant(grid: Grid, config: AscentConfig | None = None) -> BestConstantEstimate:
    """Gauge-fixed gradient ascent on log Q with unit-mass renormalization.

    Only localized iterates count toward the certified bound (see
    ``_is_localized``); the trace holds the accepted best-so-far quotients,
    so the reported bound can only improve with budget.  A non-finite
    quotient aborts with the trace attached.
    """
    if config is None:
        config = AscentConfig()
    if config.init_kind == "gaussian":
        width = config.init_width if config.init_width else grid.box_length / 10.0
        phi = gaussian_field(grid, width)
    else:
        width = config.init_width if config.init_width else grid.box_length / 10.0
        envelope = gaussian_field(grid, width)
        noise = random_field(grid, config.seed)
        scale = np.max(np.abs(noise.values)) or 1.0
        phi = Field(
            grid, envelope.values * (1.0 + 0.3 * noise.values / scale)
        )
    phi = Field(grid, phi.values / np.sqrt(phi.mass()))

    trace: list[tuple[int, float]] = []
    try:
        q = weinstein_quotient(phi)
    except DegenerateFieldError as exc:
        raise NumericalFailureError(f"ascent init degenerate: {exc}", trace) from exc
    if not np.isfinite(q):
        raise NumericalFailureError("non-finite quotient at ascent init", trace)
    best_q = -np.inf
    best_phi = phi
    if _is_localized(phi):
        best_q, best_phi = q, phi
        trace.append((0, best_q))
    step = config.step_size
    for it in range(1, config.steps + 1):
        try:
            raw = _log_quotient_gradient(phi)
        except DegenerateFieldError as exc:
            raise NumericalFailureError(
                f"ascent became degenerate at step {it}: {exc}", trace
            ) from exc
        direction = _gauge_fixed_direction(phi, raw)
        trial_values = phi.values + step * direction
        trial_mass = float(
            np.sum(trial_values.real**2 + trial_values.imag**2) * grid.cell_volume
        )
        if trial_mass <= 0 or not np.isfinite(trial_mass):
            step *= 0.5
            continue
        trial = Field(grid, trial_values / np.sqrt(trial_mass))
        try:
            trial_q = weinstein_quotient(trial)
        except DegenerateFieldError:
            step *= 0.5
            continue
        if not np.isfinite(trial_q):
            raise NumericalFailureError(
                f"non-finite quotient at ascent step {it}", trace
            )
        if trial_q > q:
            phi, q = trial, trial_q
            step = min(step * 1.25, 10.0 * config.step_size)
            if q > best_q and _is_localized(phi):
                best_q, best_phi = q, phi
                trace.append((it, best_q))
        else:
            step *= 0.5
            if step < 1.0e-14:
                break
    if not np.isfinite(best_q):
        raise NumericalFailureError(
            "no localized iterate encountered; the bound cannot be certified",
            trace,
        )
    return BestConstantEstimate(
        s_lower=best_q,
        maximizer=best_phi,
        ascent_trace=tuple(trace),
        grid_meta=grid.describe(),
    )


@dataclass(frozen=True)
class ThresholdVerdict:
    """One-sided classification of (alpha, beta) against the threshold."""

    lhs: float
    rhs_lower: float
    verdict: str  # "unbounded_certified" | "indeterminate"

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs_lower": self.rhs_lower, "verdict": self.verdict}


def classify_boundedness(
    alpha: float, beta: float, estimate: BestConstantEstimate | float
) -> ThresholdVerdict:
    """Compare (27 alpha / beta^3)^{1/8} with sqrt(2) * s_lower.

    Strictly below certifies the unbounded regime (s_lower underestimates
    S, so the true threshold is even further right).  Equality or above is
    indeterminate: a lower bound cannot certify boundedness.
    """
    if alpha <= 0 or beta <= 0:
        raise ConfigurationError(
            f"alpha and beta must be positive, got alpha={alpha}, beta={beta}"
        )
    s_lower = estimate.s_lower if isinstance(estimate, BestConstantEstimate) else float(estimate)
    lhs = (27.0 * alpha / beta**3) ** 0.125
    rhs_lower = np.sqrt(2.0) * s_lower
    verdict = "unbounded_certified" if lhs < rhs_lower else "indeterminate"
    return ThresholdVerdict(lhs=float(lhs), rhs_lower=float(rhs_lower), verdict=verdict)
