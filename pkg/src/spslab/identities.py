"""Stationarity identities evaluated as residuals at a candidate field.

A constrained minimizer v with multiplier omega must satisfy

* the virial identity  2 alpha D(v) - beta (p - 2) ||v||_p^p = 0
  (stationarity of E(u)/||u||_2^2 under amplitude scaling u -> theta u);
* the dilation identity
  1/2 ||v||^2_{H^{1/2}} - 1/2 ||v||^2_{H^{-1/2}} + alpha D(v)
  - beta (3p - 6)/2 ||v||_p^p = 0
  (stationarity under the mass-preserving rescale theta^{3/2} v(theta x));
* the Euler-Lagrange equation grad E(v) = omega v.

Each residual is reported raw together with a positive magnitude scale so
tolerances are dimensionless.  The zero field reports residual 0, scale 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft as _fft

from .coulomb import CoulombKernel, coulomb_kernel, hartree_double_integral
from .energy import evaluate
from .errors import DegenerateFieldError
from .fields import Field
from .params import Params, check_variant


@dataclass(frozen=True)
class IdentityReport:
    """Machine-checkable certificate for one candidate field."""

    virial_residual: float
    virial_scale: float
    pohozaev_residual: float
    pohozaev_scale: float
    el_residual_rel: float
    f_prime_at_1: float
    g_prime_at_1: float

    @property
    def virial_rel(self) -> float:
        return abs(self.virial_residual) / self.virial_scale

    @property
    def pohozaev_rel(self) -> float:
        return abs(self.pohozaev_residual) / self.pohozaev_scale

    def to_dict(self) -> dict:
        return {
            "virial_residual": self.virial_residual,
            "virial_scale": self.virial_scale,
            "virial_rel": self.virial_rel,
            "pohozaev_residual": self.pohozaev_residual,
            "pohozaev_scale": self.pohozaev_scale,
            "pohozaev_rel": self.pohozaev_rel,
            "el_residual_rel": self.el_residual_rel,
            "f_prime_at_1": self.f_prime_at_1,
            "g_prime_at_1": self.g_prime_at_1,
        }


def _scale(*terms: float) -> float:
    s = max(abs(t) for t in terms)
    return s if s > 0 else 1.0


def virial_residual(
    v: Field, params: Params, kernel: CoulombKernel | None = None
) -> tuple[float, float]:
    """(residual, scale) of 2 alpha D(v) - beta (p - 2) ||v||_p^p."""
    v.require_finite("virial_residual input")
    if v.is_zero():
        return 0.0, 1.0
    d_value = hartree_double_integral(v, kernel)
    lp_p = float(np.sum(np.abs(v.values) ** params.p) * v.grid.cell_volume)
    coulomb_term = 2.0 * params.alpha * d_value
    power_term = params.beta * (params.p - 2.0) * lp_p
    return coulomb_term - power_term, _scale(coulomb_term, power_term)


def pohozaev_kinetic_term(v: Field, variant: str = "inhomogeneous") -> float:
    """Dilation derivative of the kinetic term.

    Inhomogeneous: 1/2 * (2 pi)^-3 int |k|^2 / sqrt(1 + |k|^2) |v_hat|^2 dk,
    which equals 1/2 (||v||^2_{H^{1/2}} - ||v||^2_{H^{-1/2}}) identically in
    exact arithmetic.  Homogeneous: 1/2 ||v||^2 in the homogeneous seminorm.
    """
    check_variant(variant)
    grid = v.grid
    f = _fft.fftn(v.values)
    f_abs_sq = f.real**2 + f.imag**2
    if variant == "inhomogeneous":
        mult = grid.k_sq / grid.half_wave_multiplier
    else:
        mult = grid.k_abs
    return 0.5 * float(np.sum(mult * f_abs_sq) * grid.fourier_weight)


def pohozaev_residual(
    v: Field,
    params: Params,
    variant: str = "inhomogeneous",
    kernel: CoulombKernel | None = None,
) -> tuple[float, float]:
    """(residual, scale) of the mass-preserving dilation identity."""
    v.require_finite("pohozaev_residual input")
    if v.is_zero():
        return 0.0, 1.0
    kinetic_term = pohozaev_kinetic_term(v, variant)
    d_value = hartree_double_integral(v, kernel)
    lp_p = float(np.sum(np.abs(v.values) ** params.p) * v.grid.cell_volume)
    coulomb_term = params.alpha * d_value
    power_term = params.beta * (3.0 * params.p - 6.0) / 2.0 * lp_p
    residual = kinetic_term + coulomb_term - power_term
    return residual, _scale(kinetic_term, coulomb_term, power_term)


def el_residual(
    v: Field,
    params: Params,
    omega: float,
    variant: str = "inhomogeneous",
    kernel: CoulombKernel | None = None,
) -> float:
    """Relative L2 residual ||grad E(v) - omega v||_2 / ||v||_2."""
    v.require_finite("el_residual input")
    if v.is_zero():
        raise DegenerateFieldError("el_residual needs a nonzero field")
    ev = evaluate(v, params, variant, kernel=kernel, with_gradient=True)
    resid = ev.gradient - omega * v.values
    num = np.sqrt(np.sum(resid.real**2 + resid.imag**2))
    den = np.sqrt(np.sum(np.abs(v.values) ** 2))
    return float(num / den)


def scaling_derivative_check(
    v: Field,
    params: Params,
    variant: str = "inhomogeneous",
    kernel: CoulombKernel | None = None,
) -> tuple[float, float]:
    """Analytic derivatives at theta = 1 of the two scaling families.

    ``f_prime_at_1``: derivative of E(theta v)/||theta v||_2^2, equal to the
    virial residual divided by the mass (same arithmetic).
    ``g_prime_at_1``: derivative of E(theta^{3/2} v(theta x)), equal to the
    dilation-identity residual.  Both vanish at constrained minimizers.
    """
    v.require_finite("scaling_derivative_check input")
    if v.is_zero():
        raise DegenerateFieldError("scaling_derivative_check needs a nonzero field")
    mass = v.mass()
    vres, _ = virial_residual(v, params, kernel)
    pres, _ = pohozaev_residual(v, params, variant, kernel)
    return vres / mass, pres


def identity_report(
    v: Field,
    params: Params,
    omega: float | None = None,
    variant: str = "inhomogeneous",
    kernel: CoulombKernel | None = None,
) -> IdentityReport:
    """Full report; extracts omega by Rayleigh quotient when not supplied."""
    v.require_finite("identity_report input")
    if v.is_zero():
        return IdentityReport(0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0)
    if kernel is None:
        kernel = coulomb_kernel(v.grid)
    if omega is None:
        from .minimize import lagrange_multiplier

        omega = lagrange_multiplier(v, params, variant, kernel=kernel)
    vres, vscale = virial_residual(v, params, kernel)
    pres, pscale = pohozaev_residual(v, params, variant, kernel)
    el_rel = el_residual(v, params, omega, variant, kernel)
    f_prime, g_prime = scaling_derivative_check(v, params, variant, kernel)
    return IdentityReport(
        virial_residual=vres,
        virial_scale=vscale,
        pohozaev_residual=pres,
        pohozaev_scale=pscale,
        el_residual_rel=el_rel,
        f_prime_at_1=f_prime,
        g_prime_at_1=g_prime,
    )
