"""Periodic cubic grid and its Fourier-space metadata.

All operators in this package are diagonal in the discrete Fourier basis of
a periodic box [-L/2, L/2)^3 sampled at n points per axis.  The grid owns
the wavenumber lattice and the derived multiplier arrays so they are built
once per resolution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on a cube of side ``box_length``.

    Parameters
    ----------
    n : int
        Points per axis; must be a power of two, at least 8.
    box_length : float
        Physical side length L of the box.

    Derived attributes (set in ``__post_init__``):
    ``spacing`` (h = L/n), ``axis`` (1-D physical coordinates, cell-centered
    at -L/2 + j h), ``wavenumbers`` (1-D angular wavenumbers
    (2 pi / L) * {-n/2, ..., n/2 - 1} in FFT storage order), ``k_sq`` and
    ``k_abs`` (3-D |k|^2 and |k|), and ``half_wave_multiplier``
    (sqrt(1 + |k|^2)).
    """

    n: int
    box_length: float
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise ConfigurationError(f"grid size must be an integer, got {self.n!r}")
        if self.n < 8 or not _is_power_of_two(int(self.n)):
            raise ConfigurationError(
                f"grid size must be a power of two >= 8, got {self.n}"
            )
        if not np.isfinite(self.box_length) or self.box_length <= 0:
            raise ConfigurationError(
                f"box length must be positive and finite, got {self.box_length}"
            )
        n = int(self.n)
        L = float(self.box_length)
        h = L / n
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "box_length", L)
        object.__setattr__(self, "spacing", h)
        object.__setattr__(self, "axis", -L / 2 + h * np.arange(n))
        k1 = 2.0 * np.pi * np.fft.fftfreq(n, d=h)
        object.__setattr__(self, "wavenumbers", k1)
        kx, ky, kz = np.meshgrid(k1, k1, k1, indexing="ij")
        k_sq = kx**2 + ky**2 + kz**2
        object.__setattr__(self, "k_sq", k_sq)
        object.__setattr__(self, "k_abs", np.sqrt(k_sq))
        object.__setattr__(self, "half_wave_multiplier", np.sqrt(1.0 + k_sq))

    # dataclass equality would compare arrays elementwise; identity of the
    # (n, L) pair is what callers mean by "same grid".
    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Grid)
            and self.n == other.n
            and self.box_length == other.box_length
        )

    def __hash__(self) -> int:
        return hash((self.n, self.box_length))

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n, self.n, self.n)

    @property
    def cell_volume(self) -> float:
        """Quadrature weight h^3 of the rectangle rule."""
        return self.spacing**3

    @property
    def fourier_weight(self) -> float:
        """Weight turning sum_k m(k) |fftn(u)|^2 into (2 pi)^-3 int m |u_hat|^2 dk."""
        return self.box_length**3 / self.n**6

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return np.meshgrid(self.axis, self.axis, self.axis, indexing="ij")

    def radius_sq(self) -> np.ndarray:
        """|x|^2 on the grid, cached (used by every Gaussian constructor)."""
        if "radius_sq" not in self._cache:
            x, y, z = self.meshgrid()
            self._cache["radius_sq"] = x**2 + y**2 + z**2
        return self._cache["radius_sq"]

    def describe(self) -> dict:
        return {"n": self.n, "box_length": self.box_length, "spacing": self.spacing}


def make_grid(n: int, box_length: float) -> Grid:
    """Build a validated grid; rejects non-power-of-two n and nonpositive L."""
    return Grid(n=n, box_length=box_length)
