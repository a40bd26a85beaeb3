"""Reusable initial conditions for simulations and convergence studies."""

from __future__ import annotations

import math

import numpy as np

from .errors import BasisError
from .spectral import (
    Basis,
    DomainSpec,
    PhysicalField,
    SpectralField,
    cosine_field,
    dealias,
    to_physical,
    to_spectral,
)

__all__ = [
    "random_smooth_field",
    "shear_field",
    "gaussian_bump_field",
]


def _normalize_linf(field: SpectralField, amplitude: float) -> SpectralField:
    values = to_physical(field).values
    peak = float(np.max(np.abs(values)))
    if peak == 0.0:
        raise ValueError("cannot normalize the zero field")
    return field * (amplitude / peak)


def random_smooth_field(
    domain: DomainSpec,
    seed: int,
    *,
    decay: float = 4.0,
    amplitude: float = 1.0,
) -> SpectralField:
    """Seeded random field with power-law spectral decay.

    White noise is drawn on the grid, shaped so coefficient magnitudes
    fall off like ``(1 + |k|)**(-decay)`` in the integer mode index,
    dealiased, mean-zeroed (torus), and rescaled to the requested maximum
    amplitude.  The same seed always reproduces the same field.

    Parameters
    ----------
    domain:
        Target grid; both bases are supported.
    seed:
        Seed for the random number generator.
    decay:
        Spectral decay exponent; larger values give smoother fields.
    amplitude:
        Resulting grid maximum of ``|theta|``.
    """
    if decay <= 1.0:
        raise ValueError(f"decay must exceed 1 for a smooth field, got {decay!r}")
    if amplitude <= 0:
        raise ValueError(f"amplitude must be positive, got {amplitude!r}")
    rng = np.random.default_rng(seed)
    n = domain.n
    if domain.basis is Basis.TORUS:
        noise = rng.standard_normal((n, n))
        raw = to_spectral(PhysicalField(noise, domain))
    else:
        noise = rng.standard_normal((n - 1, n - 1))
        raw = SpectralField(noise, domain)
    i1, i2 = domain.index_grids
    profile = (1.0 + np.hypot(i1, i2)) ** (-decay)
    shaped = SpectralField(raw.coeffs * profile, domain)
    shaped = dealias(shaped)
    if domain.basis is Basis.TORUS:
        coeffs = shaped.coeffs.copy()
        coeffs[0, 0] = 0.0
        shaped = SpectralField(coeffs, domain)
    return _normalize_linf(shaped, amplitude)


def shear_field(
    domain: DomainSpec, *, amplitude: float = 1.0, mode: int = 1
) -> SpectralField:
    """Unidirectional profile ``amplitude * cos(2*pi*mode*x1 / L)``.

    The induced velocity is a shear aligned with the level sets, so the
    transport term vanishes identically and the evolution reduces to pure
    exponential decay of the single mode — the standard exactness probe
    for the time stepper.
    """
    if domain.basis is not Basis.TORUS:
        raise BasisError("shear_field is a torus construction")
    if mode < 1 or mode >= domain.n // 2:
        raise ValueError(f"mode must lie in [1, n/2), got {mode!r}")
    return cosine_field(domain, (mode, 0), amplitude)


def gaussian_bump_field(
    domain: DomainSpec,
    *,
    width: float,
    amplitude: float = 1.0,
) -> SpectralField:
    """Localized bump ``exp(-r^2 / (2 width^2))`` centered in the box.

    The bump is sampled on the grid, transformed, dealiased, mean-zeroed
    on the torus, and rescaled so the grid maximum equals ``amplitude``.
    Choose ``width`` well below ``box / 6`` when probing spatial decay so
    the initial tail beyond the cutoff is negligible.
    """
    if width <= 0:
        raise ValueError(f"width must be positive, got {width!r}")
    if amplitude <= 0:
        raise ValueError(f"amplitude must be positive, got {amplitude!r}")
    if width > domain.box / 4:
        raise ValueError(
            f"width {width!r} is too large for box {domain.box!r}; the bump "
            "must be localized well inside the box"
        )
    x1, x2 = domain.physical_coordinates
    center = domain.box / 2.0
    r2 = (x1 - center) ** 2 + (x2 - center) ** 2
    values = np.exp(-r2 / (2.0 * width**2))
    raw = to_spectral(values, domain)
    shaped = dealias(raw)
    if domain.basis is Basis.TORUS:
        coeffs = shaped.coeffs.copy()
        coeffs[0, 0] = 0.0
        shaped = SpectralField(coeffs, domain)
    return _normalize_linf(shaped, math.fabs(amplitude))
