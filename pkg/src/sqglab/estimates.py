"""Inequality monitors and property checks for dissipative SQG runs.

Every check is phrased as an :class:`InequalityRecord` carrying ``lhs``,
``rhs``, the slack ``rhs - lhs``, and a pass flag with a *relative* tolerance:
discretization noise must never produce a false failure, so slack is compared
against ``-tol * max(|lhs|, |rhs|, 1)`` (or an explicit scale when the natural
magnitude of the statement is a different quantity, as in the pointwise
product inequality).

The families covered:

* L^q maximum principle (monotone decay without forcing; the exponential
  envelope ``|theta0|_q^q e^{(q-1)t} + (e^{(q-1)t}-1)/(q-1) |f|_q^q`` with it),
* grid-max principle with envelope ``(|theta0|_inf + |f|_inf) e^t``,
* L^2 decay under linear damping,
* the pointwise product inequality ``2 phi (-Lap)^a phi >= (-Lap)^a(phi^2)``,
* positivity of ``int (-Lap)^a theta |theta|^{q-1} sgn theta``,
* a higher-Sobolev differential-inequality monitor (boundedness witness),
* tail mass against a smooth radial cutoff, with the exact dilation-scaling
  identity of the cutoff's fractional Laplacian,
* a Kato-Ponce product-estimate probe (ratios logged, not asserted).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .spectral import (
    Basis,
    DomainSpec,
    PhysicalField,
    SpectralField,
    _apply_laplacian_power,
    dealias,
    fractional_laplacian,
    grid_lp_norm,
    lq_norm,
    sobolev_norm,
    to_physical,
    to_spectral,
)

__all__ = [
    "InequalityRecord",
    "CutoffSpec",
    "max_principle_monitor",
    "linf_monitor",
    "damped_energy_monitor",
    "cordoba_slack_field",
    "cordoba_pointwise_check",
    "positivity_integral_check",
    "sobolev_bound_monitor",
    "tail_mass",
    "cutoff_fractional_bound",
    "commutator_probe",
    "DEFAULT_TOL",
]

#: Default relative slack tolerance for inequality checks.
DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class InequalityRecord:
    """One evaluated inequality ``lhs <= rhs`` with relative-slack verdict.

    ``slack = rhs - lhs`` and ``passed = slack >= -tol * scale`` where the
    scale defaults to ``max(|lhs|, |rhs|, 1)``.  ``name`` identifies the
    inequality family in reports.
    """

    name: str
    t: float
    lhs: float
    rhs: float
    tol: float = DEFAULT_TOL
    scale: float | None = None
    slack: float = field(init=False)
    passed: bool = field(init=False)

    def __post_init__(self) -> None:
        lhs = float(self.lhs)
        rhs = float(self.rhs)
        if not (np.isfinite(lhs) and np.isfinite(rhs)):
            raise ValueError(f"record {self.name!r}: non-finite sides ({lhs}, {rhs})")
        scale = self.scale
        if scale is None:
            scale = max(abs(lhs), abs(rhs), 1.0)
        elif not (np.isfinite(scale) and scale > 0):
            raise ValueError(f"record {self.name!r}: scale must be positive, got {scale}")
        slack = rhs - lhs
        object.__setattr__(self, "slack", slack)
        object.__setattr__(self, "passed", bool(slack >= -self.tol * scale))

    def as_dict(self) -> dict:
        scale = self.scale if self.scale is not None else max(abs(self.lhs), abs(self.rhs), 1.0)
        return {
            "name": self.name,
            "t": float(self.t),
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "slack": float(self.slack),
            "tol": float(self.tol),
            "scale": float(scale),
            "passed": bool(self.passed),
        }


def _cell_area(domain: DomainSpec) -> float:
    return (domain.box / domain.n) ** 2


def _grid_integral(values: np.ndarray, domain: DomainSpec) -> float:
    """Uniform-grid quadrature (trapezoid; spectrally accurate when periodic)."""
    return float(values.sum() * _cell_area(domain))


# ----------------------------------------------------------------------------
# norm-evolution monitors
# ----------------------------------------------------------------------------


def max_principle_monitor(
    states: Sequence,
    q: float,
    forcing: SpectralField | None = None,
    theta0: SpectralField | None = None,
    *,
    tol: float = DEFAULT_TOL,
) -> list:
    """L^q maximum-principle records along a run.

    Without forcing the bound is monotone: ``|theta(t)|_q <= |theta0|_q``.
    With forcing the q-th-power envelope applies:

        |theta(t)|_q^q <= |theta0|_q^q e^{(q-1)t}
                          + (e^{(q-1)t} - 1)/(q-1) |f|_q^q,

    with t measured from the first sample.  Returns one record per sample.
    """
    if q < 2 or not np.isfinite(q):
        raise ValueError(f"q must lie in [2, inf), got {q}")
    if not states:
        return []
    theta0 = states[0].theta if theta0 is None else theta0
    t0 = states[0].t
    base_q = lq_norm(theta0, q)
    records = []
    if forcing is None:
        for s in states:
            records.append(
                InequalityRecord(
                    name=f"lq-monotone-q{q:g}", t=s.t, lhs=lq_norm(s.theta, q),
                    rhs=base_q, tol=tol,
                )
            )
        return records
    force_q = lq_norm(forcing, q) ** q
    base_pow = base_q**q
    for s in states:
        dt = s.t - t0
        growth = np.exp((q - 1.0) * dt)
        rhs = base_pow * growth + (growth - 1.0) / (q - 1.0) * force_q
        records.append(
            InequalityRecord(
                name=f"lq-envelope-q{q:g}", t=s.t, lhs=lq_norm(s.theta, q) ** q,
                rhs=rhs, tol=tol,
            )
        )
    return records


def linf_monitor(
    states: Sequence,
    forcing: SpectralField | None = None,
    theta0: SpectralField | None = None,
    *,
    tol: float = DEFAULT_TOL,
) -> list:
    """Grid-max principle: ``|theta(t)|_inf <= (|theta0|_inf + |f|_inf) e^t``."""
    if not states:
        return []
    theta0 = states[0].theta if theta0 is None else theta0
    t0 = states[0].t
    base = lq_norm(theta0, np.inf)
    force = 0.0 if forcing is None else lq_norm(forcing, np.inf)
    return [
        InequalityRecord(
            name="linf-envelope", t=s.t, lhs=lq_norm(s.theta, np.inf),
            rhs=(base + force) * np.exp(s.t - t0), tol=tol,
        )
        for s in states
    ]


def damped_energy_monitor(
    states: Sequence, lam: float, *, tol: float = 1e-6
) -> list:
    """Damped unforced energy decay: ``|theta(t)|_2^2 <= |theta0|_2^2 e^{-lam t}``.

    The dissipative dynamics actually decays at least like ``e^{-2 lam t}``;
    the checked envelope (the q=2 member of the damped L^q family) leaves
    that margin on purpose.
    """
    if lam < 0:
        raise ValueError(f"lam must be nonnegative, got {lam}")
    if not states:
        return []
    t0 = states[0].t
    base = sobolev_norm(states[0].theta, 0.0) ** 2
    return [
        InequalityRecord(
            name="damped-energy", t=s.t, lhs=sobolev_norm(s.theta, 0.0) ** 2,
            rhs=base * np.exp(-lam * (s.t - t0)), tol=tol,
        )
        for s in states
    ]


# ----------------------------------------------------------------------------
# pointwise / integral positivity checks
# ----------------------------------------------------------------------------


def cordoba_slack_field(phi: SpectralField, alpha: float) -> PhysicalField:
    """Pointwise slack ``2 phi (-Lap)^a phi - (-Lap)^a(phi^2)`` on the grid.

    The input is dealiased first.  On the torus the square is formed on a
    once-refined grid, where the band-limited product is exact, and the
    multiplier is applied there before restricting back to the original
    points; the returned slack therefore samples the continuum quantity to
    round-off, with no aliasing noise entering the inequality.  Sine-basis
    inputs use the same-grid eigenexpansion of the square (the projection
    converges, but its truncation shows up as boundary-layer noise).
    """
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    phi = dealias(phi)
    domain = phi.domain
    phi_phys = to_physical(phi).values
    if alpha == 0.0:
        slack = phi_phys**2
    elif domain.basis is Basis.TORUS:
        diss = to_physical(fractional_laplacian(phi, alpha)).values
        fine = DomainSpec(n=2 * domain.n, box=domain.box, basis=Basis.TORUS)
        i1, i2 = domain.index_grids
        fine_coeffs = np.zeros(fine.spectral_shape, dtype=np.complex128)
        fine_coeffs[i1 % fine.n, i2 % fine.n] = phi.coeffs
        phi_fine = to_physical(SpectralField(coeffs=fine_coeffs, domain=fine)).values
        square_fine = to_spectral(phi_fine**2, fine)
        diss_sq = to_physical(fractional_laplacian(square_fine, alpha)).values[::2, ::2]
        slack = 2.0 * phi_phys * diss - diss_sq
    else:
        diss = to_physical(fractional_laplacian(phi, alpha)).values
        square = to_spectral(phi_phys**2, domain)
        diss_sq = to_physical(fractional_laplacian(square, alpha)).values
        slack = 2.0 * phi_phys * diss - diss_sq
    return PhysicalField(values=slack, domain=domain)


def cordoba_pointwise_check(phi: SpectralField, alpha: float) -> float:
    """Minimum grid slack of the pointwise inequality ``2 phi (-Lap)^a phi >= (-Lap)^a(phi^2)``.

    Nonnegative up to discretization noise for smooth fields; compare against
    ``-tol * scale`` with scale the grid max of ``|2 phi (-Lap)^a phi|``.
    """
    return float(cordoba_slack_field(phi, alpha).values.min())


def positivity_integral_check(theta: SpectralField, q: float, alpha: float) -> float:
    """Grid quadrature of ``int (-Lap)^a theta |theta|^{q-1} sgn(theta) dx``.

    Nonnegative for every q >= 2 and alpha in [0, 1] (the integral the L^q
    maximum principle rests on); at q=2 it equals the squared H^alpha
    seminorm.
    """
    if q < 2 or not np.isfinite(q):
        raise ValueError(f"q must lie in [2, inf), got {q}")
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    domain = theta.domain
    theta_phys = to_physical(theta).values
    if alpha == 0.0:
        diss = theta_phys
    else:
        diss = to_physical(fractional_laplacian(theta, alpha)).values
    integrand = diss * np.abs(theta_phys) ** (q - 1.0) * np.sign(theta_phys)
    return _grid_integral(integrand, domain)


# ----------------------------------------------------------------------------
# higher-Sobolev differential inequality
# ----------------------------------------------------------------------------


def sobolev_bound_monitor(states: Sequence, l: float, params) -> list:
    """Boundedness witness for the H^l differential inequality.

    For each interior sample evaluates

        D_t |(-Lap)^{l/2} theta|^2  +  kappa |(-Lap)^{(l+alpha)/2} theta|^2

    with a central difference in time, and records the running maximum as the
    right-hand side: a stabilizing running max is the discrete shadow of the
    bounded-forcing differential inequality (the records therefore always
    pass; the quantity of interest is the final ``rhs``).
    """
    if l < params.alpha:
        raise ValueError(f"Sobolev index l={l} must be >= alpha={params.alpha}")
    if len(states) < 3:
        return []
    energies = [sobolev_norm(s.theta, l) ** 2 for s in states]
    records = []
    running = -np.inf
    for i in range(1, len(states) - 1):
        dt2 = states[i + 1].t - states[i - 1].t
        deriv = (energies[i + 1] - energies[i - 1]) / dt2
        mid = sobolev_norm(states[i].theta, (l + params.alpha)) ** 2
        value = deriv + params.kappa * mid
        running = max(running, value)
        records.append(
            InequalityRecord(
                name=f"sobolev-ineq-l{l:g}", t=states[i].t, lhs=value, rhs=running, tol=0.0,
            )
        )
    return records


# ----------------------------------------------------------------------------
# tail estimates via a smooth radial cutoff
# ----------------------------------------------------------------------------


def _smoothstep(u: np.ndarray) -> np.ndarray:
    """Quintic smoothstep: 0 at u<=0, 1 at u>=1, C^2 across the junctions."""
    v = np.clip(u, 0.0, 1.0)
    return v**3 * (10.0 - 15.0 * v + 6.0 * v**2)


@dataclass(frozen=True)
class CutoffSpec:
    """Radial cutoff ``eta_k = eta(|x - center| / k)``: 0 inside radius k, 1 outside 2k.

    The fixed profile ``eta`` vanishes on ``r <= 1``, equals 1 on ``r >= 2``,
    and transitions by a quintic smoothstep (C^2) in between.
    """

    k: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.k) and self.k > 0):
            raise ValueError(f"cutoff radius k must be positive, got {self.k}")

    @staticmethod
    def unit_profile(r: np.ndarray) -> np.ndarray:
        """The fixed profile eta(r): 0 on r<=1, quintic ramp on [1,2], 1 on r>=2."""
        return _smoothstep(np.asarray(r, dtype=np.float64) - 1.0)

    def profile(self, r: np.ndarray) -> np.ndarray:
        """Dilated profile eta_k(r) = eta(r / k)."""
        return self.unit_profile(np.asarray(r, dtype=np.float64) / self.k)

    def field_on(self, domain: DomainSpec) -> PhysicalField:
        """Sample eta_k centered at the box center on the domain's grid."""
        if 4.0 * self.k > domain.box:
            raise ValueError(
                f"transition annulus of k={self.k} does not fit: need 4k <= box={domain.box}"
            )
        x1, x2 = domain.physical_coordinates
        c = domain.box / 2.0
        r = np.hypot(x1 - c, x2 - c)
        return PhysicalField(values=self.profile(r), domain=domain)


def tail_mass(theta: PhysicalField, cutoff: CutoffSpec) -> float:
    """Weighted mass ``int theta^2 eta_k dx`` (dominates the tail over |x-c| >= 2k)."""
    eta = cutoff.field_on(theta.domain)
    return _grid_integral(theta.values**2 * eta.values, theta.domain)


def cutoff_fractional_bound(
    domain: DomainSpec, cutoff: CutoffSpec, s: float
) -> tuple[float, float]:
    """Grid max of ``|(-Lap)^{s/2} eta_k|`` plus its dilation-scaling defect.

    The identity ``(-Lap)^{s/2} eta_k = k^{-s} [(-Lap)^{s/2} eta](./k)`` is
    evaluated with the reference ``eta`` computed on the box of side
    ``box / k`` at the same resolution, so the two grids coincide after
    rescaling and the defect measures only floating-point error.

    Returns
    -------
    (max_abs, scaling_error)
        ``max_abs`` is the grid maximum of ``|(-Lap)^{s/2} eta_k|`` on
        ``domain``; ``scaling_error`` the max pointwise deviation from the
        rescaled reference.
    """
    if not (0.0 < s < 2.0):
        raise ValueError(f"s must lie in (0, 2), got {s}")
    if domain.basis is not Basis.TORUS:
        raise ValueError("cutoff scaling check is defined on the torus")
    eta_k = cutoff.field_on(domain)
    applied = to_physical(
        fractional_laplacian(to_spectral(eta_k.values, domain), s / 2.0)
    ).values
    reference_domain = DomainSpec(n=domain.n, box=domain.box / cutoff.k, basis=Basis.TORUS)
    eta_ref = CutoffSpec(k=1.0).field_on(reference_domain)
    applied_ref = to_physical(
        fractional_laplacian(to_spectral(eta_ref.values, reference_domain), s / 2.0)
    ).values
    scaling_error = float(np.abs(applied - cutoff.k ** (-s) * applied_ref).max())
    return float(np.abs(applied).max()), scaling_error


# ----------------------------------------------------------------------------
# product (Kato-Ponce type) probe
# ----------------------------------------------------------------------------


def commutator_probe(
    f: SpectralField,
    g: SpectralField,
    gamma: float,
    p: float,
    q: float,
    r: float,
) -> float:
    """Ratio probe of the fractional product estimate.

    Evaluates

        |(-Lap)^g(FG)|_p / (|(-Lap)^g F|_r |G|_q + |F|_q |(-Lap)^g G|_r)

    for exponents with ``1/r + 1/q = 1/p`` and ``1 < p < q <= inf``.  The
    constant of the estimate is not quantified, so this is a logged probe,
    not a pass/fail check.  Returns 0 for vanishing inputs.
    """
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if not (1.0 < p < q):
        raise ValueError(f"exponents must satisfy 1 < p < q, got p={p}, q={q}")
    inv_q = 0.0 if np.isinf(q) else 1.0 / q
    inv_r = 0.0 if np.isinf(r) else 1.0 / r
    if abs(inv_r + inv_q - 1.0 / p) > 1e-12:
        raise ValueError(f"exponents must satisfy 1/r + 1/q = 1/p, got p={p}, q={q}, r={r}")
    f = dealias(f)
    g = dealias(g)
    domain = f.domain
    f_phys = to_physical(f).values
    g_phys = to_physical(g).values
    product = to_spectral(f_phys * g_phys, domain)
    # _apply_laplacian_power admits any positive gamma (fractional_laplacian
    # is capped at first order for the dissipation term)
    numerator = grid_lp_norm(_apply_laplacian_power(product, gamma), p)
    f_frac = grid_lp_norm(_apply_laplacian_power(f, gamma), r)
    g_frac = grid_lp_norm(_apply_laplacian_power(g, gamma), r)
    denominator = f_frac * grid_lp_norm(to_physical(g), q) + grid_lp_norm(
        to_physical(f), q
    ) * g_frac
    if denominator == 0.0:
        return 0.0
    return float(numerator / denominator)
