"""Time integration of the dissipative surface quasi-geostrophic equation.

The model advanced here is

    d theta/dt + u . grad theta + kappa (-Lap)^alpha theta + lam theta = f,

with the velocity recovered from theta by Riesz transforms (periodic box) and
``alpha`` restricted to (1/2, 1] where the advection term is controlled by the
dissipation.  The linear part is diagonal per mode, so the workhorse scheme is
exponential time differencing: the stiff factor ``exp(-a dt)`` is applied
exactly and only the transport term is approximated (first order, or the
second-order Runge-Kutta corrector of Cox and Matthews).

On a Dirichlet box the transport term is evaluated by odd extension: a sine
series on box length ``L`` embeds exactly as a Fourier series on the doubled
torus of length ``2 L``; the product is formed there (alias-free under the
same 1/3 cut) and the result restricted back.  No boundary bookkeeping is
approximate -- the embedding is an identity on band-limited fields.

A slow Picard/Simpson fixed-point integrator over the Duhamel form serves as
a scheme-independent reference for convergence studies.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import BlowUpError, CflWarning, ConvergenceError
from .series import DiagnosticsSeries
from .spectral import (
    Basis,
    DomainSpec,
    SpectralField,
    dealias,
    to_physical,
    to_spectral,
    velocity_from_theta,
)

__all__ = [
    "Scheme",
    "SqgParams",
    "StepperConfig",
    "SimulationState",
    "RunResult",
    "EtdCoefficients",
    "etd_coefficients",
    "nonlinear_rhs",
    "advective_speed",
    "default_dt",
    "step",
    "integrate",
    "picard_reference",
    "CFL_LIMIT",
]

#: Advisory advective CFL ceiling ``dt * max|u| * n / L``; crossing it emits
#: a :class:`~sqglab.errors.CflWarning` at the next sample.
CFL_LIMIT = 0.5

#: Below this value of ``|a dt|`` the phi functions switch to Taylor series.
_PHI_SERIES_CUT = 1e-4


class Scheme(str, Enum):
    """Available exponential time-differencing schemes."""

    ETD1 = "etd1"
    ETD2RK = "etd2rk"


@dataclass(frozen=True)
class SqgParams:
    """Physical parameters: dissipation strength/order, damping, forcing.

    Parameters
    ----------
    kappa : float
        Dissipation coefficient, strictly positive.
    alpha : float
        Order of the fractional dissipation, in (1/2, 1].
    lam : float, optional
        Zeroth-order damping coefficient, nonnegative.
    forcing : SpectralField, optional
        Time-independent forcing term, same domain as the evolved field.
    """

    kappa: float
    alpha: float
    lam: float = 0.0
    forcing: SpectralField | None = None

    def __post_init__(self) -> None:
        if not (np.isfinite(self.kappa) and self.kappa > 0):
            raise ValueError(f"kappa must be positive and finite, got {self.kappa}")
        if not (0.5 < self.alpha <= 1.0):
            raise ValueError(
                f"alpha must exceed 1/2 for time evolution (and be <= 1), got {self.alpha}"
            )
        if not (np.isfinite(self.lam) and self.lam >= 0):
            raise ValueError(f"lam must be nonnegative and finite, got {self.lam}")

    def linear_symbol(self, domain: DomainSpec) -> np.ndarray:
        """Per-mode decay rate ``kappa |k|^(2 alpha) + lam`` (zero mode: lam)."""
        sym = domain.laplacian_symbol
        rate = np.full(sym.shape, float(self.lam))
        positive = sym > 0
        rate[positive] += self.kappa * sym[positive] ** self.alpha
        rate.setflags(write=False)
        return rate


@dataclass(frozen=True)
class StepperConfig:
    """Numerical parameters of a run: step size, horizon, scheme, sampling."""

    dt: float
    t_end: float
    scheme: Scheme = Scheme.ETD2RK
    sample_every: int = 1

    def __post_init__(self) -> None:
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive and finite, got {self.dt}")
        if not (np.isfinite(self.t_end) and self.t_end >= 0):
            raise ValueError(f"t_end must be nonnegative and finite, got {self.t_end}")
        if int(self.sample_every) != self.sample_every or self.sample_every < 1:
            raise ValueError(f"sample_every must be a positive integer, got {self.sample_every}")
        object.__setattr__(self, "scheme", Scheme(self.scheme))

    @property
    def n_steps(self) -> int:
        """Number of steps covering [0, t_end] (last step may overshoot < dt)."""
        return max(0, int(np.ceil(self.t_end / self.dt - 1e-12)))


@dataclass(frozen=True)
class SimulationState:
    """A field together with the time it is valid at."""

    t: float
    theta: SpectralField

    def __post_init__(self) -> None:
        if not np.isfinite(self.t):
            raise ValueError(f"state time must be finite, got {self.t}")


@dataclass(frozen=True)
class RunResult:
    """Output of :func:`integrate`: sampled diagnostics plus sampled states."""

    series: DiagnosticsSeries
    states: tuple

    @property
    def final(self) -> SimulationState:
        return self.states[-1]


@dataclass(frozen=True)
class EtdCoefficients:
    """Per-mode exponential-integrator tables for a fixed step size.

    ``decay`` is ``exp(-a dt)``; ``phi1`` and ``phi2`` are ``phi_1(-a dt)``
    and ``phi_2(-a dt)`` with the standard phi functions, evaluated stably
    (Taylor series below ``|a dt| = 1e-4``).
    """

    dt: float
    decay: np.ndarray
    phi1: np.ndarray
    phi2: np.ndarray


def _phi1(z: np.ndarray) -> np.ndarray:
    """phi_1(-z) = (1 - exp(-z)) / z for z >= 0, series near 0."""
    out = np.empty_like(z)
    small = np.abs(z) < _PHI_SERIES_CUT
    zs = z[small]
    out[small] = 1.0 - zs / 2.0 + zs**2 / 6.0 - zs**3 / 24.0
    zl = z[~small]
    out[~small] = -np.expm1(-zl) / zl
    return out


def _phi2(z: np.ndarray) -> np.ndarray:
    """phi_2(-z) = (exp(-z) - 1 + z) / z^2 for z >= 0, series near 0."""
    out = np.empty_like(z)
    small = np.abs(z) < _PHI_SERIES_CUT
    zs = z[small]
    out[small] = 0.5 - zs / 6.0 + zs**2 / 24.0 - zs**3 / 120.0
    zl = z[~small]
    out[~small] = (np.expm1(-zl) + zl) / zl**2
    return out


def etd_coefficients(domain: DomainSpec, params: SqgParams, dt: float) -> EtdCoefficients:
    """Precompute the per-mode ETD tables for step size ``dt``."""
    if not (np.isfinite(dt) and dt > 0):
        raise ValueError(f"dt must be positive and finite, got {dt}")
    z = params.linear_symbol(domain) * dt
    coeffs = EtdCoefficients(dt=float(dt), decay=np.exp(-z), phi1=_phi1(z), phi2=_phi2(z))
    for table in (coeffs.decay, coeffs.phi1, coeffs.phi2):
        table.setflags(write=False)
    return coeffs


# ----------------------------------------------------------------------------
# transport nonlinearity
# ----------------------------------------------------------------------------


def _doubled_torus(domain: DomainSpec) -> DomainSpec:
    """The periodic box that odd extension of a Dirichlet box lands on."""
    return DomainSpec(n=2 * domain.n, box=2 * domain.box, basis=Basis.TORUS)


def embed_odd_extension(field: SpectralField) -> SpectralField:
    """Embed a sine series exactly as a Fourier series on the doubled torus.

    A coefficient ``c`` on the orthonormal sine mode ``(m1, m2)`` contributes
    ``-c, +c, +c, -c`` to the orthonormal Fourier modes ``(+-m1, +-m2)`` of
    the torus of side ``2 L`` (signs by parity: expanding sin*sin into
    exponentials gives weight -1/4 per term, and the basis renormalization
    ``(2/L) * 2L`` cancels it to unity), which reproduces the odd extension
    of the field pointwise; Parseval is consistent, the extension carrying
    four copies of the field's energy.  The map is exact -- inverting it
    with :func:`restrict_odd_extension` is an identity.
    """
    domain = field.domain
    if domain.basis is not Basis.DIRICHLET:
        raise ValueError("odd extension applies to Dirichlet-basis fields only")
    n = domain.n
    big = _doubled_torus(domain)
    block = -field.coeffs.astype(np.complex128)
    coeffs = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    coeffs[1:n, 1:n] = block
    coeffs[1:n, 2 * n - 1 : n : -1] = -block
    coeffs[2 * n - 1 : n : -1, 1:n] = -block
    coeffs[2 * n - 1 : n : -1, 2 * n - 1 : n : -1] = block
    return SpectralField(coeffs=coeffs, domain=big)


def restrict_odd_extension(field: SpectralField, domain: DomainSpec) -> SpectralField:
    """Project a doubled-torus field back onto the sine basis of ``domain``.

    Inverse of :func:`embed_odd_extension` on its image; for a general torus
    field this extracts the odd-odd component (the part a sine series can
    represent).
    """
    if domain.basis is not Basis.DIRICHLET:
        raise ValueError("restriction targets a Dirichlet-basis domain")
    n = domain.n
    if field.domain.n != 2 * n or field.domain.basis is not Basis.TORUS:
        raise ValueError("field must live on the doubled torus of the target domain")
    coeffs = -field.coeffs[1:n, 1:n].real.copy()
    return SpectralField(coeffs=coeffs, domain=domain)


def _transport(theta: SpectralField) -> tuple[SpectralField, float]:
    """Dealiased ``-div(u theta)`` on a torus plus the advective speed max|u|."""
    domain = theta.domain
    u1, u2 = velocity_from_theta(theta)
    u1_phys = to_physical(u1).values
    u2_phys = to_physical(u2).values
    theta_phys = to_physical(theta).values
    flux1 = to_spectral(u1_phys * theta_phys, domain)
    flux2 = to_spectral(u2_phys * theta_phys, domain)
    d1, d2 = domain.derivative_symbols
    div = d1 * flux1.coeffs + d2 * flux2.coeffs
    speed = float(max(np.abs(u1_phys).max(), np.abs(u2_phys).max()))
    return dealias(SpectralField(coeffs=-div, domain=domain)), speed


def _nonlinear(theta: SpectralField) -> tuple[SpectralField, float]:
    theta = dealias(theta)
    if theta.domain.basis is Basis.TORUS:
        return _transport(theta)
    rhs_big, speed = _transport(embed_odd_extension(theta))
    return restrict_odd_extension(rhs_big, theta.domain), speed


def nonlinear_rhs(theta: SpectralField) -> SpectralField:
    """Transport term ``-div(u theta)``, dealiased by the 1/3 cut.

    The input is dealiased first, so the quadratic product is exactly
    alias-free and ``<nonlinear_rhs(theta), theta> = 0`` to round-off for any
    field.  Dirichlet fields are routed through the doubled-torus odd
    extension.
    """
    return _nonlinear(theta)[0]


def advective_speed(theta: SpectralField) -> float:
    """Maximum pointwise speed ``max |u|`` of the induced velocity.

    Synthesizes the velocity components directly (no transport products), so
    it stays finite for any finite field -- including the huge pre-divergence
    states the stepper inspects when it aborts a run.  Matches the speed used
    in the transport term: the input is dealiased first, and Dirichlet fields
    are routed through the doubled-torus odd extension.
    """
    theta = dealias(theta)
    if theta.domain.basis is not Basis.TORUS:
        theta = embed_odd_extension(theta)
    u1, u2 = velocity_from_theta(theta)
    u1_phys = to_physical(u1).values
    u2_phys = to_physical(u2).values
    return float(max(np.abs(u1_phys).max(), np.abs(u2_phys).max()))


def default_dt(theta0: SpectralField, *, cfl: float = CFL_LIMIT) -> float:
    """Step size meeting the advective CFL target for the initial field."""
    domain = theta0.domain
    speed = max(1.0, advective_speed(theta0))
    return cfl * (domain.box / domain.n) / speed


# ----------------------------------------------------------------------------
# stepping
# ----------------------------------------------------------------------------


def _step_coeffs(
    coeffs: np.ndarray,
    rhs: Callable[[np.ndarray], tuple[np.ndarray, float]],
    tab: EtdCoefficients,
    scheme: Scheme,
) -> tuple[np.ndarray, float]:
    """One ETD step on raw coefficient arrays; returns (new coeffs, max |u|).

    A diverging run can overflow inside the nonlinear evaluation, where the
    intermediate field constructors reject non-finite data; that validation
    failure is this function's blow-up signal just as much as non-finite
    output coefficients are, so it is converted here (the caller attaches
    time and CFL context).
    """
    with np.errstate(over="ignore", invalid="ignore"):
        try:
            n0, speed0 = rhs(coeffs)
            predictor = tab.decay * coeffs + tab.dt * tab.phi1 * n0
            if scheme is Scheme.ETD1:
                return predictor, speed0
            n1, speed1 = rhs(predictor)
        except ValueError as err:
            if "non-finite" in str(err):
                raise _MidStepOverflow() from err
            raise
    corrected = predictor + tab.dt * tab.phi2 * (n1 - n0)
    return corrected, max(speed0, speed1)


class _MidStepOverflow(ArithmeticError):
    """Internal marker: the nonlinear term overflowed inside a step."""


def _abort_speed(theta: SpectralField) -> float:
    """Advective speed of the last accepted state, for the blow-up report.

    The state can be so large that even velocity synthesis overflows; the
    abort path must still produce a CFL number, so that case reports inf.
    """
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            return advective_speed(theta)
    except (ValueError, FloatingPointError):
        return float("inf")


def _rhs_closure(
    domain: DomainSpec, params: SqgParams
) -> Callable[[np.ndarray], tuple[np.ndarray, float]]:
    forcing = params.forcing
    if forcing is not None and forcing.domain != domain:
        raise ValueError("forcing must live on the same domain as the evolved field")

    def rhs(coeffs: np.ndarray) -> tuple[np.ndarray, float]:
        field, speed = _nonlinear(SpectralField(coeffs=coeffs, domain=domain))
        total = field.coeffs if forcing is None else field.coeffs + forcing.coeffs
        return total, speed

    return rhs


def step(
    state: SimulationState,
    params: SqgParams,
    config: StepperConfig,
    *,
    tables: EtdCoefficients | None = None,
) -> SimulationState:
    """Advance one step of ``config.dt`` with the configured scheme.

    Raises
    ------
    BlowUpError
        If the step produces non-finite coefficients.
    """
    domain = state.theta.domain
    if tables is None:
        tables = etd_coefficients(domain, params, config.dt)
    rhs = _rhs_closure(domain, params)
    t_new = state.t + config.dt
    try:
        new_coeffs, speed = _step_coeffs(state.theta.coeffs, rhs, tables, config.scheme)
    except _MidStepOverflow:
        speed = _abort_speed(state.theta)
        raise BlowUpError(t_new, config.dt * speed * domain.n / domain.box) from None
    if not np.all(np.isfinite(new_coeffs)):
        raise BlowUpError(t_new, config.dt * speed * domain.n / domain.box)
    return SimulationState(t=t_new, theta=SpectralField(coeffs=new_coeffs, domain=domain))


def integrate(
    state: SimulationState,
    params: SqgParams,
    config: StepperConfig,
    monitors: Mapping[str, Callable[[float, SpectralField], float]] | None = None,
    *,
    keep_states: bool = True,
) -> RunResult:
    """March from ``state`` to ``state.t + config.t_end``, sampling diagnostics.

    ``monitors`` maps column names to callables ``(t, theta) -> float``; each
    sampled row evaluates all of them.  Samples land every ``sample_every``
    steps and always at the initial and final time.  The advective CFL number
    is checked at every sample; exceeding :data:`CFL_LIMIT` emits a
    :class:`~sqglab.errors.CflWarning` (escalate warnings to errors for a
    strict run).

    Returns
    -------
    RunResult
        The diagnostics series (column ``cfl`` is always present) and the
        tuple of sampled states (all samples if ``keep_states``, else just
        the final state).
    """
    domain = state.theta.domain
    monitors = dict(monitors or {})
    tables = etd_coefficients(domain, params, config.dt)
    rhs = _rhs_closure(domain, params)

    series = DiagnosticsSeries()
    states: list[SimulationState] = []
    cells_per_length = domain.n / domain.box

    def sample(current: SimulationState, speed: float) -> None:
        cfl = config.dt * speed * cells_per_length
        if cfl > CFL_LIMIT:
            warnings.warn(
                f"advective CFL {cfl:.3f} exceeds {CFL_LIMIT} at t={current.t:.6g}",
                CflWarning,
                stacklevel=2,
            )
        row = {"cfl": cfl}
        for name, monitor in monitors.items():
            row[name] = float(monitor(current.t, current.theta))
        series.append(current.t, row)
        if keep_states:
            states.append(current)

    current = state
    speed = advective_speed(state.theta) if config.n_steps > 0 else 0.0
    sample(current, speed)
    for k in range(config.n_steps):
        t_new = state.t + (k + 1) * config.dt
        try:
            new_coeffs, speed = _step_coeffs(
                current.theta.coeffs, rhs, tables, config.scheme
            )
        except _MidStepOverflow:
            speed = _abort_speed(current.theta)
            raise BlowUpError(t_new, config.dt * speed * cells_per_length) from None
        if not np.all(np.isfinite(new_coeffs)):
            raise BlowUpError(t_new, config.dt * speed * cells_per_length)
        current = SimulationState(
            t=t_new, theta=SpectralField(coeffs=new_coeffs, domain=domain)
        )
        if (k + 1) % config.sample_every == 0 or k + 1 == config.n_steps:
            sample(current, speed)
    if not keep_states:
        states.append(current)
    return RunResult(series=series, states=tuple(states))


# ----------------------------------------------------------------------------
# Picard/Simpson reference integrator
# ----------------------------------------------------------------------------


def _simpson_weights(m: int, h: float) -> np.ndarray:
    """Prefix quadrature weights W[i, j] for integrals over [0, i h], j <= m.

    Even prefixes use composite Simpson; odd prefixes append the half-panel
    rule ``h (5 f_{i-1} + 8 f_i - f_{i+1}) / 12`` to the even part, keeping
    third-order accuracy at every node without ghost points.
    """
    weights = np.zeros((m + 1, m + 1))
    for i in range(2, m + 1, 2):
        weights[i, 0 : i + 1 : 2] += 2 * h / 3
        weights[i, 1:i:2] += 4 * h / 3
        weights[i, 0] -= h / 3
        weights[i, i] -= h / 3
    for i in range(1, m + 1, 2):
        if i >= 3:
            weights[i, : i] = weights[i - 1, : i]
        weights[i, i - 1] += 5 * h / 12
        weights[i, i] += 8 * h / 12
        weights[i, i + 1] -= h / 12
    return weights


def picard_reference(
    state: SimulationState,
    params: SqgParams,
    t_end: float,
    *,
    iterations: int = 8,
    subintervals: int = 32,
    rtol: float = 1e-3,
) -> SimulationState:
    """Fixed-point solve of the Duhamel integral form, as a reference solution.

    Iterates ``theta(t) = exp(-t A) theta0 + int_0^t exp(-(t-s) A) N(theta(s)) ds``
    on a uniform grid of ``subintervals`` nodes with Simpson prefix quadrature,
    starting from the pure decay profile.  All kernels use nonpositive
    exponents except the single look-ahead node of odd prefixes, so the
    evaluation is overflow-safe for stiff modes.

    Raises
    ------
    ConvergenceError
        If the last sweep still changed the final-time iterate by more than
        ``rtol`` in relative L2 norm.
    """
    if iterations < 3:
        raise ValueError(f"iterations must be at least 3, got {iterations}")
    if subintervals < 2 or subintervals % 2 != 0:
        raise ValueError(f"subintervals must be even and >= 2, got {subintervals}")
    if not (np.isfinite(t_end) and t_end > 0):
        raise ValueError(f"t_end must be positive and finite, got {t_end}")

    domain = state.theta.domain
    rhs = _rhs_closure(domain, params)
    m = int(subintervals)
    h = float(t_end) / m
    rate = params.linear_symbol(domain)
    decay_h = np.exp(-rate * h)  # one-node kernel; powers give all i-j >= 0
    growth_h = np.exp(rate * h)  # only ever used for the j = i+1 look-ahead
    weights = _simpson_weights(m, h)

    theta0 = state.theta.coeffs
    profile = np.empty((m + 1, *theta0.shape), dtype=np.complex128)
    homogeneous = np.empty_like(profile)
    homogeneous[0] = theta0
    for i in range(1, m + 1):
        homogeneous[i] = decay_h * homogeneous[i - 1]
    profile[:] = homogeneous

    final_change = np.inf
    for _ in range(iterations):
        sources = np.empty_like(profile)
        for j in range(m + 1):
            sources[j] = rhs(profile[j])[0]
        new_profile = homogeneous.copy()
        for i in range(1, m + 1):
            kernel = np.ones_like(rate)
            for j in range(i, -1, -1):  # kernel = exp(-rate h (i - j))
                w = weights[i, j]
                if w != 0.0:
                    new_profile[i] += w * kernel * sources[j]
                kernel = kernel * decay_h
            if i + 1 <= m and weights[i, i + 1] != 0.0:
                new_profile[i] += weights[i, i + 1] * growth_h * sources[i + 1]
        norm_new = np.linalg.norm(new_profile[m])
        final_change = np.linalg.norm(new_profile[m] - profile[m]) / max(norm_new, 1e-300)
        profile = new_profile
    if not np.isfinite(final_change) or final_change > rtol:
        raise ConvergenceError(
            f"picard iteration did not converge: relative change {final_change:.3e} "
            f"after {iterations} sweeps (tolerance {rtol:.1e})"
        )
    theta = SpectralField(coeffs=profile[m], domain=domain)
    return SimulationState(t=state.t + float(t_end), theta=theta)
