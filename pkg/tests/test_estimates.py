"""A-priori inequality monitors: records, envelopes, pointwise and tail checks."""

from __future__ import annotations

import numpy as np
import pytest

from sqglab.dynamics import SimulationState, SqgParams, StepperConfig, integrate
from sqglab.estimates import (
    DEFAULT_TOL,
    CutoffSpec,
    InequalityRecord,
    commutator_probe,
    cordoba_pointwise_check,
    cordoba_slack_field,
    cutoff_fractional_bound,
    damped_energy_monitor,
    linf_monitor,
    max_principle_monitor,
    positivity_integral_check,
    sobolev_bound_monitor,
    tail_mass,
)
from sqglab.fields import random_smooth_field
from sqglab.spectral import (
    DomainSpec,
    PhysicalField,
    cosine_field,
    fractional_laplacian,
    lq_norm,
    sobolev_norm,
    to_physical,
)


def _short_run(domain, *, lam=0.0, seed=1, amplitude=0.2, alpha=0.75):
    theta0 = random_smooth_field(domain, seed=seed, amplitude=amplitude)
    params = SqgParams(kappa=0.2, alpha=alpha, lam=lam)
    config = StepperConfig(dt=0.01, t_end=0.1)
    return integrate(SimulationState(t=0.0, theta=theta0), params, config).states


class TestInequalityRecord:
    def test_slack_and_pass_semantics(self):
        rec = InequalityRecord(name="demo", t=0.0, lhs=1.0, rhs=2.0)
        assert rec.slack == 1.0 and rec.passed

    def test_small_violation_within_tolerance_passes(self):
        rec = InequalityRecord(name="demo", t=0.0, lhs=1.0 + 5e-9, rhs=1.0)
        assert rec.slack < 0 and rec.passed

    def test_violation_beyond_tolerance_fails(self):
        rec = InequalityRecord(name="demo", t=0.0, lhs=1.0 + 1e-7, rhs=1.0)
        assert not rec.passed

    def test_custom_scale_widens_tolerance(self):
        rec = InequalityRecord(name="demo", t=0.0, lhs=1e-7, rhs=0.0, scale=100.0)
        assert rec.passed
        with pytest.raises(ValueError, match="scale must be positive"):
            InequalityRecord(name="demo", t=0.0, lhs=0.0, rhs=0.0, scale=0.0)

    def test_non_finite_sides_rejected(self):
        with pytest.raises(ValueError, match="non-finite sides"):
            InequalityRecord(name="demo", t=0.0, lhs=np.inf, rhs=1.0)

    def test_as_dict_round_trip(self):
        rec = InequalityRecord(name="demo", t=1.5, lhs=2.0, rhs=3.0)
        d = rec.as_dict()
        assert d["name"] == "demo" and d["t"] == 1.5
        assert d["slack"] == 1.0 and d["passed"] is True
        assert d["tol"] == DEFAULT_TOL and d["scale"] == 3.0


class TestMaxPrincipleMonitor:
    def test_q_validation(self):
        with pytest.raises(ValueError, match=r"q must lie in \[2, inf\)"):
            max_principle_monitor([], q=1.5)
        with pytest.raises(ValueError, match=r"q must lie in \[2, inf\)"):
            max_principle_monitor([], q=np.inf)

    def test_empty_states(self):
        assert max_principle_monitor([], q=2.0) == []

    def test_unforced_run_is_monotone(self, torus32):
        states = _short_run(torus32)
        for q in (2.0, 4.0, 8.0):
            records = max_principle_monitor(states, q=q)
            assert len(records) == len(states)
            assert all(r.passed for r in records)
            assert records[0].name == f"lq-monotone-q{q:g}"
            assert records[0].rhs == pytest.approx(lq_norm(states[0].theta, q))

    def test_forced_envelope_formula(self, torus32):
        theta0 = random_smooth_field(torus32, seed=2, amplitude=0.2)
        forcing = random_smooth_field(torus32, seed=3, amplitude=0.05)
        later = SimulationState(t=0.5, theta=theta0)
        records = max_principle_monitor(
            [SimulationState(t=0.0, theta=theta0), later], q=2.0, forcing=forcing
        )
        assert records[0].name == "lq-envelope-q2"
        base = lq_norm(theta0, 2.0) ** 2
        force = lq_norm(forcing, 2.0) ** 2
        expected = base * np.exp(0.5) + (np.exp(0.5) - 1.0) * force
        assert records[1].rhs == pytest.approx(expected, rel=1e-12)
        assert records[1].lhs == pytest.approx(base, rel=1e-12)

    def test_forced_run_respects_envelope(self, torus32):
        theta0 = random_smooth_field(torus32, seed=4, amplitude=0.2)
        forcing = random_smooth_field(torus32, seed=5, amplitude=0.1)
        params = SqgParams(kappa=0.2, alpha=0.75, forcing=forcing)
        config = StepperConfig(dt=0.01, t_end=0.2)
        states = integrate(SimulationState(t=0.0, theta=theta0), params, config).states
        for q in (2.0, 4.0):
            assert all(r.passed for r in max_principle_monitor(states, q=q, forcing=forcing))


class TestLinfMonitor:
    def test_envelope_formula(self, torus32):
        theta0 = random_smooth_field(torus32, seed=6, amplitude=0.3)
        forcing = random_smooth_field(torus32, seed=7, amplitude=0.1)
        states = [SimulationState(t=0.0, theta=theta0), SimulationState(t=1.0, theta=theta0)]
        records = linf_monitor(states, forcing=forcing)
        base = lq_norm(theta0, np.inf)
        force = lq_norm(forcing, np.inf)
        assert records[0].name == "linf-envelope"
        assert records[1].rhs == pytest.approx((base + force) * np.e, rel=1e-12)

    def test_decaying_run_passes(self, torus32):
        states = _short_run(torus32, seed=8)
        assert all(r.passed for r in linf_monitor(states))

    def test_empty_states(self):
        assert linf_monitor([]) == []


class TestDampedEnergyMonitor:
    def test_lam_validation(self):
        with pytest.raises(ValueError, match="lam must be nonnegative"):
            damped_energy_monitor([], lam=-0.1)

    def test_damped_run_passes(self, torus32):
        states = _short_run(torus32, lam=0.5, seed=9)
        records = damped_energy_monitor(states, lam=0.5)
        assert records and all(r.passed for r in records)
        assert records[0].name == "damped-energy"

    def test_envelope_is_initial_energy_decay(self, torus32):
        theta0 = random_smooth_field(torus32, seed=10, amplitude=0.2)
        states = [SimulationState(t=0.0, theta=theta0), SimulationState(t=2.0, theta=theta0)]
        records = damped_energy_monitor(states, lam=1.0)
        base = sobolev_norm(theta0, 0.0) ** 2
        assert records[1].rhs == pytest.approx(base * np.exp(-2.0), rel=1e-12)


class TestCordobaPointwise:
    def test_alpha_zero_slack_is_square(self, torus32):
        phi = random_smooth_field(torus32, seed=11, amplitude=0.5)
        slack = cordoba_slack_field(phi, 0.0)
        expected = to_physical(phi).values ** 2
        assert np.allclose(slack.values, expected, atol=1e-13)

    def test_cosine_closed_form_at_alpha_one(self, torus32):
        # phi = cos x1: 2 phi (-Lap) phi - (-Lap)(phi^2) = 2 - 2 cos^2 x1.
        phi = cosine_field(torus32, k=(1, 0))
        slack = cordoba_slack_field(phi, 1.0)
        x1 = torus32.physical_coordinates[0]
        expected = 2.0 - 2.0 * np.cos(x1) ** 2
        assert np.allclose(slack.values, expected, atol=1e-10)

    def test_min_slack_nonnegative_for_smooth_batch(self, torus32):
        for seed in range(12):
            phi = random_smooth_field(torus32, seed=seed, amplitude=1.0)
            for alpha in (0.25, 0.5, 1.0):
                min_slack = cordoba_pointwise_check(phi, alpha)
                diss = to_physical(fractional_laplacian(phi, alpha)).values
                scale = float(np.abs(2.0 * to_physical(phi).values * diss).max())
                assert min_slack >= -1e-8 * scale, f"seed={seed} alpha={alpha}"

    def test_alpha_validation(self, torus32):
        phi = random_smooth_field(torus32, seed=1)
        with pytest.raises(ValueError, match=r"alpha must lie in \[0, 1\]"):
            cordoba_slack_field(phi, 1.5)


class TestPositivityIntegral:
    def test_q2_equals_seminorm_single_mode(self, torus32):
        theta = cosine_field(torus32, k=(1, 0))
        # integral of cos^2 over the (2 pi)^2 box
        assert positivity_integral_check(theta, 2.0, 0.75) == pytest.approx(
            2.0 * np.pi**2, rel=1e-12
        )

    def test_q2_equals_seminorm_random(self, torus32):
        theta = random_smooth_field(torus32, seed=13, amplitude=0.7)
        value = positivity_integral_check(theta, 2.0, 0.6)
        assert value == pytest.approx(sobolev_norm(theta, 0.6) ** 2, rel=1e-10)

    def test_nonnegative_for_batch(self, torus32):
        for seed in range(8):
            theta = random_smooth_field(torus32, seed=seed, amplitude=1.0)
            for q in (2.0, 3.0, 4.0, 8.0):
                value = positivity_integral_check(theta, q, 0.75)
                assert value >= -1e-10, f"seed={seed} q={q}"

    def test_validation(self, torus32):
        theta = random_smooth_field(torus32, seed=1)
        with pytest.raises(ValueError, match=r"q must lie in \[2, inf\)"):
            positivity_integral_check(theta, 1.0, 0.5)
        with pytest.raises(ValueError, match=r"alpha must lie in \[0, 1\]"):
            positivity_integral_check(theta, 2.0, -0.1)


class TestSobolevBoundMonitor:
    def test_requires_l_at_least_alpha(self, torus32):
        params = SqgParams(kappa=0.2, alpha=0.75)
        with pytest.raises(ValueError, match="must be >= alpha"):
            sobolev_bound_monitor([], 0.5, params)

    def test_too_few_states_is_empty(self, torus32):
        params = SqgParams(kappa=0.2, alpha=0.75)
        states = _short_run(torus32, seed=14)[:2]
        assert sobolev_bound_monitor(states, 1.5, params) == []

    def test_records_pass_and_track_running_max(self, torus32):
        params = SqgParams(kappa=0.2, alpha=0.75)
        states = _short_run(torus32, seed=15)
        records = sobolev_bound_monitor(states, 1.5, params)
        assert len(records) == len(states) - 2
        assert all(r.passed for r in records)
        assert records[0].name == "sobolev-ineq-l1.5"
        assert records[-1].rhs == pytest.approx(max(r.lhs for r in records))


class TestCutoff:
    def test_profile_plateaus(self):
        spec = CutoffSpec(k=2.0)
        r = np.array([0.0, 1.0, 2.0, 3.0, 4.0, 10.0])
        eta = spec.profile(r)
        assert np.all(eta[:3] == 0.0)  # r <= k
        assert np.all(eta[4:] == 1.0)  # r >= 2k
        assert spec.profile(np.array([3.0]))[0] == pytest.approx(0.5)

    def test_radius_validation(self):
        with pytest.raises(ValueError, match="cutoff radius k must be positive"):
            CutoffSpec(k=0.0)

    def test_field_requires_fitting_annulus(self, torus32):
        with pytest.raises(ValueError, match="does not fit"):
            CutoffSpec(k=0.3 * torus32.box).field_on(torus32)

    def test_tail_mass_vanishes_for_core_supported_field(self):
        domain = DomainSpec(n=64, box=8.0 * np.pi)
        x1, x2 = domain.physical_coordinates
        c = domain.box / 2.0
        bump = np.exp(-((x1 - c) ** 2 + (x2 - c) ** 2) / (2.0 * 0.3**2))
        cutoff = CutoffSpec(k=domain.box / 6.0)
        assert tail_mass(PhysicalField(values=bump, domain=domain), cutoff) <= 1e-12

    def test_tail_mass_sees_far_field(self):
        domain = DomainSpec(n=64, box=8.0 * np.pi)
        ones = np.ones((domain.n, domain.n))
        cutoff = CutoffSpec(k=domain.box / 6.0)
        mass = tail_mass(PhysicalField(values=ones, domain=domain), cutoff)
        eta = cutoff.field_on(domain).values
        assert mass == pytest.approx(eta.sum() * (domain.box / domain.n) ** 2)
        assert mass > 0.0


class TestCutoffFractionalBound:
    def test_unit_radius_reference_is_exact(self):
        domain = DomainSpec(n=64, box=4.0 * np.pi)
        max_abs, err = cutoff_fractional_bound(domain, CutoffSpec(k=1.0), s=1.0)
        assert err == 0.0
        assert max_abs > 0.0

    def test_dilation_scaling(self):
        # (-Lap)^{1/2} eta_k scales like k^{-1}: doubling k halves the max.
        d1 = DomainSpec(n=64, box=4.0 * np.pi)
        d2 = DomainSpec(n=64, box=8.0 * np.pi)
        m1, _ = cutoff_fractional_bound(d1, CutoffSpec(k=1.0), s=1.0)
        m2, e2 = cutoff_fractional_bound(d2, CutoffSpec(k=2.0), s=1.0)
        assert e2 <= 1e-10 * m2
        assert m2 == pytest.approx(0.5 * m1, rel=0.05)

    def test_validation(self, torus32, dirichlet32):
        with pytest.raises(ValueError, match=r"s must lie in \(0, 2\)"):
            cutoff_fractional_bound(torus32, CutoffSpec(k=1.0), s=2.0)
        with pytest.raises(ValueError, match="defined on the torus"):
            cutoff_fractional_bound(dirichlet32, CutoffSpec(k=0.5), s=1.0)


class TestCommutatorProbe:
    def test_ratio_is_finite_and_positive(self, torus32):
        f = random_smooth_field(torus32, seed=16, amplitude=0.5)
        g = random_smooth_field(torus32, seed=17, amplitude=0.5)
        ratio = commutator_probe(f, g, gamma=0.5, p=2.0, q=np.inf, r=2.0)
        assert np.isfinite(ratio) and ratio > 0.0

    def test_zero_input_returns_zero(self, torus32):
        f = random_smooth_field(torus32, seed=18, amplitude=0.5)
        zero = cosine_field(torus32, amplitude=0.0)
        assert commutator_probe(f, zero, gamma=0.5, p=2.0, q=np.inf, r=2.0) == 0.0

    def test_validation(self, torus32):
        f = random_smooth_field(torus32, seed=19)
        with pytest.raises(ValueError, match="gamma must be positive"):
            commutator_probe(f, f, gamma=0.0, p=2.0, q=4.0, r=4.0)
        with pytest.raises(ValueError, match="1 < p < q"):
            commutator_probe(f, f, gamma=0.5, p=4.0, q=2.0, r=4.0)
        with pytest.raises(ValueError, match="1/r \\+ 1/q = 1/p"):
            commutator_probe(f, f, gamma=0.5, p=2.0, q=4.0, r=8.0)
