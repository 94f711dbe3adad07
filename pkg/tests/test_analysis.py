from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fronfix.analysis import (
    AmplificationQuery,
    amplification_factor,
    lemma1_check,
    monotonicity_audit,
    observed_order,
    y_truncation_study,
)
from fronfix.errors import ValidationError
from fronfix.model import ModelParams, SolutionSurface, build_grid
from fronfix.scheme import run_solver


def make_surface(v, xf):
    return SolutionSurface(v=np.asarray(v, dtype=float), xf=np.asarray(xf, dtype=float))


class TestLemma1:
    def test_default_grid_violates_convection_condition(self, base_params):
        g = build_grid(base_params, M=100, mu=20.0, Y=4.0)
        rep = lemma1_check(base_params, g)
        # 0.04 <= 0.04*0.032/0.08 = 0.016 is false
        assert rep.cond_convection is False
        assert rep.cond_timestep is True
        assert not rep.satisfied

    def test_drift_free_case_skips_convection(self):
        # r equal to sigma^2/2 bit-for-bit
        p = ModelParams(r=0.2 * 0.2 / 2.0, sigma=0.2, E=1.0, T=1.0)
        g = build_grid(p, M=100, mu=20.0, Y=4.0)
        rep = lemma1_check(p, g)
        assert rep.cond_convection is None
        assert rep.satisfied == rep.cond_timestep

    def test_timestep_condition_boundary_inclusive(self, base_params):
        p = base_params
        sig2 = p.sigma**2
        # choose dy then dtau exactly on the bound
        g0 = build_grid(p, M=40, mu=1.0, Y=4.0)
        dy = g0.dy
        dtau_limit = dy * dy / (p.r * dy * dy + sig2)
        mu_limit = dtau_limit / (dy * dy)
        g = build_grid(p, M=40, mu=mu_limit, Y=4.0)
        rep = lemma1_check(p, g)
        assert rep.cond_timestep is True

    def test_compliant_grid_gives_nonnegative_offdiagonals(self, base_params):
        run = run_solver(base_params, 40, 22.0, 4.0)
        rep = lemma1_check(base_params, run.grid, run.surface.xf)
        assert rep.satisfied
        assert np.all(rep.coefficient_signs[:, 0] >= 0)  # A
        assert np.all(rep.coefficient_signs[:, 2] >= 0)  # C
        # B is negative as the scheme is written; recorded, not asserted
        assert np.all(rep.coefficient_signs[:, 1] == -1)


class TestMonotonicityAudit:
    def test_compliant_run_is_clean(self, base_params):
        run = run_solver(base_params, 40, 22.0, 4.0)
        rep = monotonicity_audit(run.surface)
        assert rep.clean
        assert rep.max_xf_increase <= 1e-9
        assert rep.max_v_negative <= 1e-9

    def test_constant_rows_hold_with_equality(self):
        # non-increase in m holds with equality on a constant-in-m level
        v = np.zeros((2, 5))
        xf = np.array([1.0, 1.0])
        rep = monotonicity_audit(make_surface(v, xf))
        assert rep.clean
        assert rep.max_v_increase_in_m == 0.0

    def test_single_injected_negative_node_located(self, base_params):
        run = run_solver(base_params, 40, 22.0, 4.0)
        v = run.surface.v.copy()
        v[3, 5] = -1e-3  # fault injection
        rep = monotonicity_audit(make_surface(v, run.surface.xf))
        negatives = [viol for viol in rep.violations if viol.kind == "v_negative"]
        assert len(negatives) == 1
        assert (negatives[0].level, negatives[0].node) == (3, 5)
        # the dent also creates local slope violations next to it
        kinds = {viol.kind for viol in rep.violations}
        assert kinds <= {"v_negative", "v_increase_in_m"}

    def test_xf_increase_flagged(self):
        v = np.zeros((3, 4))
        xf = np.array([1.0, 0.8, 0.9])
        v[:, 0] = 1.0 - xf
        rep = monotonicity_audit(make_surface(v, xf))
        bumps = [viol for viol in rep.violations if viol.kind == "xf_increase"]
        assert len(bumps) == 1 and bumps[0].level == 2
        assert rep.max_xf_increase == pytest.approx(0.1)


class TestAmplification:
    def grid(self, p):
        return build_grid(p, M=100, mu=20.0, Y=4.0)

    def test_zero_spatial_frequency_with_zero_rate_gives_unity(self):
        p = ModelParams(r=0.0, sigma=0.2, E=1.0, T=1.0, alpha=0.6)
        g = self.grid(p)
        b = 2.0 * math.pi / g.dy  # sin(b*dy/2) = sin(pi) = 0
        res = amplification_factor(AmplificationQuery(b, 1.0, 10, p, g))
        assert res.lam == pytest.approx(1.0, abs=1e-12)

    def test_modulus_below_one_with_positive_rate(self):
        p = ModelParams(r=0.1, sigma=0.2, E=1.0, T=1.0, alpha=0.6)
        g = self.grid(p)
        res = amplification_factor(AmplificationQuery(1.7, 0.5, 25, p, g))
        assert abs(res.lam) < 1.0

    def test_desk_scale_scan_is_stable(self, base_params):
        g = self.grid(base_params)
        worst = 0.0
        for alpha in (0.3, 0.6, 0.9):
            p = ModelParams(0.1, 0.2, 1.0, 1.0, alpha)
            for a in (0.1, 1.0, 10.0):
                for n in (1, 10, 100):
                    for k in range(1, 21):
                        b = k * math.pi / (20.0 * g.dy)
                        res = amplification_factor(AmplificationQuery(b, a, n, p, g))
                        worst = max(worst, abs(res.lam))
        assert worst < 1.0

    def test_rejects_bad_queries(self):
        p = ModelParams(0.1, 0.2, 1.0, 1.0, 0.6)
        g = self.grid(p)
        with pytest.raises(ValidationError):
            amplification_factor(AmplificationQuery(1.0, 1.0, 0, p, g))
        with pytest.raises(ValidationError):
            amplification_factor(AmplificationQuery(0.0, 1.0, 5, p, g))
        with pytest.raises(ValidationError):
            amplification_factor(AmplificationQuery(1.0, 0.0, 5, p, g))
        with pytest.raises(ValidationError):
            amplification_factor(
                AmplificationQuery(1.0, 1.0, 5, ModelParams(0.1, 0.2, 1.0, 1.0), g)
            )

    @given(
        b=st.floats(min_value=0.05, max_value=50.0),
        a=st.floats(min_value=0.05, max_value=5.0),
        alpha=st.floats(min_value=0.1, max_value=0.9),
        n=st.integers(min_value=1, max_value=60),
    )
    @settings(max_examples=120, deadline=None)
    def test_periodicity_in_wavenumber(self, b, a, alpha, n):
        p = ModelParams(0.1, 0.2, 1.0, 1.0, alpha)
        g = build_grid(p, M=50, mu=10.0, Y=4.0)
        q1 = amplification_factor(AmplificationQuery(b, a, n, p, g))
        q2 = amplification_factor(
            AmplificationQuery(b + 2.0 * math.pi / g.dy, a, n, p, g)
        )
        assert q1.lam == pytest.approx(q2.lam, rel=1e-9, abs=1e-12)

    @given(
        a=st.floats(min_value=0.05, max_value=5.0),
        alpha=st.floats(min_value=0.1, max_value=0.9),
    )
    @settings(max_examples=60, deadline=None)
    def test_memory_sum_monotone_and_convergent(self, a, alpha):
        p = ModelParams(0.1, 0.2, 1.0, 1.0, alpha)
        g = build_grid(p, M=50, mu=10.0, Y=4.0)
        sums = [
            amplification_factor(AmplificationQuery(1.0, a, n, p, g)).memory_sum
            for n in (1, 2, 4, 8, 16, 200, 400)
        ]
        assert all(s2 >= s1 for s1, s2 in zip(sums, sums[1:]))
        # geometric tail: the n=400 partial sum has essentially converged
        ratio = math.exp(-g.dtau * (alpha / (1 - alpha) + a))
        assert sums[-1] - sums[-2] <= sums[-2] * ratio ** 199 + 1e-12


class TestObservedOrder:
    def test_requires_two_refinements(self, base_params):
        base = build_grid(base_params, M=16, mu=5.0, Y=4.0)
        with pytest.raises(ValidationError):
            observed_order(base_params, base, refinements=1)

    def test_desk_scale_rates_are_sane(self, base_params):
        # light smoke version; the acceptance suite runs the pinned families
        base = build_grid(base_params, M=40, mu=10.0, Y=4.0)
        est = observed_order(base_params, base, refinements=2)
        assert 0.5 <= est.temporal_rate <= 2.5
        assert 1.0 <= est.spatial_rate <= 3.0
        assert len(est.spatial_table) == 3
        assert len(est.temporal_table) == 3


class TestTruncationStudy:
    def test_single_bound_single_row(self, base_params):
        rows = y_truncation_study(base_params, 40, 10.0, [4.0])
        assert len(rows) == 1
        assert rows[0].M == 40

    def test_default_bound_matches_solver_path(self, base_params):
        rows = y_truncation_study(base_params, 40, 10.0, [4.0])
        run = run_solver(base_params, 40, 10.0, 4.0)
        assert rows[0].xf_final == run.surface.xf[-1]

    def test_stabilization_with_growing_bound(self, base_params):
        rows = y_truncation_study(base_params, 120, 20.0, [1.0, 2.0, 4.0])
        by_y = {row.Y: row.xf_final for row in rows}
        assert abs(by_y[4.0] - by_y[2.0]) <= abs(by_y[2.0] - by_y[1.0]) + 1e-15

    def test_rejects_bad_bounds(self, base_params):
        with pytest.raises(ValidationError):
            y_truncation_study(base_params, 40, 10.0, [])
        with pytest.raises(ValidationError):
            y_truncation_study(base_params, 40, 10.0, [1.0, -2.0])
