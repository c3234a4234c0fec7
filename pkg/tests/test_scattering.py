import math

import numpy as np
import pytest

import pendrotor as pr
from pendrotor.oracles import brute_tau_scan
from pendrotor.scattering import grad_theta_forms

TWO_PI = 2.0 * math.pi


class TestMelnikov:
    def test_value_at_origin(self):
        # A1(0) + A2(0) = 4 + 2*pi/sinh(pi/2) for unit amplitudes
        p = pr.SystemParams(a1=1.0, a2=1.0)
        expected = 4.0 + TWO_PI / math.sinh(math.pi / 2.0)
        assert pr.melnikov_closed(0.0, 0.0, 0.0, p) == pytest.approx(
            expected, rel=1e-14)

    def test_periodicity(self):
        p = pr.SystemParams(a1=1.0, a2=0.7)
        v1 = pr.melnikov_closed(0.4, 1.1, 2.2, p)
        v2 = pr.melnikov_closed(0.4, 1.1 + TWO_PI, 2.2, p)
        assert v1 == pytest.approx(v2, abs=1e-12)

    def test_envelope_bound(self):
        # |L| <= 4 (|a1| + |a2|) since the kernel integrates to 4
        p = pr.SystemParams(a1=1.3, a2=-0.8)
        rng = np.random.default_rng(3)
        bound = 4.0 * (abs(p.a1) + abs(p.a2))
        for _ in range(50):
            v = pr.melnikov_quadrature(rng.uniform(-3, 3),
                                       rng.uniform(0, TWO_PI),
                                       rng.uniform(0, TWO_PI), p)
            assert abs(v) <= bound + 1e-9

    def test_sign_convention_at_resonance(self):
        # single-harmonic system at I = 0: the integral must give +4 a1 cos(phi)
        p = pr.SystemParams(a1=1.0, a2=0.0)
        for phi in (0.0, 1.0, 2.5, 4.0):
            assert pr.melnikov_quadrature(0.0, phi, 0.3, p) == pytest.approx(
                4.0 * math.cos(phi), abs=1e-9)

    def test_A1_at_one_against_quadrature(self):
        p = pr.SystemParams(a1=1.0, a2=0.0)
        expected = TWO_PI / math.sinh(math.pi / 2.0)
        assert pr.melnikov_quadrature(1.0, 0.0, 0.0, p) == pytest.approx(
            expected, abs=1e-9)

    def test_closed_matches_quadrature(self):
        p = pr.SystemParams(a1=1.0, a2=1.0)
        rng = np.random.default_rng(11)
        for _ in range(60):
            I, phi, s = (rng.uniform(-3, 3), rng.uniform(0, TWO_PI),
                         rng.uniform(0, TWO_PI))
            assert pr.melnikov_closed(I, phi, s, p) == pytest.approx(
                pr.melnikov_quadrature(I, phi, s, p), abs=1e-8)

    def test_closed_matches_quadrature_general_r(self):
        p = pr.SystemParams(a1=0.9, a2=1.2, r=0.7)
        rng = np.random.default_rng(12)
        for _ in range(25):
            I, phi, s = (rng.uniform(-2, 3), rng.uniform(0, TWO_PI),
                         rng.uniform(0, TWO_PI))
            assert pr.melnikov_closed(I, phi, s, p) == pytest.approx(
                pr.melnikov_quadrature(I, phi, s, p), abs=1e-8)


class TestTauStar:
    def test_zero_at_theta_pi(self, p075):
        for I in np.linspace(-2.5, 2.5, 21):
            sol = pr.solve_tau_star(I, math.pi, pr.branch(1), p075)
            assert abs(sol.tau_star) < 1e-12
            assert sol.branch_hit.k == 1

    def test_down_up_reflection(self, p075):
        # the (pi,pi)-reflection sends the first even crossing below the
        # diagonal for theta to the first even crossing above it for
        # 2*pi - theta with the ray parameter reversed:
        # tau_down(theta) = -tau_up(2*pi - theta)
        rng = np.random.default_rng(5)
        n = 0
        while n < 60:
            I = rng.uniform(-2.5, 2.5)
            th = rng.uniform(0.05, TWO_PI - 0.05)
            if min(abs(I), abs(I - 1.0)) < 0.05:
                continue
            try:
                a = pr.solve_tau_star(I, th, pr.DOWN, p075)
                b = pr.solve_tau_star(I, TWO_PI - th, pr.UP, p075)
            except pr.PendrotorError:
                continue
            if a.degenerate or b.degenerate or min(a.margin, b.margin) < 1e-3:
                continue
            assert a.tau_star == pytest.approx(-b.tau_star, abs=1e-9)
            n += 1

    def test_down_up_are_branches_0_2_in_covering_regime(self, p075):
        # wherever the horizontal even ridge covers every phi
        rng = np.random.default_rng(6)
        n = 0
        while n < 40:
            I = rng.uniform(-1.0, 0.55)
            th = rng.uniform(0.05, TWO_PI - 0.05)
            if abs(I) < 0.05:
                continue
            if pr.classify(I, p075) is not pr.CrestKind.HORIZONTAL:
                continue
            a = pr.solve_tau_star(I, th, pr.DOWN, p075)
            b = pr.solve_tau_star(I, th, pr.UP, p075)
            assert a.branch_hit.k == 0
            assert b.branch_hit.k == 2
            a0 = pr.solve_tau_star(I, th, pr.branch(0), p075)
            b2 = pr.solve_tau_star(I, th, pr.branch(2), p075)
            assert a.tau_star == pytest.approx(a0.tau_star, abs=1e-12)
            assert b.tau_star == pytest.approx(b2.tau_star, abs=1e-12)
            n += 1

    def test_residual_at_solutions(self, p075):
        rng = np.random.default_rng(8)
        for _ in range(200):
            I = rng.uniform(-3, 3)
            th = rng.uniform(0, TWO_PI)
            if min(abs(I), abs(I - 1.0)) < 0.03:
                continue
            try:
                sol = pr.solve_tau_star(I, th, pr.MINABS, p075)
            except pr.PendrotorError:
                continue
            assert abs(pr.crest_residual(I, sol.phi_star, sol.sigma_star,
                                         p075)) < 1e-11

    def test_agrees_with_ray_scan(self, p075):
        rng = np.random.default_rng(9)
        crits = [pr.DOWN, pr.UP, pr.MINABS, pr.branch(0), pr.branch(1),
                 pr.branch(2)]
        n = 0
        while n < 50:
            I = rng.uniform(-3, 3)
            th = rng.uniform(0, TWO_PI)
            if min(abs(I), abs(I - 1.0)) < 0.05:
                continue
            crit = crits[n % len(crits)]
            try:
                sol = pr.solve_tau_star(I, th, crit, p075)
            except pr.PendrotorError:
                continue
            if sol.degenerate or sol.margin < 1e-3:
                continue
            ref = brute_tau_scan(I, th, crit, p075, h=1e-4)
            assert sol.tau_star == pytest.approx(ref, abs=1e-6)
            n += 1

    def test_unreachable_branch(self, p075):
        with pytest.raises(pr.UnreachableBranch):
            pr.solve_tau_star(0.4, 1.0, pr.branch(40), p075)

    def test_singular_regime_raises(self):
        # |mu alpha(I)| = 1 exactly at the regime threshold
        p = pr.SystemParams(a1=0.5, a2=1.0)
        rep = pr.find_thresholds(p)
        I_c = rep.alpha_thresholds[1]
        with pytest.raises(pr.SingularCrest):
            pr.solve_tau_star(I_c, 2.0, pr.MINABS, p,
                              pr.DEFAULT_TOL.override(tol_cls=1e-5))


class TestReducedPoincare:
    def test_value_at_theta_pi(self, p075):
        # tau* = 0 there: L* = A1 cos(pi) + A2 cos(pi) = -A1 - A2
        for I in (-1.4, -0.3, 0.45, 1.3):
            expected = -(pr.amplitude_A1(I, p075) + pr.amplitude_A2(I, p075))
            got = pr.reduced_poincare(I, math.pi, pr.branch(1), p075)
            assert got == pytest.approx(expected, abs=1e-12)

    def test_gradient_forms_agree(self, p075):
        rng = np.random.default_rng(13)
        n = 0
        while n < 120:
            I = rng.uniform(-2, 2)
            th = rng.uniform(0, TWO_PI)
            if min(abs(I), abs(I - 1.0)) < 0.05:
                continue
            try:
                sol = pr.solve_tau_star(I, th, pr.branch(1), p075)
            except pr.PendrotorError:
                continue
            if sol.margin < 1e-3:
                continue
            f1, f2 = grad_theta_forms(sol, p075)
            assert f1 == pytest.approx(f2, abs=1e-9)
            n += 1

    def test_gradient_matches_finite_differences(self, p075):
        rng = np.random.default_rng(14)
        h = 1e-5
        n = 0
        while n < 60:
            I = rng.uniform(-2, 2)
            th = rng.uniform(0.1, TWO_PI - 0.1)
            if min(abs(I), abs(I - 1.0)) < 0.06:
                continue
            try:
                sol = pr.solve_tau_star(I, th, pr.branch(1), p075)
                if sol.margin < 1e-2:
                    continue
                dI, dth = pr.grad_reduced_poincare(I, th, pr.branch(1), p075)
                fd_th = (pr.reduced_poincare(I, th + h, pr.branch(1), p075)
                         - pr.reduced_poincare(I, th - h, pr.branch(1), p075)
                         ) / (2 * h)
                fd_I = (pr.reduced_poincare(I + h, th, pr.branch(1), p075)
                        - pr.reduced_poincare(I - h, th, pr.branch(1), p075)
                        ) / (2 * h)
            except pr.PendrotorError:
                continue
            assert dth == pytest.approx(fd_th, abs=1e-6 * max(1, abs(dth)))
            assert dI == pytest.approx(fd_I, abs=1e-6 * max(1, abs(dI)))
            n += 1

    def test_dtheta_vanishes_at_pi(self, p075):
        for I in (-1.2, 0.4, 1.6):
            dI, dth = pr.grad_reduced_poincare(I, math.pi, pr.branch(1), p075)
            assert abs(dth) < 1e-12

    def test_degenerate_contact_refused(self, p075):
        # force the degeneracy flag with an absurdly large margin tolerance
        tol = pr.DEFAULT_TOL.override(tol_degen=1e9)
        with pytest.raises(pr.TangencyDegenerate):
            pr.grad_reduced_poincare(0.4, 2.0, pr.branch(1), p075, tol)


class TestScatteringStep:
    def test_identity_at_zero_eps(self):
        p = pr.SystemParams(a1=0.75, a2=1.0, eps=0.0)
        st = pr.ScatteringState(0.4, 2.0)
        assert pr.scattering_step(st, pr.branch(1), p) == st

    def test_level_curve_order(self, p075):
        # |L* o S - L*| should scale like eps^2 (checked tightly in the
        # acceptance suite; here a single halving)
        st = pr.ScatteringState(0.42, 3.5)
        drifts = []
        for eps in (1e-2, 5e-3):
            p = p075.with_eps(eps)
            new = pr.scattering_step(st, pr.branch(1), p)
            d = abs(pr.reduced_poincare(new.I, new.theta, pr.branch(1), p)
                    - pr.reduced_poincare(st.I, st.theta, pr.branch(1), p))
            drifts.append(d)
        ratio = drifts[0] / drifts[1]
        assert 2.5 < ratio < 6.5  # ~4 for a clean eps^2 law

    def test_s_invariance_of_reduced_form(self, p075):
        # the reduced map depends on (I, theta) only: lifting theta from any
        # (phi, s) with phi - I s = theta gives the identical step
        I, theta = 0.37, 4.1
        base = pr.scattering_step(pr.ScatteringState(I, theta), pr.branch(1),
                                  p075)
        for s in (0.0, 1.3, 5.1):
            phi = theta + I * s
            th2 = (phi - I * s) % TWO_PI
            again = pr.scattering_step(pr.ScatteringState(I, th2),
                                       pr.branch(1), p075)
            assert again == base


class TestExtendedDomain:
    def test_horizontal_regime_always_true(self, p05):
        for th in np.linspace(0, TWO_PI, 40, endpoint=False):
            assert pr.extended_map_domain(0.3, th, p05, branch_k=0)
            assert pr.extended_map_domain(0.3, th, p05, branch_k=1)

    def test_vertical_regime_strip_test(self, p05):
        # near I = 1 the odd vertical ridge sits at phi ~ pi spanning every
        # sigma; only contacts with sigma in (pi/2, 3pi/2) continue the
        # horizontal parameterization
        I = 1.001
        assert pr.extended_map_domain(I, 2.6, p05, branch_k=1)
        assert not pr.extended_map_domain(I, 1.4, p05, branch_k=1)

    def test_continuity_across_regime_switch(self, p05):
        # L* of the even-branch maps is continuous in I across the
        # horizontal->vertical threshold for theta near 0 (branch 0) and
        # near 2*pi (branch 2, whose contact lives by the (2pi, 2pi) copy)
        rep = pr.find_thresholds(p05)
        I_c = rep.alpha_thresholds[1]  # ~0.701
        for th, k in ((0.12, 0), (0.3, 0), (TWO_PI - 0.2, 2), (TWO_PI - 0.35, 2)):
            vals = []
            for I in np.linspace(I_c - 2e-3, I_c + 2e-3, 9):
                if pr.classify(I, p05) is pr.CrestKind.SINGULAR:
                    continue
                vals.append(pr.reduced_poincare(I, th, pr.branch(k), p05))
            gaps = np.abs(np.diff(vals))
            assert np.max(gaps) < 1e-4


class TestPiecewiseMap:
    def test_region_II_matches_branch1(self, p075):
        st = pr.ScatteringState(0.3, math.pi)
        new, region = pr.piecewise_global_map(st, p075)
        assert region == "II"
        direct = pr.scattering_step(st, pr.branch(1), p075)
        assert new == direct

    def test_region_I_matches_branch0(self, p075):
        st = pr.ScatteringState(0.3, math.pi / 4)
        new, region = pr.piecewise_global_map(st, p075)
        assert region == "I"
        direct = pr.scattering_step(st, pr.branch(0), p075)
        assert new == direct

    def test_discontinuity_lines(self, p075):
        for th in (math.pi / 2, 3 * math.pi / 2):
            with pytest.raises(pr.OnDiscontinuity):
                pr.piecewise_global_map(pr.ScatteringState(0.3, th), p075)

    def test_drift_sign_split(self, p075):
        # action decreases on theta in (0, pi) and increases on (pi, 2pi)
        for I in (-0.6, 0.3, 1.4):
            for th in np.linspace(0.15, TWO_PI - 0.15, 36):
                if min(abs(th - math.pi / 2), abs(th - 3 * math.pi / 2),
                       abs(th - math.pi)) < 0.12:
                    continue
                st = pr.ScatteringState(I, th)
                try:
                    new, _ = pr.piecewise_global_map(st, p075)
                except pr.PendrotorError:
                    continue
                if th < math.pi:
                    assert new.I < I
                else:
                    assert new.I > I


class TestAtlas:
    def test_regions_partition_circle(self):
        lims = [(lo, hi) for lo, hi, _, _ in pr.ATLAS.regions]
        assert lims[0][0] == 0.0
        assert lims[-1][1] == TWO_PI
        for (_, hi), (lo, _) in zip(lims[:-1], lims[1:]):
            assert hi == lo
        assert set(pr.ATLAS.discontinuities) == {math.pi / 2,
                                                 3 * math.pi / 2}

    def test_region_lookup(self):
        assert pr.ATLAS.region_of(0.2) == ("I", 0)
        assert pr.ATLAS.region_of(math.pi) == ("II", 1)
        assert pr.ATLAS.region_of(5.0) == ("III", 2)
        assert pr.ATLAS.region_of(5.0 + TWO_PI) == ("III", 2)


class TestThetaPlus:
    def test_horizontal_midpoint(self):
        p = pr.SystemParams(a1=0.75, a2=1.0)
        assert pr.theta_plus(0.5, p) == pytest.approx(1.5 * math.pi)

    def test_horizontal_between_one_and_three_halves(self):
        # need a coupling ratio keeping I = 5/4 horizontal: |alpha(1.25)|
        # ~ 2.89 so mu < 0.346 works
        p = pr.SystemParams(a1=0.2, a2=1.0)
        assert pr.classify(1.25, p) is pr.CrestKind.HORIZONTAL
        assert pr.theta_plus(1.25, p) == pytest.approx(1.25 * math.pi)

    def test_vertical_negative_branch(self):
        # mu large enough that I = -1/4 is vertical: |alpha(-0.25)| ~ 0.346
        p = pr.SystemParams(a1=3.5, a2=1.0)
        assert pr.classify(-0.25, p) is pr.CrestKind.VERTICAL
        assert pr.theta_plus(-0.25, p) == pytest.approx(1.25 * math.pi)

    def test_guaranteed_floor_outside_center(self, p075):
        for I in (-1.9, -0.7, 0.8, 1.2, 1.9):
            if pr.classify(I, p075) is pr.CrestKind.SINGULAR:
                continue
            assert pr.theta_plus(I, p075) >= 1.5 * math.pi - 1e-12

    def test_requires_positive_amplitudes(self):
        with pytest.raises(pr.ConfigError):
            pr.theta_plus(0.5, pr.SystemParams(a1=-1.0, a2=1.0))
