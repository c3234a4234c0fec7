"""Action-drift machinery: transversality tests and pseudo-orbits.

A drift pseudo-orbit alternates (i) first-order jump-map steps of the
odd-branch map inside the window theta in (rho, theta_plus(I)), where the
action strictly increases, with (ii) inner-flow arcs that re-enter the
window after the jump iterates leave it.  Jumps follow a level curve of the
reduced splitting function up to O(eps^2) per step; inner arcs run between
stroboscopic sections s = 0 mod 2*pi so that consecutive legs share their
endpoint states exactly.

Transversality of the jump foliation against the inner invariant foliation
is measured by the Poisson bracket {F_region, L*}; it vanishes on theta in
{0, pi} plus a non-horizontal curve inside the resonance bands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels as K
from ._ode import ODE_OK, integrate_inner
from .errors import (ConfigError, SingularCrest, StuckAtResonance,
                     TangencyDegenerate, UnreachableBranch, WindowEmpty)
from .inner import InnerState, TorusRegion, region_of, torus_value
from .params import DEFAULT_TOL, SystemParams, Tolerances
from .scattering import (ScatteringState, TauCriterion, branch,
                         grad_reduced_poincare, reduced_poincare, theta_plus)

TWO_PI = 2.0 * math.pi


# ----------------------------------------------------------------------
# transversality
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class TransversalityReport:
    I: float
    theta: float
    bracket: float
    verdict: str  # "transversal" | "tangent-line"


def poisson_bracket(I: float, theta: float, criterion: TauCriterion,
                    params: SystemParams,
                    tol: Tolerances = DEFAULT_TOL) -> float:
    """{F_region, L*} = dF/dtheta * dL*/dI - dF/dI * dL*/dtheta at s = 0.

    F is the truncated invariant of the resonance band containing I (or
    I^2/2 outside the bands).  A nonzero bracket means the jump map moves
    points across the inner invariant curves.
    """
    dI_L, dth_L = grad_reduced_poincare(I, theta, criterion, params, tol)
    th = theta % TWO_PI
    region = region_of(I, params)
    if region is TorusRegion.RES0:
        F_I = I
        F_th = -params.eps * params.a1 * math.sin(th)
    elif region is TorusRegion.RES1:
        F_I = I - 1.0 / params.r
        F_th = -params.eps * params.a2 * params.r * math.sin(params.r * th)
    else:
        F_I = I
        F_th = 0.0
    return F_th * dI_L - F_I * dth_L


def transversality(I: float, theta: float, criterion: TauCriterion,
                   params: SystemParams, tol_bracket: float = 1e-6,
                   tol: Tolerances = DEFAULT_TOL) -> TransversalityReport:
    b = poisson_bracket(I, theta, criterion, params, tol)
    verdict = "tangent-line" if abs(b) < tol_bracket else "transversal"
    return TransversalityReport(I=I, theta=theta % TWO_PI, bracket=b,
                                verdict=verdict)


# ----------------------------------------------------------------------
# pseudo-orbit data model
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ScatterLeg:
    src: ScatteringState
    dst: ScatteringState
    level: float          # L* at src
    residual: float       # |L*(dst) - L*(src)|
    tau_star: float
    branch_k: int


@dataclass(frozen=True)
class InnerLeg:
    src: InnerState
    dst: InnerState
    duration: float
    n_periods: int
    sections: np.ndarray  # rows (t, I, phi), phi unwrapped


@dataclass(frozen=True)
class DiffusionPolicy:
    """Tunable margins of the construction (not of the underlying maps)."""

    delta: float = 0.05              # rho = pi + delta
    margin_coeff: float = 10.0       # window margin = max(coeff*eps^2, floor)
    margin_floor: float = 0.01
    level_coeff: float = 10.0        # per-leg |dL*| budget, in eps^2 units
    arc_rtol: float = 1e-12
    arc_atol: float = 1e-12
    t_max_factor: float = 1e3        # inner-return budget t_max = factor/eps
    max_legs: int = 500_000
    max_stall_arcs: int = 80
    reint_budget: float = 1e-8       # verification: arc re-integration
    f_level_coeff: float = 60.0      # advisory resonance F-drift scale

    def margin(self, eps: float) -> float:
        return max(self.margin_coeff * eps * eps, self.margin_floor)


@dataclass
class PseudoOrbit:
    legs: list
    I_start: float
    I_end: float
    params: SystemParams            # canonical frame (a1, a2 > 0)
    original_params: SystemParams
    frame_phi_shift: float
    frame_s_shift: float
    policy: DiffusionPolicy

    @property
    def n_scatter(self) -> int:
        return sum(1 for leg in self.legs if isinstance(leg, ScatterLeg))

    @property
    def n_inner(self) -> int:
        return sum(1 for leg in self.legs if isinstance(leg, InnerLeg))

    @property
    def final_I(self) -> float:
        leg = self.legs[-1]
        return leg.dst.I


@dataclass
class VerificationReport:
    ok: bool
    n_scatter: int
    n_inner: int
    max_level_residual: float
    level_budget: float
    max_reintegration_residual: float
    reintegration_budget: float
    max_endpoint_mismatch: float
    window_violations: int
    monotone_violations: int
    max_resonant_f_drift: float
    f_drift_budget: float
    resonant_brackets: list[TransversalityReport] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)


# ----------------------------------------------------------------------
# construction
# ----------------------------------------------------------------------

def _canonical_frame(params: SystemParams) -> tuple[SystemParams, float, float]:
    """Conjugate negative amplitudes away.

    (phi, s) -> (phi + pi, s + pi) flips the sign of a1 and fixes a2;
    (phi, s) -> (phi, s + pi) flips a2.  Both conjugate the full flow, so a
    run built with |a1|, |a2| maps back to the original system by the
    inverse shifts (recorded on the orbit).
    """
    phi_shift = 0.0
    s_shift = 0.0
    a1, a2 = params.a1, params.a2
    if a1 < 0.0:
        a1 = -a1
        phi_shift += math.pi
        s_shift += math.pi
    if a2 < 0.0:
        a2 = -a2
        s_shift += math.pi
    return replace(params, a1=a1, a2=a2), phi_shift, s_shift


def _theta_plus_safe(I: float, params: SystemParams,
                     tol: Tolerances) -> float:
    try:
        return theta_plus(I, params, tol)
    except SingularCrest:
        return min(theta_plus(I - 10.0 * tol.tol_cls, params, tol),
                   theta_plus(I + 10.0 * tol.tol_cls, params, tol))


def build_pseudo_orbit(I_start: float, I_end: float, params: SystemParams,
                       policy: DiffusionPolicy | None = None,
                       theta0: float | None = None,
                       tol: Tolerances = DEFAULT_TOL) -> PseudoOrbit:
    """Construct a drift pseudo-orbit carrying I from I_start up to I_end.

    Jump legs use the odd-branch criterion, which increases I strictly for
    theta in (pi, theta_plus(I)) when both amplitudes are positive;
    negative amplitudes are handled by a conjugating angle shift (see
    ``PseudoOrbit.frame_phi_shift`` / ``frame_s_shift``).  Inner legs
    integrate whole forcing periods and accept the first stroboscopic
    section landing inside the window.
    """
    params.require_nontrivial()
    if params.r != 1.0:
        raise ConfigError("pseudo-orbit windows are implemented for r = 1")
    if I_end <= I_start:
        raise ConfigError("need I_end > I_start")
    policy = policy or DiffusionPolicy()
    canon, phi_shift, s_shift = _canonical_frame(params)
    eps = canon.eps
    rho = math.pi + policy.delta
    margin = policy.margin(eps)
    level_cap = 0.9 * policy.level_coeff * eps * eps
    n_max_periods = max(4, int(policy.t_max_factor / eps / TWO_PI))

    def window(I: float) -> tuple[float, float]:
        thp = _theta_plus_safe(I, canon, tol)
        if thp - rho <= 2.5 * margin:
            raise WindowEmpty(
                f"drift window (rho, theta_plus) too small at I = {I}: "
                f"({rho:.6f}, {thp:.6f})")
        return rho + margin, thp - margin

    def probe_step(I: float, th: float):
        """Next jump from (I, th), or None if it breaks a construction rule.

        Rules: transversal contact, positive drift, and per-leg level
        residual inside the budget (the drift curvature grows near the
        tangency wedge; the construction stays in low-residual corridors).
        """
        res = K.lstar_kernel(I, th, canon.r, canon.a1, canon.a2,
                             K.CRIT_BRANCH, 1, 64, tol.tol_cls, tol.tie_tol)
        status, tau, kb, margin_t, _, _, L0, dth_L, dI_L = res
        if status != K.TAU_OK or margin_t < tol.tol_degen or dth_L <= 0.0:
            return None
        I_new = I + eps * dth_L
        th_new = (th - eps * dI_L) % TWO_PI
        res1 = K.lstar_kernel(I_new, th_new, canon.r, canon.a1, canon.a2,
                              K.CRIT_BRANCH, 1, 64, tol.tol_cls, tol.tie_tol)
        if res1[0] != K.TAU_OK:
            return None
        L1 = res1[6]
        if abs(L1 - L0) > level_cap:
            return None
        return I_new, th_new, L0, abs(L1 - L0), tau, kb

    I = I_start
    lo, hi = window(I)
    th = theta0 % TWO_PI if theta0 is not None else 0.5 * (lo + hi)
    if not (lo < th < hi):
        th = 0.5 * (lo + hi)
    legs: list = []
    stall_arcs = 0

    while I < I_end:
        if len(legs) >= policy.max_legs:
            raise StuckAtResonance(
                f"leg budget {policy.max_legs} exhausted at I = {I:.6f}")
        # --- jump run: follow one level of L* while inside the window
        progressed = False
        while I < I_end:
            lo, hi = window(I)
            if not (lo < th < hi):
                break
            nxt = probe_step(I, th)
            if nxt is None:
                break  # reroute around tangency / high-curvature spots
            I_new, th_new, L0, resid, tau, kb = nxt
            legs.append(ScatterLeg(
                src=ScatteringState(I, th), dst=ScatteringState(I_new, th_new),
                level=L0, residual=resid, tau_star=tau, branch_k=kb))
            I, th = I_new, th_new
            progressed = True
        if I >= I_end:
            break
        if progressed:
            stall_arcs = 0
        else:
            stall_arcs += 1
            if stall_arcs > policy.max_stall_arcs:
                raise StuckAtResonance(
                    f"no jump progress after {stall_arcs} consecutive inner "
                    f"arcs near I = {I:.6f}")
        # --- inner arc: integrate whole periods until a section re-enters
        src = InnerState(I=I, phi=th, s=0.0)
        sections = np.empty((n_max_periods, 3))
        Icur, phicur = I, th
        t = 0.0
        hit = -1
        for n in range(n_max_periods):
            Icur, phicur, _, _, status = integrate_inner(
                Icur, phicur, 0.0, 0.0, t, t + TWO_PI, canon.eps, canon.a1,
                canon.a2, canon.r, policy.arc_rtol, policy.arc_atol)
            if status != ODE_OK:
                raise StuckAtResonance(
                    f"inner integrator step collapse at I = {Icur:.6f}")
            t += TWO_PI
            sections[n, 0] = t
            sections[n, 1] = Icur
            sections[n, 2] = phicur
            th_n = phicur % TWO_PI
            try:
                lo, hi = window(Icur)
            except WindowEmpty:
                continue
            if lo < th_n < hi and probe_step(Icur, th_n) is not None:
                hit = n
                break
        if hit < 0:
            raise StuckAtResonance(
                f"no stroboscopic return into the window within "
                f"{n_max_periods} periods from I = {I:.6f}")
        dst = InnerState(I=Icur, phi=phicur, s=t)
        legs.append(InnerLeg(src=src, dst=dst, duration=t,
                             n_periods=hit + 1,
                             sections=sections[:hit + 1].copy()))
        I, th = Icur, phicur % TWO_PI

    return PseudoOrbit(legs=legs, I_start=I_start, I_end=I_end, params=canon,
                       original_params=params, frame_phi_shift=phi_shift,
                       frame_s_shift=s_shift, policy=policy)


# ----------------------------------------------------------------------
# verification
# ----------------------------------------------------------------------

def verify_pseudo_orbit(orbit: PseudoOrbit,
                        tol: Tolerances = DEFAULT_TOL) -> VerificationReport:
    """Recompute every invariant of the orbit independently.

    Jump legs: fresh tau* solve and step at the stored source, level values
    at both ends, window containment, per-leg monotone I.  Inner legs:
    re-integration at a tighter tolerance against the stored endpoint and
    (inside resonance bands) drift of the band invariant.  Transversality
    brackets are sampled at resonance-band jump points.
    """
    p = orbit.params
    eps = p.eps
    policy = orbit.policy
    rho = math.pi + policy.delta
    level_budget = policy.level_coeff * eps * eps
    failures: list[str] = []
    max_level = 0.0
    max_reint = 0.0
    max_mismatch = 0.0
    window_violations = 0
    monotone_violations = 0
    max_f_drift = 0.0
    f_budget = 0.0
    brackets: list[TransversalityReport] = []
    crit = branch(1)
    prev_dst = None

    for idx, leg in enumerate(orbit.legs):
        if isinstance(leg, ScatterLeg):
            if prev_dst is not None and leg.src != prev_dst:
                failures.append(f"leg {idx}: endpoint chain broken")
            prev_dst = leg.dst
            try:
                L0 = reduced_poincare(leg.src.I, leg.src.theta, crit, p, tol)
                L1 = reduced_poincare(leg.dst.I, leg.dst.theta, crit, p, tol)
                dI_L, dth_L = grad_reduced_poincare(
                    leg.src.I, leg.src.theta, crit, p, tol)
            except (SingularCrest, UnreachableBranch,
                    TangencyDegenerate) as exc:
                failures.append(f"leg {idx}: re-solve failed: {exc}")
                continue
            lev = abs(L1 - L0)
            max_level = max(max_level, lev)
            if lev > level_budget:
                failures.append(
                    f"leg {idx}: level residual {lev:.3e} > {level_budget:.3e}")
            I_re = leg.src.I + eps * dth_L
            th_re = (leg.src.theta - eps * dI_L) % TWO_PI
            mism = max(abs(I_re - leg.dst.I),
                       abs((th_re - leg.dst.theta + math.pi) % TWO_PI
                           - math.pi))
            max_mismatch = max(max_mismatch, mism)
            if mism > 1e-10:
                failures.append(f"leg {idx}: step mismatch {mism:.3e}")
            thp = _theta_plus_safe(leg.src.I, p, tol)
            if not (rho <= leg.src.theta <= thp):
                window_violations += 1
                failures.append(
                    f"leg {idx}: source theta {leg.src.theta:.6f} outside "
                    f"({rho:.6f}, {thp:.6f})")
            if leg.dst.I <= leg.src.I:
                monotone_violations += 1
                failures.append(f"leg {idx}: action did not increase")
            if region_of(leg.src.I, p) is not TorusRegion.NONRES:
                brackets.append(transversality(leg.src.I, leg.src.theta,
                                               crit, p, tol=tol))
        else:
            if prev_dst is not None:
                if (abs(leg.src.I - prev_dst.I) > 0.0
                        or abs(leg.src.phi % TWO_PI - prev_dst.theta) > 1e-15):
                    failures.append(f"leg {idx}: endpoint chain broken")
            prev_dst = ScatteringState(leg.dst.I, leg.dst.phi % TWO_PI)
            Iv, phv, _, _, status = integrate_inner(
                leg.src.I, leg.src.phi, 0.0, leg.src.s, 0.0, leg.duration,
                p.eps, p.a1, p.a2, p.r, 0.1 * policy.arc_rtol,
                0.1 * policy.arc_atol)
            if status != ODE_OK:
                failures.append(f"leg {idx}: verification re-integration "
                                f"failed")
                continue
            reint = max(abs(Iv - leg.dst.I), abs(phv - leg.dst.phi))
            max_reint = max(max_reint, reint)
            if reint > policy.reint_budget:
                failures.append(
                    f"leg {idx}: re-integration residual {reint:.3e} > "
                    f"{policy.reint_budget:.3e}")
            reg = region_of(leg.src.I, p)
            if reg is not TorusRegion.NONRES and region_of(leg.dst.I, p) is reg:
                f0 = torus_value(leg.src, p)
                f1 = torus_value(leg.dst, p)
                drift = abs(f1 - f0)
                amp = max(abs(leg.src.I), abs(leg.dst.I),
                          abs(leg.src.I - 1.0 / p.r),
                          abs(leg.dst.I - 1.0 / p.r))
                budget = (policy.f_level_coeff * leg.n_periods
                          * (eps * eps + eps * amp * amp))
                f_budget = max(f_budget, budget)
                if drift > max_f_drift:
                    max_f_drift = drift
                if drift > budget:
                    failures.append(
                        f"leg {idx}: resonance invariant drift {drift:.3e} "
                        f"> {budget:.3e}")

    ok = not failures
    return VerificationReport(
        ok=ok, n_scatter=orbit.n_scatter, n_inner=orbit.n_inner,
        max_level_residual=max_level, level_budget=level_budget,
        max_reintegration_residual=max_reint,
        reintegration_budget=policy.reint_budget,
        max_endpoint_mismatch=max_mismatch,
        window_violations=window_violations,
        monotone_violations=monotone_violations,
        max_resonant_f_drift=max_f_drift, f_drift_budget=f_budget,
        resonant_brackets=brackets, failures=failures)
