"""Homoclinic jump maps of the forced pendulum-rotor system.

The splitting (Melnikov) potential of the system is

    L(I, phi, s) = A1(I) cos(phi) + A2(I) cos(r phi - s),

and its critical points along connection lines select homoclinic orbits.
Given the co-moving angle theta = phi - I s, the critical time tau* solves

    c sin(theta - I tau) + sin(r theta - (rI - 1) tau) = 0,
    c = mu * alpha_r(I),

geometrically the first contact of a line of slope (rI-1)/I launched from
(theta, r theta) with the ridge set of L.  Different contact-selection
criteria (marching down/up, minimal |tau|, or a fixed unwrapped ridge
branch) produce different jump maps.  To first order in eps the jump map is
the eps-time flow of -L*(I, theta), so its iterates follow level curves of
the reduced function

    L*(I, theta) = A1(I) cos(theta - I tau*) + A2(I) cos(r theta - (rI-1) tau*).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from . import _kernels as K
from .crests import CrestBranch, CrestKind, classify
from .errors import (ConfigError, OnDiscontinuity, QuadratureNotConverged,
                     SingularCrest, TangencyDegenerate, UnreachableBranch)
from .params import DEFAULT_TOL, SystemParams, Tolerances

TWO_PI = 2.0 * math.pi

NS_BASE = 64  # base sample count per ridge strip in the tau* scan


# ----------------------------------------------------------------------
# criteria and result types
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class TauCriterion:
    """Contact selection rule for tau*.

    kind 'down'/'up': first crossing of the even (M) ridge family marching
    with sigma decreasing/increasing; 'minabs': nearest crossing of any
    branch; 'branch': crossing of the fixed unwrapped branch ``k``.
    """

    kind: str
    k: int = 0

    def __post_init__(self):
        if self.kind not in ("down", "up", "minabs", "branch"):
            raise ConfigError(f"unknown criterion kind {self.kind!r}")

    @property
    def code(self) -> int:
        return {"down": K.CRIT_DOWN, "up": K.CRIT_UP,
                "minabs": K.CRIT_MINABS, "branch": K.CRIT_BRANCH}[self.kind]

    @classmethod
    def parse(cls, text: str) -> "TauCriterion":
        text = text.strip().lower()
        if text in ("down", "up", "minabs"):
            return cls(text)
        if text.startswith("branch=") or text.startswith("branch:"):
            return cls("branch", int(text[7:]))
        raise ConfigError(f"cannot parse criterion {text!r}")

    def __str__(self) -> str:
        return self.kind if self.kind != "branch" else f"branch={self.k}"


DOWN = TauCriterion("down")
UP = TauCriterion("up")
MINABS = TauCriterion("minabs")


def branch(k: int) -> TauCriterion:
    return TauCriterion("branch", k)


@dataclass(frozen=True)
class TauSolution:
    I: float
    theta: float
    tau_star: float
    branch_hit: CrestBranch
    phi_star: float
    sigma_star: float
    margin: float
    degenerate: bool
    criterion: TauCriterion


@dataclass(frozen=True)
class ScatteringState:
    I: float
    theta: float

    def normalized(self) -> "ScatteringState":
        return ScatteringState(self.I, self.theta % TWO_PI)


@dataclass(frozen=True)
class PiecewiseMapAtlas:
    """theta-partition of the minimal-|tau| global map into smooth pieces."""

    regions: tuple[tuple[float, float, str, int], ...] = (
        (0.0, math.pi / 2.0, "I", 0),
        (math.pi / 2.0, 3.0 * math.pi / 2.0, "II", 1),
        (3.0 * math.pi / 2.0, TWO_PI, "III", 2),
    )
    discontinuities: tuple[float, ...] = (math.pi / 2.0, 3.0 * math.pi / 2.0)

    def region_of(self, theta: float) -> tuple[str, int]:
        th = theta % TWO_PI
        for lo, hi, name, k in self.regions:
            if lo <= th < hi:
                return name, k
        return "III", 2


ATLAS = PiecewiseMapAtlas()


# ----------------------------------------------------------------------
# splitting potential: closed form and quadrature oracle
# ----------------------------------------------------------------------

def melnikov_closed(I: float, phi: float, s: float,
                    params: SystemParams) -> float:
    """A1(I) cos(phi) + A2(I) cos(r phi - s)."""
    return (K.amp1(I, params.a1) * math.cos(phi)
            + K.amp2(I, params.a2, params.r) * math.cos(params.r * phi - s))


def melnikov_quadrature(I: float, phi: float, s: float, params: SystemParams,
                        tol: Tolerances = DEFAULT_TOL) -> float:
    """Adaptive quadrature of the splitting integral; sign-convention oracle.

    Integrates 2 sech(x)^2 * g(phi + I x, s + x) over the real line,
    truncated where the envelope falls below 1e-16.  The overall sign is
    fixed so that the first-harmonic coefficient at I = 0 is +4*a1, matching
    the closed form (the pendulum factor cos(q0) - 1 = -2 sech^2 enters the
    geometric derivation with a compensating orientation sign).
    """
    a1, a2, r = params.a1, params.a2, params.r
    # envelope 2 sech^2 L < 1e-16  =>  L ~ 19.5
    L = 20.0

    def integrand(x: float) -> float:
        sech = 1.0 / math.cosh(x)
        ph = phi + I * x
        return 2.0 * sech * sech * (a1 * math.cos(ph)
                                    + a2 * math.cos(r * ph - (s + x)))

    val, abserr = quad(integrand, -L, L, epsabs=tol.tol_quad,
                       epsrel=1e-12, limit=400)
    if abserr > 100.0 * tol.tol_quad + 1e-13 * abs(val):
        raise QuadratureNotConverged(
            f"quadrature error estimate {abserr:.3g} exceeds target "
            f"{tol.tol_quad:.3g} at (I, phi, s) = ({I}, {phi}, {s})")
    return val


# ----------------------------------------------------------------------
# tau* and the reduced function
# ----------------------------------------------------------------------

def _raise_for_status(status: int, I: float, theta: float,
                      criterion: TauCriterion) -> None:
    if status == K.TAU_SINGULAR:
        raise SingularCrest(
            f"|mu*alpha(I)| within tolerance of 1 at I = {I}")
    if status == K.TAU_UNREACHABLE:
        raise UnreachableBranch(
            f"criterion {criterion} finds no ridge crossing within the tau "
            f"window at (I, theta) = ({I}, {theta})")


def solve_tau_star(I: float, theta: float, criterion: TauCriterion,
                   params: SystemParams,
                   tol: Tolerances = DEFAULT_TOL) -> TauSolution:
    """Contact time tau* of the connection line with the selected ridge.

    theta is reduced mod 2*pi before solving.  Near-tangent contacts (ridge
    transversality below ``tol.tol_degen``) are returned with
    ``degenerate=True``; map evaluations refuse them.
    """
    th = theta % TWO_PI
    c = K.crest_coef(I, params.a1, params.a2, params.r)
    status, tau, kband, margin, phis, sigs = K.tau_star_kernel(
        I, th, params.r, c, criterion.code, criterion.k, NS_BASE,
        tol.tol_cls, tol.tie_tol)
    _raise_for_status(status, I, th, criterion)
    kind = CrestKind.HORIZONTAL if abs(c) < 1.0 else CrestKind.VERTICAL
    return TauSolution(
        I=I, theta=th, tau_star=tau,
        branch_hit=CrestBranch(k=int(kband), kind=kind, I=I),
        phi_star=phis, sigma_star=sigs, margin=margin,
        degenerate=margin < tol.tol_degen, criterion=criterion)


def _lstar_raw(I: float, theta: float, criterion: TauCriterion,
               params: SystemParams, tol: Tolerances):
    th = theta % TWO_PI
    res = K.lstar_kernel(I, th, params.r, params.a1, params.a2,
                         criterion.code, criterion.k, NS_BASE, tol.tol_cls,
                         tol.tie_tol)
    status = res[0]
    _raise_for_status(status, I, th, criterion)
    return res


def reduced_poincare(I: float, theta: float, criterion: TauCriterion,
                     params: SystemParams,
                     tol: Tolerances = DEFAULT_TOL) -> float:
    """L*(I, theta): the splitting potential at the selected contact."""
    res = _lstar_raw(I, theta, criterion, params, tol)
    return res[6]


def grad_reduced_poincare(I: float, theta: float, criterion: TauCriterion,
                          params: SystemParams,
                          tol: Tolerances = DEFAULT_TOL) -> tuple[float, float]:
    """(dL*/dI, dL*/dtheta) from the analytic formulas.

    dL*/dtheta = A1 sin(phi*)/(rI-1) = -A2 sin(sigma*)/I (the form with the
    larger denominator is used); dL*/dI = A1' cos(phi*) + A2' cos(sigma*)
    - tau* dL*/dtheta.  Raises :class:`TangencyDegenerate` at near-tangent
    contacts, where the contact ceases to be differentiable.
    """
    res = _lstar_raw(I, theta, criterion, params, tol)
    _, tau, _, margin, _, _, _, dth, dI = res
    if margin < tol.tol_degen:
        raise TangencyDegenerate(
            f"tau* transversality margin {margin:.3g} below tolerance at "
            f"(I, theta) = ({I}, {theta})")
    return dI, dth


def grad_theta_forms(sol: TauSolution,
                     params: SystemParams) -> tuple[float, float]:
    """Both algebraic forms of dL*/dtheta at a solved contact."""
    A1 = K.amp1(sol.I, params.a1)
    A2 = K.amp2(sol.I, params.a2, params.r)
    d = params.r * sol.I - 1.0
    f1 = A1 * math.sin(sol.phi_star) / d if d != 0.0 else math.nan
    f2 = -A2 * math.sin(sol.sigma_star) / sol.I if sol.I != 0.0 else math.nan
    return f1, f2


def scattering_step(state: ScatteringState, criterion: TauCriterion,
                    params: SystemParams,
                    tol: Tolerances = DEFAULT_TOL) -> ScatteringState:
    """One first-order jump: (I, theta) -> (I + eps dL*/dtheta, theta - eps dL*/dI).

    The discarded remainder is O(eps^2) per application, so iterates follow
    level curves of L* up to that order.  eps = 0 returns the state
    unchanged.
    """
    if params.eps == 0.0:
        return state.normalized()
    dI, dth = grad_reduced_poincare(state.I, state.theta, criterion, params,
                                    tol)
    return ScatteringState(I=state.I + params.eps * dth,
                           theta=(state.theta - params.eps * dI) % TWO_PI)


def extended_map_domain(I: float, theta: float, params: SystemParams,
                        branch_k: int | None = None,
                        tol: Tolerances = DEFAULT_TOL) -> bool:
    """Whether the horizontally-parameterized branch map extends to (I, theta).

    In the horizontal regime the branch-k map exists for every theta.  In
    the vertical regime the branch-k contact must still lie inside the
    sigma-strip of width pi around k*pi, i.e. carry |mu alpha(I) sin(phi*)|
    < 1, which is exactly where the vertical ridge behaves as a horizontal
    graph piece.  Defaults to the atlas branch of theta.
    """
    th = theta % TWO_PI
    if branch_k is None:
        _, branch_k = ATLAS.region_of(th)
    try:
        sol = solve_tau_star(I, th, branch(branch_k), params, tol)
    except (UnreachableBranch, SingularCrest):
        return False
    dev = abs(sol.sigma_star - branch_k * math.pi)
    return dev < math.pi / 2.0 - 1e-9


def piecewise_global_map(state: ScatteringState, params: SystemParams,
                         tol: Tolerances = DEFAULT_TOL
                         ) -> tuple[ScatteringState, str]:
    """Minimal-|tau*| global jump map plus its atlas region label.

    The map loses smoothness on theta = pi/2 and 3*pi/2 where the nearest
    ridge branch changes; those lines raise :class:`OnDiscontinuity`.  In
    the interior of each region the selected contact coincides with the
    region's extended branch map (checked; the branch solve is reused for
    the step so agreement is by construction).
    """
    th = state.theta % TWO_PI
    for d in ATLAS.discontinuities:
        if abs(th - d) < tol.tol_disc:
            raise OnDiscontinuity(f"theta = {th} lies on the discontinuity "
                                  f"line {d}")
    name, k = ATLAS.region_of(th)
    sol_min = solve_tau_star(state.I, th, MINABS, params, tol)
    use = branch(k) if sol_min.branch_hit.k == k else MINABS
    new_state = scattering_step(ScatteringState(state.I, th), use, params,
                                tol)
    return new_state, name


def theta_plus(I: float, params: SystemParams,
               tol: Tolerances = DEFAULT_TOL) -> float:
    """Upper end theta_plus(I) of the window (pi, theta_plus) where the
    odd-branch jump map increases I (positive amplitudes).

    Closed forms, by crest regime at I:
      horizontal: 3pi/2 for I <= 0 and I >= 3/2, (2-I)pi on (0,1), pi*I on
      (1, 3/2);  vertical: 3pi/2 for I <= -1/2 and I > 1, (1-I)pi on
      (-1/2, 0), (1+I)pi on (0, 1].
    """
    if params.r != 1.0:
        raise ConfigError("theta_plus closed forms are derived for r = 1")
    if params.a1 <= 0.0 or params.a2 <= 0.0:
        raise ConfigError("theta_plus requires a1, a2 > 0")
    kind = classify(I, params, tol)
    if kind is CrestKind.SINGULAR:
        raise SingularCrest(f"singular crest regime at I = {I}")
    return K.theta_plus_kernel(I, kind is CrestKind.HORIZONTAL)
