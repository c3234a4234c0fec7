"""Inner dynamics on the invariant cylinder p = q = 0.

The restriction of the Hamiltonian to the cylinder is

    K(I, phi, s) = I^2/2 + eps (a1 cos(phi) + a2 cos(r phi - s)),
    phi' = I,  s' = 1,  I' = eps (a1 sin(phi) + r a2 sin(r phi - s)),

with first-order resonances at I = 0 and I = 1/r.  Inside bands of
half-width ``resonance_half_width`` around them the motion is
pendulum-like and approximately conserves

    F0 = I^2/2 + eps a1 cos(phi)              (around I = 0),
    F1 = (I - 1/r)^2/2 + eps a2 cos(r phi - s) (around I = 1/r),

while outside it approximately conserves Fnr = I^2/2.  The O(eps^2)
corrections to these profiles are truncated.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._ode import ODE_OK, integrate_inner
from .errors import StepFailure
from .params import DEFAULT_TOL, SystemParams, Tolerances

TWO_PI = 2.0 * math.pi

#: Half-width of the resonance bands in I.  Comfortably contains the
#: O(sqrt(eps)) pendulum zones for eps <= 0.05 while keeping the two bands
#: disjoint for r >= 1/2.
RESONANCE_HALF_WIDTH = 0.25


class TorusRegion(enum.Enum):
    RES0 = "res0"
    RES1 = "res1"
    NONRES = "nonres"


@dataclass(frozen=True)
class InnerState:
    I: float
    phi: float
    s: float


def restricted_hamiltonian(state: InnerState, params: SystemParams) -> float:
    return (0.5 * state.I * state.I
            + params.eps * (params.a1 * math.cos(state.phi)
                            + params.a2 * math.cos(params.r * state.phi
                                                   - state.s)))


def region_of(I: float, params: SystemParams,
              half_width: float = RESONANCE_HALF_WIDTH) -> TorusRegion:
    """Which resonance band (if any) the action I falls in."""
    if abs(I) <= half_width:
        return TorusRegion.RES0
    if abs(I - 1.0 / params.r) <= half_width:
        return TorusRegion.RES1
    return TorusRegion.NONRES


def torus_value(state: InnerState, params: SystemParams,
                half_width: float = RESONANCE_HALF_WIDTH) -> float:
    """Truncated first-order invariant for the region of state.I."""
    region = region_of(state.I, params, half_width)
    if region is TorusRegion.RES0:
        return 0.5 * state.I ** 2 + params.eps * params.a1 * math.cos(state.phi)
    if region is TorusRegion.RES1:
        dI = state.I - 1.0 / params.r
        return (0.5 * dI * dI
                + params.eps * params.a2 * math.cos(params.r * state.phi
                                                    - state.s))
    return 0.5 * state.I ** 2


def resonance_half_width_pendulum(params: SystemParams,
                                  which: TorusRegion = TorusRegion.RES0
                                  ) -> float:
    """Separatrix half-width in I of the resonant pendulum, 2 sqrt(eps a)."""
    a = abs(params.a1) if which is TorusRegion.RES0 else abs(params.a2)
    return 2.0 * math.sqrt(params.eps * a)


def inner_flow(state: InnerState, t: float, params: SystemParams,
               tol: Tolerances = DEFAULT_TOL) -> InnerState:
    """Flow the inner equations for time t (exact in the eps = 0 limit)."""
    I, phi, _, status = _advance(state, t, params, tol.tol_ode)
    if status != ODE_OK:
        raise StepFailure(f"step size collapsed near t = {t}")
    return InnerState(I=I, phi=phi, s=state.s + t)


def energy_balance_residual(state: InnerState, t: float,
                            params: SystemParams,
                            tol: Tolerances = DEFAULT_TOL) -> float:
    """|K(end) - K(start) - int dK/ds dt| along the trajectory.

    The time-dependent energy balance dK/dt = eps a2 sin(r phi - s) is
    integrated alongside the flow; the residual measures integrator
    consistency.
    """
    I, phi, bal, status = _advance(state, t, params, tol.tol_ode)
    if status != ODE_OK:
        raise StepFailure(f"step size collapsed near t = {t}")
    end = InnerState(I=I, phi=phi, s=state.s + t)
    return abs(restricted_hamiltonian(end, params)
               - restricted_hamiltonian(state, params) - bal)


def _advance(state: InnerState, t: float, params: SystemParams,
             tol_ode: float) -> tuple[float, float, float, int]:
    I, phi, bal, _, status = integrate_inner(
        state.I, state.phi, 0.0, state.s, 0.0, t, params.eps, params.a1,
        params.a2, params.r, tol_ode, tol_ode)
    return I, phi, bal, status


def stroboscopic_sections(state: InnerState, n_periods: int,
                          params: SystemParams,
                          tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """States at the next ``n_periods`` sections s = s0 + 2*pi*n.

    Returns an array of rows (t, I, phi); phi is unwrapped.
    """
    out = np.empty((n_periods, 3))
    I, phi = state.I, state.phi
    t = 0.0
    for n in range(n_periods):
        I, phi, _, _, status = integrate_inner(
            I, phi, 0.0, state.s, t, t + TWO_PI, params.eps, params.a1,
            params.a2, params.r, tol.tol_ode, tol.tol_ode)
        if status != ODE_OK:
            raise StepFailure(f"step size collapsed in period {n}")
        t += TWO_PI
        out[n, 0] = t
        out[n, 1] = I
        out[n, 2] = phi
    return out
