"""Self-check suite: closed forms against oracles, symmetries, sign laws.

Each check returns a :class:`CheckResult`; :func:`run_suite` bundles them
into a machine-readable report used by ``pendrotor verify``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels as K
from .crests import find_thresholds
from .errors import PendrotorError
from .oracles import brute_tau_scan
from .params import DEFAULT_TOL, SystemParams, Tolerances
from .scattering import (MINABS, DOWN, UP, TauCriterion, branch,
                         melnikov_closed, melnikov_quadrature, solve_tau_star,
                         theta_plus)

TWO_PI = 2.0 * math.pi


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float
    tol: float
    n: int
    note: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


def melnikov_check(params: SystemParams, n: int = 100, seed: int = 0,
                   tol_cmp: float = 1e-8, tol: Tolerances = DEFAULT_TOL,
                   corrupt: str | None = None) -> CheckResult:
    """Closed-form splitting potential against the adaptive quadrature.

    ``corrupt='a2-sign'`` flips the sign of the second amplitude in the
    closed form only, a constructed fault that the check must flag.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    closed_params = params
    if corrupt == "a2-sign":
        from dataclasses import replace
        closed_params = replace(params, a2=-params.a2)
    elif corrupt is not None:
        raise ValueError(f"unknown fault {corrupt!r}")
    for _ in range(n):
        I = rng.uniform(-3.0, 3.0)
        phi = rng.uniform(0.0, TWO_PI)
        s = rng.uniform(0.0, TWO_PI)
        diff = abs(melnikov_closed(I, phi, s, closed_params)
                   - melnikov_quadrature(I, phi, s, params, tol))
        worst = max(worst, diff)
    return CheckResult("melnikov_closed_vs_quadrature", worst <= tol_cmp,
                       worst, tol_cmp, n)


def _sample_criterion(rng) -> TauCriterion:
    i = rng.integers(0, 6)
    if i == 0:
        return DOWN
    if i == 1:
        return UP
    if i == 2:
        return MINABS
    return branch(int(i) - 3)  # branches 0, 1, 2


def tau_oracle_check(params: SystemParams, n: int = 200, seed: int = 0,
                     tol_cmp: float = 1e-6, h: float = 1e-5,
                     tol: Tolerances = DEFAULT_TOL) -> CheckResult:
    """Production tau* solver against the uniform fine-grid ray scan."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    used = 0
    while used < n:
        I = rng.uniform(-3.0, 3.0)
        if min(abs(I), abs(params.r * I - 1.0)) < 0.05:
            continue
        c = abs(K.crest_coef(I, params.a1, params.a2, params.r))
        if abs(c - 1.0) < 1e-3:
            continue
        theta = rng.uniform(0.0, TWO_PI)
        crit = _sample_criterion(rng)
        try:
            sol = solve_tau_star(I, theta, crit, params, tol)
        except PendrotorError:
            continue
        if sol.degenerate or sol.margin < 1e-3:
            continue
        ref = brute_tau_scan(I, theta, crit, params, h=h, tol=tol)
        worst = max(worst, abs(sol.tau_star - ref))
        used += 1
    return CheckResult("tau_star_vs_ray_scan", worst <= tol_cmp, worst,
                       tol_cmp, used)


def lemma_symmetry_check(params: SystemParams, n_I: int = 60, n_th: int = 60,
                         tol_cmp: float = 1e-8,
                         I_range: tuple[float, float] = (-2.0, 2.0),
                         margin_mask: float = 1e-3,
                         tol: Tolerances = DEFAULT_TOL) -> CheckResult:
    """dL0*/dtheta(I, theta) = -dL2*/dtheta(I, 2pi - theta) on a masked grid.

    The reflection through (pi, pi) exchanges the even ridge branches 0 and
    2 and reverses the ray parameter, so the two down/up reduced functions
    are exact mirror images wherever both contacts are clean; points with a
    transversality margin below ``margin_mask`` (tangency-affected) or with
    failed solves are masked.
    """
    Is = np.linspace(I_range[0], I_range[1], n_I)
    ths = np.linspace(1e-3, TWO_PI - 1e-3, n_th)
    worst = 0.0
    used = 0
    for I in Is:
        if min(abs(I), abs(params.r * I - 1.0)) < 0.02:
            continue
        c = abs(K.crest_coef(I, params.a1, params.a2, params.r))
        if abs(c - 1.0) < 1e-6:
            continue
        for th in ths:
            r0 = K.lstar_kernel(I, th, params.r, params.a1, params.a2,
                                K.CRIT_BRANCH, 0, 64, tol.tol_cls,
                                tol.tie_tol)
            r2 = K.lstar_kernel(I, TWO_PI - th, params.r, params.a1,
                                params.a2, K.CRIT_BRANCH, 2, 64, tol.tol_cls,
                                tol.tie_tol)
            if r0[0] != K.TAU_OK or r2[0] != K.TAU_OK:
                continue
            if r0[3] < margin_mask or r2[3] < margin_mask:
                continue
            worst = max(worst, abs(r0[7] + r2[7]))
            used += 1
    return CheckResult("down_up_reflection_symmetry", worst <= tol_cmp,
                       worst, tol_cmp, used)


def drift_sign_check(params: SystemParams, n_I: int = 41, n_th: int = 25,
                     I_range: tuple[float, float] = (-2.0, 2.0),
                     exclude: float = 0.02,
                     tol: Tolerances = DEFAULT_TOL) -> CheckResult:
    """Odd-branch map increases I throughout theta in (pi, theta_plus(I)).

    Sampled away from the resonant actions {0, 1} and the crest-regime
    switches, where theta_plus changes its closed form.
    """
    report = find_thresholds(params)
    switches = list(report.alpha_thresholds) + [0.0, 1.0]
    Is = np.linspace(I_range[0], I_range[1], n_I)
    worst = math.inf
    used = 0
    bad = 0
    for I in Is:
        if any(abs(I - s) < exclude for s in switches):
            continue
        thp = theta_plus(I, params, tol)
        ths = np.linspace(math.pi + 1e-3, thp - 1e-3, n_th)
        for th in ths:
            res = K.lstar_kernel(I, th, params.r, params.a1, params.a2,
                                 K.CRIT_BRANCH, 1, 64, tol.tol_cls,
                                 tol.tie_tol)
            if res[0] != K.TAU_OK:
                bad += 1
                continue
            worst = min(worst, res[7])
            used += 1
            if res[7] <= 0.0:
                bad += 1
    return CheckResult("positive_drift_window", bad == 0 and worst > 0.0,
                       worst, 0.0, used,
                       note="worst = min dL*/dtheta over the window")


def run_suite(params: SystemParams, n_melnikov: int = 60, n_tau: int = 150,
              seed: int = 0, tol_melnikov: float = 1e-8,
              tol_tau: float = 1e-6, tol_lemma: float = 1e-8,
              tol: Tolerances = DEFAULT_TOL,
              corrupt: str | None = None) -> list[CheckResult]:
    return [
        melnikov_check(params, n=n_melnikov, seed=seed, tol_cmp=tol_melnikov,
                       tol=tol, corrupt=corrupt),
        tau_oracle_check(params, n=n_tau, seed=seed, tol_cmp=tol_tau,
                         tol=tol),
        lemma_symmetry_check(params, tol_cmp=tol_lemma, tol=tol),
        drift_sign_check(params, tol=tol),
    ]
