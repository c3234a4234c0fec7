"""Scalar hot kernels (numba-compiled unless PENDROTOR_NO_NUMBA is set).

Everything here works on plain floats/ints so the same source runs compiled
or uncompiled.  Geometry conventions, used throughout:

* reduced angles (phi, sigma) with sigma = r*phi - s;
* a connection line launched from the point (theta, r*theta) moves as
  phi(tau) = theta - I*tau,  sigma(tau) = r*theta - (r*I - 1)*tau;
* the ridge set of the splitting potential ("crest") is
  c*sin(phi) + sin(sigma) = 0 with c = mu*alpha_r(I);
* for |c| < 1 the ridge decomposes into graphs over phi located in
  sigma-strips of width pi around k*pi ("horizontal", index k); for |c| > 1
  into graphs over sigma in phi-strips around k*pi ("vertical").  Even k is
  the family through (0, 0), odd k the family through (pi, pi).
"""

from __future__ import annotations

import math

from ._jit import jitted

# status codes returned by the tau* solver
TAU_OK = 0
TAU_SINGULAR = 1
TAU_UNREACHABLE = 2

# criterion codes
CRIT_DOWN = 0
CRIT_UP = 1
CRIT_MINABS = 2
CRIT_BRANCH = 3

PI = math.pi


# ----------------------------------------------------------------------
# stable special-function cores
# ----------------------------------------------------------------------

@jitted
def h_ratio_fn(x: float) -> float:
    """x / sinh(x), extended by 1 at x = 0.  Even, positive, decays ~2|x|e^-|x|."""
    ax = abs(x)
    if ax < 1e-8:
        return 1.0 - x * x / 6.0
    if ax <= 350.0:
        return x / math.sinh(x)
    return 2.0 * ax * math.exp(-ax)


@jitted
def h_ratio_prime(x: float) -> float:
    """Derivative of x/sinh(x).  Odd; series near 0 avoids cancellation."""
    ax = abs(x)
    if ax < 0.1:
        x2 = x * x
        return x * (-1.0 / 3.0 + x2 * (7.0 / 90.0 + x2 * (-31.0 / 2520.0
                    + x2 * (127.0 / 75600.0))))
    if ax <= 350.0:
        sh = math.sinh(x)
        return (sh - x * math.cosh(x)) / (sh * sh)
    v = 2.0 * ax * math.exp(-ax)
    return -v if x > 0.0 else v


@jitted
def sinh_quot(u: float, v: float) -> float:
    """sinh(u)/sinh(v), overflow-safe for large same-scale arguments."""
    au = abs(u)
    av = abs(v)
    if au < 300.0 and av < 300.0:
        return math.sinh(u) / math.sinh(v)
    s = 1.0
    if u < 0.0:
        s = -s
    if v < 0.0:
        s = -s
    return s * math.exp(au - av) * (1.0 - math.exp(-2.0 * au)) / (1.0 - math.exp(-2.0 * av))


@jitted
def alpha_r_raw(I: float, r: float) -> float:
    """I^2 sinh(pi(rI-1)/2) / ((rI-1)^2 sinh(pi I/2)); +/-inf at I = 1/r.

    Evaluated as (I/(rI-1)) * h(pi I/2)/h(pi(rI-1)/2) so the removable zero
    at I = 0 is exact and large |I| stays finite.
    """
    u = 0.5 * PI * (r * I - 1.0)
    v = 0.5 * PI * I
    d = r * I - 1.0
    if d == 0.0:
        # pole; sign from the one-sided limit is irrelevant to callers
        return math.inf if I > 0.0 else -math.inf
    au = abs(u)
    av = abs(v)
    if au < 300.0 and av < 300.0:
        return (I / d) * h_ratio_fn(v) / h_ratio_fn(u)
    # large-|I| branch: use the sinh quotient directly
    return (I * I / (d * d)) * sinh_quot(u, v)


@jitted
def beta_r_raw(I: float, r: float) -> float:
    """I * alpha_r(I) / (rI - 1)."""
    d = r * I - 1.0
    if d == 0.0:
        return math.inf
    return I * alpha_r_raw(I, r) / d


@jitted
def crest_coef(I: float, a1: float, a2: float, r: float) -> float:
    """c = mu * alpha_r(I) = I*A1(I) / ((rI-1)*A2(I)); signed, +/-inf at poles."""
    d = r * I - 1.0
    num = a1 * I * h_ratio_fn(0.5 * PI * I)
    den = a2 * d * h_ratio_fn(0.5 * PI * d)
    if den == 0.0:
        if num == 0.0:
            return 0.0
        return math.inf if num > 0.0 else -math.inf
    u = 0.5 * PI * d
    v = 0.5 * PI * I
    if abs(u) >= 300.0 or abs(v) >= 300.0:
        return (a1 / a2) * (I * I / (d * d)) * sinh_quot(u, v)
    return num / den


@jitted
def amp1(I: float, a1: float) -> float:
    return 4.0 * a1 * h_ratio_fn(0.5 * PI * I)


@jitted
def amp2(I: float, a2: float, r: float) -> float:
    return 4.0 * a2 * h_ratio_fn(0.5 * PI * (r * I - 1.0))


@jitted
def amp1_prime(I: float, a1: float) -> float:
    return 2.0 * PI * a1 * h_ratio_prime(0.5 * PI * I)


@jitted
def amp2_prime(I: float, a2: float, r: float) -> float:
    return 2.0 * PI * a2 * r * h_ratio_prime(0.5 * PI * (r * I - 1.0))


# ----------------------------------------------------------------------
# tau* geometry helpers
# ----------------------------------------------------------------------

@jitted
def _gn(tau, phi0, sig0, rphi, rsig, c, ac):
    """Ridge residual normalized by max(1, |c|); zero exactly on the ridge."""
    phi = phi0 + rphi * tau
    sig = sig0 + rsig * tau
    if ac <= 1.0:
        return c * math.sin(phi) + math.sin(sig)
    s = 1.0 if c > 0.0 else -1.0
    return s * math.sin(phi) + math.sin(sig) / ac


@jitted
def _gn_prime(tau, phi0, sig0, rphi, rsig, c, ac):
    phi = phi0 + rphi * tau
    sig = sig0 + rsig * tau
    if ac <= 1.0:
        return c * math.cos(phi) * rphi + math.cos(sig) * rsig
    s = 1.0 if c > 0.0 else -1.0
    return s * math.cos(phi) * rphi + math.cos(sig) * rsig / ac


@jitted
def _hb(tau, m, par, w0, lw, phi0, sig0, rphi, rsig, c, horizontal):
    """Signed distance to the branch-m graph along the strip coordinate.

    par = +1 for even m, -1 for odd m.  Opposite signs at the two strip
    edges, so a sign change brackets exactly one family member.
    """
    if horizontal:
        x = c * math.sin(phi0 + rphi * tau)
    else:
        x = math.sin(sig0 + rsig * tau) / c
    if x > 1.0:
        x = 1.0
    elif x < -1.0:
        x = -1.0
    return (w0 + lw * tau - m * PI) + par * math.asin(x)


@jitted
def _bisect_hb(ta, tb, m, par, w0, lw, phi0, sig0, rphi, rsig, c, horizontal):
    """Root of _hb in [ta, tb] assuming a sign change; returns the root."""
    fa = _hb(ta, m, par, w0, lw, phi0, sig0, rphi, rsig, c, horizontal)
    a = ta
    b = tb
    if fa == 0.0:
        return a
    for _ in range(120):
        mid = 0.5 * (a + b)
        fm = _hb(mid, m, par, w0, lw, phi0, sig0, rphi, rsig, c, horizontal)
        if fm == 0.0:
            return mid
        if (fa > 0.0) == (fm > 0.0):
            a = mid
            fa = fm
        else:
            b = mid
        if (b - a) <= 1e-15 * (1.0 + abs(a) + abs(b)):
            break
    return 0.5 * (a + b)


@jitted
def _scan_band(ta, tb, ns, m, par, w0, lw, phi0, sig0, rphi, rsig, c, ac,
               horizontal, mode, tie_tol):
    """Ridge crossings of branch m with tau in [ta, tb].

    mode 0: smallest |tau| (ties resolved toward larger transversality);
    mode 1: smallest tau;  mode 2: largest tau.
    Returns (found, tau, margin).

    Besides sign changes between samples, local |h_b| minima without a sign
    change are re-scanned at 256x resolution: a near-grazing ray produces
    crossing PAIRS closer than the sample spacing, and missing one would
    silently select a farther contact.
    """
    best_t = math.inf
    best_key = math.inf
    best_margin = 0.0
    found = False
    if not (tb > ta):
        if tb == ta:
            f0 = _hb(ta, m, par, w0, lw, phi0, sig0, rphi, rsig, c, horizontal)
            if f0 == 0.0:
                g = abs(_gn_prime(ta, phi0, sig0, rphi, rsig, c, ac))
                return True, ta, g
        return False, 0.0, 0.0
    dt = (tb - ta) / ns
    fm1 = math.inf  # |h_b| two samples back, for the dip detector
    fprev = _hb(ta, m, par, w0, lw, phi0, sig0, rphi, rsig, c, horizontal)
    tprev = ta
    for i in range(1, ns + 2):
        # one extra iteration flushes a dip ending at the last sample
        if i <= ns:
            t = ta + dt * i if i < ns else tb
            f = _hb(t, m, par, w0, lw, phi0, sig0, rphi, rsig, c, horizontal)
        else:
            t = tb
            f = fprev
        nroots = 0
        r0 = math.nan
        r1 = math.nan
        r2 = math.nan
        if i <= ns:
            if fprev == 0.0:
                r0 = tprev
                nroots = 1
            elif (fprev > 0.0) != (f > 0.0):
                r0 = _bisect_hb(tprev, t, m, par, w0, lw, phi0, sig0, rphi,
                                rsig, c, horizontal)
                nroots = 1
        if (abs(fprev) < fm1 and abs(fprev) <= abs(f)
                and abs(fprev) < 0.5 * (fm1 + abs(f))):
            # dip in |h_b|: refine the two cells around tprev (catches
            # crossing pairs hiding between samples, or triples in a cell)
            lo = tprev - dt if tprev - dt > ta else ta
            hi = t if t < tb else tb
            sub = 256
            ddt = (hi - lo) / sub
            gprev = _hb(lo, m, par, w0, lw, phi0, sig0, rphi, rsig, c,
                        horizontal)
            tp2 = lo
            for j in range(1, sub + 1):
                tj = lo + ddt * j
                gj = _hb(tj, m, par, w0, lw, phi0, sig0, rphi, rsig, c,
                         horizontal)
                if gprev == 0.0 or (gprev > 0.0) != (gj > 0.0):
                    rt = tp2 if gprev == 0.0 else _bisect_hb(
                        tp2, tj, m, par, w0, lw, phi0, sig0, rphi, rsig, c,
                        horizontal)
                    if nroots == 0:
                        r0 = rt
                    elif nroots == 1:
                        r1 = rt
                    elif nroots == 2:
                        r2 = rt
                    nroots += 1
                    if nroots == 3:
                        break
                tp2 = tj
                gprev = gj
        for kk in range(nroots):
            root = r0 if kk == 0 else (r1 if kk == 1 else r2)
            if mode == 0:
                key = abs(root)
            elif mode == 1:
                key = root
            else:
                key = -root
            marg = abs(_gn_prime(root, phi0, sig0, rphi, rsig, c, ac))
            if not found or key < best_key - tie_tol:
                found = True
                best_key = key
                best_t = root
                best_margin = marg
            elif key < best_key + tie_tol and marg > best_margin:
                best_t = root
                best_margin = marg
        if i <= ns:
            fm1 = abs(fprev)
            tprev = t
            fprev = f
    # Endpoint zero at tb
    if fprev == 0.0:
        key = abs(tb) if mode == 0 else (tb if mode == 1 else -tb)
        if not found or key < best_key - tie_tol:
            found = True
            best_t = tb
            best_margin = abs(_gn_prime(tb, phi0, sig0, rphi, rsig, c, ac))
    return found, best_t, best_margin


@jitted
def _band_samples(ta, tb, lw, rphi, rsig, ns_base):
    """Sample count so the phase advance per sample stays below ~0.5 rad."""
    pr = max(abs(rphi), abs(rsig))
    need = int((tb - ta) * pr / 0.5) + 1
    ns = ns_base if ns_base > need else need
    if ns > 200000:
        ns = 200000
    return ns


@jitted
def tau_star_kernel(I, theta, r, c, crit, kreq, ns_base, tol_cls, tie_tol):
    """Crossing time tau* of the connection line with the ridge set.

    Returns (status, tau, band_index, margin, phi_star, sigma_star).
    """
    ac = abs(c)
    if abs(ac - 1.0) < tol_cls:
        return TAU_SINGULAR, math.nan, 0, 0.0, math.nan, math.nan
    horizontal = ac < 1.0
    phi0 = theta
    sig0 = r * theta
    rphi = -I
    rsig = -(r * I - 1.0)
    if horizontal:
        w0 = sig0
        lw = rsig
    else:
        w0 = phi0
        lw = rphi
    fmin = min(abs(rphi), abs(rsig))
    if fmin < 1e-12:
        fmin = 1e-12
    tau_max = 8.0 * PI * max(1.0, 1.0 / fmin)

    if abs(lw) < 1e-300:
        return TAU_UNREACHABLE, math.nan, 0, 0.0, math.nan, math.nan

    if crit == CRIT_BRANCH:
        m = kreq
        par = 1.0 if (m % 2) == 0 else -1.0
        e1 = ((m * PI - 0.5 * PI) - w0) / lw
        e2 = ((m * PI + 0.5 * PI) - w0) / lw
        ta = e1 if e1 < e2 else e2
        tb = e2 if e2 > e1 else e1
        if ta < -tau_max:
            ta = -tau_max
        if tb > tau_max:
            tb = tau_max
        if ta > tb:
            return TAU_UNREACHABLE, math.nan, 0, 0.0, math.nan, math.nan
        ns = _band_samples(ta, tb, lw, rphi, rsig, ns_base)
        found, t, marg = _scan_band(ta, tb, ns, m, par, w0, lw, phi0, sig0,
                                    rphi, rsig, c, ac, horizontal, 0, tie_tol)
        if not found:
            # clipped interval may have an even number of crossings
            return TAU_UNREACHABLE, math.nan, 0, 0.0, math.nan, math.nan
        return (TAU_OK, t, m, marg, phi0 + rphi * t, sig0 + rsig * t)

    if crit == CRIT_DOWN or crit == CRIT_UP:
        if abs(rsig) < 1e-300:
            return TAU_UNREACHABLE, math.nan, 0, 0.0, math.nan, math.nan
        want_dsig = -1.0 if crit == CRIT_DOWN else 1.0
        dtau = 1.0 if rsig * want_dsig > 0.0 else -1.0
        dw = lw * dtau
        m = int(math.floor(w0 / PI + 0.5))
        step_m = 1 if dw > 0.0 else -1
        for _ in range(64):
            par = 1.0 if (m % 2) == 0 else -1.0
            e1 = ((m * PI - 0.5 * PI) - w0) / lw
            e2 = ((m * PI + 0.5 * PI) - w0) / lw
            ta = e1 if e1 < e2 else e2
            tb = e2 if e2 > e1 else e1
            # keep only the marching side
            if dtau > 0.0:
                if ta < 0.0:
                    ta = 0.0
                if ta > tau_max:
                    return TAU_UNREACHABLE, math.nan, 0, 0.0, math.nan, math.nan
                if tb > tau_max:
                    tb = tau_max
                mode = 1
            else:
                if tb > 0.0:
                    tb = 0.0
                if tb < -tau_max:
                    return TAU_UNREACHABLE, math.nan, 0, 0.0, math.nan, math.nan
                if ta < -tau_max:
                    ta = -tau_max
                mode = 2
            if (m % 2) == 0 and tb >= ta:
                ns = _band_samples(ta, tb, lw, rphi, rsig, ns_base)
                found, t, marg = _scan_band(ta, tb, ns, m, par, w0, lw, phi0,
                                            sig0, rphi, rsig, c, ac,
                                            horizontal, mode, tie_tol)
                if found:
                    return (TAU_OK, t, m, marg, phi0 + rphi * t,
                            sig0 + rsig * t)
            m += step_m
        return TAU_UNREACHABLE, math.nan, 0, 0.0, math.nan, math.nan

    # CRIT_MINABS: expand in both directions, nearest crossing wins
    m0 = int(math.floor(w0 / PI + 0.5))
    best_found = False
    best_t = math.inf
    best_marg = 0.0
    for side in range(2):
        dtau = 1.0 if side == 0 else -1.0
        dw = lw * dtau
        step_m = 1 if dw > 0.0 else -1
        m = m0
        for _ in range(64):
            par = 1.0 if (m % 2) == 0 else -1.0
            e1 = ((m * PI - 0.5 * PI) - w0) / lw
            e2 = ((m * PI + 0.5 * PI) - w0) / lw
            ta = e1 if e1 < e2 else e2
            tb = e2 if e2 > e1 else e1
            if dtau > 0.0:
                if ta < 0.0:
                    ta = 0.0
            else:
                if tb > 0.0:
                    tb = 0.0
            entry = ta if dtau > 0.0 else -tb
            if entry > tau_max:
                break
            if best_found and entry > abs(best_t) + tie_tol:
                break
            if dtau > 0.0 and tb > tau_max:
                tb = tau_max
            if dtau < 0.0 and ta < -tau_max:
                ta = -tau_max
            if tb >= ta:
                ns = _band_samples(ta, tb, lw, rphi, rsig, ns_base)
                found, t, marg = _scan_band(ta, tb, ns, m, par, w0, lw, phi0,
                                            sig0, rphi, rsig, c, ac,
                                            horizontal, 0, tie_tol)
                if found:
                    if (not best_found) or abs(t) < abs(best_t) - tie_tol:
                        best_found = True
                        best_t = t
                        best_marg = marg
                    elif abs(t) < abs(best_t) + tie_tol and marg > best_marg:
                        best_t = t
                        best_marg = marg
            m += step_m
    if not best_found:
        return TAU_UNREACHABLE, math.nan, 0, 0.0, math.nan, math.nan
    # recover the band index of the winner
    if horizontal:
        kb = int(math.floor((sig0 + rsig * best_t) / PI + 0.5))
    else:
        kb = int(math.floor((phi0 + rphi * best_t) / PI + 0.5))
    return (TAU_OK, best_t, kb, best_marg, phi0 + rphi * best_t,
            sig0 + rsig * best_t)


@jitted
def lstar_kernel(I, theta, r, a1, a2, crit, kreq, ns_base, tol_cls, tie_tol):
    """Reduced splitting value and gradient at the selected crossing.

    Returns (status, tau, band, margin, phi*, sigma*, L, dL/dtheta, dL/dI).
    """
    c = crest_coef(I, a1, a2, r)
    status, tau, kb, margin, phis, sigs = tau_star_kernel(
        I, theta, r, c, crit, kreq, ns_base, tol_cls, tie_tol)
    if status != TAU_OK:
        return status, tau, kb, margin, phis, sigs, math.nan, math.nan, math.nan
    d = r * I - 1.0
    A1 = amp1(I, a1)
    A2 = amp2(I, a2, r)
    L = A1 * math.cos(phis) + A2 * math.cos(sigs)
    # two equivalent gradient forms; pick the well-conditioned denominator
    if abs(d) >= abs(I):
        dth = A1 * math.sin(phis) / d
    else:
        dth = -A2 * math.sin(sigs) / I
    dI = (amp1_prime(I, a1) * math.cos(phis)
          + amp2_prime(I, a2, r) * math.cos(sigs) - tau * dth)
    return status, tau, kb, margin, phis, sigs, L, dth, dI


@jitted
def theta_plus_kernel(I: float, horizontal: bool) -> float:
    """Upper end of the guaranteed positive-drift window (pi, theta_plus)."""
    if horizontal:
        if I <= 0.0:
            return 1.5 * PI
        if I < 1.0:
            return (2.0 - I) * PI
        if I < 1.5:
            return PI * I
        return 1.5 * PI
    if I <= -0.5:
        return 1.5 * PI
    if I < 0.0:
        return (1.0 - I) * PI
    if I <= 1.0:
        return (1.0 + I) * PI
    return 1.5 * PI


@jitted
def sweep_kernel(Ivals, thvals, r, a1, a2, crit, kreq, ns_base, tol_cls,
                 tie_tol, status, tau, band, margin, lstar, dth, dI):
    """Fill (nI, nth) output arrays for a criterion over a grid."""
    nI = Ivals.shape[0]
    nth = thvals.shape[0]
    for i in range(nI):
        for j in range(nth):
            st, t, kb, mg, ph, sg, L, g1, g2 = lstar_kernel(
                Ivals[i], thvals[j], r, a1, a2, crit, kreq, ns_base,
                tol_cls, tie_tol)
            status[i, j] = st
            tau[i, j] = t
            band[i, j] = kb
            margin[i, j] = mg
            lstar[i, j] = L
            dth[i, j] = g1
            dI[i, j] = g2
