"""Command-line front end.

Subcommands: thresholds, crests, portrait, tau-field, inner-portrait,
diffuse, verify.  Outputs are CSV (commented key=value header block) or
JSON-lines (first record carries a schema_version field).  Floats are
written with 17 significant digits and rows in a fixed order, so identical
configurations produce byte-identical files.

Exit codes: 0 ok, 2 config error, 3 solver error, 4 verification failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _kernels as K
from .crests import classify, crest_phi, crest_residual, crest_sigma, find_thresholds
from .diffusion import (DiffusionPolicy, ScatterLeg,
                        build_pseudo_orbit, verify_pseudo_orbit)
from .errors import ConfigError, OutOfDomain, PendrotorError
from .inner import InnerState, region_of, stroboscopic_sections, torus_value
from .params import DEFAULT_TOL, SystemParams, Tolerances
from .scattering import ATLAS, TauCriterion
from .verify import run_suite

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_VERIFY = 4

TWO_PI = 2.0 * math.pi


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


class Emitter:
    """Deterministic CSV / JSON-lines writer with a self-describing header."""

    def __init__(self, path: str | None, fmt: str, kind: str,
                 header: dict, columns: list[str]):
        self.fmt = fmt
        self.kind = kind
        self.header = header
        self.columns = columns
        self._fh = open(path, "w") if path else sys.stdout
        self._owned = path is not None
        if fmt == "csv":
            for key in sorted(header):
                self._fh.write(f"# {key} = {_fmt(header[key])}\n")
            self._fh.write(",".join(columns) + "\n")
        else:
            first = {"schema_version": 1, "kind": kind}
            first.update({k: header[k] for k in sorted(header)})
            self._fh.write(json.dumps(first) + "\n")

    def row(self, values: list):
        if self.fmt == "csv":
            self._fh.write(",".join(_fmt(v) for v in values) + "\n")
        else:
            self._fh.write(json.dumps(
                {c: v for c, v in zip(self.columns, values)}) + "\n")

    def close(self):
        if self._owned:
            self._fh.close()


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--a1", type=float, default=None)
    p.add_argument("--a2", type=float, default=None)
    p.add_argument("--k1", type=int, default=None)
    p.add_argument("--k2", type=int, default=None)
    p.add_argument("--l1", type=int, default=None)
    p.add_argument("--l2", type=int, default=None)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--I-min", dest="I_min", type=float, default=-2.0)
    p.add_argument("--I-max", dest="I_max", type=float, default=2.0)
    p.add_argument("--grid-n", dest="grid_n", type=int, default=100)
    p.add_argument("--theta-n", dest="theta_n", type=int, default=None,
                   help="theta resolution (defaults to --grid-n)")
    p.add_argument("--angle-n", dest="angle_n", type=int, default=None,
                   help="phi/sigma sampling resolution (defaults to --grid-n)")
    p.add_argument("--criterion", type=str, default="branch=1",
                   help="down | up | minabs | branch=k")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--threads", type=int, default=0,
                   help="grid-sweep worker threads (0 = all cores)")
    p.add_argument("--config", type=str, default=None,
                   help="KEY=VAL file supplying flag defaults (flags win)")
    p.add_argument("--tol-override", action="append", default=[],
                   metavar="KEY=VAL",
                   help="override a named tolerance, e.g. tol_root=1e-10")


def _validate_grids(args) -> None:
    for name in ("grid_n", "theta_n", "angle_n", "periods"):
        val = getattr(args, name, None)
        if val is not None and val < 2:
            raise ConfigError(f"--{name.replace('_', '-')} must be >= 2")
    if getattr(args, "I_min", 0.0) >= getattr(args, "I_max", 1.0):
        raise ConfigError("--I-min must be below --I-max")


def _params_from(args) -> SystemParams:
    _validate_grids(args)
    if args.k1 is not None or args.k2 is not None:
        missing = [n for n in ("k1", "k2", "l1", "l2", "a1", "a2")
                   if getattr(args, n) is None]
        if missing:
            raise ConfigError(f"harmonic form needs --{', --'.join(missing)}")
        return SystemParams.from_harmonics(args.a1, args.a2, args.k1,
                                           args.k2, args.l1, args.l2,
                                           args.eps)
    a1, a2 = args.a1, args.a2
    if a1 is None and args.mu is not None:
        a2 = 1.0 if a2 is None else a2
        a1 = args.mu * a2
    if a1 is None or a2 is None:
        raise ConfigError("give --a1/--a2, or --mu (with optional --a2)")
    return SystemParams(a1=a1, a2=a2, eps=args.eps, r=args.r)


def _tol_from(args) -> Tolerances:
    overrides = {}
    for item in args.tol_override:
        if "=" not in item:
            raise ConfigError(f"bad --tol-override {item!r}")
        key, val = item.split("=", 1)
        key = key.strip()
        if key not in {f.name for f in dataclasses.fields(Tolerances)}:
            raise ConfigError(f"unknown tolerance {key!r}")
        overrides[key] = float(val)
    return DEFAULT_TOL.override(**overrides) if overrides else DEFAULT_TOL


def _header(params: SystemParams, args, extra: dict | None = None) -> dict:
    h = {"a1": params.a1, "a2": params.a2, "mu": params.mu, "r": params.r,
         "eps": params.eps}
    if extra:
        h.update(extra)
    return h


def _apply_config_file(argv: list[str]) -> list[str]:
    """Prepend KEY=VAL pairs from --config as argv entries (flags win)."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise ConfigError("--config needs a file path")
    path = argv[idx + 1]
    injected: list[str] = []
    try:
        fh = open(path)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}")
    with fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition("=")
            injected.extend([f"--{key.strip().replace('_', '-')}",
                             val.strip()])
    # injected defaults go right after the subcommand, real flags override
    return argv[:1] + injected + argv[1:]


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def cmd_thresholds(args) -> int:
    params = _params_from(args)
    tol = _tol_from(args)
    if params.mu == 0.0 or not math.isfinite(params.mu):
        raise ConfigError("thresholds need a finite nonzero mu")
    report = find_thresholds(params, (args.I_min, args.I_max), tol)
    em = Emitter(args.out, args.format, "thresholds",
                 _header(params, args, {"I_min": args.I_min,
                                        "I_max": args.I_max}),
                 ["record", "curve_or_kind", "I_lo", "I_hi", "value",
                  "tangency", "label"])
    labels_inv = {v: k for k, v in report.labels.items()}
    for v in report.alpha_thresholds:
        em.row(["threshold", "alpha", "", "", v, "",
                labels_inv.get(v, "")])
    for v in report.beta_thresholds:
        em.row(["threshold", "beta", "", "", v, "", labels_inv.get(v, "")])
    for iv in report.intervals:
        em.row(["interval", iv.kind.value, iv.lo, iv.hi, "",
                int(iv.tangency), ""])
    for name, asym in report.missing:
        em.row(["missing", name, "", "", asym if asym is not None else "",
                "", "asymptote"])
    em.close()
    return EXIT_OK


def cmd_crests(args) -> int:
    params = _params_from(args)
    tol = _tol_from(args)
    n = args.angle_n or args.grid_n
    if args.I_list:
        I_values = [float(x) for x in args.I_list]
    else:
        I_values = list(np.linspace(args.I_min, args.I_max, args.grid_n))
    em = Emitter(args.out, args.format, "crests", _header(params, args),
                 ["I", "branch", "kind", "param_angle", "phi", "sigma",
                  "residual"])
    grid = np.linspace(0.0, TWO_PI, n, endpoint=False)
    for I in I_values:
        kind = classify(I, params, tol)
        for k in (0, 1):
            for ang in grid:
                try:
                    if kind.value == "vertical":
                        phi = crest_phi(I, ang, k, params)
                        sig = float(ang)
                    else:
                        phi = float(ang)
                        sig = crest_sigma(I, ang, k, params)
                except OutOfDomain:
                    continue
                em.row([I, k, kind.value, float(ang), phi, sig,
                        crest_residual(I, phi, sig, params)])
    em.close()
    return EXIT_OK


def _sweep_rows(params, tol, criterion, I_vals, th_vals, threads):
    crit = TauCriterion.parse(criterion)
    if threads <= 0:
        import os
        threads = os.cpu_count() or 1
    nI, nth = len(I_vals), len(th_vals)
    status = np.empty((nI, nth), dtype=np.int64)
    tau = np.empty((nI, nth))
    band = np.empty((nI, nth), dtype=np.int64)
    margin = np.empty((nI, nth))
    lstar = np.empty((nI, nth))
    dth = np.empty((nI, nth))
    dI = np.empty((nI, nth))

    def work(i):
        K.sweep_kernel(I_vals[i:i + 1], th_vals, params.r, params.a1,
                       params.a2, crit.code, crit.k, 64, tol.tol_cls,
                       tol.tie_tol, status[i:i + 1], tau[i:i + 1],
                       band[i:i + 1], margin[i:i + 1], lstar[i:i + 1],
                       dth[i:i + 1], dI[i:i + 1])

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            list(ex.map(work, range(nI)))
    else:
        for i in range(nI):
            work(i)
    return status, tau, band, margin, lstar, dth, dI


def cmd_portrait(args) -> int:
    params = _params_from(args)
    tol = _tol_from(args)
    I_vals = np.linspace(args.I_min, args.I_max, args.grid_n)
    th_vals = np.linspace(0.0, TWO_PI, args.theta_n or args.grid_n,
                          endpoint=False)
    status, tau, band, margin, lstar, dth, dI = _sweep_rows(
        params, tol, args.criterion, I_vals, th_vals, args.threads)
    em = Emitter(args.out, args.format, "portrait",
                 _header(params, args, {"criterion": args.criterion}),
                 ["I", "theta", "lstar", "dlstar_dtheta", "idot_sign",
                  "region", "degenerate", "status"])
    for i, I in enumerate(I_vals):
        for j, th in enumerate(th_vals):
            region, _ = ATLAS.region_of(th)
            em.row([float(I), float(th), lstar[i, j], dth[i, j],
                    int(np.sign(dth[i, j])) if status[i, j] == 0 else 0,
                    region,
                    int(margin[i, j] < tol.tol_degen) if status[i, j] == 0 else 1,
                    int(status[i, j])])
    em.close()
    return EXIT_OK


def cmd_tau_field(args) -> int:
    params = _params_from(args)
    tol = _tol_from(args)
    I_vals = np.linspace(args.I_min, args.I_max, args.grid_n)
    th_vals = np.linspace(0.0, TWO_PI, args.theta_n or args.grid_n,
                          endpoint=False)
    status, tau, band, margin, lstar, dth, dI = _sweep_rows(
        params, tol, args.criterion, I_vals, th_vals, args.threads)
    em = Emitter(args.out, args.format, "tau_field",
                 _header(params, args, {"criterion": args.criterion}),
                 ["I", "theta", "tau_star", "branch", "margin", "degenerate",
                  "status"])
    for i, I in enumerate(I_vals):
        for j, th in enumerate(th_vals):
            em.row([float(I), float(th), tau[i, j], int(band[i, j]),
                    margin[i, j],
                    int(margin[i, j] < tol.tol_degen) if status[i, j] == 0 else 1,
                    int(status[i, j])])
    em.close()
    return EXIT_OK


def cmd_inner_portrait(args) -> int:
    params = _params_from(args)
    tol = _tol_from(args)
    I_vals = np.linspace(args.I_min, args.I_max, args.grid_n)
    em = Emitter(args.out, args.format, "inner_portrait",
                 _header(params, args, {"periods": args.periods}),
                 ["orbit", "n", "t", "I", "phi_mod", "region", "torus_value"])
    for i, I0 in enumerate(I_vals):
        state = InnerState(I=float(I0), phi=0.0, s=0.0)
        rows = stroboscopic_sections(state, args.periods, params, tol)
        for n in range(rows.shape[0]):
            t, I, phi = rows[n]
            st = InnerState(I=I, phi=phi, s=t)
            em.row([i, n + 1, t, I, phi % TWO_PI,
                    region_of(I, params).value, torus_value(st, params)])
    em.close()
    return EXIT_OK


def cmd_diffuse(args) -> int:
    params = _params_from(args)
    tol = _tol_from(args)
    if params.eps == 0.0:
        raise ConfigError("diffusion needs eps > 0")
    params.require_nontrivial()
    policy = DiffusionPolicy()
    orbit = build_pseudo_orbit(args.I_start, args.I_end, params,
                               policy=policy, tol=tol)
    report = verify_pseudo_orbit(orbit, tol)
    em = Emitter(args.out, args.format, "pseudo_orbit",
                 _header(params, args, {
                     "I_start": args.I_start, "I_end": args.I_end,
                     "frame_phi_shift": orbit.frame_phi_shift,
                     "frame_s_shift": orbit.frame_s_shift}),
                 ["leg", "type", "I_from", "angle_from", "I_to", "angle_to",
                  "level", "residual", "duration"])
    for i, leg in enumerate(orbit.legs):
        if isinstance(leg, ScatterLeg):
            em.row([i, "scatter", leg.src.I, leg.src.theta, leg.dst.I,
                    leg.dst.theta, leg.level, leg.residual, 0.0])
        else:
            em.row([i, "inner", leg.src.I, leg.src.phi, leg.dst.I,
                    leg.dst.phi, "", "", leg.duration])
    em.close()
    rep = {
        "ok": report.ok,
        "n_scatter": report.n_scatter,
        "n_inner": report.n_inner,
        "final_I": orbit.final_I,
        "max_level_residual": report.max_level_residual,
        "level_budget": report.level_budget,
        "max_reintegration_residual": report.max_reintegration_residual,
        "reintegration_budget": report.reintegration_budget,
        "failures": report.failures[:20],
    }
    out = json.dumps(rep, indent=2, default=_fmt)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)
    return EXIT_OK if report.ok else EXIT_VERIFY


def cmd_verify(args) -> int:
    params = _params_from(args)
    tol = _tol_from(args)
    results = run_suite(params, n_melnikov=args.n_melnikov, n_tau=args.n_tau,
                        seed=args.seed, tol_melnikov=args.tol_melnikov,
                        tol_tau=args.tol_tau, tol=tol,
                        corrupt=args.inject_fault)
    payload = {"params": {"a1": params.a1, "a2": params.a2, "r": params.r,
                          "eps": params.eps},
               "checks": [c.as_dict() for c in results],
               "ok": all(c.passed for c in results)}
    out = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)
    return EXIT_OK if payload["ok"] else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pendrotor",
        description="Splitting maps, ridge geometry and action drift for a "
                    "two-harmonic forced pendulum-rotor system")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("thresholds", help="regime/tangency threshold actions")
    _add_common(p)
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("crests", help="sampled ridge-branch polylines")
    _add_common(p)
    p.add_argument("--I", dest="I_list", action="append", default=[],
                   help="specific action value (repeatable)")
    p.set_defaults(func=cmd_crests)

    p = sub.add_parser("portrait", help="grid of L* and drift signs")
    _add_common(p)
    p.set_defaults(func=cmd_portrait)

    p = sub.add_parser("tau-field", help="grid of contact times tau*")
    _add_common(p)
    p.set_defaults(func=cmd_tau_field)

    p = sub.add_parser("inner-portrait",
                       help="stroboscopic sections of the inner flow")
    _add_common(p)
    p.add_argument("--periods", type=int, default=200)
    p.set_defaults(func=cmd_inner_portrait)

    p = sub.add_parser("diffuse", help="build and verify a drift pseudo-orbit")
    _add_common(p)
    p.add_argument("--I-start", dest="I_start", type=float, default=-1.0)
    p.add_argument("--I-end", dest="I_end", type=float, default=1.0)
    p.add_argument("--report", type=str, default=None,
                   help="write the verification report to this path")
    p.set_defaults(func=cmd_diffuse)

    p = sub.add_parser("verify", help="oracle self-check suite")
    _add_common(p)
    p.add_argument("--n-melnikov", type=int, default=60)
    p.add_argument("--n-tau", type=int, default=150)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol-melnikov", type=float, default=1e-8)
    p.add_argument("--tol-tau", type=float, default=1e-6)
    p.add_argument("--inject-fault", type=str, default=None,
                   choices=("a2-sign",),
                   help="corrupt a closed form to exercise the checks")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PendrotorError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
