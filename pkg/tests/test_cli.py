import json
import math

import numpy as np
import pytest

import pendrotor as pr
from pendrotor.cli import main

TWO_PI = 2.0 * math.pi


def _read_rows(path):
    header = {}
    rows = []
    cols = None
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                key, _, val = line[1:].partition("=")
                header[key.strip()] = val.strip()
            elif cols is None:
                cols = line.split(",")
            else:
                rows.append(dict(zip(cols, line.split(","))))
    return header, rows


class TestThresholdsCmd:
    def test_published_values_in_file(self, tmp_path):
        out = tmp_path / "thr.csv"
        rc = main(["thresholds", "--mu", "0.5", "--I-min", "-5",
                   "--I-max", "5", "--out", str(out)])
        assert rc == 0
        _, rows = _read_rows(out)
        alphas = sorted(float(r["value"]) for r in rows
                        if r["record"] == "threshold"
                        and r["curve_or_kind"] == "alpha")
        assert alphas == pytest.approx([-1.807, 0.701, 1.367], abs=5e-3)

    def test_r_half(self, tmp_path):
        out = tmp_path / "thr.csv"
        rc = main(["thresholds", "--mu", "0.5", "--r", "0.5",
                   "--I-min", "-5", "--I-max", "5", "--out", str(out)])
        assert rc == 0
        _, rows = _read_rows(out)
        ivs = [r for r in rows if r["record"] == "interval"]
        assert ivs
        # vertical around the moved pole I = 2
        hit = [r for r in ivs
               if float(r["I_lo"]) < 2.0 < float(r["I_hi"])]
        assert hit and hit[0]["curve_or_kind"] == "vertical"

    def test_harmonic_quadruple_reduces(self, tmp_path):
        # (k1,k2,l1,l2) = (2,1,0,-1) reduces to r = 1/2 with eps * k1^2
        out = tmp_path / "thr.csv"
        rc = main(["thresholds", "--a1", "0.5", "--a2", "1.0", "--k1", "2",
                   "--k2", "1", "--l1", "0", "--l2", "-1", "--eps", "0.01",
                   "--out", str(out)])
        assert rc == 0
        header, _ = _read_rows(out)
        assert float(header["r"]) == pytest.approx(0.5)
        assert float(header["eps"]) == pytest.approx(0.04)

    def test_mu_zero_exits_2(self):
        assert main(["thresholds", "--mu", "0"]) == 2

    def test_degenerate_grid_exits_2(self):
        assert main(["portrait", "--mu", "0.5", "--grid-n", "1"]) == 2
        assert main(["portrait", "--mu", "0.5", "--I-min", "2",
                     "--I-max", "-2"]) == 2
        assert main(["thresholds", "--mu", "0.5", "--eps", "-0.1"]) == 2

    def test_missing_params_exit_2(self):
        assert main(["thresholds"]) == 2


class TestCrestsCmd:
    def test_straight_lines_at_pole(self, tmp_path):
        out = tmp_path / "crests.csv"
        rc = main(["crests", "--mu", "0.5", "--I", "1.0", "--angle-n", "64",
                   "--out", str(out)])
        assert rc == 0
        _, rows = _read_rows(out)
        assert rows
        for r in rows:
            assert r["kind"] == "vertical"
            phi = float(r["phi"])
            expected = 0.0 if int(r["branch"]) == 0 else math.pi
            assert phi == pytest.approx(expected, abs=1e-12)
            assert abs(float(r["residual"])) < 1e-12

    def test_residuals_vanish(self, tmp_path):
        out = tmp_path / "crests.csv"
        rc = main(["crests", "--mu", "0.5", "--I", "0.3", "--I", "1.2",
                   "--angle-n", "128", "--out", str(out)])
        assert rc == 0
        _, rows = _read_rows(out)
        assert max(abs(float(r["residual"])) for r in rows) < 1e-12

    def test_bifurcating_branches_nearly_coincide(self, tmp_path):
        # near the regime switch the horizontal piece at I = 0.68 and the
        # vertical piece at I = 0.72 trace almost the same curve by (0, 0)
        out1 = tmp_path / "h.csv"
        out2 = tmp_path / "v.csv"
        main(["crests", "--mu", "0.5", "--I", "0.68", "--angle-n", "512",
              "--out", str(out1)])
        main(["crests", "--mu", "0.5", "--I", "0.72", "--angle-n", "512",
              "--out", str(out2)])

        def pts(path):
            # the near-coincidence holds in a neighbourhood of phi = 0,
            # where the bifurcating pieces pass through the same point
            _, rows = _read_rows(path)
            out = []
            for r in rows:
                if int(r["branch"]) != 0:
                    continue
                phi = float(r["phi"]) % TWO_PI
                sig = float(r["sigma"]) % TWO_PI
                phi = phi - TWO_PI if phi > math.pi else phi
                sig = sig - TWO_PI if sig > math.pi else sig
                if abs(phi) <= 0.5 and abs(sig) <= 1.0:
                    out.append((phi, sig))
            return np.array(out)

        A, B = pts(out1), pts(out2)
        assert len(A) > 30 and len(B) > 30

        def hausdorff(X, Y):
            d = np.linalg.norm(X[:, None, :] - Y[None, :, :], axis=2)
            return max(d.min(axis=1).max(), d.min(axis=0).max())

        assert hausdorff(A, B) < 0.1


class TestPortraitCmd:
    def test_determinism_and_threads(self, tmp_path):
        args = ["portrait", "--mu", "0.6", "--criterion", "down",
                "--I-min", "-1", "--I-max", "0.5", "--grid-n", "24",
                "--theta-n", "32"]
        p1 = tmp_path / "a.csv"
        p2 = tmp_path / "b.csv"
        p3 = tmp_path / "c.csv"
        assert main(args + ["--out", str(p1)]) == 0
        assert main(args + ["--out", str(p2)]) == 0
        assert main(args + ["--threads", "4", "--out", str(p3)]) == 0
        assert p1.read_bytes() == p2.read_bytes() == p3.read_bytes()

    def test_level_sets_have_two_monotone_sections(self, tmp_path):
        # clean rows of the down-map portrait: L*(theta) has one max and one
        # min, so its theta-derivative changes sign exactly twice
        out = tmp_path / "p.csv"
        assert main(["portrait", "--mu", "0.6", "--criterion", "down",
                     "--I-min", "-1.0", "--I-max", "-0.4", "--grid-n", "4",
                     "--theta-n", "256", "--out", str(out)]) == 0
        _, rows = _read_rows(out)
        byI = {}
        for r in rows:
            byI.setdefault(r["I"], []).append(r)
        for I, rr in byI.items():
            vals = np.array([float(x["lstar"]) for x in rr])
            assert np.all(np.isfinite(vals))
            d = np.sign(np.diff(np.concatenate([vals, vals[:1]])))
            flips = np.sum(d != np.roll(d, -1))
            assert flips == 2, f"I={I}"

    def test_all_criteria_render(self, tmp_path):
        for crit in ("down", "up", "minabs", "branch=1"):
            out = tmp_path / f"{crit.replace('=', '')}.csv"
            assert main(["portrait", "--mu", "0.6", "--criterion", crit,
                         "--I-min", "-0.8", "--I-max", "-0.2",
                         "--grid-n", "4", "--theta-n", "12",
                         "--out", str(out)]) == 0
            _, rows = _read_rows(out)
            assert any(r["status"] == "0" for r in rows)

    def test_jsonl_schema(self, tmp_path):
        out = tmp_path / "p.jsonl"
        assert main(["portrait", "--mu", "0.6", "--grid-n", "4",
                     "--theta-n", "8", "--format", "jsonl",
                     "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        head = json.loads(lines[0])
        assert head["schema_version"] == 1
        assert head["kind"] == "portrait"
        row = json.loads(lines[1])
        assert set(row) == {"I", "theta", "lstar", "dlstar_dtheta",
                            "idot_sign", "region", "degenerate", "status"}

    def test_degenerate_mask_only_in_tangency_range(self, tmp_path):
        # mu=0.5: tangencies exist for I in [0.595, 0.701); a clean range
        # like (-1.0, 0.0) must produce an empty mask
        out = tmp_path / "p.csv"
        assert main(["portrait", "--mu", "0.5", "--criterion", "minabs",
                     "--I-min", "-1.0", "--I-max", "0.0", "--grid-n", "12",
                     "--theta-n", "64", "--out", str(out)]) == 0
        _, rows = _read_rows(out)
        ok_rows = [r for r in rows if r["status"] == "0"]
        assert ok_rows
        assert all(r["degenerate"] == "0" for r in ok_rows)
        # and masked points, where they appear, lie at tangency-range actions
        out2 = tmp_path / "p2.csv"
        assert main(["portrait", "--mu", "0.5", "--criterion", "minabs",
                     "--I-min", "0.4", "--I-max", "0.9", "--grid-n", "24",
                     "--theta-n", "128", "--out", str(out2)]) == 0
        p = pr.SystemParams(a1=0.5, a2=1.0)
        _, rows2 = _read_rows(out2)
        for r in rows2:
            if r["status"] == "0" and r["degenerate"] == "1":
                I = float(r["I"])
                assert pr.has_tangency(I, p)


class TestTauFieldCmd:
    def test_runs_and_reports_branches(self, tmp_path):
        out = tmp_path / "tau.csv"
        assert main(["tau-field", "--mu", "0.75", "--criterion", "minabs",
                     "--I-min", "0.2", "--I-max", "0.4", "--grid-n", "6",
                     "--theta-n", "16", "--out", str(out)]) == 0
        _, rows = _read_rows(out)
        bands = {int(r["branch"]) for r in rows if r["status"] == "0"}
        assert bands <= {0, 1, 2}
        assert len(bands) >= 2


class TestInnerPortraitCmd:
    def test_sections_conserve_fnr_off_resonance(self, tmp_path):
        out = tmp_path / "inner.csv"
        assert main(["inner-portrait", "--mu", "0.75", "--eps", "0.01",
                     "--I-min", "0.45", "--I-max", "0.55", "--grid-n", "3",
                     "--periods", "40", "--out", str(out)]) == 0
        _, rows = _read_rows(out)
        for r in rows:
            assert r["region"] == "nonres"
        byorbit = {}
        for r in rows:
            byorbit.setdefault(r["orbit"], []).append(float(r["torus_value"]))
        for vals in byorbit.values():
            assert np.ptp(vals) < 0.02


class TestDiffuseCmd:
    def test_small_run(self, tmp_path):
        out = tmp_path / "orbit.jsonl"
        rep = tmp_path / "report.json"
        rc = main(["diffuse", "--a1", "0.75", "--a2", "1.0", "--eps", "0.01",
                   "--I-start", "0.25", "--I-end", "0.35",
                   "--format", "jsonl", "--out", str(out),
                   "--report", str(rep)])
        assert rc == 0
        report = json.loads(rep.read_text())
        assert report["ok"] is True
        assert report["final_I"] >= 0.35
        lines = out.read_text().splitlines()
        assert json.loads(lines[0])["kind"] == "pseudo_orbit"

    def test_eps_zero_exits_2(self):
        assert main(["diffuse", "--a1", "0.75", "--a2", "1.0",
                     "--eps", "0"]) == 2

    def test_a1_zero_exits_2(self):
        assert main(["diffuse", "--a1", "0", "--a2", "1.0",
                     "--eps", "0.01"]) == 2


class TestVerifyCmd:
    def test_default_suite_passes(self, tmp_path):
        out = tmp_path / "verify.json"
        rc = main(["verify", "--mu", "0.75", "--eps", "0.01",
                   "--n-melnikov", "12", "--n-tau", "25", "--out", str(out)])
        assert rc == 0
        rep = json.loads(out.read_text())
        assert rep["ok"] is True
        assert {c["name"] for c in rep["checks"]} == {
            "melnikov_closed_vs_quadrature", "tau_star_vs_ray_scan",
            "down_up_reflection_symmetry", "positive_drift_window"}

    def test_injected_sign_flip_fails(self, tmp_path):
        out = tmp_path / "verify.json"
        rc = main(["verify", "--mu", "0.75", "--eps", "0.01",
                   "--n-melnikov", "8", "--n-tau", "5",
                   "--inject-fault", "a2-sign", "--out", str(out)])
        assert rc == 4
        rep = json.loads(out.read_text())
        bad = [c for c in rep["checks"]
               if c["name"] == "melnikov_closed_vs_quadrature"]
        assert bad and bad[0]["passed"] is False

    def test_tolerance_override_flag(self, tmp_path):
        out = tmp_path / "verify.json"
        rc = main(["verify", "--mu", "0.75", "--eps", "0.01",
                   "--n-melnikov", "6", "--n-tau", "25",
                   "--tol-tau", "1e-18", "--out", str(out)])
        assert rc == 4  # below the root-refinement floor: must flag

    def test_unknown_tol_override_exits_2(self):
        assert main(["verify", "--mu", "0.75",
                     "--tol-override", "nosuch=1"]) == 2


class TestConfigFile:
    def test_flags_win_over_config(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("mu = 0.4\nI-min = -3\nI-max = 3\n")
        out1 = tmp_path / "a.csv"
        assert main(["thresholds", "--config", str(cfg),
                     "--out", str(out1)]) == 0
        header, _ = _read_rows(out1)
        assert float(header["mu"]) == pytest.approx(0.4)
        out2 = tmp_path / "b.csv"
        assert main(["thresholds", "--config", str(cfg), "--mu", "0.5",
                     "--out", str(out2)]) == 0
        header2, _ = _read_rows(out2)
        assert float(header2["mu"]) == pytest.approx(0.5)
