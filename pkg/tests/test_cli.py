import json
import math

import numpy as np
import pytest

from rotorlab.cli import main


def run(args):
    return main([str(a) for a in args])


def read_csv(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


SPHERE_FLAGS = ["--manifold", "sphere", "--R", 1.0, "--M", 1.0, "--I", 1.0]


class TestSpectrumCommand:
    def test_resonance_spectrum_csv(self, tmp_path):
        out = tmp_path / "sph.csv"
        code = run(["spectrum", *SPHERE_FLAGS, "--m", 0, "--s", 0, "--k", 6, "--output", out])
        assert code == 0
        header, rows = read_csv(out)
        assert header == ["index", "eps", "E_physical", "convergence_estimate"]
        eps = np.array([float(r[1]) for r in rows])
        np.testing.assert_allclose(eps, [0, 2, 6, 12, 20, 30], atol=1e-3)
        sidecar = json.loads((tmp_path / "sph.csv.config.json").read_text())
        assert sidecar["manifold"] == {"kind": "sphere", "R": 1.0}
        assert sidecar["grid"]["n"] == 2000

    def test_invalid_config_no_file(self, tmp_path, capsys):
        out = tmp_path / "never.csv"
        code = run(["spectrum", "--manifold", "sphere", "--R", -1.0, "--M", 1, "--I", 1,
                    "--m", 0, "--s", 0, "--output", out])
        assert code == 2
        assert not out.exists()
        assert "configuration error" in capsys.readouterr().err

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"manifold": {"kind": "sphere", "R": 1.0}, "typo": {}}))
        assert run(["spectrum", "--config", cfg, "--M", 1, "--I", 1, "--m", 0, "--s", 0,
                    "--output", tmp_path / "x.csv"]) == 2

    def test_missing_quantum_numbers_rejected(self, tmp_path):
        assert run(["spectrum", *SPHERE_FLAGS, "--output", tmp_path / "x.csv"]) == 2

    def test_torus_constant_mode(self, tmp_path):
        out = tmp_path / "tor.csv"
        code = run(["spectrum", "--manifold", "torus", "--R", 1.0, "--L", 3.0, "--M", 1.0,
                    "--I", 2.0, "--m", 0, "--s", 0, "--k", 1, "--output", out])
        assert code == 0
        _, rows = read_csv(out)
        assert abs(float(rows[0][1])) < 1e-8

    def test_json_output_with_eigenfunctions(self, tmp_path):
        out = tmp_path / "sph.json"
        code = run(["spectrum", *SPHERE_FLAGS, "--m", 1, "--s", 0, "--k", 2,
                    "--format", "json", "--output", out])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["config"]["command"] == "spectrum"
        assert len(doc["result"]["eigenfunctions"]) == 2
        assert len(doc["result"]["eigenfunctions"][0]) == len(doc["result"]["nodes"])

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({
            "manifold": {"kind": "sphere", "R": 1.0},
            "rotor": {"M": 1.0, "I": 1.0},
            "quantum": {"m": 0, "s": 0},
            "solver": {"k": 3},
            "output": {"path": str(tmp_path / "a.csv")},
        }))
        assert run(["spectrum", "--config", cfg, "--k", 4]) == 0
        _, rows = read_csv(tmp_path / "a.csv")
        assert len(rows) == 4  # flag overrode k=3

    def test_deterministic_output(self, tmp_path):
        out = tmp_path / "det.csv"
        run(["spectrum", *SPHERE_FLAGS, "--m", 1, "--s", 1, "--k", 4, "--output", out])
        first = out.read_bytes()
        run(["spectrum", *SPHERE_FLAGS, "--m", 1, "--s", 1, "--k", 4, "--output", out])
        assert out.read_bytes() == first


class TestScanCommand:
    def test_single_cell_matches_spectrum(self, tmp_path):
        scan_out = tmp_path / "scan.csv"
        spec_out = tmp_path / "spec.csv"
        run(["scan", *SPHERE_FLAGS, "--m-range", 1, 1, "--s-range", 1, 1, "--k", 4,
             "--output", scan_out])
        run(["spectrum", *SPHERE_FLAGS, "--m", 1, "--s", 1, "--k", 4, "--output", spec_out])
        _, scan_rows = read_csv(scan_out)
        _, spec_rows = read_csv(spec_out)
        assert [r[2:] for r in scan_rows] == spec_rows

    def test_negation_symmetry_rows(self, tmp_path):
        out = tmp_path / "scan.csv"
        code = run(["scan", *SPHERE_FLAGS, "--m-range", -1, 1, "--s-range", -1, 1, "--k", 3,
                    "--n", 400, "--output", out])
        assert code == 0
        _, rows = read_csv(out)
        table = {}
        for m, s, idx, eps, *_ in rows:
            table[(int(m), int(s), int(idx))] = eps
        for (m, s, idx), eps in table.items():
            assert table[(-m, -s, idx)] == eps  # bit-for-bit

    def test_scan_json_sorted_cells(self, tmp_path):
        out = tmp_path / "scan.json"
        run(["scan", *SPHERE_FLAGS, "--m-range", 0, 1, "--s-range", 0, 0, "--k", 2,
             "--n", 200, "--format", "json", "--output", out])
        doc = json.loads(out.read_text())
        cells = [(r["m"], r["s"]) for r in doc["results"]]
        assert cells == sorted(cells)


class TestGeodesicCommand:
    def test_equatorial_run(self, tmp_path):
        out = tmp_path / "geo.csv"
        code = run(["geodesic", *SPHERE_FLAGS,
                    "--state0", math.pi / 2, 0, 0, 0, 0.8, 0,
                    "--dt", 1e-3, "--steps", 2000, "--output", out])
        assert code == 0
        header, rows = read_csv(out)
        assert header == ["t", "theta", "phi", "psi", "p_theta", "p_phi", "p_psi", "H"]
        thetas = np.array([float(r[1]) for r in rows])
        assert np.abs(thetas - math.pi / 2).max() < 1e-12
        energies = np.array([float(r[7]) for r in rows])
        assert np.ptp(energies) < 1e-12

    def test_pole_approach_exit_code_and_partial_file(self, tmp_path, capsys):
        out = tmp_path / "geo.csv"
        code = run(["geodesic", *SPHERE_FLAGS,
                    "--state0", math.pi / 2, 0, 0, 0.5, 0, 0,
                    "--dt", 1e-3, "--steps", 10000, "--output", out])
        assert code == 4
        assert "dynamics halted" in capsys.readouterr().err
        _, rows = read_csv(out)
        assert 1000 < len(rows) < 10001  # partial trajectory present
        sidecar = json.loads((tmp_path / "geo.csv.config.json").read_text())
        assert sidecar["status"] == "pole_approach"
        assert sidecar["steps_done"] == len(rows) - 1


class TestHjCommand:
    def test_torus_interval_table(self, tmp_path):
        out = tmp_path / "hj.csv"
        code = run(["hj", "--manifold", "torus", "--R", 1.0, "--L", 3.0, "--M", 1.0, "--I", 2.0,
                    "--E", 0.25, "--mu", 2.0, "--sigma", 0.0, "--output", out])
        assert code == 0
        _, rows = read_csv(out)
        assert rows[0][3] == "libration"
        period = float(rows[0][7])
        assert period == pytest.approx(20.8084, abs=1e-3)

    def test_no_allowed_region_is_solver_failure(self, tmp_path):
        code = run(["hj", *SPHERE_FLAGS, "--E", 0.01, "--mu", 5.0, "--sigma", 0.0,
                    "--output", tmp_path / "hj.csv"])
        assert code == 3


class TestCheckCommand:
    def test_check_json_subset(self, capsys):
        code = run(["check", "--json", "--only", "metric-identities", "kinetic-energy-equality"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["all_passed"] is True
        assert {c["name"] for c in report["checks"]} == {"metric-identities", "kinetic-energy-equality"}

    def test_perturbed_check_fails_by_name(self, capsys):
        code = run(["check", "--only", "metric-identities", "--perturb", "metric-identities"])
        assert code == 1
        assert "FAIL  metric-identities" in capsys.readouterr().out

    def test_unknown_check_name_is_config_error(self):
        assert run(["check", "--only", "no-such-check"]) == 2
