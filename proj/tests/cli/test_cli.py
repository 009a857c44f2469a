"""End-to-end checks of the relsens command line tool.

Usage: test_cli.py <path-to-relsens> <source-dir>
"""

import csv
import hashlib
import json
import os
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

BINARY = None
SOURCE = None


def run(*args, cwd=None):
    return subprocess.run([BINARY, *map(str, args)], capture_output=True, text=True, cwd=cwd)


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def lognormal(name, mean, cov):
    return {"name": name, "distribution": "lognormal", "mean": mean, "cov": cov}


def example1_inputs():
    return [lognormal("R", 100, 0.2), lognormal("S", 40, 0.25),
            lognormal("XR", 1, 0.1), lognormal("XS", 1, 0.2)]


class CliTest(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def write_config(self, doc, name="config.json"):
        path = self.tmp / name
        path.write_text(json.dumps(doc))
        return path

    def test_shipped_configs_validate(self):
        configs = sorted((SOURCE / "configs").glob("*.json"))
        self.assertGreaterEqual(len(configs), 5)
        for cfg in configs:
            r = run("validate", cfg)
            self.assertEqual(r.returncode, 0, f"{cfg.name}: {r.stderr}")

    def test_shipped_configs_match_schema(self):
        try:
            import jsonschema
        except ImportError:
            self.skipTest("jsonschema not installed")
        schema = json.loads((SOURCE / "schema" / "config.schema.json").read_text())
        jsonschema.Draft202012Validator.check_schema(schema)
        validator = jsonschema.Draft202012Validator(schema)
        for cfg in sorted((SOURCE / "configs").glob("*.json")):
            errors = list(validator.iter_errors(json.loads(cfg.read_text())))
            self.assertEqual(errors, [], cfg.name)
        bad = {"inputs": [lognormal("R", 1, 0.1)], "lsf": {"builtin": "x"}, "method": "mc",
               "bogus": 1}
        self.assertFalse(validator.is_valid(bad))

    def test_undeclared_variable_is_a_configuration_error(self):
        cfg = self.write_config({
            "inputs": example1_inputs(),
            "lsf": {"expression": "XR * R - XS * S - Q"},
            "decision": {"safety": {"c_f": 1e8, "c_r": 1e6}},
            "method": "mc",
            "sampling": {"n": 1000},
        })
        r = run("validate", cfg)
        self.assertEqual(r.returncode, 2)
        self.assertIn("Q", r.stderr)

    def test_non_positive_definite_correlation_is_rejected(self):
        m = [[1.3, 0.5, 0.3, 0.0], [0.5, 1.3, 0.3, 0.0], [0.3, 0.3, 1.3, 0.0],
             [0.0, 0.0, 0.0, 1.3]]
        cfg = self.write_config({
            "inputs": example1_inputs(),
            "correlation": m,
            "lsf": {"expression": "XR * R - XS * S"},
            "decision": {"safety": {"c_f": 1e8, "c_r": 1e6}},
            "method": "mc",
            "sampling": {"n": 1000},
        })
        r = run("run", cfg, "--out", self.tmp / "out")
        self.assertEqual(r.returncode, 2)
        self.assertIn("invalid-correlation", r.stderr)
        self.assertFalse((self.tmp / "out").exists())

    def test_unknown_field_is_rejected(self):
        doc = json.loads((SOURCE / "configs" / "example1_safety.json").read_text())
        doc["decision"]["safety"]["cost_of_failure"] = 1.0
        r = run("validate", self.write_config(doc))
        self.assertEqual(r.returncode, 2)
        self.assertIn("cost_of_failure", r.stderr)

    def test_numeric_failure_exits_3_without_output(self):
        cfg = self.write_config({
            "inputs": [{"name": "R", "distribution": "normal", "mean": 100, "cov": 0.3},
                       lognormal("S", 40, 0.25)],
            "lsf": {"expression": "ln(R - 60) - ln(S)"},
            "decision": {"safety": {"c_f": 1e8, "c_r": 1e6}},
            "method": "mc",
            "sampling": {"n": 100000},
        })
        self.assertEqual(run("validate", cfg).returncode, 0)
        out = self.tmp / "out"
        r = run("run", cfg, "--out", out)
        self.assertEqual(r.returncode, 3, r.stderr)
        self.assertFalse(out.exists())

    def test_example1_table_and_manifest(self):
        out = self.tmp / "out"
        r = run("run", SOURCE / "configs" / "example1_safety.json", "--out", out)
        self.assertEqual(r.returncode, 0, r.stderr)
        rows = [row for row in read_csv(out / "evppi_table.csv") if row["setting"] == "c_r=1e+06"]
        got = {row["input"]: float(row["absolute"]) for row in rows}
        want = {"R": 349e3, "S": 454e3, "XR": 131e3, "XS": 349e3}
        for name, value in want.items():
            self.assertAlmostEqual(got[name] / value, 1.0, delta=0.01, msg=name)
        for setting in {row["setting"] for row in read_csv(out / "evppi_table.csv")}:
            total = sum(float(row["normalized"]) for row in read_csv(out / "evppi_table.csv")
                        if row["setting"] == setting)
            self.assertAlmostEqual(total, 1.0, places=12)

        report = json.loads((out / "report.json").read_text())
        manifest = report["manifest"]
        self.assertEqual(manifest["method"], "analytic")
        listed = {f["name"] for f in manifest["files"]}
        on_disk = {p.name for p in out.iterdir()} - {"report.json"}
        self.assertEqual(listed, on_disk)
        for f in manifest["files"]:
            data = (out / f["name"]).read_bytes()
            self.assertEqual(len(data), f["bytes"], f["name"])
            self.assertEqual(hashlib.sha256(data).hexdigest(), f["sha256"], f["name"])

    def test_mc_outputs_are_reproducible_across_threads(self):
        cfg = SOURCE / "configs" / "example1_mc.json"
        dirs = []
        for i, threads in enumerate((1, 1, 2)):
            out = self.tmp / f"out{i}"
            r = run("run", cfg, "--out", out, "--threads", threads)
            self.assertEqual(r.returncode, 0, r.stderr)
            dirs.append(out)
        csvs = sorted(p.name for p in dirs[0].glob("*.csv"))
        self.assertTrue(csvs)
        for name in csvs:
            first = (dirs[0] / name).read_bytes()
            for other in dirs[1:]:
                self.assertEqual(first, (other / name).read_bytes(), name)

    def test_seed_override_changes_mc_results(self):
        cfg = SOURCE / "configs" / "example1_mc.json"
        a, b = self.tmp / "a", self.tmp / "b"
        self.assertEqual(run("run", cfg, "--out", a, "--seed", 7).returncode, 0)
        self.assertEqual(run("run", cfg, "--out", b, "--seed", 8).returncode, 0)
        self.assertNotEqual((a / "evppi_table.csv").read_bytes(), (b / "evppi_table.csv").read_bytes())
        self.assertEqual(json.loads((a / "report.json").read_text())["manifest"]["seed"], 7)

    def test_sweep(self):
        out = self.tmp / "sweep"
        r = run("sweep", SOURCE / "configs" / "example1_safety.json", "--out", out, "--count", 7)
        self.assertEqual(r.returncode, 0, r.stderr)
        rows = read_csv(out / "sweep.csv")
        self.assertEqual(len(rows), 7)
        for row in rows:
            evpi = float(row["evpi"])
            for name in ("R", "S", "XR", "XS"):
                v = float(row[f"{name}_absolute"])
                self.assertGreaterEqual(v, 0.0)
                self.assertLessEqual(v, evpi * (1 + 1e-9))
        r = run("sweep", SOURCE / "configs" / "example1_safety.json", "--out", self.tmp / "bad",
                "--ratios", "0.01,1.5")
        self.assertEqual(r.returncode, 2)

    def test_form_curves(self):
        out = self.tmp / "fc"
        r = run("form-curves", "--pf", "1e-3,1e-2", "--ratio", "1e-3", "--out", out)
        self.assertEqual(r.returncode, 0, r.stderr)
        rows = read_csv(out / "curves.csv")
        self.assertEqual(len(rows), 2 * 99)

        def at(pf, alpha):
            for row in rows:
                if abs(float(row["pf"]) - pf) < 1e-12 and abs(float(row["alpha"]) - alpha) < 1e-12:
                    return float(row["evppi"])
            raise KeyError((pf, alpha))

        self.assertAlmostEqual(at(1e-3, 0.8) / at(1e-3, 0.35), 2.0, delta=0.3)
        self.assertAlmostEqual(at(1e-2, 0.8) / at(1e-2, 0.35), 34.0, delta=5.1)
        r = run("form-curves", "--pf", "0.7", "--out", self.tmp / "bad")
        self.assertNotEqual(r.returncode, 0)


if __name__ == "__main__":
    if len(sys.argv) < 3:
        sys.exit("usage: test_cli.py <relsens> <source-dir>")
    BINARY = os.path.abspath(sys.argv[1])
    SOURCE = Path(sys.argv[2]).resolve()
    unittest.main(argv=[sys.argv[0], "-v"])
