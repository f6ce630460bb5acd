"""End-to-end checks of the dca executable: exit codes, outputs, schemas."""

import json
import os
import subprocess
import sys
import tempfile
import time
import unittest
from pathlib import Path

import jsonschema
import numpy as np
from referencing import Registry, Resource

DCA = Path(os.environ["DCA_CLI"])
SCHEMAS = Path(os.environ["DCA_SCHEMAS"])

SIGMA_ONE = np.array([[1.5, -0.5, -0.5], [-0.5, 1.5, -0.5], [-0.5, -0.5, 1.5]])
SIGMA_TWO = np.array([[1.5, -0.5, 0.0], [-0.5, 1.5, 0.0], [0.0, 0.0, 1.0]])


def load_schema(name):
    return json.loads((SCHEMAS / name).read_text())


OUTPUT_SCHEMA = load_schema("dca-output.schema.json")
CONFIG_SCHEMA = load_schema("sim-config.schema.json")
REGISTRY = Registry().with_resources(
    [
        (OUTPUT_SCHEMA["$id"], Resource.from_contents(OUTPUT_SCHEMA)),
        (CONFIG_SCHEMA["$id"], Resource.from_contents(CONFIG_SCHEMA)),
    ]
)
VALIDATOR = jsonschema.Draft202012Validator(OUTPUT_SCHEMA, registry=REGISTRY)


def write_csv(path, x, header=None):
    with open(path, "w") as f:
        if header:
            f.write(",".join(header) + "\n")
        for row in x:
            f.write(",".join(repr(float(v)) for v in row) + "\n")


def run(*args, env=None):
    full_env = dict(os.environ)
    full_env.pop("DCA_THREADS", None)
    if env:
        full_env.update(env)
    return subprocess.run([str(DCA), *map(str, args)], capture_output=True, text=True, env=full_env)


def payload(doc):
    doc = dict(doc)
    doc.pop("manifest")
    return doc


class CliTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.tmp = tempfile.TemporaryDirectory()
        cls.dir = Path(cls.tmp.name)
        rng = np.random.default_rng(7)
        cls.a = cls.dir / "a.csv"
        cls.b = cls.dir / "b.csv"
        cls.big_a = cls.dir / "big_a.csv"
        cls.big_b = cls.dir / "big_b.csv"
        write_csv(cls.a, rng.multivariate_normal(np.zeros(3), SIGMA_ONE, 200), ["g1", "g2", "g3"])
        write_csv(cls.b, rng.multivariate_normal(np.zeros(3), SIGMA_TWO, 200), ["g1", "g2", "g3"])
        write_csv(cls.big_a, rng.multivariate_normal(np.zeros(3), SIGMA_ONE, 10000))
        write_csv(cls.big_b, rng.multivariate_normal(np.zeros(3), SIGMA_TWO, 10000))
        cls.sigma_one = cls.dir / "sigma1.csv"
        cls.sigma_two = cls.dir / "sigma2.csv"
        write_csv(cls.sigma_one, SIGMA_ONE)
        write_csv(cls.sigma_two, SIGMA_TWO)

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def output(self, name):
        return self.dir / name

    def test_differential_test_on_identical_files(self):
        out = self.output("same.json")
        r = run("test", "--data1", self.a, "--data2", self.a, "--header", "--alpha", 0.1, "--seed", 1, "--out", out)
        self.assertEqual(r.returncode, 0, r.stderr)
        doc = json.loads(out.read_text())
        VALIDATOR.validate(doc)
        self.assertFalse(doc["network_reject"])
        self.assertEqual(doc["differential_edges"], [])
        self.assertEqual([n["name"] for n in doc["nodes"]], ["g1", "g2", "g3"])

    def test_toy_pair_edges_at_large_n(self):
        r = run("test", "--data1", self.big_a, "--data2", self.big_b, "--alpha", 0.1, "--seed", 2, "--lambda", 0.05)
        self.assertEqual(r.returncode, 0, r.stderr)
        doc = json.loads(r.stdout)
        VALIDATOR.validate(doc)
        self.assertIn([0, 2], doc["differential_edges"])
        self.assertIn([1, 2], doc["differential_edges"])
        self.assertNotIn([0, 1], doc["differential_edges"])

    def test_group_split_mode_and_threads(self):
        args = ["test", "--data1", self.a, "--data2", self.b, "--header", "--mode", "split", "--test", "group",
                "--perms", 199, "--seed", 5, "--edge-rule", "and"]
        one = run(*args, "--threads", 1)
        many = run(*args, env={"DCA_THREADS": "3"})
        self.assertEqual(one.returncode, 0, one.stderr)
        self.assertEqual(many.returncode, 0, many.stderr)
        d1, d3 = json.loads(one.stdout), json.loads(many.stdout)
        VALIDATOR.validate(d1)
        self.assertEqual(d1["manifest"]["threads"], 1)
        self.assertEqual(d3["manifest"]["threads"], 3)
        self.assertEqual(payload(d1), payload(d3))

    def test_missing_data2_is_a_usage_error(self):
        r = run("test", "--data1", self.a)
        self.assertEqual(r.returncode, 2)
        self.assertIn("data2", r.stderr)

    def test_mismatched_columns(self):
        four = self.output("four.csv")
        write_csv(four, np.random.default_rng(1).normal(size=(50, 4)))
        r = run("test", "--data1", self.big_a, "--data2", four)
        self.assertEqual(r.returncode, 2)
        self.assertIn("variables", r.stderr)

    def test_non_numeric_cell(self):
        bad = self.output("bad.csv")
        bad.write_text("1,2\n3,NA\n")
        r = run("test", "--data1", bad, "--data2", bad)
        self.assertEqual(r.returncode, 2)
        self.assertIn("line 2, column 2", r.stderr)

    def test_missing_file(self):
        r = run("quant", "--data1", self.dir / "nope.csv", "--data2", self.a)
        self.assertEqual(r.returncode, 2)

    def test_quant(self):
        r = run("quant", "--data1", self.a, "--data2", self.b, "--header", "--perms", 199, "--alpha", 0.1,
                "--seed", 3)
        self.assertEqual(r.returncode, 0, r.stderr)
        doc = json.loads(r.stdout)
        VALIDATOR.validate(doc)
        self.assertEqual(len(doc["nodes"]), 3)
        same = run("quant", "--data1", self.a, "--data2", self.a, "--header", "--perms", 199, "--seed", 3)
        self.assertEqual(json.loads(same.stdout)["rejected_nodes"], [])

    def test_quant_rejects_few_permutations(self):
        r = run("quant", "--data1", self.a, "--data2", self.b, "--header", "--perms", 50)
        self.assertEqual(r.returncode, 2)

    def test_numerical_failure_exit_code(self):
        const = self.output("const.csv")
        x = np.random.default_rng(3).normal(size=(30, 3))
        x[:, 1] = 4.0
        write_csv(const, x)
        r = run("quant", "--data1", const, "--data2", self.big_a, "--perms", 99)
        self.assertEqual(r.returncode, 3, r.stderr)

    def test_check(self):
        r = run("check", "--sigma", self.sigma_one, "--node", 0, "--lambda", 0.1, "--n", 100)
        self.assertEqual(r.returncode, 0, r.stderr)
        doc = json.loads(r.stdout)
        VALIDATOR.validate(doc)
        self.assertEqual(doc["a2"]["q"], 2)
        self.assertAlmostEqual(doc["a2"]["terms"][0], 0.2)
        self.assertAlmostEqual(doc["a2"]["terms"][1], np.sqrt(np.log(3) / 100) * 20)
        self.assertAlmostEqual(doc["a2"]["terms"][2], 0.1 * np.sqrt(2) / 0.5)

        zero = run("check", "--sigma", self.sigma_two, "--node", 2, "--lambda", 0.3)
        doc = json.loads(zero.stdout)
        VALIDATOR.validate(doc)
        self.assertEqual(doc["a2"]["q"], 0)
        self.assertIsNone(doc["a2"]["b_min"])
        self.assertEqual(doc["a3"]["margin"], 1.0)

        re = run("check", "--sigma", self.sigma_one, "--node", 0, "--lambda", 0.1, "--re-support", "0,1")
        self.assertEqual(json.loads(re.stdout)["restricted_eigenvalue"]["support"], [0, 1])

    def test_check_rejects_bad_matrices(self):
        asym = self.output("asym.csv")
        asym.write_text("1,0.2\n0.3,1\n")
        rect = self.output("rect.csv")
        rect.write_text("1,0,0\n0,1,0\n")
        indef = self.output("indef.csv")
        indef.write_text("1,2\n2,1\n")
        for path in (asym, rect, indef):
            r = run("check", "--sigma", path, "--node", 0, "--lambda", 0.1)
            self.assertEqual(r.returncode, 2, path.name)

    def test_simulate_smoke(self):
        cfg = self.output("smoke.json")
        cfg.write_text(json.dumps({"reps": 1, "n_values": [100]}))
        jsonschema.validate(json.loads(cfg.read_text()), CONFIG_SCHEMA)
        out = self.output("smoke")
        start = time.monotonic()
        r = run("simulate", "--config", cfg, "--out", out)
        elapsed = time.monotonic() - start
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertLess(elapsed, 30.0)
        doc = json.loads((out / "report.json").read_text())
        VALIDATOR.validate(doc)
        self.assertEqual(doc["reps_completed"], 1)
        lines = (out / "metrics.csv").read_text().splitlines()
        self.assertEqual(lines[0], "method,n,metric,value")
        self.assertGreater(len(lines), 10)

    def test_simulate_config_errors(self):
        bad = self.output("bad.json")
        bad.write_text("{ not json")
        r = run("simulate", "--config", bad, "--out", self.output("x"))
        self.assertEqual(r.returncode, 2)
        bad.write_text(json.dumps({"reps": 0}))
        r = run("simulate", "--config", bad, "--out", self.output("x"))
        self.assertEqual(r.returncode, 2)
        self.assertIn("reps", r.stderr)
        bad.write_text(json.dumps({"repz": 3}))
        r = run("simulate", "--config", bad, "--out", self.output("x"))
        self.assertEqual(r.returncode, 2)
        self.assertIn("repz", r.stderr)

    def test_rerun_reproduces_payload(self):
        first = self.output("first.json")
        r = run("test", "--data1", self.a, "--data2", self.b, "--header", "--mode", "split", "--seed", 11,
                "--out", first)
        self.assertEqual(r.returncode, 0, r.stderr)
        second = self.output("second.json")
        r = run("rerun", "--manifest", first, "--out", second)
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertEqual(payload(json.loads(first.read_text())), payload(json.loads(second.read_text())))

    def test_rerun_detects_changed_input(self):
        data = self.output("mutable.csv")
        data.write_text(self.a.read_text())
        first = self.output("m.json")
        self.assertEqual(run("test", "--data1", data, "--data2", self.b, "--header", "--out", first).returncode, 0)
        data.write_text(self.b.read_text())
        r = run("rerun", "--manifest", first, "--out", self.output("m2.json"))
        self.assertEqual(r.returncode, 2)

    def test_version(self):
        r = run("--version")
        self.assertEqual(r.returncode, 0)
        self.assertRegex(r.stdout, r"\d+\.\d+\.\d+")


if __name__ == "__main__":
    unittest.main(argv=[sys.argv[0], "-v"])
