# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
import unittest
import gc
import os
import shutil
from src.configuration import configuration as cfg
from src.interfaces.cli_interface import main, EXIT_SUCCESS, EXIT_USAGE
from src.utility.bronze import json_utility


TESTING_PATH = os.path.join(cfg.PATHS.TEST_PATH, "CliInterfaceTest")


def run(name: str, *arguments: str) -> tuple:
    """
    Function for running a command with its report written to the testing folder.
    :return: Exit code and report, if written.
    """
    output = os.path.join(TESTING_PATH, f"{name}.json")
    code = main(["--output", output] + list(arguments))
    return code, json_utility.load(output) if os.path.exists(output) else None


class CliInterfaceTest(unittest.TestCase):
    """
    Test case class for testing the command line interface.
    """

    def test_01_analyze(self) -> None:
        """
        Method for testing the analysis commands.
        """
        code, report = run("hijack", "analyze", "hijack")
        self.assertEqual(code, EXIT_SUCCESS)
        self.assertEqual(len(report["hijack"]), 6)
        self.assertAlmostEqual(report["hijack"][0]["trustrate"], 237521, delta=1)
        self.assertEqual(report["hijack"][0]["c"], 38.1)
        self.assertEqual(report["manifest"]["command"], "analyze hijack")
        self.assertEqual(report["manifest"]["version"], "0.1.0")
        self.assertEqual(report["manifest"]["output_paths"], [os.path.join(TESTING_PATH, "hijack.json")])

        _, without_apathy = run("apathy", "analyze", "hijack", "--apathy", "0")
        self.assertEqual(without_apathy["hijack"], report["hijack"])
        _, loose = run("loose", "analyze", "hijack", "--epsilon", "0.001")
        self.assertTrue(all(low["gamma"] > high["gamma"] for low, high in zip(loose["hijack"], report["hijack"])))

        code, fairness = run("fairness", "analyze", "fairness", "--ring-sizes", "100", "1000", "--fractions", "0.5")
        self.assertEqual(code, EXIT_SUCCESS)
        self.assertEqual(len(fairness["fairness"]), 2)
        self.assertEqual(fairness["b_wait"]["blocks"], 38)
        self.assertLess(fairness["b_wait"]["bound"], 2.0 ** -30)

    def test_02_usage_errors(self) -> None:
        """
        Method for testing the usage exit code.
        """
        self.assertEqual(main(["analyze"]), EXIT_USAGE)
        self.assertEqual(main(["replay", "chain"]), EXIT_USAGE)
        self.assertEqual(main(["analyze", "hijack", "--epsilon", "2"]), EXIT_USAGE)
        self.assertEqual(main(["analyze", "fairness", "--honest", "0.3"]), EXIT_USAGE)
        self.assertEqual(main(["sim", "run", "--config", os.path.join(TESTING_PATH, "missing.json")]), EXIT_USAGE)
        self.assertEqual(main(["state", "inspect", "--snapshot", os.path.join(TESTING_PATH, "missing.json"),
                               "--key", "00"]), EXIT_USAGE)
        self.assertEqual(main(["bench", "blindsig", "--key-sizes", "1024"]), EXIT_USAGE)
        self.assertEqual(main(["bench", "urs", "--ring-sizes", "1"]), EXIT_USAGE)

    def test_03_simulation(self) -> None:
        """
        Method for testing bundled simulation runs and their reproducibility.
        """
        snapshot = os.path.join(TESTING_PATH, "honest_state.json")
        code, report = run("honest", "sim", "run", "--config", cfg.PATHS.HONEST_CONFIG_PATH, "--snapshot", snapshot)
        self.assertEqual(code, EXIT_SUCCESS)
        self.assertEqual(report["blacklist"], [])
        self.assertEqual(report["safety_violations"], 0)
        self.assertEqual(report["manifest"]["seed"], 7)
        self.assertEqual(report["manifest"]["config_path"], cfg.PATHS.HONEST_CONFIG_PATH)
        self.assertIn(snapshot, report["manifest"]["output_paths"])
        self.assertTrue(os.path.exists(snapshot))
        with open(os.path.join(TESTING_PATH, "honest.json"), "r", encoding="utf-8") as file:
            first = file.read()
        run("honest", "sim", "run", "--config", cfg.PATHS.HONEST_CONFIG_PATH, "--snapshot", snapshot)
        with open(os.path.join(TESTING_PATH, "honest.json"), "r", encoding="utf-8") as file:
            self.assertEqual(file.read(), first)

        code, adversarial = run("adversarial", "sim", "run", "--config", cfg.PATHS.ADVERSARIAL_CONFIG_PATH)
        self.assertEqual(code, EXIT_SUCCESS)
        self.assertGreater(len(adversarial["blacklist"]), 0)
        self.assertGreater(len(adversarial["evidence"]), 0)
        self.assertEqual(adversarial["final_root"], report["final_root"])

        _, reseeded = run("reseeded", "--seed", "8", "sim", "run", "--config", cfg.PATHS.HONEST_CONFIG_PATH)
        self.assertEqual(reseeded["manifest"]["seed"], 8)
        self.assertEqual(reseeded["config"]["seed"], 8)

    def test_04_state_inspection(self) -> None:
        """
        Method for testing state inspection of an exported snapshot.
        """
        snapshot = os.path.join(TESTING_PATH, "inspect_state.json")
        main(["--output", os.path.join(TESTING_PATH, "inspect_run.json"), "sim", "run", "--snapshot", snapshot])
        poll_key = min(key for key in json_utility.load(snapshot)["state"]["entries"] if key.startswith("50"))
        code, report = run("inspect", "state", "inspect", "--snapshot", snapshot, "--key", poll_key)
        self.assertEqual(code, EXIT_SUCCESS)
        self.assertTrue(report["inspection"]["present"])
        self.assertTrue(report["inspection"]["verified"])
        self.assertEqual(report["inspection"]["decoded"]["n_req"], 3)
        self.assertEqual(report["manifest"]["command"], "state inspect")

        code, report = run("absent", "state", "inspect", "--snapshot", snapshot, "--key", "poll:" + "ff" * 8)
        self.assertEqual(code, EXIT_SUCCESS)
        self.assertFalse(report["inspection"]["present"])
        self.assertEqual(report["inspection"]["proof"], "absence")

    @classmethod
    def setUpClass(cls):
        """
        Class method for setting up test case.
        """
        if not os.path.exists(TESTING_PATH):
            os.makedirs(TESTING_PATH)

    @classmethod
    def tearDownClass(cls):
        """
        Class method for setting tearing down test case.
        """
        if os.path.exists(TESTING_PATH):
            shutil.rmtree(TESTING_PATH, ignore_errors=True)
        gc.collect()


if __name__ == '__main__':
    unittest.main()
