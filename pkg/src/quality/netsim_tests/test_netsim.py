# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
import unittest
import gc
import json
import os
from dataclasses import replace
from random import Random
from unittest import mock
from src.configuration import configuration as cfg
from src.model.urs_control import urs
from src.model.blindsig_control.registration import Certificate, verify_certificate
from src.model.ledger_control.blocks import validate_batch
from src.model.ledger_control.transactions import (RegisterVoter, encode, identity_from_seed, public_bytes,
                                                   sign_transaction, tx_hash)
from src.model.ledger_control.validation import ReasonCode
from src.model.netsim_control.blacklist import AuditContext, audit_evidence
from src.model.netsim_control.data_model import (BehaviorProfile, Evidence, FMap, FSelect, SimulationConfig, Statement,
                                                 TxPoolPolicy, dishonest_count)
from src.model.netsim_control.discovery import discovery_traffic_bytes
from src.model.netsim_control.exceptions import ConfigurationException, SetupWindowException
from src.model.netsim_control.network import Network
from src.model.netsim_control.simulation import Simulation, run_simulation
from src.model.netsim_control.tx_pool import TxPool, held_back, pool_politicians, shard_of


def fake_vote(poll_id: bytes, index: int) -> bytes:
    """
    Function for building a vote-shaped encoding for pool tests.
    """
    return b"V" + poll_id + bytes([index]) * 40


def base_config(**update) -> SimulationConfig:
    """
    Function for building a small simulation configuration.
    """
    values = dict(seed=7, users=12, citizens=6, politicians=10, committee_size=3, sample_size=3, n_req=3, b_wait=2,
                  b_vw=4, blocks=10, poll_blocks=2)
    values.update(update)
    return SimulationConfig(**values)


class NetsimTest(unittest.TestCase):
    """
    Test case class for testing pools, offloads, blacklisting and full simulation runs.
    """

    def test_01_pool_mapping(self) -> None:
        """
        Method for testing shard mapping and pool politician selection.
        """
        grouped = TxPoolPolicy(shard_count=7)
        votes = [fake_vote(b"poll-abc", index) for index in range(30)]
        self.assertEqual(len({shard_of(vote, 5, grouped) for vote in votes}), 1)
        scattered = TxPoolPolicy(f_map=FMap.DET_TX_HASHMAP, shard_count=7)
        self.assertGreater(len({shard_of(vote, 5, scattered) for vote in votes}), 1)
        self.assertTrue(all(0 <= shard_of(vote, 9, scattered) < 7 for vote in votes))

        assignment = pool_politicians(b"\x01" * 32, list(range(10)), 4)
        self.assertEqual(len(assignment), 4)
        self.assertEqual(sorted(assignment.values()), [0, 1, 2, 3])
        self.assertEqual(pool_politicians(b"\x01" * 32, list(range(10)), 4), assignment)
        self.assertEqual(len(pool_politicians(b"\x01" * 32, [3, 5, 8], 45)), 3)

    def test_02_pool_selection(self) -> None:
        """
        Method for testing selection policies and the group commit heuristic.
        """
        first, second, third = b"P" + b"\x01" * 60, b"P" + b"\x02" * 60, b"P" + b"\x03" * 60
        pool = TxPool()
        pool.add(first, 3, 9)
        pool.add(second, 1, None)
        pool.add(third, 2, 4)
        pool.add(first, 8)
        self.assertEqual(len(pool), 3)
        self.assertIn(first, pool)

        oldest = TxPoolPolicy(f_map=FMap.DET_TX_HASHMAP, f_select=FSelect.OLDEST, shard_count=1)
        self.assertEqual(pool.select(0, 5, oldest, 10, Random(1)), [second, third, first])
        self.assertEqual(pool.select(0, 5, oldest, 2, Random(1)), [second, third])
        deadline = TxPoolPolicy(f_map=FMap.DET_TX_HASHMAP, f_select=FSelect.DEADLINE, shard_count=1)
        self.assertEqual(pool.select(0, 5, deadline, 10, Random(1)), [third, first, second])
        shuffled = TxPoolPolicy(f_map=FMap.DET_TX_HASHMAP, f_select=FSelect.RANDOM_TX, shard_count=1)
        self.assertEqual(sorted(pool.select(0, 5, shuffled, 10, Random(1))), sorted([first, second, third]))
        pool.remove([second])
        self.assertNotIn(second, pool)

        grouped = TxPoolPolicy(shard_count=1, group_wait=2)
        votes = TxPool()
        votes.add(fake_vote(b"poll-abc", 1), 5, 20)
        votes.add(fake_vote(b"poll-abc", 2), 6, 20)
        votes.add(fake_vote(b"poll-xyz", 1), 5, 8)
        pending = {item.raw: item for item in votes.pending()}
        self.assertTrue(held_back(pending[fake_vote(b"poll-abc", 2)], votes, 6, grouped))
        self.assertFalse(held_back(pending[fake_vote(b"poll-abc", 2)], votes, 7, grouped))
        self.assertTrue(held_back(pending[fake_vote(b"poll-xyz", 1)], votes, 5, grouped))
        self.assertFalse(held_back(pending[fake_vote(b"poll-xyz", 1)], votes, 6, grouped))
        self.assertEqual(len(votes.select(0, 7, grouped, 10, Random(3))), 3)

    def test_03_network(self) -> None:
        """
        Method for testing exchanges with deadlines and traffic accounting.
        """
        network = Network(0.05)
        answers = {"a": ("x", 10, 0.0), "b": ("y", 20, 1.0), "c": None}
        result = network.exchange("citizen", ["a", "b", "c"], 7, answers.get, 0.2)
        self.assertEqual([reply.sender for reply in result.replies], ["a"])
        self.assertEqual(result.missing, ["b", "c"])
        self.assertFalse(result.complete)
        self.assertAlmostEqual(result.elapsed, 0.2)
        self.assertEqual(network.counter("citizen").bytes_sent, 21)
        self.assertEqual(network.counter("citizen").bytes_received, 10)
        self.assertEqual(network.counter("b").bytes_sent, 0)

        result = network.exchange("citizen", ["a", "b"], 7, answers.get, 2.0)
        self.assertTrue(result.complete)
        self.assertEqual([reply.sender for reply in result.replies], ["a", "b"])
        self.assertAlmostEqual(result.elapsed, 1.1)
        self.assertAlmostEqual(network.round_trip("citizen", "a", 8, 32), 0.1)
        self.assertEqual(network.counter("a").bytes_received, 7 + 7 + 8)

    def test_04_statements_and_audit(self) -> None:
        """
        Method for testing statement signatures and the independent evidence audit.
        """
        identity, other = identity_from_seed("politician/1"), identity_from_seed("politician/2")
        policy = TxPoolPolicy(f_map=FMap.DET_TX_HASHMAP, shard_count=2)
        raw = b"P" + b"\x05" * 60
        actual = shard_of(raw, 5, policy)
        claimed = 1 - actual
        statement = Statement(1, "pool", 5, claimed.to_bytes(4, "big"), tx_hash(raw)).sign(identity)
        self.assertTrue(statement.verify(public_bytes(identity)))
        self.assertFalse(statement.verify(public_bytes(other)))
        self.assertFalse(replace(statement, payload=b"\x00" * 32).verify(public_bytes(identity)))

        context = AuditContext({1: public_bytes(identity), 2: public_bytes(other)}, {}, self.params, 2, policy,
                               pool_shards={5: {1: claimed, 2: actual}})
        self.assertTrue(audit_evidence(Evidence(1, "pool", statement, {"tx": raw}), context))
        self.assertFalse(audit_evidence(Evidence(2, "pool", statement, {"tx": raw}), context))
        self.assertFalse(audit_evidence(Evidence(1, "ring_hash", statement, {"tx": raw}), context))
        honest = Statement(2, "pool", 5, actual.to_bytes(4, "big"), tx_hash(raw)).sign(other)
        self.assertFalse(audit_evidence(Evidence(2, "pool", honest, {"tx": raw}), context))
        forged = Statement(1, "pool", 5, claimed.to_bytes(4, "big"), tx_hash(raw)).sign(other)
        self.assertFalse(audit_evidence(Evidence(1, "pool", forged, {"tx": raw}), context))

    def test_05_discovery_traffic(self) -> None:
        """
        Method for testing the daily discovery traffic estimate.
        """
        traffic = discovery_traffic_bytes()
        self.assertEqual(traffic["polls_per_user"], 5)
        self.assertEqual(traffic["poll_ids"], 8000)
        self.assertEqual(traffic["rings"], 4000)
        self.assertEqual(traffic["paths"], 1500)
        self.assertEqual(traffic["hashes"], 160)
        self.assertEqual(traffic["total"], 13660)

    def test_06_configuration(self) -> None:
        """
        Method for testing simulation configuration checks.
        """
        with self.assertRaises(ValueError):
            base_config(committee_size=7)
        with self.assertRaises(ValueError):
            base_config(sample_size=11)
        with self.assertRaises(ValueError):
            base_config(n_req=12)
        with self.assertRaises(ValueError):
            base_config(late_rate=1.5)
        with self.assertRaises(ValueError):
            base_config(malicious_politicians=1.0)
        self.assertEqual(dishonest_count(0.95, 10), 10)
        self.assertEqual(dishonest_count(0.9, 10), 9)
        self.assertEqual(dishonest_count(0.25, 6), 2)
        with self.assertRaises(ValueError):
            base_config(malicious_politicians=0.95)
        with self.assertRaises(ValueError):
            base_config(proposal_timeout=-1.0)
        with self.assertRaises(ValueError):
            base_config(permissioned=True, rsa_bits=1024)
        base_config(malicious_politicians=0.95, ensure_good_citizens=False)
        with self.assertRaises(ConfigurationException):
            Simulation(base_config().copy(update={"malicious_politicians": 0.95}))

        simulation = Simulation(base_config(malicious_politicians=0.9))
        for attempts in [64, 1]:
            with mock.patch("src.model.netsim_control.simulation.SAFE_SAMPLE_ATTEMPTS", attempts):
                for number in range(1, 21):
                    for citizen in simulation.citizens:
                        sample = simulation.safe_sample(citizen, number)
                        self.assertTrue(simulation.is_good(sample))
                        self.assertEqual(len(set(sample.politician_ids)), 3)
        self.assertEqual(base_config().threat_model_warnings(), [])
        self.assertEqual(len(base_config(malicious_politicians=0.9, malicious_citizens=0.5).threat_model_warnings()),
                         2)
        with self.assertRaises(ConfigurationException):
            SimulationConfig.from_file(os.path.join(os.path.dirname(__file__), "missing.json"))

    def test_07_honest_run(self) -> None:
        """
        Method for testing that an honest network commits every valid vote on the fast path.
        """
        config = base_config()
        simulation = Simulation(config)
        report = simulation.run()
        self.assertEqual(report.safety_violations, 0)
        self.assertEqual(report.offload_failures, 0)
        self.assertEqual(report.blacklist, [])
        self.assertEqual(report.rejections, {})
        self.assertEqual(report.submitted["registrations"], 12)
        self.assertEqual(report.submitted["polls"], 2)
        self.assertGreater(report.committed_votes, 0)
        self.assertEqual(report.committed_votes, report.submitted["valid_votes"])
        self.assertEqual([item["votes"] for item in report.tallies], [3, 3])
        self.assertTrue(all(item["ring"] == 3 for item in report.tallies))
        self.assertEqual(len(report.blocks), 10)
        self.assertEqual(sum(item["transactions"] for item in report.blocks), 12 + 2 + report.committed_votes)
        self.assertEqual(sum(counters["conflicts"] for counters in report.counters.values()), 0)
        self.assertGreater(report.mean_batch_size, 0)
        self.assertGreater(report.throughput, 0)
        self.assertGreaterEqual(report.logical_time, 10 * config.base_block_time)

        log = simulation.archive.commit_log()
        self.assertEqual([entry["number"] for entry in log], list(range(1, 11)))
        self.assertEqual(log[-1]["state_root"], report.final_root)
        self.assertEqual(log[0]["outcomes"], {"ACCEPTED": 12})
        self.assertEqual(simulation.archive.height(), 10)

    def test_08_duplicate_and_late_votes(self) -> None:
        """
        Method for testing that duplicate and late votes are rejected with their reasons.
        """
        report = run_simulation(base_config(duplicate_rate=1.0))
        self.assertGreater(report.submitted["duplicate_votes"], 0)
        self.assertEqual(report.rejections.get("DUPLICATE_TAG"), report.submitted["duplicate_votes"])
        self.assertEqual(report.committed_votes, report.submitted["valid_votes"])
        self.assertEqual(report.safety_violations, 0)

        report = run_simulation(base_config(late_rate=1.0, blocks=11))
        self.assertGreater(report.submitted["late_votes"], 0)
        self.assertEqual(report.rejections.get("WINDOW_CLOSED"), report.submitted["late_votes"])
        self.assertEqual(report.committed_votes, 0)

    def test_09_malicious_politicians(self) -> None:
        """
        Method for testing that a politician majority cannot change the committed state.
        """
        honest = run_simulation(base_config())
        simulation = Simulation(base_config(malicious_politicians=0.8))
        report = simulation.run()
        self.assertEqual(report.final_root, honest.final_root)
        self.assertEqual(report.committed_votes, honest.committed_votes)
        self.assertEqual(report.safety_violations, 0)
        self.assertGreater(len(report.blacklist), 0)
        self.assertIn("ring_hash", {entry["kind"] for entry in report.blacklist})
        self.assertGreater(sum(counters["conflicts"] for counters in report.counters.values()), 0)
        self.assertTrue(all(audit_evidence(evidence, simulation.audit) for evidence in report.evidence))
        self.assertTrue(all(simulation.politicians[politician].behavior.wrong_ring_hash
                            for politician in simulation.blacklist.ids()))

        silent = BehaviorProfile(unresponsive=True, drop_polls=True, wrong_verification_claims=True)
        report = run_simulation(base_config(malicious_politicians=0.8, politician_behavior=silent))
        self.assertEqual(report.final_root, honest.final_root)
        self.assertEqual(report.safety_violations, 0)
        self.assertEqual(report.offload_failures, 0)
        self.assertGreater(sum(counters["timeouts"] for counters in report.counters.values()), 0)

    def test_10_malicious_citizens(self) -> None:
        """
        Method for testing that dishonest proposers only cost throughput.
        """
        honest = run_simulation(base_config())
        report = run_simulation(base_config(malicious_citizens=0.5))
        self.assertEqual(len(report.warnings), 1)
        self.assertTrue(any(not item["honest_proposer"] for item in report.blocks))
        self.assertTrue(all(item["transactions"] == 0 for item in report.blocks if not item["honest_proposer"]))
        self.assertLessEqual(report.committed_votes, honest.committed_votes)
        self.assertLessEqual(report.votes_per_block, honest.votes_per_block)
        self.assertGreater(report.logical_time, honest.logical_time)
        self.assertLess(report.throughput, honest.throughput)

    def test_11_determinism(self) -> None:
        """
        Method for testing that identical configurations give identical reports.
        """
        config = base_config(seed=11, duplicate_rate=0.5)
        first, second = run_simulation(config).to_json(), run_simulation(config).to_json()
        self.assertEqual(first, second)
        self.assertEqual(json.loads(first)["config"]["seed"], 11)
        self.assertNotEqual(run_simulation(base_config(seed=12)).final_root, json.loads(first)["final_root"])

    def test_12_adversarial_sweep(self) -> None:
        """
        Method for testing safety over seeded runs at the threat model bounds.
        """
        blacklisted = 0
        for seed in range(cfg.SIMULATION_TRIALS):
            simulation = Simulation(base_config(seed=seed, blocks=8, malicious_politicians=0.8,
                                                malicious_citizens=0.25))
            report = simulation.run()
            self.assertEqual(report.warnings, [], f"seed {seed}")
            self.assertEqual(report.safety_violations, 0, f"seed {seed}")
            self.assertEqual(report.offload_failures, 0, f"seed {seed}")
            self.assertTrue(all(audit_evidence(evidence, simulation.audit) for evidence in report.evidence))
            self.assertTrue(all(not simulation.politicians[politician].behavior.honest
                                for politician in simulation.blacklist.ids()))
            blacklisted += len(report.blacklist)
        self.assertGreater(blacklisted, 0)

    def test_13_throughput_degradation(self) -> None:
        """
        Method for testing that throughput falls with every step of politician and citizen dishonesty.
        """
        politician_levels, citizen_levels = [0.0, 0.5, 0.8], [0.0, 0.1, 0.25]
        seeds = range(max(10, cfg.SIMULATION_TRIALS // 5))
        throughput = {}
        for politicians in politician_levels:
            for citizens in citizen_levels:
                reports = [run_simulation(base_config(seed=seed, citizens=10, blocks=12, poll_blocks=4,
                                                      malicious_politicians=politicians,
                                                      malicious_citizens=citizens)) for seed in seeds]
                self.assertTrue(all(report.safety_violations == 0 for report in reports))
                throughput[(politicians, citizens)] = (sum(report.committed_votes for report in reports)
                                                       / sum(report.logical_time for report in reports))
        for citizens in citizen_levels:
            row = [throughput[(politicians, citizens)] for politicians in politician_levels]
            self.assertTrue(row[0] > row[1] > row[2], f"{citizens:.0%} citizens: {row}")
        for politicians in politician_levels:
            column = [throughput[(politicians, citizens)] for citizens in citizen_levels]
            self.assertTrue(column[0] > column[1] > column[2], f"{politicians:.0%} politicians: {column}")

    def test_14_permissioned_registration(self) -> None:
        """
        Method for testing that permissioned users register with certificates after the setup window.
        """
        config = base_config(permissioned=True, rsa_bits=cfg.RSA_KEY_SIZES[0])
        simulation = Simulation(config)
        voter = simulation.voters[0]
        with self.assertRaises(SetupWindowException):
            simulation.register(voter, 1)
        simulation.admin.open()
        with self.assertRaises(SetupWindowException):
            simulation.register(voter, 1)
        simulation.admin.close()
        self.assertEqual(simulation.submitted["registrations"], 0)
        self.assertEqual(len(simulation.pool), 0)

        report = simulation.run()
        self.assertEqual(report.rejections, {})
        self.assertEqual(report.safety_violations, 0)
        self.assertEqual(report.submitted["registrations"], 12)
        self.assertEqual(len(simulation.admin.transcript), 12)
        self.assertAlmostEqual(simulation.registration_closed_at, config.setup_time)
        self.assertGreaterEqual(report.logical_time, config.setup_time + config.blocks * config.base_block_time)
        self.assertGreater(report.committed_votes, 0)
        self.assertEqual(report.committed_votes, report.submitted["valid_votes"])
        role_keys = simulation.admin.public_keys()
        self.assertTrue(all(verify_certificate(role_keys, Certificate.from_bytes(voter.certificate))
                            for voter in simulation.voters))

        keys = urs.keygen(simulation.params, Random(5))
        unsigned = encode(sign_transaction(RegisterVoter(keys.pk.to_bytes(), 1),
                                           identity_from_seed("user/late")))
        result = validate_batch(simulation.ledger, [unsigned], config.blocks + 1)[0]
        self.assertEqual(result.reason, ReasonCode.INVALID_CERTIFICATE)
        with self.assertRaises(SetupWindowException):
            simulation.register(replace(voter, certificate=None), config.blocks + 1)

    @classmethod
    def setUpClass(cls):
        """
        Class method for setting up test case.
        """
        cls.params = urs.setup()

    @classmethod
    def tearDownClass(cls):
        """
        Class method for setting tearing down test case.
        """
        del cls.params
        gc.collect()


if __name__ == '__main__':
    unittest.main()
