# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from __future__ import annotations
import json
from dataclasses import dataclass, field
from random import Random
from typing import Dict, List, Optional, Tuple
from tqdm import tqdm
from src.configuration import configuration as cfg
from src.model.group_control.group_primitives import domain_hash, label
from src.model.urs_control import urs
from src.model.blindsig_control.registration import AdminSigner, registration_ceremony
from src.model.blindsig_control.rsa_blind import SeededByteSource
from src.model.urs_control.data_model import UrsKeyPair
from src.model.ledger_control.archive import BlockArchive
from src.model.ledger_control.blocks import (LedgerState, apply_block, assemble_block, block_start_state, draw_rings,
                                             tally, validate_batch)
from src.model.ledger_control.data_model import LedgerConfig
from src.model.ledger_control.exceptions import InvalidBlockException
from src.model.ledger_control.transactions import (RegisterVoter, CreatePoll, CreateVote, encode, identity_from_seed,
                                                   poll_content, public_bytes, sign_transaction, tx_hash, vote_value)
from src.model.sortition_control.sortition import next_seed, ring_hash_of
from src.model.netsim_control.blacklist import AuditContext, Blacklist, audit_evidence
from src.model.netsim_control.data_model import (BehaviorProfile, Evidence, NodeSpec, Role, SafeSample,
                                                 SimulationConfig, HONEST, dishonest_count)
from src.model.netsim_control.discovery import discover_polls
from src.model.netsim_control.exceptions import ConfigurationException, OffloadFailureException, SetupWindowException
from src.model.netsim_control.network import Network
from src.model.netsim_control.offload import Timing, offload_ring, offload_vote_verify, ring_evidence
from src.model.netsim_control.politician import ChainView, Politician, VerdictOracle
from src.model.netsim_control.tx_pool import TxPool, group_of, pool_politicians, shard_of


IDENTITY_UPDATE_LENGTH = 68
SAFE_SAMPLE_ATTEMPTS = 64


@dataclass
class Voter:
    """
    Registered user casting votes.
    """
    user_id: int
    identity_seed: str
    keys: UrsKeyPair
    topic: int
    last_checked: int = 0
    certificate: Optional[bytes] = None

    @property
    def name(self) -> str:
        return f"user-{self.user_id}"

    @property
    def public_key(self) -> bytes:
        return self.keys.pk.to_bytes()


@dataclass
class SimReport:
    """
    Outcome of a simulation run.
    """
    config: dict
    blocks: List[dict]
    counters: Dict[str, dict]
    blacklist: List[dict]
    tallies: List[dict]
    submitted: Dict[str, int]
    rejections: Dict[str, int]
    final_root: str
    logical_time: float
    committed_votes: int
    throughput: float
    votes_per_block: float
    mean_batch_size: float
    safety_violations: int
    offload_failures: int
    warnings: List[str]
    evidence: List[Evidence] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {"config": self.config, "blocks": self.blocks, "counters": self.counters, "blacklist": self.blacklist,
                "evidence": [evidence.to_dict() for evidence in self.evidence], "tallies": self.tallies,
                "submitted": self.submitted, "rejections": self.rejections, "final_root": self.final_root,
                "logical_time": round(self.logical_time, 9), "committed_votes": self.committed_votes,
                "throughput": round(self.throughput, 9), "votes_per_block": round(self.votes_per_block, 9),
                "mean_batch_size": round(self.mean_batch_size, 9), "safety_violations": self.safety_violations,
                "offload_failures": self.offload_failures, "warnings": self.warnings}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


class Simulation(object):
    """
    Class, representing a deterministic run of citizens, politicians and users on one chain.
    """

    def __init__(self, config: SimulationConfig) -> None:
        """
        Initiation method.
        :param config: Simulation configuration.
        """
        self._logger = cfg.LOGGER
        self.config = config
        self.warnings = config.threat_model_warnings()
        for warning in self.warnings:
            self._logger.warning(f"Threat model: {warning}")

        self.params = urs.setup()
        self.admin: Optional[AdminSigner] = None
        self.registration_closed_at: Optional[float] = None
        if config.permissioned:
            self.admin = AdminSigner(config.topics, config.rsa_bits,
                                     domain_hash(label("seed"), f"admin/{config.seed}".encode("utf-8")))
        ledger_config = LedgerConfig(b_wait=config.b_wait, epoch_length=config.epoch_length, topics=config.topics,
                                     permissioned=config.permissioned, lam=config.lam,
                                     block_size_limit=config.block_size_limit)
        self.ledger = LedgerState(ledger_config, self.params, None if self.admin is None else self.admin.public_keys(),
                                  genesis=f"sim/{config.seed}")
        self.archive = BlockArchive()
        self.network = Network(config.latency)
        self.timing = Timing(config.t_hash, config.t_verif, config.n_thread)
        self.oracle = VerdictOracle()
        self.pool = TxPool()

        self.politicians = {spec.node_id: Politician(spec, self.network) for spec in self._nodes(
            Role.POLITICIAN, config.politicians, config.malicious_politicians, config.politician_behavior)}
        if config.ensure_good_citizens and not any(politician.behavior.honest
                                                   for politician in self.politicians.values()):
            raise ConfigurationException(f"sim/{config.seed}", "good citizens need at least one honest politician")
        self.citizens = self._nodes(Role.CITIZEN, config.citizens, config.malicious_citizens,
                                    BehaviorProfile(drop_transactions=True))
        self.voters = [Voter(index, f"user/{config.seed}/{index}",
                             urs.keygen(self.params, self.rng("user", index)),
                             config.topics[index % len(config.topics)]) for index in range(config.users)]

        self.audit = AuditContext({politician.politician_id: politician.spec.public_key
                                   for politician in self.politicians.values()},
                                  {0: self.ledger.state.root()}, self.params, config.b_wait, config.policy,
                                  digest_length=ledger_config.digest_length)
        self.blacklist = Blacklist(self.audit)

        self.poll_ids: List[bytes] = []
        self.scheduled: Dict[int, List[Tuple[bytes, Optional[int]]]] = {}
        self.submitted = {"registrations": 0, "polls": 0, "valid_votes": 0, "duplicate_votes": 0, "late_votes": 0}
        self.rejections: Dict[str, int] = {}
        self.block_log: List[dict] = []
        self.batch_sizes: List[int] = []
        self.logical_time = 0.0
        self.safety_violations = 0
        self.offload_failures = 0

    """
    Setup
    """

    def rng(self, *parts: object) -> Random:
        """
        Method for deriving an independent deterministic random source.
        """
        tag = "/".join(str(part) for part in (self.config.seed,) + parts).encode("utf-8")
        return Random(int.from_bytes(domain_hash(label("seed"), tag), "big"))

    def _nodes(self, role: Role, count: int, malicious: float, behavior: BehaviorProfile) -> List[NodeSpec]:
        order = list(range(count))
        self.rng(role.value, "malicious").shuffle(order)
        dishonest = set(order[:dishonest_count(malicious, count)])
        return [NodeSpec(node_id, role, identity_from_seed(f"{role.value}/{self.config.seed}/{node_id}"),
                         behavior if node_id in dishonest else HONEST) for node_id in range(count)]

    def active_politicians(self) -> List[int]:
        return [politician_id for politician_id in sorted(self.politicians) if politician_id not in self.blacklist]

    def safe_sample(self, citizen: NodeSpec, number: int) -> SafeSample:
        """
        Method for drawing the safe sample of a citizen for a block.
        With ensure_good_citizens the sample is redrawn until it holds an honest politician. After
        SAFE_SAMPLE_ATTEMPTS draws a random member is swapped for a random honest politician.
        """
        active = self.active_politicians()
        size = min(self.config.sample_size, len(active))
        rng = self.rng("sample", number, citizen.node_id)
        sample = sorted(rng.sample(active, size))
        if self.config.ensure_good_citizens:
            honest = [politician_id for politician_id in active if self.politicians[politician_id].behavior.honest]
            if not honest:
                raise ConfigurationException(f"sim/{self.config.seed}", f"no honest politician active at {number}")
            attempts = 1
            while not any(politician_id in honest for politician_id in sample) and attempts < SAFE_SAMPLE_ATTEMPTS:
                sample = sorted(rng.sample(active, size))
                attempts += 1
            if not any(politician_id in honest for politician_id in sample):
                sample[rng.randrange(size)] = rng.choice(honest)
                sample.sort()
        return SafeSample(number, sample)

    def is_good(self, sample: SafeSample) -> bool:
        return any(self.politicians[politician_id].behavior.honest for politician_id in sample.politician_ids)

    def committee(self, number: int) -> List[NodeSpec]:
        """
        Method for selecting the block committee from the previous seed; its first member proposes.
        """
        seed = self.ledger.seeds.seed_at(number - 1)
        ranked = sorted(self.citizens, key=lambda citizen: domain_hash(label("vrf"), seed + citizen.public_key))
        return ranked[:self.config.committee_size]

    """
    Registration
    """

    def setup_registration(self) -> None:
        """
        Method for running the blind signature sessions of all users inside one setup window.
        The window closes, and the logical clock advances by the setup time, before any RegisterVoter is emitted.
        """
        users = [(voter.name, voter.topic, voter.public_key) for voter in self.voters]
        blinding = SeededByteSource(domain_hash(label("seed"), f"blind/{self.config.seed}".encode("utf-8")))
        self.admin.open()
        try:
            certificates = registration_ceremony(self.admin, users, blinding)
        finally:
            self.admin.close()
        for voter, certificate in zip(self.voters, certificates):
            voter.certificate = certificate.to_bytes()
        self.logical_time += self.config.setup_time
        self.registration_closed_at = self.logical_time
        self._logger.info(f"Issued {len(certificates)} certificates, setup window closed at {self.logical_time:.3f}")

    def register(self, voter: Voter, number: int) -> bytes:
        """
        Method for emitting the RegisterVoter transaction of a user.
        Permissioned users may only register once the setup window has closed.
        :param voter: User.
        :param number: Block the transaction is submitted for.
        :return: Encoded transaction.
        """
        if self.config.permissioned:
            if self.admin.is_open or self.registration_closed_at is None:
                raise SetupWindowException(voter.name, "window open" if self.admin.is_open else "window not run")
            if voter.certificate is None:
                raise SetupWindowException(voter.name, "no certificate issued")
        raw = encode(sign_transaction(RegisterVoter(voter.public_key, voter.topic, certificate=voter.certificate),
                                      identity_from_seed(voter.identity_seed)))
        self.pool.add(raw, number)
        self.submitted["registrations"] += 1
        return raw

    """
    Workload
    """

    def submit(self, number: int) -> None:
        """
        Method for submitting the transactions arriving before block number.
        """
        config = self.config
        if number == 1:
            for voter in self.voters:
                self.register(voter, number)
        if 2 <= number < 2 + config.poll_blocks:
            for index in range(config.polls_per_block):
                creator = self.voters[(number * config.polls_per_block + index) % len(self.voters)]
                poll_id = domain_hash(label("seed"), f"poll/{config.seed}/{number}/{index}".encode("utf-8"))[:8]
                tx = sign_transaction(CreatePoll(poll_id, config.topics[index % len(config.topics)], config.n_req,
                                                 config.b_vw, poll_content(f"poll {number}.{index}")),
                                      identity_from_seed(creator.identity_seed))
                self.pool.add(encode(tx), number)
                self.poll_ids.append(poll_id)
                self.submitted["polls"] += 1
        for raw, deadline in self.scheduled.pop(number, []):
            self.pool.add(raw, number, deadline)

    def schedule_votes(self, voter: Voter, poll_ids: List[bytes], height: int) -> None:
        """
        Method for signing the votes of a user on newly discovered polls and scheduling their submission.
        """
        config = self.config
        for poll_id in poll_ids:
            rng = self.rng("vote", voter.user_id, poll_id.hex())
            ring = self.ledger.ring(poll_id)
            if ring is None or rng.random() >= config.vote_rate:
                continue
            window = self.ledger.state.poll(poll_id).window(config.b_wait)
            first = max(height + 1, window.start)
            if first >= window.stop:
                continue
            block = first + rng.randrange(max(1, min(window.stop - first, config.b_vw - 2)))
            late = rng.random() < config.late_rate
            if late:
                block = window.stop
            ratings = [rng.randrange(1, 6)]
            if rng.random() < config.duplicate_rate:
                ratings.append(ratings[0] % 5 + 1)
            for position, rating in enumerate(ratings):
                vote = vote_value(rating, f"{voter.name} on {poll_id.hex()}")
                signature = urs.sign(self.params, poll_id, vote, ring, voter.keys.sk, rng)
                raw = encode(CreateVote(poll_id, vote, signature.to_bytes()))
                self.scheduled.setdefault(block, []).append((raw, window.stop - 1))
                if late:
                    self.submitted["late_votes"] += 1
                elif position:
                    self.submitted["duplicate_votes"] += 1
                else:
                    self.submitted["valid_votes"] += 1

    """
    Block production
    """

    def gather(self, number: int, seed: bytes) -> List[bytes]:
        """
        Method for collecting the pools of the block's pool politicians.
        Out-of-shard transactions are dropped and reported.
        :return: Candidates in arrival order.
        """
        assignment = pool_politicians(seed, self.active_politicians(), self.config.policy.shard_count)
        self.audit.pool_shards[number] = assignment
        policy = self.config.policy.copy(update={"shard_count": len(assignment)})
        arrivals = {pending.tx_hash: pending.arrival for pending in self.pool.pending()}
        candidates: Dict[bytes, bytes] = {}
        for politician_id, shard in sorted(assignment.items(), key=lambda item: item[1]):
            politician = self.politicians[politician_id]
            selected = self.pool.select(shard, number, policy, self.config.pool_capacity,
                                        self.rng("pool", number, shard))
            if politician.behavior.drop_transactions:
                selected = []
            if politician.behavior.violate_fmap:
                foreign = [pending.raw for pending in self.pool.pending()
                           if shard_of(pending.raw, number, policy) != shard]
                selected = selected + foreign[:1]
            statement = politician.pool_claim(number, shard, selected)
            for raw in selected:
                if shard_of(raw, number, policy) != shard:
                    self.blacklist.add(Evidence(politician_id, "pool", statement, {"tx": raw}), number)
                    continue
                candidates.setdefault(tx_hash(raw), raw)
        return [candidates[tx] for tx in sorted(candidates, key=lambda tx: (arrivals[tx], tx))]

    def verify_votes(self, committee: List[NodeSpec], samples: Dict[int, SafeSample], view: ChainView,
                     candidates: List[bytes]) -> Tuple[Dict[bytes, bool], float]:
        """
        Method for settling vote verdicts through the committee's offloads.
        :return: Committee verdicts by transaction hash and the slowest member's logical time.
        """
        votes: Dict[bytes, List[bytes]] = {}
        for raw in candidates:
            if group_of(raw) is not None:
                votes.setdefault(group_of(raw), []).append(raw)
        self.batch_sizes.extend(len(raws) for raws in votes.values())
        truth: Dict[bytes, bool] = {}
        for poll_id, raws in votes.items():
            truth.update(self.oracle.verdicts(self.ledger, poll_id, raws))
        if not votes:
            return {}, 0.0

        tallies: Dict[bytes, List[bool]] = {tx: [] for tx in truth}
        slowest = 0.0
        for citizen in committee:
            sample = samples[citizen.node_id]
            try:
                outcome = offload_vote_verify(citizen.name, sample, self.politicians, view, votes, self.network,
                                              self.timing, self.rng("verify", view.number, citizen.node_id))
            except OffloadFailureException as ex:
                self._logger.warning(f"{citizen.name} verifies locally: {ex}")
                self.offload_failures += 1
                self.network.counter(citizen.name).signatures_verified += len(truth)
                slowest = max(slowest, len(truth) * self.timing.t_verif / self.timing.n_thread)
                for tx, verdict in truth.items():
                    tallies[tx].append(verdict)
                continue
            for evidence in outcome.evidence:
                self.blacklist.add(evidence, view.number)
            if self.is_good(sample) and outcome.verdicts != truth:
                self.safety_violations += 1
            slowest = max(slowest, outcome.elapsed)
            for tx, verdict in outcome.verdicts.items():
                tallies[tx].append(verdict)

        verdicts = {}
        for tx, answers in tallies.items():
            accepted, rejected = answers.count(True), answers.count(False)
            verdicts[tx] = truth[tx] if accepted == rejected else accepted > rejected
            if verdicts[tx] != truth[tx]:
                self.safety_violations += 1
        return verdicts, slowest

    def compute_rings(self, committee: List[NodeSpec], samples: Dict[int, SafeSample],
                      view: ChainView) -> Tuple[list, float]:
        """
        Method for checking the rings of the block through the committee's offloads.
        :return: Disputed statements and the slowest member's logical time.
        """
        if not view.rings:
            return [], 0.0
        truth = {poll_id: ring_hash_of(members) for poll_id, members in view.rings.items()}
        disputed, slowest = [], 0.0
        for citizen in committee:
            sample = samples[citizen.node_id]
            try:
                outcome = offload_ring(citizen.name, sample, self.politicians, view, list(view.rings), self.network,
                                       self.timing)
            except OffloadFailureException as ex:
                self._logger.warning(f"{citizen.name} computes rings locally: {ex}")
                self.offload_failures += 1
                audience = sum(view.audience_size(poll_id) for poll_id in view.rings)
                self.network.counter(citizen.name).vrf_evaluations += audience
                slowest = max(slowest, audience * self.timing.t_hash)
                continue
            if self.is_good(sample) and outcome.hashes != truth:
                self.safety_violations += 1
            disputed.extend(outcome.disputed)
            slowest = max(slowest, outcome.elapsed)
        return disputed, slowest

    def chain_view(self, number: int, proposer: NodeSpec) -> ChainView:
        """
        Method for building the view politicians and the committee share while block number is prepared.
        :param number: Block number.
        :param proposer: Proposer of the block, contributing to its seed.
        :return: Chain view with the rings the block fixes.
        """
        seed = next_seed(self.ledger.seeds.seed_at(number - 1), proposer.public_key)
        ring_state = block_start_state(self.ledger, number)
        return ChainView(self.ledger, number, draw_rings(self.ledger, ring_state, number, seed), self.oracle, seed,
                         ring_state)

    def produce_block(self, number: int) -> None:
        """
        Method for running one block: pools, offloads, validation, commit and discovery.
        The committee verifies the gathered pools in every block. A dishonest proposer withholds its proposal until
        proposal_timeout passes and an empty block is committed.
        """
        self.submit(number)
        committee = self.committee(number)
        proposer = committee[0]
        view = self.chain_view(number, proposer)
        samples = {citizen.node_id: self.safe_sample(citizen, number) for citizen in committee}

        candidates = self.gather(number, view.seed)
        verdicts, vote_time = self.verify_votes(committee, samples, view, candidates)
        disputed, ring_time = self.compute_rings(committee, samples, view)
        if proposer.behavior.drop_transactions:
            candidates = []

        results = validate_batch(self.ledger, candidates, number, verdicts)
        accepted = [raw for raw, result in zip(candidates, results) if result.valid]
        rejected = [(raw, result.reason.name) for raw, result in zip(candidates, results) if not result.valid]
        for _, reason in rejected:
            self.rejections[reason] = self.rejections.get(reason, 0) + 1
        self.pool.remove([raw for raw, _ in rejected])
        reserved = 4 + IDENTITY_UPDATE_LENGTH * sum(1 for raw in accepted if raw[:1] in (b"R", b"C"))
        included, deferred = assemble_block(accepted, self.config.block_size_limit, reserved)

        try:
            block = apply_block(self.ledger, included, number, proposer.public_key, verdicts)
        except InvalidBlockException as ex:
            self._logger.error(f"Committee block rejected, committing an empty block: {ex}")
            self.safety_violations += 1
            block, included = apply_block(self.ledger, [], number, proposer.public_key), []
        self.pool.remove(included)
        self.archive.record_block(block)
        self.archive.record_rejections(number, rejected)
        self.audit.roots[number] = block.state_root
        for evidence in ring_evidence(disputed, self.ledger):
            self.blacklist.add(evidence, number)

        block_time = self.config.base_block_time + max(vote_time, ring_time)
        if proposer.behavior.drop_transactions:
            block_time += self.config.proposal_timeout
        self.logical_time += block_time
        self.discover(number)
        self.block_log.append({"number": number, "proposer": proposer.node_id,
                               "honest_proposer": not proposer.behavior.drop_transactions,
                               "votes": sum(1 for raw in included if raw[:1] == b"V"), "deferred": len(deferred),
                               "rings": len(view.rings), "block_time": round(block_time, 9),
                               "blacklisted": len(self.blacklist)})

    def discover(self, height: int) -> None:
        """
        Method for letting every user discover the polls its key was selected for.
        """
        view = ChainView(self.ledger, height + 1, {}, self.oracle)
        politicians = [self.politicians[politician_id] for politician_id in self.active_politicians()]
        for voter in self.voters:
            result = discover_polls(voter.name, voter.public_key, politicians, view, voter.last_checked, self.network,
                                    self.rng("discover", height, voter.user_id))
            for evidence in result.evidence:
                self.blacklist.add(evidence, height)
            expected = sorted(poll_id for poll_id, members in self.ledger.ring_members.items()
                              if voter.public_key in members
                              and voter.last_checked < self.ledger.state.poll(poll_id).block + self.config.b_wait
                              <= height)
            if result.poll_ids != expected and any(politician.behavior.honest for politician in politicians):
                self.safety_violations += 1
            voter.last_checked = height
            self.schedule_votes(voter, result.poll_ids, height)

    """
    Run
    """

    def run(self) -> SimReport:
        """
        Method for running all blocks.
        :return: Simulation report.
        """
        if self.config.permissioned and self.registration_closed_at is None:
            self.setup_registration()
        for number in tqdm(range(1, self.config.blocks + 1), desc="Simulating blocks", ncols=80,
                           disable=not cfg.SHOW_PROGRESS):
            self.produce_block(number)
        return self.report()

    def report(self) -> SimReport:
        """
        Method for summarizing the run.
        """
        log = self.archive.commit_log()
        for entry, summary in zip(self.block_log, log):
            entry.update({"transactions": summary["transactions"], "size": summary["size"],
                          "state_root": summary["state_root"], "outcomes": summary["outcomes"]})
        committed_votes = sum(entry["votes"] for entry in self.block_log)
        evidence = self.blacklist.all_evidence()
        if not all(audit_evidence(item, self.audit) for item in evidence):
            self.safety_violations += 1
        tallies = []
        for poll_id in self.poll_ids:
            entry = self.ledger.state.poll(poll_id)
            if entry is not None:
                tallies.append(dict(tally(self.ledger.state, poll_id).to_dict(), n_req=entry.n_req,
                                    ring=len(self.ledger.ring_members.get(poll_id, []))))
        return SimReport(
            config=json.loads(self.config.json()), blocks=self.block_log,
            counters={name: counters.to_dict() for name, counters in sorted(self.network.counters.items())},
            blacklist=[{"block": block, "politician": politician, "kind": kind}
                       for block, politician, kind in self.blacklist.history],
            tallies=tallies, submitted=dict(self.submitted), rejections=dict(sorted(self.rejections.items())),
            final_root=self.ledger.state.root().hex(), logical_time=self.logical_time,
            committed_votes=committed_votes,
            throughput=committed_votes / self.logical_time if self.logical_time else 0.0,
            votes_per_block=committed_votes / max(1, len(self.block_log)),
            mean_batch_size=sum(self.batch_sizes) / len(self.batch_sizes) if self.batch_sizes else 0.0,
            safety_violations=self.safety_violations, offload_failures=self.offload_failures,
            warnings=list(self.warnings), evidence=evidence)


def run_simulation(config: SimulationConfig) -> SimReport:
    """
    Function for running a simulation.
    :param config: Simulation configuration.
    :return: Simulation report, identical for identical configurations.
    """
    return Simulation(config).run()
