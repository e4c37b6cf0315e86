# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
import unittest
import gc
from dataclasses import dataclass, replace
from fractions import Fraction
from random import Random
from typing import List
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey
from src.model.blindsig_control.registration import AdminSigner, registration_ceremony
from src.model.blindsig_control.rsa_blind import SeededByteSource
from src.model.urs_control import urs
from src.model.urs_control.data_model import Ring, UrsKeyPair
from src.model.group_control.group_primitives import GroupElement
from src.model.ledger_control import merkle
from src.model.ledger_control.data_model import (LedgerConfig, ScalingEntry, blockwise_key, poll_data_key, vote_key,
                                                 EMPTY_RING_HASH)
from src.model.ledger_control.exceptions import InvalidBlockException, TransactionDecodingException
from src.model.ledger_control.global_state import GlobalState, gs_read, gs_verify
from src.model.ledger_control.transactions import (RegisterVoter, CreatePoll, CreateVote, ModifySubscription,
                                                   identity_from_seed, sign_transaction, encode, decode, vote_value,
                                                   poll_content, public_bytes)
from src.model.ledger_control.validation import ReasonCode, validate
from src.model.ledger_control.blocks import (LedgerState, Block, HEADER_LENGTH, apply_block, assemble_block, tally,
                                             replay)
from src.model.ledger_control.archive import BlockArchive
from src.model.sortition_control.thresholding import ThresholdRule


PROPOSER = b"\x07" * 32


@dataclass
class Citizen:
    """
    Test citizen with an Ed25519 identity and a URS key pair.
    """
    identity: Ed25519PrivateKey
    keys: UrsKeyPair

    @property
    def pk(self) -> bytes:
        return self.keys.pk.to_bytes()


def advance(ledger: LedgerState, until: int) -> None:
    """
    Function for committing empty blocks up to a height.
    """
    while ledger.height < until:
        apply_block(ledger, [], ledger.height + 1, PROPOSER)


def registrations(citizens: List[Citizen], topic: int) -> List[RegisterVoter]:
    """
    Function for building signed registrations.
    """
    return [sign_transaction(RegisterVoter(citizen.pk, topic), citizen.identity) for citizen in citizens]


class LedgerTest(unittest.TestCase):
    """
    Test case class for testing transactions, global state and state transitions.
    """

    def citizens(self, count: int, prefix: str) -> List[Citizen]:
        """
        Method for creating deterministic citizens.
        """
        return [Citizen(identity_from_seed(f"{prefix}-{index}"), urs.keygen(self.params, self.rng))
                for index in range(count)]

    def test_01_transaction_encoding(self) -> None:
        """
        Method for testing transaction wire sizes and decoding.
        """
        citizen = self.citizens(1, "encoding")[0]
        registration = registrations([citizen], 1)[0]
        self.assertEqual(len(registration.message()), 37)
        self.assertEqual(len(registration.signature), 64)
        self.assertEqual(len(encode(registration)), 37 + 64 + 32)
        self.assertEqual(decode(encode(registration)), registration)

        poll = sign_transaction(CreatePoll(b"poll-enc", 1, 10, 20, poll_content("Best bakery?")), citizen.identity)
        self.assertEqual(len(poll.message()), 277)
        self.assertEqual(decode(encode(poll)), poll)

        vote = CreateVote(b"poll-enc", vote_value(5, "great"), b"\x00" * 32 * 22)
        self.assertEqual(len(vote.message()), 266)
        self.assertEqual(len(encode(vote)), 266 + 704)
        self.assertEqual(decode(encode(vote)), vote)
        self.assertEqual(vote.rating, 5)

        subscription = sign_transaction(ModifySubscription(2), citizen.identity)
        self.assertEqual(len(subscription.message()), 5)
        self.assertEqual(decode(encode(subscription)), subscription)

        certified = replace(registration, certificate=b"\x01" * 300)
        self.assertEqual(decode(encode(certified)).certificate, b"\x01" * 300)

        for broken in [b"", b"Z" + bytes(40), encode(registration)[:50], encode(poll) + b"\x00",
                       encode(certified)[:-1], encode(registration)[:130]]:
            with self.assertRaises(TransactionDecodingException):
                decode(broken)
        with self.assertRaises(ValueError):
            vote_value(256)
        with self.assertRaises(ValueError):
            poll_content(b"x" * 257)
        with self.assertRaises(ValueError):
            sign_transaction(vote, citizen.identity)

    def test_02_global_state_proofs(self) -> None:
        """
        Method for testing authenticated reads with inclusion and absence proofs.
        """
        state = GlobalState()
        value, proof = gs_read(state, b"Pmissing")
        self.assertIsNone(value)
        self.assertTrue(gs_verify(state.root(), b"Pmissing", None, proof))

        for index in range(0, 40, 2):
            state.put(b"K" + index.to_bytes(4, "big"), f"value-{index}".encode("utf-8"))
        root = state.root()
        for index in [0, 10, 38]:
            key = b"K" + index.to_bytes(4, "big")
            value, proof = gs_read(state, key)
            self.assertEqual(value, f"value-{index}".encode("utf-8"))
            self.assertTrue(gs_verify(root, key, value, proof))
            self.assertFalse(gs_verify(root, key, value + b"!", proof))
            self.assertFalse(gs_verify(root, key, None, proof))
            tampered = merkle.InclusionProof(proof.index, proof.leaf_count,
                                             [bytes(32)] + list(proof.siblings[1:]))
            self.assertFalse(gs_verify(root, key, value, tampered))

        for key in [b"J", b"K" + (11).to_bytes(4, "big"), b"K" + (41).to_bytes(4, "big")]:
            value, proof = gs_read(state, key)
            self.assertIsNone(value)
            self.assertTrue(gs_verify(root, key, None, proof))
            self.assertFalse(gs_verify(root, b"K" + (10).to_bytes(4, "big"), None, proof))

        present_value, present_proof = gs_read(state, b"K" + (12).to_bytes(4, "big"))
        _, absent_proof = gs_read(state, b"K" + (13).to_bytes(4, "big"))
        self.assertFalse(gs_verify(root, b"K" + (13).to_bytes(4, "big"), present_value, present_proof))
        self.assertFalse(gs_verify(root, b"K" + (13).to_bytes(4, "big"), b"forged", absent_proof))

        state.put(b"K" + (10).to_bytes(4, "big"), b"changed")
        self.assertNotEqual(state.root(), root)
        self.assertEqual(GlobalState.from_snapshot(state.to_snapshot()).root(), state.root())
        state.delete(b"K" + (10).to_bytes(4, "big"))
        self.assertEqual(len(state.items(b"K")), 19)

        short = GlobalState(10)
        for index in range(33):
            short.put(index.to_bytes(2, "big"), b"v")
        _, proof = gs_read(short, (5).to_bytes(2, "big"))
        self.assertEqual(proof.size(), 60)
        self.assertTrue(gs_verify(short.root(), (5).to_bytes(2, "big"), b"v", proof, 10))
        self.assertEqual(merkle.proof_size(2 ** 30, 10), 300)
        self.assertEqual(merkle.proof_size(1), 0)

    def test_03_registration(self) -> None:
        """
        Method for testing voter registration rules.
        """
        ledger = LedgerState(LedgerConfig(b_wait=3, topics=[1, 2]), self.params)
        citizens = self.citizens(4, "registration")
        block = apply_block(ledger, registrations(citizens, 1), 1, PROPOSER)
        self.assertEqual(len(block.identity_block), 4)
        self.assertEqual([entry.eligible_from for entry in ledger.state.audience(1)], [2] * 4)
        self.assertEqual(ledger.state.identity(public_bytes(citizens[0].identity)).public_key, citizens[0].pk)
        self.assertTrue(ledger.state.is_registered(citizens[0].pk))

        context = ledger.context()
        other_key = urs.keygen(self.params, self.rng).pk.to_bytes()
        newcomer = identity_from_seed("registration-newcomer")
        cases = [
            (sign_transaction(RegisterVoter(other_key, 1), citizens[0].identity), ReasonCode.CITIZEN_ALREADY_REGISTERED),
            (sign_transaction(RegisterVoter(citizens[1].pk, 1), newcomer), ReasonCode.KEY_ALREADY_REGISTERED),
            (sign_transaction(RegisterVoter(bytes(32), 1), newcomer), ReasonCode.KEY_NOT_WELL_FORMED),
            (sign_transaction(RegisterVoter(b"\xff" * 32, 1), newcomer), ReasonCode.KEY_NOT_WELL_FORMED),
            (sign_transaction(RegisterVoter(other_key, 7), newcomer), ReasonCode.UNKNOWN_TOPIC),
            (replace(sign_transaction(RegisterVoter(other_key, 1), newcomer), signature=bytes(64)),
             ReasonCode.BAD_SENDER_SIGNATURE),
            (b"Z" + bytes(100), ReasonCode.MALFORMED_TRANSACTION),
            (sign_transaction(RegisterVoter(other_key, 1), newcomer), ReasonCode.ACCEPTED)
        ]
        for tx, reason in cases:
            self.assertEqual(validate(tx, context, 2).reason, reason)

        duplicate = sign_transaction(RegisterVoter(other_key, 2), newcomer)
        root = ledger.state.root()
        with self.assertRaises(InvalidBlockException) as context_manager:
            apply_block(ledger, [sign_transaction(RegisterVoter(other_key, 1), newcomer), duplicate], 2, PROPOSER)
        self.assertEqual(context_manager.exception.reasons, [(1, "CITIZEN_ALREADY_REGISTERED")])
        self.assertEqual(ledger.height, 1)
        self.assertEqual(ledger.state.root(), root)

    def test_04_subscriptions(self) -> None:
        """
        Method for testing subscription changes.
        """
        ledger = LedgerState(LedgerConfig(b_wait=3, topics=[1, 2]), self.params)
        citizens = self.citizens(3, "subscription")
        apply_block(ledger, registrations(citizens, 1), 1, PROPOSER)
        context = ledger.context()
        stranger = identity_from_seed("subscription-stranger")
        self.assertEqual(validate(sign_transaction(ModifySubscription(2), stranger), context, 2).reason,
                         ReasonCode.UNKNOWN_CITIZEN)
        self.assertEqual(validate(sign_transaction(ModifySubscription(1), citizens[0].identity), context, 2).reason,
                         ReasonCode.UNCHANGED_SUBSCRIPTION)
        self.assertEqual(validate(sign_transaction(ModifySubscription(9), citizens[0].identity), context, 2).reason,
                         ReasonCode.UNKNOWN_TOPIC)

        block = apply_block(ledger, [sign_transaction(ModifySubscription(2), citizens[0].identity)], 2, PROPOSER)
        self.assertEqual(len(block.identity_block), 1)
        self.assertEqual(len(ledger.state.audience(1)), 2)
        moved = ledger.state.audience(2)
        self.assertEqual([(entry.public_key, entry.eligible_from, entry.subscribed_at) for entry in moved],
                         [(citizens[0].pk, 6, 2)])
        self.assertEqual(ledger.state.identity(public_bytes(citizens[0].identity)).topic, 2)

    def test_05_poll_lifecycle(self) -> None:
        """
        Method for testing polls, ring computation, votes and tallies.
        """
        config = LedgerConfig(b_wait=3, topics=[1, 2])
        ledger = LedgerState(config, self.params)
        citizens = self.citizens(6, "lifecycle")
        pair = self.citizens(2, "lifecycle-pair")
        apply_block(ledger, registrations(citizens, 1) + registrations(pair, 2), 1, PROPOSER)

        creator = citizens[0].identity
        pid = b"poll-001"
        context = ledger.context()
        self.assertEqual(validate(sign_transaction(CreatePoll(pid, 1, 6, 5, poll_content("q")), creator),
                                  context, 2).reason, ReasonCode.INVALID_N_REQ)
        self.assertEqual(validate(sign_transaction(CreatePoll(pid, 1, 0, 5, poll_content("q")), creator),
                                  context, 2).reason, ReasonCode.INVALID_N_REQ)
        self.assertEqual(validate(sign_transaction(CreatePoll(pid, 3, 2, 5, poll_content("q")), creator),
                                  context, 2).reason, ReasonCode.UNKNOWN_TOPIC)
        polls = [sign_transaction(CreatePoll(pid, 1, 3, 5, poll_content("Rate the library")), creator),
                 sign_transaction(CreatePoll(b"poll-002", 2, 1, 5, poll_content("Rate the park")), creator)]
        apply_block(ledger, polls, 2, PROPOSER)
        entry = ledger.state.poll(pid)
        self.assertEqual((entry.block, entry.topic, entry.n_req, entry.n_seen, entry.b_vw), (2, 1, 3, 0, 5))
        self.assertEqual(entry.ring_hash, EMPTY_RING_HASH)
        self.assertEqual(len(ledger.state.get(poll_data_key(pid))), 256)
        self.assertIsNotNone(ledger.state.get(blockwise_key(2, 1)))
        self.assertIsNotNone(ledger.state.get(blockwise_key(2, 2)))
        self.assertEqual(validate(polls[0], ledger.context(), 3).reason, ReasonCode.DUPLICATE_POLL_ID)

        advance(ledger, 5)
        entry = ledger.state.poll(pid)
        ring = ledger.ring(pid)
        self.assertTrue(entry.has_ring)
        self.assertEqual(len(ring), 3)
        self.assertEqual(ring.ring_hash(), entry.ring_hash)
        self.assertTrue(set(ledger.ring_members[pid]) <= {citizen.pk for citizen in citizens})
        self.assertIsNone(ledger.ring(b"poll-002"))

        members = [citizen for citizen in citizens if citizen.pk in ledger.ring_members[pid]]
        outsiders = [citizen for citizen in citizens if citizen.pk not in ledger.ring_members[pid]]
        first = vote_value(4, "quiet and clean")
        signature = urs.sign(self.params, pid, first, ring, members[0].keys.sk, self.rng)
        vote = CreateVote(pid, first, signature.to_bytes())
        context = ledger.context()
        self.assertEqual(validate(vote, context, 5).reason, ReasonCode.WINDOW_NOT_OPEN)
        self.assertEqual(validate(vote, context, 11).reason, ReasonCode.WINDOW_CLOSED)
        self.assertEqual(validate(vote, context, 6).reason, ReasonCode.ACCEPTED)
        self.assertEqual(validate(CreateVote(b"poll-404", first, signature.to_bytes()), context, 6).reason,
                         ReasonCode.UNKNOWN_POLL)
        self.assertEqual(validate(CreateVote(pid, vote_value(1), signature.to_bytes()), context, 6).reason,
                         ReasonCode.INVALID_SIGNATURE)
        self.assertEqual(validate(CreateVote(pid, first, signature.to_bytes()[:-1]), context, 6).reason,
                         ReasonCode.MALFORMED_SIGNATURE)
        self.assertEqual(validate(vote, context, 6, verdict=False).reason, ReasonCode.INVALID_SIGNATURE)

        foreign = Ring(GroupElement.from_bytes(member) for member in
                       [members[0].pk, outsiders[0].pk, outsiders[1].pk])
        foreign_signature = urs.sign(self.params, pid, first, foreign, members[0].keys.sk, self.rng)
        self.assertEqual(validate(CreateVote(pid, first, foreign_signature.to_bytes()), context, 6).reason,
                         ReasonCode.INVALID_SIGNATURE)
        wide = Ring(GroupElement.from_bytes(citizen.pk) for citizen in citizens[:5])
        wide_signature = urs.sign(self.params, pid, first, wide, citizens[0].keys.sk, self.rng)
        self.assertEqual(validate(CreateVote(pid, first, wide_signature.to_bytes()), context, 6).reason,
                         ReasonCode.MALFORMED_SIGNATURE)
        lonely = CreateVote(b"poll-002", first, signature.to_bytes())
        self.assertEqual(validate(lonely, context, 6).reason, ReasonCode.RING_UNAVAILABLE)

        second = vote_value(1, "changed my mind")
        double = CreateVote(pid, second, urs.sign(self.params, pid, second, ring, members[0].keys.sk,
                                                  self.rng).to_bytes())
        with self.assertRaises(InvalidBlockException) as context_manager:
            apply_block(ledger, [vote, double], 6, PROPOSER)
        self.assertEqual(context_manager.exception.reasons, [(1, "DUPLICATE_TAG")])

        apply_block(ledger, [vote], 6, PROPOSER)
        entry = ledger.state.poll(pid)
        self.assertEqual(entry.n_seen, 1)
        self.assertEqual(ledger.state.get(vote_key(pid, 0)), first)
        self.assertTrue(ledger.state.has_tag(pid, signature.nu.to_bytes()))
        self.assertEqual(validate(vote, ledger.context(), 7).reason, ReasonCode.DUPLICATE_TAG)
        self.assertEqual(validate(double, ledger.context(), 7).reason, ReasonCode.DUPLICATE_TAG)

        other = vote_value(2, "too loud")
        apply_block(ledger, [CreateVote(pid, other, urs.sign(self.params, pid, other, ring, members[1].keys.sk,
                                                             self.rng).to_bytes())], 7, PROPOSER)
        entry = ledger.state.poll(pid)
        self.assertEqual(entry.n_seen, 2)
        self.assertEqual(len(ledger.state.items(b"V" + pid)), entry.n_seen)
        self.assertEqual(len(ledger.state.items(b"T" + pid)), entry.n_seen)
        result = tally(ledger.state, pid)
        self.assertEqual((result.votes, result.mean_rating), (2, 3.0))
        self.assertIsNone(tally(ledger.state, b"poll-002").mean_rating)

        replica = replay(ledger.blocks, config, self.params)
        self.assertEqual(replica.state.root(), ledger.state.root())
        self.assertEqual(replica.ring_members[pid], ledger.ring_members[pid])
        self.assertEqual(ledger.blocks[1].previous_hash, ledger.blocks[0].block_hash())

    def test_06_epoch_thresholds(self) -> None:
        """
        Method for testing epoch accounting and the threshold update at the epoch boundary.
        """
        config = LedgerConfig(b_wait=2, epoch_length=20, threshold_rule=ThresholdRule.RECIPROCAL)
        ledger = LedgerState(config, self.params)
        citizens = self.citizens(4, "epoch")
        apply_block(ledger, registrations(citizens, 1), 1, PROPOSER)
        pid = b"poll-epc"
        apply_block(ledger, [sign_transaction(CreatePoll(pid, 1, 2, 4, poll_content("q")), citizens[0].identity)],
                    2, PROPOSER)
        advance(ledger, 4)
        ring = ledger.ring(pid)
        self.assertEqual(len(ring), 2)
        voter = next(citizen for citizen in citizens if citizen.pk in ledger.ring_members[pid])
        value = vote_value(3)
        apply_block(ledger, [CreateVote(pid, value, urs.sign(self.params, pid, value, ring, voter.keys.sk,
                                                             self.rng).to_bytes())], 5, PROPOSER)
        advance(ledger, 19)
        self.assertEqual(ledger.state.scaling(1), ScalingEntry(2, 1))
        self.assertEqual(ledger.state.threshold(1), Fraction(1))
        advance(ledger, 20)
        self.assertEqual(ledger.state.threshold(1), Fraction(2))
        self.assertEqual(ledger.state.scaling(1), ScalingEntry(0, 0))

    def test_07_permissioned_registration(self) -> None:
        """
        Method for testing certificate checks in permissioned mode.
        """
        admin = AdminSigner([1], seed=b"ledger-admin")
        citizens = self.citizens(2, "permissioned")
        certificates = registration_ceremony(admin, [(f"member-{index}", 1, citizen.pk)
                                                     for index, citizen in enumerate(citizens)],
                                             SeededByteSource(b"ledger-blinding"))
        ledger = LedgerState(LedgerConfig(permissioned=True), self.params, admin.public_keys())
        context = ledger.context()
        identity = citizens[0].identity
        certified = sign_transaction(RegisterVoter(citizens[0].pk, 1, certificate=certificates[0].to_bytes()),
                                     identity)
        self.assertEqual(validate(certified, context, 1).reason, ReasonCode.ACCEPTED)
        self.assertEqual(validate(decode(encode(certified)), context, 1).reason, ReasonCode.ACCEPTED)
        self.assertEqual(validate(sign_transaction(RegisterVoter(citizens[0].pk, 1), identity), context, 1).reason,
                         ReasonCode.INVALID_CERTIFICATE)
        swapped = sign_transaction(RegisterVoter(citizens[0].pk, 1, certificate=certificates[1].to_bytes()),
                                   identity)
        self.assertEqual(validate(swapped, context, 1).reason, ReasonCode.INVALID_CERTIFICATE)
        self.assertEqual(validate(sign_transaction(RegisterVoter(citizens[0].pk, 1, certificate=b"\x00" * 10),
                                                   identity), context, 1).reason, ReasonCode.INVALID_CERTIFICATE)

        apply_block(ledger, [certified], 1, PROPOSER)
        self.assertEqual(validate(sign_transaction(ModifySubscription(1), identity), ledger.context(), 2).reason,
                         ReasonCode.SUBSCRIPTION_NOT_ALLOWED)

    def test_08_block_assembly(self) -> None:
        """
        Method for testing the block size budget.
        """
        empty = Block(1, bytes(32), bytes(32), bytes(32), PROPOSER)
        self.assertEqual(empty.size(), HEADER_LENGTH)
        candidates = [bytes([index]) * 100 for index in range(10)]
        included, deferred = assemble_block(candidates, HEADER_LENGTH + 3 * 104)
        self.assertEqual(included, candidates[:3])
        self.assertEqual(deferred, candidates[3:])
        self.assertEqual(Block(1, bytes(32), bytes(32), bytes(32), PROPOSER, included).size(), HEADER_LENGTH + 312)
        included, deferred = assemble_block(candidates)
        self.assertEqual((len(included), len(deferred)), (10, 0))

        ledger = LedgerState(LedgerConfig(b_wait=2), self.params)
        root = ledger.state.root()
        block = apply_block(ledger, [], 1, PROPOSER)
        self.assertEqual(block.state_root, root)
        self.assertEqual(block.to_dict()["transactions"], 0)
        with self.assertRaises(ValueError):
            apply_block(ledger, [], 3, PROPOSER)

    def test_09_block_archive(self) -> None:
        """
        Method for testing the block archive and its commit log.
        """
        ledger = LedgerState(LedgerConfig(b_wait=2), self.params)
        archive = BlockArchive()
        first = apply_block(ledger, [], 1, PROPOSER)
        second = apply_block(ledger, [], 2, PROPOSER)
        for block in (first, second):
            archive.record_block(block)
        archive.record_rejections(2, [(b"V" + bytes(20), "DUPLICATE_TAG"), (b"V" + bytes(21), "WINDOW_CLOSED")])
        self.assertEqual(archive.height(), 2)

        log = archive.commit_log()
        self.assertEqual([entry["number"] for entry in log], [1, 2])
        self.assertEqual(log[0]["block_hash"], first.block_hash().hex())
        self.assertEqual(log[1]["state_root"], second.state_root.hex())
        self.assertEqual(log[0]["outcomes"], {})
        self.assertEqual(log[1]["outcomes"], {"DUPLICATE_TAG": 1, "WINDOW_CLOSED": 1})
        self.assertEqual(log[1]["size"], HEADER_LENGTH)

    @classmethod
    def setUpClass(cls):
        """
        Class method for setting up test case.
        """
        cls.params = urs.setup()
        cls.rng = Random(2023)

    @classmethod
    def tearDownClass(cls):
        """
        Class method for setting tearing down test case.
        """
        del cls.params, cls.rng
        gc.collect()

    @classmethod
    def setup_class(cls):
        """
        Alternative class method for setting up test case.
        """
        cls.setUpClass()

    @classmethod
    def teardown_class(cls):
        """
        Alternative class for setting tearing down test case.
        """
        cls.tearDownClass()


if __name__ == '__main__':
    unittest.main()
