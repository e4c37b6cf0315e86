# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from __future__ import annotations
import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union
from src.configuration import configuration as cfg
from src.model.group_control.group_primitives import domain_hash, label
from src.model.blindsig_control.rsa_blind import RsaPublicKey
from src.model.urs_control import urs
from src.model.urs_control.data_model import Ring, UrsParams, UrsSignature
from src.model.urs_control.exceptions import InvalidRingException
from src.model.ledger_control.data_model import (LedgerConfig, PollEntry, AudienceRecord, IdentityRecord,
                                                 ScalingEntry, poll_data_key, vote_key, vote_tag_key, blockwise_key)
from src.model.ledger_control.exceptions import InvalidBlockException
from src.model.ledger_control.global_state import GlobalState
from src.model.ledger_control.transactions import (Transaction, RegisterVoter, CreatePoll, CreateVote,
                                                   ModifySubscription, decode, encode, tx_hash)
from src.model.ledger_control.validation import ValidationContext, ValidationResult, validate
from src.model.sortition_control.exceptions import EmptyAudienceException
from src.model.sortition_control.sortition import (SeedChain, genesis_seed, next_seed, eligible_audience,
                                                    select_ring, ring_hash_of)
from src.model.sortition_control.thresholding import EpochThreshold, update_threshold, window_inside_epoch


HEADER_LENGTH = 8 + 32 + 1 + 32 + 32 + 32 + 4 + 4


@dataclass
class IdentityUpdate:
    """
    Entry of the identity sub-block: a new registration or a topic change.
    """
    sender: bytes
    public_key: bytes
    topic: int

    def to_bytes(self) -> bytes:
        return self.sender + self.public_key + self.topic.to_bytes(4, "big")


@dataclass
class Block:
    """
    Committed block.
    """
    number: int
    previous_hash: bytes
    state_root: bytes
    seed: bytes
    proposer: bytes
    transactions: List[bytes] = field(default_factory=list)
    identity_block: List[IdentityUpdate] = field(default_factory=list)

    def to_bytes(self) -> bytes:
        """
        Method for encoding the block: header | length-prefixed transactions | identity sub-block.
        :return: Encoding.
        """
        parts = [self.number.to_bytes(8, "big"), self.previous_hash, len(self.state_root).to_bytes(1, "big"),
                 self.state_root.ljust(32, b"\x00"), self.seed, self.proposer.ljust(32, b"\x00"),
                 len(self.transactions).to_bytes(4, "big")]
        for tx in self.transactions:
            parts.append(len(tx).to_bytes(4, "big") + tx)
        parts.append(len(self.identity_block).to_bytes(4, "big"))
        parts.extend(update.to_bytes() for update in self.identity_block)
        return b"".join(parts)

    def size(self) -> int:
        return len(self.to_bytes())

    def block_hash(self) -> bytes:
        return hashlib.sha256(self.to_bytes()).digest()

    def to_dict(self) -> dict:
        return {"number": self.number, "previous_hash": self.previous_hash.hex(), "state_root": self.state_root.hex(),
                "seed": self.seed.hex(), "proposer": self.proposer.hex(), "transactions": len(self.transactions),
                "identity_updates": len(self.identity_block), "size": self.size()}


def assemble_block(candidates: List[bytes], size_limit: int = None,
                   reserved: int = 0) -> Tuple[List[bytes], List[bytes]]:
    """
    Function for filling a block greedily in candidate order.
    :param candidates: Encoded transactions.
    :param size_limit: Block size budget.
        Defaults to the configured block size limit.
    :param reserved: Bytes reserved for the identity sub-block.
        Defaults to 0.
    :return: Included and deferred transactions.
    """
    remaining = (cfg.BLOCK_SIZE_LIMIT if size_limit is None else size_limit) - HEADER_LENGTH - reserved
    included, deferred = [], []
    for tx in candidates:
        if 4 + len(tx) <= remaining:
            included.append(tx)
            remaining -= 4 + len(tx)
        else:
            deferred.append(tx)
    return included, deferred


@dataclass
class PollTally:
    """
    Outcome of a poll.
    """
    poll_id: bytes
    votes: int
    mean_rating: Optional[float]

    def to_dict(self) -> dict:
        return {"poll_id": self.poll_id.hex(), "votes": self.votes, "mean_rating": self.mean_rating}


def tally(state: GlobalState, poll_id: bytes) -> PollTally:
    """
    Function for tallying the ratings of a poll from its Vote entries.
    :param state: Global state.
    :param poll_id: Poll id.
    :return: Tally.
    """
    ratings = [vote[0] for vote in state.votes(poll_id)]
    return PollTally(poll_id, len(ratings), sum(ratings) / len(ratings) if ratings else None)


class LedgerState(object):
    """
    Class, representing one replica's chain state: global state, seed chain, retained rings and schedules.
    """

    def __init__(self, config: LedgerConfig = None, params: UrsParams = None,
                 role_keys: Dict[int, RsaPublicKey] = None, genesis: str = None) -> None:
        """
        Initiation method.
        :param config: Protocol parameters.
            Defaults to None in which case defaults are used.
        :param params: URS parameters.
            Defaults to None in which case the configured setup seed is used.
        :param role_keys: Role keys of the permissioned registration.
            Defaults to None.
        :param genesis: Genesis seed string.
            Defaults to None in which case the configured genesis seed is used.
        """
        self.config = LedgerConfig() if config is None else config
        self.params = urs.setup() if params is None else params
        self.role_keys = {} if role_keys is None else dict(role_keys)
        self.state = GlobalState(self.config.digest_length)
        for topic in self.config.topics:
            self.state.put_threshold(topic, Fraction(1))
        self.seeds = SeedChain(genesis_seed(genesis))
        self.rings: Dict[bytes, Optional[Ring]] = {}
        self.ring_members: Dict[bytes, List[bytes]] = {}
        self.committed_polls: Dict[int, List[bytes]] = {}
        self.closing: Dict[int, List[bytes]] = {}
        self.blocks: List[Block] = []

    @property
    def height(self) -> int:
        return self.seeds.height

    def head_hash(self) -> bytes:
        return self.blocks[-1].block_hash() if self.blocks else b"\x00" * 32

    def context(self, state: GlobalState = None) -> ValidationContext:
        """
        Method for building a validation context over the given or the committed state.
        """
        return ValidationContext(self.state if state is None else state, self.config, self.params, self.rings,
                                 self.role_keys)

    def ring(self, poll_id: bytes) -> Optional[Ring]:
        return self.rings.get(poll_id)


def _apply_transaction(tx: Transaction, state: GlobalState, number: int, config: LedgerConfig,
                       identity_block: List[IdentityUpdate], new_polls: Dict[int, List[bytes]]) -> None:
    if isinstance(tx, RegisterVoter):
        state.put_identity(tx.sender, IdentityRecord(tx.public_key, tx.topic))
        state.subscribe(tx.topic, tx.public_key, AudienceRecord(number + 1, number))
        identity_block.append(IdentityUpdate(tx.sender, tx.public_key, tx.topic))
    elif isinstance(tx, CreatePoll):
        state.put_poll(tx.poll_id, PollEntry(number, tx.topic, tx.n_req, 0, tx.b_vw))
        state.put(poll_data_key(tx.poll_id), tx.content)
        new_polls.setdefault(tx.topic, []).append(tx.poll_id)
    elif isinstance(tx, CreateVote):
        entry = state.poll(tx.poll_id)
        state.put(vote_key(tx.poll_id, entry.n_seen), tx.vote)
        state.put(vote_tag_key(tx.poll_id, urs.tag_of(UrsSignature.from_bytes(tx.signature)).to_bytes()),
                  b"\x01")
        entry.n_seen += 1
        state.put_poll(tx.poll_id, entry)
    elif isinstance(tx, ModifySubscription):
        identity = state.identity(tx.sender)
        state.unsubscribe(identity.topic, identity.public_key)
        state.subscribe(tx.topic, identity.public_key, AudienceRecord(number + config.b_wait + 1, number))
        state.put_identity(tx.sender, IdentityRecord(identity.public_key, tx.topic))
        identity_block.append(IdentityUpdate(tx.sender, identity.public_key, tx.topic))


def _update_thresholds(ledger: LedgerState, state: GlobalState, number: int) -> None:
    config = ledger.config
    lam = Fraction(config.lam).limit_denominator(1 << 32)
    for topic in state.topics():
        scaling = state.scaling(topic)
        threshold = EpochThreshold(number // config.epoch_length - 1, state.threshold(topic), scaling.v_exp,
                                   scaling.v_seen, lam)
        state.put_threshold(topic, update_threshold(threshold, config.threshold_rule).w)
        state.put_scaling(topic, ScalingEntry())


def draw_rings(ledger: LedgerState, state: GlobalState, number: int, seed: bytes) -> Dict[bytes, List[bytes]]:
    """
    Function for selecting the rings of all polls committed at number - B_wait.
    :param ledger: Ledger state holding the poll schedule.
    :param state: Global state at the start of block number.
    :param number: Block number.
    :param seed: Seed of block number.
    :return: Sorted member keys per poll id, empty for polls without eligible audience.
    """
    config = ledger.config
    committed = number - config.b_wait
    poll_ids = ledger.committed_polls.get(committed, [])
    by_topic: Dict[int, List[bytes]] = {}
    members: Dict[bytes, List[bytes]] = {}
    for poll_id in poll_ids:
        entry = state.poll(poll_id)
        by_topic.setdefault(entry.topic, []).append(poll_id)
        audience = eligible_audience(state.audience(entry.topic), committed, config.resubscribe_after)
        try:
            members[poll_id] = select_ring(seed, poll_id, committed, audience, entry.n_req,
                                           state.threshold(entry.topic)).members
        except EmptyAudienceException:
            members[poll_id] = []
    for topic, topic_polls in by_topic.items():
        if state.get(blockwise_key(committed, topic)) != _poll_list_hash(topic_polls):
            cfg.LOGGER.warning(f"Poll list of block {committed}, topic {topic} does not match its BlockwisePolls entry")
    return members


def preview_rings(ledger: LedgerState, number: int, proposer_key: bytes) -> Dict[bytes, List[bytes]]:
    """
    Function for computing the rings the next block will fix, without modifying the ledger.
    :param ledger: Ledger state.
    :param number: Next block number.
    :param proposer_key: Proposer of the next block.
    :return: Sorted member keys per poll id.
    """
    seed = next_seed(ledger.seeds.seed_at(number - 1), proposer_key)
    return draw_rings(ledger, block_start_state(ledger, number), number, seed)


def block_start_state(ledger: LedgerState, number: int) -> GlobalState:
    """
    Function for getting the state rings of block number are drawn from: the committed state,
    or a copy with updated thresholds at epoch boundaries.
    """
    if number % ledger.config.epoch_length:
        return ledger.state
    state = ledger.state.copy()
    _update_thresholds(ledger, state, number)
    return state


def _poll_list_hash(poll_ids: List[bytes]) -> bytes:
    return domain_hash(label("merkle_leaf"), b"".join(sorted(poll_ids)))


def _write_rings(state: GlobalState, members: Dict[bytes, List[bytes]]) -> Dict[bytes, Optional[Ring]]:
    rings = {}
    for poll_id, keys in members.items():
        try:
            rings[poll_id] = Ring.from_encoding(b"".join(keys))
        except InvalidRingException:
            rings[poll_id] = None
        entry = state.poll(poll_id)
        entry.ring_hash = ring_hash_of(keys)
        state.put_poll(poll_id, entry)
    return rings


def _close_windows(ledger: LedgerState, state: GlobalState, number: int) -> None:
    config = ledger.config
    for poll_id in ledger.closing.get(number, []):
        entry = state.poll(poll_id)
        window = entry.window(config.b_wait)
        if window_inside_epoch(window.start, window.stop - 1, config.epoch_length):
            scaling = state.scaling(entry.topic)
            state.put_scaling(entry.topic, ScalingEntry(scaling.v_exp + entry.n_req, scaling.v_seen + entry.n_seen))


def apply_block(ledger: LedgerState, txs: List[Union[Transaction, bytes]], number: int, proposer_key: bytes,
                verdicts: Dict[bytes, bool] = None) -> Block:
    """
    Function for validating and applying a block of transactions.
    Transactions are validated in order, each against the state left by its predecessors.
    The ledger is only modified when every transaction is valid.
    :param ledger: Ledger state.
    :param txs: Transactions or their encodings.
    :param number: Block number, the successor of the current height.
    :param proposer_key: Key of the block proposer, mixed into the seed.
    :param verdicts: Precomputed ring signature verdicts by transaction hash.
        Defaults to None.
    :return: Committed block.
    """
    if number != ledger.height + 1:
        raise ValueError(f"block {number} does not extend height {ledger.height}")
    config = ledger.config
    verdicts = {} if verdicts is None else verdicts
    seed = next_seed(ledger.seeds.seed_at(ledger.height), proposer_key)
    state = ledger.state.copy()

    if number % config.epoch_length == 0:
        _update_thresholds(ledger, state, number)
    members = draw_rings(ledger, state, number, seed)
    rings = _write_rings(state, members)

    context = ledger.context(state)
    encoded, rejected = [], []
    identity_block: List[IdentityUpdate] = []
    new_polls: Dict[int, List[bytes]] = {}
    for position, tx in enumerate(txs):
        raw = tx if isinstance(tx, bytes) else encode(tx)
        result = validate(raw, context, number, verdicts.get(tx_hash(raw)))
        if not result.valid:
            rejected.append((position, result.reason.name))
            continue
        _apply_transaction(decode(raw), state, number, config, identity_block, new_polls)
        encoded.append(raw)
    if rejected:
        raise InvalidBlockException(number, rejected)

    for topic, poll_ids in new_polls.items():
        state.put(blockwise_key(number, topic), _poll_list_hash(poll_ids))
    _close_windows(ledger, state, number)

    block = Block(number, ledger.head_hash(), state.root(), seed, proposer_key, encoded, identity_block)
    if block.size() > config.block_size_limit:
        raise InvalidBlockException(number, [(-1, f"block of {block.size()} bytes exceeds budget")])

    ledger.state = state
    ledger.seeds.extend(number, proposer_key)
    ledger.rings.update(rings)
    ledger.ring_members.update(members)
    poll_ids = [poll_id for ids in new_polls.values() for poll_id in ids]
    if poll_ids:
        ledger.committed_polls[number] = poll_ids
    for poll_id in poll_ids:
        entry = state.poll(poll_id)
        ledger.closing.setdefault(number + config.b_wait + entry.b_vw, []).append(poll_id)
    ledger.committed_polls.pop(number - config.b_wait, None)
    ledger.closing.pop(number, None)
    ledger.blocks.append(block)
    cfg.LOGGER.debug(f"Committed block {number} with {len(encoded)} transactions, root {block.state_root.hex()[:16]}")
    return block


def replay(blocks: List[Block], config: LedgerConfig = None, params: UrsParams = None,
           role_keys: Dict[int, RsaPublicKey] = None, genesis: str = None) -> LedgerState:
    """
    Function for re-applying committed blocks on a fresh replica.
    :param blocks: Blocks in order.
    :param config: Protocol parameters.
    :param params: URS parameters.
    :param role_keys: Role keys.
    :param genesis: Genesis seed string.
    :return: Replica state.
    """
    ledger = LedgerState(config, params, role_keys, genesis)
    for block in blocks:
        replica_block = apply_block(ledger, list(block.transactions), block.number, block.proposer)
        if replica_block.state_root != block.state_root:
            raise InvalidBlockException(block.number, [(-1, "state root mismatch")])
    return ledger


def validate_batch(ledger: LedgerState, txs: List[bytes], number: int,
                   verdicts: Dict[bytes, bool] = None) -> List[ValidationResult]:
    """
    Function for pre-filtering candidate transactions in order, as a proposer would before apply_block.
    Rejected transactions leave no trace; accepted ones are applied to a scratch state for their successors.
    :param ledger: Ledger state.
    :param txs: Encoded candidate transactions.
    :param number: Block number.
    :param verdicts: Precomputed ring signature verdicts by transaction hash.
        Defaults to None.
    :return: Per-transaction results.
    """
    verdicts = {} if verdicts is None else verdicts
    state = ledger.state.copy()
    if number % ledger.config.epoch_length == 0:
        _update_thresholds(ledger, state, number)
    context = ledger.context(state)
    results, identity_block, new_polls = [], [], {}
    for raw in txs:
        result = validate(raw, context, number, verdicts.get(tx_hash(raw)))
        if result.valid:
            _apply_transaction(decode(raw), state, number, ledger.config, identity_block, new_polls)
        results.append(result)
    return results


def reason_counts(results: List[ValidationResult]) -> Dict[str, int]:
    """
    Function for counting validation outcomes by reason name.
    """
    counts: Dict[str, int] = {}
    for result in results:
        counts[result.reason.name] = counts.get(result.reason.name, 0) + 1
    return counts
