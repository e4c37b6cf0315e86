# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
from src.model.group_control.group_primitives import domain_hash, label
from src.model.urs_control import urs
from src.model.ledger_control.blocks import LedgerState
from src.model.ledger_control.data_model import poll_key
from src.model.ledger_control.global_state import GlobalState, Proof
from src.model.ledger_control.transactions import CreateVote, decode, tx_hash
from src.model.sortition_control.exceptions import EmptyAudienceException
from src.model.sortition_control.sortition import AudienceEntry, eligible_audience, ring_hash_of, select_ring
from src.model.netsim_control.data_model import NodeSpec, Statement
from src.model.netsim_control.network import Network


class VerdictOracle(object):
    """
    Class, caching ring signature verdicts of vote transactions by transaction hash.
    """

    def __init__(self) -> None:
        self._verdicts: Dict[bytes, bool] = {}

    def verdicts(self, ledger: LedgerState, poll_id: bytes, raws: List[bytes]) -> Dict[bytes, bool]:
        """
        Method for batch verifying the votes of one poll against its retained ring.
        :param ledger: Committed ledger.
        :param poll_id: Poll id shared by the votes.
        :param raws: Encoded vote transactions.
        :return: Verdicts by transaction hash.
        """
        pending = [raw for raw in raws if tx_hash(raw) not in self._verdicts]
        if pending:
            ring = ledger.ring(poll_id)
            if ring is None:
                results = [False] * len(pending)
            else:
                votes = [decode(raw) for raw in pending]
                seed = domain_hash(label("urs_batch"), poll_id + b"".join(sorted(tx_hash(raw) for raw in pending)))
                results = urs.batch_verify(ledger.params, poll_id, [(vote.vote, vote.signature) for vote in votes],
                                           ring, seed=seed)
            for raw, result in zip(pending, results):
                self._verdicts[tx_hash(raw)] = result
        return {tx_hash(raw): self._verdicts[tx_hash(raw)] for raw in raws}

    def verdict(self, ledger: LedgerState, raw: bytes) -> bool:
        vote = decode(raw)
        return self.verdicts(ledger, vote.poll_id, [raw])[tx_hash(raw)]


@dataclass
class ChainView:
    """
    What politicians know when block number is being prepared.
    """
    ledger: LedgerState
    number: int
    rings: Dict[bytes, List[bytes]]
    oracle: VerdictOracle
    seed: bytes = b""
    ring_state: Optional[GlobalState] = None
    audience_sizes: Dict[bytes, int] = field(default_factory=dict)

    @property
    def root(self) -> bytes:
        return self.ledger.state.root()

    @property
    def draw_state(self) -> GlobalState:
        return self.ledger.state if self.ring_state is None else self.ring_state

    def audience_size(self, poll_id: bytes) -> int:
        """
        Method for getting the eligible audience size a ring of this block is drawn from.
        """
        if poll_id not in self.audience_sizes:
            self.audience_sizes[poll_id] = len(self.eligible(poll_id))
        return self.audience_sizes[poll_id]

    def eligible(self, poll_id: bytes) -> List[AudienceEntry]:
        """
        Method for listing the eligible audience of a poll whose ring is drawn in this block.
        """
        state = self.draw_state
        entry = state.poll(poll_id)
        return eligible_audience(state.audience(entry.topic), entry.block, self.ledger.config.resubscribe_after)


def encode_verdicts(verdicts: Dict[bytes, bool]) -> bytes:
    return b"".join(tx + bytes([verdict]) for tx, verdict in sorted(verdicts.items()))


def decode_verdicts(payload: bytes) -> Dict[bytes, bool]:
    return {payload[offset:offset + 32]: bool(payload[offset + 32]) for offset in range(0, len(payload), 33)}


class Politician(object):
    """
    Class, representing a politician answering offload, discovery and pool requests.
    """

    def __init__(self, spec: NodeSpec, network: Network) -> None:
        """
        Initiation method.
        :param spec: Node specification.
        :param network: Network for accounting work.
        """
        self.spec = spec
        self.behavior = spec.behavior
        self._counters = network.counter(spec.name)
        self._rings: Dict[Tuple[int, bytes], List[bytes]] = {}

    @property
    def politician_id(self) -> int:
        return self.spec.node_id

    @property
    def name(self) -> str:
        return self.spec.name

    @property
    def responsive(self) -> bool:
        return not self.behavior.unresponsive

    def _statement(self, kind: str, block: int, subject: bytes, payload: bytes) -> Statement:
        return Statement(self.politician_id, kind, block, subject, payload).sign(self.spec.identity)

    """
    Ring computation
    """

    def compute_ring(self, view: ChainView, poll_id: bytes) -> List[bytes]:
        """
        Method for drawing the ring of a poll from the eligible audience, once per block.
        :param view: Chain view.
        :param poll_id: Poll id.
        :return: Sorted member keys, empty if nobody is eligible.
        """
        if (view.number, poll_id) not in self._rings:
            self._rings = {key: value for key, value in self._rings.items() if key[0] == view.number}
            audience = view.eligible(poll_id)
            entry = view.draw_state.poll(poll_id)
            self._counters.vrf_evaluations += len(audience)
            self._counters.hashes += len(audience) + 1
            try:
                members = select_ring(view.seed, poll_id, entry.block, audience, entry.n_req,
                                      view.draw_state.threshold(entry.topic)).members
            except EmptyAudienceException:
                members = []
            self._rings[(view.number, poll_id)] = members
        return self._rings[(view.number, poll_id)]

    def members(self, view: ChainView, poll_id: bytes) -> List[bytes]:
        """
        Method for listing the ring members of a poll whose ring is drawn in view.number.
        """
        members = self.compute_ring(view, poll_id)
        if self.behavior.wrong_ring_hash:
            return members[1:]
        return members

    def ring_claim(self, view: ChainView, poll_id: bytes) -> Statement:
        """
        Method for claiming the ring hash of a poll.
        :param view: Chain view.
        :param poll_id: Poll id.
        :return: Signed statement with the ring hash as payload.
        """
        claimed = ring_hash_of(self.members(view, poll_id))
        if self.behavior.wrong_ring_hash and claimed == ring_hash_of(self.compute_ring(view, poll_id)):
            claimed = domain_hash(label("merkle_leaf"), claimed)
        return self._statement("ring_hash", view.number, poll_id, claimed)

    """
    Vote verification
    """

    def verdict_claim(self, view: ChainView, poll_id: bytes, raws: List[bytes]) -> Statement:
        """
        Method for claiming verdicts on the votes of one poll.
        :param view: Chain view.
        :param poll_id: Poll id.
        :param raws: Encoded votes.
        :return: Signed statement with transaction hash and verdict byte pairs as payload.
        """
        self._counters.signatures_verified += len(raws)
        verdicts = view.oracle.verdicts(view.ledger, poll_id, raws)
        if self.behavior.wrong_verification_claims:
            verdicts = {tx: not verdict for tx, verdict in verdicts.items()}
        return self._statement("verdicts", view.number, poll_id, encode_verdicts(verdicts))

    def ring_with_proof(self, view: ChainView, poll_id: bytes) -> Tuple[List[bytes], Optional[bytes], Proof]:
        """
        Method for serving a retained ring with the Poll entry and its proof against the committed root.
        """
        members = view.ledger.ring_members.get(poll_id, [])
        if self.behavior.wrong_ring_hash:
            members = members[1:]
        value, proof = view.ledger.state.read(poll_key(poll_id))
        return members, value, proof

    """
    Discovery
    """

    def eligible_polls(self, view: ChainView, public_key: bytes, since: int) -> Statement:
        """
        Method for listing the polls whose rings, fixed after block since, contain a key.
        :param view: Chain view.
        :param public_key: URS key of the asking user.
        :param since: Last block the user already checked.
        :return: Signed statement with since and the concatenated poll ids as payload.
        """
        poll_ids = []
        if not self.behavior.drop_polls:
            config = view.ledger.config
            for poll_id, members in view.ledger.ring_members.items():
                entry = view.ledger.state.poll(poll_id)
                if since < entry.block + config.b_wait <= view.ledger.height and public_key in members:
                    poll_ids.append(poll_id)
        return self._statement("eligible_polls", view.ledger.height, public_key,
                               since.to_bytes(8, "big") + b"".join(sorted(poll_ids)))

    """
    Pools
    """

    def pool_claim(self, block: int, shard: int, raws: List[bytes]) -> Statement:
        """
        Method for committing to the content of a transaction pool.
        """
        return self._statement("pool", block, shard.to_bytes(4, "big"), b"".join(tx_hash(raw) for raw in raws))


def split_claims(claims: Dict[str, Statement]) -> Dict[bytes, List[str]]:
    """
    Function for grouping responders by their claimed payload.
    :param claims: Statements by responder name.
    :return: Responder names by payload, in first-seen order.
    """
    groups: Dict[bytes, List[str]] = {}
    for name, statement in claims.items():
        groups.setdefault(statement.payload, []).append(name)
    return groups


def is_vote(raw: bytes) -> bool:
    return raw[:1] == CreateVote.kind.value
