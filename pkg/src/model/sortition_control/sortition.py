# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from __future__ import annotations
import hashlib
import hmac
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Iterable
import numpy as np
from src.configuration import configuration as cfg
from src.model.group_control.group_primitives import GroupElement, domain_hash, label
from src.model.urs_control.data_model import Ring
from src.model.sortition_control.exceptions import EmptyAudienceException


"""
Seed chain
"""


def genesis_seed(seed: str = None) -> bytes:
    """
    Function for deriving the genesis seed from a configuration string.
    :param seed: Seed string.
        Defaults to the configured genesis seed.
    :return: 32-byte seed.
    """
    return domain_hash(label("seed"), (cfg.GENESIS_SEED if seed is None else seed).encode("utf-8"))


def next_seed(prev_seed: bytes, proposer_key: bytes) -> bytes:
    """
    Function for deriving the next block seed as keyed hash of the previous seed under the proposer key.
    :param prev_seed: Seed of the previous block.
    :param proposer_key: Proposer key bytes.
    :return: 32-byte seed.
    """
    return hmac.new(proposer_key, label("seed") + prev_seed, hashlib.sha256).digest()


class SeedChain(object):
    """
    Class, representing the per-block seed chain.
    """

    def __init__(self, genesis: Optional[bytes] = None) -> None:
        """
        Initiation method.
        :param genesis: Seed of block 0.
            Defaults to None in which case the configured genesis seed is used.
        """
        self.seeds: Dict[int, bytes] = {0: genesis_seed() if genesis is None else genesis}

    @property
    def height(self) -> int:
        return max(self.seeds)

    def extend(self, block_number: int, proposer_key: bytes) -> bytes:
        """
        Method for extending the chain by one block.
        :param block_number: Number of the new block, one above the current height.
        :param proposer_key: Proposer key bytes.
        :return: New seed.
        """
        if block_number != self.height + 1:
            raise ValueError(f"seed chain at height {self.height} cannot be extended to block {block_number}")
        self.seeds[block_number] = next_seed(self.seeds[block_number - 1], proposer_key)
        return self.seeds[block_number]

    def seed_at(self, block_number: int) -> bytes:
        """
        Method for looking up a block seed.
        :param block_number: Block number.
        :return: Seed.
        """
        return self.seeds[block_number]


def compute_bwait(h: float, epsilon: float) -> int:
    """
    Function for computing the smallest waiting period k with (1-h) * ((1-h)(1+h)/h)^(k-1) < epsilon.
    :param h: Honest fraction.
    :param epsilon: Tolerated probability of seed bias.
    :return: Waiting period in blocks.
    """
    if not (0 < h < 1 and 0 < epsilon < 1):
        raise ValueError(f"honest fraction {h} and epsilon {epsilon} must lie in (0, 1)")
    ratio = (1 - h) * (1 + h) / h
    if ratio >= 1 and (1 - h) >= epsilon:
        raise ValueError(f"bias series does not decay for honest fraction {h}")
    k = 1
    while (1 - h) * ratio ** (k - 1) >= epsilon:
        k += 1
    return k


def bwait_series(h: float, k: int) -> float:
    """
    Function for evaluating the seed-bias bound after k blocks.
    :param h: Honest fraction.
    :param k: Number of blocks.
    :return: (1-h) * ((1-h)(1+h)/h)^(k-1).
    """
    return (1 - h) * ((1 - h) * (1 + h) / h) ** (k - 1)


"""
Voter selection
"""


def vrf_score(seed: bytes, poll_id: bytes, public_key: bytes) -> bytes:
    """
    Function for computing the public selection score H(seed || PID || pk).
    :param seed: Seed of block B_p + B_wait.
    :param poll_id: Poll id.
    :param public_key: Public key encoding.
    :return: 32-byte score.
    """
    return domain_hash(label("vrf"), seed + poll_id + public_key)


@dataclass
class AudienceEntry:
    """
    Subscribed user of a topic.
    """
    public_key: bytes
    uuid: bytes = b""
    eligible_from: int = 0
    subscribed_at: int = 0


class UuidRegistry(object):
    """
    Class, mapping public keys to 8-byte user ids.
    """

    def __init__(self) -> None:
        self._by_key: Dict[bytes, bytes] = {}
        self._by_uuid: Dict[bytes, bytes] = {}

    def uuid_for(self, public_key: bytes) -> bytes:
        """
        Method for getting (and on first use assigning) the id of a key.
        :param public_key: Public key encoding.
        :return: 8-byte id.
        """
        if public_key not in self._by_key:
            uuid = len(self._by_key).to_bytes(8, "big")
            self._by_key[public_key] = uuid
            self._by_uuid[uuid] = public_key
        return self._by_key[public_key]

    def key_for(self, uuid: bytes) -> bytes:
        return self._by_uuid[uuid]

    def __len__(self) -> int:
        return len(self._by_key)


def ring_hash_of(members: Iterable[bytes]) -> bytes:
    """
    Function for hashing the canonical encoding of ring member keys.
    :param members: Public key encodings.
    :return: Ring hash.
    """
    return domain_hash(label("merkle_leaf"), b"".join(sorted(members)))


@dataclass
class VoterDraw:
    """
    Result of one voter selection.
    """
    poll_id: bytes
    block_committed: int
    audience: List[AudienceEntry]
    scores: Dict[bytes, bytes]
    members: List[bytes] = field(default_factory=list)

    def ring_hash(self) -> bytes:
        return ring_hash_of(self.members)

    def ring(self) -> Ring:
        """
        Method for building the canonical URS ring of the selected members.
        :return: Ring.
        """
        return Ring(GroupElement.from_bytes(member) for member in self.members)


def ring_size(n_req: int, w: Fraction, audience_size: int) -> int:
    """
    Function for getting the number of selected voters.
    :param n_req: Requested votes.
    :param w: Epoch threshold multiplier.
    :param audience_size: Eligible audience size.
    :return: min(ceil(W * n_req), audience size).
    """
    return min(max(math.ceil(Fraction(w) * n_req), 1), audience_size)


def eligible_audience(entries: Iterable[AudienceEntry], block_committed: int,
                      resubscribe_after: Optional[int] = None) -> List[AudienceEntry]:
    """
    Function for filtering an audience to the users eligible for a poll.
    :param entries: Topic audience.
    :param block_committed: Block the poll was committed in.
    :param resubscribe_after: Maximum subscription age in blocks.
        Defaults to None in which case subscriptions never expire.
    :return: Eligible entries.
    """
    return [entry for entry in entries if entry.eligible_from <= block_committed and (
        resubscribe_after is None or block_committed - entry.subscribed_at <= resubscribe_after)]


def select_ring(seed: bytes, poll_id: bytes, block_committed: int, audience: List[AudienceEntry], n_req: int,
                w: Fraction = Fraction(1)) -> VoterDraw:
    """
    Function for selecting the highest-scoring audience members of a poll.
    Ties are broken by ascending key bytes.
    :param seed: Seed of block block_committed + B_wait.
    :param poll_id: Poll id.
    :param block_committed: Block the poll was committed in.
    :param audience: Eligible audience.
    :param n_req: Requested votes.
    :param w: Epoch threshold multiplier.
        Defaults to 1.
    :return: Voter draw.
    """
    if not audience:
        raise EmptyAudienceException(poll_id)
    scores = {entry.public_key: vrf_score(seed, poll_id, entry.public_key) for entry in audience}
    ranked = sorted(scores, key=lambda public_key: (-int.from_bytes(scores[public_key], "big"), public_key))
    members = sorted(ranked[:ring_size(n_req, w, len(audience))])
    return VoterDraw(poll_id, block_committed, list(audience), scores, members)


"""
Fairness
"""


def fairness_delta(x: float, ring_size: int, epsilon: float) -> float:
    """
    Function for computing the representation error bound sqrt(3 / (x N) * ln(2 / epsilon)).
    :param x: Group fraction of the audience.
    :param ring_size: Ring size N.
    :param epsilon: Failure probability.
    :return: Relative error bound.
    """
    if not (0 < x <= 1 and ring_size >= 1 and 0 < epsilon < 1):
        raise ValueError(f"invalid fairness parameters x={x}, N={ring_size}, epsilon={epsilon}")
    return math.sqrt(3 / (x * ring_size) * math.log(2 / epsilon))


def representation_trials(audience_size: int, group_fraction: float, ring_size: int, draws: int,
                          seed: int = 0) -> np.ndarray:
    """
    Function for measuring the group share of selected rings over seeded draws.
    The first group_fraction of the audience forms the group.
    :param audience_size: Audience size.
    :param group_fraction: Group fraction x.
    :param ring_size: Ring size.
    :param draws: Number of draws.
    :param seed: Base seed.
        Defaults to 0.
    :return: Group fraction of each ring.
    """
    keys = [index.to_bytes(32, "big") for index in range(audience_size)]
    group_size = int(round(group_fraction * audience_size))
    group = set(keys[:group_size])
    shares = np.zeros(draws)
    for draw in range(draws):
        draw_seed = domain_hash(label("seed"), seed.to_bytes(8, "big") + draw.to_bytes(8, "big"))
        scores = sorted(keys, key=lambda key: vrf_score(draw_seed, b"fairness", key), reverse=True)
        shares[draw] = sum(1 for key in scores[:ring_size] if key in group) / ring_size
    return shares
