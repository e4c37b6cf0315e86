# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from dataclasses import dataclass
from random import Random
from typing import Dict, List, Optional
from src.model.group_control.group_primitives import domain_hash, label
from src.model.ledger_control.transactions import tx_hash
from src.model.netsim_control.data_model import FMap, FSelect, TxPoolPolicy


def _bucket(data: bytes, shard_count: int) -> int:
    return int.from_bytes(domain_hash(label("txgroup"), data), "big") % shard_count


def group_of(raw: bytes) -> Optional[bytes]:
    """
    Function for getting the poll id grouping a vote, None for other transactions.
    """
    return raw[1:9] if raw[:1] == b"V" else None


def shard_of(raw: bytes, block: int, policy: TxPoolPolicy) -> int:
    """
    Function for mapping a transaction to the pool politician index responsible in a block.
    Under DET_GROUP_HASHMAP all votes of a poll share the index Hash(i || PID) mod shard count.
    :param raw: Encoded transaction.
    :param block: Block number i.
    :param policy: Pool policy.
    :return: Shard index.
    """
    group = group_of(raw)
    if policy.f_map == FMap.DET_GROUP_HASHMAP and group is not None:
        return _bucket(block.to_bytes(8, "big") + group, policy.shard_count)
    return _bucket(block.to_bytes(8, "big") + tx_hash(raw), policy.shard_count)


@dataclass
class PendingTx:
    """
    Submitted transaction waiting for inclusion.
    """
    raw: bytes
    arrival: int
    deadline: Optional[int] = None

    @property
    def tx_hash(self) -> bytes:
        return tx_hash(self.raw)

    @property
    def group(self) -> Optional[bytes]:
        return group_of(self.raw)


class TxPool(object):
    """
    Class, representing the globally known pending transactions.
    """

    def __init__(self) -> None:
        self._pending: Dict[bytes, PendingTx] = {}

    def __len__(self) -> int:
        return len(self._pending)

    def __contains__(self, raw: bytes) -> bool:
        return tx_hash(raw) in self._pending

    def add(self, raw: bytes, arrival: int, deadline: Optional[int] = None) -> None:
        self._pending.setdefault(tx_hash(raw), PendingTx(raw, arrival, deadline))

    def remove(self, raws: List[bytes]) -> None:
        for raw in raws:
            self._pending.pop(tx_hash(raw), None)

    def pending(self) -> List[PendingTx]:
        """
        Method for listing pending transactions in arrival order.
        """
        return sorted(self._pending.values(), key=lambda pending: (pending.arrival, pending.tx_hash))

    def shard(self, index: int, block: int, policy: TxPoolPolicy) -> List[PendingTx]:
        return [pending for pending in self.pending() if shard_of(pending.raw, block, policy) == index]

    def select(self, index: int, block: int, policy: TxPoolPolicy, capacity: int, rng: Random) -> List[bytes]:
        """
        Method for filling the pool of one politician from its shard.
        :param index: Shard index of the politician.
        :param block: Block number.
        :param policy: Pool policy.
        :param capacity: Maximum number of transactions.
        :param rng: Randomness for the random policies.
        :return: Encoded transactions.
        """
        candidates = [pending for pending in self.shard(index, block, policy)
                      if not held_back(pending, self, block, policy)]
        if policy.f_select == FSelect.RANDOM_TX:
            rng.shuffle(candidates)
        elif policy.f_select == FSelect.OLDEST:
            candidates.sort(key=lambda pending: (pending.arrival, pending.tx_hash))
        elif policy.f_select == FSelect.DEADLINE:
            candidates.sort(key=lambda pending: (pending.deadline is None, pending.deadline or 0, pending.arrival,
                                                 pending.tx_hash))
        else:
            groups: Dict[bytes, List[PendingTx]] = {}
            for pending in candidates:
                groups.setdefault(pending.group or pending.tx_hash, []).append(pending)
            order = list(groups)
            rng.shuffle(order)
            candidates = [pending for key in order for pending in groups[key]]
        return [pending.raw for pending in candidates[:capacity]]

    def group_arrival(self, group: bytes) -> int:
        return min(pending.arrival for pending in self._pending.values() if pending.group == group)


def held_back(pending: PendingTx, pool: TxPool, block: int, policy: TxPoolPolicy) -> bool:
    """
    Function for the group commit heuristic: a vote group waits up to min(group wait, blocks to deadline - 2)
    blocks after its first vote arrived so that more votes can join its batch.
    """
    if not policy.grouped or pending.group is None or pending.deadline is None:
        return False
    wait = min(policy.group_wait, pending.deadline - block - 2)
    return block - pool.group_arrival(pending.group) < wait


def pool_politicians(seed: bytes, candidates: List[int], shard_count: int) -> Dict[int, int]:
    """
    Function for choosing the pool politicians of a block from its seed.
    :param seed: Block seed.
    :param candidates: Ids of politicians not blacklisted.
    :param shard_count: Number of shards.
    :return: Shard index by politician id.
    """
    ranked = sorted(candidates, key=lambda politician: domain_hash(label("txgroup"),
                                                                    seed + politician.to_bytes(4, "big")))
    return {politician: index for index, politician in enumerate(ranked[:shard_count])}
