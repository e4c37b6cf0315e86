# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from __future__ import annotations
import bisect
import copy
from typing import Dict, List, Optional, Tuple, Union, Set
from fractions import Fraction
from src.configuration import configuration as cfg
from src.model.ledger_control import merkle
from src.model.ledger_control.merkle import InclusionProof, AbsenceProof
from src.model.ledger_control.data_model import (PollEntry, ScalingEntry, AudienceRecord, IdentityRecord, poll_key,
                                                 vote_tag_key, threshold_key, scaling_key, audience_key, identity_key,
                                                 vote_key)
from src.model.sortition_control.sortition import AudienceEntry
from src.model.sortition_control.thresholding import decode_threshold, encode_threshold


Proof = Union[InclusionProof, AbsenceProof]


class GlobalState(object):
    """
    Class, representing the Merkle-authenticated key-value store.
    """

    def __init__(self, digest_length: int = None) -> None:
        """
        Initiation method.
        :param digest_length: Merkle digest length.
            Defaults to the configured digest length.
        """
        self.digest_length = cfg.MERKLE_DIGEST_LENGTH if digest_length is None else digest_length
        self._entries: Dict[bytes, bytes] = {}
        self._keys: List[bytes] = []
        self._levels: Optional[List[List[bytes]]] = None
        self._registered_keys: Set[bytes] = set()

    def copy(self) -> GlobalState:
        """
        Method for copying the state.
        :return: Independent copy.
        """
        return copy.deepcopy(self)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: bytes) -> bool:
        return key in self._entries

    def get(self, key: bytes) -> Optional[bytes]:
        return self._entries.get(key)

    def put(self, key: bytes, value: bytes) -> None:
        """
        Method for writing an entry.
        :param key: Key.
        :param value: Value.
        """
        if key not in self._entries:
            bisect.insort(self._keys, key)
        elif key[:1] == b"K":
            self._registered_keys.discard(self._entries[key][:32])
        self._entries[key] = value
        if key[:1] == b"K":
            self._registered_keys.add(value[:32])
        self._levels = None

    def delete(self, key: bytes) -> None:
        """
        Method for removing an entry.
        :param key: Key.
        """
        value = self._entries.pop(key)
        del self._keys[bisect.bisect_left(self._keys, key)]
        if key[:1] == b"K":
            self._registered_keys.discard(value[:32])
        self._levels = None

    def items(self, prefix: bytes = b"") -> List[Tuple[bytes, bytes]]:
        """
        Method for listing entries by key prefix in key order.
        :param prefix: Key prefix.
            Defaults to all entries.
        :return: Key-value pairs.
        """
        start = bisect.bisect_left(self._keys, prefix)
        result = []
        for key in self._keys[start:]:
            if not key.startswith(prefix):
                break
            result.append((key, self._entries[key]))
        return result

    """
    Authentication
    """

    def _built_levels(self) -> List[List[bytes]]:
        if self._levels is None:
            self._levels = merkle.build_levels([merkle.leaf_hash(key, self._entries[key], self.digest_length)
                                                for key in self._keys], self.digest_length)
        return self._levels

    def root(self) -> bytes:
        """
        Method for getting the Merkle root over all entries.
        :return: Root digest.
        """
        return merkle.root_of(self._built_levels(), self.digest_length)

    def read(self, key: bytes) -> Tuple[Optional[bytes], Proof]:
        """
        Method for reading an entry with a proof against the current root.
        :param key: Key.
        :return: Value (None if absent) and inclusion or absence proof.
        """
        levels = self._built_levels()
        position = bisect.bisect_left(self._keys, key)
        if position < len(self._keys) and self._keys[position] == key:
            return self._entries[key], merkle.prove(levels, position)
        left = right = None
        if position > 0:
            left_key = self._keys[position - 1]
            left = (left_key, self._entries[left_key], merkle.prove(levels, position - 1))
        if position < len(self._keys):
            right_key = self._keys[position]
            right = (right_key, self._entries[right_key], merkle.prove(levels, position))
        return None, AbsenceProof(len(self._keys), left, right)

    """
    Namespaces
    """

    def poll(self, pid: bytes) -> Optional[PollEntry]:
        value = self.get(poll_key(pid))
        return None if value is None else PollEntry.from_bytes(value)

    def put_poll(self, pid: bytes, entry: PollEntry) -> None:
        self.put(poll_key(pid), entry.to_bytes())

    def has_tag(self, pid: bytes, tag: bytes) -> bool:
        return vote_tag_key(pid, tag) in self._entries

    def votes(self, pid: bytes) -> List[bytes]:
        """
        Method for listing the vote values of a poll in commit order.
        """
        entry = self.poll(pid)
        return [] if entry is None else [self._entries[vote_key(pid, index)] for index in range(entry.n_seen)]

    def has_topic(self, topic: int) -> bool:
        return threshold_key(topic) in self._entries

    def topics(self) -> List[int]:
        return [int.from_bytes(key[1:5], "big") for key, _ in self.items(b"W")]

    def threshold(self, topic: int) -> Fraction:
        return decode_threshold(self._entries[threshold_key(topic)])

    def put_threshold(self, topic: int, w: Fraction) -> None:
        self.put(threshold_key(topic), encode_threshold(w))

    def scaling(self, topic: int) -> ScalingEntry:
        value = self.get(scaling_key(topic))
        return ScalingEntry() if value is None else ScalingEntry.from_bytes(value)

    def put_scaling(self, topic: int, entry: ScalingEntry) -> None:
        self.put(scaling_key(topic), entry.to_bytes())

    def audience(self, topic: int) -> List[AudienceEntry]:
        """
        Method for listing the subscribers of a topic.
        :param topic: Topic id.
        :return: Audience entries in key order.
        """
        prefix = b"A" + topic.to_bytes(4, "big")
        entries = []
        for key, value in self.items(prefix):
            record = AudienceRecord.from_bytes(value)
            entries.append(AudienceEntry(key[5:], eligible_from=record.eligible_from,
                                         subscribed_at=record.subscribed_at))
        return entries

    def subscribe(self, topic: int, public_key: bytes, record: AudienceRecord) -> None:
        self.put(audience_key(topic, public_key), record.to_bytes())

    def unsubscribe(self, topic: int, public_key: bytes) -> None:
        self.delete(audience_key(topic, public_key))

    def identity(self, sender: bytes) -> Optional[IdentityRecord]:
        value = self.get(identity_key(sender))
        return None if value is None else IdentityRecord.from_bytes(value)

    def put_identity(self, sender: bytes, record: IdentityRecord) -> None:
        self.put(identity_key(sender), record.to_bytes())

    def is_registered(self, public_key: bytes) -> bool:
        return public_key in self._registered_keys

    """
    Snapshots
    """

    def to_snapshot(self) -> dict:
        """
        Method for exporting the state as JSON-compatible dictionary.
        :return: Snapshot with digest length, root and hex-encoded entries.
        """
        return {"digest_length": self.digest_length, "root": self.root().hex(),
                "entries": {key.hex(): self._entries[key].hex() for key in self._keys}}

    @classmethod
    def from_snapshot(cls, snapshot: dict) -> GlobalState:
        """
        Class method for importing a snapshot. The recorded root is not trusted; compare it with root().
        :param snapshot: Snapshot dictionary.
        :return: Global state.
        """
        state = cls(snapshot.get("digest_length"))
        for key, value in snapshot["entries"].items():
            state.put(bytes.fromhex(key), bytes.fromhex(value))
        return state


def gs_read(state: GlobalState, key: bytes) -> Tuple[Optional[bytes], Proof]:
    """
    Function for reading a key with its proof.
    :param state: Global state.
    :param key: Key.
    :return: Value or None and proof.
    """
    return state.read(key)


def gs_verify(root: bytes, key: bytes, value: Optional[bytes], proof: Proof, digest_length: int = None) -> bool:
    """
    Function for verifying a read against a root.
    :param root: Trusted root.
    :param key: Key.
    :param value: Claimed value, None for claimed absence.
    :param proof: Inclusion or absence proof.
    :param digest_length: Merkle digest length.
        Defaults to the configured digest length.
    :return: True, if the proof supports the claim.
    """
    digest_length = cfg.MERKLE_DIGEST_LENGTH if digest_length is None else digest_length
    if value is None:
        return isinstance(proof, AbsenceProof) and merkle.verify_absence(root, key, proof, digest_length)
    return isinstance(proof, InclusionProof) and merkle.verify_inclusion(root, key, value, proof, digest_length)
