# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from __future__ import annotations
from dataclasses import dataclass
from typing import List
from pydantic import BaseModel, validator
from src.configuration import configuration as cfg
from src.model.sortition_control.thresholding import ThresholdRule


EMPTY_RING_HASH = b"\x00" * 32


class LedgerConfig(BaseModel):
    """
    Protocol parameters of a chain.
    """
    b_wait: int = cfg.B_WAIT
    epoch_length: int = cfg.EPOCH_LENGTH
    topics: List[int] = [1]
    permissioned: bool = False
    threshold_rule: ThresholdRule = ThresholdRule.AS_PRINTED
    lam: float = 1.0
    resubscribe_after: int = None
    block_size_limit: int = cfg.BLOCK_SIZE_LIMIT
    digest_length: int = cfg.MERKLE_DIGEST_LENGTH

    @validator("b_wait", "epoch_length", "block_size_limit", "digest_length")
    def _positive(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("must be positive")
        return value

    @validator("digest_length")
    def _digest_length(cls, value: int) -> int:
        if value > 32:
            raise ValueError("digest length is at most 32 bytes")
        return value

    @validator("lam")
    def _lambda(cls, value: float) -> float:
        if value < 1:
            raise ValueError("lambda must be at least 1")
        return value

    @validator("topics")
    def _topics(cls, value: List[int]) -> List[int]:
        if not value or any(not 0 <= topic < 2 ** 32 for topic in value):
            raise ValueError("topics must be a non-empty list of 4-byte ids")
        return value


"""
Global state keys
"""


def poll_key(pid: bytes) -> bytes:
    return b"P" + pid


def poll_data_key(pid: bytes) -> bytes:
    return b"I" + pid


def vote_key(pid: bytes, index: int) -> bytes:
    return b"V" + pid + index.to_bytes(4, "big")


def vote_tag_key(pid: bytes, tag: bytes) -> bytes:
    return b"T" + pid + tag


def threshold_key(topic: int) -> bytes:
    return b"W" + topic.to_bytes(4, "big")


def scaling_key(topic: int) -> bytes:
    return b"U" + topic.to_bytes(4, "big")


def blockwise_key(block: int, topic: int) -> bytes:
    return b"B" + block.to_bytes(8, "big") + topic.to_bytes(4, "big")


def audience_key(topic: int, public_key: bytes) -> bytes:
    return b"A" + topic.to_bytes(4, "big") + public_key


def identity_key(sender: bytes) -> bytes:
    return b"K" + sender


"""
Global state values
"""


@dataclass
class PollEntry:
    """
    Poll metadata needed to validate votes: B_n | topic | n_req | n_seen | B_vw | H(R).
    """
    block: int
    topic: int
    n_req: int
    n_seen: int
    b_vw: int
    ring_hash: bytes = EMPTY_RING_HASH

    def to_bytes(self) -> bytes:
        return (self.block.to_bytes(8, "big") + self.topic.to_bytes(4, "big") + self.n_req.to_bytes(4, "big")
                + self.n_seen.to_bytes(4, "big") + self.b_vw.to_bytes(4, "big") + self.ring_hash)

    @classmethod
    def from_bytes(cls, data: bytes) -> PollEntry:
        return cls(int.from_bytes(data[:8], "big"), int.from_bytes(data[8:12], "big"),
                   int.from_bytes(data[12:16], "big"), int.from_bytes(data[16:20], "big"),
                   int.from_bytes(data[20:24], "big"), data[24:56])

    @property
    def has_ring(self) -> bool:
        return self.ring_hash != EMPTY_RING_HASH

    def window(self, b_wait: int) -> range:
        """
        Blocks B_i with B_p + B_wait < B_i <= B_p + B_wait + B_vw.
        """
        return range(self.block + b_wait + 1, self.block + b_wait + self.b_vw + 1)

    def to_dict(self) -> dict:
        return {"block": self.block, "topic": self.topic, "n_req": self.n_req, "n_seen": self.n_seen,
                "b_vw": self.b_vw, "ring_hash": self.ring_hash.hex()}


@dataclass
class ScalingEntry:
    """
    Epoch counters v_exp | v_seen of a topic.
    """
    v_exp: int = 0
    v_seen: int = 0

    def to_bytes(self) -> bytes:
        return self.v_exp.to_bytes(4, "big") + self.v_seen.to_bytes(4, "big")

    @classmethod
    def from_bytes(cls, data: bytes) -> ScalingEntry:
        return cls(int.from_bytes(data[:4], "big"), int.from_bytes(data[4:8], "big"))


@dataclass
class AudienceRecord:
    """
    Subscription of a URS key to a topic: eligible-from block | subscription block.
    """
    eligible_from: int
    subscribed_at: int

    def to_bytes(self) -> bytes:
        return self.eligible_from.to_bytes(8, "big") + self.subscribed_at.to_bytes(8, "big")

    @classmethod
    def from_bytes(cls, data: bytes) -> AudienceRecord:
        return cls(int.from_bytes(data[:8], "big"), int.from_bytes(data[8:16], "big"))


@dataclass
class IdentityRecord:
    """
    URS key and current topic of a citizen identity.
    """
    public_key: bytes
    topic: int

    def to_bytes(self) -> bytes:
        return self.public_key + self.topic.to_bytes(4, "big")

    @classmethod
    def from_bytes(cls, data: bytes) -> IdentityRecord:
        return cls(data[:32], int.from_bytes(data[32:36], "big"))
