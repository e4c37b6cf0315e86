# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from __future__ import annotations
import hashlib
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Union
from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import serialization
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey, Ed25519PublicKey
from src.model.ledger_control.exceptions import TransactionDecodingException


SIGNATURE_LENGTH = 64
SENDER_LENGTH = 32
CONTENT_LENGTH = 256
VOTE_LENGTH = 257


class TxKind(Enum):
    """
    Transaction kinds by their key byte.
    """
    REGISTER_VOTER = b"R"
    CREATE_POLL = b"P"
    CREATE_VOTE = b"V"
    MODIFY_SUBSCRIPTION = b"C"


MESSAGE_LENGTHS = {
    TxKind.REGISTER_VOTER: 37,
    TxKind.CREATE_POLL: 277,
    TxKind.CREATE_VOTE: 266,
    TxKind.MODIFY_SUBSCRIPTION: 5
}


"""
Identities
"""


def identity_from_seed(seed: Union[str, bytes]) -> Ed25519PrivateKey:
    """
    Function for deriving a deterministic Ed25519 identity.
    :param seed: Seed string or bytes.
    :return: Private key.
    """
    seed = seed.encode("utf-8") if isinstance(seed, str) else seed
    return Ed25519PrivateKey.from_private_bytes(hashlib.sha256(b"identity/" + seed).digest())


def public_bytes(private_key: Ed25519PrivateKey) -> bytes:
    """
    Function for getting the raw 32-byte public key of an identity.
    """
    return private_key.public_key().public_bytes(serialization.Encoding.Raw, serialization.PublicFormat.Raw)


def ed25519_verify(public_key: bytes, signature: bytes, message: bytes) -> bool:
    """
    Function for verifying an Ed25519 signature on raw key bytes.
    :param public_key: 32-byte public key.
    :param signature: 64-byte signature.
    :param message: Signed message.
    :return: True, if the signature verifies.
    """
    try:
        Ed25519PublicKey.from_public_bytes(public_key).verify(signature, message)
        return True
    except (InvalidSignature, ValueError):
        return False


"""
Transactions
"""


@dataclass(frozen=True)
class RegisterVoter:
    """
    Registration of a URS key for a topic: "R" | pk | topic.
    """
    public_key: bytes
    topic: int
    sender: bytes = b""
    signature: bytes = b""
    certificate: Optional[bytes] = None
    kind = TxKind.REGISTER_VOTER

    def message(self) -> bytes:
        return self.kind.value + self.public_key + self.topic.to_bytes(4, "big")


@dataclass(frozen=True)
class CreatePoll:
    """
    Poll creation: "P" | PID | topic | n_req | B_vw | content.
    """
    poll_id: bytes
    topic: int
    n_req: int
    b_vw: int
    content: bytes
    sender: bytes = b""
    signature: bytes = b""
    kind = TxKind.CREATE_POLL

    def message(self) -> bytes:
        return (self.kind.value + self.poll_id + self.topic.to_bytes(4, "big") + self.n_req.to_bytes(4, "big")
                + self.b_vw.to_bytes(4, "big") + self.content)


@dataclass(frozen=True)
class CreateVote:
    """
    Anonymous vote: "V" | PID | rating | text, authenticated by a ring signature only.
    """
    poll_id: bytes
    vote: bytes
    signature: bytes = b""
    kind = TxKind.CREATE_VOTE

    def message(self) -> bytes:
        return self.kind.value + self.poll_id + self.vote

    @property
    def rating(self) -> int:
        return self.vote[0]


@dataclass(frozen=True)
class ModifySubscription:
    """
    Topic change of a registered citizen: "C" | topic.
    """
    topic: int
    sender: bytes = b""
    signature: bytes = b""
    kind = TxKind.MODIFY_SUBSCRIPTION

    def message(self) -> bytes:
        return self.kind.value + self.topic.to_bytes(4, "big")


Transaction = Union[RegisterVoter, CreatePoll, CreateVote, ModifySubscription]


def vote_value(rating: int, text: Union[str, bytes] = b"") -> bytes:
    """
    Function for building a 257-byte vote value.
    :param rating: Rating byte.
    :param text: Review text, padded with zeros to 256 bytes.
    :return: Vote value.
    """
    text = text.encode("utf-8") if isinstance(text, str) else text
    if not 0 <= rating < 256 or len(text) > CONTENT_LENGTH:
        raise ValueError(f"invalid vote: rating {rating}, {len(text)} bytes of text")
    return bytes([rating]) + text.ljust(CONTENT_LENGTH, b"\x00")


def poll_content(text: Union[str, bytes]) -> bytes:
    """
    Function for padding poll content to 256 bytes.
    """
    text = text.encode("utf-8") if isinstance(text, str) else text
    if len(text) > CONTENT_LENGTH:
        raise ValueError(f"poll content of {len(text)} bytes exceeds {CONTENT_LENGTH}")
    return text.ljust(CONTENT_LENGTH, b"\x00")


def signed_payload(tx: Transaction) -> bytes:
    """
    Function for getting the bytes covered by the sender signature.
    """
    certificate = getattr(tx, "certificate", None)
    return tx.message() + (certificate or b"")


def sign_transaction(tx: Transaction, identity: Ed25519PrivateKey) -> Transaction:
    """
    Function for attaching sender and Ed25519 signature to a non-vote transaction.
    :param tx: Unsigned transaction.
    :param identity: Sender identity.
    :return: Signed transaction.
    """
    if isinstance(tx, CreateVote):
        raise ValueError("votes are signed with ring signatures")
    tx = replace(tx, sender=public_bytes(identity))
    return replace(tx, signature=identity.sign(signed_payload(tx)))


def verify_sender(tx: Transaction) -> bool:
    """
    Function for checking the sender signature of a non-vote transaction.
    """
    return ed25519_verify(tx.sender, tx.signature, signed_payload(tx))


"""
Wire format
"""


def encode(tx: Transaction) -> bytes:
    """
    Function for encoding a transaction.
    Non-vote transactions: message | signature | sender [| certificate length | certificate].
    Votes: message | ring signature.
    :param tx: Transaction.
    :return: Encoding.
    """
    if isinstance(tx, CreateVote):
        return tx.message() + tx.signature
    encoded = tx.message() + tx.signature + tx.sender
    certificate = getattr(tx, "certificate", None)
    if certificate is not None:
        encoded += len(certificate).to_bytes(2, "big") + certificate
    return encoded


def decode(data: bytes) -> Transaction:
    """
    Function for decoding a transaction.
    :param data: Encoding.
    :return: Transaction.
    """
    try:
        kind = TxKind(data[:1])
    except ValueError:
        raise TransactionDecodingException(len(data), f"unknown kind {data[:1]!r}")
    length = MESSAGE_LENGTHS[kind]
    if len(data) < length:
        raise TransactionDecodingException(len(data), f"message shorter than {length} bytes")
    message, rest = data[:length], data[length:]
    if kind == TxKind.CREATE_VOTE:
        return CreateVote(message[1:9], message[9:], rest)

    if len(rest) < SIGNATURE_LENGTH + SENDER_LENGTH:
        raise TransactionDecodingException(len(data), "missing sender signature")
    signature, sender = rest[:SIGNATURE_LENGTH], rest[SIGNATURE_LENGTH:SIGNATURE_LENGTH + SENDER_LENGTH]
    trailer = rest[SIGNATURE_LENGTH + SENDER_LENGTH:]
    certificate = None
    if trailer:
        if kind != TxKind.REGISTER_VOTER:
            raise TransactionDecodingException(len(data), "trailing bytes")
        certificate_length = int.from_bytes(trailer[:2], "big")
        if len(trailer) != 2 + certificate_length:
            raise TransactionDecodingException(len(data), "certificate length mismatch")
        certificate = trailer[2:]

    if kind == TxKind.REGISTER_VOTER:
        return RegisterVoter(message[1:33], int.from_bytes(message[33:37], "big"), sender, signature, certificate)
    if kind == TxKind.CREATE_POLL:
        return CreatePoll(message[1:9], int.from_bytes(message[9:13], "big"), int.from_bytes(message[13:17], "big"),
                          int.from_bytes(message[17:21], "big"), message[21:], sender, signature)
    return ModifySubscription(int.from_bytes(message[1:5], "big"), sender, signature)


def tx_hash(tx: Union[Transaction, bytes]) -> bytes:
    """
    Function for hashing a transaction encoding.
    """
    return hashlib.sha256(tx if isinstance(tx, bytes) else encode(tx)).digest()
