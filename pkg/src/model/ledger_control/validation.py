# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from __future__ import annotations
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Union
from src.model.group_control.exceptions import NonCanonicalEncodingException
from src.model.group_control.group_primitives import GroupElement
from src.model.blindsig_control.registration import Certificate, verify_certificate
from src.model.blindsig_control.rsa_blind import RsaPublicKey
from src.model.urs_control import urs
from src.model.urs_control.data_model import Ring, UrsParams, UrsSignature
from src.model.urs_control.exceptions import MalformedSignatureException
from src.model.ledger_control.data_model import LedgerConfig
from src.model.ledger_control.exceptions import TransactionDecodingException
from src.model.ledger_control.global_state import GlobalState
from src.model.ledger_control.transactions import (Transaction, RegisterVoter, CreatePoll, CreateVote,
                                                   ModifySubscription, MESSAGE_LENGTHS, SIGNATURE_LENGTH,
                                                   SENDER_LENGTH, decode, verify_sender)
from src.model.sortition_control.sortition import eligible_audience


class ReasonCode(Enum):
    """
    Validation outcomes.
    """
    ACCEPTED = 0
    MALFORMED_TRANSACTION = 1
    MALFORMED_SIGNATURE = 2
    BAD_SENDER_SIGNATURE = 3
    KEY_NOT_WELL_FORMED = 4
    KEY_ALREADY_REGISTERED = 5
    CITIZEN_ALREADY_REGISTERED = 6
    UNKNOWN_TOPIC = 7
    INVALID_CERTIFICATE = 8
    DUPLICATE_POLL_ID = 9
    INVALID_N_REQ = 10
    UNKNOWN_POLL = 11
    WINDOW_NOT_OPEN = 12
    WINDOW_CLOSED = 13
    RING_UNAVAILABLE = 14
    INVALID_SIGNATURE = 15
    DUPLICATE_TAG = 16
    UNKNOWN_CITIZEN = 17
    SUBSCRIPTION_NOT_ALLOWED = 18
    UNCHANGED_SUBSCRIPTION = 19


@dataclass(frozen=True)
class ValidationResult:
    """
    Outcome of validating one transaction.
    """
    reason: ReasonCode
    detail: str = ""

    @property
    def valid(self) -> bool:
        return self.reason == ReasonCode.ACCEPTED


ACCEPTED = ValidationResult(ReasonCode.ACCEPTED)


@dataclass
class ValidationContext:
    """
    Everything a validator needs besides the transaction: state, protocol parameters and retained rings.
    """
    state: GlobalState
    config: LedgerConfig
    params: UrsParams
    rings: Dict[bytes, Optional[Ring]] = field(default_factory=dict)
    role_keys: Dict[int, RsaPublicKey] = field(default_factory=dict)


def _well_formed_key(public_key: bytes) -> bool:
    try:
        return len(public_key) == 32 and not GroupElement.from_bytes(public_key).is_identity()
    except NonCanonicalEncodingException:
        return False


def _shape_error(tx: Transaction) -> Optional[str]:
    if len(tx.message()) != MESSAGE_LENGTHS[tx.kind]:
        return f"message of {len(tx.message())} bytes"
    if not isinstance(tx, CreateVote) and (len(tx.signature) != SIGNATURE_LENGTH or len(tx.sender) != SENDER_LENGTH):
        return "sender or signature of wrong length"
    return None


def validate(tx: Union[Transaction, bytes], context: ValidationContext, block_number: int,
             verdict: Optional[bool] = None) -> ValidationResult:
    """
    Function for checking a transaction against the state before block block_number.
    :param tx: Transaction or its encoding.
    :param context: Validation context.
    :param block_number: Number B_i of the block the transaction would be committed in.
    :param verdict: Precomputed ring signature verdict for votes.
        Defaults to None in which case the signature is verified here.
    :return: Validation result.
    """
    if isinstance(tx, bytes):
        try:
            tx = decode(tx)
        except TransactionDecodingException as ex:
            return ValidationResult(ReasonCode.MALFORMED_TRANSACTION, str(ex))
    shape_error = _shape_error(tx)
    if shape_error is not None:
        return ValidationResult(ReasonCode.MALFORMED_TRANSACTION, shape_error)
    if isinstance(tx, CreateVote):
        return _validate_vote(tx, context, block_number, verdict)
    if not verify_sender(tx):
        return ValidationResult(ReasonCode.BAD_SENDER_SIGNATURE)
    if isinstance(tx, RegisterVoter):
        return _validate_registration(tx, context)
    if isinstance(tx, CreatePoll):
        return _validate_poll(tx, context, block_number)
    return _validate_subscription(tx, context)


def _validate_registration(tx: RegisterVoter, context: ValidationContext) -> ValidationResult:
    state = context.state
    if not _well_formed_key(tx.public_key):
        return ValidationResult(ReasonCode.KEY_NOT_WELL_FORMED)
    if not state.has_topic(tx.topic):
        return ValidationResult(ReasonCode.UNKNOWN_TOPIC, str(tx.topic))
    if context.config.permissioned:
        if tx.certificate is None:
            return ValidationResult(ReasonCode.INVALID_CERTIFICATE, "missing certificate")
        try:
            certificate = Certificate.from_bytes(tx.certificate)
        except ValueError as ex:
            return ValidationResult(ReasonCode.INVALID_CERTIFICATE, str(ex))
        if certificate.public_key != tx.public_key or not verify_certificate(context.role_keys, certificate):
            return ValidationResult(ReasonCode.INVALID_CERTIFICATE, f"role {certificate.role_id}")
    if state.identity(tx.sender) is not None:
        return ValidationResult(ReasonCode.CITIZEN_ALREADY_REGISTERED)
    if state.is_registered(tx.public_key):
        return ValidationResult(ReasonCode.KEY_ALREADY_REGISTERED)
    return ACCEPTED


def _validate_poll(tx: CreatePoll, context: ValidationContext, block_number: int) -> ValidationResult:
    state = context.state
    if tx.b_vw == 0:
        return ValidationResult(ReasonCode.MALFORMED_TRANSACTION, "empty voting window")
    if state.poll(tx.poll_id) is not None:
        return ValidationResult(ReasonCode.DUPLICATE_POLL_ID, tx.poll_id.hex())
    if not state.has_topic(tx.topic):
        return ValidationResult(ReasonCode.UNKNOWN_TOPIC, str(tx.topic))
    audience = len(eligible_audience(state.audience(tx.topic), block_number, context.config.resubscribe_after))
    if not 0 < tx.n_req < audience:
        return ValidationResult(ReasonCode.INVALID_N_REQ, f"n_req {tx.n_req} for audience {audience}")
    return ACCEPTED


def _validate_vote(tx: CreateVote, context: ValidationContext, block_number: int,
                   verdict: Optional[bool]) -> ValidationResult:
    poll = context.state.poll(tx.poll_id)
    if poll is None:
        return ValidationResult(ReasonCode.UNKNOWN_POLL, tx.poll_id.hex())
    window = poll.window(context.config.b_wait)
    if block_number < window.start:
        return ValidationResult(ReasonCode.WINDOW_NOT_OPEN, f"opens at {window.start}")
    if block_number >= window.stop:
        return ValidationResult(ReasonCode.WINDOW_CLOSED, f"closed after {window.stop - 1}")
    ring = context.rings.get(tx.poll_id)
    if not poll.has_ring or ring is None or ring.ring_hash() != poll.ring_hash:
        return ValidationResult(ReasonCode.RING_UNAVAILABLE)
    try:
        signature = UrsSignature.from_bytes(tx.signature)
    except MalformedSignatureException as ex:
        return ValidationResult(ReasonCode.MALFORMED_SIGNATURE, str(ex))
    if signature.arity != ring.arity:
        return ValidationResult(ReasonCode.MALFORMED_SIGNATURE, f"arity {signature.arity} for ring {len(ring)}")
    if context.state.has_tag(tx.poll_id, urs.tag_of(signature).to_bytes()):
        return ValidationResult(ReasonCode.DUPLICATE_TAG)
    if verdict is None:
        verdict = urs.verify(context.params, tx.poll_id, tx.vote, ring, signature)
    return ACCEPTED if verdict else ValidationResult(ReasonCode.INVALID_SIGNATURE)


def _validate_subscription(tx: ModifySubscription, context: ValidationContext) -> ValidationResult:
    if context.config.permissioned:
        return ValidationResult(ReasonCode.SUBSCRIPTION_NOT_ALLOWED)
    identity = context.state.identity(tx.sender)
    if identity is None:
        return ValidationResult(ReasonCode.UNKNOWN_CITIZEN)
    if not context.state.has_topic(tx.topic):
        return ValidationResult(ReasonCode.UNKNOWN_TOPIC, str(tx.topic))
    if identity.topic == tx.topic:
        return ValidationResult(ReasonCode.UNCHANGED_SUBSCRIPTION)
    return ACCEPTED
