# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
from src.configuration import configuration as cfg
from src.model.group_control.group_primitives import GroupElement
from src.model.urs_control import urs
from src.model.urs_control.data_model import Ring, UrsParams
from src.model.urs_control.exceptions import InvalidRingException, MalformedSignatureException
from src.model.ledger_control.data_model import PollEntry, poll_key
from src.model.ledger_control.global_state import gs_verify
from src.model.ledger_control.transactions import decode, tx_hash
from src.model.ledger_control.exceptions import TransactionDecodingException
from src.model.sortition_control.sortition import ring_hash_of
from src.model.netsim_control.data_model import Evidence, TxPoolPolicy
from src.model.netsim_control.politician import decode_verdicts
from src.model.netsim_control.tx_pool import shard_of


@dataclass
class AuditContext:
    """
    Public information an independent auditor checks evidence against.
    """
    politician_keys: Dict[int, bytes]
    roots: Dict[int, bytes]
    params: UrsParams
    b_wait: int
    policy: TxPoolPolicy
    pool_shards: Dict[int, Dict[int, int]] = field(default_factory=dict)
    digest_length: int = cfg.MERKLE_DIGEST_LENGTH


def _poll_entry(evidence: Evidence, context: AuditContext, poll_id: bytes) -> Optional[PollEntry]:
    data = evidence.data
    root = context.roots.get(data["root_block"])
    if root is None or not gs_verify(root, poll_key(poll_id), data["value"], data["proof"], context.digest_length):
        return None
    return PollEntry.from_bytes(data["value"])


def _ring_contradiction(evidence: Evidence, context: AuditContext) -> bool:
    statement = evidence.statement
    entry = _poll_entry(evidence, context, statement.subject)
    return (entry is not None and evidence.data["root_block"] == statement.block
            and entry.ring_hash != statement.payload)


def _verdict_contradiction(evidence: Evidence, context: AuditContext) -> bool:
    statement, data = evidence.statement, evidence.data
    entry = _poll_entry(evidence, context, statement.subject)
    if entry is None or ring_hash_of(data["members"]) != entry.ring_hash:
        return False
    claimed = decode_verdicts(statement.payload).get(tx_hash(data["vote"]))
    try:
        vote = decode(data["vote"])
        ring = Ring(GroupElement.from_bytes(member) for member in data["members"])
        actual = urs.verify(context.params, statement.subject, vote.vote, ring, vote.signature)
    except (TransactionDecodingException, InvalidRingException, MalformedSignatureException):
        return False
    return claimed is not None and vote.poll_id == statement.subject and claimed != actual


def _discovery_contradiction(evidence: Evidence, context: AuditContext) -> bool:
    statement, data = evidence.statement, evidence.data
    poll_id = data["poll_id"]
    entry = _poll_entry(evidence, context, poll_id)
    if entry is None or ring_hash_of(data["members"]) != entry.ring_hash:
        return False
    since = int.from_bytes(statement.payload[:8], "big")
    claimed = {statement.payload[offset:offset + 8] for offset in range(8, len(statement.payload), 8)}
    return (statement.subject in data["members"] and poll_id not in claimed
            and since < entry.block + context.b_wait <= statement.block)


def _pool_contradiction(evidence: Evidence, context: AuditContext) -> bool:
    statement, raw = evidence.statement, evidence.data["tx"]
    assignment = context.pool_shards.get(statement.block, {})
    shard = int.from_bytes(statement.subject, "big")
    claimed = {statement.payload[offset:offset + 32] for offset in range(0, len(statement.payload), 32)}
    if assignment.get(statement.politician_id) != shard or tx_hash(raw) not in claimed:
        return False
    policy = context.policy.copy(update={"shard_count": len(assignment)})
    return shard_of(raw, statement.block, policy) != shard


AUDITORS = {
    "ring_hash": _ring_contradiction,
    "verdicts": _verdict_contradiction,
    "eligible_polls": _discovery_contradiction,
    "pool": _pool_contradiction
}


def audit_evidence(evidence: Evidence, context: AuditContext) -> bool:
    """
    Function for independently checking blacklist evidence.
    :param evidence: Evidence.
    :param context: Audit context.
    :return: True, if the statement is signed by the accused politician and contradicted by the attached data.
    """
    statement = evidence.statement
    public_key = context.politician_keys.get(evidence.politician_id)
    if (public_key is None or statement.politician_id != evidence.politician_id or statement.kind != evidence.kind
            or evidence.kind not in AUDITORS or not statement.verify(public_key)):
        return False
    try:
        return AUDITORS[evidence.kind](evidence, context)
    except KeyError:
        return False


class Blacklist(object):
    """
    Class, representing the politicians excluded by verifiable evidence.
    """

    def __init__(self, context: AuditContext) -> None:
        """
        Initiation method.
        :param context: Audit context evidence is checked against.
        """
        self._logger = cfg.LOGGER
        self.context = context
        self.evidence: Dict[int, List[Evidence]] = {}
        self.history: List[Tuple[int, int, str]] = []

    def __contains__(self, politician_id: int) -> bool:
        return politician_id in self.evidence

    def __len__(self) -> int:
        return len(self.evidence)

    def ids(self) -> List[int]:
        return sorted(self.evidence)

    def add(self, evidence: Evidence, block: int) -> bool:
        """
        Method for blacklisting a politician on audited evidence.
        :param evidence: Evidence.
        :param block: Block in which the evidence was gathered.
        :return: True, if the evidence was accepted.
        """
        if not audit_evidence(evidence, self.context):
            self._logger.warning(f"Rejected {evidence.kind} evidence against politician {evidence.politician_id}")
            return False
        if evidence.politician_id not in self.evidence:
            self.history.append((block, evidence.politician_id, evidence.kind))
            self._logger.info(f"Blacklisted politician {evidence.politician_id} for {evidence.kind} at block {block}")
        self.evidence.setdefault(evidence.politician_id, []).append(evidence)
        return True

    def all_evidence(self) -> List[Evidence]:
        return [evidence for politician in self.ids() for evidence in self.evidence[politician]]
