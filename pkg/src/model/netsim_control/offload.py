# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
import math
from dataclasses import dataclass, field
from random import Random
from typing import Dict, List, Tuple
from src.model.group_control.exceptions import NonCanonicalEncodingException
from src.model.group_control.group_primitives import domain_hash, label
from src.model.urs_control import urs
from src.model.urs_control.data_model import Ring, UrsParams
from src.model.urs_control.exceptions import InvalidRingException, MalformedSignatureException
from src.model.ledger_control.blocks import LedgerState
from src.model.ledger_control.data_model import PollEntry, poll_key
from src.model.ledger_control.global_state import gs_verify
from src.model.ledger_control.transactions import decode, tx_hash
from src.model.sortition_control.sortition import ring_hash_of, ring_size, vrf_score
from src.model.netsim_control.data_model import Evidence, ResourceCounters, SafeSample, Statement
from src.model.netsim_control.exceptions import OffloadFailureException
from src.model.netsim_control.network import Network
from src.model.netsim_control.politician import ChainView, Politician, decode_verdicts, split_claims


@dataclass
class Timing:
    """
    Logical costs of citizen-side work.
    """
    t_hash: float
    t_verif: float
    n_thread: int


@dataclass
class RingOffload:
    """
    Ring hashes a citizen settled on, with the statements contradicting them.
    Ring statements become evidence once the block holding the rings is committed.
    """
    hashes: Dict[bytes, bytes]
    disputed: List[Statement] = field(default_factory=list)
    elapsed: float = 0.0
    fast_path: bool = True


@dataclass
class VoteOffload:
    """
    Vote verdicts a citizen settled on, with evidence against politicians that contradicted local verification.
    """
    verdicts: Dict[bytes, bool]
    evidence: List[Evidence] = field(default_factory=list)
    elapsed: float = 0.0
    fast_path: bool = True


def _sample_politicians(sample: SafeSample, politicians: Dict[int, Politician]) -> Dict[str, Politician]:
    return {politicians[politician_id].name: politicians[politician_id] for politician_id in sample.politician_ids}


def _local_ring(view: ChainView, poll_id: bytes, candidates: List[bytes]) -> List[bytes]:
    state = view.ring_state if view.ring_state is not None else view.ledger.state
    entry = state.poll(poll_id)
    eligible = {audience.public_key for audience in view.eligible(poll_id)}
    candidates = sorted(set(candidate for candidate in candidates if candidate in eligible))
    if not eligible:
        return []
    size = ring_size(entry.n_req, state.threshold(entry.topic), len(eligible))
    scores = {candidate: vrf_score(view.seed, poll_id, candidate) for candidate in candidates}
    ranked = sorted(candidates, key=lambda candidate: (-int.from_bytes(scores[candidate], "big"), candidate))
    return sorted(ranked[:size])


def offload_ring(citizen: str, sample: SafeSample, politicians: Dict[int, Politician], view: ChainView,
                 poll_ids: List[bytes], network: Network, timing: Timing) -> RingOffload:
    """
    Function for delegating the ring computation of new polls to a safe sample.
    Unanimous answers are accepted. Silent politicians are ignored after T_h = |Audience| k t_hash / n_thread.
    On conflicting answers the citizen fetches the member lists of all responders, recomputes the ring from their
    union and disputes every politician whose hash differs.
    :param citizen: Name of the citizen node.
    :param sample: Safe sample of the block.
    :param politicians: Politicians by id.
    :param view: Chain view of the block.
    :param poll_ids: Polls whose rings are drawn in the block.
    :param network: Network.
    :param timing: Citizen-side cost model.
    :return: Settled hashes.
    """
    if not poll_ids:
        return RingOffload({})
    counters = network.counter(citizen)
    counters.offloads += 1
    members_by_name = _sample_politicians(sample, politicians)
    audience = sum(view.audience_size(poll_id) for poll_id in poll_ids)
    processing = audience * timing.t_hash / timing.n_thread

    def respond(name: str):
        politician = members_by_name[name]
        if not politician.responsive:
            return None
        return {poll_id: politician.ring_claim(view, poll_id) for poll_id in poll_ids}, 32 * len(poll_ids), processing

    exchange = network.exchange(citizen, list(members_by_name), 40 * len(poll_ids), respond,
                                2 * network.latency + processing)
    if exchange.missing:
        counters.timeouts += 1
    if not exchange.replies:
        raise OffloadFailureException("offload_ring", sample.politician_ids)

    outcome = RingOffload({}, elapsed=exchange.elapsed)
    for poll_id in poll_ids:
        claims = {reply.sender: reply.payload[poll_id] for reply in exchange.replies}
        groups = split_claims(claims)
        if len(groups) == 1:
            outcome.hashes[poll_id] = next(iter(groups))
            continue
        outcome.fast_path = False
        counters.conflicts += 1
        union: List[bytes] = []
        for name in claims:
            members = members_by_name[name].members(view, poll_id)
            outcome.elapsed += network.round_trip(citizen, name, 8, 32 * len(members))
            union.extend(members)
        counters.vrf_evaluations += len(set(union))
        counters.hashes += len(set(union)) + 1
        outcome.elapsed += len(set(union)) * timing.t_hash / timing.n_thread
        local = ring_hash_of(_local_ring(view, poll_id, union))
        outcome.hashes[poll_id] = local
        outcome.disputed.extend(statement for statement in claims.values() if statement.payload != local)
    return outcome


def ring_evidence(disputed: List[Statement], ledger: LedgerState) -> List[Evidence]:
    """
    Function for turning disputed ring statements into evidence against the state committed in their block.
    :param disputed: Disputed ring statements.
    :param ledger: Ledger right after the block holding the rings was committed.
    :return: Evidence.
    """
    evidence = []
    for statement in disputed:
        value, proof = ledger.state.read(poll_key(statement.subject))
        evidence.append(Evidence(statement.politician_id, "ring_hash", statement,
                                 {"root_block": ledger.height, "value": value, "proof": proof}))
    return evidence


def fetch_ring(citizen: str, poll_id: bytes, preferred: List[Politician], others: List[Politician], view: ChainView,
               network: Network, rng: Random) -> Tuple[List[bytes], dict]:
    """
    Function for fetching a retained ring with a Merkle path to its Poll entry.
    Preferred politicians are tried first, each group in random order, until one serves a ring matching the
    authenticated ring hash.
    :return: Members and evidence data (root block, Poll entry, proof), or an empty list and no data.
    """
    preferred, others = list(preferred), list(others)
    rng.shuffle(preferred)
    rng.shuffle(others)
    order = preferred + others
    digest_length = view.ledger.config.digest_length
    for politician in order:
        members, value, proof = politician.ring_with_proof(view, poll_id)
        network.round_trip(citizen, politician.name, 8, 32 * len(members) + len(value or b"") + _proof_bytes(proof))
        if value is None or not gs_verify(view.root, poll_key(poll_id), value, proof, digest_length):
            continue
        if ring_hash_of(members) == PollEntry.from_bytes(value).ring_hash:
            return members, {"root_block": view.ledger.height, "value": value, "proof": proof, "members": members}
    return [], {}


def offload_vote_verify(citizen: str, sample: SafeSample, politicians: Dict[int, Politician], view: ChainView,
                        votes: Dict[bytes, List[bytes]], network: Network, timing: Timing,
                        rng: Random) -> VoteOffload:
    """
    Function for delegating vote verification to a safe sample.
    Unanimous verdicts are accepted. Silent politicians are ignored after T_r = k t_verif / n_thread.
    A contested vote is verified locally against a ring fetched with its Merkle path; politicians contradicting
    the local verdict are reported with evidence.
    :param citizen: Name of the citizen node.
    :param sample: Safe sample of the block.
    :param politicians: Politicians by id.
    :param view: Chain view of the block.
    :param votes: Encoded votes by poll id.
    :param network: Network.
    :param timing: Citizen-side cost model.
    :param rng: Randomness for picking the ring server.
    :return: Settled verdicts by transaction hash.
    """
    count = sum(len(raws) for raws in votes.values())
    if not count:
        return VoteOffload({})
    counters = network.counter(citizen)
    counters.offloads += 1
    members_by_name = _sample_politicians(sample, politicians)
    processing = count * timing.t_verif / timing.n_thread

    def respond(name: str):
        politician = members_by_name[name]
        if not politician.responsive:
            return None
        return ({poll_id: politician.verdict_claim(view, poll_id, raws) for poll_id, raws in votes.items()},
                math.ceil(count / 8), processing)

    exchange = network.exchange(citizen, list(members_by_name), 32 * count, respond,
                                2 * network.latency + processing)
    if exchange.missing:
        counters.timeouts += 1
    if not exchange.replies:
        raise OffloadFailureException("offload_vote_verify", sample.politician_ids)

    outcome = VoteOffload({}, elapsed=exchange.elapsed)
    for poll_id, raws in votes.items():
        claims = {reply.sender: reply.payload[poll_id] for reply in exchange.replies}
        decoded = {name: decode_verdicts(statement.payload) for name, statement in claims.items()}
        contested: List[Tuple[bytes, Dict[str, bool]]] = []
        for raw in raws:
            answers = {name: verdicts.get(tx_hash(raw)) for name, verdicts in decoded.items()}
            if len(set(answers.values())) == 1:
                outcome.verdicts[tx_hash(raw)] = next(iter(answers.values()))
            else:
                contested.append((raw, answers))
        if not contested:
            continue
        outcome.fast_path = False
        counters.conflicts += len(contested)
        values = list(contested[0][1].values())
        majority = max(set(values), key=lambda answer: (values.count(answer), answer is True, answer is False))
        members, data = fetch_ring(citizen, poll_id,
                                   [members_by_name[name] for name in claims if contested[0][1][name] == majority],
                                   [members_by_name[name] for name in claims if contested[0][1][name] != majority],
                                   view, network, rng)
        outcome.elapsed += 2 * network.latency
        local = verify_locally(view.ledger.params, poll_id, [raw for raw, _ in contested], members, counters)
        outcome.elapsed += len(contested) * timing.t_verif if members else 0.0
        for (raw, answers), verdict in zip(contested, local):
            outcome.verdicts[tx_hash(raw)] = verdict
            if not data:
                continue
            for name, answer in answers.items():
                if answer is not None and answer != verdict:
                    outcome.evidence.append(Evidence(claims[name].politician_id, "verdicts", claims[name],
                                                     dict(data, vote=raw)))
    return outcome


def verify_locally(params: UrsParams, poll_id: bytes, raws: List[bytes], members: List[bytes],
                   counters: ResourceCounters) -> List[bool]:
    """
    Function for verifying contested votes of one poll against an authenticated ring.
    A single vote is verified on its own, several are batch verified.
    :param params: Ring signature parameters.
    :param poll_id: Poll id shared by the votes.
    :param raws: Encoded votes.
    :param members: Ring members fetched with a Merkle path, empty if no politician served one.
    :param counters: Counters of the verifying citizen.
    :return: Verdicts in input order; all False without a ring.
    """
    try:
        ring = Ring.from_encoding(b"".join(members))
    except (InvalidRingException, NonCanonicalEncodingException):
        return [False] * len(raws)
    votes = [decode(raw) for raw in raws]
    counters.signatures_verified += len(votes)
    if len(votes) == 1:
        try:
            return [urs.verify(params, poll_id, votes[0].vote, ring, votes[0].signature)]
        except MalformedSignatureException:
            return [False]
    seed = domain_hash(label("urs_batch"), poll_id + b"".join(sorted(tx_hash(raw) for raw in raws)))
    return urs.batch_verify(params, poll_id, [(vote.vote, vote.signature) for vote in votes], ring, seed=seed)


def _proof_bytes(proof) -> int:
    if hasattr(proof, "siblings"):
        return proof.size()
    return sum(len(side[0]) + len(side[1]) + side[2].size() for side in (proof.left, proof.right) if side is not None)
