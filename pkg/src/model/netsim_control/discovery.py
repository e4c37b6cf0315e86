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
from typing import Dict, List
from src.configuration import configuration as cfg
from src.model.ledger_control.data_model import PollEntry
from src.model.netsim_control.data_model import Evidence
from src.model.netsim_control.network import Network
from src.model.netsim_control.offload import fetch_ring
from src.model.netsim_control.politician import ChainView, Politician


@dataclass
class DiscoveryResult:
    """
    Polls a user found itself eligible for, with evidence against politicians that withheld them.
    """
    poll_ids: List[bytes]
    evidence: List[Evidence] = field(default_factory=list)
    rejected_claims: int = 0
    elapsed: float = 0.0


def discover_polls(user: str, public_key: bytes, politicians: List[Politician], view: ChainView, since: int,
                   network: Network, rng: Random) -> DiscoveryResult:
    """
    Function for asking every politician which polls with rings fixed after block since include a user.
    The union of all answers is checked claim by claim: a ring with a Merkle path to its Poll entry proves
    eligibility, and every politician that omitted a proven poll is reported.
    :param user: Name of the user node.
    :param public_key: URS key of the user.
    :param politicians: Politicians to ask.
    :param view: Chain view after the last committed block.
    :param since: Last block the user already checked.
    :param network: Network.
    :param rng: Randomness for picking the ring server.
    :return: Discovery result.
    """
    by_name = {politician.name: politician for politician in politicians}

    def respond(name: str):
        politician = by_name[name]
        if not politician.responsive:
            return None
        statement = politician.eligible_polls(view, public_key, since)
        return statement, len(statement.payload), 0.0

    exchange = network.exchange(user, list(by_name), 40, respond, 2 * network.latency)
    claims = {reply.sender: reply.payload for reply in exchange.replies}
    claimed: Dict[str, set] = {name: {statement.payload[offset:offset + 8]
                                      for offset in range(8, len(statement.payload), 8)}
                               for name, statement in claims.items()}
    union = sorted(set().union(*claimed.values())) if claimed else []

    result = DiscoveryResult([], elapsed=exchange.elapsed)
    b_wait = view.ledger.config.b_wait
    for poll_id in union:
        claimants = [by_name[name] for name in claims if poll_id in claimed[name]]
        if len(claimants) == len(claims):
            result.poll_ids.append(poll_id)
            continue
        members, data = fetch_ring(user, poll_id, claimants, [], view, network, rng)
        result.elapsed += 2 * network.latency
        entry = PollEntry.from_bytes(data["value"]) if data else None
        if entry is None or public_key not in members or not since < entry.block + b_wait <= view.ledger.height:
            result.rejected_claims += 1
            continue
        result.poll_ids.append(poll_id)
        for name, statement in claims.items():
            if poll_id not in claimed[name]:
                result.evidence.append(Evidence(statement.politician_id, "eligible_polls", statement,
                                                dict(data, poll_id=poll_id)))
    return result


def discovery_traffic_bytes(polls_per_day: int = 45000, users: int = 10 ** 6, ring: int = 100,
                            politicians: int = cfg.POLITICIAN_COUNT, id_length: int = 8, path_length: int = 300,
                            digest_length: int = 32) -> Dict[str, int]:
    """
    Function for estimating the daily discovery traffic of one user.
    Every politician lists the user's polls by id; the user fetches each ring as user ids, one Merkle path
    and one ring hash per poll.
    :param polls_per_day: Polls created per day.
    :param users: Number of users.
    :param ring: Ring size.
    :param politicians: Number of politicians asked.
    :param id_length: Bytes per poll or user id.
    :param path_length: Bytes per Merkle path.
    :param digest_length: Bytes per ring hash.
    :return: Traffic components and their total in bytes.
    """
    polls = math.ceil(polls_per_day * ring / users)
    traffic = {"polls_per_user": polls, "poll_ids": polls * politicians * id_length, "rings": polls * ring * id_length,
               "paths": polls * path_length, "hashes": polls * digest_length}
    traffic["total"] = traffic["poll_ids"] + traffic["rings"] + traffic["paths"] + traffic["hashes"]
    return traffic
