# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
import heapq
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Tuple
from src.model.netsim_control.data_model import ResourceCounters


@dataclass
class Reply:
    """
    Response delivered to a requesting node.
    """
    sender: str
    payload: Any
    arrival: float


@dataclass
class ExchangeResult:
    """
    Replies that arrived before the deadline and the logical time the exchange took.
    """
    replies: List[Reply]
    elapsed: float
    missing: List[str]

    @property
    def complete(self) -> bool:
        return not self.missing


class Network(object):
    """
    Class, representing a deterministic message exchange on a logical clock.
    """

    def __init__(self, latency: float) -> None:
        """
        Initiation method.
        :param latency: One-way latency of every edge in logical seconds.
        """
        self.latency = latency
        self.counters: Dict[str, ResourceCounters] = {}
        self._sequence = 0

    def counter(self, node: str) -> ResourceCounters:
        """
        Method for getting (and on first use creating) the counters of a node.
        """
        if node not in self.counters:
            self.counters[node] = ResourceCounters()
        return self.counters[node]

    def transfer(self, sender: str, recipient: str, size: int) -> None:
        """
        Method for accounting a message of size bytes.
        """
        self.counter(sender).bytes_sent += size
        self.counter(recipient).bytes_received += size

    def exchange(self, requester: str, recipients: List[str], request_size: int,
                 respond: Callable[[str], Optional[Tuple[Any, int, float]]], deadline: float) -> ExchangeResult:
        """
        Method for sending one request to many nodes and collecting their replies in arrival order.
        :param requester: Requesting node.
        :param recipients: Queried nodes.
        :param request_size: Request size in bytes.
        :param respond: Function returning (payload, size, processing time) for a recipient or None if it stays silent.
        :param deadline: Logical time after which the requester stops waiting.
        :return: Exchange result.
        """
        queue: List[Tuple[float, int, str, Any, int]] = []
        for recipient in recipients:
            self.transfer(requester, recipient, request_size)
            response = respond(recipient)
            if response is None:
                continue
            payload, size, processing = response
            self._sequence += 1
            heapq.heappush(queue, (2 * self.latency + processing, self._sequence, recipient, payload, size))

        replies = []
        while queue and queue[0][0] <= deadline:
            arrival, _, recipient, payload, size = heapq.heappop(queue)
            self.transfer(recipient, requester, size)
            replies.append(Reply(recipient, payload, arrival))
        answered = {reply.sender for reply in replies}
        missing = [recipient for recipient in recipients if recipient not in answered]
        elapsed = deadline if missing else max((reply.arrival for reply in replies), default=0.0)
        return ExchangeResult(replies, elapsed, missing)

    def round_trip(self, requester: str, recipient: str, request_size: int, response_size: int) -> float:
        """
        Method for accounting a single request-response pair.
        :return: Logical time of the round trip.
        """
        self.transfer(requester, recipient, request_size)
        self.transfer(recipient, requester, response_size)
        return 2 * self.latency
