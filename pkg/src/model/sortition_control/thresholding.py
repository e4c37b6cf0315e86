# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from __future__ import annotations
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import List, Tuple
import numpy as np
from tqdm import tqdm
from src.configuration import configuration as cfg
from src.model.sortition_control.sortition import AudienceEntry, select_ring, genesis_seed, next_seed


QUANTUM_BITS = 128
QUANTUM = Fraction(1, 1 << QUANTUM_BITS)


class ThresholdRule(Enum):
    """
    Epoch update rule for the threshold multiplier W.
    """
    AS_PRINTED = "as_printed"
    RECIPROCAL = "reciprocal"


def quantize(w: Fraction) -> Fraction:
    """
    Function for rounding W to the storable grid of 2^-128, keeping it positive.
    :param w: Multiplier.
    :return: Quantized multiplier.
    """
    steps = max(round(Fraction(w) / QUANTUM), 1)
    return Fraction(steps, 1 << QUANTUM_BITS)


def encode_threshold(w: Fraction) -> bytes:
    """
    Function for encoding W as 32-byte fixed point number with 128 fractional bits.
    :param w: Multiplier.
    :return: Encoding.
    """
    return int(quantize(w) * (1 << QUANTUM_BITS)).to_bytes(32, "big")


def decode_threshold(data: bytes) -> Fraction:
    """
    Function for decoding a stored multiplier.
    :param data: 32-byte encoding.
    :return: Multiplier.
    """
    return Fraction(int.from_bytes(data, "big"), 1 << QUANTUM_BITS)


@dataclass(frozen=True)
class EpochThreshold:
    """
    Threshold state of one topic in one epoch.
    """
    epoch: int
    w: Fraction
    v_exp: int = 0
    v_seen: int = 0
    lam: Fraction = Fraction(1)

    def record(self, n_req: int, n_seen: int) -> EpochThreshold:
        """
        Method for adding a finished poll to the epoch counters.
        :param n_req: Requested votes of the poll.
        :param n_seen: Accepted votes of the poll.
        :return: Updated threshold state.
        """
        return replace(self, v_exp=self.v_exp + n_req, v_seen=self.v_seen + n_seen)


def update_threshold(threshold: EpochThreshold, rule: ThresholdRule = ThresholdRule.AS_PRINTED) -> EpochThreshold:
    """
    Function for advancing a topic threshold to the next epoch.
    AS_PRINTED applies W' = lambda * W * v_seen / v_exp, RECIPROCAL applies W' = lambda * W * v_exp / v_seen.
    W stays unchanged when the denominator is zero.
    :param threshold: Threshold state at the end of the epoch.
    :param rule: Update rule.
        Defaults to AS_PRINTED.
    :return: Threshold state of the next epoch with reset counters.
    """
    numerator, denominator = ((threshold.v_seen, threshold.v_exp) if rule == ThresholdRule.AS_PRINTED
                              else (threshold.v_exp, threshold.v_seen))
    w = threshold.w
    if denominator > 0:
        w = quantize(threshold.lam * threshold.w * Fraction(numerator, denominator))
    return EpochThreshold(threshold.epoch + 1, w, 0, 0, threshold.lam)


def normalized_update(w: Fraction, polls: List[Tuple[int, int]], n_prime: int, lam: Fraction = Fraction(1),
                      rule: ThresholdRule = ThresholdRule.AS_PRINTED) -> Fraction:
    """
    Function for the size-normalized update, weighting each poll's turnout by n' / n_req.
    :param w: Current multiplier.
    :param polls: Tuples of n_req and n_seen per poll.
    :param n_prime: Normalized poll size n'.
    :param lam: Constant lambda.
        Defaults to 1.
    :param rule: Update rule.
        Defaults to AS_PRINTED.
    :return: Next multiplier.
    """
    v_exp = Fraction(n_prime * len(polls))
    v_seen = sum((Fraction(n_prime, n_req) * n_seen for n_req, n_seen in polls), Fraction(0))
    numerator, denominator = (v_seen, v_exp) if rule == ThresholdRule.AS_PRINTED else (v_exp, v_seen)
    if denominator == 0:
        return w
    return quantize(lam * w * numerator / denominator)


def epoch_of(block: int, epoch_length: int = None) -> int:
    """
    Function for getting the epoch of a block.
    """
    return block // (cfg.EPOCH_LENGTH if epoch_length is None else epoch_length)


def window_inside_epoch(window_start: int, window_end: int, epoch_length: int = None) -> bool:
    """
    Function for checking whether a voting window starts and ends strictly within one epoch.
    :param window_start: First block of the window.
    :param window_end: Last block of the window.
    :param epoch_length: Epoch length.
        Defaults to the configured epoch length.
    :return: True, if both ends lie in the same epoch without touching its boundary blocks.
    """
    epoch_length = cfg.EPOCH_LENGTH if epoch_length is None else epoch_length
    epoch = window_start // epoch_length
    first, last = epoch * epoch_length, (epoch + 1) * epoch_length - 1
    return first < window_start and window_end < last


@dataclass
class ThresholdTrace:
    """
    Per-epoch outcome of a thresholding simulation.
    """
    epoch: int
    w: float
    mean_votes: float
    mean_ring: float


def simulate_thresholding(audience_size: int, n_req: int, apathy: float, lam: float, epochs: int,
                          polls_per_epoch: int = 10, rule: ThresholdRule = ThresholdRule.RECIPROCAL,
                          seed: int = 0, initial_w: Fraction = Fraction(1)) -> List[ThresholdTrace]:
    """
    Function for simulating ring selection under voter apathy without cryptography.
    Each selected voter abstains with probability apathy.
    :param audience_size: Number of subscribed users.
    :param n_req: Requested votes per poll.
    :param apathy: Abstention probability a.
    :param lam: Constant lambda.
    :param epochs: Number of epochs.
    :param polls_per_epoch: Polls per epoch.
        Defaults to 10.
    :param rule: Update rule.
        Defaults to RECIPROCAL.
    :param seed: Seed for selection and abstention.
        Defaults to 0.
    :param initial_w: Starting multiplier.
        Defaults to 1.
    :return: Per-epoch traces.
    """
    rng = np.random.default_rng(seed)
    audience = [AudienceEntry(index.to_bytes(32, "big")) for index in range(audience_size)]
    threshold = EpochThreshold(0, quantize(initial_w), lam=Fraction(lam).limit_denominator(1 << 32))
    block_seed = genesis_seed(f"thresholding/{seed}")
    traces = []
    for epoch in tqdm(range(epochs), desc="Simulating epochs...", ncols=80, disable=not cfg.SHOW_PROGRESS):
        votes, rings = [], []
        for poll in range(polls_per_epoch):
            block_seed = next_seed(block_seed, b"thresholding")
            poll_id = (epoch * polls_per_epoch + poll).to_bytes(8, "big")
            draw = select_ring(block_seed, poll_id, epoch, audience, n_req, threshold.w)
            seen = int(rng.binomial(len(draw.members), 1 - apathy))
            threshold = threshold.record(n_req, seen)
            votes.append(seen)
            rings.append(len(draw.members))
        traces.append(ThresholdTrace(epoch, float(threshold.w), float(np.mean(votes)), float(np.mean(rings))))
        threshold = update_threshold(threshold, rule)
    return traces
