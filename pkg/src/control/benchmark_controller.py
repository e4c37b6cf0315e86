# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from random import Random
from time import perf_counter
from typing import Callable, List, Tuple
import pandas as pd
from tqdm import tqdm
from src.configuration import configuration as cfg
from src.model.urs_control import urs
from src.model.urs_control.data_model import Ring
from src.model.ledger_control.transactions import vote_value
from src.model.blindsig_control import rsa_blind


def timed(function: Callable, *args) -> Tuple[float, object]:
    """
    Function for timing a single call.
    :return: Elapsed seconds and the call's result.
    """
    start = perf_counter()
    result = function(*args)
    return perf_counter() - start, result


def summarize(frame: pd.DataFrame, by: List[str]) -> pd.DataFrame:
    """
    Function for reducing repeated timings to medians and standard deviations per group.
    :param frame: Raw timings.
    :param by: Grouping columns.
    :return: Summary with <column>_median and <column>_std columns.
    """
    summary = frame.groupby(by).agg(["median", "std"])
    summary.columns = [f"{column}_{statistic}" for column, statistic in summary.columns]
    return summary.reset_index().fillna(0.0)


class BenchmarkController(object):
    """
    Controller class for timing the cryptographic building blocks.
    """

    def __init__(self, seed: int = 0) -> None:
        """
        Initiation method.
        :param seed: Seed for keys, randomizers and messages.
            Defaults to 0.
        """
        self._logger = cfg.LOGGER
        self.seed = seed
        self.params = urs.setup()

    def bench_urs(self, ring_sizes: List[int], batch_sizes: List[int], repetitions: int = 3) -> pd.DataFrame:
        """
        Method for timing ring signature signing, serial verification and batch verification.
        Batch sizes above a ring size are capped at the ring size.
        :param ring_sizes: Ring sizes N.
        :param batch_sizes: Batch sizes.
        :param repetitions: Repetitions per configuration.
            Defaults to 3.
        :return: Median and standard deviation per ring and batch size, with the serial to batch speedup.
        """
        if min(batch_sizes) < 1 or repetitions < 1:
            raise ValueError("batch sizes and repetitions must be positive")
        rng = Random(self.seed)
        rows = []
        for ring_size in tqdm(ring_sizes, desc="URS ring sizes", ncols=80, disable=not cfg.SHOW_PROGRESS):
            keys = [urs.keygen(self.params, rng) for _ in range(ring_size)]
            ring = Ring(key.pk for key in keys)
            for batch_size in sorted({min(size, ring_size) for size in batch_sizes}):
                for repetition in range(repetitions):
                    poll_id = f"b{ring_size % 10 ** 6:06d}{repetition % 10}"[:8].encode("utf-8")
                    votes, sign_time = [], 0.0
                    for member in range(batch_size):
                        vote = vote_value(1 + member % 5, f"benchmark {repetition}/{member}")
                        elapsed, signature = timed(urs.sign, self.params, poll_id, vote, ring, keys[member].sk, rng)
                        sign_time += elapsed
                        votes.append((vote, signature.to_bytes()))
                    serial_time = sum(timed(urs.verify, self.params, poll_id, vote, ring, signature)[0]
                                      for vote, signature in votes)
                    batch_time, verdicts = timed(urs.batch_verify, self.params, poll_id, votes, ring)
                    if not all(verdicts):
                        self._logger.warning(f"Batch of {batch_size} on ring {ring_size} did not verify")
                    rows.append({"ring_size": ring_size, "batch_size": batch_size,
                                 "signature_bytes": len(votes[0][1]), "sign": sign_time / batch_size,
                                 "verify": serial_time / batch_size, "batch_verify": batch_time / batch_size,
                                 "speedup": serial_time / batch_time})
        summary = summarize(pd.DataFrame.from_records(rows), ["ring_size", "batch_size", "signature_bytes"])
        self._logger.info(f"Timed URS on rings {ring_sizes} with batches {batch_sizes}")
        return summary

    def bench_blindsig(self, key_sizes: List[int] = None, repetitions: int = 5) -> pd.DataFrame:
        """
        Method for timing the blind signature exchange of the registration ceremony.
        :param key_sizes: RSA modulus sizes.
            Defaults to the configured key sizes.
        :param repetitions: Exchanges per key size.
            Defaults to 5.
        :return: Median and standard deviation per key size, with the exchange traffic.
        """
        rows = []
        for bits in tqdm(cfg.RSA_KEY_SIZES if key_sizes is None else key_sizes, desc="RSA key sizes", ncols=80,
                         disable=not cfg.SHOW_PROGRESS):
            signer = rsa_blind.keygen(bits, f"bench/{self.seed}/{bits}".encode("utf-8"))
            public_key = signer.public_key()
            for repetition in range(repetitions):
                randfunc = rsa_blind.SeededByteSource(f"bench/{self.seed}/{bits}/{repetition}".encode("utf-8"))
                message = randfunc(32)
                blind_time, session = timed(rsa_blind.start_session, public_key, message, randfunc)
                sign_time, blinded_signature = timed(rsa_blind.sign_blinded, signer, session.blinded)
                unblind_time, signature = timed(rsa_blind.finish_session, public_key, session, blinded_signature)
                verify_time, valid = timed(rsa_blind.verify, public_key, message, signature)
                if not valid:
                    self._logger.warning(f"Blind signature with {bits} bit key did not verify")
                rows.append({"bits": bits, "exchange_bytes": rsa_blind.exchange_bytes(bits), "blind": blind_time,
                             "sign": sign_time, "unblind": unblind_time, "verify": verify_time})
        return summarize(pd.DataFrame.from_records(rows), ["bits", "exchange_bytes"])
