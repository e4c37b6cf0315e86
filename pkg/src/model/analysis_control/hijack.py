# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from __future__ import annotations
import math
from typing import List, Optional, Tuple
import numpy as np
import pandas as pd
from pydantic import BaseModel, root_validator
from tqdm import tqdm
from src.configuration import configuration as cfg
from src.model.analysis_control.exceptions import DomainException
from src.model.sortition_control.sortition import fairness_delta, bwait_series, compute_bwait


__all__ = ["HijackParams", "g", "hijack_cost", "hijack_cost_apathy", "reviewer_bandwidth", "baseline_cost",
           "monte_carlo_hijack", "hijack_table", "fairness_table", "fairness_delta", "bwait_series", "compute_bwait",
           "COMPARISON_ROWS"]


# (n_req, rho, theta) of the reference comparison, evaluated with M = n = 10^6 and epsilon = 2^-30.
COMPARISON_ROWS: List[Tuple[int, float, float]] = [
    (50, 0.5, 0.01), (100, 0.5, 0.01), (200, 0.5, 0.01),
    (50, 0.3, 0.01), (100, 0.3, 0.01), (200, 0.3, 0.01)
]


class HijackParams(BaseModel):
    """
    Parameters of a hijacking scenario.
    """
    rho: float = 0.5
    theta: float = 0.01
    epsilon: float = 2.0 ** -30
    polls: int = 10 ** 6
    users: int = 10 ** 6
    n_req: int = 50
    apathy: float = 0.0

    @root_validator(skip_on_failure=True)
    def _domain(cls, values: dict) -> dict:
        for name in ("rho", "theta", "epsilon"):
            if not 0 < values[name] < 1:
                raise ValueError(f"{name} must lie in (0, 1)")
        if not 0 <= values["apathy"] < 1:
            raise ValueError("apathy must lie in [0, 1)")
        if values["polls"] <= 0 or values["n_req"] <= 0 or values["n_req"] > values["users"]:
            raise ValueError("polls and n_req must be positive and n_req may not exceed the users")
        return values


def g(alpha: float, beta: float) -> float:
    """
    Function for solving exp(-x^2 alpha / ((1 + x)(2 + x))) = beta for x > 0.
    :param alpha: Expected count.
    :param beta: Tolerated probability.
    :return: Relative deviation x.
    """
    if alpha <= 0:
        raise DomainException("alpha", alpha)
    if not 0 < beta < 1:
        raise DomainException("beta", beta)
    log_beta = math.log(beta)
    denominator = 2 * alpha + 2 * log_beta
    if denominator <= 0:
        raise DomainException("alpha", alpha, "expected count too small for the tolerated probability")
    return (-3 * log_beta + math.sqrt(log_beta ** 2 - 8 * alpha * log_beta)) / denominator


def hijack_cost(params: HijackParams) -> float:
    """
    Function for computing the minimal fraction of users an adversary must control to hijack
    a theta fraction of all polls except with probability epsilon.
    :param params: Hijacking scenario.
    :return: Hijacking cost gamma.
    """
    per_poll = params.theta / (1 + g(params.theta * params.polls, params.epsilon))
    gamma = params.rho / (1 + g(params.rho * params.n_req, per_poll))
    if params.apathy:
        return hijack_cost_apathy(gamma, params.apathy)
    return gamma


def hijack_cost_apathy(gamma: float, apathy: float) -> float:
    """
    Function for lowering a hijacking cost for an apathetic share of honest selected voters.
    :param gamma: Hijacking cost without apathy.
    :param apathy: Share a of selected honest voters that abstain.
    :return: gamma (a - 1) / (gamma a - 1).
    """
    if not 0 < gamma < 1:
        raise DomainException("gamma", gamma)
    if not 0 <= apathy < 1:
        raise DomainException("apathy", apathy)
    return gamma * (apathy - 1) / (gamma * apathy - 1)


def reviewer_bandwidth(params: HijackParams, gamma: Optional[float] = None) -> float:
    """
    Function for computing the average number of reviews c an honest user writes per period.
    :param params: Hijacking scenario.
    :param gamma: Hijacking cost.
        Defaults to None in which case it is computed.
    :return: M n_req (1 - gamma) / n.
    """
    gamma = hijack_cost(params) if gamma is None else gamma
    return params.polls * params.n_req * (1 - gamma) / params.users


def baseline_cost(params: HijackParams, bandwidth: Optional[float] = None) -> int:
    """
    Function for computing the hijackers needed against an open review system with equal reviewer bandwidth.
    Every poll holds about kappa = n c / M honest reviews, so rho / (1 - rho) kappa users hijack all of them.
    :param params: Hijacking scenario.
    :param bandwidth: Reviewer bandwidth c.
        Defaults to None in which case the bandwidth of the same scenario is used.
    :return: Number of hijackers, rounded up.
    """
    bandwidth = reviewer_bandwidth(params) if bandwidth is None else bandwidth
    kappa = params.users * bandwidth / params.polls
    return math.ceil(params.rho / (1 - params.rho) * kappa)


def monte_carlo_hijack(params: HijackParams, adversary_fraction: float, trials: int = cfg.BATCH_TRIALS,
                       seed: int = 0) -> np.ndarray:
    """
    Function for measuring the hijacked share of polls when an adversary controls a fraction of the users.
    Every poll draws a ring of n_req users without replacement; apathetic honest members abstain.
    :param params: Hijacking scenario at desk scale.
    :param adversary_fraction: Fraction of users under adversarial control.
    :param trials: Number of simulated periods.
        Defaults to the configured batch trial count.
    :param seed: Seed of the random generator.
        Defaults to 0.
    :return: Hijacked share of the polls per trial.
    """
    if not 0 <= adversary_fraction <= 1:
        raise DomainException("adversary_fraction", adversary_fraction)
    adversaries = int(round(adversary_fraction * params.users))
    generator = np.random.default_rng(seed)
    shares = np.zeros(trials)
    for trial in tqdm(range(trials), desc="Hijack trials", ncols=80, disable=not cfg.SHOW_PROGRESS):
        captured = generator.hypergeometric(adversaries, params.users - adversaries, params.n_req, size=params.polls)
        honest = params.n_req - captured
        if params.apathy:
            honest = generator.binomial(honest, 1 - params.apathy)
        votes = np.maximum(captured + honest, 1)
        shares[trial] = np.mean(captured > params.rho * votes)
    return shares


def hijack_table(rows: List[Tuple[int, float, float]] = None, polls: int = 10 ** 6, users: int = 10 ** 6,
                 epsilon: float = 2.0 ** -30, apathy: float = 0.0) -> pd.DataFrame:
    """
    Function for comparing the hijacking cost with the open baseline at equal reviewer bandwidth.
    :param rows: (n_req, rho, theta) rows.
        Defaults to None in which case the reference rows are used.
    :param polls: Polls per period M.
    :param users: Users n.
    :param epsilon: Tolerated probability.
    :param apathy: Share of selected honest voters that abstain.
        Defaults to 0.0.
    :return: Data frame with n_req, rho, theta, gamma, c, trustrate and baseline columns.
    """
    records = []
    for n_req, rho, theta in COMPARISON_ROWS if rows is None else rows:
        params = HijackParams(rho=rho, theta=theta, epsilon=epsilon, polls=polls, users=users, n_req=n_req,
                              apathy=apathy)
        gamma = hijack_cost(params)
        bandwidth = reviewer_bandwidth(params, gamma)
        records.append({"n_req": n_req, "rho": rho, "theta": theta, "gamma": gamma, "c": round(bandwidth, 1),
                        "trustrate": int(gamma * users), "baseline": baseline_cost(params, bandwidth)})
    return pd.DataFrame.from_records(records)


def fairness_table(ring_sizes: List[int], fractions: List[float], epsilon: float = 2.0 ** -30) -> pd.DataFrame:
    """
    Function for tabulating the representation error bound of groups in rings.
    :param ring_sizes: Ring sizes N.
    :param fractions: Group fractions x.
    :param epsilon: Failure probability.
    :return: Data frame with ring_size, x, delta and the bounds x (1 -/+ delta).
    """
    records = []
    for ring_size in ring_sizes:
        for x in fractions:
            delta = fairness_delta(x, ring_size, epsilon)
            records.append({"ring_size": ring_size, "x": x, "delta": delta, "lower": max(0.0, x * (1 - delta)),
                            "upper": min(1.0, x * (1 + delta))})
    return pd.DataFrame.from_records(records)
