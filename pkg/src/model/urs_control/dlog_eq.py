# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from random import Random
from typing import List, Tuple, Optional
from src.model.group_control.group_primitives import GroupElement, GroupScalar, hash_to_scalar, multi_exp, random_scalar, label, serialize_elements
from src.model.urs_control.data_model import DlogEqProof


def challenge(g2: GroupElement, g3: GroupElement, tau: GroupElement, nu: GroupElement,
              m1: GroupElement, m2: GroupElement) -> GroupScalar:
    """
    Function for deriving the non-interactive challenge h.
    :return: Challenge scalar.
    """
    return hash_to_scalar(label("dlogeq_fs"), serialize_elements([g2, g3, tau, nu, m1, m2]))


def dlogeq_prove(x: GroupScalar, g2: GroupElement, g3: GroupElement, rng: Optional[Random] = None) -> DlogEqProof:
    """
    Function for proving log_g2(tau) == log_g3(nu) == x.
    :param x: Shared discrete logarithm.
    :param g2: First base.
    :param g3: Second base.
    :param rng: Seeded random source.
        Defaults to None in which case the operating system CSPRNG is used.
    :return: Proof.
    """
    r = random_scalar(rng)
    m1 = g2 ** r
    m2 = g3 ** r
    h = challenge(g2, g3, g2 ** x, g3 ** x, m1, m2)
    return DlogEqProof(m1, m2, h * x + r)


def verification_terms(tau: GroupElement, nu: GroupElement, g2: GroupElement, g3: GroupElement,
                       proof: DlogEqProof) -> Tuple[List[Tuple[GroupElement, int]], List[Tuple[GroupElement, int]]]:
    """
    Function for expressing both verification equations as products that must equal the identity.
    :return: Terms of g2^z * m1^-1 * tau^-h and of g3^z * m2^-1 * nu^-h.
    """
    h = challenge(g2, g3, tau, nu, proof.m1, proof.m2).value
    z = proof.z.value
    return ([(g2, z), (proof.m1, -1), (tau, -h)],
            [(g3, z), (proof.m2, -1), (nu, -h)])


def dlogeq_verify(tau: GroupElement, nu: GroupElement, g2: GroupElement, g3: GroupElement,
                  proof: DlogEqProof) -> bool:
    """
    Function for verifying a discrete logarithm equality proof.
    :param tau: Element g2^x.
    :param nu: Element g3^x.
    :param g2: First base.
    :param g3: Second base.
    :param proof: Proof.
    :return: True, if g2^z = m1 * tau^h and g3^z = m2 * nu^h.
    """
    first, second = verification_terms(tau, nu, g2, g3, proof)
    return multi_exp(first).is_identity() and multi_exp(second).is_identity()
