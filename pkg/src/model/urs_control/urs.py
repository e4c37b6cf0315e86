# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
import secrets
from random import Random
from typing import List, Tuple, Optional, Union, Dict, Sequence
from src.configuration import configuration as cfg
from src.model.group_control.group_primitives import (GroupElement, GroupScalar, ORDER, hash_to_group, hash_to_scalar,
                                                       multi_exp, random_scalar, label, encode_parts)
from src.model.urs_control.data_model import UrsParams, UrsKeyPair, Ring, UrsSignature, tag_base, vote_base
from src.model.urs_control.dlog_eq import dlogeq_prove, dlogeq_verify, verification_terms
from src.model.urs_control.exceptions import SignerNotInRingException, MixedRingBatchException, MalformedSignatureException


SignatureInput = Union[UrsSignature, bytes]


def setup(security_parameter: int = 128, seed: str = None) -> UrsParams:
    """
    Function for deriving public parameters.
    :param security_parameter: Security parameter in bits, recorded with the parameters.
        Defaults to 128.
    :param seed: Seed string.
        Defaults to the configured setup seed.
    :return: Parameters with generators g and h of unknown relative discrete logarithm.
    """
    seed = cfg.URS_SETUP_SEED if seed is None else seed
    encoded_seed = seed.encode("utf-8")
    return UrsParams(
        seed=seed,
        security_parameter=security_parameter,
        g=hash_to_group(label("urs_gen"), encoded_seed + b"/g"),
        h=hash_to_group(label("urs_gen"), encoded_seed + b"/h")
    )


def keygen(params: UrsParams, rng: Optional[Random] = None) -> UrsKeyPair:
    """
    Function for generating a key pair.
    :param params: Parameters.
    :param rng: Seeded random source.
        Defaults to None in which case the operating system CSPRNG is used.
    :return: Key pair with pk = h^sk.
    """
    sk = random_scalar(rng)
    while sk.value == 0:
        sk = random_scalar(rng)
    return UrsKeyPair(sk, params.h ** sk)


def tag_of(signature: UrsSignature) -> GroupElement:
    """
    Function for getting the uniqueness tag nu of a signature.
    :param signature: Signature.
    :return: Uniqueness tag.
    """
    return signature.nu


def _index_polynomials(bits: List[Tuple[int, int]], size: int) -> List[List[int]]:
    """
    Internal function for expanding p_i(X) = prod_j f_{j, i_j}(X) for all indices.
    :param bits: Per index bit j, the linear polynomial (c1, c0) of f_{j,1} = c1 X + c0.
    :param size: Number of indices 2^n.
    :return: Coefficient lists, lowest degree first, indexed little-endian.
    """
    polynomials = [[1]]
    for c1, c0 in bits:
        factors = (((1 - c1) % ORDER, (-c0) % ORDER), (c1 % ORDER, c0 % ORDER))
        expanded = []
        for factor_c1, factor_c0 in factors:
            for polynomial in polynomials:
                result = [0] * (len(polynomial) + 1)
                for degree, coefficient in enumerate(polynomial):
                    result[degree] = (result[degree] + coefficient * factor_c0) % ORDER
                    result[degree + 1] = (result[degree + 1] + coefficient * factor_c1) % ORDER
                expanded.append(result)
        polynomials = expanded
    return polynomials[:size]


def _fiat_shamir(poll_id: bytes, vote: bytes, ring: Ring, signature: UrsSignature) -> int:
    """
    Internal function for deriving the membership challenge X.
    :return: Challenge as integer.
    """
    elements = [signature.nu, signature.tau, signature.pi.m1, signature.pi.m2]
    for group in (signature.c_l, signature.c_a, signature.c_b, signature.c_d, signature.e):
        elements.extend(group)
    return hash_to_scalar(label("urs_fs"), encode_parts(
        poll_id, vote, ring.ring_hash(), b"".join(element.to_bytes() for element in elements))).value


def sign(params: UrsParams, poll_id: bytes, vote: bytes, ring: Ring, sk: GroupScalar,
         rng: Optional[Random] = None) -> UrsSignature:
    """
    Function for signing a vote on a poll as an anonymous ring member.
    :param params: Parameters.
    :param poll_id: Poll id.
    :param vote: Vote value.
    :param ring: Ring containing the signer.
    :param sk: Signing key.
    :param rng: Seeded random source.
        Defaults to None in which case the operating system CSPRNG is used.
    :return: Signature.
    """
    pk = params.h ** sk
    if pk not in ring:
        raise SignerNotInRingException(pk.to_bytes(), len(ring))
    index = ring.index_of(pk)
    members = ring.padded()
    n = ring.arity
    bits = [(index >> j) & 1 for j in range(n)]
    g, h = params.g, params.h

    r, a, s, t, rho = ([random_scalar(rng).value for _ in range(n)] for _ in range(5))
    c_l = [multi_exp([(g, bits[j]), (h, r[j])]) for j in range(n)]
    c_a = [multi_exp([(g, a[j]), (h, s[j])]) for j in range(n)]
    c_b = [multi_exp([(g, bits[j] * a[j]), (h, t[j])]) for j in range(n)]

    polynomials = _index_polynomials([(bits[j], a[j]) for j in range(n)], len(members))
    c_d = [multi_exp([(member, polynomial[k]) for member, polynomial in zip(members, polynomials)] + [(h, rho[k])])
           for k in range(n)]
    base = tag_base(poll_id, ring)
    e = [base ** rho[k] for k in range(n)]

    message_base = vote_base(poll_id, vote, ring)
    nu = base ** sk
    tau = message_base ** sk
    pi = dlogeq_prove(sk, message_base, base, rng)

    signature = UrsSignature(nu=nu, c_l=c_l, c_a=c_a, c_b=c_b, c_d=c_d, e=e, f=[], z_a=[], z_b=[],
                             z_d=GroupScalar(0), tau=tau, pi=pi)
    x = _fiat_shamir(poll_id, vote, ring, signature)
    f = [(bits[j] * x + a[j]) % ORDER for j in range(n)]
    signature.f = [GroupScalar(value) for value in f]
    signature.z_a = [GroupScalar(r[j] * x + s[j]) for j in range(n)]
    signature.z_b = [GroupScalar(r[j] * (x - f[j]) + t[j]) for j in range(n)]
    signature.z_d = GroupScalar(sk.value * pow(x, n, ORDER) - sum(rho[k] * pow(x, k, ORDER) for k in range(n)))
    return signature


def _member_exponents(ring: Ring, signature: UrsSignature, x: int) -> Dict[int, int]:
    """
    Internal function for evaluating p_i(X) from the responses, folded onto distinct ring members.
    :return: Mapping of member position to exponent.
    """
    n = signature.arity
    exponents = {}
    last = len(ring) - 1
    for i in range(1 << n):
        value = 1
        for j in range(n):
            f_j = signature.f[j].value
            value = value * (f_j if (i >> j) & 1 else x - f_j) % ORDER
        position = min(i, last)
        exponents[position] = (exponents.get(position, 0) + value) % ORDER
    return exponents


def _decode(signature: SignatureInput) -> UrsSignature:
    """
    Internal function for accepting signatures in object or wire form.
    """
    return signature if isinstance(signature, UrsSignature) else UrsSignature.from_bytes(signature)


def verify(params: UrsParams, poll_id: bytes, vote: bytes, ring: Ring, signature: SignatureInput) -> bool:
    """
    Function for verifying a signature equation by equation.
    Raises MalformedSignatureException for undecodable wire input.
    :param params: Parameters.
    :param poll_id: Poll id.
    :param vote: Vote value.
    :param ring: Ring.
    :param signature: Signature object or its encoding.
    :return: True, if the signature is valid.
    """
    signature = _decode(signature)
    n = signature.arity
    if n != ring.arity:
        return False
    g, h = params.g, params.h
    x = _fiat_shamir(poll_id, vote, ring, signature)
    for j in range(n):
        f_j, z_a, z_b = signature.f[j].value, signature.z_a[j].value, signature.z_b[j].value
        if not multi_exp([(signature.c_l[j], x), (signature.c_a[j], 1), (g, -f_j), (h, -z_a)]).is_identity():
            return False
        if not multi_exp([(signature.c_l[j], x - f_j), (signature.c_b[j], 1), (h, -z_b)]).is_identity():
            return False

    z_d = signature.z_d.value
    powers = [pow(x, k, ORDER) for k in range(n + 1)]
    exponents = _member_exponents(ring, signature, x)
    membership = [(ring.members[position], exponent) for position, exponent in exponents.items()]
    membership += [(signature.c_d[k], -powers[k]) for k in range(n)] + [(h, -z_d)]
    if not multi_exp(membership).is_identity():
        return False

    base = tag_base(poll_id, ring)
    linkage = [(signature.nu, powers[n])] + [(signature.e[k], -powers[k]) for k in range(n)] + [(base, -z_d)]
    if not multi_exp(linkage).is_identity():
        return False
    return dlogeq_verify(signature.tau, signature.nu, vote_base(poll_id, vote, ring), base, signature.pi)


class _Randomizers(object):
    """
    Deterministic stream of batch weights derived from a per-batch seed.
    """

    def __init__(self, seed: bytes) -> None:
        self.seed = seed
        self.counter = 0

    def next(self) -> int:
        self.counter += 1
        return hash_to_scalar(label("urs_batch"), self.seed + self.counter.to_bytes(8, "big")).value


def batch_verify(params: UrsParams, poll_id: bytes, votes: Sequence[Tuple], ring: Ring,
                 seed: Optional[bytes] = None) -> List[bool]:
    """
    Function for verifying many signatures on one poll and ring with a random linear combination.
    On failure of the combined equation, signatures are verified one by one to isolate offenders.
    :param params: Parameters.
    :param poll_id: Poll id shared by the batch.
    :param votes: Entries (vote, signature) or (vote, signature, ring hash).
    :param ring: Ring shared by the batch.
    :param seed: Batch seed for the weights.
        Defaults to None in which case 32 fresh random bytes are used.
    :return: Per-entry verdicts in input order.
    """
    for entry in votes:
        if len(entry) > 2 and entry[2] is not None and entry[2] != ring.ring_hash():
            raise MixedRingBatchException(ring.ring_hash(), entry[2])
    verdicts: List[Optional[bool]] = [None] * len(votes)
    decoded: Dict[int, UrsSignature] = {}
    for position, entry in enumerate(votes):
        try:
            signature = _decode(entry[1])
        except MalformedSignatureException:
            verdicts[position] = False
            continue
        if signature.arity != ring.arity:
            verdicts[position] = False
        else:
            decoded[position] = signature
    if not decoded:
        return [bool(verdict) for verdict in verdicts]
    if len(decoded) == 1:
        position = next(iter(decoded))
        verdicts[position] = verify(params, poll_id, votes[position][0], ring, decoded[position])
        return [bool(verdict) for verdict in verdicts]

    weights = _Randomizers(secrets.token_bytes(32) if seed is None else seed)
    g, h = params.g, params.h
    base = tag_base(poll_id, ring)
    g_exponent, h_exponent, base_exponent = 0, 0, 0
    member_exponents: Dict[int, int] = {}
    terms: List[Tuple[GroupElement, int]] = []
    n = ring.arity
    for position, signature in decoded.items():
        vote = votes[position][0]
        x = _fiat_shamir(poll_id, vote, ring, signature)
        powers = [pow(x, k, ORDER) for k in range(n + 1)]
        for j in range(n):
            w_a, w_b = weights.next(), weights.next()
            f_j = signature.f[j].value
            terms.append((signature.c_l[j], w_a * x + w_b * (x - f_j)))
            terms.append((signature.c_a[j], w_a))
            terms.append((signature.c_b[j], w_b))
            g_exponent -= w_a * f_j
            h_exponent -= w_a * signature.z_a[j].value + w_b * signature.z_b[j].value
        w_c, w_d = weights.next(), weights.next()
        for member, exponent in _member_exponents(ring, signature, x).items():
            member_exponents[member] = (member_exponents.get(member, 0) + w_c * exponent) % ORDER
        for k in range(n):
            terms.append((signature.c_d[k], -w_c * powers[k]))
            terms.append((signature.e[k], -w_d * powers[k]))
        h_exponent -= w_c * signature.z_d.value
        base_exponent -= w_d * signature.z_d.value
        terms.append((signature.nu, w_d * powers[n]))

        w_e, w_f = weights.next(), weights.next()
        first, second = verification_terms(signature.tau, signature.nu, vote_base(poll_id, vote, ring), base,
                                           signature.pi)
        terms.extend((element, w_e * exponent) for element, exponent in first)
        terms.extend((element, w_f * exponent) for element, exponent in second)

    terms.extend((ring.members[member], exponent) for member, exponent in member_exponents.items())
    terms.extend([(g, g_exponent), (h, h_exponent), (base, base_exponent)])
    if multi_exp(terms).is_identity():
        for position in decoded:
            verdicts[position] = True
    else:
        cfg.LOGGER.debug(f"Batch equation failed for {len(decoded)} signatures, isolating serially")
        for position, signature in decoded.items():
            verdicts[position] = verify(params, poll_id, votes[position][0], ring, signature)
    return [bool(verdict) for verdict in verdicts]
