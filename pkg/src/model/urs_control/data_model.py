# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import List, Iterable
from src.model.group_control.group_primitives import GroupElement, GroupScalar, hash_to_group, domain_hash, label, ENCODING_LENGTH
from src.model.group_control.exceptions import NonCanonicalEncodingException
from src.model.urs_control.exceptions import InvalidRingException, MalformedSignatureException


def arity(ring_size: int) -> int:
    """
    Function for getting the number of index bits of a ring.
    :param ring_size: Ring size N.
    :return: ceil(log2(N)), at least 1.
    """
    return max(1, (ring_size - 1).bit_length())


def signature_size(ring_size: int) -> int:
    """
    Function for getting the serialized signature size for a ring size.
    :param ring_size: Ring size N.
    :return: Size in bytes.
    """
    return ENCODING_LENGTH * (8 * arity(ring_size) + 6)


@dataclass(frozen=True)
class UrsParams:
    """
    Public parameters: commitment generators g and h, derived from a seed string.
    """
    seed: str
    security_parameter: int
    g: GroupElement
    h: GroupElement

    def to_bytes(self) -> bytes:
        """
        Method for serializing parameters.
        :return: Encoding.
        """
        seed = self.seed.encode("utf-8")
        return (len(seed).to_bytes(2, "big") + seed + self.security_parameter.to_bytes(2, "big")
                + self.g.to_bytes() + self.h.to_bytes())

    @classmethod
    def from_bytes(cls, data: bytes) -> UrsParams:
        """
        Class method for deserializing parameters.
        :param data: Encoding.
        :return: Parameters.
        """
        seed_length = int.from_bytes(data[:2], "big")
        offset = 2 + seed_length
        seed = data[2:offset].decode("utf-8")
        security_parameter = int.from_bytes(data[offset:offset + 2], "big")
        offset += 2
        return cls(seed, security_parameter,
                   GroupElement.from_bytes(data[offset:offset + 32]),
                   GroupElement.from_bytes(data[offset + 32:offset + 64]))


@dataclass(frozen=True)
class UrsKeyPair:
    """
    Signing key sk and public key pk = h^sk.
    """
    sk: GroupScalar
    pk: GroupElement


class Ring(object):
    """
    Class, representing a canonical ring of public keys.
    """

    def __init__(self, members: Iterable[GroupElement]) -> None:
        """
        Initiation method.
        :param members: Public keys in any order.
        """
        members = list(members)
        self.members: List[GroupElement] = sorted(members, key=lambda member: member.to_bytes())
        if len(self.members) < 2:
            raise InvalidRingException(len(self.members), "ring needs at least two members")
        encodings = [member.to_bytes() for member in self.members]
        if len(set(encodings)) != len(encodings):
            raise InvalidRingException(len(self.members), "duplicate members")
        self._encoding = b"".join(encodings)
        self._ring_hash = domain_hash(label("merkle_leaf"), self._encoding)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, public_key: GroupElement) -> bool:
        return public_key in self.members

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Ring):
            return NotImplemented
        return self._encoding == other._encoding

    def __hash__(self) -> int:
        return hash(self._encoding)

    @property
    def arity(self) -> int:
        """
        Number of index bits n.
        """
        return arity(len(self.members))

    def encoding(self) -> bytes:
        """
        Method for getting the canonical ring encoding.
        :return: Sorted 32-byte keys, concatenated.
        """
        return self._encoding

    def ring_hash(self) -> bytes:
        """
        Method for getting the ring hash H(R).
        :return: 32-byte digest.
        """
        return self._ring_hash

    def padded(self) -> List[GroupElement]:
        """
        Method for getting the members padded to 2^n by repeating the last member.
        :return: Padded member list.
        """
        return self.members + [self.members[-1]] * ((1 << self.arity) - len(self.members))

    def index_of(self, public_key: GroupElement) -> int:
        """
        Method for getting the position of a member.
        :param public_key: Member key.
        :return: Index in the canonical order.
        """
        return self.members.index(public_key)

    @classmethod
    def from_encoding(cls, data: bytes) -> Ring:
        """
        Class method for decoding a canonical ring encoding.
        :param data: Concatenated 32-byte keys.
        :return: Ring.
        """
        if len(data) % ENCODING_LENGTH:
            raise InvalidRingException(len(data) // ENCODING_LENGTH, "truncated encoding")
        return cls(GroupElement.from_bytes(data[offset:offset + ENCODING_LENGTH])
                   for offset in range(0, len(data), ENCODING_LENGTH))


def tag_base(poll_id: bytes, ring: Ring) -> GroupElement:
    """
    Function for deriving H(PID || R).
    :param poll_id: Poll id.
    :param ring: Ring.
    :return: Tag base.
    """
    return hash_to_group(label("urs_tag"), len(poll_id).to_bytes(2, "big") + poll_id + ring.ring_hash())


def vote_base(poll_id: bytes, vote: bytes, ring: Ring) -> GroupElement:
    """
    Function for deriving H(M || R) with M = (PID, V).
    :param poll_id: Poll id.
    :param vote: Vote value.
    :param ring: Ring.
    :return: Vote tag base.
    """
    return hash_to_group(label("urs_tag"), len(poll_id).to_bytes(2, "big") + poll_id
                         + len(vote).to_bytes(4, "big") + vote + ring.ring_hash())


@dataclass
class DlogEqProof:
    """
    Proof that two elements share one discrete logarithm with respect to two bases.
    """
    m1: GroupElement
    m2: GroupElement
    z: GroupScalar

    def to_bytes(self) -> bytes:
        return self.m1.to_bytes() + self.m2.to_bytes() + self.z.to_bytes()


@dataclass
class UrsSignature:
    """
    Ring signature (nu, sigma, tau, pi) with the membership transcript spread over the list fields.
    Wire order: nu | c_l | c_a | c_b | c_d | e | f | z_a | z_b | z_d | tau | m1 | m2 | z.
    """
    nu: GroupElement
    c_l: List[GroupElement]
    c_a: List[GroupElement]
    c_b: List[GroupElement]
    c_d: List[GroupElement]
    e: List[GroupElement]
    f: List[GroupScalar]
    z_a: List[GroupScalar]
    z_b: List[GroupScalar]
    z_d: GroupScalar
    tau: GroupElement
    pi: DlogEqProof = field(repr=False)

    @property
    def arity(self) -> int:
        return len(self.c_l)

    def to_bytes(self) -> bytes:
        """
        Method for serializing the signature.
        :return: 32 * (8n + 6) bytes.
        """
        parts = [self.nu.to_bytes()]
        for elements in (self.c_l, self.c_a, self.c_b, self.c_d, self.e):
            parts.extend(element.to_bytes() for element in elements)
        for scalars in (self.f, self.z_a, self.z_b):
            parts.extend(scalar.to_bytes() for scalar in scalars)
        parts.append(self.z_d.to_bytes())
        parts.append(self.tau.to_bytes())
        parts.append(self.pi.to_bytes())
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, data: bytes) -> UrsSignature:
        """
        Class method for deserializing a signature.
        :param data: Encoding.
        :return: Signature.
        """
        words, remainder = divmod(len(data), ENCODING_LENGTH)
        if remainder or words < 14 or (words - 6) % 8:
            raise MalformedSignatureException(len(data), "length is not 32 * (8n + 6)")
        n = (words - 6) // 8
        chunks = [data[offset:offset + ENCODING_LENGTH] for offset in range(0, len(data), ENCODING_LENGTH)]
        try:
            elements = [GroupElement.from_bytes(chunk) for chunk in chunks[:1 + 5 * n]]
            scalars = [GroupScalar.from_bytes(chunk) for chunk in chunks[1 + 5 * n:1 + 8 * n + 1]]
            tau, m1, m2 = (GroupElement.from_bytes(chunk) for chunk in chunks[8 * n + 2:8 * n + 5])
            z = GroupScalar.from_bytes(chunks[8 * n + 5])
        except NonCanonicalEncodingException as ex:
            raise MalformedSignatureException(len(data), str(ex))
        groups = [elements[1 + index * n:1 + (index + 1) * n] for index in range(5)]
        return cls(nu=elements[0], c_l=groups[0], c_a=groups[1], c_b=groups[2], c_d=groups[3], e=groups[4],
                   f=scalars[:n], z_a=scalars[n:2 * n], z_b=scalars[2 * n:3 * n], z_d=scalars[3 * n],
                   tau=tau, pi=DlogEqProof(m1, m2, z))


def ring_from_keys(keys: Iterable[GroupElement]) -> Ring:
    """
    Function for building the canonical ring of a set of public keys.
    :param keys: Public keys in any order.
    :return: Ring.
    """
    return Ring(keys)
