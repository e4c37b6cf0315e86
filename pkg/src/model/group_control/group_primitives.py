# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from __future__ import annotations
import hashlib
import secrets
from random import Random
from typing import List, Tuple, Union, Optional, Iterable
from src.configuration import configuration as cfg
from src.model.group_control import ristretto
from src.model.group_control.exceptions import NonCanonicalEncodingException


ORDER = ristretto.Q
ENCODING_LENGTH = 32


class GroupScalar(object):
    """
    Class, representing an integer modulo the group order.
    """
    __slots__ = ("value",)

    def __init__(self, value: int) -> None:
        """
        Initiation method.
        :param value: Integer value, reduced modulo the group order.
        """
        self.value = value % ORDER

    @classmethod
    def from_bytes(cls, data: bytes) -> GroupScalar:
        """
        Class method for decoding a canonical 32-byte little-endian scalar.
        :param data: Encoding.
        :return: Scalar.
        """
        value = int.from_bytes(data, "little")
        if len(data) != ENCODING_LENGTH or value >= ORDER:
            raise NonCanonicalEncodingException(bytes(data), "scalar")
        return cls(value)

    def to_bytes(self) -> bytes:
        """
        Method for encoding scalar.
        :return: 32-byte little-endian encoding.
        """
        return self.value.to_bytes(ENCODING_LENGTH, "little")

    def inverse(self) -> GroupScalar:
        """
        Method for computing the multiplicative inverse.
        :return: Inverse scalar.
        """
        return GroupScalar(pow(self.value, -1, ORDER))

    def __add__(self, other: Union[GroupScalar, int]) -> GroupScalar:
        return GroupScalar(self.value + _scalar_value(other))

    def __radd__(self, other: Union[GroupScalar, int]) -> GroupScalar:
        return GroupScalar(_scalar_value(other) + self.value)

    def __sub__(self, other: Union[GroupScalar, int]) -> GroupScalar:
        return GroupScalar(self.value - _scalar_value(other))

    def __rsub__(self, other: Union[GroupScalar, int]) -> GroupScalar:
        return GroupScalar(_scalar_value(other) - self.value)

    def __mul__(self, other: Union[GroupScalar, int]) -> GroupScalar:
        return GroupScalar(self.value * _scalar_value(other))

    def __rmul__(self, other: Union[GroupScalar, int]) -> GroupScalar:
        return GroupScalar(_scalar_value(other) * self.value)

    def __neg__(self) -> GroupScalar:
        return GroupScalar(-self.value)

    def __pow__(self, exponent: int) -> GroupScalar:
        return GroupScalar(pow(self.value, exponent, ORDER))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, GroupScalar):
            return self.value == other.value
        if isinstance(other, int):
            return self.value == other % ORDER
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("scalar", self.value))

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"GroupScalar({self.to_bytes().hex()})"


def _scalar_value(other: Union[GroupScalar, int]) -> int:
    """
    Internal function for unwrapping scalar operands.
    :param other: Scalar or integer.
    :return: Integer value.
    """
    return other.value if isinstance(other, GroupScalar) else other


class GroupElement(object):
    """
    Class, representing an element of the Ristretto255 prime-order group in multiplicative notation.
    """
    __slots__ = ("point", "_encoding")

    def __init__(self, point: ristretto.Point, encoding: Optional[bytes] = None) -> None:
        """
        Initiation method.
        :param point: Extended Edwards coordinates.
        :param encoding: Known canonical encoding.
            Defaults to None in which case it is computed on demand.
        """
        self.point = point
        self._encoding = encoding

    @classmethod
    def identity(cls) -> GroupElement:
        """
        Class method for getting the neutral element.
        :return: Identity.
        """
        return cls(ristretto.IDENTITY)

    @classmethod
    def generator(cls) -> GroupElement:
        """
        Class method for getting the standard generator.
        :return: Generator.
        """
        return cls(ristretto.BASE)

    @classmethod
    def from_bytes(cls, data: bytes) -> GroupElement:
        """
        Class method for decoding a canonical 32-byte encoding.
        :param data: Encoding.
        :return: Group element.
        """
        point = ristretto.decode(bytes(data))
        if point is None:
            raise NonCanonicalEncodingException(bytes(data), "group element")
        return cls(point, bytes(data))

    def to_bytes(self) -> bytes:
        """
        Method for encoding group element.
        :return: 32-byte canonical encoding.
        """
        if self._encoding is None:
            self._encoding = ristretto.encode(self.point)
        return self._encoding

    def inverse(self) -> GroupElement:
        """
        Method for computing the inverse element.
        :return: Inverse.
        """
        return GroupElement(ristretto.negate(self.point))

    def is_identity(self) -> bool:
        """
        Method for checking for the neutral element.
        :return: True, if element is the identity.
        """
        return ristretto.equals(self.point, ristretto.IDENTITY)

    def __mul__(self, other: GroupElement) -> GroupElement:
        return GroupElement(ristretto.add(self.point, other.point))

    def __truediv__(self, other: GroupElement) -> GroupElement:
        return GroupElement(ristretto.add(self.point, ristretto.negate(other.point)))

    def __pow__(self, exponent: Union[GroupScalar, int]) -> GroupElement:
        return scalar_exp(self, exponent)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return ristretto.equals(self.point, other.point)

    def __hash__(self) -> int:
        return hash(self.to_bytes())

    def __lt__(self, other: GroupElement) -> bool:
        return self.to_bytes() < other.to_bytes()

    def __repr__(self) -> str:
        return f"GroupElement({self.to_bytes().hex()})"


"""
Hashing
"""


def _labelled(label: bytes, data: bytes) -> bytes:
    """
    Internal function for prefixing data with a length-prefixed domain label.
    :param label: Domain label.
    :param data: Data.
    :return: Labelled data.
    """
    return len(label).to_bytes(1, "big") + label + data


def domain_hash(label: bytes, data: bytes, length: int = 32) -> bytes:
    """
    Function for hashing data under a domain label with SHA-256.
    :param label: Domain label.
    :param data: Data to hash.
    :param length: Digest length in bytes, at most 32.
        Defaults to 32.
    :return: Digest.
    """
    return hashlib.sha256(_labelled(label, data)).digest()[:length]


def hash_to_scalar(label: bytes, data: bytes) -> GroupScalar:
    """
    Function for hashing data to a scalar by reducing SHA-512 modulo the group order.
    :param label: Domain label.
    :param data: Data to hash.
    :return: Scalar.
    """
    return GroupScalar(int.from_bytes(hashlib.sha512(_labelled(label, data)).digest(), "little"))


def hash_to_group(label: bytes, data: bytes) -> GroupElement:
    """
    Function for hashing data to a group element with unknown discrete logarithm.
    :param label: Domain label.
    :param data: Data to hash.
    :return: Group element.
    """
    return GroupElement(ristretto.from_uniform_bytes(hashlib.sha512(_labelled(label, data)).digest()))


def encode_parts(*parts: bytes) -> bytes:
    """
    Function for unambiguously concatenating byte strings with 4-byte length prefixes.
    :param parts: Byte strings.
    :return: Encoding.
    """
    return b"".join(len(part).to_bytes(4, "big") + part for part in parts)


"""
Exponentiation
"""


def scalar_exp(base: GroupElement, exponent: Union[GroupScalar, int]) -> GroupElement:
    """
    Function for exponentiating a group element.
    :param base: Base element.
    :param exponent: Exponent.
    :return: base^exponent.
    """
    return GroupElement(ristretto.multiply(base.point, _scalar_value(exponent)))


def multi_exp(pairs: Iterable[Tuple[GroupElement, Union[GroupScalar, int]]]) -> GroupElement:
    """
    Function for computing the product of several exponentiations at once.
    :param pairs: Pairs of base and exponent.
    :return: Product of base_i^exponent_i.
    """
    points = []
    scalars = []
    for base, exponent in pairs:
        points.append(base.point)
        scalars.append(_scalar_value(exponent))
    return GroupElement(ristretto.multi_multiply(points, scalars))


def product(elements: Iterable[GroupElement]) -> GroupElement:
    """
    Function for multiplying group elements.
    :param elements: Group elements.
    :return: Product.
    """
    point = ristretto.IDENTITY
    for element in elements:
        point = ristretto.add(point, element.point)
    return GroupElement(point)


def random_scalar(rng: Optional[Random] = None) -> GroupScalar:
    """
    Function for drawing a uniform scalar.
    :param rng: Seeded random source for reproducible runs.
        Defaults to None in which case the operating system CSPRNG is used.
    :return: Scalar.
    """
    if rng is None:
        return GroupScalar(secrets.randbelow(ORDER))
    return GroupScalar(rng.randrange(ORDER))


def label(name: str) -> bytes:
    """
    Function for looking up a registered domain label.
    :param name: Registry name, e.g. "urs_tag".
    :return: Label bytes.
    """
    return cfg.DOMAIN_LABELS[name]


def serialize_elements(elements: List[GroupElement]) -> bytes:
    """
    Function for concatenating element encodings.
    :param elements: Group elements.
    :return: Concatenated encodings.
    """
    return b"".join(element.to_bytes() for element in elements)
