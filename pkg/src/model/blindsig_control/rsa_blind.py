# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from __future__ import annotations
import hashlib
from dataclasses import dataclass
from typing import Callable, Optional, Tuple
from Crypto.Hash import SHA256
from Crypto.PublicKey import RSA
from Crypto.Random import get_random_bytes
from Crypto.Signature.pss import MGF1
from Crypto.Util.number import GCD, inverse, getRandomRange, long_to_bytes, bytes_to_long
from src.configuration import configuration as cfg
from src.model.blindsig_control.exceptions import UnsupportedKeySizeException


RandomFunction = Callable[[int], bytes]


class SeededByteSource(object):
    """
    Deterministic byte source in counter mode over SHA-256, usable as pycryptodome randfunc.
    """

    def __init__(self, seed: bytes) -> None:
        """
        Initiation method.
        :param seed: Seed bytes.
        """
        self.seed = seed
        self.counter = 0
        self._buffer = b""

    def __call__(self, length: int) -> bytes:
        """
        Method for drawing bytes.
        :param length: Number of bytes.
        :return: Bytes.
        """
        while len(self._buffer) < length:
            self._buffer += hashlib.sha256(self.seed + self.counter.to_bytes(8, "big")).digest()
            self.counter += 1
        result, self._buffer = self._buffer[:length], self._buffer[length:]
        return result


@dataclass(frozen=True)
class RsaPublicKey:
    """
    Public verification key (N, e).
    """
    n: int
    e: int

    @property
    def bits(self) -> int:
        return self.n.bit_length()

    @property
    def byte_length(self) -> int:
        return (self.n.bit_length() + 7) // 8


@dataclass(frozen=True)
class RsaSignerKey:
    """
    Signing key wrapping a pycryptodome RSA key.
    """
    key: RSA.RsaKey

    @property
    def n(self) -> int:
        return int(self.key.n)

    @property
    def e(self) -> int:
        return int(self.key.e)

    @property
    def d(self) -> int:
        return int(self.key.d)

    @property
    def bits(self) -> int:
        return self.key.size_in_bits()

    def public_key(self) -> RsaPublicKey:
        """
        Method for getting the verification key.
        :return: Public key.
        """
        return RsaPublicKey(self.n, self.e)


@dataclass
class BlindingSession:
    """
    User-side state of one blind signing exchange. The blinding factor r never leaves the user.
    """
    message: bytes
    r: int
    blinded: int
    signature: Optional[int] = None


def keygen(bits: int = 2048, seed: Optional[bytes] = None) -> RsaSignerKey:
    """
    Function for generating an RSA signing key.
    :param bits: Modulus size in bits.
        Defaults to 2048.
    :param seed: Seed for deterministic generation.
        Defaults to None in which case the operating system CSPRNG is used.
    :return: Signing key.
    """
    if bits not in cfg.RSA_KEY_SIZES:
        raise UnsupportedKeySizeException(bits, cfg.RSA_KEY_SIZES)
    randfunc = get_random_bytes if seed is None else SeededByteSource(seed)
    return RsaSignerKey(RSA.generate(bits, randfunc=randfunc))


def full_domain_hash(public_key: RsaPublicKey, message: bytes) -> int:
    """
    Function for hashing a message into Z_N with MGF1 over SHA-256.
    :param public_key: Public key.
    :param message: Message.
    :return: Integer below N.
    """
    mask = MGF1(message, public_key.byte_length, SHA256)
    return bytes_to_long(mask) % (1 << (public_key.bits - 1))


def blind(public_key: RsaPublicKey, message: bytes, randfunc: Optional[RandomFunction] = None) -> Tuple[int, int]:
    """
    Function for blinding a message.
    :param public_key: Signer public key.
    :param message: Message, typically a URS public key encoding.
    :param randfunc: Byte source for the blinding factor.
        Defaults to None in which case the operating system CSPRNG is used.
    :return: Blinded message M' and blinding factor r.
    """
    randfunc = get_random_bytes if randfunc is None else randfunc
    r = getRandomRange(2, public_key.n - 1, randfunc)
    while GCD(r, public_key.n) != 1:
        r = getRandomRange(2, public_key.n - 1, randfunc)
    blinded = full_domain_hash(public_key, message) * pow(r, public_key.e, public_key.n) % public_key.n
    return blinded, r


def sign_blinded(signer_key: RsaSignerKey, blinded: int) -> int:
    """
    Function for signing a blinded message.
    :param signer_key: Signing key.
    :param blinded: Blinded message M'.
    :return: Blinded signature S'.
    """
    return pow(blinded, signer_key.d, signer_key.n)


def unblind(public_key: RsaPublicKey, blinded_signature: int, r: int) -> int:
    """
    Function for removing the blinding factor from a signature.
    :param public_key: Signer public key.
    :param blinded_signature: Blinded signature S'.
    :param r: Blinding factor.
    :return: Signature S.
    """
    return blinded_signature * inverse(r, public_key.n) % public_key.n


def verify(public_key: RsaPublicKey, message: bytes, signature: int) -> bool:
    """
    Function for verifying an unblinded signature.
    :param public_key: Signer public key.
    :param message: Message.
    :param signature: Signature S.
    :return: True, if S^e equals the full domain hash of the message.
    """
    if not 0 < signature < public_key.n:
        return False
    return pow(signature, public_key.e, public_key.n) == full_domain_hash(public_key, message)


def start_session(public_key: RsaPublicKey, message: bytes,
                  randfunc: Optional[RandomFunction] = None) -> BlindingSession:
    """
    Function for opening a user-side blinding session.
    :param public_key: Signer public key.
    :param message: Message.
    :param randfunc: Byte source for the blinding factor.
        Defaults to None.
    :return: Session holding the blinded message.
    """
    blinded, r = blind(public_key, message, randfunc)
    return BlindingSession(message, r, blinded)


def finish_session(public_key: RsaPublicKey, session: BlindingSession, blinded_signature: int) -> int:
    """
    Function for completing a session with the signer's reply.
    :param public_key: Signer public key.
    :param session: Session.
    :param blinded_signature: Blinded signature S'.
    :return: Signature S.
    """
    session.signature = unblind(public_key, blinded_signature, session.r)
    return session.signature


def encode_integer(value: int, public_key: RsaPublicKey) -> bytes:
    """
    Function for encoding a value below N at modulus length.
    """
    return long_to_bytes(value, public_key.byte_length)


def exchange_bytes(bits: int) -> int:
    """
    Function for getting the per-user traffic of one exchange: public key, blinded message and reply.
    :param bits: Modulus size.
    :return: Bytes.
    """
    return 3 * bits // 8


def admin_egress_bytes(users: int, bits: int) -> int:
    """
    Function for getting the admin egress of a ceremony: public key and signed reply per user.
    :param users: Number of users.
    :param bits: Modulus size.
    :return: Bytes.
    """
    return users * 2 * bits // 8
