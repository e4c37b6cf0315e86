# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from __future__ import annotations
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Set, Tuple
from Crypto.Util.number import bytes_to_long
from src.configuration import configuration as cfg
from src.model.blindsig_control import rsa_blind
from src.model.blindsig_control.rsa_blind import RsaPublicKey, RsaSignerKey, RandomFunction
from src.model.blindsig_control.exceptions import (DuplicateBlindedMessageException, CeremonyClosedException,
                                                    UnauthenticatedMemberException)


@dataclass(frozen=True)
class Certificate:
    """
    Membership certificate: role-id (4 bytes) | URS pk (32 bytes) | S (modulus length).
    """
    role_id: int
    public_key: bytes
    signature: bytes

    def to_bytes(self) -> bytes:
        return self.role_id.to_bytes(4, "big") + self.public_key + self.signature

    @classmethod
    def from_bytes(cls, data: bytes) -> Certificate:
        """
        Class method for decoding a certificate.
        :param data: Encoding.
        :return: Certificate.
        """
        if len(data) <= 36:
            raise ValueError(f"certificate of {len(data)} bytes is too short")
        return cls(int.from_bytes(data[:4], "big"), data[4:36], data[36:])


class AdminSigner(object):
    """
    Class, representing the administrator's blind signing service with one key per role.
    """

    def __init__(self, role_ids: List[int], bits: int = 2048, seed: Optional[bytes] = None,
                 authenticate: Optional[Callable[[str, int], bool]] = None) -> None:
        """
        Initiation method.
        :param role_ids: Role (topic) ids, each getting its own key.
        :param bits: Modulus size.
            Defaults to 2048.
        :param seed: Seed for deterministic key generation.
            Defaults to None.
        :param authenticate: Predicate deciding whether a member may request a signature for a role.
            Defaults to None in which case every member is accepted.
        """
        self._logger = cfg.LOGGER
        self.role_ids = list(role_ids)
        self.bits = bits
        self.seed = seed
        self.authenticate = authenticate if authenticate is not None else (lambda member_id, role_id: True)
        self.generation = 0
        self.is_open = False
        self.transcript: List[Tuple[int, int]] = []
        self._seen: Set[Tuple[int, int]] = set()
        self._signed_members: Set[Tuple[str, int]] = set()
        self.keys: Dict[int, RsaSignerKey] = {}
        self._generate_keys()

    def _generate_keys(self) -> None:
        """
        Internal method for (re-)keying all roles.
        """
        for role_id in self.role_ids:
            role_seed = None if self.seed is None else (
                self.seed + b"/" + role_id.to_bytes(4, "big") + self.generation.to_bytes(4, "big"))
            self.keys[role_id] = rsa_blind.keygen(self.bits, role_seed)
        self._logger.info(f"Generated {len(self.role_ids)} role keys of {self.bits} bits "
                          f"(generation {self.generation})")

    def public_keys(self) -> Dict[int, RsaPublicKey]:
        """
        Method for getting the role verification keys.
        :return: Mapping of role id to public key.
        """
        return {role_id: key.public_key() for role_id, key in self.keys.items()}

    def open(self) -> None:
        """
        Method for opening the setup window.
        """
        self.is_open = True
        self._logger.info("Registration window opened")

    def close(self) -> None:
        """
        Method for closing the setup window.
        """
        self.is_open = False
        self._logger.info(f"Registration window closed after {len(self.transcript)} signatures")

    def restart(self) -> None:
        """
        Method for starting over after a membership change: every role is re-keyed and the transcript is cleared.
        """
        self.generation += 1
        self.transcript.clear()
        self._seen.clear()
        self._signed_members.clear()
        self.is_open = False
        self._generate_keys()

    def sign(self, member_id: str, role_id: int, blinded: int) -> int:
        """
        Method for answering one signing request.
        :param member_id: Authenticated member identity.
        :param role_id: Requested role.
        :param blinded: Blinded message M'.
        :return: Blinded signature S'.
        """
        if not self.is_open:
            raise CeremonyClosedException(member_id)
        if role_id not in self.keys or not self.authenticate(member_id, role_id):
            raise UnauthenticatedMemberException(member_id, role_id)
        if (role_id, blinded) in self._seen:
            raise DuplicateBlindedMessageException(member_id, "presented a previously signed blinded message")
        if (member_id, role_id) in self._signed_members:
            raise DuplicateBlindedMessageException(member_id, f"already holds a signature for role {role_id}")
        self._seen.add((role_id, blinded))
        self._signed_members.add((member_id, role_id))
        self.transcript.append((role_id, blinded))
        return rsa_blind.sign_blinded(self.keys[role_id], blinded)


def registration_ceremony(admin: AdminSigner, users: List[Tuple[str, int, bytes]],
                          randfunc: Optional[RandomFunction] = None) -> List[Certificate]:
    """
    Function for running the registration ceremony of a group of users within one setup window.
    :param admin: Signing service.
    :param users: Tuples of member id, role id and URS public key encoding.
    :param randfunc: Byte source for blinding factors.
        Defaults to None.
    :return: Certificates in user order.
    """
    role_keys = admin.public_keys()
    opened_here = not admin.is_open
    if opened_here:
        admin.open()
    certificates = []
    try:
        for member_id, role_id, public_key in users:
            session = rsa_blind.start_session(role_keys[role_id], public_key, randfunc)
            blinded_signature = admin.sign(member_id, role_id, session.blinded)
            signature = rsa_blind.finish_session(role_keys[role_id], session, blinded_signature)
            certificates.append(Certificate(role_id, public_key,
                                            rsa_blind.encode_integer(signature, role_keys[role_id])))
    finally:
        if opened_here:
            admin.close()
    return certificates


def verify_certificate(role_keys: Dict[int, RsaPublicKey], certificate: Certificate) -> bool:
    """
    Function for checking a certificate under its role key.
    :param role_keys: Mapping of role id to public key.
    :param certificate: Certificate.
    :return: True, if the certificate's signature verifies on its public key.
    """
    public_key = role_keys.get(certificate.role_id)
    if public_key is None or len(certificate.signature) != public_key.byte_length:
        return False
    return rsa_blind.verify(public_key, certificate.public_key, bytes_to_long(certificate.signature))
