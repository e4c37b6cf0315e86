# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from typing import Tuple


class UnsupportedKeySizeException(Exception):
    """
    UnsupportedKeySizeException class.
    """

    def __init__(self, bits: int, supported: Tuple[int, ...], message: str = "unsupported RSA key size") -> None:
        """
        Initiation method for unsupported key size exception.
        :param bits: Requested modulus size.
        :param supported: Supported modulus sizes.
        :param message: Message to include in exception.
        """
        self.bits = bits
        self.supported = supported
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        """
        Method for encoding exception as string.
        :return: Exception string.
        """
        return f"{self.message} : {self.bits} not in {self.supported}"


class DuplicateBlindedMessageException(Exception):
    """
    DuplicateBlindedMessageException class.
    """

    def __init__(self, member_id: str, reason: str, message: str = "signing request refused") -> None:
        """
        Initiation method for duplicate blinded message exception.
        :param member_id: Requesting member.
        :param reason: Reason of the refusal.
        :param message: Message to include in exception.
        """
        self.member_id = member_id
        self.reason = reason
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        """
        Method for encoding exception as string.
        :return: Exception string.
        """
        return f"{self.message} : '{self.member_id}' {self.reason}"


class CeremonyClosedException(Exception):
    """
    CeremonyClosedException class.
    """

    def __init__(self, member_id: str, message: str = "registration window is closed") -> None:
        """
        Initiation method for ceremony closed exception.
        :param member_id: Requesting member.
        :param message: Message to include in exception.
        """
        self.member_id = member_id
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        """
        Method for encoding exception as string.
        :return: Exception string.
        """
        return f"{self.message} : request by '{self.member_id}'"


class UnauthenticatedMemberException(Exception):
    """
    UnauthenticatedMemberException class.
    """

    def __init__(self, member_id: str, role_id: int, message: str = "member failed authentication") -> None:
        """
        Initiation method for unauthenticated member exception.
        :param member_id: Requesting member.
        :param role_id: Requested role.
        :param message: Message to include in exception.
        """
        self.member_id = member_id
        self.role_id = role_id
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        """
        Method for encoding exception as string.
        :return: Exception string.
        """
        return f"{self.message} : '{self.member_id}' for role {self.role_id}"
