# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""


class SignerNotInRingException(Exception):
    """
    SignerNotInRingException class.
    """

    def __init__(self, public_key: bytes, ring_size: int, message: str = "signing key is not a ring member") -> None:
        """
        Initiation method for signer not in ring exception.
        :param public_key: Public key derived from the signing key.
        :param ring_size: Size of the ring.
        :param message: Message to include in exception.
        """
        self.public_key = public_key
        self.ring_size = ring_size
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        """
        Method for encoding exception as string.
        :return: Exception string.
        """
        return f"{self.message} : {self.public_key.hex()} (ring of {self.ring_size})"


class MalformedSignatureException(Exception):
    """
    MalformedSignatureException class.
    """

    def __init__(self, length: int, reason: str, message: str = "malformed ring signature") -> None:
        """
        Initiation method for malformed signature exception.
        :param length: Length of the offending encoding.
        :param reason: Reason of the decoding failure.
        :param message: Message to include in exception.
        """
        self.length = length
        self.reason = reason
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        """
        Method for encoding exception as string.
        :return: Exception string.
        """
        return f"{self.message} : {self.reason} ({self.length} bytes)"


class InvalidRingException(Exception):
    """
    InvalidRingException class.
    """

    def __init__(self, ring_size: int, reason: str, message: str = "invalid ring") -> None:
        """
        Initiation method for invalid ring exception.
        :param ring_size: Number of given members.
        :param reason: Reason of the rejection.
        :param message: Message to include in exception.
        """
        self.ring_size = ring_size
        self.reason = reason
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        """
        Method for encoding exception as string.
        :return: Exception string.
        """
        return f"{self.message} : {self.reason} ({self.ring_size} members)"


class MixedRingBatchException(Exception):
    """
    MixedRingBatchException class.
    """

    def __init__(self, expected_ring_hash: bytes, given_ring_hash: bytes, message: str = "batch mixes rings") -> None:
        """
        Initiation method for mixed ring batch exception.
        :param expected_ring_hash: Ring hash of the batch.
        :param given_ring_hash: Deviating ring hash.
        :param message: Message to include in exception.
        """
        self.expected_ring_hash = expected_ring_hash
        self.given_ring_hash = given_ring_hash
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        """
        Method for encoding exception as string.
        :return: Exception string.
        """
        return f"{self.message} : {self.expected_ring_hash.hex()} vs {self.given_ring_hash.hex()}"
