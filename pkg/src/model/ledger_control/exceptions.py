# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from typing import List, Tuple


class TransactionDecodingException(Exception):
    """
    TransactionDecodingException class.
    """

    def __init__(self, length: int, reason: str, message: str = "undecodable transaction") -> None:
        """
        Initiation method for transaction decoding exception.
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


class InvalidBlockException(Exception):
    """
    InvalidBlockException class.
    """

    def __init__(self, block_number: int, reasons: List[Tuple[int, str]], message: str = "block rejected") -> None:
        """
        Initiation method for invalid block exception.
        :param block_number: Number of the rejected block.
        :param reasons: Tuples of transaction position and reason code name.
        :param message: Message to include in exception.
        """
        self.block_number = block_number
        self.reasons = reasons
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        """
        Method for encoding exception as string.
        :return: Exception string.
        """
        return f"{self.message} : block {self.block_number} with invalid transactions {self.reasons}"


class SnapshotException(Exception):
    """
    SnapshotException class.
    """

    def __init__(self, path: str, reason: str, message: str = "unreadable state snapshot") -> None:
        """
        Initiation method for snapshot exception.
        :param path: Snapshot path.
        :param reason: Reason of the failure.
        :param message: Message to include in exception.
        """
        self.path = path
        self.reason = reason
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        """
        Method for encoding exception as string.
        :return: Exception string.
        """
        return f"{self.message} : {self.path} ({self.reason})"
