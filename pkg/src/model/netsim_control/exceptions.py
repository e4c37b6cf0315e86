# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from typing import List


class OffloadFailureException(Exception):
    """
    OffloadFailureException class.
    """

    def __init__(self, protocol: str, sample: List[int],
                 message: str = "no politician of the sample responded") -> None:
        """
        Initiation method for offload failure exception.
        :param protocol: Name of the failed offload protocol.
        :param sample: Politician ids of the sample.
        :param message: Message to include in exception.
        """
        self.protocol = protocol
        self.sample = sample
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        """
        Method for encoding exception as string.
        :return: Exception string.
        """
        return f"{self.message} : {self.protocol} with sample {self.sample}"


class ConfigurationException(Exception):
    """
    ConfigurationException class.
    """

    def __init__(self, source: str, reason: str, message: str = "invalid simulation configuration") -> None:
        """
        Initiation method for configuration exception.
        :param source: Path or name of the configuration.
        :param reason: Reason of the rejection.
        :param message: Message to include in exception.
        """
        self.source = source
        self.reason = reason
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        """
        Method for encoding exception as string.
        :return: Exception string.
        """
        return f"{self.message} : {self.source}: {self.reason}"


class SetupWindowException(Exception):
    """
    SetupWindowException class.
    """

    def __init__(self, member_id: str, reason: str,
                 message: str = "registration before the setup window closed") -> None:
        """
        Initiation method for setup window exception.
        :param member_id: User whose registration was attempted.
        :param reason: State of the setup window.
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
        return f"{self.message} : {self.member_id}: {self.reason}"
