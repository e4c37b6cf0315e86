# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
import os
from typing import Any, Dict, Optional
from src.configuration import configuration as cfg
from src.utility.bronze import json_utility
from src.model.ledger_control.blocks import LedgerState
from src.model.ledger_control.data_model import (PollEntry, ScalingEntry, AudienceRecord, IdentityRecord, poll_key,
                                                 vote_tag_key)
from src.model.ledger_control.exceptions import SnapshotException
from src.model.ledger_control.global_state import GlobalState, gs_read, gs_verify
from src.model.ledger_control.merkle import InclusionProof
from src.model.sortition_control.thresholding import decode_threshold
from src.model.netsim_control.data_model import SimulationConfig
from src.model.netsim_control.simulation import Simulation, SimReport


def decode_entry(key: bytes, value: bytes) -> Any:
    """
    Function for decoding a global state value by the namespace of its key.
    :param key: Key.
    :param value: Stored value.
    :return: JSON-compatible representation.
    """
    namespace = key[:1]
    if namespace == b"P":
        return PollEntry.from_bytes(value).to_dict()
    if namespace == b"T":
        return value == b"\x01"
    if namespace == b"V":
        return {"rating": value[0], "text": value[1:].rstrip(b"\x00").decode("utf-8", errors="replace")}
    if namespace == b"I":
        return value.rstrip(b"\x00").decode("utf-8", errors="replace")
    if namespace == b"W":
        return str(decode_threshold(value))
    if namespace == b"U":
        return ScalingEntry.from_bytes(value).__dict__
    if namespace == b"A":
        return AudienceRecord.from_bytes(value).__dict__
    if namespace == b"K":
        identity = IdentityRecord.from_bytes(value)
        return {"public_key": identity.public_key.hex(), "topic": identity.topic}
    return value.hex()


def parse_key(text: str) -> bytes:
    """
    Function for parsing a key given as hex or as poll:<pid hex> or tag:<pid hex>:<tag hex>.
    :param text: Key text.
    :return: Key bytes.
    """
    parts = text.split(":")
    try:
        if parts[0] == "poll" and len(parts) == 2:
            return poll_key(bytes.fromhex(parts[1]))
        if parts[0] == "tag" and len(parts) == 3:
            return vote_tag_key(bytes.fromhex(parts[1]), bytes.fromhex(parts[2]))
        return bytes.fromhex(text)
    except ValueError:
        raise SnapshotException(text, "key is neither hex nor a poll or tag reference", "invalid state key")


class ChainController(object):
    """
    Controller class for running simulated chains and inspecting their state snapshots.
    """

    def __init__(self, working_directory: str = None) -> None:
        """
        Initiation method.
        :param working_directory: Directory for snapshots.
            Defaults to the configured snapshot path.
        """
        self._logger = cfg.LOGGER
        self.working_directory = cfg.PATHS.SNAPSHOT_PATH if working_directory is None else working_directory
        self.simulation: Optional[Simulation] = None

    """
    Simulation
    """

    def run(self, config: SimulationConfig) -> SimReport:
        """
        Method for running a simulation and keeping its chain.
        :param config: Simulation configuration.
        :return: Simulation report.
        """
        self._logger.info(f"Running {config.blocks} blocks with seed {config.seed}")
        self.simulation = Simulation(config)
        report = self.simulation.run()
        self._logger.info(f"Committed {report.committed_votes} votes, {len(report.blacklist)} politicians blacklisted")
        return report

    @property
    def ledger(self) -> LedgerState:
        if self.simulation is None:
            raise SnapshotException(self.working_directory, "no chain has been run yet", "no chain available")
        return self.simulation.ledger

    """
    Snapshots
    """

    def export_snapshot(self, path: str = None) -> str:
        """
        Method for writing the state of the last chain with its trusted root.
        :param path: Target path.
            Defaults to a file named after the seed under the working directory.
        :return: Snapshot path.
        """
        ledger = self.ledger
        if path is None:
            path = os.path.join(self.working_directory, f"state_{self.simulation.config.seed}.json")
        snapshot = {"height": ledger.height, "head_hash": ledger.head_hash().hex(),
                    "state": ledger.state.to_snapshot()}
        json_utility.save(snapshot, path)
        self._logger.info(f"Exported state at height {ledger.height} to '{path}'")
        return path

    @staticmethod
    def load_snapshot(path: str) -> Dict[str, Any]:
        """
        Method for reading a snapshot file.
        :param path: Snapshot path.
        :return: Snapshot dictionary.
        """
        try:
            snapshot = json_utility.load(path)
        except (OSError, ValueError) as ex:
            raise SnapshotException(path, str(ex))
        if not isinstance(snapshot.get("state"), dict) or not {"entries", "root"} <= set(snapshot["state"]):
            raise SnapshotException(path, "missing state entries or root")
        return snapshot

    def inspect(self, path: str, key: str) -> Dict[str, Any]:
        """
        Method for reading a key from a snapshot and checking its proof against the recorded root.
        :param path: Snapshot path.
        :param key: Key as hex or poll:<pid> or tag:<pid>:<tag>.
        :return: Decoded value and proof verdict.
        """
        snapshot = self.load_snapshot(path)
        recorded = snapshot["state"]
        try:
            state = GlobalState.from_snapshot(recorded)
            root = bytes.fromhex(recorded["root"])
        except ValueError as ex:
            raise SnapshotException(path, str(ex))
        raw_key = parse_key(key)
        value, proof = gs_read(state, raw_key)
        verified = gs_verify(root, raw_key, value, proof, state.digest_length)
        if not verified:
            self._logger.warning(f"Proof for key {raw_key.hex()} does not verify against the recorded root")
        return {"key": raw_key.hex(), "present": value is not None,
                "value": None if value is None else value.hex(),
                "decoded": None if value is None else decode_entry(raw_key, value),
                "proof": "inclusion" if isinstance(proof, InclusionProof) else "absence",
                "recorded_root": root.hex(), "computed_root": state.root().hex(), "verified": verified,
                "height": snapshot.get("height")}
