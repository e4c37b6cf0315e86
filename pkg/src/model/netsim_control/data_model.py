# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from __future__ import annotations
import json
import math
from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import Any, Dict, List
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey
from pydantic import BaseModel, validator, root_validator
from src.configuration import configuration as cfg
from src.model.group_control.group_primitives import domain_hash, label
from src.model.ledger_control.transactions import ed25519_verify, public_bytes
from src.model.netsim_control.exceptions import ConfigurationException


"""
Nodes
"""


class Role(Enum):
    """
    Node roles.
    """
    CITIZEN = "citizen"
    POLITICIAN = "politician"


class BehaviorProfile(BaseModel):
    """
    Misbehavior flags of a node. The honest profile has every flag unset.
    """
    drop_polls: bool = False
    wrong_ring_hash: bool = False
    wrong_verification_claims: bool = False
    unresponsive: bool = False
    drop_transactions: bool = False
    violate_fmap: bool = False

    class Config:
        frozen = True

    @property
    def honest(self) -> bool:
        return not any(self.dict().values())


HONEST = BehaviorProfile()


@dataclass
class NodeSpec:
    """
    Simulated Citizen or Politician.
    """
    node_id: int
    role: Role
    identity: Ed25519PrivateKey
    behavior: BehaviorProfile = HONEST
    public_key: bytes = b""

    def __post_init__(self) -> None:
        if not self.public_key:
            self.public_key = public_bytes(self.identity)

    @property
    def name(self) -> str:
        return f"{self.role.value}-{self.node_id}"


@dataclass
class SafeSample:
    """
    Politicians a citizen queries during one block.
    """
    block: int
    politician_ids: List[int]

    @property
    def size(self) -> int:
        return len(self.politician_ids)


"""
Transaction pools
"""


class FMap(Enum):
    """
    Mapping of pending transactions to pool politicians.
    """
    DET_TX_HASHMAP = "DET_TX_HASHMAP"
    DET_GROUP_HASHMAP = "DET_GROUP_HASHMAP"


class FSelect(Enum):
    """
    Selection of transactions from a politician's shard.
    """
    RANDOM_TX = "RANDOM_TX"
    RANDOM_GROUP = "RANDOM_GROUP"
    OLDEST = "OLDEST"
    DEADLINE = "DEADLINE"


class TxPoolPolicy(BaseModel):
    """
    Pool policy of honest politicians.
    """
    f_map: FMap = FMap.DET_GROUP_HASHMAP
    f_select: FSelect = FSelect.RANDOM_GROUP
    shard_count: int = cfg.SHARD_COUNT
    group_wait: int = 2

    @validator("shard_count")
    def _shard_count(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("shard count must be positive")
        return value

    @property
    def grouped(self) -> bool:
        return self.f_map == FMap.DET_GROUP_HASHMAP


"""
Statements and evidence
"""


@dataclass
class Statement:
    """
    Signed claim of a politician.
    """
    politician_id: int
    kind: str
    block: int
    subject: bytes
    payload: bytes
    signature: bytes = b""

    def encoding(self) -> bytes:
        kind = self.kind.encode("utf-8")
        return (len(kind).to_bytes(1, "big") + kind + self.politician_id.to_bytes(4, "big")
                + self.block.to_bytes(8, "big") + len(self.subject).to_bytes(4, "big") + self.subject + self.payload)

    def digest(self) -> bytes:
        return domain_hash(label("evidence"), self.encoding())

    def sign(self, identity: Ed25519PrivateKey) -> Statement:
        self.signature = identity.sign(self.digest())
        return self

    def verify(self, public_key: bytes) -> bool:
        return ed25519_verify(public_key, self.signature, self.digest())


@dataclass
class Evidence:
    """
    Signed statement together with the data contradicting it.
    """
    politician_id: int
    kind: str
    statement: Statement
    data: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"politician": self.politician_id, "kind": self.kind, "block": self.statement.block,
                "statement": self.statement.digest().hex()}


@dataclass
class ResourceCounters:
    """
    Work and traffic of one node.
    """
    hashes: int = 0
    vrf_evaluations: int = 0
    signatures_verified: int = 0
    bytes_sent: int = 0
    bytes_received: int = 0
    offloads: int = 0
    timeouts: int = 0
    conflicts: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


"""
Simulation configuration
"""


def dishonest_count(fraction: float, count: int) -> int:
    """
    Function for getting the number of nodes a dishonest fraction marks.
    :param fraction: Dishonest fraction.
    :param count: Population size.
    :return: Number of dishonest nodes, rounded up.
    """
    return min(count, math.ceil(fraction * count))


class SimulationConfig(BaseModel):
    """
    Parameters of a simulation run.
    """
    seed: int = 0
    users: int = 16
    citizens: int = 8
    politicians: int = 10
    committee_size: int = 4
    sample_size: int = 3
    topics: List[int] = [1]
    n_req: int = 4
    b_wait: int = 2
    b_vw: int = 4
    epoch_length: int = 1000
    lam: float = 1.0
    blocks: int = 12
    poll_blocks: int = 2
    polls_per_block: int = 1
    vote_rate: float = 1.0
    duplicate_rate: float = 0.0
    late_rate: float = 0.0
    malicious_politicians: float = 0.0
    malicious_citizens: float = 0.0
    politician_behavior: BehaviorProfile = BehaviorProfile(wrong_ring_hash=True, wrong_verification_claims=True,
                                                           drop_polls=True)
    ensure_good_citizens: bool = True
    permissioned: bool = False
    rsa_bits: int = 2048
    setup_time: float = 1.0
    policy: TxPoolPolicy = TxPoolPolicy()
    pool_capacity: int = 64
    latency: float = 0.05
    base_block_time: float = 1.0
    proposal_timeout: float = 1.0
    t_hash: float = 1e-5
    t_verif: float = 0.03
    n_thread: int = 4
    block_size_limit: int = cfg.BLOCK_SIZE_LIMIT

    @validator("users", "citizens", "politicians", "committee_size", "sample_size", "n_req", "b_wait", "b_vw",
               "epoch_length", "blocks", "pool_capacity", "n_thread", "block_size_limit")
    def _positive(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("must be positive")
        return value

    @validator("vote_rate", "duplicate_rate", "late_rate", "malicious_politicians", "malicious_citizens")
    def _fraction(cls, value: float) -> float:
        if not 0 <= value <= 1:
            raise ValueError("must lie in [0, 1]")
        return value

    @validator("latency", "base_block_time", "proposal_timeout", "setup_time", "t_hash", "t_verif")
    def _non_negative(cls, value: float) -> float:
        if value < 0:
            raise ValueError("must not be negative")
        return value

    @root_validator(skip_on_failure=True)
    def _sizes(cls, values: dict) -> dict:
        if values["committee_size"] > values["citizens"]:
            raise ValueError("committee larger than the citizen population")
        if values["sample_size"] > values["politicians"]:
            raise ValueError("safe sample larger than the politician population")
        if values["n_req"] >= values["users"]:
            raise ValueError("n_req must be smaller than the user population")
        if values["ensure_good_citizens"] and dishonest_count(values["malicious_politicians"],
                                                              values["politicians"]) >= values["politicians"]:
            raise ValueError("good citizens need at least one honest politician")
        if values["permissioned"] and values["rsa_bits"] not in cfg.RSA_KEY_SIZES:
            raise ValueError(f"rsa_bits must be one of {cfg.RSA_KEY_SIZES}")
        return values

    def threat_model_warnings(self) -> List[str]:
        """
        Method for listing violated threat-model bounds. Such runs are allowed as stress tests.
        :return: Warning messages.
        """
        warnings = []
        if self.malicious_politicians > 0.8:
            warnings.append(f"{self.malicious_politicians:.0%} malicious politicians exceeds the 80% bound")
        if self.malicious_citizens > 0.25:
            warnings.append(f"{self.malicious_citizens:.0%} malicious citizens exceeds the 25% bound")
        if not self.ensure_good_citizens and self.malicious_politicians > 0:
            warnings.append("safe samples may consist of malicious politicians only")
        return warnings

    @classmethod
    def from_file(cls, path: str) -> SimulationConfig:
        """
        Class method for loading a JSON configuration.
        :param path: Path of the JSON file.
        :return: Simulation configuration.
        """
        try:
            with open(path, "r", encoding="utf-8") as file:
                return cls.parse_obj(json.load(file))
        except (OSError, ValueError) as ex:
            raise ConfigurationException(path, str(ex).replace("\n", "; "))
