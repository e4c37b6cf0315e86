# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from typing import Dict, List, Any
from sqlalchemy import Engine, Column, Integer, String, LargeBinary, Boolean
from sqlalchemy.orm import declarative_base
from src.configuration import configuration as cfg
from src.utility.gold.basic_sqlalchemy_interface import BasicSQLAlchemyInterface
from src.model.ledger_control.blocks import Block
from src.model.ledger_control.transactions import tx_hash


def populate_archive_infrastructure(engine: Engine, schema: str, model: dict) -> None:
    """
    Function for populating the block archive tables.
    :param engine: Database engine.
    :param schema: Schema prefix for tables.
    :param model: Model dictionary for holding data classes.
    """
    prefix = f"{schema}." if schema else ""
    base = declarative_base()

    class ArchivedBlock(base):
        """
        Committed block header.
        """
        __tablename__ = f"{prefix}block"
        __table_args__ = {"comment": "Committed blocks.", "extend_existing": True}

        number = Column(Integer, primary_key=True, autoincrement=False, nullable=False,
                        comment="Block number.")
        block_hash = Column(LargeBinary, nullable=False, comment="SHA-256 of the block encoding.")
        previous_hash = Column(LargeBinary, nullable=False, comment="Hash of the previous block.")
        state_root = Column(LargeBinary, nullable=False, comment="Global state root after the block.")
        seed = Column(LargeBinary, nullable=False, comment="Block seed.")
        proposer = Column(LargeBinary, nullable=False, comment="Proposer key.")
        transaction_count = Column(Integer, nullable=False, comment="Number of committed transactions.")
        size = Column(Integer, nullable=False, comment="Encoded block size in bytes.")
        encoding = Column(LargeBinary, nullable=False, comment="Full block encoding.")

    class TransactionOutcome(base):
        """
        Outcome of a candidate transaction.
        """
        __tablename__ = f"{prefix}tx_outcome"
        __table_args__ = {"comment": "Committed and rejected transactions.", "extend_existing": True}

        id = Column(Integer, primary_key=True, autoincrement=True, unique=True, nullable=False,
                    comment="ID of the outcome entry.")
        block = Column(Integer, nullable=False, comment="Block the transaction was considered for.")
        tx_hash = Column(LargeBinary, nullable=False, comment="SHA-256 of the transaction encoding.")
        kind = Column(String(1), nullable=False, comment="Transaction kind byte.")
        committed = Column(Boolean, nullable=False, comment="Whether the transaction was committed.")
        reason = Column(String(40), nullable=False, comment="Validation reason code name.")

    for dataclass in [ArchivedBlock, TransactionOutcome]:
        model[dataclass.__tablename__.replace(prefix, "")] = dataclass

    base.metadata.create_all(bind=engine)


class BlockArchive(BasicSQLAlchemyInterface):
    """
    Class, representing the block and transaction outcome archive of one chain.
    """

    def __init__(self, database_uri: str = "sqlite://") -> None:
        """
        Initiation method.
        :param database_uri: Database URI.
            Defaults to an in-memory SQLite database.
        """
        super().__init__(database_uri, populate_archive_infrastructure, logger=cfg.LOGGER)

    def record_block(self, block: Block) -> None:
        """
        Method for archiving a committed block and its transactions.
        :param block: Committed block.
        """
        self.post_object("block", number=block.number, block_hash=block.block_hash(),
                         previous_hash=block.previous_hash, state_root=block.state_root, seed=block.seed,
                         proposer=block.proposer, transaction_count=len(block.transactions), size=block.size(),
                         encoding=block.to_bytes())
        self.post_objects("tx_outcome", [{"block": block.number, "tx_hash": tx_hash(raw), "kind": raw[:1].decode("latin-1"),
                                          "committed": True, "reason": "ACCEPTED"} for raw in block.transactions])

    def record_rejections(self, number: int, rejected: List[tuple]) -> None:
        """
        Method for archiving rejected candidates.
        :param number: Block number.
        :param rejected: Pairs of transaction encoding and reason code name.
        """
        self.post_objects("tx_outcome", [{"block": number, "tx_hash": tx_hash(raw),
                                          "kind": raw[:1].decode("latin-1"), "committed": False, "reason": reason}
                                         for raw, reason in rejected])

    def height(self) -> int:
        return self.get_object_count_by_type("block")

    def block_summary(self, number: int) -> Dict[str, Any]:
        """
        Method for getting the commit log entry of a block.
        :param number: Block number.
        :return: Block header fields and outcome counts by reason.
        """
        block = self.get_object_by_id("block", number)
        reasons: Dict[str, int] = {}
        for outcome in self.get_objects_by_attribute("tx_outcome", "block", number):
            reasons[outcome.reason] = reasons.get(outcome.reason, 0) + 1
        return {"number": block.number, "block_hash": block.block_hash.hex(), "state_root": block.state_root.hex(),
                "proposer": block.proposer.hex(), "transactions": block.transaction_count, "size": block.size,
                "outcomes": dict(sorted(reasons.items()))}

    def commit_log(self) -> List[Dict[str, Any]]:
        """
        Method for getting the commit log of all archived blocks in order.
        """
        return [self.block_summary(block.number) for block in self.get_objects_by_type("block")]
