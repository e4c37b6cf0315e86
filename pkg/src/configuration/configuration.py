# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
import os
import logging
from dotenv import dotenv_values
from . import paths as PATHS


"""
Environment file
"""
ENV = dotenv_values(os.path.join(PATHS.PACKAGE_PATH, ".env"))
VERSION = "0.1.0"


"""
Logger
"""
LOGGER = logging.getLogger("TRUSTRATE")
LOGGER.setLevel(level=getattr(logging, ENV.get(
    "LOG_LEVEL", "INFO").upper(), logging.INFO))
if not LOGGER.handlers:
    _handler = logging.StreamHandler()
    _handler.setFormatter(logging.Formatter(
        "[%(levelname)s] %(name)s: %(message)s"))
    LOGGER.addHandler(_handler)
SHOW_PROGRESS = ENV.get("SHOW_PROGRESS", "false").lower() in [
    "1", "true", "yes"]


"""
Domain labels
"""
DOMAIN_LABELS = {
    "urs_tag": b"urs/tag",
    "urs_fs": b"urs/fs",
    "dlogeq_fs": b"dlogeq/fs",
    "vrf": b"vrf",
    "merkle_leaf": b"merkle/leaf",
    "merkle_node": b"merkle/node",
    "txgroup": b"txgroup",
    "urs_gen": b"urs/gen",
    "urs_batch": b"urs/batch",
    "seed": b"seed",
    "evidence": b"evidence"
}


"""
Protocol defaults
"""
B_WAIT = int(ENV.get("B_WAIT", 38))
EPOCH_LENGTH = int(ENV.get("EPOCH_LENGTH", 1000))
SAFE_SAMPLE_SIZE = int(ENV.get("SAFE_SAMPLE_SIZE", 25))
SHARD_COUNT = int(ENV.get("SHARD_COUNT", 45))
POLITICIAN_COUNT = int(ENV.get("POLITICIAN_COUNT", 200))
CITIZEN_COUNT = int(ENV.get("CITIZEN_COUNT", 2000))
BLOCK_SIZE_LIMIT = int(ENV.get("BLOCK_SIZE_LIMIT", 9 * 1024 * 1024))
MERKLE_DIGEST_LENGTH = int(ENV.get("MERKLE_DIGEST_LENGTH", 32))
RSA_KEY_SIZES = (2048, 3072, 4096)
URS_SETUP_SEED = ENV.get("URS_SETUP_SEED", "trustrate/urs/v1")
GENESIS_SEED = ENV.get("GENESIS_SEED", "trustrate/genesis")


"""
Test sizing
"""
PROPERTY_TRIALS = int(ENV.get("PROPERTY_TRIALS", 1000))
BATCH_TRIALS = int(ENV.get("BATCH_TRIALS", 200))
SIMULATION_TRIALS = int(ENV.get("SIMULATION_TRIALS", 50))
