# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from __future__ import annotations
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple
from src.model.group_control.group_primitives import domain_hash, label


def leaf_hash(key: bytes, value: bytes, digest_length: int = 32) -> bytes:
    """
    Function for hashing a key-value leaf.
    :param key: Key.
    :param value: Value.
    :param digest_length: Digest length.
        Defaults to 32.
    :return: Leaf digest.
    """
    return domain_hash(label("merkle_leaf"), len(key).to_bytes(4, "big") + key + value, digest_length)


def node_hash(left: bytes, right: bytes, digest_length: int = 32) -> bytes:
    """
    Function for hashing two child digests.
    """
    return domain_hash(label("merkle_node"), left + right, digest_length)


def empty_root(digest_length: int = 32) -> bytes:
    """
    Function for getting the root of a tree without leaves.
    """
    return domain_hash(label("merkle_node"), b"", digest_length)


def build_levels(leaves: List[bytes], digest_length: int = 32) -> List[List[bytes]]:
    """
    Function for building all tree levels bottom-up. An unpaired last node is promoted unchanged.
    :param leaves: Leaf digests in key order.
    :param digest_length: Digest length.
        Defaults to 32.
    :return: Levels, leaves first, root level last.
    """
    levels = [list(leaves)]
    while len(levels[-1]) > 1:
        level = levels[-1]
        parents = [node_hash(level[index], level[index + 1], digest_length) for index in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            parents.append(level[-1])
        levels.append(parents)
    return levels


def root_of(levels: List[List[bytes]], digest_length: int = 32) -> bytes:
    """
    Function for getting the root of built levels.
    """
    return levels[-1][0] if levels and levels[0] else empty_root(digest_length)


@dataclass
class InclusionProof:
    """
    Sibling path of one leaf. Promoted levels contribute no sibling.
    """
    index: int
    leaf_count: int
    siblings: List[bytes]

    def size(self) -> int:
        return sum(len(sibling) for sibling in self.siblings)

    def to_dict(self) -> dict:
        return {"index": self.index, "leaf_count": self.leaf_count, "siblings": [sibling.hex() for sibling in self.siblings]}


@dataclass
class AbsenceProof:
    """
    Inclusion proofs of the adjacent present keys around an absent key.
    """
    leaf_count: int
    left: Optional[Tuple[bytes, bytes, InclusionProof]]
    right: Optional[Tuple[bytes, bytes, InclusionProof]]

    def to_dict(self) -> dict:
        return {"leaf_count": self.leaf_count,
                "left": None if self.left is None else [self.left[0].hex(), self.left[1].hex(), self.left[2].to_dict()],
                "right": None if self.right is None else [self.right[0].hex(), self.right[1].hex(),
                                                          self.right[2].to_dict()]}


def prove(levels: List[List[bytes]], index: int) -> InclusionProof:
    """
    Function for extracting the sibling path of a leaf.
    :param levels: Built levels.
    :param index: Leaf index.
    :return: Inclusion proof.
    """
    siblings = []
    position = index
    for level in levels[:-1]:
        sibling = position ^ 1
        if sibling < len(level):
            siblings.append(level[sibling])
        position //= 2
    return InclusionProof(index, len(levels[0]), siblings)


def root_from_proof(leaf: bytes, proof: InclusionProof, digest_length: int = 32) -> Optional[bytes]:
    """
    Function for recomputing the root implied by a leaf digest and its path.
    :param leaf: Leaf digest.
    :param proof: Inclusion proof.
    :param digest_length: Digest length.
        Defaults to 32.
    :return: Root, or None if the path does not fit the tree shape.
    """
    if not 0 <= proof.index < proof.leaf_count:
        return None
    current = leaf
    position, width = proof.index, proof.leaf_count
    siblings = list(proof.siblings)
    while width > 1:
        sibling = position ^ 1
        if sibling < width:
            if not siblings:
                return None
            other = siblings.pop(0)
            current = node_hash(current, other, digest_length) if position % 2 == 0 else node_hash(other, current,
                                                                                                  digest_length)
        position //= 2
        width = (width + 1) // 2
    return None if siblings else current


def verify_inclusion(root: bytes, key: bytes, value: bytes, proof: InclusionProof, digest_length: int = 32) -> bool:
    """
    Function for verifying that a key-value pair is a leaf under a root.
    """
    return root_from_proof(leaf_hash(key, value, digest_length), proof, digest_length) == root


def verify_absence(root: bytes, key: bytes, proof: AbsenceProof, digest_length: int = 32) -> bool:
    """
    Function for verifying that a key is absent: its present neighbours are adjacent leaves enclosing it.
    :param root: Merkle root.
    :param key: Absent key.
    :param proof: Absence proof.
    :param digest_length: Digest length.
        Defaults to 32.
    :return: True, if the proof shows absence.
    """
    if proof.leaf_count == 0:
        return proof.left is None and proof.right is None and root == empty_root(digest_length)
    for neighbour in (proof.left, proof.right):
        if neighbour is not None and (neighbour[2].leaf_count != proof.leaf_count or not verify_inclusion(
                root, neighbour[0], neighbour[1], neighbour[2], digest_length)):
            return False
    if proof.left is None and proof.right is None:
        return False
    if proof.left is not None and not proof.left[0] < key:
        return False
    if proof.right is not None and not key < proof.right[0]:
        return False
    if proof.left is None:
        return proof.right[2].index == 0
    if proof.right is None:
        return proof.left[2].index == proof.leaf_count - 1
    return proof.left[2].index + 1 == proof.right[2].index


def proof_size(leaf_count: int, digest_length: int = 32) -> int:
    """
    Function for getting the inclusion proof size of a full tree.
    :param leaf_count: Number of leaves.
    :param digest_length: Digest length.
        Defaults to 32.
    :return: ceil(log2(leaf_count)) * digest_length bytes.
    """
    return math.ceil(math.log2(leaf_count)) * digest_length if leaf_count > 1 else 0
