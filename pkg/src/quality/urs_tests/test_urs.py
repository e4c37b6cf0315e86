# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
import unittest
import gc
import time
from random import Random
from src.configuration import configuration as cfg
from src.model.group_control.group_primitives import GroupElement, GroupScalar, random_scalar
from src.model.urs_control import urs
from src.model.urs_control.data_model import Ring, UrsParams, UrsSignature, signature_size, tag_base, vote_base
from src.model.urs_control.dlog_eq import dlogeq_prove, dlogeq_verify
from src.model.urs_control.exceptions import (SignerNotInRingException, MalformedSignatureException,
                                               MixedRingBatchException, InvalidRingException)


def accepts(params: UrsParams, poll_id: bytes, vote: bytes, ring: Ring, signature: bytes) -> bool:
    """
    Function for treating undecodable signatures as rejected.
    """
    try:
        return urs.verify(params, poll_id, vote, ring, signature)
    except MalformedSignatureException:
        return False


class UrsTest(unittest.TestCase):
    """
    Test case class for testing unique ring signatures.
    """

    def test_01_setup_and_keygen(self) -> None:
        """
        Method for testing parameter setup and key generation.
        """
        self.assertEqual(urs.setup(), urs.setup())
        self.assertNotEqual(self.params.g, self.params.h)
        self.assertNotEqual(urs.setup(seed="other").g, self.params.g)
        self.assertEqual(UrsParams.from_bytes(self.params.to_bytes()), self.params)

        keys = [urs.keygen(self.params, self.rng) for _ in range(cfg.PROPERTY_TRIALS)]
        self.assertEqual(len({key.pk.to_bytes() for key in keys}), len(keys))
        for key in keys[:5]:
            self.assertEqual(self.params.h ** key.sk, key.pk)
        self.assertNotEqual(urs.keygen(self.params).pk, urs.keygen(self.params).pk)

    def test_02_ring_handling(self) -> None:
        """
        Method for testing canonical rings.
        """
        members = [key.pk for key in self.keys[:5]]
        ring = Ring(reversed(members))
        self.assertEqual(ring, Ring(members))
        self.assertEqual([member.to_bytes() for member in ring.members], sorted(member.to_bytes() for member in members))
        self.assertEqual(ring.arity, 3)
        self.assertEqual(len(ring.padded()), 8)
        self.assertEqual(ring.padded()[-1], ring.members[-1])
        self.assertEqual(Ring.from_encoding(ring.encoding()), ring)
        with self.assertRaises(InvalidRingException):
            Ring(members[:1])
        with self.assertRaises(InvalidRingException):
            Ring(members[:2] + members[:1])

    def test_03_correctness(self) -> None:
        """
        Method for testing sign/verify across ring sizes and signer positions.
        """
        for size in [2, 3, 4, 5, 7, 8, 16, 19]:
            ring = Ring(key.pk for key in self.keys[:size])
            for _ in range(2):
                key = self.rng.choice(self.keys[:size])
                vote = bytes([self.rng.randrange(256)])
                signature = urs.sign(self.params, b"poll-a", vote, ring, key.sk, self.rng)
                self.assertEqual(signature.arity, ring.arity)
                self.assertTrue(urs.verify(self.params, b"poll-a", vote, ring, signature))
                encoding = signature.to_bytes()
                self.assertEqual(len(encoding), signature_size(size))
                self.assertTrue(urs.verify(self.params, b"poll-a", vote, ring, encoding))

    def test_04_signer_symmetry(self) -> None:
        """
        Method for testing that every ring member signs and verifies alike.
        """
        ring = Ring(key.pk for key in self.keys[:6])
        verdicts = [urs.verify(self.params, b"poll-s", b"\x01", ring,
                               urs.sign(self.params, b"poll-s", b"\x01", ring, key.sk, self.rng))
                    for key in self.keys[:6]]
        self.assertEqual(verdicts, [True] * 6)

    def test_05_signature_sizes(self) -> None:
        """
        Method for testing signature sizes.
        """
        for size, expected in [(2, 448), (50, 1728), (100, 1984), (128, 1984), (200, 2240), (16384, 3776)]:
            self.assertEqual(signature_size(size), expected)
        ring = Ring(key.pk for key in self.keys[:100])
        signature = urs.sign(self.params, b"poll-size", b"\x03", ring, self.keys[42].sk, self.rng)
        self.assertEqual(len(signature.to_bytes()), 1984)
        self.assertEqual(257 + len(signature.to_bytes()), 2241)

    def test_06_tags(self) -> None:
        """
        Method for testing uniqueness and vote tags.
        """
        ring = Ring(key.pk for key in self.keys[:4])
        first = urs.sign(self.params, b"poll-t", b"\x01", ring, self.keys[0].sk, self.rng)
        second = urs.sign(self.params, b"poll-t", b"\x02", ring, self.keys[0].sk, self.rng)
        self.assertEqual(urs.tag_of(first), urs.tag_of(second))
        self.assertNotEqual(first.tau, second.tau)
        self.assertEqual(urs.tag_of(first), tag_base(b"poll-t", ring) ** self.keys[0].sk)

        tags = {urs.tag_of(urs.sign(self.params, b"poll-t", b"\x01", ring, key.sk, self.rng)).to_bytes()
                for key in self.keys[:4]}
        self.assertEqual(len(tags), 4)
        other_poll = urs.sign(self.params, b"poll-u", b"\x01", ring, self.keys[0].sk, self.rng)
        self.assertNotEqual(urs.tag_of(other_poll), urs.tag_of(first))

    def test_07_rejections(self) -> None:
        """
        Method for testing rejection of invalid signatures.
        """
        ring = Ring(key.pk for key in self.keys[:8])
        outsider = urs.keygen(self.params, self.rng)
        with self.assertRaises(SignerNotInRingException):
            urs.sign(self.params, b"poll-r", b"\x01", ring, outsider.sk, self.rng)

        signature = urs.sign(self.params, b"poll-r", b"\x01", ring, self.keys[3].sk, self.rng)
        self.assertFalse(urs.verify(self.params, b"poll-r", b"\x02", ring, signature))
        self.assertFalse(urs.verify(self.params, b"poll-x", b"\x01", ring, signature))
        other_ring = Ring(key.pk for key in self.keys[1:9])
        self.assertFalse(urs.verify(self.params, b"poll-r", b"\x01", other_ring, signature))
        smaller_ring = Ring(key.pk for key in self.keys[:4])
        self.assertFalse(urs.verify(self.params, b"poll-r", b"\x01", smaller_ring, signature))

        encoding = bytearray(signature.to_bytes())
        tau_offset = 32 * (8 * signature.arity + 2)
        encoding[tau_offset + 5] ^= 0x01
        self.assertFalse(accepts(self.params, b"poll-r", b"\x01", ring, bytes(encoding)))

        shifted = UrsSignature.from_bytes(signature.to_bytes())
        shifted.tau = shifted.tau * GroupElement.generator()
        self.assertFalse(urs.verify(self.params, b"poll-r", b"\x01", ring, shifted))
        shifted = UrsSignature.from_bytes(signature.to_bytes())
        shifted.z_d = shifted.z_d + 1
        self.assertFalse(urs.verify(self.params, b"poll-r", b"\x01", ring, shifted))

        other_vote = urs.sign(self.params, b"poll-r", b"\x02", ring, self.keys[3].sk, self.rng)
        transplanted = UrsSignature.from_bytes(signature.to_bytes())
        transplanted.pi = other_vote.pi
        self.assertFalse(urs.verify(self.params, b"poll-r", b"\x01", ring, transplanted))

    def test_08_malformed_encodings(self) -> None:
        """
        Method for testing the distinct error for undecodable signatures.
        """
        ring = Ring(key.pk for key in self.keys[:4])
        signature = urs.sign(self.params, b"poll-m", b"\x01", ring, self.keys[1].sk, self.rng)
        encoding = signature.to_bytes()
        with self.assertRaises(MalformedSignatureException):
            urs.verify(self.params, b"poll-m", b"\x01", ring, encoding[:-1])
        with self.assertRaises(MalformedSignatureException):
            urs.verify(self.params, b"poll-m", b"\x01", ring, encoding + b"\x00" * 32)
        with self.assertRaises(MalformedSignatureException):
            urs.verify(self.params, b"poll-m", b"\x01", ring, b"\xff" * 32 + encoding[32:])
        with self.assertRaises(MalformedSignatureException):
            UrsSignature.from_bytes(encoding[:-32] + b"\xff" * 32)

    def test_09_dlog_equality(self) -> None:
        """
        Method for testing discrete logarithm equality proofs.
        """
        g2, g3 = vote_base(b"p", b"v", Ring(key.pk for key in self.keys[:2])), self.params.g
        x, other = random_scalar(self.rng), random_scalar(self.rng)
        proof = dlogeq_prove(x, g2, g3, self.rng)
        self.assertTrue(dlogeq_verify(g2 ** x, g3 ** x, g2, g3, proof))
        self.assertFalse(dlogeq_verify(g2 ** x, g3 ** other, g2, g3, dlogeq_prove(x, g2, g3, self.rng)))
        self.assertFalse(dlogeq_verify(g2 ** other, g3 ** other, g2, g3, proof))
        self.assertFalse(dlogeq_verify(g3 ** x, g2 ** x, g3, g2, dlogeq_prove(GroupScalar(7), g3, g2, self.rng)))

    def test_10_batch_oracle(self) -> None:
        """
        Method for testing batch verification against serial verification.
        """
        ring = Ring(key.pk for key in self.keys[:8])
        pool = []
        for key in self.keys[:8]:
            for vote in [b"\x01", b"\x02"]:
                pool.append((vote, urs.sign(self.params, b"poll-b", vote, ring, key.sk, self.rng).to_bytes()))

        single = urs.batch_verify(self.params, b"poll-b", pool[:1], ring)
        self.assertEqual(single, [True])
        self.assertEqual(urs.batch_verify(self.params, b"poll-b", [(b"\x02", pool[0][1])], ring), [False])
        self.assertEqual(urs.batch_verify(self.params, b"poll-b", [], ring), [])

        for trial in range(cfg.BATCH_TRIALS):
            size = self.rng.randint(1, 16)
            batch = [list(entry) for entry in self.rng.sample(pool, size)]
            for position in self.rng.sample(range(size), self.rng.randint(0, min(3, size))):
                corruption = self.rng.randrange(3)
                if corruption == 0:
                    batch[position][0] = b"\x09"
                elif corruption == 1:
                    signature = UrsSignature.from_bytes(batch[position][1])
                    signature.z_a[0] = signature.z_a[0] + 1
                    batch[position][1] = signature.to_bytes()
                else:
                    batch[position][1] = batch[position][1][:-3]
            batch = [tuple(entry) for entry in batch]
            expected = [accepts(self.params, b"poll-b", vote, ring, signature) for vote, signature in batch]
            verdicts = urs.batch_verify(self.params, b"poll-b", batch, ring,
                                        seed=trial.to_bytes(4, "big") * 8)
            self.assertEqual(verdicts, expected)

        with self.assertRaises(MixedRingBatchException):
            urs.batch_verify(self.params, b"poll-b", [(pool[0][0], pool[0][1], b"\x00" * 32)], ring)
        tagged = [(vote, signature, ring.ring_hash()) for vote, signature in pool[:3]]
        self.assertEqual(urs.batch_verify(self.params, b"poll-b", tagged, ring), [True] * 3)
        smaller_ring = Ring(key.pk for key in self.keys[:4])
        self.assertEqual(urs.batch_verify(self.params, b"poll-b", pool[:2], smaller_ring), [False, False])

    def test_11_batch_speedup(self) -> None:
        """
        Method for testing per-signature batch cost on a full ring.
        """
        ring = Ring(key.pk for key in self.keys[:128])
        batch = []
        for key in self.rng.sample(self.keys[:128], 8):
            signature = urs.sign(self.params, b"poll-speed", b"\x05", ring, key.sk, self.rng)
            batch.append((b"\x05", UrsSignature.from_bytes(signature.to_bytes())))

        start = time.perf_counter()
        serial = [urs.verify(self.params, b"poll-speed", vote, ring, signature) for vote, signature in batch]
        serial_time = time.perf_counter() - start
        start = time.perf_counter()
        batched = urs.batch_verify(self.params, b"poll-speed", batch, ring, seed=b"speed")
        batch_time = time.perf_counter() - start
        self.assertEqual(serial, [True] * 8)
        self.assertEqual(batched, serial)
        self.assertTrue(batch_time <= 0.5 * serial_time)

    @classmethod
    def setUpClass(cls):
        """
        Class method for setting up test case.
        """
        cls.rng = Random(4711)
        cls.params = urs.setup()
        cls.keys = [urs.keygen(cls.params, cls.rng) for _ in range(128)]

    @classmethod
    def tearDownClass(cls):
        """
        Class method for setting tearing down test case.
        """
        del cls.rng
        del cls.params
        del cls.keys
        gc.collect()

    @classmethod
    def setup_class(cls):
        """
        Alternative class method for setting up test case.
        """
        cls.setUpClass()

    @classmethod
    def teardown_class(cls):
        """
        Alternative class for setting tearing down test case.
        """
        cls.tearDownClass()


if __name__ == '__main__':
    unittest.main()
