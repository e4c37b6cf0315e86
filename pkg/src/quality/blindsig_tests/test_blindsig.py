# -*- coding: utf-8 -*-
"""
****************************************************
*              TrustRate Desk Backend              *
*            (c) 2023 Alexander Hering             *
****************************************************
"""
import unittest
import gc
import numpy as np
from src.model.blindsig_control import rsa_blind
from src.model.blindsig_control.rsa_blind import SeededByteSource
from src.model.blindsig_control.registration import (AdminSigner, Certificate, registration_ceremony,
                                                      verify_certificate)
from src.model.blindsig_control.exceptions import (UnsupportedKeySizeException, DuplicateBlindedMessageException,
                                                    CeremonyClosedException, UnauthenticatedMemberException)


class BlindSignatureTest(unittest.TestCase):
    """
    Test case class for testing RSA blind signatures and the registration ceremony.
    """

    def test_01_keygen(self) -> None:
        """
        Method for testing key generation.
        """
        self.assertEqual(self.key.bits, 2048)
        self.assertEqual(self.key.n.bit_length(), 2048)
        self.assertEqual(rsa_blind.keygen(2048, b"blindsig-test").n, self.key.n)
        self.assertEqual(pow(pow(12345, self.key.d, self.key.n), self.key.e, self.key.n), 12345)
        with self.assertRaises(UnsupportedKeySizeException):
            rsa_blind.keygen(1024)

    def test_02_blind_sign_unblind(self) -> None:
        """
        Method for testing the user-side flow.
        """
        message = b"\x11" * 32
        first, r = rsa_blind.blind(self.public_key, message, self.randfunc)
        second, _ = rsa_blind.blind(self.public_key, message, self.randfunc)
        self.assertNotEqual(first, second)
        signature = rsa_blind.unblind(self.public_key, rsa_blind.sign_blinded(self.key, first), r)
        self.assertTrue(rsa_blind.verify(self.public_key, message, signature))
        self.assertFalse(rsa_blind.verify(self.public_key, b"\x12" * 32, signature))
        self.assertFalse(rsa_blind.verify(self.public_key, message, signature + 1))
        self.assertFalse(rsa_blind.verify(self.public_key, message, 0))

    def test_03_blinding_ratio(self) -> None:
        """
        Method for testing that a fixed blinding factor preserves message ratios.
        """
        n = self.public_key.n
        blinded = []
        for message in [b"first", b"second"]:
            rng = SeededByteSource(b"fixed")
            value, factor = rsa_blind.blind(self.public_key, message, rng)
            blinded.append((value, factor, rsa_blind.full_domain_hash(self.public_key, message)))
        self.assertEqual(blinded[0][1], blinded[1][1])
        (first, _, first_hash), (second, _, second_hash) = blinded
        self.assertEqual(first * pow(second, -1, n) % n, first_hash * pow(second_hash, -1, n) % n)
        self.assertTrue(0 < rsa_blind.full_domain_hash(self.public_key, b"x") < n)

    def test_04_traffic(self) -> None:
        """
        Method for testing traffic accounting.
        """
        self.assertEqual(rsa_blind.exchange_bytes(2048), 768)
        self.assertEqual(rsa_blind.admin_egress_bytes(10 ** 6, 2048), 512 * 10 ** 6)
        message = b"\x21" * 32
        blinded, r = rsa_blind.blind(self.public_key, message, self.randfunc)
        reply = rsa_blind.sign_blinded(self.key, blinded)
        exchanged = (rsa_blind.encode_integer(self.public_key.n, self.public_key)
                     + rsa_blind.encode_integer(blinded, self.public_key)
                     + rsa_blind.encode_integer(reply, self.public_key))
        self.assertEqual(len(exchanged), 768)

    def test_05_ceremonies(self) -> None:
        """
        Method for testing repeated registration ceremonies.
        """
        role_keys = self.admin.public_keys()
        certificates = []
        for index in range(100):
            users = [(f"member-{index}", 1, index.to_bytes(32, "big"))]
            certificates.extend(registration_ceremony(self.admin, users, self.randfunc))
        self.assertEqual(len(certificates), 100)
        self.assertEqual(len({certificate.to_bytes() for certificate in certificates}), 100)
        for certificate in certificates:
            self.assertTrue(verify_certificate(role_keys, certificate))
            self.assertEqual(len(certificate.to_bytes()), 4 + 32 + 256)
            self.assertEqual(Certificate.from_bytes(certificate.to_bytes()), certificate)
        self.assertFalse(self.admin.is_open)

        forged_signature = (int.from_bytes(certificates[0].signature, "big")
                            * int.from_bytes(certificates[1].signature, "big") % role_keys[1].n)
        for candidate in [certificates[0].public_key, certificates[1].public_key, b"\x00" * 32]:
            forged = Certificate(1, candidate, rsa_blind.encode_integer(forged_signature, role_keys[1]))
            self.assertFalse(verify_certificate(role_keys, forged))
        for role_id, blinded in self.admin.transcript[:10]:
            for certificate in certificates[:10]:
                forged = Certificate(role_id, certificate.public_key, rsa_blind.encode_integer(blinded, role_keys[1]))
                self.assertFalse(verify_certificate(role_keys, forged))

    def test_06_roles(self) -> None:
        """
        Method for testing per-role keys.
        """
        self.admin.restart()
        role_keys = self.admin.public_keys()
        first, second = registration_ceremony(self.admin, [("alice", 1, b"\x01" * 32), ("bob", 2, b"\x02" * 32)],
                                              self.randfunc)
        self.assertTrue(verify_certificate(role_keys, first))
        self.assertTrue(verify_certificate(role_keys, second))
        self.assertFalse(verify_certificate(role_keys, Certificate(2, first.public_key, first.signature)))
        self.assertFalse(verify_certificate(role_keys, Certificate(1, second.public_key, second.signature)))
        self.assertFalse(verify_certificate(role_keys, Certificate(3, first.public_key, first.signature)))

    def test_07_refusals(self) -> None:
        """
        Method for testing refused signing requests.
        """
        admin = self.admin
        admin.restart()
        blinded, _ = rsa_blind.blind(admin.public_keys()[1], b"\x05" * 32, self.randfunc)
        with self.assertRaises(CeremonyClosedException):
            admin.sign("carol", 1, blinded)
        admin.open()
        admin.sign("carol", 1, blinded)
        with self.assertRaises(DuplicateBlindedMessageException):
            admin.sign("dave", 1, blinded)
        other, _ = rsa_blind.blind(admin.public_keys()[1], b"\x06" * 32, self.randfunc)
        with self.assertRaises(DuplicateBlindedMessageException):
            admin.sign("carol", 1, other)
        with self.assertRaises(UnauthenticatedMemberException):
            admin.sign("erin", 7, other)
        admin.close()

        restricted = AdminSigner([1], seed=b"restricted", authenticate=lambda member_id, role_id: member_id != "mallory")
        restricted.open()
        with self.assertRaises(UnauthenticatedMemberException):
            restricted.sign("mallory", 1, other)

        old_keys = admin.public_keys()
        admin.restart()
        self.assertNotEqual(admin.public_keys()[1].n, old_keys[1].n)
        self.assertEqual(admin.transcript, [])

    def test_08_blinded_uniformity(self) -> None:
        """
        Method for testing that blinded messages of one message spread evenly over residues.
        """
        buckets = 16
        samples = 480
        residues = [rsa_blind.blind(self.public_key, b"\x07" * 32, self.randfunc)[0] % buckets
                    for _ in range(samples)]
        counts = np.bincount(np.array(residues), minlength=buckets)
        expected = samples / buckets
        chi_square = float(((counts - expected) ** 2 / expected).sum())
        self.assertTrue(chi_square < 37.7)

    @classmethod
    def setUpClass(cls):
        """
        Class method for setting up test case.
        """
        cls.key = rsa_blind.keygen(2048, b"blindsig-test")
        cls.public_key = cls.key.public_key()
        cls.randfunc = SeededByteSource(b"blindsig-randomness")
        cls.admin = AdminSigner([1, 2], seed=b"admin-test")

    @classmethod
    def tearDownClass(cls):
        """
        Class method for setting tearing down test case.
        """
        del cls.key
        del cls.public_key
        del cls.randfunc
        del cls.admin
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
