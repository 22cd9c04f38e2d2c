import os
import shutil
import tempfile
import unittest
import zlib
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from app.detector import DetectionClass
from app.vault import EncryptionKey, IncidentMeta, IncidentStore, ENVELOPE_HEADER_SIZE, MAGIC, STORE_DIRECTORY
from app.vault import xor_transform, seal_incident, open_incident, parse_envelope_header, declared_envelope_len
from app.vault.exceptions import BadMagicError, UnsupportedVersionError, MalformedEnvelopeError, KeyMismatchError
from app.vault.exceptions import IntegrityFailureError, InvalidKeyError, StorageFullError, DuplicateIncidentError

SESSION_ID = bytes.fromhex('00112233445566778899aabbccddeeff')


def init_meta(timestamp_ms: int = 1_600_000_000_000, confidence: float = 0.9123) -> IncidentMeta:
    return IncidentMeta(session_id=SESSION_ID, timestamp_ms=timestamp_ms, category=DetectionClass.VIOLATION,
                        confidence=confidence)


class EnvelopeTestCase(unittest.TestCase):
    """Tests for incident encryption and the envelope format"""

    def setUp(self) -> None:
        self.key = EncryptionKey(b'secret key', key_id=3)

    def test_xor_involution_and_round_trip(self):
        rng = np.random.default_rng(1234)
        for _ in range(1000):
            # mostly small payloads to keep the suite fast, a few up to 1 MiB
            size = int(rng.integers(0, 1 << 20)) if rng.random() < 0.01 else int(rng.integers(0, 4096))
            payload = rng.bytes(size)
            key = EncryptionKey(rng.bytes(int(rng.integers(1, 33))), key_id=int(rng.integers(0, 256)))
            self.assertEqual(xor_transform(xor_transform(payload, key), key), payload)
            meta = init_meta(timestamp_ms=int(rng.integers(0, 1 << 62)), confidence=float(rng.random()))
            restored_meta, restored = open_incident(seal_incident(payload, meta, key), key)
            self.assertEqual(restored, payload)
            self.assertEqual(restored_meta.session_id, SESSION_ID)
            self.assertEqual(restored_meta.timestamp_ms, meta.timestamp_ms)
            self.assertEqual(round(restored_meta.confidence * 10000), meta.confidence_x1e4)

    def test_single_bit_tamper(self):
        rng = np.random.default_rng(99)
        payload = rng.bytes(512)
        envelope = seal_incident(payload, init_meta(), self.key)
        for _ in range(200):
            position = ENVELOPE_HEADER_SIZE + int(rng.integers(0, len(payload)))
            tampered = bytearray(envelope)
            tampered[position] ^= 1 << int(rng.integers(0, 8))
            with self.assertRaises(IntegrityFailureError):
                open_incident(bytes(tampered), self.key)

    def test_wrong_key_bytes(self):
        envelope = seal_incident(b'scene' * 100, init_meta(), self.key)
        with self.assertRaises(IntegrityFailureError):
            open_incident(envelope, EncryptionKey(b'other key!', key_id=3))

    def test_key_mismatch(self):
        envelope = seal_incident(b'scene', init_meta(), self.key)
        with self.assertRaises(KeyMismatchError):
            open_incident(envelope, EncryptionKey(b'secret key', key_id=4))

    def test_header_layout(self):
        payload = b'\x01\x02\x03'
        envelope = seal_incident(payload, init_meta(confidence=0.8), self.key)
        self.assertEqual(ENVELOPE_HEADER_SIZE, 41)
        self.assertEqual(len(envelope), 44)
        self.assertEqual(envelope[:4], MAGIC)
        self.assertEqual(envelope[4], 1)
        self.assertEqual(envelope[5], 3)
        self.assertEqual(envelope[6:22], SESSION_ID)
        self.assertEqual(int.from_bytes(envelope[22:30], 'big'), 1_600_000_000_000)
        self.assertEqual(envelope[30], 2)
        self.assertEqual(int.from_bytes(envelope[31:33], 'big'), 8000)
        self.assertEqual(int.from_bytes(envelope[33:37], 'big'), zlib.crc32(payload))
        self.assertEqual(int.from_bytes(envelope[37:41], 'big'), 3)
        # the payload never travels in clear text
        self.assertNotEqual(envelope[41:], payload)

    def test_confidence_scaling(self):
        self.assertEqual(init_meta(confidence=0.0).confidence_x1e4, 0)
        self.assertEqual(init_meta(confidence=0.5).confidence_x1e4, 5000)
        self.assertEqual(init_meta(confidence=0.9019).confidence_x1e4, 9019)
        self.assertEqual(init_meta(confidence=1.0).confidence_x1e4, 10000)
        envelope = seal_incident(b'x', init_meta(confidence=0.9019), self.key)
        self.assertEqual(int.from_bytes(envelope[31:33], 'big'), 9019)

    def test_malformed_envelopes(self):
        envelope = seal_incident(b'payload', init_meta(), self.key)
        with self.assertRaises(BadMagicError):
            parse_envelope_header(b'XXXX' + envelope[4:])
        with self.assertRaises(UnsupportedVersionError):
            parse_envelope_header(envelope[:4] + b'\x02' + envelope[5:])
        with self.assertRaises(MalformedEnvelopeError):
            parse_envelope_header(envelope[:20])
        with self.assertRaises(MalformedEnvelopeError):
            parse_envelope_header(envelope[:-1])
        with self.assertRaises(MalformedEnvelopeError):
            parse_envelope_header(envelope + b'\x00')
        with self.assertRaises(MalformedEnvelopeError):
            parse_envelope_header(envelope[:30] + b'\x07' + envelope[31:])
        with self.assertRaises(MalformedEnvelopeError):
            parse_envelope_header(envelope[:31] + (10001).to_bytes(2, 'big') + envelope[33:])

    def test_declared_length(self):
        envelope = seal_incident(b'abc' * 10, init_meta(), self.key)
        self.assertEqual(declared_envelope_len(envelope + b'tail'), len(envelope))
        with self.assertRaises(MalformedEnvelopeError):
            declared_envelope_len(envelope[:10])

    def test_empty_payload(self):
        envelope = seal_incident(b'', init_meta(), self.key)
        self.assertEqual(len(envelope), ENVELOPE_HEADER_SIZE)
        self.assertEqual(envelope[33:37], b'\x00\x00\x00\x00')
        self.assertEqual(parse_envelope_header(envelope).plaintext_crc32, 0)
        self.assertEqual(parse_envelope_header(envelope).payload_len, 0)
        self.assertEqual(open_incident(envelope, self.key)[1], b'')

    def test_invalid_keys(self):
        with self.assertRaises(InvalidKeyError):
            EncryptionKey(b'')
        with self.assertRaises(InvalidKeyError):
            EncryptionKey(b'key', key_id=256)
        with self.assertRaises(InvalidKeyError):
            EncryptionKey.from_hex('not hex')
        self.assertEqual(EncryptionKey.from_hex('6b6579', 2), EncryptionKey(b'key', 2))
        self.assertNotIn("b'key'", repr(EncryptionKey(b'key', 2)))

    def test_invalid_meta(self):
        with self.assertRaises(ValueError):
            IncidentMeta(session_id=b'short', timestamp_ms=0, category=DetectionClass.VIOLATION, confidence=0.9)
        with self.assertRaises(ValueError):
            init_meta(confidence=1.5)


class IncidentStoreTestCase(unittest.TestCase):
    """Tests for the write-once device store"""

    def setUp(self) -> None:
        self.root = tempfile.mkdtemp(prefix='smr-store-test-')
        self.key = EncryptionKey(b'secret key', key_id=1)

    def tearDown(self) -> None:
        shutil.rmtree(self.root, ignore_errors=True)

    def test_store_and_read(self):
        store = IncidentStore(self.root)
        envelope = seal_incident(b'scene', init_meta(), self.key)
        path = store.store_incident(envelope, frame_id=7)
        self.assertTrue(path.startswith(os.path.join(self.root, STORE_DIRECTORY)))
        self.assertEqual(os.path.basename(path), '00000001600000000000_0000000007.smri')
        identifier, = store.list_incidents()
        self.assertEqual(store.read_incident(identifier), envelope)
        # nothing but the envelope is left behind
        self.assertEqual(os.listdir(store.directory), [os.path.basename(path)])

    def test_write_once(self):
        store = IncidentStore(self.root)
        envelope = seal_incident(b'scene', init_meta(), self.key)
        store.store_incident(envelope, frame_id=1)
        with self.assertRaises(DuplicateIncidentError):
            store.store_incident(seal_incident(b'other', init_meta(), self.key), frame_id=1)
        self.assertEqual(store.read_incident(store.list_incidents()[0]), envelope)

    def test_chronological_order(self):
        store = IncidentStore(self.root)
        for timestamp_ms in (9_000, 100, 50_000_000, 7):
            store.store_incident(seal_incident(b'x', init_meta(timestamp_ms=timestamp_ms), self.key))
        stamps = [parse_envelope_header(store.read_incident(name)).timestamp_ms for name in store.list_incidents()]
        self.assertEqual(stamps, [7, 100, 9_000, 50_000_000])

    def test_capacity(self):
        envelope = seal_incident(b'x' * 59, init_meta(), self.key)
        store = IncidentStore(self.root, capacity_bytes=2 * len(envelope))
        store.store_incident(envelope, frame_id=1)
        store.store_incident(envelope, frame_id=2)
        self.assertEqual(store.used_bytes(), 200)
        with self.assertRaises(StorageFullError):
            store.store_incident(envelope, frame_id=3)
        self.assertEqual(len(store.list_incidents()), 2)

    def test_parallel_stores(self):
        store = IncidentStore(self.root)
        # ten names stored once, five names raced by two writers each
        jobs = [(1_000 + i, i) for i in range(10)] + [(2_000 + i, i) for i in range(5) for _ in range(2)]

        def store_job(job):
            timestamp_ms, frame_id = job
            envelope = seal_incident(b'scene', init_meta(timestamp_ms=timestamp_ms), self.key)
            try:
                return store.store_incident(envelope, frame_id=frame_id)
            except DuplicateIncidentError as error:
                return error

        with ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(store_job, jobs))

        duplicates = {}
        for job, result in zip(jobs, results):
            if isinstance(result, DuplicateIncidentError):
                duplicates[job] = duplicates.get(job, 0) + 1
        self.assertEqual(duplicates, {(2_000 + i, i): 1 for i in range(5)})
        self.assertEqual(len(store.list_incidents()), 15)
        self.assertEqual(len(set(result for result in results if isinstance(result, str))), 15)
        self.assertFalse([name for name in os.listdir(store.directory) if name.startswith('.partial-')])
        for identifier in store.list_incidents():
            self.assertEqual(open_incident(store.read_incident(identifier), self.key)[1], b'scene')

    def test_only_envelopes_are_stored(self):
        store = IncidentStore(self.root)
        with self.assertRaises(MalformedEnvelopeError):
            store.store_incident(b'plain scene bytes which are not sealed')
        self.assertEqual(store.list_incidents(), [])
