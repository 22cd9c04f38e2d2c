import os
import unittest

from app import db
from app import incident_ledger
from app import make_app
from app.agent.models import Vehicle
from app.config import TestConfig
from app.detector import DetectionClass
from app.vault import EncryptionKey, IncidentMeta, seal_incident

SESSION_ID = bytes.fromhex('0123456789abcdef0123456789abcdef')
DEVICE_KEY = EncryptionKey.from_hex(TestConfig.VAULT_KEY_HEX, TestConfig.VAULT_KEY_ID)


def reset_agent_log():
    """Removes the incident log and its session bindings left by a previous test"""
    for path in (TestConfig.AGENT_LOG_PATH, TestConfig.AGENT_LOG_PATH + '.sessions'):
        if os.path.exists(path):
            os.remove(path)


def init_envelope(timestamp_ms: int = 1000, payload: bytes = b'captured scene', key: EncryptionKey = DEVICE_KEY,
                  session_id: bytes = SESSION_ID) -> bytes:
    meta = IncidentMeta(session_id=session_id, timestamp_ms=timestamp_ms, category=DetectionClass.VIOLATION,
                        confidence=0.87)
    return seal_incident(payload, meta, key)


class ApiClientTestCase(unittest.TestCase):
    """Tries out rest api functionality"""

    def post_envelope(self, envelope: bytes, vehicle_id: str = None):
        headers = {'X-Vehicle-Id': vehicle_id} if vehicle_id else {}
        return self.test_client.post('/api/incidents', data=envelope, headers=headers,
                                     content_type='application/octet-stream')

    def register_vehicle(self, vehicle_id: str = 'car-1', **fields):
        body = {'title_valid': True, 'insurance_valid': True}
        body.update(fields)
        return self.test_client.put(f'/api/vehicles/{vehicle_id}', json=body)

    def setUp(self) -> None:
        reset_agent_log()
        self.app = make_app(TestConfig)
        self.app_context = self.app.app_context()
        self.app_context.push()
        self.test_client = self.app.test_client()
        db.create_all()

    def tearDown(self) -> None:
        db.session.remove()
        db.drop_all()
        self.app_context.pop()
        reset_agent_log()

    def test_ingest(self):
        response = self.post_envelope(init_envelope())
        self.assertEqual(response.status_code, 201)
        self.assertEqual(response.json['incident_id'], 1)
        response = self.post_envelope(init_envelope(timestamp_ms=2000))
        self.assertEqual(response.json['incident_id'], 2)
        self.assertEqual(incident_ledger.count, 2)
        self.assertTrue(os.path.exists(TestConfig.AGENT_LOG_PATH))

    def test_duplicate(self):
        self.post_envelope(init_envelope())
        response = self.post_envelope(init_envelope())
        self.assertEqual(response.status_code, 409)
        self.assertTrue(response.json['message'].startswith('DuplicateEnvelopeError'))

    def test_malformed(self):
        response = self.post_envelope(b'not an envelope at all')
        self.assertEqual(response.status_code, 400)
        envelope = init_envelope()
        response = self.post_envelope(b'SMR9' + envelope[4:])
        self.assertEqual(response.status_code, 400)
        self.assertTrue(response.json['message'].startswith('BadMagicError'))
        self.assertEqual(incident_ledger.count, 0)

    def test_unknown_key_and_integrity(self):
        response = self.post_envelope(init_envelope(key=EncryptionKey(b'unknown', key_id=9)))
        self.assertEqual(response.status_code, 422)
        self.assertEqual(response.json['message'], 'UnknownKeyIdError: no key with id 9')
        response = self.post_envelope(init_envelope(key=EncryptionKey(b'forged', key_id=1)))
        self.assertEqual(response.status_code, 422)
        self.assertTrue(response.json['message'].startswith('IntegrityFailureError'))
        self.assertEqual(incident_ledger.count, 0)

    def test_vehicle_header(self):
        response = self.post_envelope(init_envelope(), vehicle_id='car-1')
        self.assertEqual(response.status_code, 404)
        self.register_vehicle('car-1')
        response = self.post_envelope(init_envelope(), vehicle_id='car-1')
        self.assertEqual(response.status_code, 201)
        response = self.test_client.get('/api/incidents/1')
        self.assertEqual(response.json['data']['vehicle_id'], 'car-1')

    def test_list_incidents(self):
        other_session = bytes(16)
        self.post_envelope(init_envelope(timestamp_ms=3000))
        self.post_envelope(init_envelope(timestamp_ms=1000, session_id=other_session))
        self.post_envelope(init_envelope(timestamp_ms=2000))
        response = self.test_client.get(f'/api/incidents?session={SESSION_ID.hex()}')
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.json['session_id'], SESSION_ID.hex())
        data = response.json['data']
        self.assertEqual([incident['incident_id'] for incident in data], [1, 3])
        self.assertEqual([incident['timestamp_ms'] for incident in data], [3000, 2000])
        self.assertEqual(data[0]['class'], 'Violation')
        self.assertEqual(data[0]['confidence'], 0.87)
        self.assertNotIn('payload', data[0])
        response = self.test_client.get(f'/api/incidents?session={"ff" * 16}')
        self.assertEqual(response.json['data'], [])

    def test_list_needs_valid_session(self):
        self.assertEqual(self.test_client.get('/api/incidents').status_code, 400)
        self.assertEqual(self.test_client.get('/api/incidents?session=abc').status_code, 400)
        self.assertEqual(self.test_client.get(f'/api/incidents?session={"zz" * 16}').status_code, 400)

    def test_single_incident(self):
        self.post_envelope(init_envelope())
        response = self.test_client.get('/api/incidents/1')
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.json['data']['session_id'], SESSION_ID.hex())
        self.assertEqual(response.json['data']['timestamp_ms'], 1000)
        self.assertEqual(self.test_client.get('/api/incidents/2').status_code, 404)

    def test_payload(self):
        self.post_envelope(init_envelope(payload=b'\x00\x01scene\xff'))
        response = self.test_client.get('/api/incidents/1/payload')
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.mimetype, 'application/octet-stream')
        self.assertEqual(response.data, b'\x00\x01scene\xff')
        self.assertEqual(self.test_client.get('/api/incidents/7/payload').status_code, 404)

    def test_payload_without_key(self):
        self.post_envelope(init_envelope())
        # the agent restarts without the key of the device
        incident_ledger.open(TestConfig.AGENT_LOG_PATH, keys={})
        self.assertEqual(self.test_client.get('/api/incidents/1').status_code, 200)
        response = self.test_client.get('/api/incidents/1/payload')
        self.assertEqual(response.status_code, 422)

    def test_incidents_survive_restart(self):
        self.register_vehicle('car-1')
        self.post_envelope(init_envelope(), vehicle_id='car-1')
        self.post_envelope(init_envelope(timestamp_ms=5000))
        restarted = make_app(TestConfig)
        with restarted.test_client() as client:
            response = client.get(f'/api/incidents?session={SESSION_ID.hex()}')
        self.assertEqual(len(response.json['data']), 2)
        self.assertTrue(all(incident['vehicle_id'] == 'car-1' for incident in response.json['data']))

    def test_register_vehicle(self):
        response = self.register_vehicle('car-1', driver_id='driver-5')
        self.assertEqual(response.status_code, 201)
        self.assertEqual(response.json['data']['driver_id'], 'driver-5')
        self.assertTrue(response.json['data']['roadworthy'])
        response = self.register_vehicle('car-1', insurance_valid=False)
        self.assertEqual(response.status_code, 200)
        self.assertFalse(response.json['data']['roadworthy'])
        self.assertEqual(len(Vehicle.query.all()), 1)
        response = self.test_client.get('/api/vehicles/car-1')
        self.assertEqual(response.status_code, 200)
        self.assertFalse(response.json['data']['insurance_valid'])

    def test_register_vehicle_errors(self):
        response = self.register_vehicle('car-1', title_valid=False)
        self.assertEqual(response.status_code, 422)
        self.assertTrue(response.json['message'].startswith('InvalidRecordError'))
        response = self.test_client.put('/api/vehicles/car-1', json={'insurance_valid': True})
        self.assertEqual(response.status_code, 400)
        response = self.register_vehicle('car-1', condition='broken')
        self.assertEqual(response.status_code, 400)
        self.assertEqual(len(Vehicle.query.all()), 0)
        self.assertEqual(self.test_client.get('/api/vehicles/car-1').status_code, 404)
