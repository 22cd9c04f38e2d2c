import unittest
from typing import List, Sequence

from app.detector import BoundingBox, Detection, DetectionClass, Lighting, SceneFrame
from app.dss import ActionKind, DssConfig, DssState, Phase, format_warn_event, is_hit, step
from app.dss.exceptions import InvalidDssConfigError, TimeRegressionError

SESSION_ID = bytes(range(16))
FULL = BoundingBox(0.0, 0.0, 1.0, 1.0)


def violation(confidence: float) -> List[Detection]:
    return [Detection(DetectionClass.VIOLATION, FULL, confidence)]


def scene(frame_id: int, t_ms: int) -> SceneFrame:
    return SceneFrame(frame_id=frame_id, t_ms=t_ms, lighting=Lighting.DAY, features=[0.0])


def run_machine(confidences: Sequence[float], interval_ms: int = 100, config: DssConfig = None):
    """Feeds one violation detection a frame (none for a None confidence) and returns the actions and the state"""
    config = config or DssConfig()
    state = DssState.new_session(SESSION_ID)
    actions = []
    for i, confidence in enumerate(confidences):
        frame = scene(i, i * interval_ms)
        detections = [] if confidence is None else violation(confidence)
        state, action = step(state, frame, detections, config)
        actions.append(action.kind)
    return actions, state


class DssTestCase(unittest.TestCase):
    """Tests for the decision support transition function"""

    def test_episode_gives_one_warning_and_one_incident(self):
        actions, state = run_machine([0.5, 0.9, 0.95, 0.92, 0.5])
        self.assertEqual(actions.count(ActionKind.WARN), 1)
        self.assertEqual(actions.count(ActionKind.RECORD_INCIDENT), 1)
        self.assertEqual(actions[1], ActionKind.WARN)
        self.assertEqual(actions[2], ActionKind.RECORD_INCIDENT)
        self.assertIs(state.phase, Phase.COOLDOWN)
        self.assertEqual(state.incident_count, 1)

    def test_threshold_is_strict(self):
        actions, state = run_machine([0.80] * 20)
        self.assertTrue(all(action is ActionKind.NONE for action in actions))
        self.assertIs(state.phase, Phase.MONITORING)
        self.assertFalse(is_hit(violation(0.80), DssConfig()))
        self.assertTrue(is_hit(violation(0.8001), DssConfig()))

    def test_single_frame_warns_without_incident(self):
        actions, state = run_machine([0.9] + [None] * 10)
        self.assertEqual(actions.count(ActionKind.WARN), 1)
        self.assertEqual(actions.count(ActionKind.RECORD_INCIDENT), 0)
        self.assertEqual(state.incident_count, 0)

    def test_other_classes_are_ignored(self):
        state = DssState.new_session(SESSION_ID)
        frame = SceneFrame(frame_id=0, t_ms=0, lighting=Lighting.DAY, features=[0.0])
        detections = [Detection(DetectionClass.DRIVER, FULL, 0.99), Detection(DetectionClass.PASSENGER, FULL, 0.99)]
        new_state, action = step(state, frame, detections, DssConfig())
        self.assertIs(action.kind, ActionKind.NONE)
        self.assertEqual(new_state, state)

    def test_strongest_detection_is_reported(self):
        state = DssState.new_session(SESSION_ID)
        frame = SceneFrame(frame_id=0, t_ms=0, lighting=Lighting.DAY, features=[0.0])
        _, action = step(state, frame, violation(0.85) + violation(0.97) + violation(0.97), DssConfig())
        self.assertEqual(action.detection.confidence, 0.97)
        self.assertIs(action.frame, frame)

    def test_warning_expires(self):
        config = DssConfig(warn_window_ms=1000)
        # a warning, then nothing for longer than the window
        actions, state = run_machine([0.9] + [None] * 15, config=config)
        self.assertIs(state.phase, Phase.MONITORING)
        # the same hit within the window records
        actions, _ = run_machine([0.9, None, None, None, None, None, None, None, None, None, 0.9], config=config)
        self.assertEqual(actions[-1], ActionKind.RECORD_INCIDENT)

    def test_hit_after_expired_warning_is_ignored(self):
        config = DssConfig(warn_window_ms=1000)
        state, action = step(DssState.new_session(SESSION_ID), scene(0, 0), violation(0.9), config)
        self.assertIs(action.kind, ActionKind.WARN)
        new_state, action = step(state, scene(1, 5000), violation(0.9), config)
        self.assertIs(action.kind, ActionKind.NONE)
        self.assertEqual(new_state, state)
        # a frame without a hit closes the stale warning
        new_state, action = step(new_state, scene(2, 5100), [], config)
        self.assertIs(action.kind, ActionKind.NONE)
        self.assertIs(new_state.phase, Phase.MONITORING)
        self.assertEqual(new_state.incident_count, 0)

    def test_rearm_expired_warning(self):
        config = DssConfig(warn_window_ms=1000, rearm_expired_warning=True)
        state, _ = step(DssState.new_session(SESSION_ID), scene(0, 0), violation(0.9), config)
        state, action = step(state, scene(1, 5000), violation(0.9), config)
        self.assertIs(action.kind, ActionKind.WARN)
        self.assertIs(state.phase, Phase.WARNED)
        self.assertEqual(state.phase_entered_at, 5000)
        state, action = step(state, scene(2, 5100), violation(0.9), config)
        self.assertIs(action.kind, ActionKind.RECORD_INCIDENT)
        self.assertEqual(state.incident_count, 1)

    def test_cooldown_ignores_hits(self):
        config = DssConfig(cooldown_ms=1000)
        # incident at 100 ms, cooldown until 1100 ms
        actions, state = run_machine([0.9] * 11, config=config)
        self.assertEqual(actions.count(ActionKind.RECORD_INCIDENT), 1)
        self.assertIs(state.phase, Phase.COOLDOWN)
        actions, state = run_machine([0.9] * 12, config=config)
        self.assertIs(state.phase, Phase.MONITORING)
        self.assertIs(actions[-1], ActionKind.NONE)
        # the next hit opens a new episode
        actions, state = run_machine([0.9] * 15, config=config)
        self.assertEqual(actions.count(ActionKind.WARN), 2)
        self.assertEqual(actions.count(ActionKind.RECORD_INCIDENT), 2)
        self.assertEqual(state.incident_count, 2)

    def test_time_regression(self):
        state = DssState.new_session(SESSION_ID, started_at=500)
        frame = SceneFrame(frame_id=0, t_ms=400, lighting=Lighting.DAY, features=[0.0])
        with self.assertRaises(TimeRegressionError):
            step(state, frame, [], DssConfig())

    def test_step_is_pure(self):
        state = DssState.new_session(SESSION_ID)
        frame = SceneFrame(frame_id=0, t_ms=0, lighting=Lighting.DAY, features=[0.0])
        self.assertEqual(step(state, frame, violation(0.9), DssConfig()),
                         step(state, frame, violation(0.9), DssConfig()))
        self.assertIs(state.phase, Phase.MONITORING)

    def test_config(self):
        with self.assertRaises(InvalidDssConfigError):
            DssConfig(confidence_threshold=1.0)
        with self.assertRaises(InvalidDssConfigError):
            DssConfig(cooldown_ms=0)
        config = DssConfig.from_mapping({'DSS_CONFIDENCE_THRESHOLD': '0.7', 'DSS_WARN_WINDOW_MS': 5000})
        self.assertEqual(config, DssConfig(0.7, 5000, 10000))
        self.assertFalse(config.rearm_expired_warning)
        self.assertTrue(DssConfig.from_mapping({'DSS_REARM_EXPIRED_WARNING': 'true'}).rearm_expired_warning)

    def test_session_id(self):
        self.assertEqual(len(DssState.new_session().session_id), 16)
        with self.assertRaises(ValueError):
            DssState(session_id=b'short')

    def test_warn_event_line(self):
        state = DssState.new_session(SESSION_ID)
        self.assertEqual(format_warn_event(state, 1500), f'WARN {SESSION_ID.hex()} 1500')
