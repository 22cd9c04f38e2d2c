"""
Scenario files and synthetic scenarios.

A scenario file is one json object: the header fields `session_id` (32 hex digits), `vehicle_id`, `consent`, `seed`,
`detector_profile`, `link_schedule`, `strategy` and optionally `consent_scope`, plus a `frames` array of
`{frame_id, t_ms, lighting, features, truth}` objects. A missing `link_schedule` means the link is always up.
"""
import json
from typing import Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from app.detector import DetectionClass, DetectorProfile, Lighting, SceneFrame, TruthLabel
from app.detector import DEFAULT_FEATURE_DIMENSION
from app.transport import LinkModel, always_up
from . import logger
from .exceptions import ScenarioError
from .models import ConsentScope, Scenario, Strategy


def scenario_from_dict(data: Mapping) -> Scenario:
    try:
        profile = dict(data.get('detector_profile') or {})
        base_confidence = float(profile.pop('base_confidence', 0.9))
        link_schedule = data.get('link_schedule')
        return Scenario(session_id=bytes.fromhex(data['session_id']),
                        vehicle_id=str(data['vehicle_id']),
                        consent=bool(data['consent']),
                        frames=tuple(SceneFrame.from_dict(frame) for frame in data.get('frames') or ()),
                        detector_profile=DetectorProfile.from_mapping(profile),
                        link=always_up() if link_schedule is None else LinkModel.from_schedule(link_schedule),
                        seed=int(data.get('seed', 0)),
                        consent_scope=ConsentScope(data.get('consent_scope', 'all')),
                        base_confidence=base_confidence,
                        strategy=Strategy.from_mapping(data.get('strategy')))
    except ScenarioError:
        raise
    except (KeyError, TypeError, ValueError) as error:
        raise ScenarioError(f'Scenario is not valid: {error}') from error


def scenario_to_dict(scenario: Scenario) -> dict:
    profile = scenario.detector_profile.to_dict()
    profile['base_confidence'] = scenario.base_confidence
    return {
        'session_id': scenario.session_id.hex(),
        'vehicle_id': scenario.vehicle_id,
        'consent': scenario.consent,
        'consent_scope': scenario.consent_scope.value,
        'seed': scenario.seed,
        'detector_profile': profile,
        'link_schedule': scenario.link.to_schedule(),
        'strategy': scenario.strategy.to_dict(),
        'frames': [frame.to_dict() for frame in scenario.frames],
    }


def load_scenario(path: str) -> Scenario:
    """Reads a scenario json file"""
    try:
        with open(path, encoding='utf-8') as file:
            data = json.load(file)
    except json.JSONDecodeError as error:
        raise ScenarioError(f'Scenario file {path} is not valid json: {error}') from error
    scenario = scenario_from_dict(data)
    logger.info(f'Scenario {scenario.session_id.hex()} with {len(scenario.frames)} frames was loaded from {path}')
    return scenario


def dump_scenario(scenario: Scenario, path: str) -> str:
    with open(path, 'w', encoding='utf-8') as file:
        json.dump(scenario_to_dict(scenario), file, indent=2)
    return path


def capture_payload(frame: SceneFrame, seed: int, size: int) -> bytes:
    """Simulated camera capture of a frame: the same seed and frame always give the same bytes"""
    return np.random.default_rng([seed, frame.frame_id]).bytes(size)


def build_scenario(n_frames: int = 50, interval_ms: int = 100, episodes: Iterable[Tuple[int, int]] = ((10, 3),),
                   seed: int = 0, session_id: Optional[bytes] = None, vehicle_id: str = 'vehicle-1',
                   consent: bool = True, consent_scope: str = 'all', night_from: Optional[int] = None,
                   dimension: int = DEFAULT_FEATURE_DIMENSION, detector_profile: Optional[DetectorProfile] = None,
                   link: Optional[LinkModel] = None, strategy: Optional[Strategy] = None,
                   base_confidence: float = 0.9, violation_shift: float = 2.0) -> Scenario:
    """
    Synthesizes a ride. Every frame shows the driver and the passenger; frames inside an episode also carry a
    violation label and have their features shifted by `violation_shift`.
    :param n_frames: number of frames, taken every `interval_ms` from 0 on
    :param interval_ms: time between frames
    :param episodes: `(first frame index, length)` of each violation episode
    :param seed: seed of the features, of the session id (when not given) and of every later draw
    :param night_from: index of the first night frame, none for a day-only ride
    :return: scenario
    """
    if n_frames < 0 or interval_ms <= 0:
        raise ScenarioError('Frame count cannot be negative and the interval must be positive')
    rng = np.random.default_rng(seed)
    generated_session_id = rng.bytes(16)
    session_id = session_id or generated_session_id
    violating = set()
    for start, length in episodes:
        violating.update(range(start, min(start + length, n_frames)))

    frames = []
    for index in range(n_frames):
        features = rng.normal(0.0, 1.0, size=dimension)
        truth: Sequence[TruthLabel] = [TruthLabel(DetectionClass.DRIVER), TruthLabel(DetectionClass.PASSENGER)]
        if index in violating:
            features = features + violation_shift
            truth = [*truth, TruthLabel(DetectionClass.VIOLATION)]
        lighting = Lighting.NIGHT if night_from is not None and index >= night_from else Lighting.DAY
        frames.append(SceneFrame(frame_id=index, t_ms=index * interval_ms, lighting=lighting, features=features,
                                 truth=tuple(truth)))
    return Scenario(session_id=session_id, vehicle_id=vehicle_id, consent=consent, frames=tuple(frames),
                    detector_profile=detector_profile or DetectorProfile(), link=link or always_up(), seed=seed,
                    consent_scope=ConsentScope(consent_scope), base_confidence=base_confidence,
                    strategy=strategy or Strategy())
