"""
Transition function of the decision support machine.

    Monitoring --hit--> Warned                      action Warn
    Warned --hit, within window--> Cooldown          action RecordIncident
    Warned --hit, window expired--> Warned           no action (warns again with rearm_expired_warning)
    Warned --no hit, window expired--> Monitoring    no action
    Cooldown --cooldown passed--> Monitoring         no action, hits are ignored

A hit is a Violation detection strictly more confident than the threshold. Driver and passenger detections never
drive the machine.
"""
from typing import Iterable, Optional, Tuple

from app.detector import Detection, DetectionClass, SceneFrame
from . import logger
from .exceptions import TimeRegressionError
from .models import ActionKind, DssAction, DssConfig, DssState, Phase


def strongest_hit(detections: Iterable[Detection], config: DssConfig) -> Optional[Detection]:
    """Returns the most confident violation above the threshold, the first one on ties"""
    best = None
    for detection in detections:
        if detection.category is not DetectionClass.VIOLATION:
            continue
        if detection.confidence > config.confidence_threshold and (
                best is None or detection.confidence > best.confidence):
            best = detection
    return best


def is_hit(detections: Iterable[Detection], config: DssConfig) -> bool:
    return strongest_hit(detections, config) is not None


def step(state: DssState, frame: SceneFrame, detections: Iterable[Detection],
         config: DssConfig) -> Tuple[DssState, DssAction]:
    """
    Feeds one frame with its detections into the machine. The function is pure: the same arguments always give the
    same new state and action.
    :param state: current state of the session
    :param frame: frame the detections came from
    :param detections: detector output for the frame
    :param config: thresholds and windows
    :return: new state and the action to perform
    """
    if frame.t_ms < state.phase_entered_at:
        raise TimeRegressionError(f'Frame {frame.frame_id} at {frame.t_ms} ms is earlier than the phase '
                                  f'{state.phase.value} entered at {state.phase_entered_at} ms')
    hit = strongest_hit(detections, config)
    elapsed = frame.t_ms - state.phase_entered_at

    if state.phase is Phase.MONITORING:
        if hit:
            return state.enter(Phase.WARNED, frame.t_ms), DssAction(ActionKind.WARN, frame, hit)
        return state, DssAction.none()

    if state.phase is Phase.WARNED:
        if elapsed <= config.warn_window_ms:
            if hit:
                new_state = state.enter(Phase.COOLDOWN, frame.t_ms, incidents=1)
                return new_state, DssAction(ActionKind.RECORD_INCIDENT, frame, hit)
            return state, DssAction.none()
        if not hit:
            return state.enter(Phase.MONITORING, frame.t_ms), DssAction.none()
        if config.rearm_expired_warning:
            return state.enter(Phase.WARNED, frame.t_ms), DssAction(ActionKind.WARN, frame, hit)
        return state, DssAction.none()

    if elapsed >= config.cooldown_ms:
        return state.enter(Phase.MONITORING, frame.t_ms), DssAction.none()
    return state, DssAction.none()


def format_warn_event(state: DssState, t_ms: int) -> str:
    """Line of the session log which stands for the spoken warning"""
    line = f'WARN {state.session_id.hex()} {t_ms}'
    logger.info(line)
    return line
