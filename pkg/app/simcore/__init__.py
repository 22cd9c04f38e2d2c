"""Discrete-event simulator of a monitored ride: detector, decision support, vault, uplink and agent in one timeline"""
import logging

logger = logging.getLogger(__name__)

from .models import StrategyKind, Strategy, DeviceProfile, Scenario, IncidentTrace, SessionReport
from .models import ComparisonRow, ComparisonReport
from .presets import DEVICE_PRESETS, REFERENCE_LATENCIES, LIGHTING_RESPONSE_MS, get_device_preset
from .scenario import load_scenario, dump_scenario, scenario_from_dict, scenario_to_dict, build_scenario
from .scenario import capture_payload
from .session import frame_latency, run_session
from .comparison import compare_strategies
