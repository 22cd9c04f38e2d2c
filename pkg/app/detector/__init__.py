"""Violation detectors: a scripted one replaying ground truth and a toy linear one with float or int8 weights"""
import logging

logger = logging.getLogger(__name__)

from .models import Lighting, DetectionClass, BoundingBox, TruthLabel, SceneFrame, Detection, DetectorProfile
from .models import DEFAULT_FEATURE_DIMENSION, FULL_FRAME
from .detectors import Detector, ScriptedDetector, ToyDetector, WeightMode, build_toy_detector, detect
