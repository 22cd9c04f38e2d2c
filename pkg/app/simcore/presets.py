"""Device presets and published reference figures. None of these numbers is computed by the simulator"""
from typing import Dict, Tuple

from app.detector import Lighting
from .exceptions import ScenarioError
from .models import DeviceProfile

DEVICE_PRESETS: Dict[str, DeviceProfile] = {
    # inference of the optimized 8-bit model, the default device
    'reference-phone': DeviceProfile('reference-phone', inference_ms=28.0),
    'galaxy-s10-plus': DeviceProfile('galaxy-s10-plus', inference_ms=920.0, reference_latency_ms=920.0,
                                     accuracy=0.9019, ram_mb=104.0, battery_mah=79.8),
    'lg-v30': DeviceProfile('lg-v30', inference_ms=1297.0, reference_latency_ms=1297.0, accuracy=0.8845,
                            ram_mb=89.0, battery_mah=48.7),
    # full-size 32-bit network before compression
    'unoptimized-model': DeviceProfile('unoptimized-model', inference_ms=3560.0, reference_latency_ms=3560.0),
}

# average latency of violation detection reported by ride monitoring and media processing systems
REFERENCE_LATENCIES: Tuple[Tuple[str, float], ...] = (
    ('L. Liu et al. (2018)', 1273.0),
    ('L. Wang et al. (2019)', 8345.0),
    ('Long et al. (2017)', 2234.0),
    ('Ran et al. (2018)', 32100.0),
    ('SAFEMYRIDES', 620.0),
)

# response time at the 0.80 confidence threshold under each lighting
LIGHTING_RESPONSE_MS: Dict[Lighting, float] = {
    Lighting.DAY: 450.0,
    Lighting.NIGHT: 790.0,
}


def get_device_preset(name: str) -> DeviceProfile:
    try:
        return DEVICE_PRESETS[name]
    except KeyError as error:
        raise ScenarioError(f"Unknown device '{name}', choose one of {', '.join(sorted(DEVICE_PRESETS))}") from error
