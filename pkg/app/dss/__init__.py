"""Decision support system: warns on a violation, records an incident when the violation continues"""
import logging

logger = logging.getLogger(__name__)

from .models import Phase, ActionKind, DssConfig, DssState, DssAction
from .machine import step, is_hit, format_warn_event
