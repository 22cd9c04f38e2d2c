"""Store-and-forward delivery of sealed incidents over an intermittent cellular link"""
import logging

logger = logging.getLogger(__name__)

from .link import LinkWindow, LinkModel, always_up, outage, roadside_unit
from .queue import OutboundQueue, PendingEnvelope, Transfer, TextFallbackRecord, TickResult, tick
