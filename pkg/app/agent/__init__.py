"""Ridesharing agent: incident ledger and vehicle registry. The rest api over them lives in app.api"""
import logging

logger = logging.getLogger(__name__)
