"""
Module for putting unittests.
"""