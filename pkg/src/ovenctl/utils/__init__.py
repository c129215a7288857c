"""Utility functions and classes for OvenCtl."""

from .pole_parser import PoleParser

__all__ = ["PoleParser"]
