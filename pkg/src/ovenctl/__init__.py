"""
OvenCtl - thermal modelling and observer-based temperature regulation for a
convection oven cooking a single food item.
"""

__version__ = "1.0.0"

from .ovenctl import OvenCtl

__all__ = ["OvenCtl"]
