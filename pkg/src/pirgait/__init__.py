"""Gait velocity estimation from in-home motion-sensor room transitions."""

__version__ = "0.1.0"
