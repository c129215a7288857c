"""Output handlers for OvenCtl."""

from .trajectory_writer import TrajectoryWriter, read_csv

__all__ = ["TrajectoryWriter", "read_csv"]
