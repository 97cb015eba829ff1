"""Collaborative UWB+VIO relative localization and FoV-constrained
coverage planning for heterogeneous UGV+MAV teams."""

__version__ = "0.1.0"
