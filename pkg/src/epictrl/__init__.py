"""Simulation and control analysis for a constant-population SEIR model
with feedback vaccination of newborns."""

__version__ = "0.1.0"
