"""Orbit Scars MCP - periodic-orbit embedding toolkit for chaotic spin chains."""

__version__ = "0.1.0"
