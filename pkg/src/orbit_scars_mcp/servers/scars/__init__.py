"""Scars MCP Server - embedded periodic orbits in chaotic spin chains."""
