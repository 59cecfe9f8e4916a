"""Tests for the Scars MCP server and experiment runner."""
