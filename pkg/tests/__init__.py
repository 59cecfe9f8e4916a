"""Tests for orbit-scars-mcp."""
